#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcc {

using Complex = std::complex<double>;

/// Raised for any invalid run or grid description.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a field or trajectory stops being a valid numerical state
/// (NaN, mass leaking through the periodic boundary, mismatched shapes).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Axis { x, p };
enum class Direction { forward, inverse };

/// Uniform periodic axis. Nodes are minimum + j*spacing for j < count, so
/// `maximum` itself is the periodic image of `minimum`.
class AxisGrid {
 public:
  AxisGrid() = default;
  AxisGrid(double minimum, double maximum, std::size_t count);

  double minimum() const { return minimum_; }
  double maximum() const { return maximum_; }
  std::size_t count() const { return count_; }
  double spacing() const { return spacing_; }
  double length() const { return maximum_ - minimum_; }

  double node(std::size_t j) const { return minimum_ + static_cast<double>(j) * spacing_; }
  /// Angular frequency of bin j in standard DFT order; bin count/2 is the
  /// Nyquist mode and carries the negative value.
  double frequency(std::size_t j) const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& frequencies() const { return frequencies_; }

  bool operator==(const AxisGrid& other) const {
    return minimum_ == other.minimum_ && maximum_ == other.maximum_ && count_ == other.count_;
  }

 private:
  double minimum_ = 0.0;
  double maximum_ = 1.0;
  std::size_t count_ = 0;
  double spacing_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> frequencies_;
};

AxisGrid build_axis(double minimum, double maximum, std::size_t count);

bool is_power_of_two(std::size_t n);

/// Real distribution f(x, p), row-major with p contiguous:
/// values[ix * count_p + ip].
struct PhaseField {
  AxisGrid x_axis;
  AxisGrid p_axis;
  std::vector<double> values;
  double time = 0.0;

  PhaseField() = default;
  PhaseField(AxisGrid x, AxisGrid p, double t = 0.0);

  std::size_t nx() const { return x_axis.count(); }
  std::size_t np() const { return p_axis.count(); }
  double cell_area() const { return x_axis.spacing() * p_axis.spacing(); }

  double& at(std::size_t ix, std::size_t ip) { return values[ix * np() + ip]; }
  double at(std::size_t ix, std::size_t ip) const { return values[ix * np() + ip]; }

  /// Throws NumericalError if values.size() does not match the grids.
  void check_shape() const;
};

/// Complex amplitude on a single axis.
struct ComplexField {
  AxisGrid axis;
  std::vector<Complex> values;
  double time = 0.0;

  ComplexField() = default;
  explicit ComplexField(AxisGrid a, double t = 0.0)
      : axis(std::move(a)), values(axis.count()), time(t) {}

  double norm() const;
};

/// Complex matrix with the same layout convention as PhaseField.
struct SpectralField {
  std::size_t rows = 0;  // x direction
  std::size_t cols = 0;  // p direction
  std::vector<Complex> values;

  Complex& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  Complex at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

/// Full complex DFT along one axis. Forward is unnormalized with kernel
/// exp(-i s q); inverse carries the 1/n factor, so forward then inverse is
/// the identity. Under this convention d/dq maps to multiplication by i*s.
SpectralField transform_along(const SpectralField& field, Axis axis, Direction direction);
SpectralField transform_along(const PhaseField& field, Axis axis, Direction direction);
SpectralField to_spectral(const PhaseField& field);

double integrate_field(const PhaseField& field);
std::vector<double> marginal(const PhaseField& field, Axis axis);

/// |integral| of the field over the cells lying in the outer
/// marginFraction band of either axis.
double boundary_mass(const PhaseField& field, double margin_fraction);

/// Sum with a fixed order and Neumaier compensation.
double compensated_sum(std::span<const double> values);

}  // namespace qcc
