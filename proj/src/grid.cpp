#include "qcc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcc/fft.hpp"

namespace qcc {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

AxisGrid::AxisGrid(double minimum, double maximum, std::size_t count)
    : minimum_(minimum), maximum_(maximum), count_(count) {
  if (!std::isfinite(minimum) || !std::isfinite(maximum) || !(maximum > minimum)) {
    throw ConfigError("axis interval is degenerate: [" + std::to_string(minimum) + ", " +
                      std::to_string(maximum) + "]");
  }
  if (count < 8 || !is_power_of_two(count)) {
    throw ConfigError("axis count must be a power of two >= 8, got " + std::to_string(count));
  }
  spacing_ = (maximum - minimum) / static_cast<double>(count);
  nodes_.resize(count);
  frequencies_.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    nodes_[j] = node(j);
    frequencies_[j] = frequency(j);
  }
}

double AxisGrid::frequency(std::size_t j) const {
  const auto n = static_cast<long long>(count_);
  auto signed_index = static_cast<long long>(j);
  if (signed_index >= n / 2) signed_index -= n;
  return 2.0 * std::numbers::pi * static_cast<double>(signed_index) / length();
}

AxisGrid build_axis(double minimum, double maximum, std::size_t count) {
  return AxisGrid(minimum, maximum, count);
}

PhaseField::PhaseField(AxisGrid x, AxisGrid p, double t)
    : x_axis(std::move(x)), p_axis(std::move(p)), values(x_axis.count() * p_axis.count(), 0.0),
      time(t) {}

void PhaseField::check_shape() const {
  if (values.size() != nx() * np()) {
    throw NumericalError("phase field has " + std::to_string(values.size()) +
                         " values for a " + std::to_string(nx()) + "x" +
                         std::to_string(np()) + " grid");
  }
}

double ComplexField::norm() const {
  std::vector<double> sq(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) sq[j] = std::norm(values[j]);
  return compensated_sum(sq) * axis.spacing();
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double c = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      c += (sum - t) + v;
    } else {
      c += (v - t) + sum;
    }
    sum = t;
  }
  return sum + c;
}

SpectralField to_spectral(const PhaseField& field) {
  field.check_shape();
  SpectralField s{field.nx(), field.np(), std::vector<Complex>(field.values.size())};
  for (std::size_t i = 0; i < field.values.size(); ++i) s.values[i] = field.values[i];
  return s;
}

SpectralField transform_along(const SpectralField& field, Axis axis, Direction direction) {
  if (field.values.size() != field.rows * field.cols || field.rows == 0 || field.cols == 0) {
    throw NumericalError("transform_along: field dimensions do not match its values");
  }
  const std::size_t n = axis == Axis::x ? field.rows : field.cols;
  const std::size_t lines = axis == Axis::x ? field.cols : field.rows;
  ComplexLineTransform line(n);
  SpectralField out = field;
  const double scale = direction == Direction::inverse ? 1.0 / static_cast<double>(n) : 1.0;
  for (std::size_t l = 0; l < lines; ++l) {
    Complex* buf = line.data();
    for (std::size_t j = 0; j < n; ++j) {
      buf[j] = axis == Axis::x ? field.at(j, l) : field.at(l, j);
    }
    if (direction == Direction::forward) {
      line.forward();
    } else {
      line.inverse();
    }
    for (std::size_t j = 0; j < n; ++j) {
      (axis == Axis::x ? out.at(j, l) : out.at(l, j)) = buf[j] * scale;
    }
  }
  return out;
}

SpectralField transform_along(const PhaseField& field, Axis axis, Direction direction) {
  return transform_along(to_spectral(field), axis, direction);
}

double integrate_field(const PhaseField& field) {
  field.check_shape();
  return compensated_sum(field.values) * field.cell_area();
}

std::vector<double> marginal(const PhaseField& field, Axis axis) {
  field.check_shape();
  const std::size_t nx = field.nx();
  const std::size_t np = field.np();
  if (axis == Axis::x) {
    std::vector<double> out(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      out[ix] = compensated_sum(std::span<const double>(field.values).subspan(ix * np, np)) *
                field.p_axis.spacing();
    }
    return out;
  }
  std::vector<double> out(np);
  std::vector<double> column(nx);
  for (std::size_t ip = 0; ip < np; ++ip) {
    for (std::size_t ix = 0; ix < nx; ++ix) column[ix] = field.at(ix, ip);
    out[ip] = compensated_sum(column) * field.x_axis.spacing();
  }
  return out;
}

double boundary_mass(const PhaseField& field, double margin_fraction) {
  if (!(margin_fraction > 0.0 && margin_fraction < 0.5)) {
    throw ConfigError("boundary_mass: margin fraction must lie in (0, 0.5)");
  }
  field.check_shape();
  // Cells are [node - h/2, node + h/2]; each is weighted by the fraction of
  // its area outside the interior rectangle, so the band is exact for any
  // margin, not just multiples of the spacing.
  const auto interior = [margin_fraction](const AxisGrid& a) {
    const double lo = a.minimum() + margin_fraction * a.length();
    const double hi = a.maximum() - margin_fraction * a.length();
    std::vector<double> frac(a.count());
    for (std::size_t j = 0; j < a.count(); ++j) {
      const double left = a.node(j) - 0.5 * a.spacing();
      const double right = a.node(j) + 0.5 * a.spacing();
      frac[j] = std::max(0.0, std::min(right, hi) - std::max(left, lo)) / a.spacing();
    }
    return frac;
  };
  const std::vector<double> ix = interior(field.x_axis);
  const std::vector<double> ip = interior(field.p_axis);
  std::vector<double> picked(field.values.size());
  for (std::size_t i = 0; i < field.nx(); ++i) {
    for (std::size_t j = 0; j < field.np(); ++j) {
      picked[i * field.np() + j] = (1.0 - ix[i] * ip[j]) * field.at(i, j);
    }
  }
  return std::abs(compensated_sum(picked) * field.cell_area());
}

}  // namespace qcc
