#pragma once

#include <cstddef>
#include <cstring>
#include <memory>

#include <fftw3.h>

#include "qcc/grid.hpp"

namespace qcc {

/// fftw_malloc'd buffer of T.
template <class T>
class AlignedBuffer {
 public:
  AlignedBuffer() = default;
  explicit AlignedBuffer(std::size_t n)
      : data_(static_cast<T*>(fftw_malloc(sizeof(T) * n))), size_(n) {
    if (n > 0 && data_ == nullptr) throw std::bad_alloc();
    if (n > 0) std::memset(static_cast<void*>(data_), 0, sizeof(T) * n);
  }
  AlignedBuffer(AlignedBuffer&& o) noexcept : data_(o.data_), size_(o.size_) {
    o.data_ = nullptr;
    o.size_ = 0;
  }
  AlignedBuffer& operator=(AlignedBuffer&& o) noexcept {
    if (this != &o) {
      fftw_free(data_);
      data_ = o.data_;
      size_ = o.size_;
      o.data_ = nullptr;
      o.size_ = 0;
    }
    return *this;
  }
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;
  ~AlignedBuffer() { fftw_free(data_); }

  T* data() { return data_; }
  const T* data() const { return data_; }
  std::size_t size() const { return size_; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

 private:
  T* data_ = nullptr;
  std::size_t size_ = 0;
};

/// Owns one fftw_plan. Plans are always created with FFTW_ESTIMATE so that
/// the chosen algorithm, and therefore every rounding, is reproducible.
class FftPlan {
 public:
  FftPlan() = default;
  explicit FftPlan(fftw_plan plan);
  FftPlan(FftPlan&& o) noexcept : plan_(o.plan_) { o.plan_ = nullptr; }
  FftPlan& operator=(FftPlan&& o) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan();

  void execute() const { fftw_execute(plan_); }
  fftw_plan get() const { return plan_; }

 private:
  fftw_plan plan_ = nullptr;
};

/// Real<->half-complex transforms of `lines` contiguous real lines of
/// length n, executed on caller memory one batch at a time. The spectrum
/// (lines x (n/2+1)) is owned. Inverse is unnormalized.
class RealLineBatch {
 public:
  RealLineBatch(std::size_t n, std::size_t lines);
  std::size_t length() const { return n_; }
  std::size_t lines() const { return lines_; }
  std::size_t half() const { return n_ / 2 + 1; }
  Complex* spectrum() { return reinterpret_cast<Complex*>(spec_.data()); }
  /// `real` must hold lines * n doubles with the alignment of fftw_malloc.
  void forward(double* real);
  /// Overwrites the spectrum.
  void inverse(double* real);

 private:
  void check_alignment(const double* real) const;

  std::size_t n_;
  std::size_t lines_;
  AlignedBuffer<double> plan_real_;
  AlignedBuffer<fftw_complex> spec_;
  FftPlan forward_;
  FftPlan inverse_;
};

/// In-place 1-D complex transform of length n.
class ComplexLineTransform {
 public:
  explicit ComplexLineTransform(std::size_t n);

  Complex* data() { return reinterpret_cast<Complex*>(buf_.data()); }
  std::size_t size() const { return buf_.size(); }
  void forward() { forward_.execute(); }
  void inverse() { inverse_.execute(); }  // unnormalized

 private:
  AlignedBuffer<fftw_complex> buf_;
  FftPlan forward_;
  FftPlan inverse_;
};

}  // namespace qcc
