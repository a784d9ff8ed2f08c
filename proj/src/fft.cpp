#include "qcc/fft.hpp"

#include <mutex>
#include <stdexcept>

namespace qcc {

namespace {

// The FFTW planner is not thread-safe; plan creation and destruction are
// serialized here. Executing plans is safe from any thread.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FftPlan::FftPlan(fftw_plan plan) : plan_(plan) {
  if (plan_ == nullptr) throw std::runtime_error("fftw plan creation failed");
}

FftPlan& FftPlan::operator=(FftPlan&& o) noexcept {
  if (this != &o) {
    if (plan_) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(plan_);
    }
    plan_ = o.plan_;
    o.plan_ = nullptr;
  }
  return *this;
}

FftPlan::~FftPlan() {
  if (plan_) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
}

RealLineBatch::RealLineBatch(std::size_t n, std::size_t lines)
    : n_(n), lines_(lines), plan_real_(n * lines), spec_((n / 2 + 1) * lines) {
  int len[] = {static_cast<int>(n)};
  const int count = static_cast<int>(lines);
  const int h = static_cast<int>(n / 2 + 1);
  std::lock_guard lock(planner_mutex());
  forward_ = FftPlan(fftw_plan_many_dft_r2c(1, len, count, plan_real_.data(), nullptr, 1, len[0],
                                            spec_.data(), nullptr, 1, h, FFTW_ESTIMATE));
  inverse_ = FftPlan(fftw_plan_many_dft_c2r(1, len, count, spec_.data(), nullptr, 1, h,
                                            plan_real_.data(), nullptr, 1, len[0], FFTW_ESTIMATE));
}

void RealLineBatch::check_alignment(const double* real) const {
  if (fftw_alignment_of(const_cast<double*>(real)) != fftw_alignment_of(const_cast<double*>(plan_real_.data()))) {
    throw std::logic_error("RealLineBatch: misaligned line buffer");
  }
}

void RealLineBatch::forward(double* real) {
  check_alignment(real);
  fftw_execute_dft_r2c(forward_.get(), real, spec_.data());
}

void RealLineBatch::inverse(double* real) {
  check_alignment(real);
  fftw_execute_dft_c2r(inverse_.get(), spec_.data(), real);
}

ComplexLineTransform::ComplexLineTransform(std::size_t n) : buf_(n) {
  const int len = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  forward_ = FftPlan(fftw_plan_dft_1d(len, buf_.data(), buf_.data(), FFTW_FORWARD, FFTW_ESTIMATE));
  inverse_ = FftPlan(fftw_plan_dft_1d(len, buf_.data(), buf_.data(), FFTW_BACKWARD, FFTW_ESTIMATE));
}

}  // namespace qcc
