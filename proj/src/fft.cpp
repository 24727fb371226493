#include "vsq/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace vsq {

namespace {
// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  std::vector<cplx> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, flags);
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("FFTW plan creation failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

std::shared_ptr<const FftPlan> FftPlan::for_size(std::size_t n) {
  std::lock_guard lock(planner_mutex());
  static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::shared_ptr<const FftPlan> plan(new FftPlan(n));
  cache.emplace(n, plan);
  return plan;
}

void FftPlan::forward(std::span<cplx> data) const {
  if (data.size() != n_) throw std::invalid_argument("FftPlan::forward: length mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), buf, buf);
}

void FftPlan::inverse(std::span<cplx> data) const {
  if (data.size() != n_) throw std::invalid_argument("FftPlan::inverse: length mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), buf, buf);
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

}  // namespace vsq
