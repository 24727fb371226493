#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace vsq {

using cplx = std::complex<double>;

/// In-place 1-D complex transform of a fixed length, backed by FFTW.
///
/// forward() is the unnormalized e^{-i 2 pi j m / n} sum, inverse() includes the 1/n
/// factor, so inverse(forward(x)) == x up to round-off. Plans are created with
/// FFTW_ESTIMATE | FFTW_UNALIGNED, which makes the numerical result independent of the
/// buffer address and of the calling thread. Executing a plan is thread safe.
class FftPlan {
 public:
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  /// Shared plan for length n; plans are cached for the lifetime of the process.
  static std::shared_ptr<const FftPlan> for_size(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

 private:
  explicit FftPlan(std::size_t n);
  std::size_t n_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace vsq
