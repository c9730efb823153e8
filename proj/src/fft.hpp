#pragma once

// Thin RAII layer over FFTW complex transforms. Plans are created once per
// size under a lock and executed with the new-array interface, which FFTW
// documents as safe to call concurrently.

#include <complex>
#include <span>

namespace mzi::detail {

class FftPlan {
public:
  explicit FftPlan(int n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  int size() const { return n_; }

  // Unnormalized: backward(forward(x)) == n * x.
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;
  void backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;

private:
  int n_;
  void* forward_plan_;
  void* backward_plan_;
};

const FftPlan& fft_plan(int n);

}  // namespace mzi::detail
