// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef IAEC_SRC_DSP_FFT_H_
#define IAEC_SRC_DSP_FFT_H_

#include <complex>
#include <span>

namespace iaec::internal {

// Thin wrapper over cached FFTW plans. Plans are created once per size under
// a lock; execution uses the new-array interface and is thread-safe.
class RealFft {
 public:
  explicit RealFft(int n);

  int size() const { return n_; }
  // in: n reals, out: n/2+1 bins. Unnormalized.
  void Forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;
  // in: n/2+1 bins, out: n reals. Unnormalized (scaled by n).
  void Inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  int n_;
  void* forward_;
  void* inverse_;
};

// Smallest 2^a 3^b 5^c >= n.
int GoodFftSize(int n);

}  // namespace iaec::internal

#endif  // IAEC_SRC_DSP_FFT_H_
