// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>

#include "dsp/fft.h"
#include "iaec/dsp.h"
#include "iaec/errors.h"

namespace iaec {
namespace {

constexpr size_t kDirectLimit = size_t{1} << 18;

std::vector<double> ConvolveDirect(std::span<const double> x,
                                   std::span<const double> h) {
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (size_t j = 0; j < h.size(); ++j) {
    const double hj = h[j];
    if (hj == 0.0) continue;
    double* dst = y.data() + j;
    for (size_t i = 0; i < x.size(); ++i) dst[i] += hj * x[i];
  }
  return y;
}

std::vector<double> ConvolveFft(std::span<const double> x,
                                std::span<const double> h) {
  const size_t out_len = x.size() + h.size() - 1;
  const int n = internal::GoodFftSize(static_cast<int>(out_len));
  internal::RealFft fft(n);
  std::vector<double> a(n, 0.0), b(n, 0.0);
  std::copy(x.begin(), x.end(), a.begin());
  std::copy(h.begin(), h.end(), b.begin());
  std::vector<Complex> fa(n / 2 + 1), fb(n / 2 + 1);
  fft.Forward(a, fa);
  fft.Forward(b, fb);
  for (size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k] / static_cast<double>(n);
  fft.Inverse(fa, a);
  a.resize(out_len);
  return a;
}

}  // namespace

std::vector<double> Convolve(std::span<const double> signal,
                             std::span<const double> kernel) {
  if (kernel.empty()) throw ConfigError("convolution kernel is empty");
  if (signal.empty()) return {};
  if (signal.size() * kernel.size() <= kDirectLimit) {
    return ConvolveDirect(signal, kernel);
  }
  return ConvolveFft(signal, kernel);
}

AudioBuffer FirConvolve(const AudioBuffer& signal,
                        std::span<const double> kernel) {
  return AudioBuffer(Convolve(signal.samples, kernel), signal.sample_rate);
}

}  // namespace iaec
