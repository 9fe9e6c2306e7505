// Copyright 2026 The iaec-kws Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <Eigen/Cholesky>

#include "iaec/aec.h"
#include "iaec/errors.h"

namespace iaec {

void WienerConfig::Validate() const {
  if (max_lag < min_lag) throw ConfigError("wiener lag range is empty");
  if (!(regularizer > 0.0)) throw ConfigError("wiener regularizer must be > 0");
}

std::vector<double> ApplyLagFilter(std::span<const double> reference,
                                   std::span<const double> filter,
                                   int min_lag) {
  const long n = static_cast<long>(reference.size());
  std::vector<double> out(reference.size(), 0.0);
  for (size_t i = 0; i < filter.size(); ++i) {
    const double w = filter[i];
    if (w == 0.0) continue;
    const long lag = min_lag + static_cast<long>(i);
    const long lo = std::max(0L, lag), hi = std::min(n, n + lag);
    for (long m = lo; m < hi; ++m) out[m] += w * reference[m - lag];
  }
  return out;
}

WienerResult WienerOracleCancel(const AudioBuffer& mixture,
                                const AudioBuffer& reference,
                                const AudioBuffer& target,
                                const WienerConfig& cfg) {
  cfg.Validate();
  const size_t len = mixture.size();
  if (reference.size() > len || target.size() != len) {
    throw DataError("wiener inputs must share the mixture length");
  }
  std::vector<double> r(len, 0.0);
  std::copy(reference.samples.begin(), reference.samples.end(), r.begin());
  std::vector<double> nhat(len);
  for (size_t i = 0; i < len; ++i) {
    nhat[i] = mixture.samples[i] - target.samples[i];
  }
  const long n = static_cast<long>(len);
  auto at = [&](long i) { return i >= 0 && i < n ? r[i] : 0.0; };
  const int dim = cfg.taps();
  auto lag = [&](int a) { return static_cast<long>(cfg.min_lag + a); };

  // G(a, b) = sum_{m in [0, n)} r[m - l_a] r[m - l_b]. The first row is
  // direct; the rest follows from sliding both lags by one.
  Eigen::MatrixXd gram(dim, dim);
  for (int b = 0; b < dim; ++b) {
    double acc = 0.0;
    for (long m = 0; m < n; ++m) acc += at(m - lag(0)) * at(m - lag(b));
    gram(0, b) = acc;
    gram(b, 0) = acc;
  }
  for (int a = 0; a + 1 < dim; ++a) {
    for (int b = a; b + 1 < dim; ++b) {
      const double v = gram(a, b) + at(-1 - lag(a)) * at(-1 - lag(b)) -
                       at(n - 1 - lag(a)) * at(n - 1 - lag(b));
      gram(a + 1, b + 1) = v;
      gram(b + 1, a + 1) = v;
    }
  }
  Eigen::VectorXd rhs(dim);
  for (int a = 0; a < dim; ++a) {
    const long l = lag(a);
    double acc = 0.0;
    for (long m = std::max(0L, l); m < std::min(n, n + l); ++m) {
      acc += nhat[m] * r[m - l];
    }
    rhs(a) = acc;
  }
  const double trace = gram.trace();
  const double lambda =
      trace > 0.0 ? cfg.regularizer * trace / dim : cfg.regularizer;
  gram.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("wiener normal equations are not positive definite");
  }
  const Eigen::VectorXd w = llt.solve(rhs);

  WienerResult result;
  result.filter.assign(w.data(), w.data() + dim);
  const std::vector<double> est = ApplyLagFilter(r, result.filter, cfg.min_lag);
  result.output = AudioBuffer::Zeros(len);
  for (size_t i = 0; i < len; ++i) {
    result.output.samples[i] = mixture.samples[i] - est[i];
  }
  return result;
}

}  // namespace iaec
