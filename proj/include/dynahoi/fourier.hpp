#pragma once

// Truncated trigonometric series: least-squares projection of uniformly sampled
// periodic signals onto {1, cos k w t, sin k w t}, k <= K.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "dynahoi/core.hpp"

namespace dynahoi {

struct FourierSpec {
  double omega = 1.0;  // fundamental, rad/s
  double a0 = 0.0;
  std::vector<double> a;  // a[k-1] multiplies cos(k w t)
  std::vector<double> b;  // b[k-1] multiplies sin(k w t)

  int order() const { return static_cast<int>(a.size()); }

  void validate() const {
    if (!std::isfinite(omega) || !std::isfinite(a0) || a.size() != b.size()) {
      throw Error("invalid_fourier", "malformed Fourier specification");
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (!std::isfinite(a[k]) || !std::isfinite(b[k])) {
        throw Error("invalid_fourier", "non-finite Fourier coefficient");
      }
    }
  }

  double eval(double t) const {
    double v = a0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double arg = static_cast<double>(k + 1) * omega * t;
      v += a[k] * std::cos(arg) + b[k] * std::sin(arg);
    }
    return v;
  }

  double derivative(double t) const {
    double v = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double kw = static_cast<double>(k + 1) * omega;
      v += kw * (b[k] * std::cos(kw * t) - a[k] * std::sin(kw * t));
    }
    return v;
  }

  friend bool operator==(const FourierSpec&, const FourierSpec&) = default;
};

/// `samples` holds N values at t_n = n * period / N, n = 0..N-1.
inline FourierSpec fourier_fit(std::span<const double> samples, int order, double period) {
  const auto n = static_cast<int>(samples.size());
  if (order < 0) throw std::invalid_argument("Fourier order must be non-negative");
  if (n < 2 * order + 1) {
    throw std::invalid_argument("need at least 2K+1 samples for a K-term Fourier fit");
  }
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");

  FourierSpec spec;
  spec.omega = 2.0 * kPi / period;
  double sum = 0.0;
  for (double s : samples) sum += s;
  spec.a0 = sum / n;
  spec.a.assign(order, 0.0);
  spec.b.assign(order, 0.0);
  for (int k = 1; k <= order; ++k) {
    double ck = 0.0;
    double sk = 0.0;
    for (int i = 0; i < n; ++i) {
      const double arg = 2.0 * kPi * static_cast<double>(k) * i / n;
      ck += samples[i] * std::cos(arg);
      sk += samples[i] * std::sin(arg);
    }
    // The Nyquist cosine has norm N rather than N/2.
    const double scale = (2 * k == n) ? 1.0 / n : 2.0 / n;
    spec.a[k - 1] = ck * scale;
    spec.b[k - 1] = sk * scale;
  }
  return spec;
}

/// Root-mean-square residual of the truncated series over the sample grid.
inline double fourier_residual(const FourierSpec& spec, std::span<const double> samples, double period) {
  const auto n = samples.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = period * static_cast<double>(i) / static_cast<double>(n);
    const double e = samples[i] - spec.eval(t);
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace dynahoi
