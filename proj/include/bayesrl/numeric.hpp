#ifndef BAYESRL_NUMERIC_HPP_
#define BAYESRL_NUMERIC_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>

namespace bayesrl {

// log(sum_i exp(x[i])), stable under large magnitudes.
inline double log_sum_exp(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;  // all -inf, or a +-inf dominates
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

// log((1/n) sum_i exp(x[i])).
inline double log_mean_exp(std::span<const double> x) {
  return log_sum_exp(x) - std::log(static_cast<double>(x.size()));
}

// out[i] = exp(scale * x[i]) / sum_j exp(scale * x[j]), overflow-safe.
inline void boltzmann_weights(std::span<const double> x, double scale,
                              std::span<double> out) {
  if (x.size() != out.size() || x.empty()) {
    throw std::invalid_argument("boltzmann_weights: size mismatch");
  }
  double m = scale * x[0];
  for (std::size_t i = 1; i < x.size(); ++i) m = std::max(m, scale * x[i]);
  double z = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(scale * x[i] - m);
    z += out[i];
  }
  for (auto& v : out) v /= z;
}

// Golden-section minimum of a unimodal f on [lo, hi]; stops when the bracket
// is narrower than tol. Returns the bracket midpoint.
inline double golden_section_minimize(const std::function<double(double)>& f,
                                      double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section_minimize: bad bracket");
  constexpr double kInvPhi = 0.6180339887498949;  // 1/phi
  double a = lo, b = hi;
  double c = b - (b - a) * kInvPhi;
  double d = a + (b - a) * kInvPhi;
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * kInvPhi;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * kInvPhi;
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace bayesrl

#endif  // BAYESRL_NUMERIC_HPP_
