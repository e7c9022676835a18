#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace wibp {

enum class Method {
  monte_carlo,
  gauss_hermite,   // tensor Gauss-Hermite over a full coordinate space
  polar_gauss,     // deterministic polar Gauss-Legendre rule over a bounded section
  closed_form,
};

std::string_view method_name(Method m);

/// A numerical estimate with its standard error and the data needed to
/// reproduce it. Deterministic quadratures report std_error == 0.
struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  Method method = Method::closed_form;

  static EstimateWithError exact(double v, Method m = Method::closed_form,
                                 std::uint64_t nodes = 0) {
    return {v, 0.0, nodes, 0, m};
  }
};

inline bool is_deterministic(Method m) { return m != Method::monte_carlo; }

/// Sum/sum-of-squares accumulator for sample means. Chunks are merged in
/// index order so the result does not depend on scheduling.
struct SampleStats {
  std::uint64_t n = 0;
  double sum = 0.0;
  double sumsq = 0.0;

  void add(double v) {
    ++n;
    sum += v;
    sumsq += v * v;
  }
  void merge(const SampleStats& o) {
    n += o.n;
    sum += o.sum;
    sumsq += o.sumsq;
  }
  double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
  double variance() const {
    if (n < 2) return 0.0;
    const double dn = static_cast<double>(n);
    const double v = (sumsq - sum * sum / dn) / (dn - 1.0);
    return v > 0.0 ? v : 0.0;
  }
  double std_error() const { return n ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }

  EstimateWithError estimate(std::uint64_t seed) const {
    return {mean(), std_error(), n, seed, Method::monte_carlo};
  }
};

SampleStats merge_all(const std::vector<SampleStats>& parts);

/// SE_a + SE_b: the (conservative) combined error used by every tolerance
/// of the form "k * combined SE".
inline double combined_se(const EstimateWithError& a, const EstimateWithError& b) {
  return a.std_error + b.std_error;
}

}  // namespace wibp
