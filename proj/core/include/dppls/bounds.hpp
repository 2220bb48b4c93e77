#pragma once

#include <cstddef>
#include <cstdint>

#include "dppls/basis.hpp"
#include "dppls/sampler.hpp"

namespace dppls {

/// Matrix Chernoff exponents for deviation delta in (0, 1):
///   c_delta = delta + (1 - delta) ln(1 - delta)   (lower tail)
///   d_delta = -delta + (1 + delta) ln(1 + delta)  (upper tail)
struct ChernoffConstants {
  double delta = 0.0;
  double c_delta = 0.0;
  double d_delta = 0.0;
};

ChernoffConstants chernoff_constants(double delta);

/// ceil(c_delta^-1 alpha^-1 m ln(m / eta)); natural logarithm throughout.
std::uint64_t iid_sample_size(std::size_t m, double delta, double eta, double alpha = 1.0);

/// m + iid_sample_size(m, delta, eta, alpha).
std::uint64_t volume_sample_size(std::size_t m, double delta, double eta, double alpha = 1.0);

/// Grid estimate (a lower bound) of K_{w,m} = sup_x w(x)^-1 |phi(x)|^2 over
/// the effective support, using `grid` equispaced points including both ends.
double k_constant(const FeatureBasis& basis, const WeightFunction& w, std::size_t grid = 100000);

/// m exp(-c_delta n / m). Valid only under the DPP tail-dominance conjecture.
double dpp_chernoff_failure(std::size_t m, std::size_t n, double delta);

enum class BoundScheme { IidOptimal, VolumeSampling, RepeatedDpp };

const char* to_string(BoundScheme scheme) noexcept;

/// Raw failure-probability bound for a scheme; may exceed 1.
struct TheoryBound {
  BoundScheme scheme = BoundScheme::IidOptimal;
  std::size_t m = 0;
  std::size_t n = 0;
  double alpha = 1.0;
  double eta = 0.0;
  /// 1 + (alpha^-1 - 1) m / n
  double beta = 1.0;
  double predicted_failure_prob = 0.0;
  /// Set for RepeatedDpp, whose bound rests on the tail-dominance conjecture.
  bool conjecture_dependent = false;
};

/// IidOptimal:      P(lambda_min < 1 - delta) <= m exp(-c n alpha / m)
/// VolumeSampling:  P(lambda_min^-1 > (1-delta)^-1 n/(n-m)) <= m exp(-c (n-m) alpha / m)
/// RepeatedDpp:     P(lambda_min < 1 - delta) <= m exp(-c n / m)  (conjectural)
TheoryBound theory_bound(BoundScheme scheme, std::size_t m, std::size_t n, double delta,
                         double eta, double alpha = 1.0);

}  // namespace dppls
