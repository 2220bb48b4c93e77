#include "dppls/bounds.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dppls/error.hpp"

namespace dppls {

namespace {

void check_unit_open(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) fail(ErrorKind::Domain, std::string(name) + " must lie in (0, 1)");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::Domain, "alpha must lie in (0, 1]");
}

// sum_{k>=2} s^k delta^k / (k (k-1)), s = +1 or -1; avoids the cancellation
// of the closed forms at small delta.
double chernoff_series(double delta, double sign) {
  double term = sign * delta;
  double sum = 0.0;
  for (int k = 2; k < 200; ++k) {
    term *= sign * delta;
    const double add = term / (static_cast<double>(k) * static_cast<double>(k - 1));
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

ChernoffConstants chernoff_constants(double delta) {
  check_unit_open(delta, "delta");
  ChernoffConstants c;
  c.delta = delta;
  if (delta < 0.1) {
    c.c_delta = chernoff_series(delta, 1.0);
    c.d_delta = chernoff_series(delta, -1.0);
  } else {
    c.c_delta = delta + (1.0 - delta) * std::log1p(-delta);
    c.d_delta = -delta + (1.0 + delta) * std::log1p(delta);
  }
  return c;
}

std::uint64_t iid_sample_size(std::size_t m, double delta, double eta, double alpha) {
  if (m == 0) fail(ErrorKind::Domain, "m must be >= 1");
  check_unit_open(eta, "eta");
  check_alpha(alpha);
  const ChernoffConstants c = chernoff_constants(delta);
  const long double md = static_cast<long double>(m);
  const long double value =
      md * std::log(md / static_cast<long double>(eta)) /
      (static_cast<long double>(c.c_delta) * static_cast<long double>(alpha));
  const long double rounded = std::ceil(value);
  if (!(rounded < 1.8e19L)) fail(ErrorKind::Domain, "sample size overflows 64 bits");
  return static_cast<std::uint64_t>(rounded);
}

std::uint64_t volume_sample_size(std::size_t m, double delta, double eta, double alpha) {
  const std::uint64_t iid = iid_sample_size(m, delta, eta, alpha);
  if (iid > std::numeric_limits<std::uint64_t>::max() - m)
    fail(ErrorKind::Domain, "sample size overflows 64 bits");
  return iid + m;
}

double k_constant(const FeatureBasis& basis, const WeightFunction& w, std::size_t grid) {
  if (grid < 2) fail(ErrorKind::Domain, "k_constant needs a grid of >= 2 points");
  const Interval s = basis.measure().support();
  std::vector<double> phi(basis.dimension());
  double best = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double x =
        i + 1 == grid ? s.hi : s.lo + s.width() * static_cast<double>(i) / static_cast<double>(grid - 1);
    basis.eval(x, phi);
    double norm = 0.0;
    for (double v : phi) norm += v * v;
    const double k = norm / w(basis, x);
    if (k > best) best = k;
  }
  return best;
}

double dpp_chernoff_failure(std::size_t m, std::size_t n, double delta) {
  if (m == 0) fail(ErrorKind::Domain, "m must be >= 1");
  if (n < m) fail(ErrorKind::Domain, "dpp bound needs n >= m");
  const ChernoffConstants c = chernoff_constants(delta);
  const double md = static_cast<double>(m);
  return md * std::exp(-c.c_delta * static_cast<double>(n) / md);
}

const char* to_string(BoundScheme scheme) noexcept {
  switch (scheme) {
    case BoundScheme::IidOptimal: return "iid-optimal";
    case BoundScheme::VolumeSampling: return "volume";
    case BoundScheme::RepeatedDpp: return "repeated-dpp";
  }
  return "unknown";
}

TheoryBound theory_bound(BoundScheme scheme, std::size_t m, std::size_t n, double delta,
                         double eta, double alpha) {
  if (m == 0 || n == 0) fail(ErrorKind::Domain, "m and n must be >= 1");
  check_unit_open(eta, "eta");
  check_alpha(alpha);
  const ChernoffConstants c = chernoff_constants(delta);
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  TheoryBound b;
  b.scheme = scheme;
  b.m = m;
  b.n = n;
  b.alpha = alpha;
  b.eta = eta;
  b.beta = 1.0 + (1.0 / alpha - 1.0) * md / nd;
  switch (scheme) {
    case BoundScheme::IidOptimal:
      b.predicted_failure_prob = md * std::exp(-c.c_delta * nd * alpha / md);
      break;
    case BoundScheme::VolumeSampling:
      if (n < m) fail(ErrorKind::Domain, "volume bound needs n >= m");
      b.predicted_failure_prob = md * std::exp(-c.c_delta * (nd - md) * alpha / md);
      break;
    case BoundScheme::RepeatedDpp:
      b.predicted_failure_prob = dpp_chernoff_failure(m, n, delta);
      b.conjecture_dependent = true;
      break;
  }
  return b;
}

}  // namespace dppls
