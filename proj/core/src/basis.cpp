#include "dppls/basis.hpp"

#include <cmath>

#include "dppls/error.hpp"

namespace dppls {

const char* to_string(BasisFamily family) noexcept {
  switch (family) {
    case BasisFamily::Legendre: return "legendre";
    case BasisFamily::Hermite: return "hermite";
    case BasisFamily::PiecewiseConstant: return "pwc";
  }
  return "unknown";
}

BasisFamily parse_basis_family(const std::string& name) {
  if (name == "legendre") return BasisFamily::Legendre;
  if (name == "hermite") return BasisFamily::Hermite;
  if (name == "pwc" || name == "piecewise-constant") return BasisFamily::PiecewiseConstant;
  fail(ErrorKind::Validation, "unknown basis family '" + name + "'");
}

FeatureBasis::FeatureBasis(BasisFamily family, std::size_t m, ReferenceMeasure measure)
    : family_(family), m_(m), measure_(measure) {
  if (m == 0) fail(ErrorKind::Validation, "basis dimension must be >= 1");
  const bool gaussian = measure.kind() == MeasureKind::StandardGaussian;
  if ((family == BasisFamily::Hermite) != gaussian)
    fail(ErrorKind::Validation, std::string(to_string(family)) +
                                    " basis is not orthonormal for the given measure");
}

FeatureBasis FeatureBasis::legendre(std::size_t m) {
  return FeatureBasis(BasisFamily::Legendre, m, ReferenceMeasure::uniform(-1.0, 1.0));
}

FeatureBasis FeatureBasis::hermite(std::size_t m) {
  return FeatureBasis(
      BasisFamily::Hermite, m,
      ReferenceMeasure::standard_gaussian(ReferenceMeasure::gaussian_radius_for_dimension(m)));
}

FeatureBasis FeatureBasis::piecewise_constant(std::size_t m) {
  return FeatureBasis(BasisFamily::PiecewiseConstant, m, ReferenceMeasure::uniform(0.0, 1.0));
}

FeatureBasis FeatureBasis::make(BasisFamily family, std::size_t m) {
  switch (family) {
    case BasisFamily::Legendre: return legendre(m);
    case BasisFamily::Hermite: return hermite(m);
    case BasisFamily::PiecewiseConstant: return piecewise_constant(m);
  }
  fail(ErrorKind::Validation, "unknown basis family");
}

long FeatureBasis::cell_index(double x) const {
  const Interval s = measure_.support();
  if (!(x >= s.lo && x <= s.hi)) return -1;
  const auto m = static_cast<long>(m_);
  long j = static_cast<long>(std::floor((x - s.lo) / s.width() * static_cast<double>(m_)));
  if (j >= m) j = m - 1;  // last cell is closed at the right end
  if (j < 0) j = 0;
  return j;
}

void FeatureBasis::eval(double x, std::span<double> out) const {
  const std::size_t m = m_;
  switch (family_) {
    case BasisFamily::Legendre: {
      const Interval s = measure_.support();
      const double t = (2.0 * x - s.lo - s.hi) / s.width();
      double p_prev = 1.0, p = t;
      out[0] = 1.0;
      if (m > 1) out[1] = std::sqrt(3.0) * t;
      for (std::size_t k = 1; k + 1 < m; ++k) {
        const double kk = static_cast<double>(k);
        const double p_next = ((2.0 * kk + 1.0) * t * p - kk * p_prev) / (kk + 1.0);
        p_prev = p;
        p = p_next;
        out[k + 1] = std::sqrt(2.0 * kk + 3.0) * p;
      }
      break;
    }
    case BasisFamily::Hermite: {
      // Orthonormal form of He_{k+1} = x He_k - k He_{k-1}; no factorials.
      out[0] = 1.0;
      if (m > 1) out[1] = x;
      for (std::size_t k = 1; k + 1 < m; ++k) {
        const double kk = static_cast<double>(k);
        out[k + 1] = (x * out[k] - std::sqrt(kk) * out[k - 1]) / std::sqrt(kk + 1.0);
      }
      break;
    }
    case BasisFamily::PiecewiseConstant: {
      for (std::size_t k = 0; k < m; ++k) out[k] = 0.0;
      const long j = cell_index(x);
      if (j >= 0) out[static_cast<std::size_t>(j)] = std::sqrt(static_cast<double>(m));
      break;
    }
  }
}

std::vector<double> FeatureBasis::features(double x) const {
  std::vector<double> out(m_);
  eval(x, out);
  return out;
}

double FeatureBasis::christoffel_density(double x) const {
  if (family_ == BasisFamily::PiecewiseConstant) return cell_index(x) >= 0 ? 1.0 : 0.0;
  std::vector<double> phi(m_);
  eval(x, phi);
  double s = 0.0;
  for (double v : phi) s += v * v;
  return s / static_cast<double>(m_);
}

std::vector<double> FeatureBasis::breakpoints() const {
  std::vector<double> out;
  if (family_ != BasisFamily::PiecewiseConstant) return out;
  const Interval s = measure_.support();
  for (std::size_t j = 1; j < m_; ++j)
    out.push_back(s.lo + s.width() * static_cast<double>(j) / static_cast<double>(m_));
  return out;
}

std::vector<double> eval_features(const FeatureBasis& basis, double x) {
  return basis.features(x);
}

double christoffel_density(const FeatureBasis& basis, double x) {
  return basis.christoffel_density(x);
}

// ---------------------------------------------------------------------------

double RotatedBasisState::residual_norm_sq(std::span<const double> phi) const {
  double norm = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) norm += phi[j] * phi[j];
  for (std::size_t i = 0; i < k_; ++i) {
    const double* v = frame_.data() + i * dim_;
    double dot = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) dot += v[j] * phi[j];
    norm -= dot * dot;
  }
  return norm > 0.0 ? norm : 0.0;
}

void RotatedBasisState::extend(std::span<const double> phi) {
  if (k_ >= dim_) fail(ErrorKind::DegeneratePoint, "frame already spans R^m");
  std::vector<double> r(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(dim_));
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < k_; ++i) {
      const double* v = frame_.data() + i * dim_;
      double dot = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) dot += v[j] * r[j];
      for (std::size_t j = 0; j < dim_; ++j) r[j] -= dot * v[j];
    }
  }
  double norm2 = 0.0;
  for (double v : r) norm2 += v * v;
  if (!(norm2 >= degeneracy_threshold()) || residual_norm_sq(phi) < degeneracy_threshold())
    fail(ErrorKind::DegeneratePoint, "point lies (numerically) in the span of the frame");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double v : r) frame_.push_back(v * inv);
  ++k_;
}

double residual_feature_norm(const FeatureBasis& basis, const RotatedBasisState& state, double x) {
  return state.residual_norm_sq(basis.features(x));
}

RotatedBasisState extend_rotation(const RotatedBasisState& state, const FeatureBasis& basis,
                                  double x_new) {
  RotatedBasisState next = state;
  next.extend(basis.features(x_new));
  return next;
}

}  // namespace dppls
