#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dppls/measure.hpp"

namespace dppls {

enum class BasisFamily { Legendre, Hermite, PiecewiseConstant };

const char* to_string(BasisFamily family) noexcept;
BasisFamily parse_basis_family(const std::string& name);

/// L2(mu)-orthonormal feature map phi: R -> R^m.
///
///  - Legendre:          phi_k = sqrt(2k+1) P_k(t), t the affine image of x in [-1, 1]
///  - Hermite:           phi_k = He_k(x) / sqrt(k!)  (probabilists')
///  - PiecewiseConstant: phi_j = sqrt(m) on the j-th of m equal half-open cells
///
/// Indices above are zero-based; the constant function is always phi_0.
class FeatureBasis {
 public:
  FeatureBasis(BasisFamily family, std::size_t m, ReferenceMeasure measure);

  static FeatureBasis legendre(std::size_t m);
  /// Gaussian measure truncated at the radius appropriate for m.
  static FeatureBasis hermite(std::size_t m);
  /// Cells on [0, 1].
  static FeatureBasis piecewise_constant(std::size_t m);
  /// Family with its canonical measure.
  static FeatureBasis make(BasisFamily family, std::size_t m);

  BasisFamily family() const noexcept { return family_; }
  std::size_t dimension() const noexcept { return m_; }
  const ReferenceMeasure& measure() const noexcept { return measure_; }

  void eval(double x, std::span<double> out) const;
  std::vector<double> features(double x) const;

  /// w_m(x) = |phi(x)|^2 / m.
  double christoffel_density(double x) const;

  /// Points where features jump (cell boundaries for piecewise constants).
  std::vector<double> breakpoints() const;

  /// Index of the owning cell; PiecewiseConstant only, -1 outside the support.
  long cell_index(double x) const;

 private:
  BasisFamily family_;
  std::size_t m_;
  ReferenceMeasure measure_;
};

std::vector<double> eval_features(const FeatureBasis& basis, double x);
double christoffel_density(const FeatureBasis& basis, double x);

/// Orthonormal frame v_1..v_k of W_k = span{phi(x_1), ..., phi(x_k)}.
class RotatedBasisState {
 public:
  explicit RotatedBasisState(std::size_t dimension) : dim_(dimension) {}

  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return k_; }
  std::span<const double> vector(std::size_t i) const {
    return {frame_.data() + i * dim_, dim_};
  }

  /// |phi - P_W phi|^2 = |phi|^2 - sum_i (v_i . phi)^2, clamped at 0.
  double residual_norm_sq(std::span<const double> phi) const;

  /// Appends the normalized residual of phi (Gram-Schmidt applied twice).
  /// Throws DegeneratePoint when the residual norm^2 is below
  /// degeneracy_threshold() or the frame is already full.
  void extend(std::span<const double> phi);

  double degeneracy_threshold() const noexcept { return 1e-12 * static_cast<double>(dim_); }

 private:
  std::size_t dim_;
  std::size_t k_ = 0;
  std::vector<double> frame_;
};

double residual_feature_norm(const FeatureBasis& basis, const RotatedBasisState& state, double x);

/// Value-returning extension of the frame by phi(x_new).
RotatedBasisState extend_rotation(const RotatedBasisState& state, const FeatureBasis& basis,
                                  double x_new);

}  // namespace dppls
