#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dppls/basis.hpp"
#include "dppls/measure.hpp"
#include "dppls/sampler.hpp"

namespace dppls {

/// G^w = (1/n) sum_i w(x_i)^-1 phi(x_i) phi(x_i)^T with its extreme eigenvalues.
struct EmpiricalGram {
  Eigen::MatrixXd matrix;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

EmpiricalGram empirical_gram(const DesignSample& design, const FeatureBasis& basis);

/// Below this lambda_min a design is declared singular.
inline constexpr double kSingularThreshold = 1e-12;

struct LsqFit {
  Eigen::VectorXd coefficients;
  double lambda_min = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;
  std::string sampler_id;
  std::size_t attempts = 1;
  /// |G c - b| / |b| for the normal equations G c = b.
  double normal_residual = 0.0;
};

/// Weighted least squares by Householder QR of the rows
/// w(x_i)^-1/2 phi(x_i)^T. Throws SingularDesign when lambda_min(G^w) <= 1e-12.
LsqFit weighted_lsq_fit(std::span<const double> f_values, const DesignSample& design,
                        const FeatureBasis& basis);

/// Same, reusing an already computed Gram matrix.
LsqFit weighted_lsq_fit(std::span<const double> f_values, const DesignSample& design,
                        const FeatureBasis& basis, const EmpiricalGram& gram);

using TargetFn = std::function<double(double)>;

/// Settings of the order-doubling quadrature used for exact L2(mu) norms.
struct AdaptiveQuadrature {
  std::size_t start_order = 64;
  double rel_tol = 1e-10;
  /// 0 means default_max_quadrature_order().
  std::size_t max_order = 0;
};

/// a_i = int f phi_i dmu with one fixed rule.
Eigen::VectorXd best_approximation(const TargetFn& f, const FeatureBasis& basis,
                                   const QuadratureRule& quad);

/// Doubles the Gauss order from max(start, 2m) until the coefficients change
/// by less than rel_tol (relative); throws Accuracy at the cap.
Eigen::VectorXd best_approximation(const TargetFn& f, const FeatureBasis& basis,
                                   const AdaptiveQuadrature& settings = {});

/// |f - sum_i a_i phi_i| in L2(mu) with one fixed rule.
double l2_error(const TargetFn& f, const Eigen::VectorXd& coefficients, const FeatureBasis& basis,
                const QuadratureRule& quad);

/// Same, with the order-doubling check.
double l2_error(const TargetFn& f, const Eigen::VectorXd& coefficients, const FeatureBasis& basis,
                const AdaptiveQuadrature& settings = {});

/// |f|_n^2 = (1/n) sum_i w(x_i)^-1 f(x_i)^2.
double empirical_seminorm_sq(std::span<const double> f_values, const DesignSample& design);
double empirical_seminorm(std::span<const double> f_values, const DesignSample& design);

/// Coefficient-wise mean of independent fits sharing the same basis.
Eigen::VectorXd averaged_estimator(std::span<const LsqFit> fits);

/// Values of f at the design points.
std::vector<double> evaluate(const TargetFn& f, const DesignSample& design);

}  // namespace dppls
