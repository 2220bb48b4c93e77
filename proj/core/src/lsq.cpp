#include "dppls/lsq.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "dppls/error.hpp"

namespace dppls {

EmpiricalGram empirical_gram(const DesignSample& design, const FeatureBasis& basis) {
  const std::size_t n = design.size();
  if (n == 0) fail(ErrorKind::EmptyDesign, "Gram matrix of an empty design");
  if (design.weights.size() != n)
    fail(ErrorKind::Validation, "design has " + std::to_string(n) + " points but " +
                                    std::to_string(design.weights.size()) + " weights");
  const auto m = static_cast<Eigen::Index>(basis.dimension());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd phi(m);
  for (std::size_t i = 0; i < n; ++i) {
    basis.eval(design.points[i], std::span<double>(phi.data(), static_cast<std::size_t>(m)));
    const double inv_w = 1.0 / design.weights[i];
    if (!phi.allFinite() || !std::isfinite(inv_w))
      fail(ErrorKind::Numeric, "non-finite feature or weight at x=" +
                                   std::to_string(design.points[i]));
    g.selfadjointView<Eigen::Lower>().rankUpdate(phi, inv_w);
  }
  g = g.selfadjointView<Eigen::Lower>();
  g /= static_cast<double>(n);

  EmpiricalGram out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorKind::Numeric, "symmetric eigensolver failed");
  out.lambda_min = solver.eigenvalues()[0];
  out.lambda_max = solver.eigenvalues()[m - 1];
  out.matrix = std::move(g);
  return out;
}

LsqFit weighted_lsq_fit(std::span<const double> f_values, const DesignSample& design,
                        const FeatureBasis& basis) {
  return weighted_lsq_fit(f_values, design, basis, empirical_gram(design, basis));
}

LsqFit weighted_lsq_fit(std::span<const double> f_values, const DesignSample& design,
                        const FeatureBasis& basis, const EmpiricalGram& gram) {
  const std::size_t n = design.size();
  const std::size_t m = basis.dimension();
  if (f_values.size() != n)
    fail(ErrorKind::Validation, "f_values has " + std::to_string(f_values.size()) +
                                    " entries for a design of " + std::to_string(n));
  if (!(gram.lambda_min > kSingularThreshold))
    fail(ErrorKind::SingularDesign,
         "lambda_min(G^w) = " + std::to_string(gram.lambda_min) + " <= 1e-12");

  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd y(rows);
  Eigen::VectorXd phi(cols);
  for (std::size_t i = 0; i < n; ++i) {
    basis.eval(design.points[i], std::span<double>(phi.data(), m));
    const double s = 1.0 / std::sqrt(design.weights[i]);
    a.row(static_cast<Eigen::Index>(i)) = s * phi.transpose();
    y[static_cast<Eigen::Index>(i)] = s * f_values[i];
  }

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::VectorXd c = qr.solve(y);

  const Eigen::VectorXd b = a.transpose() * y / static_cast<double>(n);
  Eigen::VectorXd r = gram.matrix * c - b;
  const double bnorm = b.norm();
  if (bnorm > 0.0 && r.norm() > 1e-10 * bnorm) {
    // One step of refinement on the least-squares residual.
    c += qr.solve(y - a * c);
    r = gram.matrix * c - b;
  }
  if (!c.allFinite()) fail(ErrorKind::Numeric, "non-finite least-squares coefficients");

  LsqFit fit;
  fit.coefficients = std::move(c);
  fit.lambda_min = gram.lambda_min;
  fit.n = n;
  fit.m = m;
  fit.sampler_id = design.sampler_id;
  fit.attempts = design.attempts;
  fit.normal_residual = bnorm > 0.0 ? r.norm() / bnorm : r.norm();
  return fit;
}

namespace {

// Gauss rule of order q for the basis: plain Gauss for polynomial families,
// composite Gauss-Legendre with q nodes per cell for piecewise constants.
QuadratureRule basis_rule(const FeatureBasis& basis, std::size_t q, std::size_t max_order) {
  if (basis.family() != BasisFamily::PiecewiseConstant)
    return gauss_quadrature(basis.measure(), q, max_order);
  if (q > max_order) fail(ErrorKind::UnsupportedOrder, "order exceeds cap");
  const QuadratureRule ref = gauss_legendre_reference(q);
  const Interval s = basis.measure().support();
  const std::size_t m = basis.dimension();
  QuadratureRule rule;
  rule.order = q;
  const double h = s.width() / static_cast<double>(m);
  for (std::size_t c = 0; c < m; ++c) {
    const double mid = s.lo + (static_cast<double>(c) + 0.5) * h;
    for (std::size_t j = 0; j < q; ++j) {
      rule.nodes.push_back(mid + 0.5 * h * ref.nodes[j]);
      rule.weights.push_back(0.5 * ref.weights[j] * h / s.width());
    }
  }
  return rule;
}

std::size_t resolve_cap(const AdaptiveQuadrature& s) {
  return s.max_order == 0 ? default_max_quadrature_order() : s.max_order;
}

}  // namespace

Eigen::VectorXd best_approximation(const TargetFn& f, const FeatureBasis& basis,
                                   const QuadratureRule& quad) {
  const auto m = static_cast<Eigen::Index>(basis.dimension());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd phi(m);
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const double x = quad.nodes[i];
    basis.eval(x, std::span<double>(phi.data(), basis.dimension()));
    a += (quad.weights[i] * f(x)) * phi;
  }
  return a;
}

Eigen::VectorXd best_approximation(const TargetFn& f, const FeatureBasis& basis,
                                   const AdaptiveQuadrature& settings) {
  const std::size_t cap = resolve_cap(settings);
  std::size_t q = std::max(settings.start_order, 2 * basis.dimension());
  if (q > cap) q = cap;
  Eigen::VectorXd prev = best_approximation(f, basis, basis_rule(basis, q, cap));
  while (q < cap) {
    q = std::min(2 * q, cap);
    Eigen::VectorXd next = best_approximation(f, basis, basis_rule(basis, q, cap));
    const double scale = std::max(next.norm(), 1e-300);
    if ((next - prev).norm() <= settings.rel_tol * scale) return next;
    prev = std::move(next);
  }
  fail(ErrorKind::Accuracy, "best approximation not converged at quadrature order " +
                                std::to_string(cap));
}

double l2_error(const TargetFn& f, const Eigen::VectorXd& coefficients, const FeatureBasis& basis,
                const QuadratureRule& quad) {
  const auto m = static_cast<Eigen::Index>(basis.dimension());
  Eigen::VectorXd phi(m);
  double s = 0.0;
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const double x = quad.nodes[i];
    basis.eval(x, std::span<double>(phi.data(), basis.dimension()));
    const double r = f(x) - phi.dot(coefficients);
    s += quad.weights[i] * r * r;
  }
  return std::sqrt(s);
}

double l2_error(const TargetFn& f, const Eigen::VectorXd& coefficients, const FeatureBasis& basis,
                const AdaptiveQuadrature& settings) {
  const std::size_t cap = resolve_cap(settings);
  std::size_t q = std::max(settings.start_order, 2 * basis.dimension());
  if (q > cap) q = cap;
  double prev = l2_error(f, coefficients, basis, basis_rule(basis, q, cap));
  // Convergence is judged against |f| + |c| so that near-zero errors do not
  // demand relative accuracy below roundoff.
  const double f_norm = l2_error(f, Eigen::VectorXd::Zero(coefficients.size()), basis,
                                 basis_rule(basis, q, cap));
  const double scale = std::max(f_norm + coefficients.norm(), 1e-300);
  while (q < cap) {
    q = std::min(2 * q, cap);
    const double next = l2_error(f, coefficients, basis, basis_rule(basis, q, cap));
    if (std::abs(next - prev) <= settings.rel_tol * std::max(next, scale * 1e-6)) return next;
    prev = next;
  }
  fail(ErrorKind::Accuracy, "L2 error not converged at quadrature order " + std::to_string(cap));
}

double empirical_seminorm_sq(std::span<const double> f_values, const DesignSample& design) {
  if (f_values.size() != design.size())
    fail(ErrorKind::Validation, "f_values length does not match the design");
  if (design.size() == 0) fail(ErrorKind::EmptyDesign, "semi-norm of an empty design");
  double s = 0.0;
  for (std::size_t i = 0; i < f_values.size(); ++i)
    s += f_values[i] * f_values[i] / design.weights[i];
  return s / static_cast<double>(design.size());
}

double empirical_seminorm(std::span<const double> f_values, const DesignSample& design) {
  return std::sqrt(empirical_seminorm_sq(f_values, design));
}

Eigen::VectorXd averaged_estimator(std::span<const LsqFit> fits) {
  if (fits.empty()) fail(ErrorKind::EmptyAggregate, "no fits to average");
  const std::size_t m = fits.front().m;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  for (const auto& fit : fits) {
    if (fit.m != m || static_cast<std::size_t>(fit.coefficients.size()) != m)
      fail(ErrorKind::Validation, "fits do not share the same dimension");
    sum += fit.coefficients;
  }
  return sum / static_cast<double>(fits.size());
}

std::vector<double> evaluate(const TargetFn& f, const DesignSample& design) {
  std::vector<double> out(design.size());
  for (std::size_t i = 0; i < design.size(); ++i) out[i] = f(design.points[i]);
  return out;
}

}  // namespace dppls
