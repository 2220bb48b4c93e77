#include "dppls/measure.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "dppls/error.hpp"

namespace dppls {

ReferenceMeasure ReferenceMeasure::uniform(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    fail(ErrorKind::Validation, "uniform measure needs finite a < b");
  return ReferenceMeasure(MeasureKind::UniformInterval, {a, b});
}

ReferenceMeasure ReferenceMeasure::standard_gaussian(double radius) {
  if (!(radius > 0.0)) fail(ErrorKind::Validation, "gaussian truncation radius must be positive");
  return ReferenceMeasure(MeasureKind::StandardGaussian, {-radius, radius});
}

double ReferenceMeasure::gaussian_radius_for_dimension(std::size_t m) {
  return std::max(12.0, std::sqrt(4.0 * static_cast<double>(m) + 2.0) + 4.0);
}

double ReferenceMeasure::density(double x) const noexcept {
  if (kind_ == MeasureKind::UniformInterval)
    return (x >= support_.lo && x <= support_.hi) ? 1.0 / support_.width() : 0.0;
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double ReferenceMeasure::cdf(double x) const noexcept {
  if (kind_ == MeasureKind::UniformInterval) {
    if (x <= support_.lo) return 0.0;
    if (x >= support_.hi) return 1.0;
    return (x - support_.lo) / support_.width();
  }
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double ReferenceMeasure::sample(RngStream& rng) const {
  if (kind_ == MeasureKind::UniformInterval)
    return support_.lo + support_.width() * rng.uniform();
  return rng.normal();
}

std::vector<double> ReferenceMeasure::sample_iid(RngStream& rng, std::size_t n) const {
  if (n == 0) fail(ErrorKind::EmptyDesign, "sample_iid needs n >= 1");
  std::vector<double> out(n);
  for (auto& x : out) x = sample(rng);
  return out;
}

std::size_t default_max_quadrature_order() {
  if (const char* env = std::getenv("DPPLS_MAX_QUAD_ORDER")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 2048;
}

namespace {

// Golub-Welsch for a symmetric Jacobi matrix with zero diagonal; returns
// nodes and probability weights, symmetrized about 0.
QuadratureRule golub_welsch_symmetric(std::size_t q, const std::vector<double>& offdiag) {
  QuadratureRule rule;
  rule.order = q;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  if (q == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 1.0;
    return rule;
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(q - 1));
  for (std::size_t i = 0; i + 1 < q; ++i) sub[static_cast<Eigen::Index>(i)] = offdiag[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorKind::Numeric, "Golub-Welsch eigensolver failed");
  // Weights are Christoffel numbers 1 / sum_k p_k(x)^2, with the orthonormal
  // recurrence rescaled on the fly so that far nodes do not overflow.
  for (std::size_t i = 0; i < q; ++i) {
    const double x = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    double prev = 0.0, cur = 1.0, sum = 1.0, log_scale = 0.0;
    for (std::size_t k = 0; k + 1 < q; ++k) {
      const double b_prev = k == 0 ? 0.0 : offdiag[k - 1];
      const double next = (x * cur - b_prev * prev) / offdiag[k];
      prev = cur;
      cur = next;
      sum += cur * cur;
      if (sum > 1e200) {
        prev *= 1e-100;
        cur *= 1e-100;
        sum *= 1e-200;
        log_scale += 200.0 * std::log(10.0);
      }
    }
    rule.nodes[i] = x;
    rule.weights[i] = std::exp(-std::log(sum) - log_scale);
  }
  // Exact symmetry of the underlying measure.
  for (std::size_t i = 0; i < q / 2; ++i) {
    const std::size_t j = q - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (double& w : rule.weights) w /= total;
  return rule;
}

std::vector<double> legendre_offdiag(std::size_t q) {
  std::vector<double> b(q > 0 ? q - 1 : 0);
  for (std::size_t k = 1; k < q; ++k) {
    const double kk = static_cast<double>(k);
    b[k - 1] = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  return b;
}

}  // namespace

QuadratureRule gauss_legendre_reference(std::size_t q) {
  if (q == 0) fail(ErrorKind::UnsupportedOrder, "quadrature order must be >= 1");
  QuadratureRule rule = golub_welsch_symmetric(q, legendre_offdiag(q));
  for (double& w : rule.weights) w *= 2.0;
  return rule;
}

QuadratureRule gauss_quadrature(const ReferenceMeasure& measure, std::size_t q) {
  return gauss_quadrature(measure, q, default_max_quadrature_order());
}

QuadratureRule gauss_quadrature(const ReferenceMeasure& measure, std::size_t q,
                                std::size_t max_order) {
  if (q == 0) fail(ErrorKind::UnsupportedOrder, "quadrature order must be >= 1");
  if (q > max_order)
    fail(ErrorKind::UnsupportedOrder,
         "order " + std::to_string(q) + " exceeds cap " + std::to_string(max_order));
  if (measure.kind() == MeasureKind::UniformInterval) {
    QuadratureRule rule = golub_welsch_symmetric(q, legendre_offdiag(q));
    const Interval s = measure.support();
    const double mid = 0.5 * (s.lo + s.hi);
    const double half = 0.5 * s.width();
    for (double& x : rule.nodes) x = mid + half * x;
    return rule;
  }
  std::vector<double> b(q - 1);
  for (std::size_t k = 1; k < q; ++k) b[k - 1] = std::sqrt(static_cast<double>(k));
  return golub_welsch_symmetric(q, b);
}

// ---------------------------------------------------------------------------
// CellGrid

namespace {

const QuadratureRule& cell_rule() {
  static const QuadratureRule rule = gauss_legendre_reference(CellGrid::kInterior);
  return rule;
}

void integrate_cell(const ReferenceMeasure& mu, const VectorIntegrand& g, std::size_t components,
                    double lo, double hi, std::vector<double>& out, std::vector<double>& scratch) {
  const auto& rule = cell_rule();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double x = mid + half * rule.nodes[j];
    g(x, std::span<double>(scratch.data(), components));
    const double w = rule.weights[j] * half * mu.density(x);
    for (std::size_t c = 0; c < components; ++c) out[c] += w * scratch[c];
  }
}

}  // namespace

void CellGrid::append_cell(double lo, double hi) {
  const auto& rule = cell_rule();
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  if (edges_.empty()) edges_.push_back(lo);
  edges_.push_back(hi);

  const double right = std::nextafter(hi, lo);
  points_.push_back(lo);
  weights_.push_back(0.0);
  mu_density_.push_back(measure_.density(lo));
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double x = mid + half * rule.nodes[j];
    const double d = measure_.density(x);
    points_.push_back(x);
    weights_.push_back(rule.weights[j] * half * d);
    mu_density_.push_back(d);
  }
  points_.push_back(right);
  weights_.push_back(0.0);
  mu_density_.push_back(measure_.density(right));
}

std::shared_ptr<const CellGrid> CellGrid::build(const ReferenceMeasure& measure,
                                                const VectorIntegrand& g, std::size_t components,
                                                const GridOptions& options) {
  if (components == 0) fail(ErrorKind::Validation, "grid integrand needs >= 1 component");
  if (options.initial_cells == 0) fail(ErrorKind::Validation, "grid needs >= 1 initial cell");
  const Interval support = measure.support();
  const double width = support.width();

  std::vector<double> seeds;
  seeds.reserve(options.initial_cells + options.breakpoints.size() + 1);
  for (std::size_t i = 0; i <= options.initial_cells; ++i)
    seeds.push_back(support.lo + width * static_cast<double>(i) /
                                     static_cast<double>(options.initial_cells));
  seeds.back() = support.hi;
  for (double b : options.breakpoints)
    if (b > support.lo && b < support.hi) seeds.push_back(b);
  std::sort(seeds.begin(), seeds.end());
  std::vector<double> edges;
  for (double e : seeds)
    if (edges.empty() || e - edges.back() > 1e-13 * width) edges.push_back(e);
  edges.back() = support.hi;

  auto grid = std::shared_ptr<CellGrid>(new CellGrid(measure));
  std::vector<double> scratch(components);
  std::vector<double> whole(components), left(components), right(components);

  // Depth-first refinement keeps the cells in increasing order.
  std::function<void(double, double, std::vector<double>, std::size_t)> refine =
      [&](double lo, double hi, std::vector<double> total, std::size_t depth) {
        const double mid = 0.5 * (lo + hi);
        std::vector<double> l(components), r(components);
        integrate_cell(measure, g, components, lo, mid, l, scratch);
        integrate_cell(measure, g, components, mid, hi, r, scratch);
        double err = 0.0;
        for (std::size_t c = 0; c < components; ++c)
          err = std::max(err, std::abs(total[c] - l[c] - r[c]));
        const double budget = options.tol * (hi - lo) / width;
        if (err <= budget || depth >= options.max_depth) {
          grid->append_cell(lo, hi);
          return;
        }
        refine(lo, mid, std::move(l), depth + 1);
        refine(mid, hi, std::move(r), depth + 1);
      };

  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    integrate_cell(measure, g, components, edges[i], edges[i + 1], whole, scratch);
    refine(edges[i], edges[i + 1], whole, 0);
  }
  return grid;
}

double CellGrid::integrate(std::span<const double> values) const {
  double s = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * values[i];
  return s;
}

// ---------------------------------------------------------------------------
// GridDensitySampler

GridDensitySampler::GridDensitySampler(std::shared_ptr<const CellGrid> grid,
                                       std::span<const double> values, double tol)
    : grid_(std::move(grid)), tol_(tol) {
  const std::size_t cells = grid_->cells();
  const auto weights = grid_->weights();
  const auto mu = grid_->measure_density();
  const auto edges = grid_->edges();
  if (values.size() != weights.size())
    fail(ErrorKind::Validation, "density table does not match grid layout");

  cumulative_.assign(cells + 1, 0.0);
  left_slope_.resize(cells);
  right_slope_.resize(cells);
  std::vector<double> mass(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    double m = 0.0;
    for (std::size_t j = 0; j < CellGrid::kStride; ++j) {
      const std::size_t k = c * CellGrid::kStride + j;
      const double v = values[k];
      if (v < 0.0 || std::isnan(v))
        fail(ErrorKind::NegativeDensity,
             "density value " + std::to_string(v) + " at x=" + std::to_string(grid_->points()[k]));
      m += weights[k] * v;
    }
    mass[c] = m;
    raw_mass_ += m;
  }
  if (!(std::abs(raw_mass_ - 1.0) <= tol))
    fail(ErrorKind::NotADensity, "integral of g dmu is " + std::to_string(raw_mass_));

  for (std::size_t c = 0; c < cells; ++c) {
    cumulative_[c + 1] = cumulative_[c] + mass[c];
    const double h = edges[c + 1] - edges[c];
    const std::size_t base = c * CellGrid::kStride;
    const double dl = values[base] * mu[base];
    const double dr = values[base + CellGrid::kStride - 1] * mu[base + CellGrid::kStride - 1];
    double s0 = mass[c] > 0.0 ? h * dl / mass[c] : 1.0;
    double s1 = mass[c] > 0.0 ? h * dr / mass[c] : 1.0;
    const double norm2 = s0 * s0 + s1 * s1;
    if (norm2 > 9.0) {
      const double scale = 3.0 / std::sqrt(norm2);
      s0 *= scale;
      s1 *= scale;
    }
    left_slope_[c] = s0;
    right_slope_[c] = s1;
  }
  const double total = cumulative_.back();
  for (double& v : cumulative_) v /= total;
  cumulative_.back() = 1.0;
}

double GridDensitySampler::cell_cdf_fraction(std::size_t cell, double t) const {
  const double s0 = left_slope_[cell];
  const double s1 = right_slope_[cell];
  return ((s0 + s1 - 2.0) * t + (3.0 - 2.0 * s0 - s1)) * t * t + s0 * t;
}

double GridDensitySampler::cdf(double x) const {
  const auto edges = grid_->edges();
  if (x <= edges.front()) return 0.0;
  if (x >= edges.back()) return 1.0;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  const std::size_t c = static_cast<std::size_t>(it - edges.begin()) - 1;
  const double t = (x - edges[c]) / (edges[c + 1] - edges[c]);
  return cumulative_[c] + (cumulative_[c + 1] - cumulative_[c]) * cell_cdf_fraction(c, t);
}

double GridDensitySampler::quantile(double u) const {
  const auto edges = grid_->edges();
  const std::size_t cells = grid_->cells();
  u = std::clamp(u, 0.0, 1.0);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  std::size_t c;
  if (it == cumulative_.end()) {
    // u == 1: last cell with positive mass.
    c = cells - 1;
    while (c > 0 && cumulative_[c + 1] <= cumulative_[c]) --c;
  } else {
    c = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  }
  const double cell_mass = cumulative_[c + 1] - cumulative_[c];
  const double y = cell_mass > 0.0 ? std::clamp((u - cumulative_[c]) / cell_mass, 0.0, 1.0) : 0.5;

  // Safeguarded Newton on the monotone cubic.
  const double s0 = left_slope_[c];
  const double s1 = right_slope_[c];
  double lo = 0.0, hi = 1.0, t = y;
  for (int iter = 0; iter < 60; ++iter) {
    const double f = cell_cdf_fraction(c, t) - y;
    if (std::abs(f) < 1e-15) break;
    if (f > 0.0) hi = t; else lo = t;
    const double df = (3.0 * (s0 + s1 - 2.0) * t + 2.0 * (3.0 - 2.0 * s0 - s1)) * t + s0;
    double next = df > 0.0 ? t - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo < 1e-16) break;
    t = next;
  }
  const double h = edges[c + 1] - edges[c];
  double x = edges[c] + t * h;
  if (x >= edges[c + 1]) x = std::nextafter(edges[c + 1], edges[c]);
  if (x < edges[c]) x = edges[c];
  return x;
}

GridDensitySampler build_density_sampler(const ScalarDensity& g, const ReferenceMeasure& measure,
                                         double tol, GridOptions options) {
  options.tol = std::min(options.tol, tol);
  auto grid = CellGrid::build(
      measure, [&](double x, std::span<double> out) { out[0] = g(x); }, 1, options);
  std::vector<double> values(grid->points().size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = g(grid->points()[i]);
  return GridDensitySampler(std::move(grid), values, tol);
}

}  // namespace dppls
