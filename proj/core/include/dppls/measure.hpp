#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dppls/rng.hpp"

namespace dppls {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

enum class MeasureKind { UniformInterval, StandardGaussian };

/// A 1-D probability measure: uniform on [a, b] or the standard Gaussian.
/// The Gaussian carries a truncation radius that bounds every grid built on
/// it; sampling and density are those of the untruncated law.
class ReferenceMeasure {
 public:
  static ReferenceMeasure uniform(double a, double b);
  static ReferenceMeasure standard_gaussian(double radius = 12.0);

  /// Truncation radius used for a basis of dimension m:
  /// max(12, sqrt(4m + 2) + 4).
  static double gaussian_radius_for_dimension(std::size_t m);

  MeasureKind kind() const noexcept { return kind_; }
  Interval support() const noexcept { return support_; }

  double density(double x) const noexcept;
  double cdf(double x) const noexcept;

  double sample(RngStream& rng) const;
  std::vector<double> sample_iid(RngStream& rng, std::size_t n) const;

  bool operator==(const ReferenceMeasure&) const = default;

 private:
  ReferenceMeasure(MeasureKind kind, Interval support) : kind_(kind), support_(support) {}

  MeasureKind kind_;
  Interval support_;
};

/// Quadrature with respect to a probability measure: sum(w_i f(x_i)).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t order = 0;

  template <class F>
  double integrate(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
    return s;
  }
};

/// Quadrature order cap: DPPLS_MAX_QUAD_ORDER if set to a positive integer,
/// otherwise 2048.
std::size_t default_max_quadrature_order();

/// Gauss rule for the measure (Gauss-Legendre mapped onto [a, b], or
/// probabilists' Gauss-Hermite), weights summing to 1.
QuadratureRule gauss_quadrature(const ReferenceMeasure& measure, std::size_t q);
QuadratureRule gauss_quadrature(const ReferenceMeasure& measure, std::size_t q,
                                std::size_t max_order);

/// Gauss-Legendre nodes/weights on [-1, 1] (Lebesgue weights summing to 2).
QuadratureRule gauss_legendre_reference(std::size_t q);

struct GridOptions {
  std::size_t initial_cells = 2048;
  /// Absolute budget on the estimated quadrature error of the total mass.
  double tol = 1e-8;
  std::size_t max_depth = 12;
  /// Points where the density may jump; inserted as cell edges.
  std::vector<double> breakpoints;
};

/// Vector-valued integrand: writes `components` values at x.
using VectorIntegrand = std::function<void(double x, std::span<double> out)>;

/// Adaptive partition of the effective support. Each cell stores a fixed
/// layout of evaluation points, [left edge, interior Gauss nodes..., right
/// edge], with quadrature weights already multiplied by the measure density.
/// Right edges are nudged one ulp inward so that one-sided limits of
/// piecewise-continuous densities are tabulated per cell.
class CellGrid {
 public:
  static constexpr std::size_t kInterior = 4;
  static constexpr std::size_t kStride = kInterior + 2;

  /// Refines cells until the two-level quadrature difference of every
  /// component is below tol * (cell width / support width).
  static std::shared_ptr<const CellGrid> build(const ReferenceMeasure& measure,
                                               const VectorIntegrand& g,
                                               std::size_t components,
                                               const GridOptions& options);

  const ReferenceMeasure& measure() const noexcept { return measure_; }
  std::size_t cells() const noexcept { return edges_.size() - 1; }
  std::span<const double> edges() const noexcept { return edges_; }
  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> measure_density() const noexcept { return mu_density_; }

  double integrate(std::span<const double> values) const;

 private:
  explicit CellGrid(ReferenceMeasure measure) : measure_(measure) {}
  void append_cell(double lo, double hi);

  ReferenceMeasure measure_;
  std::vector<double> edges_;
  std::vector<double> points_;
  std::vector<double> weights_;
  std::vector<double> mu_density_;
};

/// Inverse-CDF sampler for g dmu tabulated on a CellGrid. Within a cell the
/// cumulative is a Fritsch-Carlson limited cubic Hermite interpolant of the
/// cell mass and the endpoint densities, inverted by safeguarded Newton.
class GridDensitySampler {
 public:
  /// `values` holds g at every grid point (grid->points() layout).
  /// Throws NegativeDensity for a negative value and NotADensity when the
  /// tabulated mass differs from 1 by more than tol.
  GridDensitySampler(std::shared_ptr<const CellGrid> grid, std::span<const double> values,
                     double tol);

  const CellGrid& grid() const noexcept { return *grid_; }
  std::span<const double> edges() const noexcept { return grid_->edges(); }
  /// Cumulative masses at the edges, normalized to end at exactly 1.
  std::span<const double> cumulative() const noexcept { return cumulative_; }
  /// Mass before normalization.
  double raw_mass() const noexcept { return raw_mass_; }
  double tolerance() const noexcept { return tol_; }

  double quantile(double u) const;
  double cdf(double x) const;
  double sample(RngStream& rng) const { return quantile(rng.uniform()); }

 private:
  double cell_cdf_fraction(std::size_t cell, double t) const;

  std::shared_ptr<const CellGrid> grid_;
  std::vector<double> cumulative_;
  std::vector<double> left_slope_;
  std::vector<double> right_slope_;
  double raw_mass_ = 0.0;
  double tol_ = 0.0;
};

using ScalarDensity = std::function<double(double)>;

/// Samples from g dmu by grid inverse-CDF; g must be a density w.r.t. mu.
GridDensitySampler build_density_sampler(const ScalarDensity& g, const ReferenceMeasure& measure,
                                         double tol = 1e-8, GridOptions options = {});

}  // namespace dppls
