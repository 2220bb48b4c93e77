#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dppls/basis.hpp"
#include "dppls/measure.hpp"
#include "dppls/rng.hpp"

namespace dppls {

/// A density h w.r.t. mu together with a way to draw from h dmu.
struct DensityHook {
  std::string name;
  ScalarDensity density;
  std::function<double(RngStream&)> sample;
};

enum class WeightKind { Unit, Christoffel, Mixture };

/// Weight function w defining the sampling measure nu = w mu and the
/// least-squares weights 1/w(x_i).
class WeightFunction {
 public:
  static WeightFunction unit() { return WeightFunction(WeightKind::Unit, 1.0, std::nullopt); }
  static WeightFunction christoffel() {
    return WeightFunction(WeightKind::Christoffel, 1.0, std::nullopt);
  }
  /// w = alpha w_m + (1 - alpha) h, alpha in (0, 1]. Without a hook h == 1
  /// and h mu is sampled from mu itself.
  static WeightFunction mixture(double alpha, std::optional<DensityHook> h = std::nullopt);

  WeightKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  bool has_custom_hook() const noexcept { return hook_.has_value(); }

  double operator()(const FeatureBasis& basis, double x) const;

  /// Draws one point from h mu (Mixture only).
  double sample_h(const FeatureBasis& basis, RngStream& rng) const;

  std::string label() const;

 private:
  WeightFunction(WeightKind kind, double alpha, std::optional<DensityHook> hook)
      : kind_(kind), alpha_(alpha), hook_(std::move(hook)) {}

  WeightKind kind_;
  double alpha_;
  std::optional<DensityHook> hook_;
};

/// n ordered points with their weight values w(x_i).
struct DesignSample {
  std::vector<double> points;
  std::vector<double> weights;
  std::string sampler_id;
  std::uint64_t seed = 0;
  std::size_t attempts = 1;

  std::size_t size() const noexcept { return points.size(); }
};

enum class Scheme { IidMu, IidChristoffel, Volume, RepeatedDpp, RepeatedDppConditioned, Dpp };

const char* to_string(Scheme scheme) noexcept;
Scheme parse_scheme(const std::string& name);

struct SamplerOptions {
  GridOptions grid{};
  /// Mass tolerance for the static component densities phi_i^2.
  double component_tol = 1e-8;
  /// Mass tolerance for each sequential DPP conditional.
  double step_mass_tol = 1e-6;
  std::size_t max_degenerate_retries = 16;
};

/// Sampling machinery bound to one basis: an adaptive grid resolving every
/// phi_i^2, the features tabulated on it, and per-component inverse-CDF
/// samplers. Immutable after construction; share it across threads and
/// give each caller its own RngStream.
class DesignSampler {
 public:
  explicit DesignSampler(FeatureBasis basis, SamplerOptions options = {});

  const FeatureBasis& basis() const noexcept { return basis_; }
  const CellGrid& grid() const noexcept { return *grid_; }
  const SamplerOptions& options() const noexcept { return options_; }

  /// One draw from nu_m = w_m mu: a uniform component index i, then phi_i^2 mu.
  double sample_christoffel(RngStream& rng) const;
  /// Bernoulli(alpha) choice between nu_m and h mu.
  double sample_mixture_point(const WeightFunction& w, RngStream& rng) const;
  /// One draw from w mu.
  double sample_weighted(const WeightFunction& w, RngStream& rng) const;

  DesignSample sample_iid(const WeightFunction& w, std::size_t n, RngStream& rng) const;
  /// Exact projection DPP of size m by the sequential conditional densities.
  DesignSample sample_dpp(RngStream& rng) const;
  /// Volume sampling of n >= m points with reference measure w mu.
  DesignSample sample_volume(const WeightFunction& w, std::size_t n, RngStream& rng) const;
  /// ceil(n/m) independent DPP draws, first n points kept.
  DesignSample sample_repeated_dpp(std::size_t n, RngStream& rng) const;

  /// Checks that w is strictly positive on the grid and integrates to 1.
  void validate_weight(const WeightFunction& w, double tol = 1e-8) const;

  /// Sequential DPP points appended to `out`.
  void draw_dpp_points(RngStream& rng, std::vector<double>& out) const;

 private:
  std::span<const double> node_features(std::size_t node) const {
    return {features_.data() + node * basis_.dimension(), basis_.dimension()};
  }

  FeatureBasis basis_;
  SamplerOptions options_;
  std::shared_ptr<const CellGrid> grid_;
  std::vector<double> features_;
  std::vector<double> sq_norms_;
  std::vector<GridDensitySampler> components_;
};

/// Draws from `inner` until lambda_min(G^w) >= 1 - delta; the whole design
/// is redrawn on each failure. Throws ConditioningError after max_attempts.
DesignSample sample_conditioned(const std::function<DesignSample(RngStream&)>& inner,
                                const FeatureBasis& basis, double delta, std::size_t max_attempts,
                                RngStream& rng);

inline constexpr std::size_t kDefaultMaxAttempts = 1000;

/// Weight function used by each scheme (alpha < 1 mixes in mu for the
/// Christoffel-based schemes).
WeightFunction scheme_weight(Scheme scheme, double alpha = 1.0);

/// Single entry point used by the experiment harness and the CLI.
DesignSample draw_design(const DesignSampler& sampler, Scheme scheme, std::size_t n,
                         RngStream& rng, double alpha = 1.0, double delta = 0.75,
                         std::size_t max_attempts = kDefaultMaxAttempts);

}  // namespace dppls
