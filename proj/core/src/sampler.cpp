#include "dppls/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dppls/error.hpp"
#include "dppls/lsq.hpp"

namespace dppls {

WeightFunction WeightFunction::mixture(double alpha, std::optional<DensityHook> h) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    fail(ErrorKind::Validation, "mixture weight alpha must lie in (0, 1]");
  if (h && (!h->density || !h->sample))
    fail(ErrorKind::Validation, "mixture hook needs both a density and a sampler");
  return WeightFunction(WeightKind::Mixture, alpha, std::move(h));
}

double WeightFunction::operator()(const FeatureBasis& basis, double x) const {
  switch (kind_) {
    case WeightKind::Unit: return 1.0;
    case WeightKind::Christoffel: return basis.christoffel_density(x);
    case WeightKind::Mixture: {
      const double h = hook_ ? hook_->density(x) : 1.0;
      return alpha_ * basis.christoffel_density(x) + (1.0 - alpha_) * h;
    }
  }
  return 1.0;
}

double WeightFunction::sample_h(const FeatureBasis& basis, RngStream& rng) const {
  if (hook_) return hook_->sample(rng);
  return basis.measure().sample(rng);
}

std::string WeightFunction::label() const {
  switch (kind_) {
    case WeightKind::Unit: return "unit";
    case WeightKind::Christoffel: return "christoffel";
    case WeightKind::Mixture: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "mixture(%.17g,%s)", alpha_,
                    hook_ ? hook_->name.c_str() : "1");
      return buf;
    }
  }
  return "unknown";
}

const char* to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::IidMu: return "iid-mu";
    case Scheme::IidChristoffel: return "iid-christoffel";
    case Scheme::Volume: return "volume";
    case Scheme::RepeatedDpp: return "repeated-dpp";
    case Scheme::RepeatedDppConditioned: return "repeated-dpp-cond";
    case Scheme::Dpp: return "dpp";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "iid-mu") return Scheme::IidMu;
  if (name == "iid-christoffel") return Scheme::IidChristoffel;
  if (name == "volume" || name == "volume-rescaled") return Scheme::Volume;
  if (name == "repeated-dpp") return Scheme::RepeatedDpp;
  if (name == "repeated-dpp-cond") return Scheme::RepeatedDppConditioned;
  if (name == "dpp") return Scheme::Dpp;
  fail(ErrorKind::Validation, "unknown sampling scheme '" + name + "'");
}

// ---------------------------------------------------------------------------

DesignSampler::DesignSampler(FeatureBasis basis, SamplerOptions options)
    : basis_(std::move(basis)), options_(std::move(options)) {
  const std::size_t m = basis_.dimension();
  GridOptions grid_options = options_.grid;
  const auto bp = basis_.breakpoints();
  grid_options.breakpoints.insert(grid_options.breakpoints.end(), bp.begin(), bp.end());
  grid_options.tol = std::min(grid_options.tol, options_.component_tol);

  std::vector<double> scratch(m);
  grid_ = CellGrid::build(
      basis_.measure(),
      [&](double x, std::span<double> out) {
        basis_.eval(x, out);
        for (double& v : out) v *= v;
      },
      m, grid_options);

  const auto points = grid_->points();
  const std::size_t nodes = points.size();
  features_.resize(nodes * m);
  sq_norms_.resize(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    std::span<double> phi(features_.data() + i * m, m);
    basis_.eval(points[i], phi);
    double s = 0.0;
    for (double v : phi) s += v * v;
    sq_norms_[i] = s;
  }

  components_.reserve(m);
  std::vector<double> values(nodes);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < nodes; ++i) {
      const double v = features_[i * m + j];
      values[i] = v * v;
    }
    components_.emplace_back(grid_, values, options_.component_tol);
  }
}

double DesignSampler::sample_christoffel(RngStream& rng) const {
  const std::size_t i = static_cast<std::size_t>(rng.below(components_.size()));
  return components_[i].sample(rng);
}

double DesignSampler::sample_mixture_point(const WeightFunction& w, RngStream& rng) const {
  if (w.kind() != WeightKind::Mixture)
    fail(ErrorKind::Validation, "sample_mixture_point needs a mixture weight");
  if (w.alpha() >= 1.0 || rng.bernoulli(w.alpha())) return sample_christoffel(rng);
  return w.sample_h(basis_, rng);
}

double DesignSampler::sample_weighted(const WeightFunction& w, RngStream& rng) const {
  switch (w.kind()) {
    case WeightKind::Unit: return basis_.measure().sample(rng);
    case WeightKind::Christoffel: return sample_christoffel(rng);
    case WeightKind::Mixture: return sample_mixture_point(w, rng);
  }
  return 0.0;
}

namespace {

void fill_weights(const FeatureBasis& basis, const WeightFunction& w, DesignSample& design) {
  design.weights.resize(design.points.size());
  for (std::size_t i = 0; i < design.points.size(); ++i)
    design.weights[i] = w(basis, design.points[i]);
}

}  // namespace

DesignSample DesignSampler::sample_iid(const WeightFunction& w, std::size_t n,
                                       RngStream& rng) const {
  if (n == 0) fail(ErrorKind::EmptyDesign, "design needs n >= 1");
  DesignSample design;
  design.seed = rng.seed();
  design.sampler_id = w.kind() == WeightKind::Unit ? "iid-mu" : "iid-" + w.label();
  design.points.resize(n);
  for (auto& x : design.points) x = sample_weighted(w, rng);
  fill_weights(basis_, w, design);
  return design;
}

void DesignSampler::draw_dpp_points(RngStream& rng, std::vector<double>& out) const {
  const std::size_t m = basis_.dimension();
  const std::size_t nodes = sq_norms_.size();
  std::vector<double> residual = sq_norms_;
  std::vector<double> values(nodes);
  std::vector<double> phi(m);
  RotatedBasisState state(m);

  for (std::size_t k = 0; k < m; ++k) {
    const double inv_remaining = 1.0 / static_cast<double>(m - k);
    for (std::size_t i = 0; i < nodes; ++i) values[i] = residual[i] * inv_remaining;
    const GridDensitySampler conditional(grid_, values, options_.step_mass_tol);

    std::size_t failures = 0;
    double x = 0.0;
    for (;;) {
      x = conditional.sample(rng);
      basis_.eval(x, phi);
      try {
        state.extend(phi);
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegeneratePoint) throw;
        if (++failures >= options_.max_degenerate_retries)
          fail(ErrorKind::SamplerFailure,
               "DPP step " + std::to_string(k + 1) + " hit " + std::to_string(failures) +
                   " consecutive degenerate points");
      }
    }
    out.push_back(x);

    if (k + 1 == m) break;
    const auto v = state.vector(k);
    for (std::size_t i = 0; i < nodes; ++i) {
      const double* f = features_.data() + i * m;
      double dot = 0.0;
      for (std::size_t j = 0; j < m; ++j) dot += v[j] * f[j];
      const double r = residual[i] - dot * dot;
      residual[i] = r > 0.0 ? r : 0.0;
    }
  }
}

DesignSample DesignSampler::sample_dpp(RngStream& rng) const {
  DesignSample design;
  design.seed = rng.seed();
  design.sampler_id = "dpp";
  design.points.reserve(basis_.dimension());
  draw_dpp_points(rng, design.points);
  fill_weights(basis_, WeightFunction::christoffel(), design);
  return design;
}

DesignSample DesignSampler::sample_volume(const WeightFunction& w, std::size_t n,
                                          RngStream& rng) const {
  const std::size_t m = basis_.dimension();
  if (n < m)
    fail(ErrorKind::UnderdeterminedDesign,
         "volume sampling needs n >= m (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
  DesignSample design;
  design.seed = rng.seed();
  design.sampler_id = "volume-" + w.label();
  design.points.reserve(n);
  draw_dpp_points(rng, design.points);
  for (std::size_t i = m; i < n; ++i) design.points.push_back(sample_weighted(w, rng));
  // Fisher-Yates with the same stream.
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    std::swap(design.points[i], design.points[j]);
  }
  fill_weights(basis_, w, design);
  return design;
}

DesignSample DesignSampler::sample_repeated_dpp(std::size_t n, RngStream& rng) const {
  if (n == 0) fail(ErrorKind::EmptyDesign, "design needs n >= 1");
  const std::size_t m = basis_.dimension();
  const std::size_t blocks = (n + m - 1) / m;
  DesignSample design;
  design.seed = rng.seed();
  design.sampler_id = "repeated-dpp";
  design.points.reserve(blocks * m);
  for (std::size_t b = 0; b < blocks; ++b) draw_dpp_points(rng, design.points);
  design.points.resize(n);
  fill_weights(basis_, WeightFunction::christoffel(), design);
  return design;
}

void DesignSampler::validate_weight(const WeightFunction& w, double tol) const {
  const auto points = grid_->points();
  std::vector<double> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    values[i] = w(basis_, points[i]);
    if (!(values[i] > 0.0))
      fail(ErrorKind::Validation, "weight function is not strictly positive at x=" +
                                      std::to_string(points[i]));
  }
  const double mass = grid_->integrate(values);
  if (!(std::abs(mass - 1.0) <= tol))
    fail(ErrorKind::NotADensity, "weight function integrates to " + std::to_string(mass));
}

// ---------------------------------------------------------------------------

DesignSample sample_conditioned(const std::function<DesignSample(RngStream&)>& inner,
                                const FeatureBasis& basis, double delta, std::size_t max_attempts,
                                RngStream& rng) {
  if (!(delta > 0.0 && delta < 1.0))
    fail(ErrorKind::Domain, "conditioning needs 0 < delta < 1");
  const std::uint64_t seed = rng.seed();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    DesignSample design = inner(rng);
    const double lmin = empirical_gram(design, basis).lambda_min;
    if (lmin >= 1.0 - delta) {
      design.attempts = attempt;
      design.seed = seed;
      design.sampler_id += "-cond";
      return design;
    }
    best = std::max(best, lmin);
  }
  throw ConditioningError("conditioning-failure: lambda_min >= " + std::to_string(1.0 - delta) +
                              " not reached in " + std::to_string(max_attempts) + " attempts",
                          best);
}

WeightFunction scheme_weight(Scheme scheme, double alpha) {
  if (scheme == Scheme::IidMu) return WeightFunction::unit();
  if (alpha < 1.0) return WeightFunction::mixture(alpha);
  return WeightFunction::christoffel();
}

DesignSample draw_design(const DesignSampler& sampler, Scheme scheme, std::size_t n,
                         RngStream& rng, double alpha, double delta, std::size_t max_attempts) {
  const WeightFunction w = scheme_weight(scheme, alpha);
  switch (scheme) {
    case Scheme::IidMu:
    case Scheme::IidChristoffel: {
      DesignSample d = sampler.sample_iid(w, n, rng);
      d.sampler_id = to_string(scheme);
      return d;
    }
    case Scheme::Volume: {
      DesignSample d = sampler.sample_volume(w, n, rng);
      d.sampler_id = to_string(scheme);
      return d;
    }
    case Scheme::RepeatedDpp: return sampler.sample_repeated_dpp(n, rng);
    case Scheme::Dpp: {
      if (n != sampler.basis().dimension())
        fail(ErrorKind::Validation, "dpp scheme draws exactly n = m points");
      return sampler.sample_dpp(rng);
    }
    case Scheme::RepeatedDppConditioned: {
      if (n == 0) fail(ErrorKind::EmptyDesign, "design needs n >= 1");
      return sample_conditioned(
          [&](RngStream& r) { return sampler.sample_repeated_dpp(n, r); }, sampler.basis(), delta,
          max_attempts, rng);
    }
  }
  fail(ErrorKind::Validation, "unknown scheme");
}

}  // namespace dppls
