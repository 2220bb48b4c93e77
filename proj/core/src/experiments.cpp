#include "dppls/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "dppls/bounds.hpp"
#include "dppls/csv.hpp"
#include "dppls/error.hpp"
#include "dppls/parallel.hpp"

namespace dppls {

TargetFunction target_function(const std::string& id) {
  if (id == "inv-quadratic") return {id, [](double x) { return 1.0 / (1.0 + 2.0 * x * x); }};
  if (id == "exp") return {id, [](double x) { return std::exp(x); }};
  if (id == "sin3") return {id, [](double x) { return std::sin(3.0 * x); }};
  fail(ErrorKind::Validation, "unknown target function '" + id + "'");
}

std::vector<std::string> target_function_ids() { return {"inv-quadratic", "exp", "sin3"}; }

std::vector<std::size_t> sample_sizes(const ExperimentConfig& config, std::size_t m) {
  if (!config.n_values.empty()) return config.n_values;
  std::vector<std::size_t> out;
  for (double k : config.n_multiples) {
    const double n = std::round(k * static_cast<double>(m));
    out.push_back(n < 1.0 ? 1 : static_cast<std::size_t>(n));
  }
  return out;
}

namespace {

// Stream tags keep the per-operation replicate streams disjoint.
enum : std::uint64_t { kTagStability = 1, kTagErrors = 2, kTagConjecture = 3 };

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t tag, std::size_t m, std::size_t n,
                             Scheme scheme, std::size_t r) {
  return derive_seed(seed, {tag, m, n, static_cast<std::uint64_t>(scheme), r});
}

}  // namespace

void validate_config(const ExperimentConfig& config) {
  if (config.replicates == 0) fail(ErrorKind::Validation, "replicates must be >= 1");
  if (config.m_values.empty()) fail(ErrorKind::Validation, "no dimensions m given");
  if (config.schemes.empty()) fail(ErrorKind::Validation, "no sampling scheme given");
  if (config.n_values.empty() && config.n_multiples.empty())
    fail(ErrorKind::Validation, "no sample sizes given (--n or --n-mult)");
  if (!(config.delta > 0.0 && config.delta < 1.0))
    fail(ErrorKind::Validation, "delta must lie in (0, 1)");
  if (!(config.alpha > 0.0 && config.alpha <= 1.0))
    fail(ErrorKind::Validation, "alpha must lie in (0, 1]");
  for (double k : config.n_multiples)
    if (!(k > 0.0)) fail(ErrorKind::Validation, "n multiples must be positive");
  for (std::size_t m : config.m_values) {
    if (m == 0) fail(ErrorKind::Validation, "m must be >= 1");
    for (std::size_t n : sample_sizes(config, m)) {
      if (n == 0) fail(ErrorKind::Validation, "n must be >= 1");
      for (Scheme s : config.schemes) {
        if ((s == Scheme::Volume) && n < m)
          fail(ErrorKind::UnderdeterminedDesign, "volume sampling needs n >= m (m=" +
                                                     std::to_string(m) + ", n=" +
                                                     std::to_string(n) + ")");
        if (s == Scheme::Dpp && n != m)
          fail(ErrorKind::Validation, "the dpp scheme needs n = m");
      }
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<StabilityCell> stability_map(const ExperimentConfig& config) {
  validate_config(config);
  for (Scheme s : config.schemes)
    if (s == Scheme::RepeatedDppConditioned || s == Scheme::Dpp)
      fail(ErrorKind::Validation, std::string("stability map does not accept scheme ") +
                                      to_string(s));
  std::vector<StabilityCell> cells;
  for (std::size_t m : config.m_values) {
    const DesignSampler sampler(FeatureBasis::make(config.family, m));
    for (std::size_t n : sample_sizes(config, m)) {
      for (Scheme scheme : config.schemes) {
        // 1 = stable, 0 = unstable, -1 = sampler failure
        const auto outcomes = parallel_map<int>(config.replicates, config.workers, [&](std::size_t r) {
          RngStream rng(replicate_seed(config.seed, kTagStability, m, n, scheme, r));
          try {
            const DesignSample d = draw_design(sampler, scheme, n, rng, config.alpha, config.delta,
                                               config.max_attempts);
            return empirical_gram(d, sampler.basis()).lambda_min >= 1.0 - config.delta ? 1 : 0;
          } catch (const Error& e) {
            if (e.is_validation()) throw;
            return -1;
          }
        });
        StabilityCell cell;
        cell.m = m;
        cell.n = n;
        cell.scheme = scheme;
        cell.replicates = config.replicates;
        cell.seed = config.seed;
        std::size_t hits = 0;
        for (int o : outcomes) {
          if (o == 1) ++hits;
          if (o < 0) ++cell.failures;
        }
        cell.p_hat = static_cast<double>(hits) / static_cast<double>(config.replicates);
        cells.push_back(cell);
      }
    }
  }
  return cells;
}

void write_stability_csv(std::ostream& out, const std::vector<StabilityCell>& cells) {
  CsvWriter csv(out);
  csv.header({"m", "n", "scheme", "p_hat", "replicates", "seed", "failures"});
  for (const auto& c : cells) {
    csv << std::uint64_t{c.m} << std::uint64_t{c.n} << to_string(c.scheme) << c.p_hat
        << std::uint64_t{c.replicates} << c.seed << std::uint64_t{c.failures};
    csv.end_row();
  }
}

// ---------------------------------------------------------------------------

double best_relative_error(const FeatureBasis& basis, const TargetFn& f) {
  const Eigen::VectorXd a = best_approximation(f, basis);
  const double err = l2_error(f, a, basis);
  const double norm = l2_error(f, Eigen::VectorXd::Zero(a.size()), basis);
  return err / norm;
}

namespace {

struct ReplicateError {
  double rel = 0.0;
  int status = 0;  // 0 ok, 1 singular, 2 failure
};

}  // namespace

std::vector<ErrorSample> error_samples(const ExperimentConfig& config) {
  validate_config(config);
  for (std::size_t m : config.m_values)
    for (std::size_t n : sample_sizes(config, m))
      if (n < m)
        fail(ErrorKind::UnderdeterminedDesign, "least-squares errors need n >= m (m=" +
                                                   std::to_string(m) + ", n=" +
                                                   std::to_string(n) + ")");
  const TargetFunction target = target_function(config.target);
  std::vector<ErrorSample> out;
  for (std::size_t m : config.m_values) {
    const DesignSampler sampler(FeatureBasis::make(config.family, m));
    const FeatureBasis& basis = sampler.basis();
    const Eigen::VectorXd best = best_approximation(target.evaluator, basis);
    const double best_err = l2_error(target.evaluator, best, basis);
    const double f_norm = l2_error(target.evaluator, Eigen::VectorXd::Zero(best.size()), basis);

    for (std::size_t n : sample_sizes(config, m)) {
      for (Scheme scheme : config.schemes) {
        const auto reps =
            parallel_map<ReplicateError>(config.replicates, config.workers, [&](std::size_t r) {
              RngStream rng(replicate_seed(config.seed, kTagErrors, m, n, scheme, r));
              ReplicateError res;
              DesignSample d;
              try {
                d = draw_design(sampler, scheme, n, rng, config.alpha, config.delta,
                                config.max_attempts);
              } catch (const Error& e) {
                if (e.is_validation()) throw;
                res.status = 2;
                return res;
              }
              const EmpiricalGram gram = empirical_gram(d, basis);
              if (!(gram.lambda_min > kSingularThreshold)) {
                res.status = 1;
                res.rel = kErrorCap;
                return res;
              }
              const LsqFit fit =
                  weighted_lsq_fit(evaluate(target.evaluator, d), d, basis, gram);
              // |f - f_hat|^2 = |f - P f|^2 + |a - c|^2 by orthonormality.
              const double dist2 = (fit.coefficients - best).squaredNorm();
              const double rel = std::sqrt(best_err * best_err + dist2) / f_norm;
              res.rel = std::isfinite(rel) ? std::min(rel, kErrorCap) : kErrorCap;
              return res;
            });
        ErrorSample sample;
        sample.m = m;
        sample.n = n;
        sample.scheme = scheme;
        sample.seed = config.seed;
        for (const auto& r : reps) {
          if (r.status == 2) {
            ++sample.failures;
            continue;
          }
          if (r.status == 1) ++sample.singular;
          sample.rel_errors.push_back(r.rel);
        }
        out.push_back(std::move(sample));
      }
    }
  }
  return out;
}

double rms(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s / static_cast<double>(values.size()));
}

double quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<ErrorRow> error_table(const ExperimentConfig& config) {
  const auto samples = error_samples(config);
  const TargetFunction target = target_function(config.target);
  std::vector<ErrorRow> rows;
  std::size_t current_m = 0;
  double best = 0.0;
  for (const auto& s : samples) {
    if (s.m != current_m) {
      current_m = s.m;
      best = best_relative_error(FeatureBasis::make(config.family, s.m), target.evaluator);
    }
    ErrorRow row;
    row.m = s.m;
    row.n = s.n;
    row.scheme = s.scheme;
    row.best = best;
    row.rms = rms(s.rel_errors);
    row.q95 = quantile_type7(s.rel_errors, 0.95);
    row.singular = s.singular;
    row.failures = s.failures;
    row.replicates = config.replicates;
    row.seed = config.seed;
    rows.push_back(row);
  }
  return rows;
}

void write_error_table_csv(std::ostream& out, const std::vector<ErrorRow>& rows) {
  CsvWriter csv(out);
  csv.header({"m", "n", "scheme", "best", "rms_rel_error", "q95_rel_error", "singular", "failures",
              "replicates", "seed"});
  for (const auto& r : rows) {
    csv << std::uint64_t{r.m} << std::uint64_t{r.n} << to_string(r.scheme) << r.best << r.rms
        << r.q95 << std::uint64_t{r.singular} << std::uint64_t{r.failures}
        << std::uint64_t{r.replicates} << r.seed;
    csv.end_row();
  }
}

void write_error_histogram_csv(std::ostream& out, const std::vector<ErrorSample>& samples) {
  CsvWriter csv(out);
  csv.header({"scheme", "m", "n", "replicate", "rel_error", "log_rel_error"});
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < s.rel_errors.size(); ++i) {
      csv << to_string(s.scheme) << std::uint64_t{s.m} << std::uint64_t{s.n} << std::uint64_t{i}
          << s.rel_errors[i] << std::log(s.rel_errors[i]);
      csv.end_row();
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

double inverse_lambda_min(const DesignSample& d, const FeatureBasis& basis) {
  const double lmin = empirical_gram(d, basis).lambda_min;
  return lmin > 0.0 ? 1.0 / lmin : std::numeric_limits<double>::infinity();
}

}  // namespace

ConjectureReport conjecture_check(BasisFamily family, std::size_t m,
                                  const std::vector<double>& t_grid, std::size_t replicates,
                                  std::uint64_t seed, std::size_t workers) {
  if (replicates == 0) fail(ErrorKind::Validation, "replicates must be >= 1");
  if (m == 0 || m > 12) fail(ErrorKind::Validation, "conjecture check supports 1 <= m <= 12");
  if (t_grid.empty()) fail(ErrorKind::Validation, "empty threshold grid");
  const DesignSampler sampler(FeatureBasis::make(family, m));
  const FeatureBasis& basis = sampler.basis();

  struct Pair {
    double dpp;
    double iid;
  };
  const auto draws = parallel_map<Pair>(replicates, workers, [&](std::size_t r) {
    RngStream rng_dpp(replicate_seed(seed, kTagConjecture, m, m, Scheme::Dpp, r));
    RngStream rng_iid(replicate_seed(seed, kTagConjecture, m, m, Scheme::IidChristoffel, r));
    const DesignSample z = sampler.sample_dpp(rng_dpp);
    const DesignSample y = sampler.sample_iid(WeightFunction::christoffel(), m, rng_iid);
    return Pair{inverse_lambda_min(z, basis), inverse_lambda_min(y, basis)};
  });

  ConjectureReport report;
  report.replicates = replicates;
  report.seed = seed;
  const double rd = static_cast<double>(replicates);
  for (double t : t_grid) {
    std::size_t dpp_hits = 0, iid_hits = 0;
    for (const auto& p : draws) {
      if (p.dpp > t) ++dpp_hits;
      if (p.iid > t) ++iid_hits;
    }
    ConjectureRow row;
    row.m = m;
    row.t = t;
    row.dpp_tail = static_cast<double>(dpp_hits) / rd;
    row.iid_tail = static_cast<double>(iid_hits) / rd;
    row.sigma = std::sqrt((row.dpp_tail * (1.0 - row.dpp_tail) +
                           row.iid_tail * (1.0 - row.iid_tail)) / rd);
    row.row_consistent = row.dpp_tail <= row.iid_tail + 3.0 * row.sigma;
    report.consistent = report.consistent && row.row_consistent;
    report.rows.push_back(row);
  }
  return report;
}

void write_conjecture_csv(std::ostream& out, const ConjectureReport& report) {
  CsvWriter csv(out);
  csv.header({"m", "t", "dpp_tail", "iid_tail", "sigma", "row_consistent", "verdict", "replicates",
              "seed"});
  for (const auto& r : report.rows) {
    csv << std::uint64_t{r.m} << r.t << r.dpp_tail << r.iid_tail << r.sigma
        << (r.row_consistent ? "1" : "0") << (report.consistent ? "CONSISTENT" : "VIOLATION")
        << std::uint64_t{report.replicates} << report.seed;
    csv.end_row();
  }
}

// ---------------------------------------------------------------------------

DesignSample dump_design(Scheme scheme, BasisFamily family, std::size_t m, std::size_t n,
                         std::uint64_t seed, double alpha, double delta) {
  if (n == 0) fail(ErrorKind::EmptyDesign, "design needs n >= 1");
  if (scheme == Scheme::Volume && n < m)
    fail(ErrorKind::UnderdeterminedDesign, "volume sampling needs n >= m");
  const DesignSampler sampler(FeatureBasis::make(family, m));
  RngStream rng(seed);
  return draw_design(sampler, scheme, n, rng, alpha, delta);
}

void write_design_csv(std::ostream& out, const DesignSample& design) {
  CsvWriter csv(out);
  csv.header({"index", "x", "w"});
  for (std::size_t i = 0; i < design.size(); ++i) {
    csv << std::uint64_t{i} << design.points[i] << design.weights[i];
    csv.end_row();
  }
}

DesignSample read_design_csv(std::istream& in) {
  DesignSample design;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) fail(ErrorKind::Validation, "design row needs 3 fields: " + line);
    design.points.push_back(std::strtod(fields[1].c_str(), nullptr));
    design.weights.push_back(std::strtod(fields[2].c_str(), nullptr));
  }
  return design;
}

// ---------------------------------------------------------------------------

void write_bounds_csv(std::ostream& out, const BoundsQuery& q) {
  const ChernoffConstants c = chernoff_constants(q.delta);
  const FeatureBasis basis = FeatureBasis::make(q.family, q.m);
  const WeightFunction w =
      q.alpha < 1.0 ? WeightFunction::mixture(q.alpha) : WeightFunction::christoffel();

  CsvWriter csv(out);
  csv.header({"quantity", "value", "note"});
  auto row = [&](const char* name, auto value, const char* note) {
    csv << name << value << note;
    csv.end_row();
  };
  row("delta", q.delta, "");
  row("c_delta", c.c_delta, "delta + (1-delta) ln(1-delta)");
  row("d_delta", c.d_delta, "-delta + (1+delta) ln(1+delta)");
  row("iid_sample_size", iid_sample_size(q.m, q.delta, q.eta, q.alpha),
      "ceil(m ln(m/eta) / (alpha c_delta))");
  row("volume_sample_size", volume_sample_size(q.m, q.delta, q.eta, q.alpha),
      "m + iid_sample_size");
  row("k_constant_unit", k_constant(basis, WeightFunction::unit(), q.grid),
      "grid lower bound of sup |phi|^2 over the effective support");
  row("k_constant_weighted", k_constant(basis, w, q.grid), "grid lower bound of sup |phi|^2 / w");
  if (q.n >= q.m) {
    const TheoryBound iid = theory_bound(BoundScheme::IidOptimal, q.m, q.n, q.delta, q.eta, q.alpha);
    const TheoryBound vs =
        theory_bound(BoundScheme::VolumeSampling, q.m, q.n, q.delta, q.eta, q.alpha);
    const TheoryBound rep = theory_bound(BoundScheme::RepeatedDpp, q.m, q.n, q.delta, q.eta, q.alpha);
    row("beta", vs.beta, "1 + (1/alpha - 1) m / n");
    row("iid_failure_bound", iid.predicted_failure_prob, "m exp(-c_delta n alpha / m); raw, may exceed 1");
    row("volume_failure_bound", vs.predicted_failure_prob,
        "m exp(-c_delta (n-m) alpha / m) for lambda_min < (1-delta)(n-m)/n; raw");
    row("repeated_dpp_failure_bound", rep.predicted_failure_prob,
        "m exp(-c_delta n / m); CONJECTURE-DEPENDENT");
    const double md = static_cast<double>(q.m), nd = static_cast<double>(q.n);
    row("iid_quasi_optimality_constant", 1.0 + 1.0 / ((1.0 - q.eta) * (1.0 - q.delta)),
        "1 + (1-eta)^-1 (1-delta)^-1");
    if (q.n > q.m)
      row("volume_quasi_optimality_constant",
          1.0 + vs.beta / ((1.0 - q.eta) * (1.0 - q.delta) * (1.0 - md / nd)),
          "1 + (1-eta)^-1 (1-delta)^-1 (1-m/n)^-1 beta");
  }
}

}  // namespace dppls
