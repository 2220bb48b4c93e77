#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dppls/basis.hpp"
#include "dppls/lsq.hpp"
#include "dppls/sampler.hpp"

namespace dppls {

/// A named target function for the error experiments.
struct TargetFunction {
  std::string id;
  TargetFn evaluator;
};

/// Known ids: "inv-quadratic" (1 + 2x^2)^-1, "exp" e^x, "sin3" sin(3x).
TargetFunction target_function(const std::string& id);
std::vector<std::string> target_function_ids();

struct ExperimentConfig {
  BasisFamily family = BasisFamily::Hermite;
  std::vector<Scheme> schemes;
  std::vector<std::size_t> m_values;
  /// Absolute sample sizes; takes precedence over n_multiples when non-empty.
  std::vector<std::size_t> n_values;
  /// n = round(k m) for each k.
  std::vector<double> n_multiples;
  double alpha = 1.0;
  double delta = 0.75;
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  std::string target = "inv-quadratic";
  std::size_t workers = 1;
  std::size_t max_attempts = kDefaultMaxAttempts;
  /// Threshold grid of the conjecture check.
  std::vector<double> t_grid;
};

/// Sample sizes used for dimension m.
std::vector<std::size_t> sample_sizes(const ExperimentConfig& config, std::size_t m);

/// Throws Validation on replicates == 0, empty grids, or (m, n) pairs that
/// violate a scheme precondition.
void validate_config(const ExperimentConfig& config);

// ---------------------------------------------------------------------------

struct StabilityCell {
  std::size_t m = 0;
  std::size_t n = 0;
  Scheme scheme = Scheme::IidMu;
  double p_hat = 0.0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::size_t failures = 0;
};

/// Fraction of designs with lambda_min(G^w) >= 1 - delta per (m, n, scheme).
std::vector<StabilityCell> stability_map(const ExperimentConfig& config);
void write_stability_csv(std::ostream& out, const std::vector<StabilityCell>& cells);

/// Relative L2 errors of one (m, n, scheme) cell, in replicate order.
struct ErrorSample {
  std::size_t m = 0;
  std::size_t n = 0;
  Scheme scheme = Scheme::IidMu;
  std::vector<double> rel_errors;
  /// Singular designs, kept in rel_errors at the blow-up cap.
  std::size_t singular = 0;
  /// Replicates lost to sampler or conditioning failure (absent from rel_errors).
  std::size_t failures = 0;
  std::uint64_t seed = 0;
};

inline constexpr double kErrorCap = 1e15;

/// Relative error of every replicate of every (m, n, scheme).
std::vector<ErrorSample> error_samples(const ExperimentConfig& config);

struct ErrorRow {
  std::size_t m = 0;
  std::size_t n = 0;
  Scheme scheme = Scheme::IidMu;
  double best = 0.0;
  double rms = 0.0;
  double q95 = 0.0;
  std::size_t singular = 0;
  std::size_t failures = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
};

/// Relative best-approximation error |f - P f| / |f| (deterministic).
double best_relative_error(const FeatureBasis& basis, const TargetFn& f);

/// RMS and 95% type-7 quantile of the relative error per (m, n, scheme).
std::vector<ErrorRow> error_table(const ExperimentConfig& config);
void write_error_table_csv(std::ostream& out, const std::vector<ErrorRow>& rows);

/// One row per replicate: scheme, m, n, replicate, rel_error, log_rel_error.
void write_error_histogram_csv(std::ostream& out, const std::vector<ErrorSample>& samples);

double rms(const std::vector<double>& values);
/// Type-7 (linear interpolation) empirical quantile.
double quantile_type7(std::vector<double> values, double p);

struct ConjectureRow {
  std::size_t m = 0;
  double t = 0.0;
  double dpp_tail = 0.0;
  double iid_tail = 0.0;
  double sigma = 0.0;
  bool row_consistent = true;
};

struct ConjectureReport {
  std::vector<ConjectureRow> rows;
  bool consistent = true;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
};

/// Empirical tails of lambda_min(G^{w_m})^-1 for one DPP draw of m points
/// versus m i.i.d. points from nu_m. CONSISTENT when the DPP tail never
/// exceeds the i.i.d. tail by more than 3 sigma (sigma of the difference).
ConjectureReport conjecture_check(BasisFamily family, std::size_t m,
                                  const std::vector<double>& t_grid, std::size_t replicates,
                                  std::uint64_t seed, std::size_t workers = 1);
void write_conjecture_csv(std::ostream& out, const ConjectureReport& report);

/// One design, drawn from RngStream(seed).
DesignSample dump_design(Scheme scheme, BasisFamily family, std::size_t m, std::size_t n,
                         std::uint64_t seed, double alpha = 1.0, double delta = 0.75);
void write_design_csv(std::ostream& out, const DesignSample& design);
/// Reads index,x,w rows back (points and weights only).
DesignSample read_design_csv(std::istream& in);

struct BoundsQuery {
  BasisFamily family = BasisFamily::Hermite;
  std::size_t m = 10;
  std::size_t n = 20;
  double delta = 0.75;
  double eta = 0.5;
  double alpha = 1.0;
  std::size_t grid = 100000;
};

/// quantity,value,note rows for the closed-form calculators.
void write_bounds_csv(std::ostream& out, const BoundsQuery& query);

}  // namespace dppls
