// Command-line front end for the sampling experiments.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "dppls/bounds.hpp"
#include "dppls/error.hpp"
#include "dppls/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct CommonOptions {
  std::string basis = "hermite";
  std::vector<std::string> schemes;
  std::vector<std::size_t> m;
  std::vector<std::size_t> n;
  std::vector<double> n_mult;
  double alpha = 1.0;
  double delta = 0.75;
  std::size_t replicates = 100;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t workers = 1;
  std::string target = "inv-quadratic";
  std::size_t max_attempts = dppls::kDefaultMaxAttempts;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool multi) {
  cmd->add_option("--basis", o.basis, "legendre | hermite | pwc")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "mixture weight of the Christoffel density")
      ->capture_default_str();
  cmd->add_option("--delta", o.delta, "stability level, event lambda_min >= 1 - delta")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
  cmd->add_option("--out", o.out, "output CSV path (stdout when omitted)");
  if (!multi) return;
  cmd->add_option("--scheme", o.schemes,
                  "iid-mu | iid-christoffel | volume | repeated-dpp | repeated-dpp-cond")
      ->delimiter(',');
  cmd->add_option("--m", o.m, "dimensions")->delimiter(',');
  auto* n = cmd->add_option("--n", o.n, "absolute sample sizes")->delimiter(',');
  auto* k = cmd->add_option("--n-mult", o.n_mult, "sample sizes as multiples of m")->delimiter(',');
  n->excludes(k);
  cmd->add_option("--replicates", o.replicates, "Monte Carlo replicates per cell")
      ->capture_default_str();
  cmd->add_option("--workers", o.workers, "worker threads")->capture_default_str();
  cmd->add_option("--target", o.target, "inv-quadratic | exp | sin3")->capture_default_str();
  cmd->add_option("--max-attempts", o.max_attempts, "redraw budget of conditioned sampling")
      ->capture_default_str();
}

dppls::ExperimentConfig make_config(const CommonOptions& o,
                                    const std::vector<std::string>& default_schemes,
                                    const std::vector<double>& default_mult) {
  dppls::ExperimentConfig c;
  c.family = dppls::parse_basis_family(o.basis);
  for (const auto& s : o.schemes.empty() ? default_schemes : o.schemes)
    c.schemes.push_back(dppls::parse_scheme(s));
  c.m_values = o.m.empty() ? std::vector<std::size_t>{10, 20, 30, 40, 50} : o.m;
  c.n_values = o.n;
  c.n_multiples = o.n.empty() && o.n_mult.empty() ? default_mult : o.n_mult;
  c.alpha = o.alpha;
  c.delta = o.delta;
  c.replicates = o.replicates;
  c.seed = o.seed;
  c.target = o.target;
  c.workers = o.workers;
  c.max_attempts = o.max_attempts;
  return c;
}

// Output is buffered so a failing run leaves no partial file behind.
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) dppls::fail(dppls::ErrorKind::Validation, "cannot open output file " + path);
  f << text;
  if (!f.flush()) dppls::fail(dppls::ErrorKind::Numeric, "write failed: " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-squares sampling experiments: DPP, volume and i.i.d. designs"};
  app.require_subcommand(1);

  CommonOptions stab, err, hist, conj, dump, bnd;

  auto* c_stab = app.add_subcommand("stability-map", "fraction of designs with lambda_min >= 1 - delta");
  add_common(c_stab, stab, true);

  auto* c_err = app.add_subcommand("error-table", "RMS and 95% quantile of the relative L2 error");
  add_common(c_err, err, true);

  auto* c_hist = app.add_subcommand("error-hist", "relative L2 error of every replicate");
  add_common(c_hist, hist, true);

  auto* c_conj = app.add_subcommand("conjecture-check", "DPP vs i.i.d. tails of 1 / lambda_min");
  add_common(c_conj, conj, false);
  std::size_t conj_m = 5;
  std::size_t conj_reps = 10000;
  std::size_t conj_workers = 1;
  std::vector<double> t_grid{1.25, 1.5, 2.0, 4.0, 8.0};
  c_conj->add_option("--m", conj_m, "dimension (at most 12)")->capture_default_str();
  c_conj->add_option("--replicates", conj_reps, "draws per law")->capture_default_str();
  c_conj->add_option("--workers", conj_workers, "worker threads")->capture_default_str();
  c_conj->add_option("--t", t_grid, "thresholds")->delimiter(',');
  conj.basis = "legendre";

  auto* c_dump = app.add_subcommand("dump-design", "write one design as index,x,w");
  add_common(c_dump, dump, false);
  std::string dump_scheme = "repeated-dpp";
  std::size_t dump_m = 10;
  std::size_t dump_n = 20;
  c_dump->add_option("--scheme", dump_scheme, "sampling scheme")->capture_default_str();
  c_dump->add_option("--m", dump_m, "dimension")->capture_default_str();
  c_dump->add_option("--n", dump_n, "number of points")->capture_default_str();
  // Accepted for a uniform interface; a single design is drawn serially.
  std::size_t dump_workers = 1;
  c_dump->add_option("--workers", dump_workers, "ignored");

  auto* c_bnd = app.add_subcommand("bounds", "closed-form sample sizes and failure bounds");
  add_common(c_bnd, bnd, false);
  dppls::BoundsQuery query;
  c_bnd->add_option("--m", query.m, "dimension")->capture_default_str();
  c_bnd->add_option("--n", query.n, "number of points")->capture_default_str();
  c_bnd->add_option("--eta", query.eta, "failure probability target")->capture_default_str();
  c_bnd->add_option("--grid", query.grid, "grid size for the sup estimate")->capture_default_str();
  std::size_t bnd_workers = 1;
  c_bnd->add_option("--workers", bnd_workers, "ignored");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  const std::vector<std::string> all_schemes{"iid-mu", "iid-christoffel", "volume", "repeated-dpp",
                                             "repeated-dpp-cond"};
  try {
    std::ostringstream out;
    std::string path;
    if (c_stab->parsed()) {
      const auto cfg = make_config(
          stab, {"iid-mu", "iid-christoffel", "volume", "repeated-dpp"},
          {1.0, 1.5, 2.0, 3.0, 5.0, 10.0});
      dppls::write_stability_csv(out, dppls::stability_map(cfg));
      path = stab.out;
    } else if (c_err->parsed()) {
      const auto cfg = make_config(err, all_schemes, {2.0, 5.0, 10.0});
      dppls::write_error_table_csv(out, dppls::error_table(cfg));
      path = err.out;
    } else if (c_hist->parsed()) {
      const auto cfg = make_config(hist, all_schemes, {2.0, 5.0, 10.0});
      dppls::write_error_histogram_csv(out, dppls::error_samples(cfg));
      path = hist.out;
    } else if (c_conj->parsed()) {
      const auto report = dppls::conjecture_check(dppls::parse_basis_family(conj.basis), conj_m,
                                                  t_grid, conj_reps, conj.seed, conj_workers);
      dppls::write_conjecture_csv(out, report);
      std::cerr << (report.consistent ? "CONSISTENT" : "VIOLATION") << '\n';
      path = conj.out;
    } else if (c_dump->parsed()) {
      const auto design =
          dppls::dump_design(dppls::parse_scheme(dump_scheme), dppls::parse_basis_family(dump.basis),
                             dump_m, dump_n, dump.seed, dump.alpha, dump.delta);
      dppls::write_design_csv(out, design);
      path = dump.out;
    } else if (c_bnd->parsed()) {
      query.family = dppls::parse_basis_family(bnd.basis);
      query.delta = bnd.delta;
      query.alpha = bnd.alpha;
      dppls::write_bounds_csv(out, query);
      path = bnd.out;
    }
    emit(path, out.str());
  } catch (const dppls::Error& e) {
    std::cerr << "dppls: " << e.what() << '\n';
    return e.is_validation() ? kExitValidation : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "dppls: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}
