#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dppls/error.hpp"
#include "dppls/lsq.hpp"
#include "dppls/sampler.hpp"
#include "oracles.hpp"

using namespace dppls;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Validation;
}

oracle::CdfTable legendre_nu(int m) {
  return oracle::CdfTable([m](double x) { return oracle::legendre_christoffel_pdf(m, x); }, -1.0,
                          1.0);
}

double uniform_cdf(double x) { return std::clamp(0.5 * (x + 1.0), 0.0, 1.0); }

const double kCrit4 = oracle::ks_critical(10000, 1e-3);

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (auto s : {Scheme::IidMu, Scheme::IidChristoffel, Scheme::Volume, Scheme::RepeatedDpp,
                 Scheme::RepeatedDppConditioned, Scheme::Dpp})
    CHECK(parse_scheme(to_string(s)) == s);
  CHECK(parse_scheme("volume-rescaled") == Scheme::Volume);
  CHECK(kind_of([] { parse_scheme("mcmc"); }) == ErrorKind::Validation);
}

TEST_CASE("weight functions") {
  const auto b = FeatureBasis::legendre(3);
  CHECK(WeightFunction::unit()(b, 0.4) == 1.0);
  CHECK(WeightFunction::christoffel()(b, 0.4) == b.christoffel_density(0.4));
  CHECK(WeightFunction::mixture(0.25)(b, 0.4) ==
        doctest::Approx(0.25 * b.christoffel_density(0.4) + 0.75));
  CHECK(kind_of([] { WeightFunction::mixture(0.0); }) == ErrorKind::Validation);
  CHECK(kind_of([] { WeightFunction::mixture(1.5); }) == ErrorKind::Validation);
  const DesignSampler s(b);
  CHECK_NOTHROW(s.validate_weight(WeightFunction::mixture(0.3)));
  // A hook that is not a density fails the mass check.
  DensityHook bad{"twice", [](double) { return 2.0; }, [](RngStream& r) { return r.uniform(); }};
  CHECK(kind_of([&] { s.validate_weight(WeightFunction::mixture(0.5, bad)); }) ==
        ErrorKind::NotADensity);
}

TEST_CASE("christoffel sampling: constant basis gives mu") {
  const DesignSampler s(FeatureBasis::legendre(1));
  RngStream rng(1);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = s.sample_christoffel(rng);
  CHECK(oracle::ks_statistic(xs, uniform_cdf) < 0.02);
}

TEST_CASE("christoffel sampling: Legendre m = 5 against the quadrature cdf") {
  const DesignSampler s(FeatureBasis::legendre(5));
  const auto cdf = legendre_nu(5);
  RngStream rng(2);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = s.sample_christoffel(rng);
  CHECK(oracle::ks_statistic(xs, cdf) < 0.02);
}

TEST_CASE("christoffel sampling: Hermite m = 8 against the quadrature cdf") {
  const DesignSampler s(FeatureBasis::hermite(8));
  const double r = s.basis().measure().support().hi;
  const oracle::CdfTable cdf([](double x) { return oracle::hermite_christoffel_pdf(8, x); }, -r, r);
  RngStream rng(3);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = s.sample_christoffel(rng);
  CHECK(oracle::ks_statistic(xs, cdf) < kCrit4);
}

TEST_CASE("christoffel sampling: piecewise constant is flat") {
  const DesignSampler s(FeatureBasis::piecewise_constant(4));
  RngStream rng(4);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = s.sample_christoffel(rng);
  CHECK(oracle::ks_statistic(xs, [](double x) { return std::clamp(x, 0.0, 1.0); }) < 0.02);
}

TEST_CASE("dpp: piecewise constant puts one point per cell") {
  const DesignSampler s(FeatureBasis::piecewise_constant(4));
  RngStream rng(5);
  for (int t = 0; t < 1000; ++t) {
    const auto d = s.sample_dpp(rng);
    REQUIRE(d.size() == 4);
    std::vector<int> hit(4, 0);
    for (double x : d.points) ++hit[s.basis().cell_index(x)];
    CHECK(hit == std::vector<int>{1, 1, 1, 1});
    CHECK(empirical_gram(d, s.basis()).matrix.isIdentity(0.0));
  }
}

TEST_CASE("dpp: m = 1 is a single draw from nu_1") {
  const DesignSampler s(FeatureBasis::hermite(1));
  RngStream rng(6);
  std::vector<double> xs(10000);
  for (auto& x : xs) {
    const auto d = s.sample_dpp(rng);
    REQUIRE(d.size() == 1);
    x = d.points[0];
  }
  CHECK(oracle::ks_statistic(xs, oracle::gaussian_cdf) < kCrit4);
}

TEST_CASE("dpp: first coordinate of Legendre m = 3 follows nu_m") {
  const DesignSampler s(FeatureBasis::legendre(3));
  const auto cdf = legendre_nu(3);
  RngStream rng(7);
  std::vector<double> first(10000), last(10000);
  for (std::size_t i = 0; i < first.size(); ++i) {
    const auto d = s.sample_dpp(rng);
    first[i] = d.points.front();
    last[i] = d.points.back();
  }
  CHECK(oracle::ks_statistic(first, cdf) < 0.02);
  // Every coordinate has the same marginal.
  CHECK(oracle::ks_statistic(last, cdf) < 0.02);
}

TEST_CASE("dpp: pooled marginals for each family") {
  struct Case {
    BasisFamily fam;
    int m;
  };
  for (const auto c : {Case{BasisFamily::Legendre, 8}, Case{BasisFamily::Hermite, 6},
                       Case{BasisFamily::PiecewiseConstant, 8}}) {
    const DesignSampler s(FeatureBasis::make(c.fam, c.m));
    const Interval sup = s.basis().measure().support();
    std::function<double(double)> pdf;
    if (c.fam == BasisFamily::Legendre)
      pdf = [m = c.m](double x) { return oracle::legendre_christoffel_pdf(m, x); };
    else if (c.fam == BasisFamily::Hermite)
      pdf = [m = c.m](double x) { return oracle::hermite_christoffel_pdf(m, x); };
    else
      pdf = [](double) { return 1.0; };
    const oracle::CdfTable cdf(pdf, sup.lo, sup.hi);
    RngStream rng(8);
    std::vector<double> pooled;
    const std::size_t draws = 10000 / c.m;
    for (std::size_t i = 0; i < draws; ++i) {
      const auto d = s.sample_dpp(rng);
      pooled.insert(pooled.end(), d.points.begin(), d.points.end());
    }
    INFO(to_string(c.fam));
    CHECK(oracle::ks_statistic(pooled, cdf) < oracle::ks_critical(pooled.size(), 1e-3));
  }
}

TEST_CASE("dpp: pairwise law of Legendre m = 2 (chi-square on 10x10 bins)") {
  // Joint density w.r.t. mu x mu is det(Phi)^2 / 2 = 3 (x - y)^2 / 2.
  const DesignSampler s(FeatureBasis::legendre(2));
  const int bins = 10;
  const auto gl = gauss_legendre_reference(6);
  std::vector<double> expected(bins * bins, 0.0);
  const double h = 2.0 / bins;
  for (int i = 0; i < bins; ++i)
    for (int j = 0; j < bins; ++j) {
      double p = 0.0;
      for (std::size_t a = 0; a < gl.nodes.size(); ++a)
        for (std::size_t b = 0; b < gl.nodes.size(); ++b) {
          const double x = -1.0 + h * (i + 0.5 + 0.5 * gl.nodes[a]);
          const double y = -1.0 + h * (j + 0.5 + 0.5 * gl.nodes[b]);
          p += gl.weights[a] * gl.weights[b] * 1.5 * (x - y) * (x - y);
        }
      expected[i * bins + j] = p * (0.5 * h) * (0.5 * h) * 0.25;
    }
  double total = 0.0;
  for (double e : expected) total += e;
  REQUIRE(total == doctest::Approx(1.0).epsilon(1e-12));

  const int n = 50000;
  std::vector<int> counts(bins * bins, 0);
  RngStream rng(9);
  for (int t = 0; t < n; ++t) {
    const auto d = s.sample_dpp(rng);
    const int i = std::min(bins - 1, static_cast<int>((d.points[0] + 1.0) / h));
    const int j = std::min(bins - 1, static_cast<int>((d.points[1] + 1.0) / h));
    ++counts[i * bins + j];
  }
  double chi2 = 0.0;
  for (int k = 0; k < bins * bins; ++k) {
    const double e = n * expected[k];
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
  }
  // 99 degrees of freedom, 0.1% upper point.
  CHECK(chi2 < 148.23);
}

TEST_CASE("volume sampling") {
  const DesignSampler s(FeatureBasis::legendre(3));
  const auto nu = legendre_nu(3);
  RngStream rng(10);

  SUBCASE("n = m matches the dpp marginal") {
    std::vector<double> xs(10000);
    for (auto& x : xs) x = s.sample_volume(WeightFunction::christoffel(), 3, rng).points[1];
    CHECK(oracle::ks_statistic(xs, nu) < 0.02);
  }
  SUBCASE("unit weight, n = 2m: marginal is the (m/n) nu_m + (1 - m/n) mu mixture") {
    std::vector<double> xs(10000), ys(10000);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto d = s.sample_volume(WeightFunction::unit(), 6, rng);
      xs[i] = d.points.front();
      ys[i] = d.points.back();
      for (std::size_t k = 0; k < d.size(); ++k) REQUIRE(d.weights[k] == 1.0);
    }
    auto mix = [&](double x) { return 0.5 * nu(x) + 0.5 * uniform_cdf(x); };
    CHECK(oracle::ks_statistic(xs, mix) < 0.02);
    // Exchangeable: first and last coordinate share the law.
    CHECK(oracle::ks_two_sample(xs, ys) < oracle::ks_critical_two_sample(10000, 10000, 1e-3));
  }
  SUBCASE("underdetermined") {
    CHECK(kind_of([&] { s.sample_volume(WeightFunction::christoffel(), 2, rng); }) ==
          ErrorKind::UnderdeterminedDesign);
  }
  SUBCASE("weights are w evaluated at the points") {
    const auto w = WeightFunction::mixture(0.4);
    const auto d = s.sample_volume(w, 11, rng);
    for (std::size_t k = 0; k < d.size(); ++k) CHECK(d.weights[k] == w(s.basis(), d.points[k]));
  }
}

TEST_CASE("repeated dpp") {
  const DesignSampler pwc(FeatureBasis::piecewise_constant(4));
  RngStream rng(11);
  const auto d = pwc.sample_repeated_dpp(8, rng);
  REQUIRE(d.size() == 8);
  for (int block = 0; block < 2; ++block) {
    std::vector<int> hit(4, 0);
    for (int i = 0; i < 4; ++i) ++hit[pwc.basis().cell_index(d.points[block * 4 + i])];
    CHECK(hit == std::vector<int>{1, 1, 1, 1});
  }
  const auto e = pwc.sample_repeated_dpp(5, rng);
  CHECK(e.size() == 5);
  CHECK(e.attempts == 1);

  // n = m has the dpp law.
  const DesignSampler leg(FeatureBasis::legendre(3));
  RngStream a(12), b(13);
  std::vector<double> xs(5000), ys(5000);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = leg.sample_repeated_dpp(3, a).points[2];
    ys[i] = leg.sample_dpp(b).points[2];
  }
  CHECK(oracle::ks_two_sample(xs, ys) < oracle::ks_critical_two_sample(5000, 5000, 1e-3));
}

TEST_CASE("conditioned sampling") {
  const DesignSampler pwc(FeatureBasis::piecewise_constant(4));
  RngStream rng(14);
  const auto d = sample_conditioned([&](RngStream& r) { return pwc.sample_dpp(r); }, pwc.basis(),
                                    0.1, 10, rng);
  CHECK(d.attempts == 1);

  const DesignSampler her(FeatureBasis::hermite(10));
  double attempts = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto c = draw_design(her, Scheme::RepeatedDppConditioned, 20, rng);
    REQUIRE(empirical_gram(c, her.basis()).lambda_min >= 0.25);
    attempts += static_cast<double>(c.attempts);
  }
  CHECK(attempts / 100.0 < 10.0);

  try {
    sample_conditioned([&](RngStream& r) { return pwc.sample_dpp(r); }, pwc.basis(), 0.5, 0, rng);
    FAIL("no exception");
  } catch (const ConditioningError& e) {
    CHECK(e.kind() == ErrorKind::ConditioningFailure);
  }
  // An unreachable event exhausts the budget and reports the best level seen.
  const DesignSampler leg(FeatureBasis::legendre(5));
  try {
    sample_conditioned([&](RngStream& r) { return leg.sample_iid(WeightFunction::unit(), 5, r); },
                       leg.basis(), 1e-9, 5, rng);
    FAIL("no exception");
  } catch (const ConditioningError& e) {
    CHECK(e.best_lambda_min() < 1.0);
    CHECK(e.best_lambda_min() > -1.0);
  }
  CHECK(kind_of([&] {
          sample_conditioned([&](RngStream& r) { return pwc.sample_dpp(r); }, pwc.basis(), 1.0, 5,
                             rng);
        }) == ErrorKind::Domain);
}

TEST_CASE("mixture sampling") {
  const DesignSampler s(FeatureBasis::legendre(4));
  SUBCASE("alpha = 1 is christoffel sampling") {
    RngStream a(15), b(15);
    for (int i = 0; i < 100; ++i)
      CHECK(s.sample_mixture_point(WeightFunction::mixture(1.0), a) == s.sample_christoffel(b));
  }
  SUBCASE("tiny alpha is mu") {
    RngStream rng(16);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = s.sample_mixture_point(WeightFunction::mixture(1e-9), rng);
    CHECK(oracle::ks_statistic(xs, uniform_cdf) < 0.02);
  }
  SUBCASE("alpha = 1/2 is the even mixture") {
    const auto nu = legendre_nu(4);
    RngStream rng(17);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = s.sample_mixture_point(WeightFunction::mixture(0.5), rng);
    CHECK(oracle::ks_statistic(xs, [&](double x) { return 0.5 * nu(x) + 0.5 * uniform_cdf(x); }) <
          0.02);
  }
  SUBCASE("custom hook") {
    // h(x) = 3x^2 / ... on U(-1, 1): density 1.5 x^2 * 2 = 3x^2 w.r.t. mu.
    DensityHook hook{"cubic", [](double x) { return 3.0 * x * x; }, [](RngStream& r) {
                       const double u = r.uniform();
                       return std::cbrt(2.0 * u - 1.0);
                     }};
    const auto w = WeightFunction::mixture(0.5, hook);
    CHECK(w.has_custom_hook());
    CHECK_NOTHROW(s.validate_weight(w));
    RngStream rng(18);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = s.sample_mixture_point(w, rng);
    const auto nu = legendre_nu(4);
    CHECK(oracle::ks_statistic(xs, [&](double x) {
            return 0.5 * nu(x) + 0.5 * (x * x * x + 1.0) / 2.0;
          }) < 0.02);
  }
  SUBCASE("non-mixture weight is rejected") {
    RngStream rng(19);
    CHECK(kind_of([&] { s.sample_mixture_point(WeightFunction::unit(), rng); }) ==
          ErrorKind::Validation);
  }
}

TEST_CASE("designs regenerate bit-identically from the seed") {
  const DesignSampler s(FeatureBasis::hermite(6));
  for (auto scheme : {Scheme::IidMu, Scheme::IidChristoffel, Scheme::Volume, Scheme::RepeatedDpp,
                      Scheme::RepeatedDppConditioned}) {
    RngStream a(20), b(20);
    const auto x = draw_design(s, scheme, 13, a);
    const auto y = draw_design(s, scheme, 13, b);
    CHECK(x.points == y.points);
    CHECK(x.weights == y.weights);
    CHECK(x.seed == 20);
    CHECK(x.sampler_id == to_string(scheme));
  }
}

TEST_CASE("empty designs are rejected") {
  const DesignSampler s(FeatureBasis::legendre(2));
  RngStream rng(21);
  CHECK(kind_of([&] { s.sample_iid(WeightFunction::unit(), 0, rng); }) == ErrorKind::EmptyDesign);
  CHECK(kind_of([&] { s.sample_repeated_dpp(0, rng); }) == ErrorKind::EmptyDesign);
}
