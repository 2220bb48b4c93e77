#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "dppls/error.hpp"
#include "dppls/measure.hpp"
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

const auto kUniform = ReferenceMeasure::uniform(-1.0, 1.0);
const auto kGauss = ReferenceMeasure::standard_gaussian();

}  // namespace

TEST_CASE("density values") {
  CHECK(kUniform.density(0.0) == doctest::Approx(0.5));
  CHECK(kGauss.density(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * oracle::kPi)).epsilon(1e-15));
  CHECK(kUniform.density(2.0) == 0.0);
  CHECK(ReferenceMeasure::uniform(0.0, 4.0).density(1.0) == doctest::Approx(0.25));
}

TEST_CASE("cdf values") {
  CHECK(kUniform.cdf(0.0) == doctest::Approx(0.5));
  CHECK(kUniform.cdf(-3.0) == 0.0);
  CHECK(kUniform.cdf(3.0) == 1.0);
  for (double x : {-3.0, -1.0, 0.0, 0.5, 2.5})
    CHECK(kGauss.cdf(x) == doctest::Approx(oracle::gaussian_cdf(x)).epsilon(1e-14));
}

TEST_CASE("uniform intervals must be proper") {
  CHECK(kind_of([] { ReferenceMeasure::uniform(1.0, 1.0); }) == ErrorKind::Validation);
  CHECK(kind_of([] { ReferenceMeasure::uniform(2.0, 1.0); }) == ErrorKind::Validation);
}

TEST_CASE("gaussian truncation radius follows the dimension") {
  CHECK(ReferenceMeasure::gaussian_radius_for_dimension(1) == 12.0);
  CHECK(ReferenceMeasure::gaussian_radius_for_dimension(50) ==
        doctest::Approx(std::max(12.0, std::sqrt(202.0) + 4.0)));
  CHECK(ReferenceMeasure::gaussian_radius_for_dimension(100) > 12.0);
}

TEST_CASE("sample_iid moments and determinism") {
  RngStream rng(11);
  const auto u = kUniform.sample_iid(rng, 10000);
  CHECK(std::abs(oracle::mean(u)) < 3.0 * std::sqrt(1.0 / 3.0) / 100.0);
  for (double x : u) REQUIRE(std::abs(x) <= 1.0);

  const auto g = kGauss.sample_iid(rng, 10000);
  const double sd = oracle::sample_sd(g);
  CHECK(std::abs(sd * sd - 1.0) < 0.05);

  RngStream a(5), b(5);
  CHECK(kGauss.sample_iid(a, 100) == kGauss.sample_iid(b, 100));
  CHECK(kind_of([&] { kUniform.sample_iid(rng, 0); }) == ErrorKind::EmptyDesign);
}

TEST_CASE("gaussian sampling passes KS against the exact cdf") {
  RngStream rng(12);
  const auto g = kGauss.sample_iid(rng, 10000);
  CHECK(oracle::ks_statistic(g, oracle::gaussian_cdf) < oracle::ks_critical(10000, 1e-3));
}

TEST_CASE("quadrature examples") {
  const auto one = gauss_quadrature(kGauss, 1);
  REQUIRE(one.nodes.size() == 1);
  CHECK(one.nodes[0] == 0.0);
  CHECK(one.weights[0] == 1.0);
  CHECK(gauss_quadrature(kGauss, 2).integrate([](double x) { return x * x; }) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(gauss_quadrature(kUniform, 2).integrate([](double x) { return x * x; }) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("quadrature weights are a probability vector") {
  for (std::size_t q : {1u, 2u, 3u, 7u, 16u, 40u, 101u, 512u, 1024u}) {
    for (const auto& mu : {kUniform, kGauss, ReferenceMeasure::uniform(0.0, 1.0)}) {
      const auto r = gauss_quadrature(mu, q);
      double s = 0.0;
      for (double w : r.weights) {
        REQUIRE(w >= 0.0);
        s += w;
      }
      CHECK(std::abs(s - 1.0) < 1e-12);
      CHECK(r.order == q);
      CHECK(std::is_sorted(r.nodes.begin(), r.nodes.end()));
    }
  }
}

TEST_CASE("quadrature is exact on monomials up to degree 2q-1") {
  // Roundoff is judged against the magnitude of the summed terms.
  auto check = [](const QuadratureRule& r, int k, double exact) {
    auto mono = [k](double x) { return std::pow(x, k); };
    const double scale = r.integrate([&](double x) { return std::abs(mono(x)); });
    CHECK(std::abs(r.integrate(mono) - exact) <= 1e-12 * std::max(1.0, scale));
  };
  for (std::size_t q = 1; q <= 20; ++q) {
    const auto rg = gauss_quadrature(kGauss, q);
    const auto ru = gauss_quadrature(ReferenceMeasure::uniform(-0.5, 2.0), q);
    for (int k = 0; k <= static_cast<int>(2 * q - 1); ++k) {
      check(rg, k, oracle::gaussian_moment(k));
      check(ru, k, oracle::uniform_moment(k, -0.5, 2.0));
    }
  }
}

TEST_CASE("reference Gauss-Legendre rule on [-1, 1]") {
  const auto r = gauss_legendre_reference(5);
  double s = 0.0, s4 = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    s += r.weights[i];
    s4 += r.weights[i] * std::pow(r.nodes[i], 4);
  }
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s4 == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("quadrature order limits") {
  CHECK(kind_of([] { gauss_quadrature(kGauss, 0); }) == ErrorKind::UnsupportedOrder);
  CHECK(kind_of([] { gauss_quadrature(kGauss, 65, 64); }) == ErrorKind::UnsupportedOrder);
  CHECK(kind_of([] {
          gauss_quadrature(kGauss, default_max_quadrature_order() + 1);
        }) == ErrorKind::UnsupportedOrder);
}

TEST_CASE("environment overrides the quadrature cap") {
  ::setenv("DPPLS_MAX_QUAD_ORDER", "8", 1);
  CHECK(default_max_quadrature_order() == 8);
  CHECK(kind_of([] { gauss_quadrature(kGauss, 9); }) == ErrorKind::UnsupportedOrder);
  CHECK_NOTHROW(gauss_quadrature(kGauss, 8));
  ::setenv("DPPLS_MAX_QUAD_ORDER", "junk", 1);
  CHECK(default_max_quadrature_order() == 2048);
  ::unsetenv("DPPLS_MAX_QUAD_ORDER");
  CHECK(default_max_quadrature_order() == 2048);
}

TEST_CASE("density sampler: identity density") {
  const auto s = build_density_sampler([](double) { return 1.0; }, kUniform);
  RngStream rng(21);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = s.sample(rng);
  CHECK(oracle::ks_statistic(xs, [](double x) { return 0.5 * (x + 1.0); }) < 0.02);

  // Indistinguishable from direct sampling.
  RngStream rng2(22);
  const auto direct = kUniform.sample_iid(rng2, 10000);
  CHECK(oracle::ks_two_sample(xs, direct) < oracle::ks_critical_two_sample(10000, 10000, 1e-3));
}

TEST_CASE("density sampler: 3x^2 on the uniform measure") {
  const auto s = build_density_sampler([](double x) { return 3.0 * x * x; }, kUniform);
  RngStream rng(23);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = s.sample(rng);
  CHECK(oracle::ks_statistic(xs, [](double x) { return (x * x * x + 1.0) / 2.0; }) < 0.02);
  CHECK(std::abs(s.raw_mass() - 1.0) < 1e-8);
  for (double x : {-0.9, -0.3, 0.0, 0.4, 0.99})
    CHECK(s.cdf(x) == doctest::Approx((x * x * x + 1.0) / 2.0).epsilon(1e-6));
}

TEST_CASE("density sampler: x^2 on the Gaussian measure") {
  const auto s = build_density_sampler([](double x) { return x * x; }, kGauss);
  RngStream rng(24);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = s.sample(rng);
  auto cdf = [](double x) { return oracle::gaussian_cdf(x) - x * oracle::gaussian_pdf(x); };
  CHECK(oracle::ks_statistic(xs, cdf) < oracle::ks_critical(10000, 1e-3));
}

TEST_CASE("density sampler cumulative table") {
  const auto s = build_density_sampler([](double x) { return 1.5 * (1.0 - x * x) * 1.0; },
                                       ReferenceMeasure::uniform(-1.0, 1.0), 1e-6);
  const auto c = s.cumulative();
  CHECK(c.front() >= 0.0);
  CHECK(c.back() == 1.0);
  CHECK(std::is_sorted(c.begin(), c.end()));
  CHECK(s.quantile(0.0) >= -1.0);
  CHECK(s.quantile(1.0) < 1.0);
  CHECK(s.quantile(0.5) == doctest::Approx(0.0).epsilon(1e-7));
  for (double u : {0.01, 0.2, 0.7, 0.999}) CHECK(s.cdf(s.quantile(u)) == doctest::Approx(u).epsilon(1e-9));
}

TEST_CASE("density sampler rejects invalid densities") {
  CHECK(kind_of([] { build_density_sampler([](double) { return -1.0; }, kUniform); }) ==
        ErrorKind::NegativeDensity);
  CHECK(kind_of([] { build_density_sampler([](double) { return 2.0; }, kUniform); }) ==
        ErrorKind::NotADensity);
  CHECK(kind_of([] { build_density_sampler([](double) { return 1.0 + 1e-5; }, kUniform); }) ==
        ErrorKind::NotADensity);
}

TEST_CASE("density sampling is a pure function of the stream") {
  const auto s = build_density_sampler([](double x) { return 3.0 * x * x; }, kUniform);
  RngStream a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(s.sample(a) == s.sample(b));
}

TEST_CASE("cell grids refine near sharp features") {
  GridOptions opt;
  opt.initial_cells = 16;
  const auto grid = CellGrid::build(
      kUniform, [](double x, std::span<double> out) { out[0] = std::exp(-200.0 * x * x) * 12.0; },
      1, opt);
  CHECK(grid->cells() > 16);
  std::vector<double> vals(grid->points().size(), 1.0);
  CHECK(grid->integrate(vals) == doctest::Approx(1.0).epsilon(1e-12));
}
