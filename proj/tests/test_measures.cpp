#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "rmt/measures.hpp"

using namespace rmt;
using Complexd = std::complex<double>;

TEST_CASE("make_discrete accepts the MAR G measure") {
  const auto g = DiscreteMeasure::from_scalars({0.25, 0.36, 0.49},
                                               {0.2, 0.3, 0.5});
  REQUIRE(g.size() == 3);
  CHECK(g.scalar_atom(0) == 0.25);
  CHECK(g.weight(2) == doctest::Approx(0.5).epsilon(1e-12));
  double sum = 0.0;
  for (size_t j = 0; j < g.size(); ++j) sum += g.weight(j);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("make_discrete degenerate point mass") {
  const auto d = DiscreteMeasure::from_scalars({0.0}, {1.0});
  CHECK(d.size() == 1);
  CHECK(d.scalar_atom(0) == 0.0);
}

TEST_CASE("make_discrete rejects bad weights") {
  CHECK_THROWS_AS(DiscreteMeasure::from_scalars({1.0, 2.0}, {0.5, -0.1}),
                  NegativeWeight);
  CHECK_THROWS_AS(DiscreteMeasure::from_scalars({}, {}), EmptyMeasure);
  CHECK_THROWS_AS(DiscreteMeasure::from_scalars({1.0, 2.0}, {0.5, 0.2}),
                  WeightSumMismatch);
}

TEST_CASE("quantile of a point mass") {
  const auto d = DiscreteMeasure::point_mass(0.0);
  CHECK(d.quantile(0.7) == 0.0);
}

TEST_CASE("quantile enumerates CDF steps") {
  // 0.4 delta_1 + 0.6 delta_3: F(1)=0.4 < 0.5, so the 0.5-quantile is 3.
  const auto m = DiscreteMeasure::from_scalars({1.0, 3.0}, {0.4, 0.6});
  CHECK(m.quantile(0.5) == 3.0);
  CHECK(m.quantile(0.4) == 1.0);  // left-continuous inverse
  CHECK(m.quantile(0.41) == 3.0);
}

TEST_CASE("empirical quantile over a 4-sample step CDF") {
  const auto e = EmpiricalDistribution::from({4.0, 3.0, 1.0, 2.0});
  CHECK(e.quantile(0.5) == 2.0);
  CHECK(e.quantile(0.1) == 1.0);
  CHECK(e.quantile(0.9) == 4.0);
}

TEST_CASE("quantile rejects s outside (0,1)") {
  const auto m = DiscreteMeasure::point_mass(1.0);
  CHECK_THROWS_AS(m.quantile(0.0), OutOfRange);
  CHECK_THROWS_AS(m.quantile(1.0), OutOfRange);
}

TEST_CASE("integrate over atoms") {
  const auto d1 = DiscreteMeasure::point_mass(1.0);
  const auto sq = [](std::span<const double> a) {
    return Complexd{a[0] * a[0], 0.0};
  };
  CHECK(d1.integrate(sq).real() == doctest::Approx(1.0));

  const auto half = DiscreteMeasure::from_scalars({0.0, 2.0}, {0.5, 0.5});
  CHECK(half.mean() == doctest::Approx(1.0));

  const auto g = DiscreteMeasure::from_scalars({0.25, 0.36, 0.49},
                                               {0.2, 0.3, 0.5});
  CHECK(g.mean() == doctest::Approx(0.403).epsilon(1e-12));
}

TEST_CASE("integrate rejects non-finite integrands") {
  const auto d = DiscreteMeasure::point_mass(0.0);
  CHECK_THROWS_AS(
      d.integrate([](std::span<const double> a) {
        return Complexd{1.0 / a[0], 0.0};
      }),
      NonFiniteIntegrand);
}

TEST_CASE("uniform discretization uses midpoints") {
  const auto u2 = DiscreteMeasure::uniform01(2);
  REQUIRE(u2.size() == 2);
  CHECK(u2.scalar_atom(0) == doctest::Approx(0.25));
  CHECK(u2.scalar_atom(1) == doctest::Approx(0.75));
  CHECK(u2.weight(0) == doctest::Approx(0.5));

  const auto u4 = DiscreteMeasure::uniform01(4);
  CHECK(u4.scalar_atom(0) == doctest::Approx(0.125));
  CHECK(u4.scalar_atom(3) == doctest::Approx(0.875));

  // midpoint rule is exact for linear integrands
  CHECK(DiscreteMeasure::uniform01(1000).mean() ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("kolmogorov distance on step functions") {
  const auto a = Cdf::from_empirical(EmpiricalDistribution::from({1.0, 2.0}));
  CHECK(kolmogorov_distance(a, a) == doctest::Approx(0.0));

  const auto z = Cdf::from_empirical(EmpiricalDistribution::from({0.0}));
  const auto o = Cdf::from_empirical(EmpiricalDistribution::from({1.0}));
  CHECK(kolmogorov_distance(z, o) == doctest::Approx(1.0));

  const auto s2 = Cdf::from_empirical(EmpiricalDistribution::from({0.0, 1.0}));
  const auto s3 =
      Cdf::from_empirical(EmpiricalDistribution::from({0.0, 1.0, 2.0}));
  CHECK(kolmogorov_distance(s2, s3) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("wasserstein1 on step functions") {
  const auto z = Cdf::from_empirical(EmpiricalDistribution::from({0.0}));
  const auto o = Cdf::from_empirical(EmpiricalDistribution::from({1.0}));
  CHECK(wasserstein1(z, z) == doctest::Approx(0.0));
  CHECK(wasserstein1(z, o) == doctest::Approx(1.0));

  const auto a = Cdf::from_empirical(EmpiricalDistribution::from({0.0, 2.0}));
  const auto b = Cdf::from_empirical(EmpiricalDistribution::from({1.0, 1.0}));
  CHECK(wasserstein1(a, b) == doctest::Approx(1.0));
}

TEST_CASE("cdf is a right-continuous step function with limits 0 and 1") {
  const auto m = DiscreteMeasure::from_scalars({1.0, 3.0}, {0.4, 0.6});
  const auto F = Cdf::from_discrete(m);
  CHECK(F.eval(0.5) == doctest::Approx(0.0));
  CHECK(F.eval(1.0) == doctest::Approx(0.4));
  CHECK(F.eval_left(1.0) == doctest::Approx(0.0));
  CHECK(F.eval(2.0) == doctest::Approx(0.4));
  CHECK(F.eval(3.0) == doctest::Approx(1.0));
  CHECK(F.eval(10.0) == doctest::Approx(1.0));
  double prev = -1.0;
  for (double x = -1.0; x < 5.0; x += 0.01) {
    const double v = F.eval(x);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("quantile/CDF roundtrip inside plateaus") {
  const auto m =
      DiscreteMeasure::from_scalars({-1.0, 0.5, 2.0}, {0.25, 0.25, 0.5});
  // plateau interiors: (0,0.25), (0.25,0.5), (0.5,1)
  CHECK(m.quantile(0.1) == -1.0);
  CHECK(m.quantile(0.3) == 0.5);
  CHECK(m.quantile(0.8) == 2.0);
}

TEST_CASE("integrate is linear on random triples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> atoms(5), weights(5, 0.2);
    for (auto& a : atoms) a = u(rng);
    const auto m = DiscreteMeasure::from_scalars(atoms, weights);
    const double alpha = u(rng);
    const auto phi = [](std::span<const double> a) {
      return Complexd{a[0] * a[0], a[0]};
    };
    const auto psi = [](std::span<const double> a) {
      return Complexd{std::cos(a[0]), 0.0};
    };
    const Complexd lhs = m.integrate([&](std::span<const double> a) {
      return alpha * phi(a) + psi(a);
    });
    const Complexd rhs = alpha * m.integrate(phi) + m.integrate(psi);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("metrics are symmetric and vanish only on equal step functions") {
  const auto a = Cdf::from_empirical(EmpiricalDistribution::from({0.0, 1.5}));
  const auto b = Cdf::from_empirical(EmpiricalDistribution::from({0.5, 1.5}));
  CHECK(kolmogorov_distance(a, b) == doctest::Approx(kolmogorov_distance(b, a)));
  CHECK(wasserstein1(a, b) == doctest::Approx(wasserstein1(b, a)));
  CHECK(kolmogorov_distance(a, b) > 0.0);
  CHECK(wasserstein1(a, b) > 0.0);
}

TEST_CASE("quantile function tabulation") {
  const auto m = DiscreteMeasure::from_scalars({1.0, 3.0}, {0.4, 0.6});
  const auto q = QuantileFunction::tabulate(m, 10);
  REQUIRE(q.values.size() == 10);
  // midpoints 0.05..0.35 map to 1, the rest to 3
  CHECK(q.values.front() == 1.0);
  CHECK(q.values.back() == 3.0);
  CHECK(q.quantile(0.05) == 1.0);
  CHECK(q.quantile(0.95) == 3.0);
}
