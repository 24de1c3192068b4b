#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rmt/kernel.hpp"

using namespace rmt;

namespace {

const LinkFn product = [](std::span<const double> a,
                          std::span<const double> b) { return a[0] * b[0]; };

// Root of c z m^2 + (z + c - 1) m + 1 = 0 in the upper half-plane.
Complex mp_root(Complex z, double c) {
  const Complex a = c * z, b = z + c - 1.0;
  const Complex disc = std::sqrt(b * b - 4.0 * a);
  const Complex r1 = (-b + disc) / (2.0 * a);
  const Complex r2 = (-b - disc) / (2.0 * a);
  return r1.imag() > 0.0 ? r1 : r2;
}

// Root of z K^2 + (z + 1 - c) K + 1 = 0 with Im K >= 0 (scalar kernel for
// the unit separable model).
Complex k_root(Complex z, double c) {
  const Complex b = z + 1.0 - c;
  const Complex disc = std::sqrt(b * b - 4.0 * z);
  const Complex r1 = (-b + disc) / (2.0 * z);
  const Complex r2 = (-b - disc) / (2.0 * z);
  return r1.imag() >= r2.imag() ? r1 : r2;
}

}  // namespace

TEST_CASE("master solver: G = delta_0 gives the degenerate law") {
  const auto G = DiscreteMeasure::point_mass(0.0);
  const auto H = DiscreteMeasure::point_mass(1.0);
  const auto grid = ZGrid::linspace(0.0, 3.0, 50, 0.01);
  const auto field = solve_master(G, H, product, 0.5, grid, {});
  for (size_t k = 0; k < grid.size(); ++k) {
    REQUIRE(field.converged[k]);
    CHECK(std::abs(field.K[k][0]) < 1e-9);
    CHECK(std::abs(field.m[k] + 1.0 / grid.z(k)) < 1e-12);
  }
}

TEST_CASE("master solver matches the quadratic-root oracle at z = i") {
  const auto G = DiscreteMeasure::point_mass(1.0);
  const auto H = DiscreteMeasure::point_mass(1.0);
  ZGrid grid;
  grid.x = {0.0};
  grid.eta = 1.0;  // z = i
  const double c = 0.25;
  const auto field = solve_master(G, H, product, c, grid, {});
  REQUIRE(field.converged[0]);
  const Complex want = k_root(grid.z(0), c);
  CHECK(std::abs(field.K[0][0] - want) < 1e-8);
}

TEST_CASE("master solver satisfies its own equation on the MAR triple") {
  const auto G = DiscreteMeasure::from_scalars({0.25, 0.36, 0.49},
                                               {0.2, 0.3, 0.5});
  const auto H = DiscreteMeasure::from_scalars({0.25, 0.64, 1.0},
                                               {0.4, 0.4, 0.2});
  const LinkFn f = [](std::span<const double> a, std::span<const double> b) {
    return 1.0 / (1.0 - a[0] * b[0]);
  };
  const auto grid = ZGrid::linspace(0.0, 5.0, 100, 0.01);
  const double c = 400.0 / 600.0;
  SolverConfig cfg;
  cfg.tol = 1e-12;
  const auto field = solve_master(G, H, f, c, grid, cfg);
  const auto res = equation_residual(field, G, H, f, c);
  for (size_t k = 0; k < grid.size(); ++k) {
    REQUIRE(field.converged[k]);
    CHECK(res[k] < 1e-8);
  }
}

TEST_CASE("separable solver: unit model satisfies the MP equation") {
  const auto d1 = DiscreteMeasure::point_mass(1.0);
  const auto grid = ZGrid::linspace(0.0, 4.5, 200, 0.01);
  const double c = 1.0;
  SolverConfig cfg;
  cfg.tol = 1e-12;
  const auto field = solve_separable(d1, {1.0}, d1, {1.0}, c, grid, cfg);
  for (size_t k = 0; k < grid.size(); ++k) {
    REQUIRE(field.converged[k]);
    const Complex z = grid.z(k);
    const Complex m = field.m[k];
    // m = int dG / (lambda (1 - c - c z m) - z) with G = delta_1
    const Complex rhs = 1.0 / ((1.0 - c - c * z * m) - z);
    CHECK(std::abs(m - rhs) < 1e-8);
  }
}

TEST_CASE("separable solver: h = 0 gives the degenerate law") {
  const auto d = DiscreteMeasure::point_mass(1.0);
  const auto grid = ZGrid::linspace(0.5, 2.0, 10, 0.01);
  const auto field = solve_separable(d, {1.0}, d, {0.0}, 0.5, grid, {});
  for (size_t k = 0; k < grid.size(); ++k)
    CHECK(std::abs(field.m[k] + 1.0 / grid.z(k)) < 1e-12);
}

TEST_CASE("separable and master solvers agree on a random product link") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::vector<double> ga(4), hb(3);
  for (auto& v : ga) v = u(rng);
  for (auto& v : hb) v = u(rng);
  const auto G = DiscreteMeasure::from_scalars(ga, {0.25, 0.25, 0.25, 0.25});
  const auto H =
      DiscreteMeasure::from_scalars(hb, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto grid = ZGrid::linspace(0.0, 8.0, 120, 0.01);
  const auto sep = solve_separable(G, ga, H, hb, 0.5, grid, {});
  const auto mas = solve_master(G, H, product, 0.5, grid, {});
  for (size_t k = 0; k < grid.size(); ++k) {
    REQUIRE(sep.converged[k]);
    REQUIRE(mas.converged[k]);
    CHECK(std::abs(sep.m[k] - mas.m[k]) < 1e-8);
  }
}

TEST_CASE("invert_density on the degenerate law") {
  const auto G = DiscreteMeasure::point_mass(0.0);
  const auto H = DiscreteMeasure::point_mass(1.0);
  const auto grid = ZGrid::linspace(0.0, 5.0, 500, 0.01);
  const auto field = solve_master(G, H, product, 0.5, grid, {});
  // raw inversion is the Poisson kernel of the atom
  size_t k1 = 100;  // x = 1.0 (step 0.01 ... check below)
  for (size_t k = 0; k < grid.size(); ++k)
    if (std::abs(grid.x[k] - 1.0) < 1e-9) k1 = k;
  CHECK(field.m[k1].imag() / std::numbers::pi ==
        doctest::Approx(0.003183).epsilon(1e-3));
  const auto d = invert_density(field);
  CHECK(d.atom_at_zero == doctest::Approx(1.0).epsilon(1e-6));
  // the atom's own bump is removed from the continuous part
  CHECK(d.continuous_mass() < 0.01);
  for (double r : d.rho) CHECK(r >= 0.0);
}

TEST_CASE("invert_density reproduces the MP density at c = 1") {
  const auto d1 = DiscreteMeasure::point_mass(1.0);
  const auto grid = ZGrid::linspace(0.05, 3.95, 600, 1e-4);
  const auto field = solve_separable(d1, {1.0}, d1, {1.0}, 1.0, grid, {});
  const auto d = invert_density(field);
  for (size_t k = 0; k < d.x.size(); ++k) {
    if (std::abs(d.x[k] - 2.0) < 5e-3) {
      CHECK(std::abs(d.rho[k] - 1.0 / (2.0 * std::numbers::pi)) < 2e-3);
    }
  }
}

TEST_CASE("cdf_from_density cases") {
  // degenerate law: pure step at 0
  {
    const auto G = DiscreteMeasure::point_mass(0.0);
    const auto H = DiscreteMeasure::point_mass(1.0);
    const auto grid = ZGrid::linspace(0.0, 5.0, 500, 0.01);
    const auto field = solve_master(G, H, product, 0.5, grid, {});
    const auto F = cdf_from_density(invert_density(field));
    CHECK(F.eval(0.0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(F.eval_left(0.0) == doctest::Approx(0.0));
    CHECK(F.eval(5.0) == doctest::Approx(1.0));
  }
  // MP c = 0.5: F at the upper edge is essentially 1
  {
    const auto d1 = DiscreteMeasure::point_mass(1.0);
    const auto grid = ZGrid::linspace(0.0, 3.5, 700, 1e-3);
    const auto field = solve_separable(d1, {1.0}, d1, {1.0}, 0.5, grid, {});
    const auto F = cdf_from_density(invert_density(field));
    const double edge = std::pow(1.0 + std::sqrt(0.5), 2);
    CHECK(F.eval(edge) >= 0.995);
  }
  // symmetric density around mu: F(mu) = atom + half the remaining mass
  {
    DensityCurve d;
    d.atom_at_zero = 0.2;
    d.eta = 1e-3;
    d.c = 1.0;
    const int N = 401;
    for (int i = 0; i < N; ++i) {
      const double x = 2.0 + 2.0 * (double(i) / (N - 1) - 0.5);  // [1,3]
      d.x.push_back(x);
      d.rho.push_back(0.8 * (1.0 - std::abs(x - 2.0)));
    }
    const auto F = cdf_from_density(d);
    CHECK(F.eval(2.0) == doctest::Approx(0.2 + 0.4).epsilon(1e-6));
  }
}

TEST_CASE("cdf_from_density rejects out-of-band mass") {
  DensityCurve d;
  d.atom_at_zero = 0.0;
  d.x = {0.0, 1.0};
  d.rho = {0.5, 0.5};  // total mass 0.5
  CHECK_THROWS_AS(cdf_from_density(d), MassOutOfBand);
}

TEST_CASE("equation_residual detects perturbations") {
  const auto G = DiscreteMeasure::point_mass(1.0);
  const auto H = DiscreteMeasure::point_mass(1.0);
  ZGrid grid;
  grid.x = {0.5};
  grid.eta = 1.0;
  const double c = 0.25;

  KernelField exact;
  exact.a_atoms = G.atoms();
  exact.grid = grid;
  exact.c = c;
  exact.K = {{k_root(grid.z(0), c)}};
  exact.m = {Complex{0.0, 0.0}};
  exact.residual = {0.0};
  exact.converged = {1};
  CHECK(equation_residual(exact, G, H, product, c)[0] < 1e-12);

  KernelField off = exact;
  off.K[0][0] += 0.1;
  CHECK(equation_residual(off, G, H, product, c)[0] > 1e-3);

  const auto solved = solve_master(G, H, product, c, grid, {});
  CHECK(equation_residual(solved, G, H, product, c)[0] < 1e-6);
}

TEST_CASE("domain, Herglotz, and tail properties") {
  const auto G = DiscreteMeasure::from_scalars({0.5, 1.0, 2.0},
                                               {0.3, 0.4, 0.3});
  const auto H = DiscreteMeasure::from_scalars({0.5, 1.5}, {0.5, 0.5});
  const double c = 0.5;
  const auto grid = ZGrid::linspace(0.0, 8.0, 200, 0.01);
  const auto field = solve_master(G, H, product, c, grid, {});
  const double tol = 1e-9;
  for (size_t k = 0; k < grid.size(); ++k) {
    REQUIRE(field.converged[k]);
    const Complex z = grid.z(k);
    for (const Complex& K : field.K[k]) {
      CHECK(K.imag() >= -tol);
      CHECK((z * K).imag() >= -tol);
    }
    CHECK(field.m[k].imag() > 0.0);
    CHECK(std::abs(field.m[k]) <= 1.0 / grid.eta);
  }

  // tail normalization at z = iy
  double mean_f = 0.0;
  for (size_t j = 0; j < G.size(); ++j)
    for (size_t i = 0; i < H.size(); ++i)
      mean_f += G.weight(j) * H.weight(i) * G.scalar_atom(j) * H.scalar_atom(i);
  for (double y : {10.0, 50.0, 100.0}) {
    ZGrid tail;
    tail.x = {0.0};
    tail.eta = y;
    const auto tf = solve_master(G, H, product, c, tail, {});
    REQUIRE(tf.converged[0]);
    const Complex z{0.0, y};
    CHECK(std::abs(z * tf.m[0] + 1.0) <= 2.0 * mean_f / y);
  }
}

TEST_CASE("solver is invariant under atom permutation") {
  const auto G1 = DiscreteMeasure::from_scalars({0.5, 1.0, 2.0},
                                                {0.3, 0.4, 0.3});
  const auto G2 = DiscreteMeasure::from_scalars({2.0, 0.5, 1.0},
                                                {0.3, 0.3, 0.4});
  const auto H = DiscreteMeasure::point_mass(1.0);
  const auto grid = ZGrid::linspace(0.0, 6.0, 60, 0.01);
  const auto f1 = solve_master(G1, H, product, 0.5, grid, {});
  const auto f2 = solve_master(G2, H, product, 0.5, grid, {});
  for (size_t k = 0; k < grid.size(); ++k)
    CHECK(std::abs(f1.m[k] - f2.m[k]) < 1e-12);
}

TEST_CASE("solve_master rejects bad links") {
  const auto d = DiscreteMeasure::point_mass(1.0);
  const auto grid = ZGrid::linspace(0.0, 1.0, 2, 0.01);
  const LinkFn neg = [](std::span<const double>, std::span<const double>) {
    return -1.0;
  };
  CHECK_THROWS_AS(solve_master(d, d, neg, 1.0, grid, {}), BadLink);
}

TEST_CASE("zgrid validation") {
  CHECK_THROWS_AS(ZGrid::linspace(1.0, 0.0, 10, 0.01), KernelError);
  CHECK_THROWS_AS(ZGrid::linspace(0.0, 1.0, 1, 0.01), KernelError);
  CHECK_THROWS_AS(ZGrid::linspace(0.0, 1.0, 10, 0.0), KernelError);
  const auto g = ZGrid::linspace(0.0, 1.0, 11, 0.5);
  CHECK(g.x[5] == doctest::Approx(0.5));
  CHECK(g.z(0) == Complex{0.0, 0.5});
}
