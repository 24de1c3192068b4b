#include "rmt/theory.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

namespace rmt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex h_transfer(std::span<const double> psi, double lambda) {
  Complex h{0.0, 0.0};
  for (size_t j = 0; j < psi.size(); ++j)
    h += psi[j] * std::exp(Complex{0.0, double(j) * lambda});
  return h;
}

std::vector<std::vector<double>> padded_rows(
    const std::vector<std::vector<double>>& psi, int p) {
  size_t lags = 1;
  for (const auto& row : psi) lags = std::max(lags, row.size());
  std::vector<std::vector<double>> rows;
  if (psi.size() == 1) {
    rows.assign(1, psi[0]);
  } else {
    rows = psi;
  }
  (void)p;
  for (auto& row : rows) row.resize(lags, 0.0);
  return rows;
}

// Piecewise time-change of the observation partition: for r in the i-th
// cell ((i-1)/n, i/n], v_r = n * dtau_i and Theta_r interpolates tau
// linearly across the cell.
struct TimeChange {
  std::vector<double> times;
  int n;

  double theta(double r) const {
    const int i = std::clamp(int(std::ceil(r * n - 1e-12)), 1, n);
    const double frac = r * n - (i - 1);
    return times[size_t(i - 1)] +
           frac * (times[size_t(i)] - times[size_t(i - 1)]);
  }
  double v(double r) const {
    const int i = std::clamp(int(std::ceil(r * n - 1e-12)), 1, n);
    return n * (times[size_t(i)] - times[size_t(i - 1)]);
  }
};

// Rank-one factorization of the link matrix on atoms, to relative 1e-12.
bool factor_rank_one(const std::vector<std::vector<double>>& F,
                     std::vector<double>& g, std::vector<double>& h) {
  const size_t J = F.size(), I = F.front().size();
  double fmax = 0.0;
  size_t js = 0, is = 0;
  for (size_t j = 0; j < J; ++j)
    for (size_t i = 0; i < I; ++i)
      if (std::abs(F[j][i]) > fmax) {
        fmax = std::abs(F[j][i]);
        js = j;
        is = i;
      }
  g.assign(J, 0.0);
  h.assign(I, 0.0);
  if (fmax == 0.0) return true;  // zero link: trivially separable
  const double pivot = F[js][is];
  for (size_t j = 0; j < J; ++j) g[j] = F[j][is];
  for (size_t i = 0; i < I; ++i) h[i] = F[js][i] / pivot;
  for (size_t j = 0; j < J; ++j)
    for (size_t i = 0; i < I; ++i)
      if (std::abs(F[j][i] - g[j] * h[i]) > 1e-12 * fmax) return false;
  return true;
}

std::vector<std::vector<double>> link_matrix(const LsdProblem& prob) {
  std::vector<std::vector<double>> F(prob.G.size(),
                                     std::vector<double>(prob.H.size()));
  for (size_t j = 0; j < prob.G.size(); ++j)
    for (size_t i = 0; i < prob.H.size(); ++i)
      F[j][i] = prob.f(prob.G.atom(j), prob.H.atom(i));
  return F;
}

// Stationary-process fixed point: the kernel runs over the frequency
// atoms of H with the ratio inside (c K0 + 1), and m integrates over G.
KernelField solve_spectral(const LsdProblem& prob, const ZGrid& grid,
                           const SolverConfig& cfg) {
  const auto& G = prob.G;
  const auto& H = prob.H;
  const size_t J = G.size(), Q = H.size(), Z = grid.size();
  std::vector<std::vector<double>> F(J, std::vector<double>(Q));
  for (size_t j = 0; j < J; ++j)
    for (size_t q = 0; q < Q; ++q) {
      const double v = prob.f(G.atom(j), H.atom(q));
      if (!std::isfinite(v) || v < 0.0) throw BadLink();
      F[j][q] = v;
    }
  const double c = prob.c;

  KernelField field;
  field.a_atoms = H.atoms();
  field.grid = grid;
  field.c = c;
  field.K.assign(Z, {});
  field.m.assign(Z, {});
  field.residual.assign(Z, 0.0);
  field.converged.assign(Z, 0);

  std::vector<Complex> K0(Q, cfg.init), K0new(Q), inv_denom(J);
  bool have_warm = false;
  for (size_t k = 0; k < Z; ++k) {
    const Complex z = grid.z(k);
    if (!have_warm) K0.assign(Q, cfg.init);
    double rel = 0.0;
    bool ok = false;
    for (int it = 0; it < cfg.max_iter; ++it) {
      for (size_t j = 0; j < J; ++j) {
        Complex acc{0.0, 0.0};
        for (size_t q = 0; q < Q; ++q)
          acc += H.weight(q) * F[j][q] / (c * K0[q] + 1.0);
        inv_denom[j] = 1.0 / (-z + acc);
      }
      double dmax = 0.0, kmax = 0.0;
      for (size_t q = 0; q < Q; ++q) {
        Complex acc{0.0, 0.0};
        for (size_t j = 0; j < J; ++j)
          acc += G.weight(j) * F[j][q] * inv_denom[j];
        K0new[q] = acc;
        dmax = std::max(dmax, std::abs(acc - K0[q]));
        kmax = std::max(kmax, std::abs(acc));
      }
      rel = dmax / std::max(1.0, kmax);
      if (rel <= cfg.tol) {
        K0 = K0new;
        ok = true;
        break;
      }
      for (size_t q = 0; q < Q; ++q) K0[q] += cfg.damping * (K0new[q] - K0[q]);
    }
    for (size_t j = 0; j < J; ++j) {
      Complex acc{0.0, 0.0};
      for (size_t q = 0; q < Q; ++q)
        acc += H.weight(q) * F[j][q] / (c * K0[q] + 1.0);
      inv_denom[j] = 1.0 / (-z + acc);
    }
    Complex m{0.0, 0.0};
    for (size_t j = 0; j < J; ++j) m += G.weight(j) * inv_denom[j];
    field.K[k] = K0;
    field.m[k] = m;
    field.residual[k] = rel;
    field.converged[k] = ok ? 1 : 0;
    have_warm = ok;
  }
  return field;
}

KernelField solve_companion(const LsdProblem& prob, const ZGrid& grid,
                            const SolverConfig& cfg) {
  ZGrid shifted;
  shifted.eta = grid.eta / prob.c;
  shifted.x.resize(grid.size());
  for (size_t k = 0; k < grid.size(); ++k)
    shifted.x[k] = grid.x[k] / prob.c;
  // Transposed problem: dimensions and samples swap roles, so the
  // parameter measures swap and the ratio inverts.
  const LinkFn f = prob.f;
  const LinkFn swapped = [f](std::span<const double> b,
                             std::span<const double> a) { return f(a, b); };
  KernelField tilde =
      solve_master(prob.H, prob.G, swapped, 1.0 / prob.c, shifted, cfg);
  KernelField field = tilde;
  field.grid = grid;
  field.c = prob.c;
  field.m = companion_transform(tilde.m, grid, prob.c);
  return field;
}

}  // namespace

LsdProblem problem_for(const ModelSpec& spec, int p, int n, int Q) {
  validate(spec, p, n);
  if (Q < 2) throw SpecInvariantViolated("Q must be at least 2");
  const double c = double(p) / double(n);
  LsdProblem prob;
  prob.c = c;

  if (auto* m = std::get_if<IidCovariance>(&spec)) {
    prob.G = DiscreteMeasure::esd_of(m->sigma_eigs);
    prob.H = DiscreteMeasure::point_mass(1.0);
    prob.f = [](std::span<const double> a, std::span<const double>) {
      return a[0];
    };
    prob.link_descriptor = "f(a,b) = a";
  } else if (auto* m = std::get_if<Separable>(&spec)) {
    prob.G = DiscreteMeasure::esd_of(m->a_eigs);
    prob.H = DiscreteMeasure::esd_of(m->b_weights);
    prob.f = [](std::span<const double> a, std::span<const double> b) {
      return a[0] * b[0];
    };
    prob.link_descriptor = "f(a,b) = a*b";
  } else if (auto* m = std::get_if<VarianceProfile>(&spec)) {
    prob.G = DiscreteMeasure::uniform01(Q);
    prob.H = DiscreteMeasure::uniform01(Q);
    const Expr sigma = m->profile;
    prob.f = [sigma](std::span<const double> a, std::span<const double> b) {
      const double v = sigma(a[0], b[0]);
      return v * v;
    };
    prob.link_descriptor = "f(s,t) = sigma(s,t)^2";
  } else if (auto* m = std::get_if<LinearProcess>(&spec)) {
    const auto rows = padded_rows(m->psi, p);
    prob.G = DiscreteMeasure::make(
        rows, std::vector<double>(rows.size(), 1.0 / double(rows.size())));
    prob.H = DiscreteMeasure::uniform_on(kTwoPi, Q);
    prob.f = [](std::span<const double> a, std::span<const double> lambda) {
      return std::norm(h_transfer(a, lambda[0]));
    };
    prob.spectral = true;
    prob.link_descriptor = "f(psi,lambda) = |h(psi,lambda)|^2";
  } else if (auto* m = std::get_if<DiffusionRCV>(&spec)) {
    prob.G = DiscreteMeasure::uniform01(Q);
    prob.H = DiscreteMeasure::uniform01(Q);
    const Expr gamma = m->gamma;
    const TimeChange tc{m->times, int(m->times.size()) - 1};
    prob.f = [gamma, tc](std::span<const double> s, std::span<const double> r) {
      const double g = gamma(s[0], tc.theta(r[0]));
      return g * g * tc.v(r[0]);
    };
    prob.link_descriptor = "f(s,r) = gamma(s,Theta_r)^2 * v_r";
  } else if (auto* m = std::get_if<MatrixAR>(&spec)) {
    std::vector<double> a2(m->a_eigs.size()), b2(m->b_diag.size());
    for (size_t i = 0; i < a2.size(); ++i) a2[i] = m->a_eigs[i] * m->a_eigs[i];
    for (size_t i = 0; i < b2.size(); ++i) b2[i] = m->b_diag[i] * m->b_diag[i];
    prob.G = DiscreteMeasure::esd_of(a2);
    prob.H = DiscreteMeasure::esd_of(b2);
    prob.f = [](std::span<const double> a, std::span<const double> b) {
      return 1.0 / (1.0 - a[0] * b[0]);
    };
    prob.link_descriptor = "f(a,b) = 1/(1-a*b), a in spec(AA'), b in spec(BB')";
  } else if (auto* m = std::get_if<FiniteMixture>(&spec)) {
    prob.G = DiscreteMeasure::uniform01(Q);
    const size_t M = m->eta.size();
    std::vector<std::vector<double>> idx(M, std::vector<double>(1));
    for (size_t i = 0; i < M; ++i) idx[i][0] = double(i + 1);
    prob.H = DiscreteMeasure::make(idx, m->eta);
    auto quantiles = std::make_shared<std::vector<EmpiricalDistribution>>();
    for (const auto& eigs : m->component_eigs)
      quantiles->push_back(EmpiricalDistribution::from(eigs));
    prob.f = [quantiles](std::span<const double> s, std::span<const double> i) {
      const size_t idx0 = size_t(std::lround(i[0])) - 1;
      return (*quantiles)[idx0].quantile(s[0]);
    };
    prob.link_descriptor = "f(s,i) = quantile of component i at s";
  }
  return prob;
}

LsdProblem linear_process_companion(const LinearProcess& spec, int p, int n,
                                    int Q) {
  LsdProblem prob = problem_for(ModelSpec{spec}, p, n, Q);
  prob.spectral = false;
  prob.companion = true;
  return prob;
}

LsdSolution solve_lsd(const LsdProblem& prob, const ZGrid& grid,
                      const SolverConfig& cfg, SolveRoute route) {
  LsdSolution sol;
  if (prob.spectral) {
    sol.field = solve_spectral(prob, grid, cfg);
  } else if (prob.companion) {
    sol.field = solve_companion(prob, grid, cfg);
  } else {
    bool separable = false;
    std::vector<double> g, h;
    if (route == SolveRoute::kAuto) {
      const auto F = link_matrix(prob);
      separable = factor_rank_one(F, g, h);
    }
    if (separable) {
      sol.field = solve_separable(prob.G, g, prob.H, h, prob.c, grid, cfg);
    } else {
      sol.field = solve_master(prob.G, prob.H, prob.f, prob.c, grid, cfg);
    }
  }
  sol.density = invert_density(sol.field);
  return sol;
}

LsdSolution solve_for(const ModelSpec& spec, int p, int n, const ZGrid& grid,
                      const SolverConfig& cfg, int Q) {
  const LsdProblem prob = problem_for(spec, p, n, Q);
  LsdSolution sol = solve_lsd(prob, grid, cfg);
  const double target = mean_link(prob);
  const double gap =
      std::abs(sol.density.mean() - target) / std::max(std::abs(target), 1e-12);
  if (gap > 0.02) {
    const LsdProblem fine = problem_for(spec, p, n, 2 * Q);
    LsdSolution refined = solve_lsd(fine, grid, cfg);
    const double gap2 = std::abs(refined.density.mean() - target) /
                        std::max(std::abs(target), 1e-12);
    if (gap2 < gap) return refined;
  }
  return sol;
}

double mean_link(const LsdProblem& prob) {
  double acc = 0.0;
  for (size_t j = 0; j < prob.G.size(); ++j)
    for (size_t i = 0; i < prob.H.size(); ++i)
      acc += prob.G.weight(j) * prob.H.weight(i) *
             prob.f(prob.G.atom(j), prob.H.atom(i));
  return acc;
}

double mp_equation_residual(const std::vector<Complex>& m, const ZGrid& grid,
                            const DiscreteMeasure& G_sigma, double c) {
  if (m.size() != grid.size()) throw GridMismatch();
  double sup = 0.0;
  for (size_t k = 0; k < grid.size(); ++k) {
    const Complex z = grid.z(k);
    const Complex w = 1.0 - c - c * z * m[k];
    Complex rhs{0.0, 0.0};
    for (size_t j = 0; j < G_sigma.size(); ++j)
      rhs += G_sigma.weight(j) / (G_sigma.scalar_atom(j) * w - z);
    sup = std::max(sup, std::abs(m[k] - rhs));
  }
  return sup;
}

double weighted_covariance_system_residual(const KernelField& field,
                             const DiscreteMeasure& G_A,
                             const DiscreteMeasure& H_B, double c) {
  double sup = 0.0;
  for (size_t k = 0; k < field.grid.size(); ++k) {
    if (!field.converged[k]) continue;
    if (field.K[k].size() != 1) throw GridMismatch();
    const Complex z = field.grid.z(k);
    const Complex K = field.K[k][0];
    const Complex m = field.m[k];
    Complex q{0.0, 0.0};
    for (size_t j = 0; j < G_A.size(); ++j) {
      const double y = G_A.scalar_atom(j);
      q += G_A.weight(j) * y / (y * K + 1.0);
    }
    q = -q / z;

    Complex e1{0.0, 0.0};
    for (size_t i = 0; i < H_B.size(); ++i)
      e1 += H_B.weight(i) / (1.0 + c * q * H_B.scalar_atom(i));
    e1 = -(1.0 - 1.0 / c) / z - e1 / (c * z);

    Complex e2{0.0, 0.0};
    for (size_t j = 0; j < G_A.size(); ++j)
      e2 += G_A.weight(j) / (1.0 + K * G_A.scalar_atom(j));
    e2 = -e2 / z;

    const Complex e3 = -1.0 / z - K * q;

    const double r = std::max({std::abs(m - e1), std::abs(m - e2),
                               std::abs(m - e3)});
    sup = std::max(sup, r);
  }
  return sup;
}

double mixture_two_population_residual(const std::vector<Complex>& m,
                                       const ZGrid& grid, double eta1,
                                       const DiscreteMeasure& H2, double c) {
  if (m.size() != grid.size()) throw GridMismatch();
  double sup = 0.0;
  for (size_t k = 0; k < grid.size(); ++k) {
    const Complex z = grid.z(k);
    const Complex u = eta1 / (z + c * z * m[k]);
    const Complex mu = -(1.0 - c) / z + c * m[k];
    Complex rhs{0.0, 0.0};
    for (size_t i = 0; i < H2.size(); ++i)
      rhs += H2.weight(i) / (1.0 - u + (mu + u) * H2.scalar_atom(i));
    sup = std::max(sup, std::abs(-z * m[k] - rhs));
  }
  return sup;
}

std::vector<double> circulant_spectrum(const std::vector<double>& psi, int T) {
  std::vector<double> out(size_t(T), 0.0);
  for (int l = 0; l < T; ++l)
    out[size_t(l)] = std::norm(h_transfer(psi, kTwoPi * l / T));
  return out;
}

std::vector<Complex> companion_transform(const std::vector<Complex>& m_tilde,
                                         const ZGrid& grid, double c) {
  if (m_tilde.size() != grid.size()) throw GridMismatch();
  std::vector<Complex> m(m_tilde.size());
  for (size_t k = 0; k < m.size(); ++k)
    m[k] = (1.0 - c) / (c * grid.z(k)) + m_tilde[k] / (c * c);
  return m;
}

}  // namespace rmt
