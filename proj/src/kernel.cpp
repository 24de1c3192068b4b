#include "rmt/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rmt {

namespace {

// f evaluated on atoms(G) x atoms(H); throws BadLink on bad values.
std::vector<std::vector<double>> link_table(const DiscreteMeasure& G,
                                            const DiscreteMeasure& H,
                                            const LinkFn& f) {
  std::vector<std::vector<double>> F(G.size(), std::vector<double>(H.size()));
  for (size_t j = 0; j < G.size(); ++j)
    for (size_t i = 0; i < H.size(); ++i) {
      const double v = f(G.atom(j), H.atom(i));
      if (!std::isfinite(v) || v < 0.0) throw BadLink();
      F[j][i] = v;
    }
  return F;
}

}  // namespace

ZGrid ZGrid::linspace(double x_min, double x_max, int count, double eta) {
  if (!(x_min < x_max) || count < 2 || !(eta > 0.0))
    throw KernelError("invalid z grid");
  ZGrid g;
  g.eta = eta;
  g.x.resize(size_t(count));
  for (int k = 0; k < count; ++k)
    g.x[size_t(k)] = x_min + (x_max - x_min) * double(k) / double(count - 1);
  return g;
}

double KernelField::converged_fraction() const {
  if (converged.empty()) return 0.0;
  size_t ok = 0;
  for (char c : converged) ok += (c != 0);
  return double(ok) / double(converged.size());
}

KernelField solve_master(const DiscreteMeasure& G, const DiscreteMeasure& H,
                         const LinkFn& f, double c, const ZGrid& grid,
                         const SolverConfig& cfg) {
  const auto F = link_table(G, H, f);
  const size_t J = G.size(), I = H.size(), Z = grid.size();
  const auto& Gw = G.weights();
  const auto& Hw = H.weights();

  KernelField field;
  field.a_atoms = G.atoms();
  field.grid = grid;
  field.c = c;
  field.K.assign(Z, {});
  field.m.assign(Z, {});
  field.residual.assign(Z, 0.0);
  field.converged.assign(Z, 0);

  std::vector<Complex> K(J, cfg.init), Knew(J), invK1(J), inv_denom(I);
  bool have_warm = false;
  for (size_t k = 0; k < Z; ++k) {
    const Complex z = grid.z(k);
    if (!have_warm) K.assign(J, cfg.init);
    double rel = 0.0;
    bool ok = false;
    for (int it = 0; it < cfg.max_iter; ++it) {
      for (size_t j = 0; j < J; ++j) invK1[j] = 1.0 / (K[j] + 1.0);
      for (size_t i = 0; i < I; ++i) {
        Complex acc{0.0, 0.0};
        for (size_t j = 0; j < J; ++j) acc += Gw[j] * F[j][i] * invK1[j];
        inv_denom[i] = 1.0 / (-z + c * acc);
      }
      double dmax = 0.0, kmax = 0.0;
      for (size_t j = 0; j < J; ++j) {
        Complex acc{0.0, 0.0};
        for (size_t i = 0; i < I; ++i) acc += Hw[i] * F[j][i] * inv_denom[i];
        Knew[j] = acc;
        dmax = std::max(dmax, std::abs(acc - K[j]));
        kmax = std::max(kmax, std::abs(acc));
      }
      rel = dmax / std::max(1.0, kmax);
      if (rel <= cfg.tol) {
        K = Knew;
        ok = true;
        break;
      }
      for (size_t j = 0; j < J; ++j)
        K[j] += cfg.damping * (Knew[j] - K[j]);
    }
    field.K[k] = K;
    field.residual[k] = rel;
    field.converged[k] = ok ? 1 : 0;
    Complex msum{0.0, 0.0};
    for (size_t j = 0; j < J; ++j) msum += Gw[j] / (K[j] + 1.0);
    field.m[k] = -msum / z;
    // warm-start the next z from a converged solution, else restart at init
    have_warm = ok;
  }
  return field;
}

KernelField solve_separable(const DiscreteMeasure& G,
                            const std::vector<double>& g_values,
                            const DiscreteMeasure& H,
                            const std::vector<double>& h_values, double c,
                            const ZGrid& grid, const SolverConfig& cfg) {
  if (g_values.size() != G.size() || h_values.size() != H.size())
    throw KernelError("g/h value tables must match the atom counts");
  for (double v : g_values)
    if (!std::isfinite(v) || v < 0.0) throw BadLink();
  for (double v : h_values)
    if (!std::isfinite(v) || v < 0.0) throw BadLink();
  const size_t J = G.size(), I = H.size(), Z = grid.size();
  const auto& Gw = G.weights();
  const auto& Hw = H.weights();

  KernelField field;
  field.a_atoms = {{0.0}};  // scalar kernel, one pseudo-atom
  field.grid = grid;
  field.c = c;
  field.K.assign(Z, {});
  field.m.assign(Z, {});
  field.residual.assign(Z, 0.0);
  field.converged.assign(Z, 0);

  Complex K = cfg.init;
  bool have_warm = false;
  for (size_t k = 0; k < Z; ++k) {
    const Complex z = grid.z(k);
    if (!have_warm) K = cfg.init;
    double rel = 0.0;
    bool ok = false;
    for (int it = 0; it < cfg.max_iter; ++it) {
      Complex ginner{0.0, 0.0};
      for (size_t j = 0; j < J; ++j)
        ginner += Gw[j] * g_values[j] / (g_values[j] * K + 1.0);
      Complex Knew{0.0, 0.0};
      for (size_t i = 0; i < I; ++i)
        Knew += Hw[i] * h_values[i] / (-z + c * h_values[i] * ginner);
      rel = std::abs(Knew - K) / std::max(1.0, std::abs(Knew));
      if (rel <= cfg.tol) {
        K = Knew;
        ok = true;
        break;
      }
      K += cfg.damping * (Knew - K);
    }
    field.K[k] = {K};
    field.residual[k] = rel;
    field.converged[k] = ok ? 1 : 0;
    Complex msum{0.0, 0.0};
    for (size_t j = 0; j < J; ++j) msum += Gw[j] / (g_values[j] * K + 1.0);
    field.m[k] = -msum / z;
    have_warm = ok;
  }
  return field;
}

std::vector<double> equation_residual(const KernelField& field,
                                      const DiscreteMeasure& G,
                                      const DiscreteMeasure& H, const LinkFn& f,
                                      double c) {
  const auto F = link_table(G, H, f);
  const size_t J = G.size(), I = H.size();
  std::vector<double> out(field.grid.size(), 0.0);
  for (size_t k = 0; k < field.grid.size(); ++k) {
    if (field.K[k].size() != J) throw GridMismatch();
    const Complex z = field.grid.z(k);
    const auto& K = field.K[k];
    double sup = 0.0;
    for (size_t j = 0; j < J; ++j) {
      Complex rhs{0.0, 0.0};
      for (size_t i = 0; i < I; ++i) {
        Complex acc{0.0, 0.0};
        for (size_t jj = 0; jj < J; ++jj)
          acc += G.weight(jj) * F[jj][i] / (K[jj] + 1.0);
        rhs += H.weight(i) * F[j][i] / (-z + c * acc);
      }
      sup = std::max(sup, std::abs(rhs - K[j]));
    }
    out[k] = sup;
  }
  return out;
}

double DensityCurve::continuous_mass() const {
  double mass = 0.0;
  for (size_t i = 0; i + 1 < x.size(); ++i)
    mass += 0.5 * (rho[i] + rho[i + 1]) * (x[i + 1] - x[i]);
  return mass;
}

double DensityCurve::mean() const {
  const double mass = continuous_mass();
  if (mass <= 0.0) return 0.0;
  double mx = 0.0;
  for (size_t i = 0; i + 1 < x.size(); ++i)
    mx += 0.5 * (x[i] * rho[i] + x[i + 1] * rho[i + 1]) * (x[i + 1] - x[i]);
  return mx * (1.0 - atom_at_zero) / mass;
}

DensityCurve invert_density(const KernelField& field) {
  DensityCurve d;
  d.eta = field.grid.eta;
  d.c = field.c;
  d.converged_fraction = field.converged_fraction();
  if (d.converged_fraction == 0.0) throw NothingConverged();

  // Deterministic rank-bound atom, sharpened by the probe eta*Im m(i eta)
  // when the grid reaches x ~ 0: a point mass w at zero contributes exactly
  // w/eta to Im m there while the continuous part contributes O(eta).
  double atom = std::max(0.0, 1.0 - 1.0 / field.c);
  const double eta = field.grid.eta;
  size_t k0 = field.grid.size();
  for (size_t k = 0; k < field.grid.size(); ++k) {
    if (!field.converged[k]) continue;
    if (k0 == field.grid.size() ||
        std::abs(field.grid.x[k]) < std::abs(field.grid.x[k0]))
      k0 = k;
  }
  if (k0 < field.grid.size() && std::abs(field.grid.x[k0]) <= eta) {
    const double probe = eta * field.m[k0].imag();
    atom = std::max(atom, probe);
  }
  atom = std::clamp(atom, 0.0, 1.0);
  d.atom_at_zero = atom;

  // Continuous part: Im m / pi with the atom's own Poisson bump removed so
  // the point mass is not double counted.
  for (size_t k = 0; k < field.grid.size(); ++k) {
    if (!field.converged[k]) continue;
    const double xk = field.grid.x[k];
    const double bump =
        atom * (eta / std::numbers::pi) / (xk * xk + eta * eta);
    d.x.push_back(xk);
    d.rho.push_back(
        std::max(0.0, field.m[k].imag() / std::numbers::pi - bump));
  }
  return d;
}

Cdf cdf_from_density(const DensityCurve& d) {
  const double mass = d.continuous_mass();
  const double total = d.atom_at_zero + mass;
  if (total < 0.97 || total > 1.03) throw MassOutOfBand(total);
  const double scale = mass > 0.0 ? (1.0 - d.atom_at_zero) / mass : 0.0;

  std::vector<double> xs = d.x;
  std::vector<double> cum(xs.size(), 0.0);
  for (size_t i = 1; i < xs.size(); ++i)
    cum[i] = cum[i - 1] +
             0.5 * (d.rho[i - 1] + d.rho[i]) * (xs[i] - xs[i - 1]) * scale;

  Cdf c;
  const bool need_zero =
      d.atom_at_zero > 0.0 && (xs.empty() || xs.front() > 0.0);
  if (need_zero) {
    c.x.push_back(0.0);
    c.value_before.push_back(0.0);
    c.value_at.push_back(d.atom_at_zero);
  }
  for (size_t i = 0; i < xs.size(); ++i) {
    const double step = xs[i] >= 0.0 ? d.atom_at_zero : 0.0;
    const double v = step + cum[i];
    if (!need_zero && d.atom_at_zero > 0.0 && xs[i] == 0.0) {
      c.x.push_back(xs[i]);
      c.value_before.push_back(cum[i]);
      c.value_at.push_back(v);
    } else {
      c.x.push_back(xs[i]);
      c.value_before.push_back(v);
      c.value_at.push_back(v);
    }
  }
  if (!c.value_at.empty()) c.value_at.back() = 1.0;
  return c;
}

}  // namespace rmt
