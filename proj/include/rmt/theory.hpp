#pragma once

#include <string>

#include "rmt/kernel.hpp"
#include "rmt/simulate.hpp"

namespace rmt {

/// The (G, H, f, c) triple defining a limiting-spectral-distribution
/// equation, plus routing hints for the solver.
struct LsdProblem {
  DiscreteMeasure G;
  DiscreteMeasure H;
  LinkFn f;
  double c = 1.0;
  std::string link_descriptor;

  /// Stationary-process route: H is a frequency measure on [0, 2pi] and the
  /// fixed point runs over frequencies with the ratio inside the kernel.
  bool spectral = false;
  /// Cross-check route: solve the transposed problem on the grid z/c with
  /// ratio 1/c, then map m back through the companion identity.
  bool companion = false;
};

enum class SolveRoute { kAuto, kForceMaster };

struct LsdSolution {
  KernelField field;
  DensityCurve density;
};

/// Family -> equation dispatch. Q controls the midpoint discretization of
/// continuous parameter measures. Pure; throws SpecInvariantViolated.
LsdProblem problem_for(const ModelSpec& spec, int p, int n, int Q = 200);

/// Companion-path variant of the linear-process problem (cross-check only).
LsdProblem linear_process_companion(const LinearProcess& spec, int p, int n,
                                    int Q = 200);

/// Solve the problem's equation on the grid and invert the density.
/// kAuto picks the scalar path when the link matrix factors to rank one on
/// the atoms (relative tolerance 1e-12); kForceMaster always runs the full
/// per-atom iteration.
LsdSolution solve_lsd(const LsdProblem& prob, const ZGrid& grid,
                      const SolverConfig& cfg,
                      SolveRoute route = SolveRoute::kAuto);

/// problem_for + solve_lsd with the Q-doubling fallback: when the solved
/// density's first moment misses mean_link by more than 2%, rebuild once
/// with 2Q and keep the better of the two.
LsdSolution solve_for(const ModelSpec& spec, int p, int n, const ZGrid& grid,
                      const SolverConfig& cfg, int Q = 200);

/// int int f(a,b) dG(a) dH(b) — the LSD's first moment.
double mean_link(const LsdProblem& prob);

/// sup_k | m_k - int dG(lambda) / (lambda(1 - c - c z_k m_k) - z_k) |.
double mp_equation_residual(const std::vector<Complex>& m, const ZGrid& grid,
                            const DiscreteMeasure& G_sigma, double c);

/// Three-equation validator for the weighted covariance model, assembled
/// from the scalar kernel of a separable solve with g(y)=y over G_A and
/// h(x)=x over H_B:
///   p = K,   q = -(1/z) int y/(yK+1) dG_A(y),
///   m = -(1 - 1/c)/z - (1/(cz)) int dH_B(x)/(1 + c q x)
///   m = -(1/z) int dG_A(y)/(1 + p y)
///   m = -1/z - p q.
/// Returns the sup over converged z of the max residual of the three
/// equations. Throws GridMismatch unless the field carries a scalar kernel.
double weighted_covariance_system_residual(const KernelField& field,
                             const DiscreteMeasure& G_A,
                             const DiscreteMeasure& H_B, double c);

/// Two-population mixture validator:
///   -z m = int dH2(lambda) / (1 - u + (mu + u) lambda),
/// with u = eta1/(z + c z m) and mu = -(1-c)/z + c m.
double mixture_two_population_residual(const std::vector<Complex>& m,
                                       const ZGrid& grid, double eta1,
                                       const DiscreteMeasure& H2, double c);

/// Eigenvalues |h(psi, 2 pi l / T)|^2, l = 0..T-1, of the circulant proxy
/// of the autocovariance matrix of one coordinate process.
std::vector<double> circulant_spectrum(const std::vector<double>& psi, int T);

/// m(z) = (1 - c)/(c z) + m_tilde(z/c)/c^2, with m_tilde already evaluated
/// on the shifted grid {z_k / c}. Throws GridMismatch on size mismatch.
std::vector<Complex> companion_transform(const std::vector<Complex>& m_tilde,
                                         const ZGrid& grid, double c);

}  // namespace rmt
