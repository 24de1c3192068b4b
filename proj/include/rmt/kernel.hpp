#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rmt/measures.hpp"

namespace rmt {

struct KernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadLink : KernelError {
  BadLink() : KernelError("link function negative or non-finite on an atom") {}
};
struct NothingConverged : KernelError {
  NothingConverged() : KernelError("no z point converged") {}
};
struct MassOutOfBand : KernelError {
  explicit MassOutOfBand(double total)
      : KernelError("density mass " + std::to_string(total) +
                    " outside [0.97, 1.03]; widen the grid or shrink eta") {}
};
struct GridMismatch : KernelError {
  GridMismatch() : KernelError("z grids do not match") {}
};

using Complex = std::complex<double>;

/// Horizontal evaluation line {x_k + i*eta} with strictly increasing x_k.
struct ZGrid {
  std::vector<double> x;
  double eta = 0.01;

  static ZGrid linspace(double x_min, double x_max, int count, double eta);
  size_t size() const { return x.size(); }
  Complex z(size_t k) const { return {x[k], eta}; }
};

struct SolverConfig {
  double tol = 1e-9;       // relative sup-norm fixed-point residual
  int max_iter = 2000;
  double damping = 0.5;    // in (0,1]
  Complex init{0.0, 1.0};  // starting K, Im >= 0
};

/// Link f(a,b) evaluated on an atom pair.
using LinkFn =
    std::function<double(std::span<const double>, std::span<const double>)>;

/// Solved fixed-point kernel K(a_j, z_k) plus the Stieltjes transform m(z_k).
struct KernelField {
  std::vector<std::vector<double>> a_atoms;   // atoms of G
  ZGrid grid;
  std::vector<std::vector<Complex>> K;        // K[k][j], per z per atom
  std::vector<Complex> m;                     // m[k]
  std::vector<double> residual;               // last relative update per z
  std::vector<char> converged;                // honest flags, one per z
  double c = 1.0;

  double converged_fraction() const;
};

/// Damped Picard iteration of the master equation
///   K(a_j) <- int_H f(a_j,b) / (-z + c int_G f(a',b)/(K(a')+1) dG(a')) dH(b)
/// per z point, with a left-to-right warm-start sweep;
/// m(z) = -(1/z) int_G (K(a)+1)^{-1} dG(a).
KernelField solve_master(const DiscreteMeasure& G, const DiscreteMeasure& H,
                         const LinkFn& f, double c, const ZGrid& grid,
                         const SolverConfig& cfg);

/// Scalar specialization for separable links f(a,b) = g(a) h(b);
/// m(z) = -(1/z) int_G (g(a)K+1)^{-1} dG(a). K is stored as a single
/// pseudo-atom per z.
KernelField solve_separable(const DiscreteMeasure& G,
                            const std::vector<double>& g_values,
                            const DiscreteMeasure& H,
                            const std::vector<double>& h_values, double c,
                            const ZGrid& grid, const SolverConfig& cfg);

/// Recompute the master equation right-hand side at the stored K and return
/// the sup-norm gap per z point.
std::vector<double> equation_residual(const KernelField& field,
                                      const DiscreteMeasure& G,
                                      const DiscreteMeasure& H, const LinkFn& f,
                                      double c);

/// Density recovered by Stieltjes inversion rho(x) = Im m(x+i eta)/pi, with
/// an explicit point mass at zero. Non-converged z points are dropped.
struct DensityCurve {
  std::vector<double> x;
  std::vector<double> rho;       // >= 0 pointwise
  double atom_at_zero = 0.0;
  double eta = 0.0;
  double c = 1.0;
  double converged_fraction = 1.0;

  double continuous_mass() const;  // trapezoid integral of rho
  /// Mean of the full measure (atom contributes 0), continuous part
  /// rescaled so total mass is 1.
  double mean() const;
};

DensityCurve invert_density(const KernelField& field);

/// F(x) = atom_at_zero * 1{x >= 0} + rescaled trapezoid integral of rho.
/// Throws MassOutOfBand when atom + integral falls outside [0.97, 1.03].
Cdf cdf_from_density(const DensityCurve& d);

}  // namespace rmt
