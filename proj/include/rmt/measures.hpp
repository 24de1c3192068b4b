#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmt {

struct MeasureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyMeasure : MeasureError {
  EmptyMeasure() : MeasureError("measure has no atoms") {}
};
struct NegativeWeight : MeasureError {
  NegativeWeight() : MeasureError("measure weight is negative") {}
};
struct WeightSumMismatch : MeasureError {
  explicit WeightSumMismatch(double sum)
      : MeasureError("weights sum to " + std::to_string(sum) +
                     ", outside [1-1e-9, 1+1e-9]") {}
};
struct OutOfRange : MeasureError {
  OutOfRange() : MeasureError("quantile argument outside (0,1)") {}
};
struct NonFiniteIntegrand : MeasureError {
  NonFiniteIntegrand() : MeasureError("integrand is not finite at an atom") {}
};

/// Finitely supported probability measure on R^d. Atoms are real vectors of
/// a common dimension; weights are normalized to sum exactly to 1.
class DiscreteMeasure {
 public:
  /// Empty placeholder; every factory returns a nonempty measure.
  DiscreteMeasure() = default;

  static DiscreteMeasure make(std::vector<std::vector<double>> atoms,
                              std::vector<double> weights);
  static DiscreteMeasure from_scalars(const std::vector<double>& atoms,
                                      const std::vector<double>& weights);
  static DiscreteMeasure point_mass(double a);
  /// Empirical measure of a list of scalars: each value gets weight 1/n.
  static DiscreteMeasure esd_of(const std::vector<double>& values);
  /// Midpoint-rule discretization of U(0,1): atoms (j-1/2)/Q, weights 1/Q.
  static DiscreteMeasure uniform01(int Q);
  /// Midpoint-rule discretization of the uniform measure on [0,L].
  static DiscreteMeasure uniform_on(double L, int Q);

  size_t size() const { return atoms_.size(); }
  size_t dim() const { return atoms_.front().size(); }
  const std::vector<std::vector<double>>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  std::span<const double> atom(size_t j) const { return atoms_[j]; }
  double weight(size_t j) const { return weights_[j]; }
  /// The j-th atom as a scalar; valid only when dim() == 1.
  double scalar_atom(size_t j) const { return atoms_[j][0]; }

  std::complex<double> integrate(
      const std::function<std::complex<double>(std::span<const double>)>& phi)
      const;
  double integrate_real(
      const std::function<double(std::span<const double>)>& phi) const;

  /// Left-continuous generalized inverse of the CDF, dim() == 1 only.
  double quantile(double s) const;

  /// Mean of a scalar measure.
  double mean() const;

 private:
  DiscreteMeasure(std::vector<std::vector<double>> atoms,
                  std::vector<double> weights);
  std::vector<std::vector<double>> atoms_;
  std::vector<double> weights_;
};

/// Sorted sample of reals viewed as an empirical distribution function.
struct EmpiricalDistribution {
  std::vector<double> samples;  // nondecreasing, nonempty

  static EmpiricalDistribution from(std::vector<double> values);
  double quantile(double s) const;
  double cdf(double x) const;
};

/// Quantile function sampled at midpoints s = (j-1/2)/Q, j = 1..Q.
struct QuantileFunction {
  std::vector<double> values;  // nondecreasing, Q >= 2

  static QuantileFunction from(std::vector<double> values);
  static QuantileFunction tabulate(const DiscreteMeasure& m, int Q);
  /// Nearest-midpoint lookup of the tabulated quantile.
  double quantile(double s) const;
};

/// Piecewise-linear CDF with jumps. Breakpoints x are strictly increasing;
/// at x[i] the function jumps from value_before[i] to value_at[i]
/// (right-continuous); between consecutive breakpoints it interpolates
/// linearly from value_at[i] to value_before[i+1].
struct Cdf {
  std::vector<double> x;
  std::vector<double> value_before;
  std::vector<double> value_at;

  double eval(double t) const;
  double eval_left(double t) const;

  static Cdf from_empirical(const EmpiricalDistribution& e);
  static Cdf from_discrete(const DiscreteMeasure& m);
};

/// sup_x |F(x) - G(x)| over the union of breakpoints (left and right limits).
double kolmogorov_distance(const Cdf& F, const Cdf& G);

/// Exact integral of |F(x) - G(x)| over the real line.
double wasserstein1(const Cdf& F, const Cdf& G);

}  // namespace rmt
