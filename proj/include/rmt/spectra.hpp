#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

namespace rmt {

struct SpectraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotSymmetric : SpectraError {
  NotSymmetric() : SpectraError("matrix is not symmetric") {}
};
struct NoConvergence : SpectraError {
  NoConvergence() : SpectraError("eigensolver did not converge") {}
};
struct LowerHalfPlane : SpectraError {
  LowerHalfPlane() : SpectraError("z must lie in the upper half-plane") {}
};
struct BadRange : SpectraError {
  BadRange() : SpectraError("histogram range is invalid") {}
};

/// p x n real data matrix; columns are the n observations.
struct DataMatrix {
  Eigen::MatrixXd entries;
  int p() const { return int(entries.rows()); }
  int n() const { return int(entries.cols()); }
};

/// S = X X^T / n, symmetrized after accumulation.
Eigen::MatrixXd gram_covariance(const DataMatrix& X);

/// Full real spectrum of a symmetric matrix, sorted ascending.
std::vector<double> eigenvalues_symmetric(const Eigen::MatrixXd& S);

/// Empirical spectral distribution: sorted eigenvalues plus dimensions.
struct ESD {
  std::vector<double> eigenvalues;  // nondecreasing
  int p = 0;
  int n = 0;

  double mean() const;
};

/// Eigenvalues of S with tiny negative values (PSD roundoff) clamped to 0.
ESD esd(const Eigen::MatrixXd& S, int n_samples);

/// (1/p) sum_j 1/(lambda_j - z) for Im z > 0.
std::complex<double> empirical_stieltjes(const ESD& e, std::complex<double> z);

/// Histogram with heights normalized as a density against the full count p:
/// sum over bins of height * width = (# eigenvalues in range) / p.
struct Histogram {
  std::vector<double> edges;    // bins + 1 entries
  std::vector<double> density;  // bins entries
};

Histogram histogram(const ESD& e, int bins, double lo, double hi);

}  // namespace rmt
