#include "rmt/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace rmt {

Eigen::MatrixXd gram_covariance(const DataMatrix& X) {
  Eigen::MatrixXd S =
      (X.entries * X.entries.transpose()) / double(X.entries.cols());
  S = 0.5 * (S + S.transpose()).eval();
  return S;
}

std::vector<double> eigenvalues_symmetric(const Eigen::MatrixXd& S) {
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw NotSymmetric();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      S, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NoConvergence();
  const auto& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

double ESD::mean() const {
  double s = 0.0;
  for (double v : eigenvalues) s += v;
  return s / double(eigenvalues.size());
}

ESD esd(const Eigen::MatrixXd& S, int n_samples) {
  std::vector<double> ev = eigenvalues_symmetric(S);
  const double lmax = std::abs(ev.back());
  const double eps_eig = 1e-8 * std::max(1.0, lmax);
  for (double& v : ev) {
    if (v < 0.0 && v >= -eps_eig) v = 0.0;
  }
  return ESD{std::move(ev), int(S.rows()), n_samples};
}

std::complex<double> empirical_stieltjes(const ESD& e, std::complex<double> z) {
  if (!(z.imag() > 0.0)) throw LowerHalfPlane();
  std::complex<double> sum{0.0, 0.0};
  for (double lambda : e.eigenvalues) sum += 1.0 / (lambda - z);
  return sum / double(e.eigenvalues.size());
}

Histogram histogram(const ESD& e, int bins, double lo, double hi) {
  if (!(lo < hi) || bins < 1) throw BadRange();
  Histogram h;
  h.edges.resize(size_t(bins) + 1);
  h.density.assign(size_t(bins), 0.0);
  const double width = (hi - lo) / double(bins);
  for (int b = 0; b <= bins; ++b) h.edges[size_t(b)] = lo + b * width;
  for (double v : e.eigenvalues) {
    if (v < lo || v > hi) continue;
    int b = int((v - lo) / width);
    b = std::min(b, bins - 1);
    h.density[size_t(b)] += 1.0;
  }
  const double norm = double(e.p) * width;
  for (double& d : h.density) d /= norm;
  return h;
}

}  // namespace rmt
