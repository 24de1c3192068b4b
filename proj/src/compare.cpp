#include "rmt/compare.hpp"

#include <algorithm>
#include <cmath>

namespace rmt {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ComparisonReport compare(const ESD& e, const DensityCurve& d,
                         const LsdProblem& prob) {
  const Cdf theory = cdf_from_density(d);
  const Cdf empirical =
      Cdf::from_empirical(EmpiricalDistribution::from(e.eigenvalues));
  ComparisonReport r;
  r.ks = kolmogorov_distance(empirical, theory);
  r.w1 = wasserstein1(empirical, theory);
  r.moment_gap = std::abs(e.mean() - mean_link(prob));
  r.converged_fraction = d.converged_fraction;
  r.p = e.p;
  r.n = e.n;
  r.eta = d.eta;
  return r;
}

BatchSummary batch_compare(const ModelSpec& spec, int p, int n,
                           const std::vector<std::uint64_t>& seeds,
                           const ZGrid& grid, const SolverConfig& cfg, int Q) {
  if (seeds.empty()) throw EmptySeeds();
  const LsdProblem prob = problem_for(spec, p, n, Q);
  const LsdSolution sol = solve_lsd(prob, grid, cfg);

  BatchSummary out;
  std::vector<double> ks, w1;
  for (std::uint64_t seed : seeds) {
    const DataMatrix X = simulate(spec, p, n, seed);
    const ESD e = esd(gram_covariance(X), X.n());
    ComparisonReport r = compare(e, sol.density, prob);
    r.seed = seed;
    r.Q = Q;
    ks.push_back(r.ks);
    w1.push_back(r.w1);
    out.reports.push_back(std::move(r));
  }
  out.median_ks = median_of(ks);
  out.max_ks = *std::max_element(ks.begin(), ks.end());
  out.median_w1 = median_of(w1);
  out.max_w1 = *std::max_element(w1.begin(), w1.end());
  return out;
}

}  // namespace rmt
