#pragma once

#include <cstdint>
#include <vector>

#include "rmt/theory.hpp"

namespace rmt {

struct EmptySeeds : KernelError {
  EmptySeeds() : KernelError("seed list is empty") {}
};

struct ComparisonReport {
  double ks = 0.0;
  double w1 = 0.0;
  double moment_gap = 0.0;        // |mean(ESD) - int int f dG dH|
  double converged_fraction = 1.0;
  int p = 0;
  int n = 0;
  std::uint64_t seed = 0;
  double eta = 0.0;
  int Q = 0;
};

/// Empirical-versus-theoretical agreement on the full measure (the
/// deterministic zero block of the ESD matches the law's atom at zero).
ComparisonReport compare(const ESD& e, const DensityCurve& d,
                         const LsdProblem& prob);

struct BatchSummary {
  std::vector<ComparisonReport> reports;  // ordered by seed argument
  double median_ks = 0.0;
  double max_ks = 0.0;
  double median_w1 = 0.0;
  double max_w1 = 0.0;
};

/// One solve, one simulation per seed. Throws EmptySeeds.
BatchSummary batch_compare(const ModelSpec& spec, int p, int n,
                           const std::vector<std::uint64_t>& seeds,
                           const ZGrid& grid, const SolverConfig& cfg,
                           int Q = 200);

}  // namespace rmt
