#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rmt/expr.hpp"
#include "rmt/spectra.hpp"

namespace rmt {

struct SimulateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : SimulateError {
  explicit DimensionMismatch(const std::string& what) : SimulateError(what) {}
};
struct SpecInvariantViolated : SimulateError {
  explicit SpecInvariantViolated(const std::string& what)
      : SimulateError(what) {}
};
struct NotStationary : SimulateError {
  NotStationary() : SimulateError("max|a| * max|b| must be < 1") {}
};
struct BadPartition : SimulateError {
  explicit BadPartition(const std::string& what) : SimulateError(what) {}
};
struct NonFiniteProfile : SimulateError {
  NonFiniteProfile() : SimulateError("profile is not finite on the grid") {}
};

// The seven simulatable matrix families.

struct IidCovariance {
  std::vector<double> sigma_eigs;  // p entries >= 0
};

struct Separable {
  std::vector<double> a_eigs;     // p entries >= 0
  std::vector<double> b_weights;  // n entries >= 0
};

struct VarianceProfile {
  Expr profile;  // sigma(s,t) on [0,1]^2
};

struct LinearProcess {
  // psi[l] holds the MA coefficients (lags 0..J) of row l; a single entry
  // is broadcast to all rows. burn_in = J pre-samples generated and dropped.
  std::vector<std::vector<double>> psi;
  int burn_in = 200;
};

struct DiffusionRCV {
  Expr gamma;                 // gamma(s,r) on [0,1]^2
  std::vector<double> times;  // n+1 nondecreasing, times[0]=0, times[n]=1
  double drift_bound = 0.0;
};

struct MatrixAR {
  std::vector<double> a_eigs;  // m diagonal entries of A
  std::vector<double> b_diag;  // n diagonal entries of B
  int t = 1;                   // observation index
  int burn_in = 300;
};

struct FiniteMixture {
  std::vector<double> eta;                          // M weights, sum 1
  std::vector<std::vector<double>> component_eigs;  // M lists of p reals >= 0
  std::vector<std::vector<double>> means;           // M vectors in R^p
};

using ModelSpec = std::variant<IidCovariance, Separable, VarianceProfile,
                               LinearProcess, DiffusionRCV, MatrixAR,
                               FiniteMixture>;

/// Throws DimensionMismatch / SpecInvariantViolated / NotStationary /
/// BadPartition when the model parameters cannot produce a p x n matrix.
void validate(const ModelSpec& spec, int p, int n);

/// Deterministic dispatch over the family-specific samplers below.
DataMatrix simulate(const ModelSpec& spec, int p, int n, std::uint64_t seed);

DataMatrix sample_iid_covariance(const std::vector<double>& sigma_eigs, int p,
                                 int n, std::uint64_t seed);
DataMatrix sample_separable(const std::vector<double>& a_eigs,
                            const std::vector<double>& b_weights, int p, int n,
                            std::uint64_t seed);
DataMatrix sample_variance_profile(const Expr& profile, int p, int n,
                                   std::uint64_t seed);
DataMatrix sample_linear_process(const std::vector<std::vector<double>>& psi,
                                 int p, int T, int burn_in,
                                 std::uint64_t seed);
DataMatrix sample_diffusion_rcv(const Expr& gamma,
                                const std::vector<double>& times,
                                double drift_bound, int p, int n,
                                std::uint64_t seed);
DataMatrix sample_matrix_ar(const std::vector<double>& a_eigs,
                            const std::vector<double>& b_diag, int t,
                            int burn_in, int m, int n, std::uint64_t seed);
DataMatrix sample_mixture(const std::vector<double>& eta,
                          const std::vector<std::vector<double>>& component_eigs,
                          const std::vector<std::vector<double>>& means, int p,
                          int n, std::uint64_t seed);

/// RCV observation weights w[i][l] = n * integral of gamma(l/p, t)^2 over
/// [times[i], times[i+1]], by composite Simpson quadrature (33 nodes).
std::vector<std::vector<double>> rcv_weights(const Expr& gamma,
                                             const std::vector<double>& times,
                                             int p);

/// Seeded substream generator. Streams are derived from (seed, kind, index)
/// with a splitmix64 hash, one substream per column (or row), so columns can
/// be generated in parallel without changing the output.
class Rng {
 public:
  enum Kind : std::uint64_t { kNoise = 0, kIndex = 1, kDrift = 2 };

  Rng(std::uint64_t seed, Kind kind, std::uint64_t index);

  double uniform();   // in (0,1)
  double gaussian();  // standard normal via Box-Muller

 private:
  std::uint64_t next_u64();
  std::uint64_t state_;
};

}  // namespace rmt
