#include "rmt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rmt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_nonneg_finite(const std::vector<double>& v, const char* name) {
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0)
      throw SpecInvariantViolated(std::string(name) +
                                  " entries must be finite and >= 0");
  }
}

}  // namespace

Rng::Rng(std::uint64_t seed, Kind kind, std::uint64_t index) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ (0x632be59bd9b4e019ULL * (std::uint64_t(kind) + 1)));
  state_ = splitmix64(s ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
}

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t x = state_;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double Rng::uniform() {
  return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::gaussian() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

void validate(const ModelSpec& spec, int p, int n) {
  if (p < 1 || n < 1) throw DimensionMismatch("p and n must be >= 1");
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidCovariance>) {
          if (int(s.sigma_eigs.size()) != p)
            throw DimensionMismatch("sigma_eigs must have p entries");
          require_nonneg_finite(s.sigma_eigs, "sigma_eigs");
        } else if constexpr (std::is_same_v<T, Separable>) {
          if (int(s.a_eigs.size()) != p)
            throw DimensionMismatch("a_eigs must have p entries");
          if (int(s.b_weights.size()) != n)
            throw DimensionMismatch("b_weights must have n entries");
          require_nonneg_finite(s.a_eigs, "a_eigs");
          require_nonneg_finite(s.b_weights, "b_weights");
        } else if constexpr (std::is_same_v<T, VarianceProfile>) {
          // finiteness checked on the evaluation grid at sampling time
        } else if constexpr (std::is_same_v<T, LinearProcess>) {
          if (s.psi.empty()) throw DimensionMismatch("psi table is empty");
          if (s.psi.size() != 1 && int(s.psi.size()) != p)
            throw DimensionMismatch("psi needs 1 or p coefficient rows");
          const size_t lags = s.psi.front().size();
          for (const auto& row : s.psi) {
            if (row.size() != lags)
              throw DimensionMismatch("psi rows differ in lag count");
            for (double c : row)
              if (!std::isfinite(c))
                throw SpecInvariantViolated("psi coefficients must be finite");
          }
          if (s.burn_in < int(lags) - 1)
            throw SpecInvariantViolated(
                "burn_in must cover the MA truncation lag");
        } else if constexpr (std::is_same_v<T, DiffusionRCV>) {
          if (int(s.times.size()) != n + 1)
            throw BadPartition("times must have n+1 entries");
          if (s.times.front() != 0.0 || s.times.back() != 1.0)
            throw BadPartition("times must start at 0 and end at 1");
          for (size_t i = 0; i + 1 < s.times.size(); ++i)
            if (!(s.times[i] <= s.times[i + 1]))
              throw BadPartition("times must be nondecreasing");
          if (!(s.drift_bound >= 0.0))
            throw SpecInvariantViolated("drift_bound must be >= 0");
        } else if constexpr (std::is_same_v<T, MatrixAR>) {
          if (int(s.a_eigs.size()) != p)
            throw DimensionMismatch("a_eigs must have m entries");
          if (int(s.b_diag.size()) != n)
            throw DimensionMismatch("b_diag must have n entries");
          double amax = 0.0, bmax = 0.0;
          for (double a : s.a_eigs) amax = std::max(amax, std::abs(a));
          for (double b : s.b_diag) bmax = std::max(bmax, std::abs(b));
          if (!(amax * bmax < 1.0)) throw NotStationary();
          if (s.t < 1 || s.burn_in < 0)
            throw SpecInvariantViolated("need t >= 1 and burn_in >= 0");
        } else if constexpr (std::is_same_v<T, FiniteMixture>) {
          const size_t M = s.eta.size();
          if (M == 0 || s.component_eigs.size() != M || s.means.size() != M)
            throw DimensionMismatch("eta, component_eigs, means lengths differ");
          double sum = 0.0;
          for (double w : s.eta) {
            if (!(w >= 0.0))
              throw SpecInvariantViolated("eta must be nonnegative");
            sum += w;
          }
          if (std::abs(sum - 1.0) > 1e-9)
            throw SpecInvariantViolated("eta must sum to 1");
          for (size_t i = 0; i < M; ++i) {
            if (int(s.component_eigs[i].size()) != p)
              throw DimensionMismatch("component_eigs must have p entries");
            if (int(s.means[i].size()) != p)
              throw DimensionMismatch("means must have p entries");
            require_nonneg_finite(s.component_eigs[i], "component_eigs");
          }
        }
      },
      spec);
}

DataMatrix simulate(const ModelSpec& spec, int p, int n, std::uint64_t seed) {
  validate(spec, p, n);
  return std::visit(
      [&](const auto& s) -> DataMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidCovariance>)
          return sample_iid_covariance(s.sigma_eigs, p, n, seed);
        else if constexpr (std::is_same_v<T, Separable>)
          return sample_separable(s.a_eigs, s.b_weights, p, n, seed);
        else if constexpr (std::is_same_v<T, VarianceProfile>)
          return sample_variance_profile(s.profile, p, n, seed);
        else if constexpr (std::is_same_v<T, LinearProcess>)
          return sample_linear_process(s.psi, p, n, s.burn_in, seed);
        else if constexpr (std::is_same_v<T, DiffusionRCV>)
          return sample_diffusion_rcv(s.gamma, s.times, s.drift_bound, p, n,
                                      seed);
        else if constexpr (std::is_same_v<T, MatrixAR>)
          return sample_matrix_ar(s.a_eigs, s.b_diag, s.t, s.burn_in, p, n,
                                  seed);
        else
          return sample_mixture(s.eta, s.component_eigs, s.means, p, n, seed);
      },
      spec);
}

DataMatrix sample_iid_covariance(const std::vector<double>& sigma_eigs, int p,
                                 int n, std::uint64_t seed) {
  if (int(sigma_eigs.size()) != p)
    throw DimensionMismatch("sigma_eigs must have p entries");
  std::vector<double> root(sigma_eigs.size());
  for (size_t i = 0; i < root.size(); ++i) root[i] = std::sqrt(sigma_eigs[i]);
  DataMatrix X{Eigen::MatrixXd(p, n)};
  for (int j = 0; j < n; ++j) {
    Rng rng(seed, Rng::kNoise, std::uint64_t(j));
    for (int i = 0; i < p; ++i)
      X.entries(i, j) = root[size_t(i)] * rng.gaussian();
  }
  return X;
}

DataMatrix sample_separable(const std::vector<double>& a_eigs,
                            const std::vector<double>& b_weights, int p, int n,
                            std::uint64_t seed) {
  if (int(a_eigs.size()) != p || int(b_weights.size()) != n)
    throw DimensionMismatch("a_eigs / b_weights length mismatch");
  std::vector<double> root_a(a_eigs.size());
  for (size_t i = 0; i < root_a.size(); ++i) root_a[i] = std::sqrt(a_eigs[i]);
  DataMatrix X{Eigen::MatrixXd(p, n)};
  for (int j = 0; j < n; ++j) {
    Rng rng(seed, Rng::kNoise, std::uint64_t(j));
    const double root_b = std::sqrt(b_weights[size_t(j)]);
    for (int i = 0; i < p; ++i)
      X.entries(i, j) = root_b * (root_a[size_t(i)] * rng.gaussian());
  }
  return X;
}

DataMatrix sample_variance_profile(const Expr& profile, int p, int n,
                                   std::uint64_t seed) {
  DataMatrix X{Eigen::MatrixXd(p, n)};
  for (int j = 0; j < n; ++j) {
    Rng rng(seed, Rng::kNoise, std::uint64_t(j));
    const double t = double(j + 1) / double(n);
    for (int i = 0; i < p; ++i) {
      const double sigma = profile(double(i + 1) / double(p), t);
      if (!std::isfinite(sigma)) throw NonFiniteProfile();
      X.entries(i, j) = sigma * rng.gaussian();
    }
  }
  return X;
}

DataMatrix sample_linear_process(const std::vector<std::vector<double>>& psi,
                                 int p, int T, int burn_in,
                                 std::uint64_t seed) {
  if (psi.empty() || (psi.size() != 1 && int(psi.size()) != p))
    throw DimensionMismatch("psi needs 1 or p coefficient rows");
  const int lags = int(psi.front().size());
  const int J = std::max(burn_in, lags - 1);
  DataMatrix X{Eigen::MatrixXd(p, T)};
  std::vector<double> z(size_t(T + J));
  for (int i = 0; i < p; ++i) {
    const auto& coeffs = psi[psi.size() == 1 ? 0 : size_t(i)];
    Rng rng(seed, Rng::kNoise, std::uint64_t(i));
    for (double& v : z) v = rng.gaussian();
    // X_{i,t} = sum_j psi_j * Z_{i,t-j}, MA(inf) truncated at the table
    for (int t = 0; t < T; ++t) {
      double acc = 0.0;
      for (int j = 0; j < lags; ++j) acc += coeffs[size_t(j)] * z[size_t(t + J - j)];
      X.entries(i, t) = acc;
    }
  }
  return X;
}

std::vector<std::vector<double>> rcv_weights(const Expr& gamma,
                                             const std::vector<double>& times,
                                             int p) {
  const int n = int(times.size()) - 1;
  constexpr int kNodes = 33;  // composite Simpson, 32 subintervals
  std::vector<std::vector<double>> w(size_t(n),
                                     std::vector<double>(size_t(p), 0.0));
  for (int i = 0; i < n; ++i) {
    const double t0 = times[size_t(i)], t1 = times[size_t(i) + 1];
    const double h = (t1 - t0) / double(kNodes - 1);
    for (int l = 0; l < p; ++l) {
      const double s = double(l + 1) / double(p);
      double integral = 0.0;
      if (t1 > t0) {
        double acc = 0.0;
        for (int k = 0; k < kNodes; ++k) {
          const double g = gamma(s, t0 + k * h);
          if (!std::isfinite(g)) throw NonFiniteProfile();
          const double g2 = g * g;
          const double coef =
              (k == 0 || k == kNodes - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
          acc += coef * g2;
        }
        integral = acc * h / 3.0;
      }
      w[size_t(i)][size_t(l)] = double(n) * integral;
    }
  }
  return w;
}

DataMatrix sample_diffusion_rcv(const Expr& gamma,
                                const std::vector<double>& times,
                                double drift_bound, int p, int n,
                                std::uint64_t seed) {
  if (int(times.size()) != n + 1)
    throw BadPartition("times must have n+1 entries");
  const auto w = rcv_weights(gamma, times, p);
  std::vector<double> drift(size_t(p), 0.0);
  if (drift_bound > 0.0) {
    Rng rng(seed, Rng::kDrift, 0);
    for (double& mu : drift)
      mu = drift_bound * (2.0 * rng.uniform() - 1.0);
  }
  // Columns are sqrt(n) * increments, so that X X^T / n equals the realized
  // covariance matrix sum_i dX_i dX_i^T.
  DataMatrix X{Eigen::MatrixXd(p, n)};
  for (int i = 0; i < n; ++i) {
    Rng rng(seed, Rng::kNoise, std::uint64_t(i));
    const double dt = times[size_t(i) + 1] - times[size_t(i)];
    for (int l = 0; l < p; ++l) {
      double v = std::sqrt(w[size_t(i)][size_t(l)]) * rng.gaussian();
      v += std::sqrt(double(n)) * dt * drift[size_t(l)];
      X.entries(l, i) = v;
    }
  }
  return X;
}

DataMatrix sample_matrix_ar(const std::vector<double>& a_eigs,
                            const std::vector<double>& b_diag, int t,
                            int burn_in, int m, int n, std::uint64_t seed) {
  if (int(a_eigs.size()) != m || int(b_diag.size()) != n)
    throw DimensionMismatch("a_eigs / b_diag length mismatch");
  // Columns evolve independently: entry (i,l) is scalar AR(1) with
  // coefficient a_i * b_l. Iterate from X_0 = 0 for burn_in + t steps.
  DataMatrix X{Eigen::MatrixXd::Zero(m, n)};
  const int steps = burn_in + t;
  for (int l = 0; l < n; ++l) {
    Rng rng(seed, Rng::kNoise, std::uint64_t(l));
    const double b = b_diag[size_t(l)];
    for (int step = 0; step < steps; ++step) {
      for (int i = 0; i < m; ++i) {
        X.entries(i, l) =
            a_eigs[size_t(i)] * X.entries(i, l) * b + rng.gaussian();
      }
    }
  }
  return X;
}

DataMatrix sample_mixture(const std::vector<double>& eta,
                          const std::vector<std::vector<double>>& component_eigs,
                          const std::vector<std::vector<double>>& means, int p,
                          int n, std::uint64_t seed) {
  const size_t M = eta.size();
  if (component_eigs.size() != M || means.size() != M)
    throw DimensionMismatch("mixture component count mismatch");
  std::vector<std::vector<double>> roots(M);
  for (size_t k = 0; k < M; ++k) {
    if (int(component_eigs[k].size()) != p || int(means[k].size()) != p)
      throw DimensionMismatch("mixture component dimension mismatch");
    roots[k].resize(size_t(p));
    for (int i = 0; i < p; ++i)
      roots[k][size_t(i)] = std::sqrt(component_eigs[k][size_t(i)]);
  }
  DataMatrix X{Eigen::MatrixXd(p, n)};
  for (int j = 0; j < n; ++j) {
    // Component indices come from a separate substream so that the M=1
    // mixture reproduces the plain covariance sampler bit for bit.
    Rng idx_rng(seed, Rng::kIndex, std::uint64_t(j));
    const double u = idx_rng.uniform();
    size_t k = 0;
    double acc = 0.0;
    for (; k + 1 < M; ++k) {
      acc += eta[k];
      if (u < acc) break;
    }
    Rng rng(seed, Rng::kNoise, std::uint64_t(j));
    for (int i = 0; i < p; ++i)
      X.entries(i, j) =
          means[k][size_t(i)] + roots[k][size_t(i)] * rng.gaussian();
  }
  return X;
}

}  // namespace rmt
