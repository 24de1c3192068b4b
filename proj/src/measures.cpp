#include "rmt/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rmt {

DiscreteMeasure::DiscreteMeasure(std::vector<std::vector<double>> atoms,
                                 std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {}

DiscreteMeasure DiscreteMeasure::make(std::vector<std::vector<double>> atoms,
                                      std::vector<double> weights) {
  if (atoms.empty() || weights.empty()) throw EmptyMeasure();
  if (atoms.size() != weights.size())
    throw MeasureError("atoms and weights differ in length");
  const size_t d = atoms.front().size();
  if (d == 0) throw MeasureError("atom dimension must be >= 1");
  for (const auto& a : atoms) {
    if (a.size() != d) throw MeasureError("atoms differ in dimension");
    for (double v : a)
      if (!std::isfinite(v)) throw MeasureError("atom is not finite");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw NegativeWeight();
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw WeightSumMismatch(sum);
  for (double& w : weights) w /= sum;
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::from_scalars(
    const std::vector<double>& atoms, const std::vector<double>& weights) {
  std::vector<std::vector<double>> vec_atoms;
  vec_atoms.reserve(atoms.size());
  for (double a : atoms) vec_atoms.push_back({a});
  return make(std::move(vec_atoms), weights);
}

DiscreteMeasure DiscreteMeasure::point_mass(double a) {
  return from_scalars({a}, {1.0});
}

DiscreteMeasure DiscreteMeasure::esd_of(const std::vector<double>& values) {
  if (values.empty()) throw EmptyMeasure();
  std::vector<double> w(values.size(), 1.0 / double(values.size()));
  return from_scalars(values, w);
}

DiscreteMeasure DiscreteMeasure::uniform01(int Q) { return uniform_on(1.0, Q); }

DiscreteMeasure DiscreteMeasure::uniform_on(double L, int Q) {
  if (Q < 2) throw MeasureError("uniform discretization needs Q >= 2");
  std::vector<double> atoms(Q), w(Q, 1.0 / double(Q));
  for (int j = 0; j < Q; ++j) atoms[j] = L * (j + 0.5) / double(Q);
  return from_scalars(atoms, w);
}

std::complex<double> DiscreteMeasure::integrate(
    const std::function<std::complex<double>(std::span<const double>)>& phi)
    const {
  std::complex<double> sum{0.0, 0.0};
  for (size_t j = 0; j < atoms_.size(); ++j) {
    const std::complex<double> v = phi(atoms_[j]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NonFiniteIntegrand();
    sum += weights_[j] * v;
  }
  return sum;
}

double DiscreteMeasure::integrate_real(
    const std::function<double(std::span<const double>)>& phi) const {
  double sum = 0.0;
  for (size_t j = 0; j < atoms_.size(); ++j) {
    const double v = phi(atoms_[j]);
    if (!std::isfinite(v)) throw NonFiniteIntegrand();
    sum += weights_[j] * v;
  }
  return sum;
}

double DiscreteMeasure::quantile(double s) const {
  if (!(s > 0.0 && s < 1.0)) throw OutOfRange();
  if (dim() != 1) throw MeasureError("quantile requires scalar atoms");
  std::vector<size_t> order(size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return atoms_[a][0] < atoms_[b][0];
  });
  double acc = 0.0;
  for (size_t j : order) {
    acc += weights_[j];
    if (acc >= s - 1e-15) return atoms_[j][0];
  }
  return atoms_[order.back()][0];
}

double DiscreteMeasure::mean() const {
  if (dim() != 1) throw MeasureError("mean requires scalar atoms");
  double m = 0.0;
  for (size_t j = 0; j < size(); ++j) m += weights_[j] * atoms_[j][0];
  return m;
}

EmpiricalDistribution EmpiricalDistribution::from(std::vector<double> values) {
  if (values.empty()) throw EmptyMeasure();
  std::sort(values.begin(), values.end());
  return EmpiricalDistribution{std::move(values)};
}

double EmpiricalDistribution::quantile(double s) const {
  if (!(s > 0.0 && s < 1.0)) throw OutOfRange();
  const double n = double(samples.size());
  // inf{u : F(u) >= s} with F the step CDF jumping by 1/n at each sample
  const size_t k = size_t(std::ceil(s * n - 1e-12));
  return samples[std::min(k == 0 ? 0 : k - 1, samples.size() - 1)];
}

double EmpiricalDistribution::cdf(double x) const {
  const auto it = std::upper_bound(samples.begin(), samples.end(), x);
  return double(it - samples.begin()) / double(samples.size());
}

QuantileFunction QuantileFunction::from(std::vector<double> values) {
  if (values.size() < 2) throw MeasureError("quantile table needs Q >= 2");
  if (!std::is_sorted(values.begin(), values.end()))
    throw MeasureError("quantile table must be nondecreasing");
  return QuantileFunction{std::move(values)};
}

QuantileFunction QuantileFunction::tabulate(const DiscreteMeasure& m, int Q) {
  if (Q < 2) throw MeasureError("quantile table needs Q >= 2");
  std::vector<double> v(Q);
  for (int j = 0; j < Q; ++j) v[j] = m.quantile((j + 0.5) / double(Q));
  return QuantileFunction{std::move(v)};
}

double QuantileFunction::quantile(double s) const {
  if (!(s > 0.0 && s < 1.0)) throw OutOfRange();
  const int Q = int(values.size());
  int j = int(std::floor(s * Q));
  j = std::clamp(j, 0, Q - 1);
  return values[size_t(j)];
}

double Cdf::eval(double t) const {
  if (x.empty()) return 0.0;
  if (t < x.front()) return 0.0;
  if (t >= x.back()) return value_at.back();
  const auto it = std::upper_bound(x.begin(), x.end(), t);
  const size_t i = size_t(it - x.begin()) - 1;  // x[i] <= t < x[i+1]
  const double span = x[i + 1] - x[i];
  const double frac = span > 0.0 ? (t - x[i]) / span : 0.0;
  return value_at[i] + frac * (value_before[i + 1] - value_at[i]);
}

double Cdf::eval_left(double t) const {
  if (x.empty()) return 0.0;
  const auto it = std::lower_bound(x.begin(), x.end(), t);
  if (it != x.end() && *it == t) return value_before[size_t(it - x.begin())];
  return eval(t);
}

Cdf Cdf::from_empirical(const EmpiricalDistribution& e) {
  Cdf c;
  const double n = double(e.samples.size());
  double acc = 0.0;
  for (size_t i = 0; i < e.samples.size();) {
    size_t j = i;
    while (j < e.samples.size() && e.samples[j] == e.samples[i]) ++j;
    c.x.push_back(e.samples[i]);
    c.value_before.push_back(acc);
    acc += double(j - i) / n;
    c.value_at.push_back(acc);
    i = j;
  }
  c.value_at.back() = 1.0;
  return c;
}

Cdf Cdf::from_discrete(const DiscreteMeasure& m) {
  if (m.dim() != 1) throw MeasureError("CDF requires scalar atoms");
  std::vector<std::pair<double, double>> aw(m.size());
  for (size_t j = 0; j < m.size(); ++j)
    aw[j] = {m.scalar_atom(j), m.weight(j)};
  std::sort(aw.begin(), aw.end());
  Cdf c;
  double acc = 0.0;
  for (size_t i = 0; i < aw.size();) {
    size_t j = i;
    double w = 0.0;
    while (j < aw.size() && aw[j].first == aw[i].first) w += aw[j++].second;
    c.x.push_back(aw[i].first);
    c.value_before.push_back(acc);
    acc += w;
    c.value_at.push_back(acc);
    i = j;
  }
  c.value_at.back() = 1.0;
  return c;
}

double kolmogorov_distance(const Cdf& F, const Cdf& G) {
  if (F.x.empty() || G.x.empty()) throw EmptyMeasure();
  double sup = 0.0;
  auto probe = [&](double t) {
    sup = std::max(sup, std::abs(F.eval(t) - G.eval(t)));
    sup = std::max(sup, std::abs(F.eval_left(t) - G.eval_left(t)));
  };
  for (double t : F.x) probe(t);
  for (double t : G.x) probe(t);
  return sup;
}

double wasserstein1(const Cdf& F, const Cdf& G) {
  if (F.x.empty() || G.x.empty()) throw EmptyMeasure();
  std::vector<double> pts;
  pts.reserve(F.x.size() + G.x.size());
  pts.insert(pts.end(), F.x.begin(), F.x.end());
  pts.insert(pts.end(), G.x.begin(), G.x.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    // both CDFs are linear on (a, b); integrate |d0 + (d1-d0)*u| exactly
    const double d0 = F.eval(a) - G.eval(a);
    const double d1 = F.eval_left(b) - G.eval_left(b);
    const double w = b - a;
    if (d0 * d1 >= 0.0) {
      total += 0.5 * w * (std::abs(d0) + std::abs(d1));
    } else {
      const double t = d0 / (d0 - d1);  // crossing point in [0,1]
      total += 0.5 * w * (t * std::abs(d0) + (1.0 - t) * std::abs(d1));
    }
  }
  return total;
}

}  // namespace rmt
