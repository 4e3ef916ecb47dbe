#include "tbk/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "tbk/errors.hpp"
#include "tbk/parallel.hpp"

namespace tbk {

namespace {

void check_dense(int n) {
  if (n < 1 || n > kDenseCap) {
    throw CapacityError("dense evolution is limited to n <= " + std::to_string(kDenseCap) +
                        " (got n=" + std::to_string(n) + ")");
  }
}

std::vector<Permutation> enumerate(int n) {
  const std::uint64_t count = factorial(n);
  std::vector<Permutation> all;
  all.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) all.push_back(unrank(r, n));
  return all;
}

}  // namespace

DenseDistribution DenseDistribution::point_mass(const Permutation& g) {
  check_dense(g.size());
  std::vector<double> probs(factorial(g.size()), 0.0);
  probs[rank(g).value] = 1.0;
  return DenseDistribution(g.size(), std::move(probs));
}

DenseDistribution DenseDistribution::identity(int n) {
  return point_mass(Permutation::identity(n));
}

DenseDistribution DenseDistribution::uniform(int n) {
  check_dense(n);
  const std::uint64_t count = factorial(n);
  return DenseDistribution(n, std::vector<double>(count, 1.0 / static_cast<double>(count)));
}

DenseDistribution DenseDistribution::from_measure(const SparseMeasure& q) {
  check_dense(q.degree());
  std::vector<double> probs(factorial(q.degree()), 0.0);
  for (const auto& [g, w] : q.atoms()) probs[rank(g).value] = to_double(w);
  return DenseDistribution(q.degree(), std::move(probs));
}

DenseDistribution DenseDistribution::from_values(int n, std::vector<double> probs) {
  check_dense(n);
  if (probs.size() != factorial(n)) throw DomainError("dense vector length must be n!");
  for (double& p : probs) {
    if (p < -1e-15) throw DomainError("dense distribution has a negative entry");
    if (p < 0.0) p = 0.0;
  }
  return DenseDistribution(n, std::move(probs));
}

double DenseDistribution::at(const Permutation& g) const {
  if (g.size() != n_) throw DomainError("degree mismatch");
  return probs_[rank(g).value];
}

double DenseDistribution::total_mass() const {
  CompensatedSum sum;
  for (double p : probs_) sum.add(p);
  return sum.value();
}

TransitionKernel::TransitionKernel(const SparseMeasure& q) : n_(q.degree()) {
  check_dense(n_);
  const std::vector<Permutation> all = enumerate(n_);
  for (const auto& [s, w] : q.atoms()) {
    const Permutation s_inv = inverse(s);
    std::vector<std::uint32_t> source(all.size());
    for (std::size_t g = 0; g < all.size(); ++g) {
      source[g] = static_cast<std::uint32_t>(rank(compose(all[g], s_inv)).value);
    }
    weights_.push_back(to_double(w));
    sources_.push_back(std::move(source));
  }
}

DenseDistribution TransitionKernel::step(const DenseDistribution& d) const {
  if (d.degree() != n_) throw DomainError("distribution and kernel degree differ");
  const auto in = d.probs();
  std::vector<double> out(in.size(), 0.0);
  parallel_for(out.size(), 4096, [&](std::size_t begin, std::size_t end) {
    for (std::size_t g = begin; g < end; ++g) {
      double acc = 0.0;
      for (std::size_t a = 0; a < weights_.size(); ++a) acc += in[sources_[a][g]] * weights_[a];
      out[g] = acc;
    }
  });
  return DenseDistribution::from_values(n_, std::move(out));
}

DenseDistribution convolve_step(const DenseDistribution& d, const SparseMeasure& q) {
  if (d.degree() != q.degree()) throw DomainError("distribution and measure degree differ");
  return TransitionKernel(q).step(d);
}

double tv_distance(const DenseDistribution& d) {
  const double u = 1.0 / static_cast<double>(d.size());
  CompensatedSum sum;
  for (double p : d.probs()) sum.add(std::abs(p - u));
  return 0.5 * sum.value();
}

double lp_distance(const DenseDistribution& d, int p) {
  const double size = static_cast<double>(d.size());
  CompensatedSum sum;
  if (p == 1) {
    for (double x : d.probs()) sum.add(std::abs(x * size - 1.0));
    return sum.value() / size;
  }
  if (p == 2) {
    for (double x : d.probs()) {
      const double r = x * size - 1.0;
      sum.add(r * r);
    }
    return std::sqrt(sum.value() / size);
  }
  throw DomainError("lp_distance supports p in {1, 2}");
}

const char* metric_name(Metric m) { return m == Metric::TotalVariation ? "tv" : "l2"; }

double mixing_threshold(Metric m) {
  return m == Metric::TotalVariation ? 1.0 / (2.0 * std::numbers::e) : 1.0 / std::numbers::e;
}

std::vector<ProfilePoint> distance_profile(const SparseMeasure& q, int m_max) {
  if (m_max < 0) throw DomainError("m_max must be >= 0");
  const TransitionKernel kernel(q);
  DenseDistribution d = DenseDistribution::identity(q.degree());
  std::vector<ProfilePoint> profile;
  profile.reserve(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0;; ++m) {
    profile.push_back({m, tv_distance(d), lp_distance(d, 2)});
    if (m == m_max) break;
    d = kernel.step(d);
  }
  return profile;
}

MixingReport mixing_time(const SparseMeasure& q, Metric metric, int m_max,
                         std::string descriptor) {
  if (m_max < 0) throw DomainError("m_max must be >= 0");
  MixingReport report;
  report.measure = std::move(descriptor);
  report.metric = metric;
  report.threshold = mixing_threshold(metric);
  report.m_max = m_max;
  const TransitionKernel kernel(q);
  DenseDistribution d = DenseDistribution::identity(q.degree());
  for (int m = 0;; ++m) {
    const ProfilePoint point{m, tv_distance(d), lp_distance(d, 2)};
    report.profile.push_back(point);
    const double value = metric == Metric::TotalVariation ? point.tv : point.l2;
    if (value <= report.threshold) {
      report.mixing_time = m;
      break;
    }
    if (m == m_max) break;
    d = kernel.step(d);
  }
  return report;
}

SpectrumReport spectrum(const SparseMeasure& q, bool allow_n7) {
  const int n = q.degree();
  const int cap = allow_n7 ? kEigenOptInCap : kEigenCap;
  if (n > cap) {
    throw CapacityError("spectrum is limited to n <= " + std::to_string(cap) +
                        (allow_n7 ? "" : " (n = 7 needs the opt-in flag)"));
  }
  if (!q.is_symmetric()) throw DomainError("spectrum requires a symmetric measure");
  const std::vector<Permutation> all = enumerate(n);
  const auto size = static_cast<Eigen::Index>(all.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  const auto atoms = q.atoms_as_double();
  for (Eigen::Index x = 0; x < size; ++x) {
    for (const auto& [s, w] : atoms) {
      const auto y = static_cast<Eigen::Index>(rank(compose(all[static_cast<std::size_t>(x)], s)).value);
      m(x, y) += w;
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigendecomposition failed", {});
  }
  SpectrumReport report;
  const auto& values = solver.eigenvalues();
  report.eigenvalues.assign(values.data(), values.data() + values.size());
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end());
  report.beta_min = report.eigenvalues.front();
  report.spectral_gap =
      report.eigenvalues.size() > 1 ? 1.0 - report.eigenvalues[report.eigenvalues.size() - 2] : 0.0;
  return report;
}

Rational beta_min_formula(int n, int k) {
  if (k <= 1 || k > n) throw DomainError("beta_min_formula needs n >= k > 1");
  return Rational(-1) + Rational(k - 1, k * (n - k + 2) * (n + 1));
}

BetaMinCheck beta_min_bound_check(int n, int k, bool allow_n7) {
  BetaMinCheck check;
  check.n = n;
  check.k = k;
  check.formula = beta_min_formula(n, k);
  check.exact_beta_min = spectrum(symmetrize(top_to_bottom_k(n, k)), allow_n7).beta_min;
  check.holds = check.exact_beta_min >= to_double(check.formula);
  return check;
}

double l2_from_spectrum(const SpectrumReport& spectrum, int m) {
  if (m < 0) throw DomainError("m must be >= 0");
  // Everything except the single top eigenvalue (the constants).
  CompensatedSum sum;
  for (std::size_t i = 0; i + 1 < spectrum.eigenvalues.size(); ++i) {
    sum.add(std::pow(spectrum.eigenvalues[i], 2.0 * m));
  }
  return sum.value();
}

double l2_from_spectrum(const SparseMeasure& q, int m) { return l2_from_spectrum(spectrum(q), m); }

bool TransferReport::all_hold() const {
  return t_le_t2 && t2_le_twice_star &&
         std::all_of(lazy_checks.begin(), lazy_checks.end(),
                     [](const LazyTransferCheck& c) { return c.holds; });
}

TransferReport transfer_checks(int n, int k, std::span<const double> epsilons,
                               const Rational& laziness, int m_max) {
  check_dense(n);
  TransferReport report;
  report.n = n;
  report.k = k;
  report.laziness = laziness;
  const SparseMeasure q = top_to_bottom_k(n, k);
  report.t_tv = mixing_time(q, Metric::TotalVariation, m_max).mixing_time;
  report.t_l2 = mixing_time(q, Metric::L2, m_max).mixing_time;
  report.t_l2_star =
      mixing_time(convolve_measures(q, reversal(q)), Metric::L2, m_max).mixing_time;
  report.t_lazy = mixing_time(lazy(q, laziness), Metric::TotalVariation, m_max).mixing_time;

  report.t_le_t2 = report.t_tv && report.t_l2 && *report.t_tv <= *report.t_l2;
  // T_2(q * q^*) = infinity when q * q^* lives on a proper subgroup.
  report.t2_le_twice_star =
      report.t_l2 && (!report.t_l2_star || *report.t_l2 <= 2 * *report.t_l2_star);

  const double p = to_double(laziness);
  for (double eps : epsilons) {
    if (eps <= 0.0 || eps >= 1.0) throw DomainError("epsilon must lie in (0,1)");
    LazyTransferCheck c;
    c.epsilon = eps;
    c.scaled_term = report.t_tv ? (2.0 + eps) / p * *report.t_tv : 0.0;
    c.constant_term = 80.0 / (p * eps * eps);
    c.holds = report.t_tv && report.t_lazy &&
              *report.t_lazy <= std::max(c.scaled_term, c.constant_term);
    report.lazy_checks.push_back(c);
  }
  return report;
}

}  // namespace tbk
