// Acceptance gate: one PASS/FAIL line per criterion.  Exit status is 0 only
// when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tbk/coupling.hpp"
#include "tbk/exact.hpp"
#include "tbk/flow.hpp"
#include "tbk/measure.hpp"
#include "tbk/wilson.hpp"

using namespace tbk;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void note(const std::string& s) { lines.push_back(s); }
  void require(bool ok, const std::string& s) {
    if (!ok) {
      pass = false;
      lines.push_back("violated: " + s);
    }
  }
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

const nlohmann::json& fixtures() {
  static const nlohmann::json data = [] {
    std::ifstream in(TBK_FIXTURES);
    return nlohmann::json::parse(in);
  }();
  return data;
}

std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : "none"; }

Outcome exact_suite() {
  Outcome out;
  int cases = 0;
  double worst_reversal = 0.0;
  for (int n = 2; n <= 6; ++n) {
    for (int k = 2; k <= n; ++k) {
      const SparseMeasure q = top_to_bottom_k(n, k);
      const std::vector<std::pair<std::string, SparseMeasure>> walks{
          {"q", q}, {"qtilde", symmetrize(q)}, {"qhat", lazy(q, Rational(1, 2))}};
      for (const auto& [name, walk] : walks) {
        const std::string id = name + fmt("(%d,%d)", n, k);
        const MixingReport tv = mixing_time(walk, Metric::TotalVariation, 5000);
        const MixingReport l2 = mixing_time(walk, Metric::L2, 5000);
        ++cases;
        if (l2.mixing_time) {
          out.require(tv.mixing_time && *tv.mixing_time <= *l2.mixing_time,
                      id + ": T=" + opt(tv.mixing_time) + " > T2=" + opt(l2.mixing_time));
        } else {
          out.note(id + ": T2 not reached within 5000 steps");
        }
        if (!tv.mixing_time) {
          out.note(id + ": T not reached within 5000 steps");
          continue;
        }
        const int t = *tv.mixing_time;
        const auto profile = distance_profile(walk, std::max(30, 4 * t));
        for (const auto& p : profile) {
          if (p.step < t) continue;
          const double limit = std::exp(-static_cast<double>(p.step / t));
          out.require(p.tv <= limit + 1e-15, id + fmt(": d(%d)=%.6g > e^-floor(m/T)=%.6g", p.step, p.tv, limit));
        }
      }
      const auto forward = distance_profile(q, 30);
      const auto backward = distance_profile(reversal(q), 30);
      for (int m = 0; m <= 30; ++m) {
        const double dtv = std::abs(forward[m].tv - backward[m].tv);
        const double dl2 = std::abs(forward[m].l2 - backward[m].l2);
        worst_reversal = std::max({worst_reversal, dtv, dl2});
        out.require(dtv <= 1e-12 && dl2 <= 1e-12, fmt("reversal mismatch at n=%d k=%d m=%d", n, k, m));
      }
    }
  }
  out.note(fmt("%d walks checked for T <= T2 and sub-multiplicativity; max reversal discrepancy %.3g", cases,
               worst_reversal));
  return out;
}

Outcome beta_min_suite() {
  Outcome out;
  double tightest = 1e9;
  for (int n = 2; n <= 6; ++n) {
    for (int k = 2; k <= n; ++k) {
      const BetaMinCheck check = beta_min_bound_check(n, k);
      const double formula = to_double(check.formula);
      tightest = std::min(tightest, check.exact_beta_min - formula);
      out.require(check.holds, fmt("n=%d k=%d exact %.12g < formula %.12g", n, k, check.exact_beta_min, formula));
      if (n >= 3) {
        const double odd = odd_flow_eigenvalue_bound(build_odd_flow_tbk(n, k));
        out.require(odd <= check.exact_beta_min + 1e-12,
                    fmt("n=%d k=%d odd-flow bound %.12g > exact %.12g", n, k, odd, check.exact_beta_min));
      }
    }
  }
  out.note(fmt("smallest margin exact - formula = %.6g", tightest));
  return out;
}

Outcome coupling_consistency() {
  Outcome out;
  const int n = 5;
  const int trials = 10000;
  for (int k : {2, 3, 5}) {
    const auto profile = distance_profile(top_to_bottom_k(n, k), 30);
    for (auto kind : {CouplingKind::BottomKToTop, CouplingKind::TopInsert}) {
      CouplingOptions opts;
      opts.n = n;
      opts.k = k;
      opts.kind = kind;
      const auto stats = coupling_trials(opts, trials, 3000 + static_cast<std::uint64_t>(k));
      double slack = 1e9;
      for (int m = 0; m <= 30; ++m) {
        const Proportion p = tail_probability(stats, m);
        // Standard error under P(T > m) = TV.
        const double tv = profile[m].tv;
        const double sigma = std::sqrt(tv * (1 - tv) / trials);
        const double lhs = p.estimate + 3 * sigma;
        slack = std::min(slack, lhs - tv);
        out.require(lhs >= tv, fmt("k=%d %s m=%d: %.5f + 3 sigma < TV %.5f", k, coupling_name(kind), m,
                                              p.estimate, profile[m].tv));
      }
      out.note(fmt("k=%d %s: min slack %.4f", k, coupling_name(kind), slack));
    }
  }
  return out;
}

Outcome cutoff_trend() {
  Outcome out;
  std::vector<double> tail_margin, stat_margin;
  for (int n : {100, 200, 400}) {
    const double nlogn = n * std::log(static_cast<double>(n));
    CouplingOptions opts;
    opts.n = n;
    opts.k = n;
    const auto stats = coupling_trials(opts, 1000, 4000 + static_cast<std::uint64_t>(n));
    const auto m_upper = static_cast<long long>(std::floor(1.25 * nlogn));
    const Proportion tail = tail_probability(stats, m_upper);
    const auto m_lower = static_cast<long long>(std::floor(0.75 * nlogn));
    const auto lower = increasing_bottom_statistic(n, n, 6, m_lower, 1000, 5000 + static_cast<std::uint64_t>(n));
    tail_margin.push_back(0.1 - tail.estimate);
    stat_margin.push_back(lower.lower_bound - 0.5);
    out.require(tail.estimate <= 0.1, fmt("n=%d P(T > %lld) = %.4f > 0.1", n, m_upper, tail.estimate));
    out.require(lower.lower_bound >= 0.5,
                fmt("n=%d increasing-bottom statistic at m=%lld is %.4f < 0.5", n, m_lower, lower.lower_bound));
    out.note(fmt("n=%d P(T > %lld) = %.4f (sigma %.4f); statistic at m=%lld = %.4f", n, m_upper, tail.estimate,
                 tail.sigma, m_lower, lower.lower_bound));
  }
  for (std::size_t i = 1; i < tail_margin.size(); ++i) {
    out.require(tail_margin[i] > tail_margin[i - 1], fmt("tail margin not improving: %.4f -> %.4f",
                                                         tail_margin[i - 1], tail_margin[i]));
    out.require(stat_margin[i] > stat_margin[i - 1], fmt("statistic margin not improving: %.4f -> %.4f",
                                                         stat_margin[i - 1], stat_margin[i]));
  }
  return out;
}

Outcome lazy_trend() {
  Outcome out;
  const int n = 200;
  CouplingOptions opts;
  opts.n = n;
  opts.k = n;
  opts.laziness = 0.5;
  const auto stats = coupling_trials(opts, 1000, 6000);
  const auto m = static_cast<long long>(std::floor(2.5 * n * std::log(static_cast<double>(n))));
  const Proportion tail = tail_probability(stats, m);
  out.require(tail.estimate <= 0.1, fmt("P(T > %lld) = %.4f > 0.1", m, tail.estimate));
  out.note(fmt("n=200 p=1/2: P(T > %lld) = %.4f (sigma %.4f)", m, tail.estimate, tail.sigma));
  return out;
}

Outcome wilson_suite() {
  Outcome out;
  const double low = fixtures().at("wilson_band").at("low").get<double>();
  const double high = fixtures().at("wilson_band").at("high").get<double>();
  std::vector<long long> bounds;
  for (int n : {16, 32, 64, 128, 256}) {
    const WilsonReport r = wilson_params(n, 0.5, 10000, 7000 + static_cast<std::uint64_t>(n));
    const double gap = r.params.gamma * n * n * n;
    const double plain = step_bound_formula(r.params);
    const double lazy_ratio = r.lazy_closed_form / plain;
    out.require(r.newton.residual <= 1e-12 * n, fmt("n=%d Newton residual %.3g", n, r.newton.residual));
    out.require(r.chi.residual_sum <= 1e-8, fmt("n=%d chi residual %.3g", n, r.chi.residual_sum));
    out.require(r.eigen_residual <= 1e-9, fmt("n=%d eigenfunction residual %.3g", n, r.eigen_residual));
    out.require(gap >= low && gap <= high, fmt("n=%d n^3 gamma = %.3f outside [%g, %g]", n, gap, low, high));
    out.require(lazy_ratio >= 1.8 && lazy_ratio <= 2.2, fmt("n=%d lazy/plain ratio %.4f", n, lazy_ratio));
    out.note(fmt("n=%d |f|=%.2g chi=%.2g eig=%.2g n^3gamma=%.2f R n^2=%.1f t=%lld lazy/plain=%.4f", n,
                 r.newton.residual, r.chi.residual_sum, r.eigen_residual, gap, r.params.r * n * n, r.bound_t,
                 lazy_ratio));
    bounds.push_back(r.bound_t);
  }
  const int sizes[] = {16, 32, 64, 128, 256};
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    if (bounds[i - 1] <= 0) {
      out.require(false, fmt("t(%d)/t(%d) undefined: t(%d) = %lld", sizes[i], sizes[i - 1], sizes[i - 1],
                             bounds[i - 1]));
      continue;
    }
    const double ratio = static_cast<double>(bounds[i]) / static_cast<double>(bounds[i - 1]);
    out.require(ratio >= 7 && ratio <= 9.5, fmt("t(%d)/t(%d) = %.3f outside [7, 9.5]", sizes[i], sizes[i - 1], ratio));
  }
  return out;
}

Outcome flow_suite() {
  Outcome out;
  int verified = 0;
  for (int n = 3; n <= 12; ++n) {
    std::vector<Flow> flows;
    for (int k = 2; k <= n; ++k) {
      flows.push_back(build_flow_general(n, k));
      flows.push_back(build_flow_rudvalis(n, k));
      flows.push_back(build_odd_flow_tbk(n, k));
    }
    for (int c = 0; n > 2 * c + 2; ++c) flows.push_back(build_flow_large_k(n, c));
    for (const Flow& f : flows) {
      const FlowVerification v = verify_flow(f);
      ++verified;
      out.require(v.ok(), fmt("n=%d ", n) + f.target_name + " over " + f.comparison_name + " failed verification");
      if (n <= 8 && f.target_name != "delta_e") {
        const FlowReport report = congestion_A(f);
        const Rational lower = congestion_lower_bound(f.target, f.comparison);
        out.require(lower <= report.a, fmt("n=%d ", n) + f.target_name + " over " + f.comparison_name +
                                           ": lower bound " + to_string(lower) + " > A " + to_string(report.a));
      }
    }
  }
  out.note(fmt("%d flows verified for endpoints, letters, parity and exact marginals", verified));
  int general_strict = 0, general_total = 0;
  double general_worst = 0.0, rudvalis_worst = 0.0;
  for (int n : {8, 12, 16, 24, 40}) {
    for (int k = 2; k <= n; ++k) {
      const Rational a = congestion_A(build_flow_general(n, k)).a;
      const Rational bound = general_flow_bound(n, k);
      ++general_total;
      general_strict += a <= bound;
      general_worst = std::max(general_worst, to_double(a / bound));
      out.require(a <= 2 * bound, fmt("general n=%d k=%d A=%.6g > 2 x %.6g", n, k, to_double(a), to_double(bound)));
      const Rational ar = congestion_A(build_flow_rudvalis(n, k)).a;
      const Rational br = rudvalis_flow_bound(n, k);
      rudvalis_worst = std::max(rudvalis_worst, to_double(ar / br));
      out.require(ar <= br, fmt("rudvalis n=%d k=%d A=%.6g > %.6g", n, k, to_double(ar), to_double(br)));
    }
  }
  out.note(fmt("general flow: max A/bound = %.4f, %d of %d within the unscaled bound; rudvalis max A/bound = %.4f",
               general_worst, general_strict, general_total, rudvalis_worst));
  return out;
}

Outcome dirichlet_suite() {
  Outcome out;
  int checks = 0;
  double worst = 0.0;
  for (int n : {4, 5}) {
    const auto size = static_cast<std::size_t>(factorial(n));
    for (int k = 2; k <= n; ++k) {
      const Flow general = build_flow_general(n, k);
      const Flow rudvalis = build_flow_rudvalis(n, k);
      const double a_general = congestion_A(general).a_value;
      const double a_rudvalis = congestion_A(rudvalis).a_value;
      Rng rng(8000 + static_cast<std::uint64_t>(10 * n + k), 0);
      for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> f(size);
        for (double& x : f) x = 2 * rng.uniform01() - 1;
        for (const auto* flow : {&general, &rudvalis}) {
          const double a = flow == &general ? a_general : a_rudvalis;
          const double lhs = dirichlet_form(f, flow->target);
          const double rhs = a * dirichlet_form(f, flow->comparison);
          worst = std::max(worst, lhs / rhs);
          ++checks;
          out.require(lhs <= rhs * (1 + 1e-12), fmt("n=%d k=%d trial %d: ", n, k, trial) + flow->target_name +
                                                    fmt(" form %.6g > A x %.6g", lhs, rhs / a));
        }
      }
    }
  }
  out.note(fmt("%d comparisons, max E_target / (A E_comparison) = %.4f", checks, worst));
  return out;
}

Outcome transfer_suite() {
  Outcome out;
  const std::vector<double> eps{0.1, 0.5, 0.9};
  int vacuous = 0, cases = 0;
  for (int n = 2; n <= 5; ++n) {
    for (int k = 2; k <= n; ++k) {
      const TransferReport r = transfer_checks(n, k, eps);
      ++cases;
      vacuous += !r.t_l2_star.has_value();
      out.require(r.all_hold(), fmt("n=%d k=%d: T=%s T2=%s T2*=%s T_lazy=%s", n, k, opt(r.t_tv).c_str(),
                                    opt(r.t_l2).c_str(), opt(r.t_l2_star).c_str(), opt(r.t_lazy).c_str()));
    }
  }
  out.note(fmt("%d (n,k) pairs; %d with q*q^* confined to a subgroup", cases, vacuous));
  return out;
}

Outcome collector_suite() {
  Outcome out;
  const CollectorStats big = coupon_collector(1000, 0, 200, 9000);
  out.require(big.mean_over_nlogn >= 0.95 && big.mean_over_nlogn <= 1.15,
              fmt("n=1000 mean/(n ln n) = %.4f", big.mean_over_nlogn));
  const int trials = 10000;
  const CollectorStats small = coupon_collector(3, 0, trials, 9001);
  const double se = small.stddev / std::sqrt(static_cast<double>(trials));
  out.require(std::abs(small.mean - 5.5) <= 3 * se, fmt("n=3 mean %.4f not within 3 sigma of 5.5", small.mean));
  out.note(fmt("n=1000: %.4f; n=3: mean %.4f (se %.4f)", big.mean_over_nlogn, small.mean, se));
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact small-n suite", exact_suite},
      {"least eigenvalue bound", beta_min_suite},
      {"coupling consistency", coupling_consistency},
      {"cutoff trend k = n", cutoff_trend},
      {"lazy doubling trend", lazy_trend},
      {"eigenfunction lower bound", wilson_suite},
      {"flow suite", flow_suite},
      {"Dirichlet comparison", dirichlet_suite},
      {"transfer suite", transfer_suite},
      {"coupon collector", collector_suite},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.note(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !outcome.pass;
    std::printf("criterion %zu: %s  %s (%.1fs)\n", i + 1, outcome.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                seconds);
    std::size_t shown = 0;
    for (const auto& line : outcome.lines) {
      if (line.rfind("violated", 0) == 0 && ++shown > 8) continue;
      std::printf("    %s\n", line.c_str());
    }
    if (shown > 8) std::printf("    ... %zu further violations\n", shown - 8);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
