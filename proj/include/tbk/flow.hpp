#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "tbk/measure.hpp"
#include "tbk/permutation.hpp"

namespace tbk {

/// One generator letter: sigma_l, sigma_l^-1, or tau = (1 n).
struct Letter {
  enum class Kind : std::uint8_t { Cycle, CycleInverse, Tau };
  Kind kind = Kind::Cycle;
  std::uint16_t l = 1;

  static Letter cycle(int l) { return {Kind::Cycle, static_cast<std::uint16_t>(l)}; }
  static Letter cycle_inverse(int l) { return {Kind::CycleInverse, static_cast<std::uint16_t>(l)}; }
  static Letter tau() { return {Kind::Tau, 0}; }

  Letter inverse() const;
  /// "s3", "s3inv", "t".
  std::string name() const;
  static Letter parse(const std::string& name);
  Permutation element(int n) const;

  bool operator==(const Letter&) const = default;
};

using Word = std::vector<Letter>;

/// Product of the letters in written order (successive right multiplication).
Permutation evaluate_word(const Word& word, int n);
/// Reversed word with every letter inverted.
Word inverse_word(const Word& word);

/// Like evaluate_word, but every letter must lie in the support of q.
Permutation path_endpoint(const Word& word, const SparseMeasure& q);

struct WeightedPath {
  Word word;
  Rational weight;
};

struct Flow {
  int n = 0;
  std::string target_name;
  SparseMeasure target;
  std::string comparison_name;
  SparseMeasure comparison;
  std::vector<WeightedPath> paths;
  bool odd_only = false;
  /// Construction remarks carried into reports.
  std::vector<std::string> notes;

  Flow(int degree, std::string tname, SparseMeasure t, std::string cname, SparseMeasure c)
      : n(degree), target_name(std::move(tname)), target(std::move(t)),
        comparison_name(std::move(cname)), comparison(std::move(c)) {}
};

struct FlowVerification {
  bool letters_ok = true;
  bool parity_ok = true;
  bool marginals_ok = true;
  std::vector<std::string> discrepancies;

  bool ok() const { return letters_ok && parity_ok && marginals_ok; }
};

/// Exact check of letters, parity and marginals (sum of weights ending at y = target(y)).
FlowVerification verify_flow(const Flow& flow);

struct ElementLoad {
  Permutation element;
  std::vector<std::string> letters;  // letter names mapping to this element
  Rational probability;              // q(s)
  Rational load;                     // sum |delta| N(s, delta) eta(delta)
  Rational ratio;                    // load / q(s)
};

struct FlowReport {
  Rational a;
  double a_value = 0.0;
  std::vector<ElementLoad> loads;
  std::size_t path_count = 0;
  int max_length = 0;
  std::optional<Rational> lower_bound;
};

/// A(eta) = max over generator elements s of (1/q(s)) sum |delta| N(s, delta) eta(delta).
/// Letters naming the same group element are pooled.
FlowReport congestion_A(const Flow& flow);

/// Loops sigma_l^l and sigma_l^-l for odd l in [n-k+1, n], targeting delta_e
/// over the symmetrized walk; weights proportional to 1/l^2.
Flow build_odd_flow_tbk(int n, int k);
/// -1 + (1 + beta_tilde_min) / A(eta); throws on even-length paths.
double odd_flow_eigenvalue_bound(const Flow& flow, double beta_tilde_min = 1.0);

enum class FlowWeights { Rescaled, Unnormalized };

/// Random-transposition target over the symmetrized walk with k = n - C.
Flow build_flow_large_k(int n, int c, FlowWeights weights = FlowWeights::Rescaled);
/// Random-transposition target over the symmetrized walk for any n >= k > 1.
Flow build_flow_general(int n, int k, FlowWeights weights = FlowWeights::Rescaled);
/// Symmetrized walk target over r_n (uniform on sigma_n, sigma_n^-1, (1 n), e).
Flow build_flow_rudvalis(int n, int k);

/// (4/k) sum_{n-k < l <= n} (3(n-l)+1)^2.
Rational rudvalis_flow_bound(int n, int k);
/// 18 n^2 + 8 k^2 / n^2.
Rational general_flow_bound(int n, int k);
/// 8 [C (C+2)^2 + 1].
Rational large_k_flow_bound(int c);

/// Cayley-graph distances from e by breadth-first search over all of S_n
/// (n <= 8), indexed by PermRank.
std::vector<int> cayley_distances(int n, std::span<const Permutation> generators);

/// sum_g d_S(e, g)^2 target(g), S = support of the comparison measure.
Rational congestion_lower_bound(const SparseMeasure& target, const SparseMeasure& comparison);

/// (1 / 2|G|) sum_{x,y} |f(xy) - f(x)|^2 q(y), f indexed by PermRank.
double dirichlet_form(std::span<const double> f, const SparseMeasure& q);
/// <(I - Q) f, f> under the uniform inner product, (Qf)(x) = sum_y q(y) f(xy).
double dirichlet_operator_form(std::span<const double> f, const SparseMeasure& q);

struct ComparisonReport {
  int n = 0;
  double a = 0.0;
  int t2_reference = 0;         // T_2 of the flow's target walk
  std::optional<int> t2_chain;  // exact T_2 of the comparison walk
  double beta_minus = 0.0;
  double term_reference = 0.0;  // A T_2(target)
  double term_volume = 0.0;     // A log n!
  double term_spectral = 0.0;   // 1 / (-log beta_-), 0 when beta_- = 0
  double bound = 0.0;
  bool holds = false;
  double slack = 0.0;
};

/// Checks T_2(comparison) <= max{A T_2(target), A log|G|, 1/(-log beta_-)}.
ComparisonReport comparison_report(const Flow& flow, int reference_t2, int m_max = 100000);

nlohmann::ordered_json to_json(const Flow& flow);
nlohmann::ordered_json to_json(const FlowReport& report);

}  // namespace tbk
