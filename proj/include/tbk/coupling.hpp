#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tbk/permutation.hpp"

namespace tbk {

/// Per-trial random stream: std::mt19937_64 seeded from splitmix64(seed, stream),
/// so trial i draws the same numbers regardless of scheduling.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on the closed range [lo, hi].
  int uniform_int(int lo, int hi);
  double uniform01();
  bool bernoulli(double p);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// A deck as a one-line array: card(i) is the label at position i (1-based).
class Deck {
 public:
  explicit Deck(int n);
  static Deck from_permutation(const Permutation& p);
  /// Fisher-Yates shuffle of the identity.
  static Deck uniform(int n, Rng& rng);

  int size() const noexcept { return static_cast<int>(cards_.size()); }
  int card(int position) const { return cards_[static_cast<std::size_t>(position - 1)]; }
  /// Position of a label; linear scan.
  int position_of(int card) const;

  /// Right-multiplication by sigma_l: the top card moves to position l.
  void insert_top_at(int l);
  /// Right-multiplication by sigma_l^-1: the card at position l moves to the top.
  void move_to_top(int l);

  Permutation to_permutation() const;
  const std::vector<std::uint16_t>& cards() const noexcept { return cards_; }
  bool operator==(const Deck&) const = default;

 private:
  std::vector<std::uint16_t> cards_;
};

struct DeckPair {
  Deck deck1;
  Deck deck2;
  long long steps = 0;

  bool coupled() const { return deck1 == deck2; }
  /// Number of positions holding the same card in both decks.
  int matched() const;
};

enum class CouplingKind {
  BottomKToTop,  // marginal q*_{n,k}
  TopInsert,     // marginal q_{n,k}
};

const char* coupling_name(CouplingKind kind);
CouplingKind parse_coupling(const std::string& name);

/// Positions involved in one coupled step, for marginal checks.  For
/// BottomKToTop these are the positions each deck pulled a card from; for
/// TopInsert they are the insertion positions.
struct StepChoice {
  int position1 = 0;
  int position2 = 0;
};

StepChoice bottom_k_to_top_step(DeckPair& state, int k, Rng& rng);
StepChoice top_insert_couple_step(DeckPair& state, int k, Rng& rng);
StepChoice couple_step(CouplingKind kind, DeckPair& state, int k, Rng& rng);

struct TrialStats {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  long long coupling_time = 0;
  bool censored = false;
  /// Start of each card's final run of matches, indexed by label - 1.
  std::vector<long long> card_times;
};

struct CouplingOptions {
  int n = 0;
  int k = 0;
  CouplingKind kind = CouplingKind::BottomKToTop;
  /// Step cap; 0 selects the default 50 n^3.
  long long cap = 0;
  bool track_cards = false;
  /// Probability that a step is taken; 1 disables thinning.
  double laziness = 1.0;
};

long long default_cap(int n);

/// One trial: deck1 from the identity, deck2 uniform, run until equal.
TrialStats coupling_trial(const CouplingOptions& options, std::uint64_t seed, std::uint64_t trial);
/// Runs `inner` logic with each step skipped with probability 1 - p, using a
/// separate random stream for the thinning coins.
TrialStats lazy_trial(const CouplingOptions& options, double p, std::uint64_t seed,
                      std::uint64_t trial);
std::vector<TrialStats> coupling_trials(const CouplingOptions& options, int trials,
                                        std::uint64_t seed);

struct Proportion {
  long long hits = 0;
  long long total = 0;
  double estimate = 0.0;
  double sigma = 0.0;  // sqrt(p (1-p) / N)
  double lower = 0.0;  // Wilson score interval, z = 3
  double upper = 0.0;
};

Proportion proportion(long long hits, long long total, double z = 3.0);

/// Empirical P(T > m); censored trials count as exceeding any m below the cap.
Proportion tail_probability(const std::vector<TrialStats>& stats, long long m);

struct CollectorStats {
  int n = 0;
  int j = 0;
  std::vector<long long> samples;  // L_j per trial
  double mean = 0.0;
  double stddev = 0.0;
  double mean_over_nlogn = 0.0;  // 0 when n = 1
};

/// Draws uniform labels from {1..n} until only j remain unseen.
long long collector_time(int n, int j, Rng& rng);
CollectorStats coupon_collector(int n, int j, int trials, std::uint64_t seed);

struct IncreasingBottomEstimate {
  int n = 0;
  int k = 0;
  int j = 0;
  long long m = 0;
  Proportion tail;         // P(L_j > m)
  double lower_bound = 0;  // tail.estimate - 1/j!
  double lower_ci = 0;
  double upper_ci = 0;
};

/// Runs the bottom-k-to-top walk for m steps and records whether fewer than
/// k - j distinct labels from {n-k+1..n} have been pulled to the top.
IncreasingBottomEstimate increasing_bottom_statistic(int n, int k, int j, long long m, int trials,
                                                     std::uint64_t seed);

struct SingleCardEstimate {
  int n = 0;
  int k = 0;
  long long l = 0;
  double c = 0.0;
  int start = 0;        // floor((1-c) n / 2) + 1
  int block = 0;        // floor(c n)
  Proportion hit;       // q~^l(A)
  double pi_a = 0.0;    // floor(c n) / n
  double lower_bound = 0.0;
};

/// Tracks one card under the symmetrized walk (1/2 q + 1/2 q*); A is the event
/// that it lies in the bottom floor(c n) positions.
SingleCardEstimate single_card_lower_bound(int n, int k, long long l, int trials,
                                           std::uint64_t seed, double c = 0.5);

}  // namespace tbk
