#include "tbk/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tbk/errors.hpp"
#include "tbk/parallel.hpp"

namespace tbk {

namespace {

constexpr std::uint64_t kThinningStream = 0x8000'0000'0000'0000ULL;

void check_nk(int n, int k) {
  if (n < 2 || n > kMaxDegree) throw DomainError("deck size must lie in [2, 4096]");
  if (k <= 1 || k > n) throw DomainError("coupling needs n >= k > 1");
}

void record_matches(const DeckPair& state, std::vector<long long>& start) {
  const auto& a = state.deck1.cards();
  const auto& b = state.deck2.cards();
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto& s = start[a[i] - 1U];
    if (a[i] == b[i]) {
      if (s < 0) s = state.steps;
    } else {
      s = -1;
    }
  }
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E37'79B9'7F4A'7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58'476D'1CE4'E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D0'49BB'1331'11EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(seed ^ splitmix64(stream))) {}

int Rng::uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

double Rng::uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

bool Rng::bernoulli(double p) { return uniform01() < p; }

Deck::Deck(int n) : cards_(static_cast<std::size_t>(n)) {
  if (n < 1 || n > kMaxDegree) throw DomainError("deck size out of range");
  std::iota(cards_.begin(), cards_.end(), std::uint16_t{1});
}

Deck Deck::from_permutation(const Permutation& p) {
  Deck d(p.size());
  for (int i = 1; i <= p.size(); ++i) d.cards_[static_cast<std::size_t>(i - 1)] = static_cast<std::uint16_t>(p(i));
  return d;
}

Deck Deck::uniform(int n, Rng& rng) {
  Deck d(n);
  for (int i = n - 1; i > 0; --i) {
    std::swap(d.cards_[static_cast<std::size_t>(i)], d.cards_[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  }
  return d;
}

int Deck::position_of(int card) const {
  const auto it = std::find(cards_.begin(), cards_.end(), card);
  if (it == cards_.end()) throw DomainError("card not in deck");
  return static_cast<int>(it - cards_.begin()) + 1;
}

void Deck::insert_top_at(int l) {
  if (l < 1 || l > size()) throw DomainError("insertion position out of range");
  std::rotate(cards_.begin(), cards_.begin() + 1, cards_.begin() + l);
}

void Deck::move_to_top(int l) {
  if (l < 1 || l > size()) throw DomainError("position out of range");
  std::rotate(cards_.begin(), cards_.begin() + (l - 1), cards_.begin() + l);
}

Permutation Deck::to_permutation() const {
  std::vector<int> labels(cards_.begin(), cards_.end());
  return Permutation::from_labels(labels);
}

int DeckPair::matched() const {
  int count = 0;
  for (int i = 1; i <= deck1.size(); ++i) count += deck1.card(i) == deck2.card(i);
  return count;
}

const char* coupling_name(CouplingKind kind) {
  return kind == CouplingKind::BottomKToTop ? "bottom-to-top" : "top-insert";
}

CouplingKind parse_coupling(const std::string& name) {
  if (name == "bottom-to-top") return CouplingKind::BottomKToTop;
  if (name == "top-insert") return CouplingKind::TopInsert;
  throw DomainError("unknown coupling \"" + name + "\" (expected bottom-to-top or top-insert)");
}

StepChoice bottom_k_to_top_step(DeckPair& state, int k, Rng& rng) {
  const int n = state.deck1.size();
  check_nk(n, k);
  const int first = n - k + 1;
  StepChoice choice;
  choice.position1 = rng.uniform_int(first, n);
  const int card = state.deck1.card(choice.position1);
  const int p2 = state.deck2.position_of(card);
  if (p2 >= first) {
    choice.position2 = p2;
  } else {
    std::vector<char> in_a1(static_cast<std::size_t>(n) + 1, 0);
    for (int i = first; i <= n; ++i) in_a1[static_cast<std::size_t>(state.deck1.card(i))] = 1;
    std::vector<int> candidates;
    for (int i = first; i <= n; ++i) {
      if (!in_a1[static_cast<std::size_t>(state.deck2.card(i))]) candidates.push_back(i);
    }
    choice.position2 = candidates[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(candidates.size()) - 1))];
  }
  state.deck1.move_to_top(choice.position1);
  state.deck2.move_to_top(choice.position2);
  ++state.steps;
  return choice;
}

StepChoice top_insert_couple_step(DeckPair& state, int k, Rng& rng) {
  const int n = state.deck1.size();
  check_nk(n, k);
  const bool first_leads = rng.bernoulli(0.5);
  Deck& leader = first_leads ? state.deck1 : state.deck2;
  Deck& trailer = first_leads ? state.deck2 : state.deck1;
  const int p = rng.uniform_int(n - k + 1, n);
  const int p2 = trailer.position_of(leader.card(1));
  int q = p;
  if (p2 >= n - k + 2) {
    if (p == p2) {
      q = p2 - 1;
    } else if (p == p2 - 1) {
      q = p2;
    }
  }
  leader.insert_top_at(p);
  trailer.insert_top_at(q);
  ++state.steps;
  return first_leads ? StepChoice{p, q} : StepChoice{q, p};
}

StepChoice couple_step(CouplingKind kind, DeckPair& state, int k, Rng& rng) {
  return kind == CouplingKind::BottomKToTop ? bottom_k_to_top_step(state, k, rng)
                                            : top_insert_couple_step(state, k, rng);
}

long long default_cap(int n) { return 50LL * n * n * n; }

TrialStats lazy_trial(const CouplingOptions& options, double p, std::uint64_t seed,
                      std::uint64_t trial) {
  check_nk(options.n, options.k);
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("laziness must lie in (0, 1]");
  const long long cap = options.cap > 0 ? options.cap : default_cap(options.n);
  Rng rng(seed, trial);
  Rng coins(seed, trial ^ kThinningStream);
  DeckPair state{Deck(options.n), Deck::uniform(options.n, rng)};

  TrialStats stats;
  stats.seed = seed;
  stats.trial = trial;
  std::vector<long long> start;
  if (options.track_cards) {
    start.assign(static_cast<std::size_t>(options.n), -1);
    record_matches(state, start);
  }
  while (!state.coupled() && state.steps < cap) {
    if (p < 1.0 && !coins.bernoulli(p)) {
      ++state.steps;
      continue;
    }
    couple_step(options.kind, state, options.k, rng);
    if (options.track_cards) record_matches(state, start);
  }
  stats.coupling_time = state.steps;
  stats.censored = !state.coupled();
  if (options.track_cards) stats.card_times = std::move(start);
  return stats;
}

TrialStats coupling_trial(const CouplingOptions& options, std::uint64_t seed, std::uint64_t trial) {
  return lazy_trial(options, options.laziness, seed, trial);
}

std::vector<TrialStats> coupling_trials(const CouplingOptions& options, int trials,
                                        std::uint64_t seed) {
  if (trials < 0) throw DomainError("trial count must be >= 0");
  std::vector<TrialStats> out(static_cast<std::size_t>(trials));
  parallel_for(out.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = coupling_trial(options, seed, i);
  });
  return out;
}

Proportion proportion(long long hits, long long total, double z) {
  Proportion p;
  p.hits = hits;
  p.total = total;
  if (total == 0) return p;
  const double nn = static_cast<double>(total);
  p.estimate = static_cast<double>(hits) / nn;
  p.sigma = std::sqrt(p.estimate * (1.0 - p.estimate) / nn);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p.estimate + z2 / (2.0 * nn)) / denom;
  const double half =
      z / denom * std::sqrt(p.estimate * (1.0 - p.estimate) / nn + z2 / (4.0 * nn * nn));
  p.lower = std::max(0.0, center - half);
  p.upper = std::min(1.0, center + half);
  return p;
}

Proportion tail_probability(const std::vector<TrialStats>& stats, long long m) {
  const auto hits = std::count_if(stats.begin(), stats.end(), [m](const TrialStats& s) {
    return s.censored || s.coupling_time > m;
  });
  return proportion(hits, static_cast<long long>(stats.size()));
}

long long collector_time(int n, int j, Rng& rng) {
  if (n < 1) throw DomainError("collector needs n >= 1");
  if (j < 0 || j >= n) throw DomainError("collector needs 0 <= j < n");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  int distinct = 0;
  long long draws = 0;
  while (distinct < n - j) {
    const int label = rng.uniform_int(0, n - 1);
    ++draws;
    if (!seen[static_cast<std::size_t>(label)]) {
      seen[static_cast<std::size_t>(label)] = 1;
      ++distinct;
    }
  }
  return draws;
}

CollectorStats coupon_collector(int n, int j, int trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("collector needs at least one trial");
  CollectorStats stats;
  stats.n = n;
  stats.j = j;
  stats.samples.resize(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    stats.samples[static_cast<std::size_t>(t)] = collector_time(n, j, rng);
  }
  double sum = 0.0;
  for (long long s : stats.samples) sum += static_cast<double>(s);
  stats.mean = sum / trials;
  double ss = 0.0;
  for (long long s : stats.samples) ss += (static_cast<double>(s) - stats.mean) * (static_cast<double>(s) - stats.mean);
  stats.stddev = trials > 1 ? std::sqrt(ss / (trials - 1)) : 0.0;
  if (n > 1) stats.mean_over_nlogn = stats.mean / (n * std::log(static_cast<double>(n)));
  return stats;
}

IncreasingBottomEstimate increasing_bottom_statistic(int n, int k, int j, long long m, int trials,
                                                     std::uint64_t seed) {
  check_nk(n, k);
  if (j < 1 || j > 8 || j > k) throw DomainError("increasing-bottom statistic needs 1 <= j <= min(8, k)");
  if (m < 0 || trials < 1) throw DomainError("m must be >= 0 and trials >= 1");
  std::vector<char> outcome(static_cast<std::size_t>(trials), 0);
  parallel_for(outcome.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(seed, t);
      Deck deck(n);
      std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
      int distinct = 0;
      for (long long step = 0; step < m && distinct < k - j; ++step) {
        const int p = rng.uniform_int(n - k + 1, n);
        const int card = deck.card(p);
        if (card > n - k && !seen[static_cast<std::size_t>(card)]) {
          seen[static_cast<std::size_t>(card)] = 1;
          ++distinct;
        }
        deck.move_to_top(p);
      }
      outcome[t] = distinct < k - j;
    }
  });
  IncreasingBottomEstimate est;
  est.n = n;
  est.k = k;
  est.j = j;
  est.m = m;
  est.tail = proportion(std::count(outcome.begin(), outcome.end(), 1), trials);
  double jfact = 1.0;
  for (int i = 2; i <= j; ++i) jfact *= i;
  est.lower_bound = est.tail.estimate - 1.0 / jfact;
  est.lower_ci = est.tail.lower - 1.0 / jfact;
  est.upper_ci = est.tail.upper - 1.0 / jfact;
  return est;
}

SingleCardEstimate single_card_lower_bound(int n, int k, long long l, int trials,
                                           std::uint64_t seed, double c) {
  check_nk(n, k);
  if (!(c > 0.0 && c < 1.0)) throw DomainError("c must lie in (0, 1)");
  if (k > c * n) throw DomainError("single-card bound needs k <= c n");
  if (l < 0 || trials < 1) throw DomainError("l must be >= 0 and trials >= 1");
  SingleCardEstimate est;
  est.n = n;
  est.k = k;
  est.l = l;
  est.c = c;
  est.start = static_cast<int>(std::floor((1.0 - c) * n / 2.0)) + 1;
  est.block = static_cast<int>(std::floor(c * n));
  est.pi_a = static_cast<double>(est.block) / n;
  const int threshold = n - est.block;
  long long hits = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    int x = est.start;
    for (long long step = 0; step < l; ++step) {
      const bool forward = rng.bernoulli(0.5);
      const int pos = rng.uniform_int(n - k + 1, n);
      if (forward) {
        if (x == 1) {
          x = pos;
        } else if (x <= pos) {
          --x;
        }
      } else {
        if (x == pos) {
          x = 1;
        } else if (x < pos) {
          ++x;
        }
      }
    }
    hits += x > threshold;
  }
  est.hit = proportion(hits, trials);
  est.lower_bound = std::abs(est.hit.estimate - est.pi_a);
  return est;
}

}  // namespace tbk
