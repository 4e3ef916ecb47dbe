#include "tbk/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "tbk/errors.hpp"
#include "tbk/exact.hpp"
#include "tbk/parallel.hpp"

namespace tbk {

namespace {

void apply_letter(std::vector<int>& deck, Letter letter) {
  const int n = static_cast<int>(deck.size());
  switch (letter.kind) {
    case Letter::Kind::Cycle:
      std::rotate(deck.begin(), deck.begin() + 1, deck.begin() + letter.l);
      break;
    case Letter::Kind::CycleInverse:
      std::rotate(deck.begin(), deck.begin() + (letter.l - 1), deck.begin() + letter.l);
      break;
    case Letter::Kind::Tau:
      std::swap(deck.front(), deck[static_cast<std::size_t>(n - 1)]);
      break;
  }
}

void check_letter(Letter letter, int n) {
  if (letter.kind == Letter::Kind::Tau) {
    if (n < 2) throw DomainError("tau needs n >= 2");
    return;
  }
  if (letter.l < 1 || letter.l > n) {
    throw DomainError("letter " + letter.name() + " out of range for n=" + std::to_string(n));
  }
}

void append(Word& out, Letter letter, int times) {
  for (int t = 0; t < times; ++t) out.push_back(letter);
}

void append(Word& out, const Word& part) { out.insert(out.end(), part.begin(), part.end()); }

// sigma_i^-1 sigma_j sigma_{j-1}^-1 sigma_i, which evaluates to (i j).
Word short_transposition(int i, int j) {
  return {Letter::cycle_inverse(i), Letter::cycle(j), Letter::cycle_inverse(j - 1), Letter::cycle(i)};
}

std::string qtilde_name(int n, int k) {
  return "qtilde(" + std::to_string(n) + "," + std::to_string(k) + ")";
}

std::size_t letter_index(Letter letter, int n) {
  switch (letter.kind) {
    case Letter::Kind::Cycle:
      return static_cast<std::size_t>(letter.l - 1);
    case Letter::Kind::CycleInverse:
      return static_cast<std::size_t>(n + letter.l - 1);
    case Letter::Kind::Tau:
      break;
  }
  return static_cast<std::size_t>(2 * n);
}

Letter letter_at(std::size_t index, int n) {
  const auto nn = static_cast<std::size_t>(n);
  if (index < nn) return Letter::cycle(static_cast<int>(index) + 1);
  if (index < 2 * nn) return Letter::cycle_inverse(static_cast<int>(index - nn) + 1);
  return Letter::tau();
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

Letter Letter::inverse() const {
  switch (kind) {
    case Kind::Cycle:
      return cycle_inverse(l);
    case Kind::CycleInverse:
      return cycle(l);
    case Kind::Tau:
      break;
  }
  return tau();
}

std::string Letter::name() const {
  switch (kind) {
    case Kind::Cycle:
      return "s" + std::to_string(l);
    case Kind::CycleInverse:
      return "s" + std::to_string(l) + "inv";
    case Kind::Tau:
      break;
  }
  return "t";
}

Letter Letter::parse(const std::string& name) {
  if (name == "t") return tau();
  auto fail = [&] { return DomainError("malformed generator letter \"" + name + "\""); };
  if (name.size() < 2 || name.front() != 's') throw fail();
  std::string digits = name.substr(1);
  bool inv = false;
  if (digits.size() > 3 && digits.ends_with("inv")) {
    digits.resize(digits.size() - 3);
    inv = true;
  }
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
      digits.size() > 4) {
    throw fail();
  }
  const int l = std::stoi(digits);
  if (l < 1 || l > kMaxDegree) throw fail();
  return inv ? cycle_inverse(l) : cycle(l);
}

Permutation Letter::element(int n) const {
  check_letter(*this, n);
  switch (kind) {
    case Kind::Cycle:
      return cycle_generator(l, n);
    case Kind::CycleInverse:
      return tbk::inverse(cycle_generator(l, n));
    case Kind::Tau:
      break;
  }
  return transposition(1, n, n);
}

Permutation evaluate_word(const Word& word, int n) {
  std::vector<int> deck(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) deck[static_cast<std::size_t>(i)] = i + 1;
  for (Letter letter : word) {
    check_letter(letter, n);
    apply_letter(deck, letter);
  }
  return Permutation::from_labels(deck);
}

Word inverse_word(const Word& word) {
  Word out;
  out.reserve(word.size());
  for (auto it = word.rbegin(); it != word.rend(); ++it) out.push_back(it->inverse());
  return out;
}

Permutation path_endpoint(const Word& word, const SparseMeasure& q) {
  const int n = q.degree();
  for (Letter letter : word) {
    if (q.weight(letter.element(n)) == 0) {
      throw DomainError("letter " + letter.name() + " is not in the support of the comparison measure");
    }
  }
  return evaluate_word(word, n);
}

FlowVerification verify_flow(const Flow& flow) {
  FlowVerification report;
  const int n = flow.n;
  std::vector<char> allowed(static_cast<std::size_t>(2 * n + 1), 0);
  for (std::size_t i = 0; i < allowed.size(); ++i) {
    allowed[i] = flow.comparison.weight(letter_at(i, n).element(n)) > 0;
  }
  std::map<Permutation, Rational> marginals;
  for (const auto& [g, w] : flow.target.atoms()) marginals.emplace(g, Rational(0));
  for (std::size_t p = 0; p < flow.paths.size(); ++p) {
    const auto& path = flow.paths[p];
    if (path.weight < 0) {
      report.marginals_ok = false;
      report.discrepancies.push_back("path " + std::to_string(p) + " has negative weight");
    }
    for (Letter letter : path.word) {
      if (!allowed[letter_index(letter, n)]) {
        report.letters_ok = false;
        report.discrepancies.push_back("path " + std::to_string(p) + " uses " + letter.name() +
                                       " outside the generator set");
        break;
      }
    }
    if (flow.odd_only && path.word.size() % 2 == 0) {
      report.parity_ok = false;
      report.discrepancies.push_back("path " + std::to_string(p) + " has even length");
    }
    marginals[evaluate_word(path.word, n)] += path.weight;
  }
  for (const auto& [g, total] : marginals) {
    const Rational expected = flow.target.weight(g);
    if (total != expected) {
      report.marginals_ok = false;
      report.discrepancies.push_back("marginal at " + g.to_string() + " is " + to_string(total) +
                                     ", target " + to_string(expected));
    }
  }
  return report;
}

FlowReport congestion_A(const Flow& flow) {
  const int n = flow.n;
  const std::size_t letters = static_cast<std::size_t>(2 * n + 1);
  // Integer traffic per (weight, letter); paths within a construction share few weights.
  std::map<Rational, std::vector<std::int64_t>> traffic;
  FlowReport report;
  report.path_count = flow.paths.size();
  for (const auto& path : flow.paths) {
    const auto length = static_cast<std::int64_t>(path.word.size());
    report.max_length = std::max(report.max_length, static_cast<int>(length));
    if (length == 0 || path.weight == 0) continue;
    auto& counts = traffic.try_emplace(path.weight, letters, 0).first->second;
    for (Letter letter : path.word) {
      check_letter(letter, n);
      counts[letter_index(letter, n)] += length;
    }
  }
  std::map<Permutation, ElementLoad> by_element;
  for (std::size_t i = 0; i < letters; ++i) {
    Rational load = 0;
    for (const auto& [weight, counts] : traffic) {
      if (counts[i] != 0) load += weight * Rational(counts[i]);
    }
    if (load == 0) continue;
    const Letter letter = letter_at(i, n);
    const Permutation element = letter.element(n);
    auto [it, inserted] = by_element.try_emplace(element);
    ElementLoad& entry = it->second;
    if (inserted) {
      entry.element = element;
      entry.probability = flow.comparison.weight(element);
      if (entry.probability == 0) {
        throw DomainError("generator " + letter.name() + " has zero probability under " +
                          flow.comparison_name);
      }
    }
    entry.letters.push_back(letter.name());
    entry.load += load;
  }
  report.a = 0;
  for (auto& [element, entry] : by_element) {
    entry.ratio = entry.load / entry.probability;
    report.a = std::max(report.a, entry.ratio);
    report.loads.push_back(std::move(entry));
  }
  report.a_value = to_double(report.a);
  return report;
}

Flow build_odd_flow_tbk(int n, int k) {
  SparseMeasure comparison = symmetrize(top_to_bottom_k(n, k));
  Flow flow(n, "delta_e", SparseMeasure::identity(n), qtilde_name(n, k), std::move(comparison));
  flow.odd_only = true;
  Rational sum = 0;
  for (int l = n - k + 1; l <= n; ++l) {
    if (l % 2 == 1) sum += Rational(1, l * l);
  }
  if (sum == 0) throw DomainError("no odd cycle length in [n-k+1, n]");
  for (int l = n - k + 1; l <= n; ++l) {
    if (l % 2 == 0) continue;
    const Rational weight = Rational(1) / (2 * sum * l * l);
    Word forward(static_cast<std::size_t>(l), Letter::cycle(l));
    flow.paths.push_back({inverse_word(forward), weight});
    flow.paths.push_back({std::move(forward), weight});
  }
  return flow;
}

double odd_flow_eigenvalue_bound(const Flow& flow, double beta_tilde_min) {
  for (const auto& path : flow.paths) {
    if (path.word.size() % 2 == 0) throw DomainError("odd-flow bound needs odd-length paths only");
  }
  return -1.0 + (1.0 + beta_tilde_min) / congestion_A(flow).a_value;
}

Flow build_flow_large_k(int n, int c, FlowWeights weights) {
  if (c < 0 || n <= 2 * c + 2) throw DomainError("large-k flow needs C >= 0 and n > 2C + 2");
  const int k = n - c;
  Flow flow(n, "q_rt(" + std::to_string(n) + ")", random_transposition(n), qtilde_name(n, k),
            symmetrize(top_to_bottom_k(n, k)));
  const bool rescaled = weights == FlowWeights::Rescaled;
  const Rational weight = rescaled ? Rational(2, n * n) : Rational(1, n * n);
  if (rescaled) {
    flow.paths.push_back({Word{}, Rational(1, n)});
    flow.notes.push_back("transposition weights 2/n^2 and identity mass 1/n on the empty path");
  } else {
    flow.notes.push_back("unnormalized weights 1/n^2; marginals fall short of the target");
  }
  for (int i = 1; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      Word word;
      if (i >= c + 1) {
        word = short_transposition(i, j);
      } else {
        const int r = c - i + 1;
        const int outer = j <= n - c ? n : n - c;
        const int shifted = j <= n - c ? j + r : j;
        append(word, Letter::cycle_inverse(outer), r);
        append(word, {Letter::cycle_inverse(c + 1), Letter::cycle(shifted),
                      Letter::cycle_inverse(shifted - 1), Letter::cycle(c + 1)});
        append(word, Letter::cycle(outer), r);
      }
      flow.paths.push_back({std::move(word), weight});
    }
  }
  return flow;
}

Flow build_flow_general(int n, int k, FlowWeights weights) {
  Flow flow(n, "q_rt(" + std::to_string(n) + ")", random_transposition(n), qtilde_name(n, k),
            symmetrize(top_to_bottom_k(n, k)));
  const bool rescaled = weights == FlowWeights::Rescaled;
  const Rational single = rescaled ? Rational(2, n * n) : Rational(1, n * n);
  const Rational multi = rescaled ? Rational(2, (k - 1) * n * n) : Rational(1, (k - 1) * n * n);
  if (rescaled) {
    flow.paths.push_back({Word{}, Rational(1, n)});
    flow.notes.push_back("weights 2/n^2 and 2/((k-1) n^2); identity mass 1/n on the empty path");
  } else {
    flow.notes.push_back("unnormalized weights 1/n^2 and 1/((k-1) n^2); marginals fall short of the target");
  }
  flow.notes.push_back("i < j <= l paths use sigma_l^-1 in the middle block");
  flow.notes.push_back("i = n-k uses the k-1 conjugated paths");
  for (int i = 1; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (i > n - k) {
        flow.paths.push_back({short_transposition(i, j), single});
        continue;
      }
      for (int l = n - k + 1; l < n; ++l) {
        Word word;
        if (j > l) {
          append(word, Letter::cycle_inverse(l), l - i);
          append(word, short_transposition(l, j));
          append(word, Letter::cycle(l), l - i);
        } else {
          const Word bridge = short_transposition(l, l + 1);
          append(word, Letter::cycle_inverse(l), l - j);
          append(word, bridge);
          append(word, Letter::cycle_inverse(l), j - i);
          append(word, bridge);
          append(word, Letter::cycle(l), j - i);
          append(word, bridge);
          append(word, Letter::cycle(l), l - j);
        }
        flow.paths.push_back({std::move(word), multi});
      }
    }
  }
  return flow;
}

Flow build_flow_rudvalis(int n, int k) {
  SparseMeasure target = symmetrize(top_to_bottom_k(n, k));
  Flow flow(n, qtilde_name(n, k), std::move(target), "r(" + std::to_string(n) + ")",
            rudvalis_symmetric(n));
  const Rational weight(1, 2 * k);
  for (int l = n - k + 1; l <= n; ++l) {
    Word word{Letter::cycle(n)};
    for (int t = 0; t < n - l; ++t) {
      word.push_back(Letter::cycle_inverse(n));
      word.push_back(Letter::tau());
    }
    append(word, Letter::cycle(n), n - l);
    flow.paths.push_back({inverse_word(word), weight});
    flow.paths.push_back({std::move(word), weight});
  }
  return flow;
}

Rational rudvalis_flow_bound(int n, int k) {
  Rational sum = 0;
  for (int l = n - k + 1; l <= n; ++l) sum += Rational((3 * (n - l) + 1) * (3 * (n - l) + 1));
  return Rational(4, k) * sum;
}

Rational general_flow_bound(int n, int k) { return Rational(18 * n * n) + Rational(8 * k * k, n * n); }

Rational large_k_flow_bound(int c) { return Rational(8 * (c * (c + 2) * (c + 2) + 1)); }

std::vector<int> cayley_distances(int n, std::span<const Permutation> generators) {
  if (n < 1 || n > kDenseCap) {
    throw CapacityError("Cayley-graph search is limited to n <= " + std::to_string(kDenseCap));
  }
  const std::uint64_t count = factorial(n);
  std::vector<int> dist(count, -1);
  std::deque<Permutation> queue;
  const Permutation e = Permutation::identity(n);
  dist[rank(e).value] = 0;
  queue.push_back(e);
  while (!queue.empty()) {
    const Permutation x = std::move(queue.front());
    queue.pop_front();
    const int d = dist[rank(x).value];
    for (const auto& s : generators) {
      Permutation y = compose(x, s);
      auto& slot = dist[rank(y).value];
      if (slot < 0) {
        slot = d + 1;
        queue.push_back(std::move(y));
      }
    }
  }
  return dist;
}

Rational congestion_lower_bound(const SparseMeasure& target, const SparseMeasure& comparison) {
  const int n = target.degree();
  if (comparison.degree() != n) throw DomainError("measure degrees differ");
  std::vector<Permutation> generators;
  for (const auto& [s, w] : comparison.atoms()) {
    if (!s.is_identity()) generators.push_back(s);
  }
  const std::vector<int> dist = cayley_distances(n, generators);
  Rational bound = 0;
  for (const auto& [g, w] : target.atoms()) {
    const int d = dist[rank(g).value];
    if (d < 0) throw DomainError(g.to_string() + " is unreachable from e in the Cayley graph");
    bound += w * Rational(d * d);
  }
  return bound;
}

namespace {

struct RightTable {
  std::vector<double> weights;
  std::vector<std::vector<std::uint32_t>> targets;  // targets[a][x] = rank(x * s_a)
};

RightTable right_table(const SparseMeasure& q, std::size_t expected) {
  const int n = q.degree();
  if (n > kDenseCap) throw CapacityError("Dirichlet forms are limited to n <= 8");
  const std::uint64_t count = factorial(n);
  if (expected != count) throw DomainError("function length must be n!");
  RightTable table;
  for (const auto& [s, w] : q.atoms()) {
    std::vector<std::uint32_t> row(count);
    for (std::uint64_t r = 0; r < count; ++r) {
      row[r] = static_cast<std::uint32_t>(rank(compose(unrank(r, n), s)).value);
    }
    table.weights.push_back(to_double(w));
    table.targets.push_back(std::move(row));
  }
  return table;
}

}  // namespace

double dirichlet_form(std::span<const double> f, const SparseMeasure& q) {
  const RightTable table = right_table(q, f.size());
  CompensatedSum sum;
  for (std::size_t a = 0; a < table.weights.size(); ++a) {
    for (std::size_t x = 0; x < f.size(); ++x) {
      const double diff = f[table.targets[a][x]] - f[x];
      sum.add(diff * diff * table.weights[a]);
    }
  }
  return sum.value() / (2.0 * static_cast<double>(f.size()));
}

double dirichlet_operator_form(std::span<const double> f, const SparseMeasure& q) {
  const RightTable table = right_table(q, f.size());
  CompensatedSum sum;
  for (std::size_t x = 0; x < f.size(); ++x) {
    double qf = 0.0;
    for (std::size_t a = 0; a < table.weights.size(); ++a) qf += table.weights[a] * f[table.targets[a][x]];
    sum.add((f[x] - qf) * f[x]);
  }
  return sum.value() / static_cast<double>(f.size());
}

ComparisonReport comparison_report(const Flow& flow, int reference_t2, int m_max) {
  ComparisonReport report;
  report.n = flow.n;
  report.a = congestion_A(flow).a_value;
  report.t2_reference = reference_t2;
  report.t2_chain = mixing_time(flow.comparison, Metric::L2, m_max).mixing_time;
  const double beta_min = spectrum(flow.comparison, flow.n == kEigenOptInCap).beta_min;
  report.beta_minus = std::max(0.0, -beta_min);
  if (report.beta_minus >= 1.0) {
    report.term_spectral = std::numeric_limits<double>::infinity();
  } else if (report.beta_minus > 0.0) {
    report.term_spectral = 1.0 / -std::log(report.beta_minus);
  }
  report.term_reference = report.a * reference_t2;
  report.term_volume = report.a * log_factorial(flow.n);
  report.bound = std::max({report.term_reference, report.term_volume, report.term_spectral});
  report.holds = report.t2_chain && *report.t2_chain <= report.bound;
  report.slack = report.t2_chain ? report.bound - *report.t2_chain : 0.0;
  return report;
}

nlohmann::ordered_json to_json(const Flow& flow) {
  nlohmann::ordered_json paths = nlohmann::ordered_json::array();
  for (const auto& path : flow.paths) {
    nlohmann::ordered_json word = nlohmann::ordered_json::array();
    for (Letter letter : path.word) word.push_back(letter.name());
    paths.push_back({{"word", std::move(word)}, {"weight", to_string(path.weight)}});
  }
  return {{"target", flow.target_name}, {"q", flow.comparison_name}, {"paths", std::move(paths)}};
}

nlohmann::ordered_json to_json(const FlowReport& report) {
  nlohmann::ordered_json loads = nlohmann::ordered_json::array();
  for (const auto& load : report.loads) {
    loads.push_back({{"element", load.element.to_string()},
                     {"letters", load.letters},
                     {"q", to_string(load.probability)},
                     {"load", to_string(load.load)},
                     {"ratio", to_string(load.ratio)}});
  }
  nlohmann::ordered_json out = {{"A", to_string(report.a)},
                                {"A_value", report.a_value},
                                {"paths", report.path_count},
                                {"max_length", report.max_length}};
  out["lower_bound"] = report.lower_bound ? nlohmann::ordered_json(to_string(*report.lower_bound))
                                          : nlohmann::ordered_json(nullptr);
  out["loads"] = std::move(loads);
  return out;
}

}  // namespace tbk
