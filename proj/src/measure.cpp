#include "tbk/measure.hpp"

#include "tbk/errors.hpp"

namespace tbk {

std::string to_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational parse_rational(std::string_view text) {
  auto fail = [&] { return DomainError("malformed rational \"" + std::string(text) + "\""); };
  auto parse_int = [&](std::string_view digits) {
    if (digits.empty()) throw fail();
    std::size_t start = digits.front() == '-' ? 1 : 0;
    if (start == digits.size()) throw fail();
    for (std::size_t i = start; i < digits.size(); ++i) {
      if (digits[i] < '0' || digits[i] > '9') throw fail();
    }
    return boost::multiprecision::cpp_int(std::string(digits));
  };
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto num = parse_int(text.substr(0, slash));
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw fail();
    return Rational(num, den);
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view whole = text.substr(0, dot);
    const std::string_view frac = text.substr(dot + 1);
    if (frac.empty()) throw fail();
    const bool negative = !whole.empty() && whole.front() == '-';
    const auto int_part = (whole.empty() || whole == "-") ? boost::multiprecision::cpp_int(0)
                                                         : parse_int(whole);
    const auto frac_part = parse_int(frac);
    if (frac.front() == '-') throw fail();
    boost::multiprecision::cpp_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Rational value = Rational(boost::multiprecision::abs(int_part)) + Rational(frac_part, scale);
    return negative ? Rational(-value) : value;
  }
  return Rational(parse_int(text));
}

SparseMeasure::SparseMeasure(int n) : n_(n) {
  if (n < 1 || n > kMaxDegree) throw DomainError("measure degree out of range");
}

SparseMeasure SparseMeasure::point_mass(const Permutation& g) {
  SparseMeasure q(g.size());
  q.add(g, Rational(1));
  return q;
}

SparseMeasure SparseMeasure::identity(int n) { return point_mass(Permutation::identity(n)); }

void SparseMeasure::add(const Permutation& g, const Rational& w) {
  if (g.size() != n_) throw DomainError("atom degree does not match measure degree");
  if (w == 0) return;
  auto [it, inserted] = atoms_.try_emplace(g, w);
  if (!inserted) it->second += w;
  if (it->second < 0) throw DomainError("negative weight at " + g.to_string());
  if (it->second == 0) atoms_.erase(it);
}

Rational SparseMeasure::weight(const Permutation& g) const {
  const auto it = atoms_.find(g);
  return it == atoms_.end() ? Rational(0) : it->second;
}

Rational SparseMeasure::total_mass() const {
  Rational total = 0;
  for (const auto& [g, w] : atoms_) total += w;
  return total;
}

bool SparseMeasure::is_symmetric() const {
  for (const auto& [g, w] : atoms_) {
    if (weight(inverse(g)) != w) return false;
  }
  return true;
}

std::vector<std::pair<Permutation, double>> SparseMeasure::atoms_as_double() const {
  std::vector<std::pair<Permutation, double>> out;
  out.reserve(atoms_.size());
  for (const auto& [g, w] : atoms_) out.emplace_back(g, to_double(w));
  return out;
}

SparseMeasure top_to_bottom_k(int n, int k) {
  if (k <= 1 || k > n) {
    throw DomainError("top_to_bottom_k needs n >= k > 1 (n=" + std::to_string(n) +
                      ", k=" + std::to_string(k) + ")");
  }
  SparseMeasure q(n);
  for (int l = n - k + 1; l <= n; ++l) q.add(cycle_generator(l, n), Rational(1, k));
  return q;
}

SparseMeasure reversal(const SparseMeasure& q) {
  SparseMeasure out(q.degree());
  for (const auto& [g, w] : q.atoms()) out.add(inverse(g), w);
  return out;
}

SparseMeasure symmetrize(const SparseMeasure& q) {
  SparseMeasure out(q.degree());
  const Rational half(1, 2);
  for (const auto& [g, w] : q.atoms()) {
    out.add(g, half * w);
    out.add(inverse(g), half * w);
  }
  return out;
}

SparseMeasure lazy(const SparseMeasure& q, const Rational& p) {
  if (p <= 0 || p >= 1) throw DomainError("laziness p must lie in (0,1)");
  SparseMeasure out(q.degree());
  for (const auto& [g, w] : q.atoms()) out.add(g, p * w);
  out.add(Permutation::identity(q.degree()), 1 - p);
  return out;
}

SparseMeasure random_transposition(int n) {
  if (n < 2) throw DomainError("random transposition needs n >= 2");
  SparseMeasure q(n);
  q.add(Permutation::identity(n), Rational(1, n));
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) q.add(transposition(i, j, n), Rational(2, n * n));
  }
  return q;
}

SparseMeasure rudvalis_symmetric(int n) {
  if (n < 2) throw DomainError("rudvalis_symmetric needs n >= 2");
  SparseMeasure q(n);
  const Rational quarter(1, 4);
  const Permutation full = cycle_generator(n, n);
  q.add(full, quarter);
  q.add(inverse(full), quarter);
  q.add(transposition(1, n, n), quarter);
  q.add(Permutation::identity(n), quarter);
  return q;
}

SparseMeasure convolve_measures(const SparseMeasure& a, const SparseMeasure& b) {
  if (a.degree() != b.degree()) throw DomainError("convolution of measures of different degree");
  SparseMeasure out(a.degree());
  for (const auto& [g, wa] : a.atoms()) {
    for (const auto& [h, wb] : b.atoms()) out.add(compose(g, h), wa * wb);
  }
  return out;
}

nlohmann::ordered_json to_json(const SparseMeasure& q) {
  nlohmann::ordered_json atoms = nlohmann::ordered_json::array();
  for (const auto& [g, w] : q.atoms()) {
    atoms.push_back({{"perm", g.to_string()}, {"weight", to_string(w)}});
  }
  return {{"n", q.degree()}, {"atoms", std::move(atoms)}};
}

SparseMeasure measure_from_json(const nlohmann::json& j) {
  SparseMeasure q(j.at("n").get<int>());
  for (const auto& atom : j.at("atoms")) {
    const Permutation g = Permutation::parse(atom.at("perm").get<std::string>());
    if (g.size() != q.degree()) throw DomainError("atom degree mismatch in measure JSON");
    q.add(g, parse_rational(atom.at("weight").get<std::string>()));
  }
  return q;
}

}  // namespace tbk
