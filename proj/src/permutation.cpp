#include "tbk/permutation.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <numeric>

#include "tbk/errors.hpp"

namespace tbk {

namespace {

void check_degree(int n) {
  if (n < 1 || n > kMaxDegree) {
    throw DomainError("deck size must lie in [1, " + std::to_string(kMaxDegree) +
                      "], got " + std::to_string(n));
  }
}

}  // namespace

Permutation Permutation::identity(int n) {
  check_degree(n);
  std::vector<std::uint16_t> map(static_cast<std::size_t>(n));
  std::iota(map.begin(), map.end(), std::uint16_t{0});
  return Permutation(std::move(map));
}

Permutation Permutation::from_labels(std::span<const int> labels) {
  const int n = static_cast<int>(labels.size());
  check_degree(n);
  std::vector<std::uint16_t> map(labels.size());
  std::vector<bool> seen(labels.size(), false);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label < 1 || label > n || seen[static_cast<std::size_t>(label - 1)]) {
      throw DomainError("not a permutation of {1.." + std::to_string(n) + "}");
    }
    seen[static_cast<std::size_t>(label - 1)] = true;
    map[i] = static_cast<std::uint16_t>(label - 1);
  }
  return Permutation(std::move(map));
}

Permutation Permutation::parse(std::string_view text) {
  std::vector<int> labels;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view field = text.substr(pos, comma - pos);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    int value = 0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || end != field.data() + field.size() || field.empty()) {
      throw DomainError("malformed permutation \"" + std::string(text) + "\"");
    }
    labels.push_back(value);
    pos = comma + 1;
  }
  return from_labels(labels);
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (map_[i] != i) return false;
  }
  return true;
}

std::string Permutation::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < map_.size(); ++i) {
    if (i != 0) out += ',';
    out += std::to_string(map_[i] + 1);
  }
  return out;
}

Permutation cycle_generator(int l, int n) {
  check_degree(n);
  if (l < 1 || l > n) {
    throw DomainError("cycle index l=" + std::to_string(l) + " outside [1, " +
                      std::to_string(n) + "]");
  }
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::iota(labels.begin(), labels.end(), 1);
  for (int i = 1; i < l; ++i) labels[static_cast<std::size_t>(i - 1)] = i + 1;
  labels[static_cast<std::size_t>(l - 1)] = 1;
  return Permutation::from_labels(labels);
}

Permutation transposition(int i, int j, int n) {
  check_degree(n);
  if (i < 1 || j < 1 || i > n || j > n || i == j) {
    throw DomainError("transposition needs distinct i, j in [1, n]");
  }
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::iota(labels.begin(), labels.end(), 1);
  std::swap(labels[static_cast<std::size_t>(i - 1)], labels[static_cast<std::size_t>(j - 1)]);
  return Permutation::from_labels(labels);
}

Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) {
    throw DomainError("cannot compose permutations of different degree");
  }
  std::vector<std::uint16_t> map(a.map_.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = a.map_[b.map_[i]];
  return Permutation(std::move(map));
}

Permutation inverse(const Permutation& a) {
  std::vector<std::uint16_t> map(a.map_.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    map[a.map_[i]] = static_cast<std::uint16_t>(i);
  }
  return Permutation(std::move(map));
}

Permutation power(const Permutation& a, long long e) {
  Permutation base = e < 0 ? inverse(a) : a;
  unsigned long long k = e < 0 ? static_cast<unsigned long long>(-(e + 1)) + 1
                               : static_cast<unsigned long long>(e);
  Permutation result = Permutation::identity(a.size());
  while (k != 0) {
    if (k & 1ULL) result = compose(result, base);
    base = compose(base, base);
    k >>= 1;
  }
  return result;
}

std::uint64_t factorial(int n) {
  if (n < 0 || n > kMaxRankDegree) {
    throw CapacityError(std::to_string(n) + "! does not fit the rank range");
  }
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

PermRank rank(const Permutation& a) {
  const int n = a.size();
  if (n > kMaxRankDegree) {
    throw CapacityError("rank is limited to n <= " + std::to_string(kMaxRankDegree));
  }
  const auto map = a.zero_based();
  std::uint64_t r = 0;
  std::uint32_t used = 0;
  for (int i = 0; i < n; ++i) {
    const std::uint32_t below = (1U << map[static_cast<std::size_t>(i)]) - 1U;
    const int smaller_unused = map[static_cast<std::size_t>(i)] - std::popcount(used & below);
    r = r * static_cast<std::uint64_t>(n - i) + static_cast<std::uint64_t>(smaller_unused);
    used |= 1U << map[static_cast<std::size_t>(i)];
  }
  return PermRank{r};
}

Permutation unrank(std::uint64_t r, int n) {
  check_degree(n);
  if (n > kMaxRankDegree) {
    throw CapacityError("unrank is limited to n <= " + std::to_string(kMaxRankDegree));
  }
  if (r >= factorial(n)) {
    throw DomainError("rank " + std::to_string(r) + " outside [0, " + std::to_string(n) +
                      "!-1]");
  }
  // Factorial-base digits, most significant first.
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    const auto base = static_cast<std::uint64_t>(n - i);
    digits[static_cast<std::size_t>(i)] = static_cast<int>(r % base);
    r /= base;
  }
  std::vector<std::uint16_t> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), std::uint16_t{0});
  std::vector<std::uint16_t> map(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto it = pool.begin() + digits[static_cast<std::size_t>(i)];
    map[static_cast<std::size_t>(i)] = *it;
    pool.erase(it);
  }
  return Permutation(std::move(map));
}

Permutation unrank(PermRank r, int n) { return unrank(r.value, n); }

}  // namespace tbk
