#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tbk {

// Largest deck a Permutation may describe.
inline constexpr int kMaxDegree = 4096;
// Largest degree whose lexicographic rank fits in 64 bits (20! < 2^63).
inline constexpr int kMaxRankDegree = 20;

/// A permutation of {1..n} in one-line form: entry i is the label of the
/// card held at position i.  Storage is 0-based; the public accessors use
/// 1-based positions and labels.
class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(int n);
  /// Builds from 1-based labels; throws DomainError unless they form a
  /// bijection of {1..n}.
  static Permutation from_labels(std::span<const int> labels);
  /// Parses a comma-separated one-line array such as "2,3,1".
  static Permutation parse(std::string_view text);

  int size() const noexcept { return static_cast<int>(map_.size()); }
  /// Label at 1-based position i.
  int operator()(int position) const { return map_[position - 1] + 1; }
  /// 0-based view (entry i holds label-1 at position i+1).
  std::span<const std::uint16_t> zero_based() const noexcept { return map_; }

  bool is_identity() const noexcept;
  std::string to_string() const;

  auto operator<=>(const Permutation&) const = default;
  bool operator==(const Permutation&) const = default;

 private:
  explicit Permutation(std::vector<std::uint16_t> map) : map_(std::move(map)) {}
  friend Permutation compose(const Permutation&, const Permutation&);
  friend Permutation inverse(const Permutation&);
  friend Permutation unrank(std::uint64_t, int);

  std::vector<std::uint16_t> map_;
};

/// sigma_l: positions 1..l-1 take the card below them, position l takes the
/// top card.  Right-multiplying a deck by sigma_l inserts the top card at
/// position l.  sigma_1 is the identity.
Permutation cycle_generator(int l, int n);

/// The transposition (i j) of positions, 1 <= i, j <= n, i != j.
Permutation transposition(int i, int j, int n);

/// (a*b)(i) = a(b(i)).  Walk steps multiply on the right.
Permutation compose(const Permutation& a, const Permutation& b);
Permutation inverse(const Permutation& a);
/// a^e for any integer e (negative exponents use the inverse).
Permutation power(const Permutation& a, long long e);

inline Permutation operator*(const Permutation& a, const Permutation& b) {
  return compose(a, b);
}

/// Lexicographic rank of a one-line array in [0, n!-1].
struct PermRank {
  std::uint64_t value = 0;
  auto operator<=>(const PermRank&) const = default;
};

std::uint64_t factorial(int n);
PermRank rank(const Permutation& a);
Permutation unrank(PermRank r, int n);
Permutation unrank(std::uint64_t r, int n);

}  // namespace tbk
