#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include "json.hpp"

#include "tbk/permutation.hpp"

namespace tbk {

using Rational = boost::multiprecision::cpp_rational;

/// "p/q" rendering used by every serialized weight ("1/2", "0/1", "3/1").
std::string to_string(const Rational& r);
/// Accepts "p/q", an integer, or a finite decimal such as "0.25".
Rational parse_rational(std::string_view text);
inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// A finitely supported probability measure on S_n with exact weights.
/// Atoms with zero weight are never stored.  Iteration order is the
/// lexicographic order of the one-line arrays (same as PermRank order).
class SparseMeasure {
 public:
  using Atoms = std::map<Permutation, Rational>;

  explicit SparseMeasure(int n);
  static SparseMeasure point_mass(const Permutation& g);
  /// delta_e on S_n.
  static SparseMeasure identity(int n);

  int degree() const noexcept { return n_; }
  const Atoms& atoms() const noexcept { return atoms_; }
  std::size_t support_size() const noexcept { return atoms_.size(); }

  /// Adds w to the weight at g (w may be negative while building, but the
  /// stored weight must stay >= 0).
  void add(const Permutation& g, const Rational& w);
  Rational weight(const Permutation& g) const;
  Rational total_mass() const;
  bool is_symmetric() const;

  /// Weights as doubles, in atom order.
  std::vector<std::pair<Permutation, double>> atoms_as_double() const;

  bool operator==(const SparseMeasure&) const = default;

 private:
  int n_;
  Atoms atoms_;
};

/// q_{n,k}: weight 1/k on each sigma_l, n-k+1 <= l <= n.  Requires n >= k > 1.
SparseMeasure top_to_bottom_k(int n, int k);
/// q*(g) = q(g^-1).
SparseMeasure reversal(const SparseMeasure& q);
/// (q + q*) / 2.
SparseMeasure symmetrize(const SparseMeasure& q);
/// p q + (1-p) delta_e, p in (0,1).
SparseMeasure lazy(const SparseMeasure& q, const Rational& p);
/// 1/n on e, 2/n^2 on each transposition.
SparseMeasure random_transposition(int n);
/// Uniform on {sigma_n, sigma_n^-1, (1 n), e}; coinciding elements merge.
SparseMeasure rudvalis_symmetric(int n);
/// (a * b)(g) = sum_h a(h) b(h^-1 g).
SparseMeasure convolve_measures(const SparseMeasure& a, const SparseMeasure& b);

nlohmann::ordered_json to_json(const SparseMeasure& q);
SparseMeasure measure_from_json(const nlohmann::json& j);

}  // namespace tbk
