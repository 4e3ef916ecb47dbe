#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbk/measure.hpp"
#include "tbk/permutation.hpp"

namespace tbk {

// Dense evolution works over all n! elements of S_n.
inline constexpr int kDenseCap = 8;
// Full symmetric eigendecomposition; n = 7 (5040 x 5040) only on request.
inline constexpr int kEigenCap = 6;
inline constexpr int kEigenOptInCap = 7;

/// Probability vector over S_n indexed by PermRank.
class DenseDistribution {
 public:
  static DenseDistribution point_mass(const Permutation& g);
  static DenseDistribution identity(int n);
  static DenseDistribution uniform(int n);
  static DenseDistribution from_measure(const SparseMeasure& q);
  /// Takes ownership of raw probabilities; entries >= -1e-15 are clamped to 0.
  static DenseDistribution from_values(int n, std::vector<double> probs);

  int degree() const noexcept { return n_; }
  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t rank) const { return probs_[rank]; }
  double at(const Permutation& g) const;
  double total_mass() const;

 private:
  DenseDistribution(int n, std::vector<double> probs) : n_(n), probs_(std::move(probs)) {}

  int n_ = 0;
  std::vector<double> probs_;
};

/// Precomputed right-multiplication tables for one driving measure q:
/// step(d)(g) = sum_s d(g s^-1) q(s), summed in atom order for every target
/// so the result does not depend on how targets are split across threads.
class TransitionKernel {
 public:
  explicit TransitionKernel(const SparseMeasure& q);

  int degree() const noexcept { return n_; }
  DenseDistribution step(const DenseDistribution& d) const;

 private:
  int n_;
  std::vector<double> weights_;
  std::vector<std::vector<std::uint32_t>> sources_;
};

DenseDistribution convolve_step(const DenseDistribution& d, const SparseMeasure& q);

/// 1/2 sum |d(g) - 1/n!|.
double tv_distance(const DenseDistribution& d);
/// (sum |d(g)/pi(g) - 1|^p pi(g))^(1/p) for p in {1, 2}.
double lp_distance(const DenseDistribution& d, int p);

enum class Metric { TotalVariation, L2 };
const char* metric_name(Metric m);
/// 1/(2e) for total variation, 1/e for L2.
double mixing_threshold(Metric m);

struct ProfilePoint {
  int step = 0;
  double tv = 0.0;
  double l2 = 0.0;
};

/// Distances of q^m to uniform for m = 0..m_max.
std::vector<ProfilePoint> distance_profile(const SparseMeasure& q, int m_max);

struct MixingReport {
  std::string measure;
  Metric metric = Metric::TotalVariation;
  double threshold = 0.0;
  int m_max = 0;
  /// Empty when the threshold was not reached by m_max (saturation).
  std::optional<int> mixing_time;
  /// Steps 0..mixing_time (or 0..m_max when saturated).
  std::vector<ProfilePoint> profile;

  bool saturated() const noexcept { return !mixing_time.has_value(); }
};

MixingReport mixing_time(const SparseMeasure& q, Metric metric, int m_max,
                         std::string descriptor = {});

struct SpectrumReport {
  /// Ascending.
  std::vector<double> eigenvalues;
  double beta_min = 0.0;
  /// 1 - second largest eigenvalue.
  double spectral_gap = 0.0;
};

/// Spectrum of M(x, y) = q(x^-1 y).  q must be symmetric.
SpectrumReport spectrum(const SparseMeasure& q, bool allow_n7 = false);

/// -1 + (k-1) / (k (n-k+2) (n+1)).
Rational beta_min_formula(int n, int k);

struct BetaMinCheck {
  int n = 0;
  int k = 0;
  double exact_beta_min = 0.0;
  Rational formula;
  bool holds = false;
};

BetaMinCheck beta_min_bound_check(int n, int k, bool allow_n7 = false);

/// Squared L2 distance of q^m from uniform, sum over non-top eigenvalues of
/// beta^(2m).  Equals n!-1 at m = 0.
double l2_from_spectrum(const SpectrumReport& spectrum, int m);
double l2_from_spectrum(const SparseMeasure& q, int m);

struct LazyTransferCheck {
  double epsilon = 0.0;
  double scaled_term = 0.0;    // ((2+eps)/p) T(q)
  double constant_term = 0.0;  // 80 / (p eps^2)
  bool holds = false;
};

struct TransferReport {
  int n = 0;
  int k = 0;
  Rational laziness;
  std::optional<int> t_tv;       // T(q)
  std::optional<int> t_l2;       // T_2(q)
  std::optional<int> t_l2_star;  // T_2(q * q^*), empty if it never mixes
  std::optional<int> t_lazy;     // T(q-hat_p)
  bool t_le_t2 = false;
  bool t2_le_twice_star = false;
  std::vector<LazyTransferCheck> lazy_checks;

  bool all_hold() const;
};

TransferReport transfer_checks(int n, int k, std::span<const double> epsilons,
                               const Rational& laziness = Rational(1, 2),
                               int m_max = 100000);

}  // namespace tbk
