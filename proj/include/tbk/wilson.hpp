#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace tbk {

using Complex = std::complex<double>;

inline constexpr int kWilsonMinN = 16;
inline constexpr int kWilsonMaxN = 1024;

/// w = exp(2 pi i / n).
Complex root_of_unity(int n);

struct PolyValue {
  Complex f;
  Complex df;
};

/// f(z) = 9 z^n - 9 w z^(n-1) + 2 w^2 z^(n-2) - 3 w^-2 z^2 + w^-1 z and f'(z).
PolyValue wilson_poly(Complex z, int n);

struct NewtonResult {
  Complex lambda;
  int iterations = 0;
  double residual = 0.0;           // |f(lambda)|
  std::vector<Complex> iterates;   // z_0 = 1, z_1, ...
};

/// Newton's method from z_0 = 1.  Throws NumericError (with the iterate trace)
/// if |f| <= tol is not reached within max_iter steps.  tol <= 0 selects 1e-12 n.
NewtonResult newton_root(int n, double tol = 0.0, int max_iter = 50);

struct ChiValues {
  Complex chi0;
  Complex chi1;
  double residual_sum = 0.0;    // |chi0 + chi1 w^-1 + w^-2 - 3 lambda^(n-2)|
  double residual_ratio = 0.0;  // |chi1 / chi0 + 2w - 3 lambda|
  double residual_chi1 = 0.0;   // |2 / chi1 + w - 3 lambda|
};

ChiValues chi_values(Complex lambda, int n);

/// Card positions (1-based, indexed by label - 1), the time counter Y mod n,
/// and the phase counters Z mod n.
struct LiftedState {
  std::vector<int> position;
  std::vector<int> z;
  int y = 0;

  int size() const noexcept { return static_cast<int>(position.size()); }
  static LiftedState identity(int n);
};

struct CardUpdate {
  int position;
  int z;
};

/// One card under sigma_l, l in {n-2, n-1, n}.
CardUpdate lifted_card_step(int position, int z, int l, int n);
/// All cards under sigma_l; Y advances by one.
LiftedState lifted_step(const LiftedState& state, int l);

struct WilsonParams {
  int n = 0;
  double epsilon = 0.0;
  Complex w;
  Complex lambda;
  Complex chi0;
  Complex chi1;
  double gamma = 0.0;
  double psi_max = 0.0;
  double r = 0.0;
};

/// v(x): lambda^(n-2-x) for x <= n-2, chi1 at n-1, chi0 at n.
Complex v_value(const WilsonParams& params, int x);
Complex psi(const LiftedState& state, const WilsonParams& params);

/// Random lifted state: uniform positions and uniform Z.
LiftedState random_lifted_state(int n, std::uint64_t seed, std::uint64_t index);

/// max over sampled states of |E Psi(next) - lambda Psi| / max(1, |Psi|).
double eigenfunction_residual(const WilsonParams& params, int samples, std::uint64_t seed);
/// max over sampled states of (1/3) sum over generators of |Psi(next) - Psi|^2.
double r_estimate(const WilsonParams& params, int samples, std::uint64_t seed);

/// (log Psi_max + 1/2 log(gamma eps / (4R))) / (-log(1 - gamma)), unclamped.
double step_bound_formula(const WilsonParams& params);
/// Largest integer t not exceeding the formula; 0 when the numerator is not positive.
long long step_bound(const WilsonParams& params);

/// lambda -> 1/2 + lambda/2, gamma -> gamma/2, R -> R/2, Psi unchanged.
WilsonParams lazy_transfer(const WilsonParams& params);

struct WilsonReport {
  WilsonParams params;
  NewtonResult newton;
  ChiValues chi;
  double eigen_residual = 0.0;
  long long bound_t = 0;
  long long lazy_bound_t = 0;
  /// (log Psi_max + 1/2 log(gamma eps / (4R))) / (-log(1 - gamma/2)).
  double lazy_closed_form = 0.0;
};

WilsonReport wilson_params(int n, double epsilon, int samples, std::uint64_t seed);

}  // namespace tbk
