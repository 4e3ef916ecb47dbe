#include "tbk/wilson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tbk/coupling.hpp"
#include "tbk/errors.hpp"
#include "tbk/parallel.hpp"

namespace tbk {

namespace {

Complex ipow(Complex z, long long e) {
  Complex result(1.0, 0.0);
  while (e > 0) {
    if (e & 1) result *= z;
    z *= z;
    e >>= 1;
  }
  return result;
}

int mod(int a, int n) { return ((a % n) + n) % n; }

std::string format_iterate(int i, Complex z, double f) {
  std::ostringstream out;
  out.precision(17);
  out << "z" << i << " = " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
      << "i, |f| = " << f;
  return out.str();
}

void check_n(int n) {
  if (n < kWilsonMinN || n > kWilsonMaxN) {
    throw DomainError("Wilson construction supports 16 <= n <= 1024 (got " + std::to_string(n) + ")");
  }
}

}  // namespace

Complex root_of_unity(int n) { return std::polar(1.0, 2.0 * std::numbers::pi / n); }

PolyValue wilson_poly(Complex z, int n) {
  if (n < 5) throw DomainError("wilson_poly needs n >= 5");
  const Complex w = root_of_unity(n);
  const Complex w2 = w * w;
  const Complex winv = std::conj(w);
  const Complex winv2 = winv * winv;
  const Complex zn3 = ipow(z, n - 3);
  const Complex zn2 = zn3 * z;
  const Complex zn1 = zn2 * z;
  const Complex zn = zn1 * z;
  const double nd = n;
  PolyValue out;
  out.f = 9.0 * zn - 9.0 * w * zn1 + 2.0 * w2 * zn2 - 3.0 * winv2 * z * z + winv * z;
  out.df = 9.0 * nd * zn1 - 9.0 * (nd - 1) * w * zn2 + 2.0 * (nd - 2) * w2 * zn3 -
           6.0 * winv2 * z + winv;
  return out;
}

NewtonResult newton_root(int n, double tol, int max_iter) {
  check_n(n);
  if (tol <= 0.0) tol = 1e-12 * n;
  NewtonResult result;
  Complex z(1.0, 0.0);
  std::vector<std::string> trace;
  for (int i = 0;; ++i) {
    const PolyValue v = wilson_poly(z, n);
    const double residual = std::abs(v.f);
    result.iterates.push_back(z);
    trace.push_back(format_iterate(i, z, residual));
    if (residual <= tol) {
      result.lambda = z;
      result.iterations = i;
      result.residual = residual;
      return result;
    }
    if (i == max_iter || std::abs(v.df) == 0.0 || !std::isfinite(residual)) break;
    z -= v.f / v.df;
  }
  throw NumericError("Newton iteration for n=" + std::to_string(n) + " did not reach |f| <= " +
                         std::to_string(tol),
                     std::move(trace));
}

ChiValues chi_values(Complex lambda, int n) {
  const Complex w = root_of_unity(n);
  const Complex a = 3.0 * lambda - w;
  const Complex b = 3.0 * lambda - 2.0 * w;
  if (std::abs(a) < 1e-12 || std::abs(b) < 1e-12) {
    throw NumericError("chi denominators are singular at this lambda", {});
  }
  ChiValues c;
  c.chi1 = 2.0 / a;
  c.chi0 = 2.0 / (a * b);
  const Complex winv = std::conj(w);
  c.residual_sum = std::abs(c.chi0 + c.chi1 * winv + winv * winv - 3.0 * ipow(lambda, n - 2));
  c.residual_ratio = std::abs(c.chi1 / c.chi0 + 2.0 * w - 3.0 * lambda);
  c.residual_chi1 = std::abs(2.0 / c.chi1 + w - 3.0 * lambda);
  return c;
}

LiftedState LiftedState::identity(int n) {
  LiftedState s;
  s.position.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) s.position[static_cast<std::size_t>(j)] = j + 1;
  s.z.assign(static_cast<std::size_t>(n), 0);
  return s;
}

CardUpdate lifted_card_step(int position, int z, int l, int n) {
  if (l < n - 2 || l > n) throw DomainError("lifted chain uses sigma_{n-2}, sigma_{n-1}, sigma_n");
  if (position == 1) return {l, mod(z + l - n, n)};
  if (position <= l) return {position - 1, z};
  return {position, mod(z + 1, n)};
}

LiftedState lifted_step(const LiftedState& state, int l) {
  const int n = state.size();
  LiftedState next = state;
  for (int j = 0; j < n; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    const CardUpdate u = lifted_card_step(state.position[idx], state.z[idx], l, n);
    next.position[idx] = u.position;
    next.z[idx] = u.z;
  }
  next.y = mod(state.y + 1, n);
  return next;
}

Complex v_value(const WilsonParams& params, int x) {
  const int n = params.n;
  if (x == n) return params.chi0;
  if (x == n - 1) return params.chi1;
  return ipow(params.lambda, n - 2 - x);
}

Complex psi(const LiftedState& state, const WilsonParams& params) {
  const int n = params.n;
  std::vector<Complex> v(static_cast<std::size_t>(n) + 1);
  for (int x = 1; x <= n; ++x) v[static_cast<std::size_t>(x)] = v_value(params, x);
  Complex sum(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    sum += v[static_cast<std::size_t>(state.position[idx])] *
           std::polar(1.0, 2.0 * std::numbers::pi * state.z[idx] / n);
  }
  return sum;
}

LiftedState random_lifted_state(int n, std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed, index);
  const Deck deck = Deck::uniform(n, rng);
  LiftedState s = LiftedState::identity(n);
  for (int pos = 1; pos <= n; ++pos) s.position[static_cast<std::size_t>(deck.card(pos) - 1)] = pos;
  for (int& z : s.z) z = rng.uniform_int(0, n - 1);
  s.y = rng.uniform_int(0, n - 1);
  return s;
}

namespace {

template <class PerState>
double max_over_samples(const WilsonParams& params, int samples, std::uint64_t seed,
                        PerState per_state) {
  if (samples < 1) throw DomainError("need at least one sample");
  std::vector<double> values(static_cast<std::size_t>(samples));
  parallel_for(values.size(), 64, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      values[i] = per_state(random_lifted_state(params.n, seed, i));
    }
  });
  return *std::max_element(values.begin(), values.end());
}

}  // namespace

double eigenfunction_residual(const WilsonParams& params, int samples, std::uint64_t seed) {
  const int n = params.n;
  return max_over_samples(params, samples, seed, [&](const LiftedState& s) {
    const Complex here = psi(s, params);
    Complex mean(0.0, 0.0);
    for (int l = n - 2; l <= n; ++l) mean += psi(lifted_step(s, l), params);
    mean /= 3.0;
    return std::abs(mean - params.lambda * here) / std::max(1.0, std::abs(here));
  });
}

double r_estimate(const WilsonParams& params, int samples, std::uint64_t seed) {
  const int n = params.n;
  return max_over_samples(params, samples, seed, [&](const LiftedState& s) {
    const Complex here = psi(s, params);
    double acc = 0.0;
    for (int l = n - 2; l <= n; ++l) acc += std::norm(psi(lifted_step(s, l), params) - here);
    return acc / 3.0;
  });
}

double step_bound_formula(const WilsonParams& p) {
  if (!(p.gamma > 0.0 && p.gamma < 1.0)) throw DomainError("gamma must lie in (0, 1)");
  if (!(p.r > 0.0)) throw DomainError("R must be positive");
  if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  const double numerator = std::log(p.psi_max) + 0.5 * std::log(p.gamma * p.epsilon / (4.0 * p.r));
  return numerator / -std::log1p(-p.gamma);
}

long long step_bound(const WilsonParams& params) {
  const double t = step_bound_formula(params);
  return t > 0.0 ? static_cast<long long>(std::floor(t)) : 0;
}

WilsonParams lazy_transfer(const WilsonParams& params) {
  WilsonParams lazy = params;
  lazy.lambda = 0.5 + 0.5 * params.lambda;
  lazy.gamma = params.gamma / 2.0;
  lazy.r = params.r / 2.0;
  return lazy;
}

WilsonReport wilson_params(int n, double epsilon, int samples, std::uint64_t seed) {
  check_n(n);
  WilsonReport report;
  report.newton = newton_root(n);
  report.chi = chi_values(report.newton.lambda, n);
  WilsonParams& p = report.params;
  p.n = n;
  p.epsilon = epsilon;
  p.w = root_of_unity(n);
  p.lambda = report.newton.lambda;
  p.chi0 = report.chi.chi0;
  p.chi1 = report.chi.chi1;
  p.gamma = 1.0 - p.lambda.real();
  p.psi_max = std::abs(psi(LiftedState::identity(n), p));
  p.r = r_estimate(p, samples, seed);
  report.eigen_residual = eigenfunction_residual(p, samples, seed);
  report.bound_t = step_bound(p);
  report.lazy_bound_t = step_bound(lazy_transfer(p));
  const double numerator = std::log(p.psi_max) + 0.5 * std::log(p.gamma * epsilon / (4.0 * p.r));
  report.lazy_closed_form = numerator / -std::log1p(-p.gamma / 2.0);
  return report;
}

}  // namespace tbk
