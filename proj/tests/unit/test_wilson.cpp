#include "doctest.h"

#include <cmath>
#include <numbers>
#include <string>

#include "fixtures.hpp"
#include "tbk/errors.hpp"
#include "tbk/wilson.hpp"

using namespace tbk;

TEST_CASE("polynomial value and derivative at 1") {
  const int n = 32;
  const Complex w = root_of_unity(n);
  const PolyValue v = wilson_poly(1.0, n);
  CHECK(std::abs(v.f - (9.0 - 9.0 * w + 2.0 * w * w - 3.0 / (w * w) + 1.0 / w)) < 1e-12);
  const double h = 1e-6;
  const Complex numeric = (wilson_poly(1.0 + h, n).f - wilson_poly(1.0 - h, n).f) / (2 * h);
  CHECK(std::abs(numeric - v.df) < 1e-5 * std::abs(v.df));
  CHECK_THROWS_AS(wilson_poly(1.0, 4), DomainError);
}

TEST_CASE("Newton roots agree with the high-precision oracle") {
  for (const auto& [key, oracle] : fixtures().at("wilson_roots").items()) {
    const int n = std::stoi(key);
    CAPTURE(n);
    const NewtonResult r = newton_root(n);
    CHECK(r.residual <= 1e-12 * n);
    CHECK(r.lambda.real() == doctest::Approx(oracle.at("re").get<double>()).epsilon(1e-12));
    CHECK(r.lambda.imag() == doctest::Approx(oracle.at("im").get<double>()).epsilon(1e-8));
    const double gap = n * double(n) * n * (1.0 - r.lambda.real());
    CHECK(gap == doctest::Approx(oracle.at("n3_gap").get<double>()).epsilon(1e-6));
    CHECK(r.iterates.front() == Complex(1.0, 0.0));
  }
}

TEST_CASE("Newton failure reports the iterate trace") {
  try {
    newton_root(64, 1e-300, 2);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.trace().size() >= 2);
  }
}

TEST_CASE("chi values satisfy all three equations") {
  for (int n : {16, 64, 256}) {
    const NewtonResult r = newton_root(n);
    const ChiValues chi = chi_values(r.lambda, n);
    CHECK(chi.residual_sum <= 1e-8);
    CHECK(chi.residual_ratio <= 1e-8);
    CHECK(chi.residual_chi1 <= 1e-8);
  }
}

TEST_CASE("lifted card step") {
  const int n = 20;
  const CardUpdate top = lifted_card_step(1, 5, n - 1, n);
  CHECK(top.position == n - 1);
  CHECK(top.z == 4);
  const CardUpdate shifted = lifted_card_step(7, 3, n - 2, n);
  CHECK(shifted.position == 6);
  CHECK(shifted.z == 3);
  const CardUpdate stays = lifted_card_step(n, 3, n - 2, n);
  CHECK(stays.position == n);
  CHECK(stays.z == 4);
  const CardUpdate wrap = lifted_card_step(n, n - 1, n - 1, n);
  CHECK(wrap.z == 0);
  CHECK_THROWS_AS(lifted_card_step(1, 0, n - 3, n), DomainError);
}

TEST_CASE("lifted step keeps positions a permutation") {
  LiftedState s = LiftedState::identity(16);
  for (int i = 0; i < 50; ++i) s = lifted_step(s, 14 + i % 3);
  std::vector<int> seen(17, 0);
  for (int p : s.position) ++seen[static_cast<std::size_t>(p)];
  for (int p = 1; p <= 16; ++p) CHECK(seen[static_cast<std::size_t>(p)] == 1);
  CHECK(s.y == 50 % 16);
}

TEST_CASE("psi is an eigenfunction and attains its maximum at the identity") {
  const WilsonReport report = wilson_params(32, 0.5, 2000, 3);
  const WilsonParams& p = report.params;
  CHECK(report.eigen_residual <= 1e-9);
  CHECK(std::abs(psi(LiftedState::identity(32), p)) == doctest::Approx(p.psi_max));
  CHECK(p.gamma == doctest::Approx(1.0 - p.lambda.real()));
  CHECK(p.r > 0.0);
}

TEST_CASE("step bound and lazy transfer") {
  WilsonParams p;
  p.n = 64;
  p.epsilon = 0.5;
  p.gamma = 1e-3;
  p.psi_max = 64;
  p.r = 1e-6;
  const double expected =
      (std::log(p.psi_max) + 0.5 * std::log(p.gamma * p.epsilon / (4 * p.r))) / -std::log(1 - p.gamma);
  CHECK(step_bound_formula(p) == doctest::Approx(expected));
  CHECK(step_bound(p) == static_cast<long long>(std::floor(expected)));
  const WilsonParams lazy = lazy_transfer(p);
  CHECK(lazy.gamma == doctest::Approx(p.gamma / 2));
  CHECK(step_bound_formula(lazy) / step_bound_formula(p) == doctest::Approx(2.0).epsilon(0.01));
  p.r = 1e3;
  CHECK(step_bound(p) == 0);
  p.epsilon = 1.5;
  CHECK_THROWS_AS(step_bound_formula(p), DomainError);
}

TEST_CASE("range checks") {
  CHECK_THROWS_AS(wilson_params(8, 0.5, 10, 0), DomainError);
  CHECK_THROWS_AS(wilson_params(2048, 0.5, 10, 0), DomainError);
}
