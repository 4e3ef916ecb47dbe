#include "doctest.h"

#include "tbk/errors.hpp"
#include "tbk/measure.hpp"

using namespace tbk;

TEST_CASE("rational parsing and printing") {
  CHECK(to_string(Rational(3, 6)) == "1/2");
  CHECK(to_string(Rational(4)) == "4/1");
  CHECK(parse_rational("2/4") == Rational(1, 2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("3") == Rational(3));
  CHECK_THROWS_AS(parse_rational("1/0"), DomainError);
  CHECK_THROWS_AS(parse_rational("abc"), DomainError);
}

TEST_CASE("top to bottom-k puts mass 1/k on the cycles n-k+1..n") {
  const SparseMeasure q = top_to_bottom_k(5, 3);
  CHECK(q.support_size() == 3);
  CHECK(q.total_mass() == 1);
  for (int l = 3; l <= 5; ++l) CHECK(q.weight(cycle_generator(l, 5)) == Rational(1, 3));
  CHECK(q.weight(cycle_generator(2, 5)) == 0);
  CHECK_FALSE(q.is_symmetric());
  CHECK_THROWS_AS(top_to_bottom_k(4, 5), DomainError);
  CHECK_THROWS_AS(top_to_bottom_k(4, 1), DomainError);
}

TEST_CASE("reversal, symmetrization and laziness") {
  const SparseMeasure q = top_to_bottom_k(4, 2);
  const SparseMeasure qs = reversal(q);
  CHECK(qs.weight(inverse(cycle_generator(4, 4))) == Rational(1, 2));
  CHECK(reversal(qs) == q);
  const SparseMeasure qt = symmetrize(q);
  CHECK(qt.is_symmetric());
  CHECK(qt.total_mass() == 1);
  CHECK(qt.weight(cycle_generator(3, 4)) == Rational(1, 4));
  const SparseMeasure qh = lazy(q, Rational(1, 2));
  CHECK(qh.weight(Permutation::identity(4)) == Rational(1, 2));
  CHECK(qh.weight(cycle_generator(4, 4)) == Rational(1, 4));
  CHECK_THROWS_AS(lazy(q, Rational(0)), DomainError);
}

TEST_CASE("k = n includes the identity") {
  const SparseMeasure q = top_to_bottom_k(3, 3);
  CHECK(q.weight(Permutation::identity(3)) == Rational(1, 3));
}

TEST_CASE("comparison measures") {
  const SparseMeasure rt = random_transposition(5);
  CHECK(rt.total_mass() == 1);
  CHECK(rt.is_symmetric());
  CHECK(rt.weight(Permutation::identity(5)) == Rational(1, 5));
  CHECK(rt.weight(transposition(2, 4, 5)) == Rational(2, 25));
  const SparseMeasure r = rudvalis_symmetric(5);
  CHECK(r.is_symmetric());
  CHECK(r.total_mass() == 1);
}

TEST_CASE("convolution of point masses") {
  const Permutation a = cycle_generator(3, 4);
  const Permutation b = transposition(1, 2, 4);
  const SparseMeasure c = convolve_measures(SparseMeasure::point_mass(a), SparseMeasure::point_mass(b));
  CHECK(c.support_size() == 1);
  CHECK(c.weight(a * b) == 1);
  const SparseMeasure q = top_to_bottom_k(4, 3);
  const SparseMeasure qq = convolve_measures(q, reversal(q));
  CHECK(qq.is_symmetric());
  CHECK(qq.total_mass() == 1);
}

TEST_CASE("json round trip") {
  const SparseMeasure q = symmetrize(top_to_bottom_k(5, 3));
  const auto j = to_json(q);
  CHECK(measure_from_json(nlohmann::json::parse(j.dump())) == q);
}
