#include "cflab/error.hpp"
#include "cflab/exact.hpp"

#include <doctest.h>

using namespace cflab;

TEST_SUITE("exact") {
  TEST_CASE("rational normalisation and arithmetic") {
    const BigRational a(BigInt(6), BigInt(-8));
    CHECK(a.numerator() == -3);
    CHECK(a.denominator() == 4);
    CHECK((a + BigRational(3, 4)).sign() == 0);
    CHECK((BigRational(1, 3) * BigRational(3, 7)).str() == "1/7");
    CHECK((BigRational(1, 3) / BigRational(2, 3)).str() == "1/2");
    CHECK((BigRational(1, 3) - BigRational(1, 2)).str() == "-1/6");
    CHECK(BigRational(1, 3) < BigRational(1, 2));
    CHECK(BigRational(4, 2).str() == "2");
    CHECK_THROWS_AS(BigRational(1, 0), DomainError);
    CHECK_THROWS_AS(BigRational(1, 2) / BigRational(0, 1), DomainError);
  }

  TEST_CASE("rational parsing") {
    CHECK(BigRational::parse("331/651").str() == "331/651");
    CHECK(BigRational::parse("0.25").str() == "1/4");
    CHECK(BigRational::parse("-1.5").str() == "-3/2");
    CHECK(BigRational::parse("17").str() == "17");
    CHECK_THROWS(BigRational::parse("1/0"));
    CHECK_THROWS(BigRational::parse("abc"));
  }

  TEST_CASE("Mersenne reciprocal sum, 12 terms, 52 digits") {
    const BigRational s = reciprocal_sum(SequenceSpec{}, 12);
    CHECK(to_decimal(s, 52).str() == "0.5164541789407885653304873429715228588159685534154197");
  }

  TEST_CASE("one term") {
    CHECK(to_decimal(reciprocal_sum(SequenceSpec{}, 1), 5).str() == "0.33333");
  }

  TEST_CASE("dyadic sums terminate") {
    SequenceSpec s{SequenceKind::dyadic, {}, {}};
    const BigRational r = reciprocal_sum(s, 3);
    CHECK(r.str() == "13/32");
    const auto t = terminating_decimal(r);
    REQUIRE(t.has_value());
    CHECK(t->str() == "0.40625");
    CHECK_FALSE(terminating_decimal(BigRational(1, 3)).has_value());
    // lcm merge keeps the denominator at 2^{p_max}
    CHECK(reciprocal_sum(s, 13).denominator() == pow2(521));
  }

  TEST_CASE("decimal truncation toward zero") {
    CHECK(to_decimal(BigRational(2, 3), 3).str() == "0.666");
    CHECK(to_decimal(BigRational(-2, 3), 3).str() == "-0.666");
    CHECK(to_decimal(BigRational(22, 7), 4).str() == "3.1428");
    const DecimalApprox d = parse_decimal("0.5084485407");
    CHECK(d.precision == 10);
    CHECK(d.as_rational() == BigRational(BigInt(5084485407), pow10(10)));
    CHECK_THROWS(parse_decimal("0.12a"));
  }

  TEST_CASE("decimal json round trip") {
    const DecimalApprox d = to_decimal(BigRational(1, 7), 12);
    nlohmann::json j = d;
    CHECK(j["digits"] == "0.142857142857");
    CHECK(j["precision"] == 12);
    CHECK(j.get<DecimalApprox>() == d);
  }

  TEST_CASE("digit census") {
    const DigitCensus c = digit_census(to_decimal(BigRational(1, 7), 12));
    CHECK(c.total == 12);
    CHECK(c.counts[1] == 2);
    CHECK(c.counts[0] == 0);
    CHECK(c.frequency(4) == doctest::Approx(2.0 / 12));
    CHECK_THROWS_AS(digit_census("12x"), DomainError);
  }
}
