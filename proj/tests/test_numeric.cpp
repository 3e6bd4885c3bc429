#include "powerseek/numeric.hpp"

#include <doctest.h>

using namespace powerseek;

TEST_SUITE("numeric") {

TEST_CASE("parse_rational accepts fractions, integers and decimals") {
    CHECK(parse_rational("3/4") == Rational(3, 4));
    CHECK(parse_rational("6/8") == Rational(3, 4));
    CHECK(parse_rational("-2") == Rational(-2));
    CHECK(parse_rational("0.125") == Rational(1, 8));
    CHECK(parse_rational(" .5 ") == Rational(1, 2));
    CHECK(parse_rational("9/10") == parse_rational("0.9"));
}

TEST_CASE("parse_rational rejects malformed text") {
    CHECK_THROWS_AS(parse_rational("1/0"), InvalidArgument);
    CHECK_THROWS_AS(parse_rational("1e-3"), InvalidArgument);
    CHECK_THROWS_AS(parse_rational(""), InvalidArgument);
    CHECK_THROWS_AS(parse_rational("a/b"), InvalidArgument);
    CHECK_THROWS_AS(parse_rational("."), InvalidArgument);
}

TEST_CASE("to_string is canonical") {
    CHECK(to_string(Rational(4, 2)) == "2");
    CHECK(to_string(Rational(-3, 9)) == "-1/3");
    CHECK(to_string(0.5) == "0.5");
}

TEST_CASE("rational_from_double is exact") {
    CHECK(rational_from_double(0.375) == Rational(3, 8));
    CHECK(rational_from_double(0.1).get_d() == 0.1);
    CHECK(rational_from_double(0.1) != Rational(1, 10));
}

TEST_CASE("exact solve") {
    Matrix<Rational> a(2, 2);
    a << Rational(0), Rational(1), Rational(2), Rational(3);
    Vector<Rational> b(2);
    b << Rational(1), Rational(8);
    const auto x = solve_linear(a, b);
    // 0x + y = 1, 2x + 3y = 8
    CHECK(x(0) == Rational(5, 2));
    CHECK(x(1) == Rational(1));
}

TEST_CASE("singular systems are rejected") {
    Matrix<Rational> a(2, 2);
    a << Rational(1), Rational(2), Rational(2), Rational(4);
    Vector<Rational> b(2);
    b << Rational(1), Rational(1);
    CHECK_THROWS_AS(solve_linear(a, b), NumericError);

    Matrix<double> ad(2, 2);
    ad << 1, 2, 2, 4;
    Vector<double> bd(2);
    bd << 1, 1;
    CHECK_THROWS_AS(solve_linear(ad, bd), NumericError);
}

TEST_CASE("double solve") {
    Matrix<double> a(3, 3);
    a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    Vector<double> x_true(3);
    x_true << 1, -2, 3;
    const Vector<double> x = solve_linear<double>(a, a * x_true);
    CHECK((x - x_true).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("LexLess orders vectors lexicographically") {
    Vector<Rational> u(2), v(2);
    u << Rational(1), Rational(5);
    v << Rational(2), Rational(0);
    CHECK(LexLess<Rational>{}(u, v));
    CHECK_FALSE(LexLess<Rational>{}(v, u));
    CHECK_FALSE(LexLess<Rational>{}(u, u));
}

}
