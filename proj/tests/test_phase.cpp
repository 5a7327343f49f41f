#include <catch2/catch_amalgamated.hpp>

#include "holescope/phase.hpp"

using namespace holescope;

TEST_CASE("hole membership on the interval excludes endpoints") {
    auto h = make_hole(Space::Interval, Rat(3, 10), Rat(6, 10));
    CHECK_FALSE(hole_contains(h, Rat(3, 10)));
    CHECK_FALSE(hole_contains(h, Rat(6, 10)));
    CHECK(hole_contains(h, Rat(1, 2)));
    CHECK_FALSE(hole_contains(h, Rat(7, 10)));
}

TEST_CASE("wrapping circle hole covers the arc through 0") {
    auto h = make_hole(Space::Circle, Rat(8, 10), Rat(2, 10));
    CHECK(hole_contains(h, Rat(9, 10)));
    CHECK(hole_contains(h, Rat(1, 10)));
    CHECK_FALSE(hole_contains(h, Rat(1, 2)));
    CHECK_FALSE(hole_contains(h, Rat(8, 10)));
    CHECK_FALSE(hole_contains(h, Rat(2, 10)));
    // 0 is interior to the wrapping arc
    CHECK(hole_contains(h, Rat(0)));
}

TEST_CASE("hole validation") {
    CHECK_THROWS_AS(make_hole(Space::Interval, Rat(0), Rat(1, 2)), UsageError);
    CHECK_THROWS_AS(make_hole(Space::Interval, Rat(1, 2), Rat(1, 2)), UsageError);
    CHECK_THROWS_AS(make_hole(Space::Interval, Rat(2, 3), Rat(1, 3)), UsageError);
    CHECK_THROWS_AS(make_hole(Space::Circle, Rat(1, 3), Rat(1, 3)), UsageError);
    CHECK_NOTHROW(make_hole(Space::Circle, Rat(2, 3), Rat(1, 3))); // wrap is fine
}

TEST_CASE("circle distance") {
    CHECK(circle_dist(Rat(1, 10), Rat(9, 10)) == Rat(2, 10));
    CHECK(circle_dist(Rat(1, 4), Rat(1, 2)) == Rat(1, 4));
    CHECK(circle_dist(Rat(1, 3), Rat(1, 3)) == Rat(0));
    CHECK(circle_dist(0.1, 0.9) == Catch::Approx(0.2));
}

TEST_CASE("wrap normalization is idempotent") {
    Rat x(17, 5);
    CHECK(wrap01(x) == Rat(2, 5));
    CHECK(wrap01(wrap01(x)) == wrap01(x));
    CHECK(wrap01(-0.25) == Catch::Approx(0.75));
    CHECK(wrap01(wrap01(-0.25)) == Catch::Approx(wrap01(-0.25)));
}

TEST_CASE("float hole membership breaks endpoint ties outward") {
    HoleD h{0.3, 0.6, Space::Interval};
    CHECK_FALSE(hole_contains_tol(h, 0.3));
    CHECK_FALSE(hole_contains_tol(h, 0.3 + 1e-14));
    CHECK(hole_contains_tol(h, 0.45));
    HoleD w{0.8, 0.2, Space::Circle};
    CHECK(hole_contains_tol(w, 0.9));
    CHECK_FALSE(hole_contains_tol(w, 0.8));
}

TEST_CASE("scalar parsing round-trips exact rationals") {
    auto p = parse_scalar("3/7");
    REQUIRE(p.exact);
    CHECK(p.r == Rat(3, 7));
    CHECK(format_rat(p.r) == "3/7");
    auto q = parse_scalar("0.125");
    REQUIRE(q.exact);
    CHECK(q.r == Rat(1, 8));
    auto e = parse_scalar("1.4142135623730951"); // finite decimal: still exact
    CHECK(e.exact);
    auto f = parse_scalar("1e-3");
    CHECK_FALSE(f.exact);
    CHECK(f.d == Catch::Approx(1e-3));
    CHECK_THROWS_AS(parse_scalar("1/0"), UsageError);
    CHECK_THROWS_AS(parse_scalar("nonsense"), std::exception);
}

TEST_CASE("bit budget guard") {
    Rat x(1, 3);
    CHECK_NOTHROW(check_budget(x, 64));
    Rat big = Rat(BigInt(1) << 200, (BigInt(1) << 200) + 1);
    CHECK_THROWS_AS(check_budget(big, 128), BudgetError);
    CHECK(bit_size(BigInt(1) << 10) == 11u);
}

TEST_CASE("log of huge rationals stays accurate") {
    BigInt n = BigInt(1) << 400;
    CHECK(log_big(n) == Catch::Approx(400 * std::log(2.0)).epsilon(1e-12));
    Rat m(1, BigInt(1) << 301);
    CHECK(log_rat(m) == Catch::Approx(-301 * std::log(2.0)).epsilon(1e-12));
}
