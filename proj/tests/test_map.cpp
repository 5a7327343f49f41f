#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "holescope/map.hpp"

using namespace holescope;

TEST_CASE("doubling map iterates exactly") {
    auto f = doubling_map();
    CHECK(f.space == Space::Circle);
    CHECK(f.expanding);
    CHECK(iterate(f, Rat(1, 3), 2) == Rat(1, 3));
    CHECK(iterate(f, Rat(1, 3), 1) == Rat(2, 3));
    CHECK(iterate(f, Rat(2, 5), 0) == Rat(2, 5));
    // 1 ~ 0 on the circle
    CHECK(eval(f, Rat(1, 2)) == Rat(0));
}

TEST_CASE("iteration composes") {
    auto f = doubling_map();
    Rat x(3, 11);
    CHECK(iterate(f, x, 7) == iterate(f, iterate(f, x, 3), 4));
}

TEST_CASE("restricted tent construction and the golden-mean orbit") {
    auto t = restricted_tent(Rat(3, 2));
    CHECK(t.exact.bp[1] == Rat(1, 3)); // c_s = 1 - 1/s
    CHECK(eval(t, Rat(0)) == Rat(1, 2));
    CHECK(iterate(t, Rat(0), 2) == Rat(3, 4)); // 1/2 is past c = 1/3, falling branch
    CHECK_THROWS_AS(restricted_tent(Rat(5, 2)), UsageError);
    CHECK_THROWS_AS(restricted_tent(Rat(1)), UsageError);

    // float mode with the golden mean: c -> 1 -> 0 -> c since T_s(0) = 2-s = c_s
    double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    auto g = restricted_tent_d(phi);
    double c = 1.0 - 1.0 / phi;
    CHECK(iterate_d(g, 0.0, 3) == Catch::Approx(0.0).margin(1e-12));
    CHECK(iterate_d(g, c, 1) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("full tent fixed data") {
    auto t = full_tent();
    CHECK(t.exact.bp[1] == Rat(1, 2));
    CHECK(eval(t, Rat(0)) == Rat(0));
    CHECK(eval(t, Rat(1, 2)) == Rat(1));
    CHECK(eval(t, Rat(1)) == Rat(0));
}

TEST_CASE("two-block example map hits its block boundaries") {
    auto f = two_block_map();
    CHECK(eval(f, Rat(1, 6)) == Rat(1, 2));
    CHECK(eval(f, Rat(1, 3)) == Rat(0));
    CHECK(eval(f, Rat(2, 3)) == Rat(1));
    CHECK(eval(f, Rat(5, 6)) == Rat(1, 2));
    // the two halves are invariant
    for (int k = 1; k < 12; ++k) {
        Rat x(k, 24);
        bool low = x <= Rat(1, 2);
        Rat y = eval(f, x);
        CHECK((low ? y <= Rat(1, 2) : y >= Rat(1, 2)));
    }
}

TEST_CASE("construction rejects bad data") {
    MapData<Rat> d;
    d.bp = {Rat(0), Rat(1, 2), Rat(1)};
    d.slope = {Rat(2), Rat(2)};
    d.icpt = {Rat(0), Rat(0)}; // discontinuous at 1/2 and leaves [0,1]
    CHECK_THROWS_AS(make_map(Space::Interval, d, "bad"), UsageError);
    d.icpt = {Rat(0), Rat(-1)};
    CHECK_THROWS_AS(make_map(Space::Interval, d, "bad"), UsageError); // interval discontinuity
    CHECK_NOTHROW(make_map(Space::Circle, d, "ok"));                  // fine mod 1
    MapData<Rat> z;
    z.bp = {Rat(0), Rat(1, 2), Rat(1, 2), Rat(1)};
    z.slope = {Rat(2), Rat(1), Rat(2)};
    z.icpt = {Rat(0), Rat(0), Rat(-1)};
    CHECK_THROWS_AS(make_map(Space::Interval, z, "degenerate"), UsageError);
}

TEST_CASE("preimages invert branch by branch") {
    auto f = doubling_map();
    IntervalSet s;
    s.comps.push_back({Rat(0), Rat(1, 2)});
    auto pre = preimage(f, s);
    REQUIRE(pre.size() == 2);
    CHECK(pre.comps[0].lo == Rat(0));
    CHECK(pre.comps[0].hi == Rat(1, 4));
    CHECK(pre.comps[1].lo == Rat(1, 2));
    CHECK(pre.comps[1].hi == Rat(3, 4));

    auto t = full_tent();
    auto pt = preimage(t, s);
    REQUIRE(pt.size() == 2);
    CHECK(pt.comps[0].hi == Rat(1, 4));
    CHECK(pt.comps[1].lo == Rat(3, 4));
    CHECK(pt.comps[1].hi == Rat(1));

    CHECK(preimage(f, IntervalSet::empty()).is_empty());
}

TEST_CASE("circle preimage of a set touching the wrap point") {
    auto f = doubling_map();
    IntervalSet s;
    s.comps.push_back({Rat(7, 8), Rat(1)});
    auto pre = preimage(f, s);
    // 1 ~ 0: the preimage of the identified point includes x = 0
    CHECK(pre.contains(Rat(0)));
    CHECK(pre.contains(Rat(15, 16)));
    CHECK(pre.contains(Rat(29, 64)));
    CHECK_FALSE(pre.contains(Rat(1, 4)));

    IntervalSet z;
    z.comps.push_back({Rat(0), Rat(1, 8)});
    auto pz = preimage(f, z);
    // the 0 ~ 1 copy adds x = 1/2 (since 2x = 1 there); the bare point 1 is
    // canonicalized away because 0 is already present
    CHECK(pz.contains(Rat(1, 2)));
    CHECK_FALSE(pz.contains(Rat(1)));
    CHECK(pz.contains(Rat(1, 16)));
    CHECK_FALSE(pz.contains(Rat(1, 4)));
}

TEST_CASE("preimage components map back into the closure of the target") {
    auto f = two_block_map();
    IntervalSet s;
    s.comps.push_back({Rat(1, 5), Rat(2, 5)});
    auto pre = preimage(f, s);
    for (const auto& c : pre.comps) {
        for (const Rat& x : {c.lo, Rat((c.lo + c.hi) / 2), c.hi}) {
            Rat y = eval(f, x);
            CHECK(y >= Rat(1, 5));
            CHECK(y <= Rat(2, 5));
        }
    }
}

TEST_CASE("itinerary domains are cylinders") {
    auto f = doubling_map();
    auto d0 = itinerary_domain(f, {0});
    REQUIRE(d0.size() == 1);
    CHECK(d0.comps[0].lo == Rat(0));
    CHECK(d0.comps[0].hi == Rat(1, 2));
    auto d01 = itinerary_domain(f, {0, 1});
    CHECK(d01.comps[0].lo == Rat(1, 4));
    CHECK(d01.comps[0].hi == Rat(1, 2));
    auto d111 = itinerary_domain(f, {1, 1, 1});
    REQUIRE_FALSE(d111.is_empty());
    CHECK(d111.comps[0].lo == Rat(7, 8));
    CHECK(d111.comps[0].hi == Rat(1));

    // full shift: all 2^n cylinders are nonempty
    for (int n = 1; n <= 6; ++n) {
        int nonempty = 0;
        for (int w = 0; w < (1 << n); ++w) {
            Itinerary it;
            for (int k = n - 1; k >= 0; --k) it.push_back((w >> k) & 1);
            if (!itinerary_domain(f, it).is_empty()) ++nonempty;
        }
        CHECK(nonempty == (1 << n));
    }
}

TEST_CASE("config round-trip is bit exact") {
    auto f = two_block_map();
    auto j = map_to_json(f);
    auto g = map_from_json(j);
    REQUIRE(g.exact_ok);
    CHECK(g.exact.bp == f.exact.bp);
    CHECK(g.exact.slope == f.exact.slope);
    CHECK(g.exact.icpt == f.exact.icpt);
    CHECK(g.space == f.space);
}

TEST_CASE("builtin resolver") {
    CHECK(builtin("doubling").label == "doubling");
    CHECK(builtin("restricted-tent(3/2)").exact_ok);
    CHECK(builtin("restricted-tent(1.6180339887498949)").exact_ok); // finite decimal stays exact
    CHECK_THROWS_AS(builtin("no-such-map"), UsageError);

    std::string path = "test_map_config.json";
    {
        auto j = map_to_json(doubling_map());
        FILE* fp = std::fopen(path.c_str(), "w");
        REQUIRE(fp);
        std::string s = j.dump();
        std::fwrite(s.data(), 1, s.size(), fp);
        std::fclose(fp);
    }
    auto g = builtin(path);
    CHECK(g.space == Space::Circle);
    CHECK(g.exact.slope[0] == Rat(2));
    std::remove(path.c_str());
}
