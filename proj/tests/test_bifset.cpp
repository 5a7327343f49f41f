#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "holescope/bifset.hpp"
#include "holescope/raster_io.hpp"

using namespace holescope;

TEST_CASE("doubling stairs up to period 3") {
    auto f = doubling_map();
    auto ss = stairs_from_orbits<Rat>(f, 3);
    // the fixed point 0 yields no stair; {1/3,2/3} and the two period-3 orbits do
    REQUIRE(ss.stairs.size() == 3);
    std::map<long, int> by_length;
    for (const auto& st : ss.stairs) ++by_length[st.length];
    CHECK(by_length[2] == 1);
    CHECK(by_length[3] == 2);
    for (const auto& st : ss.stairs) {
        CHECK(st.steps.size() == st.links.size()); // circle: cyclic, one step per link
        CHECK(st.terminal_links.empty());
    }
}

TEST_CASE("doubling stair census to period 5 matches necklace counting") {
    auto f = doubling_map();
    auto ss = stairs_from_orbits<Rat>(f, 5);
    std::map<long, int> by_length;
    for (const auto& st : ss.stairs) ++by_length[st.length];
    CHECK(by_length[2] == 1);
    CHECK(by_length[3] == 2);
    CHECK(by_length[4] == 3);
    CHECK(by_length[5] == 6);
    CHECK(ss.stairs.size() == 12);
}

TEST_CASE("interval stairs record terminal links") {
    auto t = full_tent();
    auto ss = stairs_from_orbits<Rat>(t, 2);
    // {2/5, 4/5} is the only orbit with two interior points (0 and 2/3 are
    // a boundary fixed point and a single interior fixed point)
    REQUIRE(ss.stairs.size() == 1);
    const auto& st = ss.stairs[0];
    REQUIRE(st.steps.size() == 1);
    CHECK(st.steps[0].a == Rat(2, 5));
    CHECK(st.steps[0].b == Rat(4, 5));
    CHECK(st.terminal_links == std::vector<Rat>{Rat(2, 5), Rat(4, 5)});
}

TEST_CASE("step classification") {
    auto f = doubling_map();
    auto ss = stairs_from_orbits<Rat>(f, 2);
    bool seen = false;
    for (const auto& st : ss.stairs)
        for (const auto& step : st.steps)
            if (step.a == Rat(1, 3) && step.b == Rat(2, 3)) {
                seen = true;
                // all slopes positive: orientation preserved at both endpoints
                CHECK(step.cls == StepClass::IsolatedFromBelow);
                CHECK_FALSE(step.critical);
            }
    CHECK(seen);

    auto t = full_tent();
    auto ts = stairs_from_orbits<Rat>(t, 2);
    REQUIRE(ts.stairs.size() == 1);
    CHECK(ts.stairs[0].steps[0].cls == StepClass::Isolated); // orientation reversal

    // non-expanding maps stay unclassified
    MapData<Rat> d;
    d.bp = {Rat(0), Rat(1, 2), Rat(1)};
    d.slope = {Rat(1, 2), Rat(3, 2)};
    d.icpt = {Rat(0), Rat(-1, 2)};
    auto g = make_map(Space::Interval, std::move(d), "slow");
    PeriodicOrbitT<Rat> fake;
    fake.points = {Rat(0), Rat(1, 2)};
    fake.minimal_period = 2;
    fake.orientation_at = {Orientation::Preserves, Orientation::Preserves};
    fake.signs_at = {CriticalSign::NotApplicable, CriticalSign::NotApplicable};
    StepT<Rat> step;
    step.a = Rat(0);
    step.b = Rat(1, 2);
    classify_step(g, fake, step);
    CHECK(step.cls == StepClass::Unclassified);
}

TEST_CASE("doubling raster basics") {
    auto f = doubling_map();
    RasterOptions opts;
    opts.sampling = Sampling::Jitter;
    opts.stairs_pmax = 3;
    auto r = rasterize(f, 256, 500, opts);
    CHECK(r.mode == "exact");
    long i = r.col_of(1.0 / 3), j = r.row_of(2.0 / 3);
    // the {1/3, 2/3} step corner: only the exact endpoints survive, so the
    // corner cell enters through the stair overlay, not the sampled layer
    CHECK(r.in_set(i, j));
    CHECK((r.at(i, j) & BifRaster::kStair));

    long inset = 0, valid = 0;
    for (long y = 0; y < r.R; ++y)
        for (long x = 0; x < r.R; ++x) {
            if (r.excluded(x, y)) {
                CHECK_FALSE(r.in_set(x, y));
                continue;
            }
            ++valid;
            if (r.in_set(x, y)) ++inset;
        }
    CHECK(inset > 0);
    CHECK(double(inset) / valid < 0.10);
}

TEST_CASE("raster determinism across thread counts") {
    auto f = doubling_map();
    RasterOptions a, b;
    a.sampling = b.sampling = Sampling::Jitter;
    a.threads = 1;
    b.threads = 4;
    auto r1 = rasterize(f, 64, 200, a);
    auto r2 = rasterize(f, 64, 200, b);
    CHECK(r1.cells == r2.cells);
}

TEST_CASE("horizon monotonicity of the sampled layer") {
    auto f = doubling_map();
    RasterOptions opts;
    opts.sampling = Sampling::Jitter;
    auto lo = rasterize(f, 128, 200, opts);
    auto hi = rasterize(f, 128, 400, opts);
    for (long j = 0; j < lo.R; ++j)
        for (long i = 0; i < lo.R; ++i)
            if (hi.in_set(i, j)) REQUIRE(lo.in_set(i, j));
}

TEST_CASE("vertical closure: an a-survivor cell survives every shorter hole") {
    auto f = doubling_map();
    RasterOptions opts;
    opts.sampling = Sampling::Jitter;
    auto r = rasterize(f, 128, 300, opts);
    for (long i = 1; i < r.R; ++i)
        for (long j = i + 2; j < r.R; ++j) {
            if (!(r.at(i, j) & BifRaster::kASurv)) continue;
            for (long j2 = i + 1; j2 < j; ++j2)
                if (!r.excluded(i, j2)) REQUIRE((r.at(i, j2) & BifRaster::kASurv));
        }
}

TEST_CASE("hausdorff distance on rasters") {
    auto f = doubling_map();
    RasterOptions opts;
    opts.sampling = Sampling::Jitter;
    auto r = rasterize(f, 128, 300, opts);
    CHECK(hausdorff_distance(r, r) == 0.0);

    BifRaster shifted = r;
    for (long j = 0; j < r.R; ++j)
        for (long i = 0; i < r.R; ++i) {
            long src = (i + 1) % r.R;
            shifted.at(i, j) = r.at(src, j);
        }
    CHECK(hausdorff_distance(r, shifted) == Catch::Approx(1.0 / r.R));

    auto r2 = rasterize(f, 64, 300, opts);
    CHECK_THROWS_AS(hausdorff_distance(r, r2), UsageError);
}

TEST_CASE("probe with radius zero is empty") {
    auto f = doubling_map();
    RasterOptions opts;
    opts.sampling = Sampling::Jitter;
    auto r = rasterize(f, 64, 100, opts);
    auto rep = raster_step_neighborhood_probe(r, 1.0 / 3, 2.0 / 3, 0);
    CHECK(rep.hits == 0);
}

TEST_CASE("structure checks pass for the doubling raster") {
    auto f = doubling_map();
    RasterOptions opts;
    opts.sampling = Sampling::Jitter;
    opts.stairs_pmax = 3;
    auto r = rasterize(f, 256, 500, opts);
    auto rep = theorem_a_checks<Rat>(f, r, 3);
    CHECK(rep.nonempty);
    CHECK(rep.no_full_block);
    CHECK(rep.runs_reach_diagonal);
    CHECK(rep.stairs_connected);
    CHECK(rep.stairs_on_inset);
    CHECK(rep.stair_count == 3);
    CHECK(offdiag_symmetry_ok(r));
}

TEST_CASE("two-block raster keeps an empty interior") {
    auto f = two_block_map();
    RasterOptions opts;
    opts.sampling = Sampling::Jitter;
    opts.stairs_pmax = 2; // sampled survivors are too thin at this horizon
    auto r = rasterize(f, 128, 300, opts);
    auto rep = theorem_a_checks<Rat>(f, r, 0);
    CHECK(rep.nonempty);
    CHECK(rep.no_full_block);
    CHECK(rep.stairs_connected); // vacuous at p_max = 0
}

TEST_CASE("pgm and png exports") {
    auto f = doubling_map();
    RasterOptions opts;
    opts.sampling = Sampling::Jitter;
    auto r = rasterize(f, 64, 100, opts);
    auto pgm = raster_to_pgm(r);
    std::string head(pgm.begin(), pgm.begin() + 3);
    CHECK(head == "P5\n");
    CHECK(pgm.size() > 64u * 64u);
    auto pgm2 = raster_to_pgm(r);
    CHECK(digest_bytes(pgm) == digest_bytes(pgm2)); // bit-reproducible

    auto png = raster_to_png(r);
    REQUIRE(png.size() > 8);
    CHECK(png[1] == 'P');
    CHECK(png[2] == 'N');
    CHECK(png[3] == 'G');
}

TEST_CASE("same-gap BFS connects nearby out-of-set holes") {
    auto f = doubling_map();
    RasterOptions opts;
    opts.sampling = Sampling::Jitter;
    auto r = rasterize(f, 128, 300, opts);
    // two holes just inside the zero-entropy gap below the (1/3, 2/3) step
    CHECK(same_raster_gap(r, 11.0 / 32, 21.0 / 32, 45.0 / 128, 83.0 / 128));
}
