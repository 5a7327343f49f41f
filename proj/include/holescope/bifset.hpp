#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "holescope/orbits.hpp"
#include "holescope/survival.hpp"

namespace holescope {

// ---------------------------------------------------------------------------
// Steps and stairs

enum class StepClass { Isolated, IsolatedFromBelow, AccumulatedFromBelow, Unclassified };

template <class T>
struct StepT {
    T a{}, b{}; // adjacent orbit points; (a,b) is the step hole (may wrap on the circle)
    std::size_t orbit = 0; // index into the orbit list returned alongside
    bool critical = false;
    StepClass cls = StepClass::Unclassified;
};

template <class T>
struct StairT {
    std::size_t orbit = 0;
    std::vector<StepT<T>> steps;
    std::vector<T> links;          // shared corner coordinates, one per orbit point used
    std::vector<T> terminal_links; // interval case: lowest / highest interior point
    long length = 0;               // number of links
};

using Step = StepT<Rat>;
using Stair = StairT<Rat>;

template <class T>
struct StairSet {
    std::vector<PeriodicOrbitT<T>> orbits;
    std::vector<StairT<T>> stairs;
};

/// Classification per the hyperbolic / critical step case analysis: a
/// non-critical step is isolated when f^p reverses orientation at a or b and
/// isolated from below when it preserves orientation at both; a critical step
/// is accumulated from below exactly when f^p is negative at a and positive
/// at b, and isolated from below for every other sign pattern. Maps that are
/// not piecewise uniformly expanding stay unclassified.
template <class T>
void classify_step(const PiecewiseLinearMap& f, const PeriodicOrbitT<T>& orb, StepT<T>& st) {
    if (!f.expanding) {
        st.cls = StepClass::Unclassified;
        return;
    }
    auto find = [&](const T& x) -> std::size_t {
        for (std::size_t i = 0; i < orb.points.size(); ++i)
            if (detail::near_eq(orb.points[i], x)) return i;
        throw UsageError("classify_step: step endpoint is not an orbit point");
    };
    std::size_t ia = find(st.a), ib = find(st.b);
    st.critical = orb.critical;
    if (!orb.critical) {
        bool rev = orb.orientation_at[ia] == Orientation::Reverses ||
                   orb.orientation_at[ib] == Orientation::Reverses;
        st.cls = rev ? StepClass::Isolated : StepClass::IsolatedFromBelow;
        return;
    }
    bool neg_a = orb.signs_at[ia] == CriticalSign::Negative;
    bool pos_b = orb.signs_at[ib] == CriticalSign::Positive;
    st.cls = (neg_a && pos_b) ? StepClass::AccumulatedFromBelow : StepClass::IsolatedFromBelow;
}

namespace detail {
template <class T>
bool on_boundary(Space space, const T& x) {
    if (space == Space::Circle) return false;
    return near_eq(x, T(0)) || near_eq(x, T(1));
}

/// Exact survival check for a step corner: no orbit point lies in the open
/// (possibly wrapping) hole between the two adjacent points.
template <class T>
bool orbit_avoids_hole(Space space, const std::vector<T>& pts, const T& a, const T& b) {
    bool wrap = space == Space::Circle && b < a;
    for (const T& p : pts) {
        bool inside = wrap ? (p > a || p < b) : (p > a && p < b);
        if (inside) return false;
    }
    return true;
}
} // namespace detail

/// One stair per periodic orbit with at least two points off the boundary:
/// steps from adjacent interior points (cyclically on the circle, including
/// the wrapping pair), classified, with the both-endpoints-survive property
/// verified against the full orbit.
template <class T>
StairSet<T> stairs_from_orbits(const PiecewiseLinearMap& f, long p_max,
                               std::size_t node_cap = kDefaultNodeCap) {
    StairSet<T> out;
    out.orbits = periodic_orbits<T>(f, p_max, node_cap);
    for (std::size_t oi = 0; oi < out.orbits.size(); ++oi) {
        const auto& orb = out.orbits[oi];
        std::vector<T> pts; // interior points, sorted
        for (const T& p : orb.points)
            if (!detail::on_boundary(f.space, p)) pts.push_back(p);
        if (pts.size() < 2) continue;
        StairT<T> st;
        st.orbit = oi;
        std::size_t m = pts.size();
        std::size_t nsteps = f.space == Space::Circle ? m : m - 1;
        for (std::size_t i = 0; i < nsteps; ++i) {
            StepT<T> step;
            step.a = pts[i];
            step.b = pts[(i + 1) % m];
            step.orbit = oi;
            if (!detail::orbit_avoids_hole(f.space, orb.points, step.a, step.b))
                throw AssertionError("stairs_from_orbits: step endpoints do not survive their hole");
            classify_step(f, orb, step);
            st.steps.push_back(step);
        }
        st.links = pts;
        if (f.space == Space::Interval) {
            st.terminal_links.push_back(pts.front());
            st.terminal_links.push_back(pts.back());
        }
        st.length = static_cast<long>(st.links.size());
        out.stairs.push_back(std::move(st));
    }
    return out;
}

// ---------------------------------------------------------------------------
// BifRaster

enum class Sampling { Center, Jitter };

struct RasterOptions {
    Sampling sampling = Sampling::Center;
    long stairs_pmax = 0;     // 0 disables the exact stair overlay
    long pre_pmax = 0;        // critical-cycle preimage overlay: orbit period cap
    long pre_depth = 0;       // ... and preimage tree depth (0 disables)
    double eps_diag = 0.0;    // 0 means 1/resolution
    int threads = 1;
};

/// Grid over the hole parameter space. Interval maps use the open upper
/// triangle a < b with a one-cell boundary margin; circle maps use the full
/// square minus the diagonal band (lower-triangle cells are wrapping holes).
/// A cell is in-set when its sampled hole has a surviving endpoint or an
/// exact stair / critical-preimage segment passes through it.
struct BifRaster {
    static constexpr std::uint8_t kASurv = 1;
    static constexpr std::uint8_t kBSurv = 2;
    static constexpr std::uint8_t kExcluded = 4;
    static constexpr std::uint8_t kStair = 8;
    static constexpr std::uint8_t kPre = 16;

    long R = 0;
    long N = 0;
    Space space = Space::Interval;
    std::string label;
    std::string mode; // "exact" or "float" sampled layer
    Sampling sampling = Sampling::Center;
    double eps_diag = 0.0;
    std::vector<std::uint8_t> cells; // row-major, index j*R + i (i: a, j: b)

    std::uint8_t at(long i, long j) const { return cells[static_cast<std::size_t>(j) * R + i]; }
    std::uint8_t& at(long i, long j) { return cells[static_cast<std::size_t>(j) * R + i]; }
    bool excluded(long i, long j) const { return at(i, j) & kExcluded; }
    bool in_set(long i, long j) const {
        std::uint8_t c = at(i, j);
        return !(c & kExcluded) && (c & (kASurv | kBSurv | kStair | kPre));
    }
    bool double_point(long i, long j) const {
        std::uint8_t c = at(i, j);
        return !(c & kExcluded) && (c & kASurv) && (c & kBSurv);
    }
    /// True on the diagonal-band part of the exclusion (not the boundary margin).
    bool diag_band(long i, long j) const {
        if (space == Space::Interval) {
            if (j <= i) return true;
            return (double(j - i)) / R < eps_diag;
        }
        long d = std::abs(j - i);
        d = std::min(d, R - d);
        return (double(d)) / R < eps_diag || i == j;
    }
    long col_of(double a) const { return std::min(R - 1, std::max(0L, (long)std::floor(a * R))); }
    long row_of(double b) const { return std::min(R - 1, std::max(0L, (long)std::floor(b * R))); }
};

namespace detail {

inline constexpr std::int64_t kJitterPrime = 999983;

struct ColStats { // per a-column orbit statistics, as int64 numerators or doubles
    double up_min, all_min, all_max;
};

/// Orbit statistics that decide endpoint survival for every hole sharing the
/// endpoint: a survives (a,b) iff no orbit point lies in (a,b), i.e. iff
/// b <= min of the orbit points strictly above a (and, for wrapping circle
/// holes, no point lies above a at all and none below b).
template <class Num>
struct EndpointStats {
    std::vector<Num> sample;           // the endpoint value per grid line
    std::vector<Num> up_min;           // min orbit point strictly above sample
    std::vector<Num> dn_max;           // max orbit point strictly below sample
    std::vector<Num> all_min, all_max; // over the whole finite orbit
};

template <class Num, class Iter>
EndpointStats<Num> endpoint_stats(const std::vector<Num>& samples, long N, Num inf, Iter step,
                                  int threads) {
    std::size_t R = samples.size();
    EndpointStats<Num> st;
    st.sample = samples;
    st.up_min.assign(R, inf);
    st.dn_max.assign(R, -inf);
    st.all_min.assign(R, inf);
    st.all_max.assign(R, -inf);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Num x = samples[i];
            Num base = samples[i];
            for (long n = 0; n <= N; ++n) {
                if (x > base && x < st.up_min[i]) st.up_min[i] = x;
                if (x < base && x > st.dn_max[i]) st.dn_max[i] = x;
                if (x < st.all_min[i]) st.all_min[i] = x;
                if (x > st.all_max[i]) st.all_max[i] = x;
                if (n < N) x = step(x);
            }
        }
    };
    if (threads <= 1) {
        work(0, R);
    } else {
        std::vector<std::thread> ts;
        std::size_t chunk = (R + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::size_t lo = std::min(R, t * chunk), hi = std::min(R, (t + 1) * chunk);
            if (lo < hi) ts.emplace_back(work, lo, hi);
        }
        for (auto& t : ts) t.join();
    }
    return st;
}

/// Integer-modular branch data: numerators over a common denominator D.
struct ModularMap {
    std::int64_t D = 0;
    std::vector<std::int64_t> bp;    // bp * D
    std::vector<std::int64_t> slope; // integer slopes
    std::vector<std::int64_t> icpt;  // icpt * D
    bool circle = false;

    std::int64_t step(std::int64_t x) const {
        std::size_t K = slope.size(), l = K - 1;
        for (std::size_t k = 1; k < K; ++k)
            if (x < bp[k]) { l = k - 1; break; }
        std::int64_t y = slope[l] * x + icpt[l];
        if (circle) {
            y %= D;
            if (y < 0) y += D;
        }
        return y;
    }
};

/// Builds the modular representation when all slopes are integers and the
/// common denominator of breakpoints/intercepts keeps every intermediate in
/// int64 range. D = 2R * q * L with q prime, so jittered samples +-1/D are
/// non-dyadic and generic.
inline bool modular_map_for(const PiecewiseLinearMap& f, long R, ModularMap& out) {
    if (!f.exact_ok) return false;
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    BigInt L = 1;
    for (const auto& s : f.exact.slope)
        if (denominator(s) != 1) return false;
    auto fold = [&](const Rat& x) { L = boost::multiprecision::lcm(L, denominator(x)); };
    for (const auto& x : f.exact.bp) fold(x);
    for (const auto& x : f.exact.icpt) fold(x);
    BigInt D = BigInt(2) * R * kJitterPrime * L;
    BigInt worst = 0;
    for (std::size_t l = 0; l < f.exact.slope.size(); ++l) {
        BigInt w = boost::multiprecision::abs(numerator(f.exact.slope[l])) * D +
                   boost::multiprecision::abs(numerator(f.exact.icpt[l]) * (D / denominator(f.exact.icpt[l])));
        if (w > worst) worst = w;
    }
    if (worst >= (BigInt(1) << 62)) return false;
    out.D = D.convert_to<std::int64_t>();
    out.circle = f.space == Space::Circle;
    out.bp.clear();
    out.slope.clear();
    out.icpt.clear();
    for (const auto& x : f.exact.bp)
        out.bp.push_back(((numerator(x) * (D / denominator(x)))).convert_to<std::int64_t>());
    for (const auto& s : f.exact.slope) out.slope.push_back(numerator(s).convert_to<std::int64_t>());
    for (const auto& x : f.exact.icpt)
        out.icpt.push_back(((numerator(x) * (D / denominator(x)))).convert_to<std::int64_t>());
    return true;
}

template <class Num>
void fill_cells(BifRaster& r, const EndpointStats<Num>& A, const EndpointStats<Num>& B, Num inf) {
    for (long j = 0; j < r.R; ++j) {
        for (long i = 0; i < r.R; ++i) {
            std::uint8_t& c = r.at(i, j);
            if (c & BifRaster::kExcluded) continue;
            bool wrap = r.space == Space::Circle && B.sample[j] < A.sample[i];
            bool as, bs;
            if (!wrap) {
                as = A.up_min[i] >= B.sample[j];
                bs = B.dn_max[j] <= A.sample[i];
            } else {
                as = A.up_min[i] == inf && A.all_min[i] >= B.sample[j];
                bs = B.all_max[j] <= A.sample[i] && B.all_min[j] >= B.sample[j];
            }
            if (as) c |= BifRaster::kASurv;
            if (bs) c |= BifRaster::kBSurv;
        }
    }
}

inline void mark_segment_cells(BifRaster& r, bool vertical, double fixed, double lo, double hi,
                               std::uint8_t bit) {
    if (hi < lo) return;
    long f0 = vertical ? r.col_of(fixed) : r.row_of(fixed);
    long c0 = vertical ? r.row_of(lo) : r.col_of(lo);
    long c1 = vertical ? r.row_of(hi) : r.col_of(hi);
    for (long c = c0; c <= c1; ++c) {
        long i = vertical ? f0 : c;
        long j = vertical ? c : f0;
        if (!r.excluded(i, j)) r.at(i, j) |= bit;
    }
}

/// Marks the V-segment {x} x (x, t] and H-segment [s, x) x {x} of a point x
/// whose forward orbit has min-above t and max-below s; both segments consist
/// of genuine bifurcation-set parameters. Wrapping pieces split at 0/1.
inline void mark_point_segments(BifRaster& r, double x, double t, double s, std::uint8_t bit,
                                bool wrap_v, bool wrap_h) {
    if (wrap_v) {
        mark_segment_cells(r, true, x, x, 1.0 - 0.5 / r.R, bit);
        mark_segment_cells(r, true, x, 0.0, t, bit);
    } else {
        mark_segment_cells(r, true, x, x, t, bit);
    }
    if (wrap_h) {
        mark_segment_cells(r, false, x, s, 1.0 - 0.5 / r.R, bit);
        mark_segment_cells(r, false, x, 0.0, x, bit);
    } else {
        mark_segment_cells(r, false, x, s, x, bit);
    }
}

template <class T>
void add_stair_overlay(BifRaster& r, const PiecewiseLinearMap& f, const StairSet<T>& ss) {
    for (const auto& st : ss.stairs) {
        const auto& pts = st.links; // sorted interior orbit points
        std::size_t m = pts.size();
        for (std::size_t i = 0; i < m; ++i) {
            double x = double(pts[i]);
            double t, s;
            bool wrap_v = false, wrap_h = false;
            if (f.space == Space::Circle) {
                t = double(pts[(i + 1) % m]);
                s = double(pts[(i + m - 1) % m]);
                wrap_v = i + 1 == m;
                wrap_h = i == 0;
            } else {
                t = i + 1 < m ? double(pts[i + 1]) : 1.0;
                s = i > 0 ? double(pts[i - 1]) : 0.0;
            }
            mark_point_segments(r, x, t, s, BifRaster::kStair, wrap_v, wrap_h);
        }
    }
}

/// Critical-cycle preimage overlay: every point whose orbit falls into a
/// critical periodic cycle carries exact V/H bifurcation segments given by
/// the min-above / max-below of its (finite, eventually periodic) orbit.
inline void add_preimage_overlay(BifRaster& r, const PiecewiseLinearMap& f, long p_max,
                                 long depth, std::size_t point_cap = 2'000'000) {
    auto orbits = periodic_orbits<double>(f, p_max);
    std::vector<double> tree;
    long max_period = 0;
    for (const auto& o : orbits) {
        if (!o.critical) continue;
        for (double p : o.points) tree.push_back(p);
        max_period = std::max(max_period, o.minimal_period);
    }
    if (tree.empty()) return;
    const auto& d = f.flt;
    std::size_t K = d.slope.size();
    std::vector<double> frontier = tree;
    for (long lev = 0; lev < depth; ++lev) {
        std::vector<double> next;
        for (double x : frontier) {
            for (std::size_t l = 0; l < K; ++l) {
                auto pull = [&](double target) {
                    double y = (target - d.icpt[l]) / d.slope[l];
                    if (y >= d.bp[l] - 1e-12 && y <= d.bp[l + 1] + 1e-12) next.push_back(y);
                };
                pull(x);
                if (f.space == Space::Circle && x == 0.0) pull(1.0);
            }
        }
        std::sort(next.begin(), next.end());
        std::vector<double> uniq;
        for (double y : next)
            if (uniq.empty() || y - uniq.back() > 1e-13) uniq.push_back(y);
        frontier = std::move(uniq);
        tree.insert(tree.end(), frontier.begin(), frontier.end());
        if (tree.size() > point_cap)
            throw ResourceCapError("preimage overlay: point cap exceeded");
    }
    long horizon = depth + 2 * max_period + 4;
    for (double x0 : tree) {
        double t = 2.0, s = -1.0;
        double x = x0;
        for (long n = 0; n < horizon; ++n) {
            x = eval(f, x);
            if (x > x0 && x < t) t = x;
            if (x < x0 && x > s) s = x;
        }
        if (t > 1.0) t = 1.0;
        if (s < 0.0) s = 0.0;
        mark_point_segments(r, x0, t, s, BifRaster::kPre, false, false);
    }
}

} // namespace detail

/// Rasterizes the bifurcation set: per grid line, one endpoint orbit to
/// horizon N decides survival for every hole sharing that endpoint (exact
/// consequence of hole monotonicity), so the sweep is O(R*N) + O(R^2).
/// Center sampling evaluates cell centers; Jitter offsets samples by a tiny
/// antisymmetric non-dyadic amount (exact integer arithmetic when the map
/// has integer slopes), which keeps sample orbits generic.
inline BifRaster rasterize(const PiecewiseLinearMap& f, long resolution, long N,
                           const RasterOptions& opts = {}) {
    if (resolution < 16) throw UsageError("rasterize: resolution >= 16 required");
    if (N < 1) throw UsageError("rasterize: N >= 1 required");
    BifRaster r;
    r.R = resolution;
    r.N = N;
    r.space = f.space;
    r.label = f.label;
    r.sampling = opts.sampling;
    r.eps_diag = opts.eps_diag > 0 ? opts.eps_diag : 1.0 / resolution;
    r.cells.assign(static_cast<std::size_t>(resolution) * resolution, 0);
    long R = resolution;
    for (long j = 0; j < R; ++j)
        for (long i = 0; i < R; ++i) {
            bool ex;
            if (f.space == Space::Interval)
                ex = j <= i || i == 0 || j == R - 1 || (double(j - i)) / R < r.eps_diag;
            else {
                long dd = std::abs(j - i);
                dd = std::min(dd, R - dd);
                ex = i == j || (double(dd)) / R < r.eps_diag;
            }
            if (ex) r.at(i, j) |= BifRaster::kExcluded;
        }

    detail::ModularMap mm;
    bool exact = opts.sampling == Sampling::Jitter && detail::modular_map_for(f, R, mm);
    r.mode = exact ? "exact" : "float";
    if (exact) {
        std::int64_t step = mm.D / (2 * R);
        std::vector<std::int64_t> sa(R), sb(R);
        for (long i = 0; i < R; ++i) sa[i] = (2 * i + 1) * step + 1;
        for (long j = 0; j < R; ++j) sb[j] = (2 * j + 1) * step - 1;
        auto f64 = [&](std::int64_t x) { return mm.step(x); };
        std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
        auto A = detail::endpoint_stats<std::int64_t>(sa, N, inf, f64, opts.threads);
        auto B = detail::endpoint_stats<std::int64_t>(sb, N, inf, f64, opts.threads);
        detail::fill_cells(r, A, B, inf);
    } else {
        double g = opts.sampling == Sampling::Jitter
                       ? 1.0 / (2.0 * R * detail::kJitterPrime)
                       : 0.0;
        std::vector<double> sa(R), sb(R);
        for (long i = 0; i < R; ++i) sa[i] = (i + 0.5) / R + g;
        for (long j = 0; j < R; ++j) sb[j] = (j + 0.5) / R - g;
        auto fd = [&](double x) { return eval(f, x); };
        double inf = std::numeric_limits<double>::infinity();
        auto A = detail::endpoint_stats<double>(sa, N, inf, fd, opts.threads);
        auto B = detail::endpoint_stats<double>(sb, N, inf, fd, opts.threads);
        detail::fill_cells(r, A, B, inf);
    }
    if (opts.stairs_pmax > 0) {
        if (f.exact_ok) {
            auto ss = stairs_from_orbits<Rat>(f, opts.stairs_pmax);
            detail::add_stair_overlay(r, f, ss);
        } else {
            auto ss = stairs_from_orbits<double>(f, opts.stairs_pmax);
            detail::add_stair_overlay(r, f, ss);
        }
    }
    if (opts.pre_depth > 0 && opts.pre_pmax > 0)
        detail::add_preimage_overlay(r, f, opts.pre_pmax, opts.pre_depth);
    return r;
}

// ---------------------------------------------------------------------------
// Raster analyses

struct ProbeReport {
    long radius = 0;
    long hits = 0; // in-set cells (sampled or preimage layers) strictly inside the step hole
    std::vector<std::pair<long, long>> cells;
};

/// Scans the radius x radius block below-left of a step corner for in-set
/// cells whose hole [a',b'] is strictly contained in the step hole (a,b).
/// Stair-overlay-only cells are not counted: the step's own stair passes
/// through the corner, and overlay cells carry no "below" evidence.
inline ProbeReport raster_step_neighborhood_probe(const BifRaster& r, double a, double b,
                                                  long radius) {
    ProbeReport rep;
    rep.radius = radius;
    if (radius == 0) return rep;
    long ci = r.col_of(a), cj = r.row_of(b);
    if (ci < 0 || ci >= r.R || cj < 0 || cj >= r.R)
        throw UsageError("raster_step_neighborhood_probe: corner outside raster");
    for (long j = std::max(0L, cj - radius); j <= cj; ++j) {
        for (long i = ci; i <= std::min(r.R - 1, ci + radius); ++i) {
            if (r.excluded(i, j)) continue;
            double ac = (i + 0.5) / r.R, bc = (j + 0.5) / r.R;
            if (!(ac > a && bc < b)) continue;
            std::uint8_t c = r.at(i, j);
            if (c & (BifRaster::kASurv | BifRaster::kBSurv | BifRaster::kPre)) {
                ++rep.hits;
                if (rep.cells.size() < 32) rep.cells.emplace_back(i, j);
            }
        }
    }
    return rep;
}

/// Symmetric Hausdorff distance between the in-set cell-center sets of two
/// rasters, in the max-of-coordinates metric (chessboard BFS, wrapping on the
/// circle), in phase-space units. +inf when one side is empty.
inline double hausdorff_distance(const BifRaster& r1, const BifRaster& r2) {
    if (r1.R != r2.R || r1.space != r2.space)
        throw UsageError("hausdorff_distance: mismatched rasters");
    long R = r1.R;
    bool wrap = r1.space == Space::Circle;
    auto side = [&](const BifRaster& from, const BifRaster& to) -> double {
        std::vector<int> dist(static_cast<std::size_t>(R) * R, -1);
        std::queue<long> q;
        for (long j = 0; j < R; ++j)
            for (long i = 0; i < R; ++i)
                if (to.in_set(i, j)) {
                    dist[j * R + i] = 0;
                    q.push(j * R + i);
                }
        if (q.empty()) return std::numeric_limits<double>::infinity();
        while (!q.empty()) {
            long c = q.front();
            q.pop();
            long i = c % R, j = c / R;
            for (long dj = -1; dj <= 1; ++dj)
                for (long di = -1; di <= 1; ++di) {
                    if (!di && !dj) continue;
                    long ni = i + di, nj = j + dj;
                    if (wrap) {
                        ni = (ni + R) % R;
                        nj = (nj + R) % R;
                    } else if (ni < 0 || ni >= R || nj < 0 || nj >= R)
                        continue;
                    if (dist[nj * R + ni] < 0) {
                        dist[nj * R + ni] = dist[j * R + i] + 1;
                        q.push(nj * R + ni);
                    }
                }
        }
        int worst = -1;
        for (long j = 0; j < R; ++j)
            for (long i = 0; i < R; ++i)
                if (from.in_set(i, j)) worst = std::max(worst, dist[j * R + i]);
        if (worst < 0) return std::numeric_limits<double>::infinity();
        return double(worst) / R;
    };
    return std::max(side(r1, r2), side(r2, r1));
}

/// True when the two holes' cells lie in the same 4-connected component of
/// out-of-set cells (a single raster gap; a complementary-component proxy).
inline bool same_raster_gap(const BifRaster& r, double a1, double b1, double a2, double b2) {
    long R = r.R;
    bool wrap = r.space == Space::Circle;
    auto open = [&](long i, long j) { return !r.excluded(i, j) && !r.in_set(i, j); };
    long si = r.col_of(a1), sj = r.row_of(b1), ti = r.col_of(a2), tj = r.row_of(b2);
    if (!open(si, sj) || !open(ti, tj)) return false;
    std::vector<char> seen(static_cast<std::size_t>(R) * R, 0);
    std::queue<long> q;
    seen[sj * R + si] = 1;
    q.push(sj * R + si);
    while (!q.empty()) {
        long c = q.front();
        q.pop();
        long i = c % R, j = c / R;
        if (i == ti && j == tj) return true;
        const long di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            long ni = i + di[k], nj = j + dj[k];
            if (wrap) {
                ni = (ni + R) % R;
                nj = (nj + R) % R;
            } else if (ni < 0 || ni >= R || nj < 0 || nj >= R)
                continue;
            if (!seen[nj * R + ni] && open(ni, nj)) {
                seen[nj * R + ni] = 1;
                q.push(nj * R + ni);
            }
        }
    }
    return false;
}

/// Off-diagonal symmetry check for circle maps commuting with x -> -x:
/// the in-set predicate should be invariant under (a,b) -> (-b,-a) mod 1 up
/// to one cell of discretization.
inline bool offdiag_symmetry_ok(const BifRaster& r) {
    long R = r.R;
    for (long j = 0; j < R; ++j)
        for (long i = 0; i < R; ++i) {
            if (!r.in_set(i, j)) continue;
            long mi = R - 1 - j, mj = R - 1 - i;
            bool ok = false;
            for (long dj = -1; dj <= 1 && !ok; ++dj)
                for (long di = -1; di <= 1 && !ok; ++di) {
                    long ni = (mi + di + R) % R, nj = (mj + dj + R) % R;
                    if (r.in_set(ni, nj) || r.excluded(ni, nj)) ok = true;
                }
            if (!ok) return false;
        }
    return true;
}

struct TheoremAReport {
    bool nonempty = false;           // (1) in-set cells exist
    bool no_full_block = false;      // (1) empty-interior proxy: no 3x3 in-set block
    bool runs_reach_diagonal = false; // (2) every in-set cell's H or V run hits the band
    bool stairs_connected = false;   // (5) stair cells form one linked component
    bool stairs_on_inset = false;    // (7) step corners land on in-set cells
    long inset_cells = 0;
    long double_point_cells = 0;
    long stair_count = 0;
    double inset_fraction = 0.0;
    std::string notes; // descriptive coverage of the items with no finite test
};

namespace detail {

struct DSU {
    std::vector<long> p;
    explicit DSU(std::size_t n) : p(n) {
        for (std::size_t i = 0; i < n; ++i) p[i] = (long)i;
    }
    long find(long x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    void unite(long a, long b) { p[find(a)] = find(b); }
};

} // namespace detail

/// The finite-resolution portions of the structure theorem: thinness,
/// diagonal accumulation of segments, stair connectivity through matching
/// links across the diagonal band, and stair corners landing in-set. Total
/// disconnectedness of double points and the double-point property of segment
/// endpoints have no robust finite test and are reported descriptively.
template <class T>
TheoremAReport theorem_a_checks(const PiecewiseLinearMap& f, const BifRaster& r, long p_max) {
    TheoremAReport rep;
    long R = r.R;
    bool wrap = r.space == Space::Circle;
    long total_valid = 0;
    for (long j = 0; j < R; ++j)
        for (long i = 0; i < R; ++i) {
            if (!r.excluded(i, j)) ++total_valid;
            if (r.in_set(i, j)) ++rep.inset_cells;
            if (r.double_point(i, j)) ++rep.double_point_cells;
        }
    rep.nonempty = rep.inset_cells > 0;
    rep.inset_fraction = total_valid ? double(rep.inset_cells) / total_valid : 0.0;

    rep.no_full_block = true;
    for (long j = 0; j + 2 < R && rep.no_full_block; ++j)
        for (long i = 0; i + 2 < R; ++i) {
            bool all = true;
            for (long dj = 0; dj < 3 && all; ++dj)
                for (long di = 0; di < 3 && all; ++di)
                    if (!r.in_set(i + di, j + dj)) all = false;
            if (all) {
                rep.no_full_block = false;
                break;
            }
        }

    // (2): a maximal in-set run reaches the diagonal iff the cell just past
    // one of its ends is a diagonal-band cell.
    std::vector<char> ok(static_cast<std::size_t>(R) * R, 0);
    auto sweep = [&](bool vertical) {
        for (long a = 0; a < R; ++a) {
            auto inset = [&](long t) {
                long tt = wrap ? (t + R) % R : t;
                if (tt < 0 || tt >= R) return false;
                return vertical ? r.in_set(a, tt) : r.in_set(tt, a);
            };
            auto band = [&](long t) {
                long tt = wrap ? (t + R) % R : t;
                if (tt < 0 || tt >= R) return false;
                return vertical ? (r.excluded(a, tt) && r.diag_band(a, tt))
                                : (r.excluded(tt, a) && r.diag_band(tt, a));
            };
            long t = 0;
            while (t < R) {
                if (!inset(t)) {
                    ++t;
                    continue;
                }
                long lo = t;
                while (t < R && inset(t)) ++t;
                long hi = t - 1;
                if (wrap && lo == 0 && hi < R - 1 && inset(-1)) {
                    // circular run through 0: extend backwards
                    long back = -1;
                    while (back > -R && inset(back)) --back;
                    lo = back + 1;
                }
                bool reach = band(lo - 1) || band(hi + 1);
                if (reach)
                    for (long u = lo; u <= hi; ++u) {
                        long uu = (u + R) % R;
                        if (vertical)
                            ok[uu * R + a] = 1;
                        else
                            ok[a * R + uu] = 1;
                    }
            }
        }
    };
    sweep(true);
    sweep(false);
    rep.runs_reach_diagonal = true;
    for (long j = 0; j < R && rep.runs_reach_diagonal; ++j)
        for (long i = 0; i < R; ++i)
            if (r.in_set(i, j) && !ok[j * R + i]) {
                rep.runs_reach_diagonal = false;
                break;
            }

    // (5) and (7) from the exact stairs
    StairSet<T> ss = stairs_from_orbits<T>(f, p_max);
    rep.stair_count = (long)ss.stairs.size();
    rep.stairs_on_inset = true;
    for (const auto& st : ss.stairs)
        for (const auto& step : st.steps) {
            long i = r.col_of(double(step.a)), j = r.row_of(double(step.b));
            if (!r.in_set(i, j)) rep.stairs_on_inset = false;
        }
    if (p_max == 0 || ss.stairs.empty()) {
        rep.stairs_connected = true; // vacuous
    } else {
        detail::DSU dsu(static_cast<std::size_t>(R) * R);
        auto idx = [&](long i, long j) { return j * R + i; };
        for (long j = 0; j < R; ++j)
            for (long i = 0; i < R; ++i) {
                if (!r.in_set(i, j)) continue;
                long ni = wrap ? (i + 1) % R : i + 1;
                long nj = wrap ? (j + 1) % R : j + 1;
                if (ni < R && r.in_set(ni, j)) dsu.unite(idx(i, j), idx(ni, j));
                if (nj < R && r.in_set(i, nj)) dsu.unite(idx(i, j), idx(i, nj));
            }
        // identify the two ends of each link across the diagonal band: the
        // bottom of the link's V-segment and the right end of its H-segment
        auto nearest_inset = [&](long i, long j, int di, int dj) -> long {
            for (long k = 0; k < R; ++k) {
                long ni = i + (long)di * k, nj = j + (long)dj * k;
                if (wrap) {
                    ni = (ni + R) % R;
                    nj = (nj + R) % R;
                } else if (ni < 0 || ni >= R || nj < 0 || nj >= R)
                    return -1;
                if (r.in_set(ni, nj)) return idx(ni, nj);
                if (!r.excluded(ni, nj)) return -1; // ran past the band into a gap
            }
            return -1;
        };
        for (const auto& st : ss.stairs)
            for (const T& link : st.links) {
                long c = r.col_of(double(link));
                long v = nearest_inset(c, c, 0, 1);  // V-segment bottom, above the band
                long h = nearest_inset(c, c, -1, 0); // H-segment right end, left of the band
                if (v >= 0 && h >= 0) dsu.unite(v, h);
            }
        long root = -1;
        rep.stairs_connected = true;
        for (long j = 0; j < R; ++j)
            for (long i = 0; i < R; ++i) {
                if (!(r.at(i, j) & BifRaster::kStair) || r.excluded(i, j)) continue;
                long rt = dsu.find(idx(i, j));
                if (root < 0)
                    root = rt;
                else if (rt != root)
                    rep.stairs_connected = false;
            }
    }
    rep.notes = "double-point cells: " + std::to_string(rep.double_point_cells) +
                " (total disconnectedness and segment-endpoint double points are "
                "reported descriptively; no finite-resolution test)";
    return rep;
}

} // namespace holescope
