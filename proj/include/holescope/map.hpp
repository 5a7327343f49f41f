#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "holescope/interval_set.hpp"
#include "holescope/phase.hpp"
#include "holescope/rational.hpp"

namespace holescope {

template <class T>
struct MapData {
    std::vector<T> bp;    // 0 = bp[0] < ... < bp[K] = 1
    std::vector<T> slope; // per branch, nonzero
    std::vector<T> icpt;  // f(x) = slope[l]*x + icpt[l] on [bp[l], bp[l+1]]
};

/// A continuous piecewise-affine self-map of [0,1] or the circle. Branch
/// images are required to lie inside [0,1]; on the circle the value 1 is
/// identified with 0 when iterating, so compositions stay plain affine.
struct PiecewiseLinearMap {
    Space space = Space::Interval;
    std::string label;
    bool exact_ok = true; // false when built from irrational (double) data
    MapData<Rat> exact;
    MapData<double> flt;
    bool expanding = false;     // min |slope| > 1
    double lambda_max = 1.0;    // max |slope|
    std::vector<std::size_t> critical; // interior breakpoint indices with a slope sign flip

    std::size_t branches() const { return flt.slope.size(); }
};

namespace detail {
template <class T>
const MapData<T>& map_data(const PiecewiseLinearMap& f);
template <>
inline const MapData<Rat>& map_data<Rat>(const PiecewiseLinearMap& f) {
    if (!f.exact_ok) throw UsageError("map '" + f.label + "' has no exact representation");
    return f.exact;
}
template <>
inline const MapData<double>& map_data<double>(const PiecewiseLinearMap& f) {
    return f.flt;
}
} // namespace detail

namespace detail {
inline void finish_construction(PiecewiseLinearMap& f) {
    const auto& d = f.flt;
    std::size_t K = d.slope.size();
    double lmin = 1e300, lmax = 0;
    for (std::size_t l = 0; l < K; ++l) {
        double a = std::abs(d.slope[l]);
        lmin = std::min(lmin, a);
        lmax = std::max(lmax, a);
    }
    f.expanding = lmin > 1.0;
    f.lambda_max = lmax;
    f.critical.clear();
    for (std::size_t k = 1; k < K; ++k)
        if ((d.slope[k - 1] > 0) != (d.slope[k] > 0)) f.critical.push_back(k);
}

template <class T>
void validate_map(Space space, const MapData<T>& d, double tol) {
    std::size_t K = d.slope.size();
    if (K == 0 || d.bp.size() != K + 1 || d.icpt.size() != K)
        throw UsageError("map data: need K branches, K intercepts and K+1 breakpoints");
    if (!(d.bp.front() == T(0)) || !(d.bp.back() == T(1)))
        throw UsageError("map data: breakpoints must start at 0 and end at 1");
    for (std::size_t k = 0; k + 1 < d.bp.size(); ++k)
        if (!(d.bp[k] < d.bp[k + 1])) throw UsageError("map data: degenerate or unsorted branch domain");
    auto near = [&](const T& x, const T& y) {
        if constexpr (std::is_same_v<T, Rat>)
            return x == y;
        else
            return std::abs(x - y) <= tol;
    };
    for (std::size_t l = 0; l < K; ++l) {
        if (near(d.slope[l], T(0))) throw UsageError("map data: zero branch slope");
        T v0 = d.slope[l] * d.bp[l] + d.icpt[l];
        T v1 = d.slope[l] * d.bp[l + 1] + d.icpt[l];
        T lo = v0 < v1 ? v0 : v1, hi = v0 < v1 ? v1 : v0;
        bool ok;
        if constexpr (std::is_same_v<T, Rat>)
            ok = lo >= 0 && hi <= 1;
        else
            ok = lo >= -tol && hi <= 1 + tol;
        if (!ok) throw UsageError("map data: branch image leaves [0,1]");
    }
    for (std::size_t k = 1; k < K; ++k) {
        T left = d.slope[k - 1] * d.bp[k] + d.icpt[k - 1];
        T right = d.slope[k] * d.bp[k] + d.icpt[k];
        T diff = left - right;
        bool ok = near(diff, T(0));
        if (!ok && space == Space::Circle) ok = near(diff, T(1)) || near(diff, T(-1));
        if (!ok) throw UsageError("map data: discontinuity at interior breakpoint");
    }
    if (space == Space::Circle) {
        T v0 = d.slope.front() * d.bp.front() + d.icpt.front();
        T v1 = d.slope.back() * d.bp.back() + d.icpt.back();
        T diff = v0 - v1;
        if (!(near(diff, T(0)) || near(diff, T(1)) || near(diff, T(-1))))
            throw UsageError("map data: discontinuity at the circle wrap point");
    }
}
} // namespace detail

inline PiecewiseLinearMap make_map(Space space, MapData<Rat> data, std::string label = "") {
    detail::validate_map(space, data, 0.0);
    PiecewiseLinearMap f;
    f.space = space;
    f.label = std::move(label);
    f.exact_ok = true;
    f.exact = std::move(data);
    for (const auto& x : f.exact.bp) f.flt.bp.push_back(to_double(x));
    for (const auto& x : f.exact.slope) f.flt.slope.push_back(to_double(x));
    for (const auto& x : f.exact.icpt) f.flt.icpt.push_back(to_double(x));
    detail::finish_construction(f);
    return f;
}

inline PiecewiseLinearMap make_map_float(Space space, MapData<double> data, std::string label = "") {
    detail::validate_map(space, data, 1e-9);
    PiecewiseLinearMap f;
    f.space = space;
    f.label = std::move(label);
    f.exact_ok = false;
    f.flt = std::move(data);
    detail::finish_construction(f);
    return f;
}

/// Index of the branch whose closed domain contains x (ties at interior
/// breakpoints resolve to the right branch; values at breakpoints agree).
template <class T>
std::size_t branch_at(const PiecewiseLinearMap& f, const T& x) {
    const auto& d = detail::map_data<T>(f);
    std::size_t K = d.slope.size();
    auto it = std::upper_bound(d.bp.begin() + 1, d.bp.end() - 1, x);
    std::size_t l = static_cast<std::size_t>(it - (d.bp.begin() + 1));
    return l < K ? l : K - 1;
}

template <class T>
T eval_branch(const PiecewiseLinearMap& f, std::size_t l, const T& x) {
    const auto& d = detail::map_data<T>(f);
    return d.slope[l] * x + d.icpt[l];
}

/// One application of f; circle values are normalized to [0,1).
template <class T>
T eval(const PiecewiseLinearMap& f, const T& x) {
    T y = eval_branch(f, branch_at(f, x), x);
    if (f.space == Space::Circle && y >= T(1)) y -= 1;
    if constexpr (!std::is_same_v<T, Rat>) {
        if (y < 0) y = 0;
        if (f.space == Space::Interval && y > 1) y = 1;
    }
    return y;
}

inline Rat iterate(const PiecewiseLinearMap& f, Rat x, long n,
                   unsigned budget_bits = kDefaultBitBudget) {
    for (long k = 0; k < n; ++k) {
        x = eval(f, x);
        check_budget(x, budget_bits);
    }
    return x;
}

inline double iterate_d(const PiecewiseLinearMap& f, double x, long n) {
    for (long k = 0; k < n; ++k) x = eval(f, x);
    return x;
}

/// Exact preimage of an IntervalSet under f, branch by branch. Circle targets
/// touching 0 (resp. 1) are augmented with the identified value 1 (resp. 0).
inline IntervalSet preimage(const PiecewiseLinearMap& f, const IntervalSet& s,
                            std::size_t cap = kDefaultComponentCap) {
    const auto& d = detail::map_data<Rat>(f);
    std::vector<IntervalSet::Iv> targets = s.comps;
    if (f.space == Space::Circle) {
        for (const auto& c : s.comps) {
            if (c.lo == 0) targets.push_back({Rat(1), Rat(1)});
            if (c.hi == 1) targets.push_back({Rat(0), Rat(0)});
        }
    }
    std::vector<IntervalSet::Iv> raw;
    std::size_t K = d.slope.size();
    for (std::size_t l = 0; l < K; ++l) {
        const Rat& u = d.bp[l];
        const Rat& v = d.bp[l + 1];
        Rat iv0 = d.slope[l] * u + d.icpt[l];
        Rat iv1 = d.slope[l] * v + d.icpt[l];
        Rat ilo = iv0 < iv1 ? iv0 : iv1;
        Rat ihi = iv0 < iv1 ? iv1 : iv0;
        for (const auto& t : targets) {
            Rat lo = t.lo > ilo ? t.lo : ilo;
            Rat hi = t.hi < ihi ? t.hi : ihi;
            if (lo > hi) continue;
            Rat x0 = (lo - d.icpt[l]) / d.slope[l];
            Rat x1 = (hi - d.icpt[l]) / d.slope[l];
            if (x0 > x1) std::swap(x0, x1);
            if (x0 < u) x0 = u;
            if (x1 > v) x1 = v;
            if (x0 <= x1) raw.push_back({x0, x1});
        }
    }
    IntervalSet out = normalize_intervals(std::move(raw), cap);
    if (f.space == Space::Circle) out = canonicalize_circle(std::move(out));
    return out;
}

using Itinerary = std::vector<std::size_t>;

/// Domain of points following the branch word w, a single (possibly empty)
/// interval; computed by forward affine composition.
inline IntervalSet itinerary_domain(const PiecewiseLinearMap& f, const Itinerary& w) {
    const auto& d = detail::map_data<Rat>(f);
    if (w.empty()) throw UsageError("itinerary_domain: empty itinerary");
    for (auto l : w)
        if (l >= d.slope.size()) throw UsageError("itinerary_domain: branch index out of range");
    Rat u = d.bp[w[0]], v = d.bp[w[0] + 1];
    Rat S = 1, C = 0; // composition so far maps x to S*x + C on [u,v]
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (k > 0) {
            std::size_t l = w[k];
            // constrain S*x + C into [bp[l], bp[l+1]]
            Rat lo = d.bp[l], hi = d.bp[l + 1];
            Rat x0 = (lo - C) / S, x1 = (hi - C) / S;
            if (x0 > x1) std::swap(x0, x1);
            if (x0 > u) u = x0;
            if (x1 < v) v = x1;
            if (u > v) return IntervalSet::empty();
        }
        S = d.slope[w[k]] * S;
        C = d.slope[w[k]] * C + d.icpt[w[k]];
    }
    IntervalSet out;
    out.comps.push_back({u, v});
    return out;
}

// ---------------------------------------------------------------------------
// Built-in maps

inline PiecewiseLinearMap doubling_map() {
    MapData<Rat> d;
    d.bp = {Rat(0), Rat(1, 2), Rat(1)};
    d.slope = {Rat(2), Rat(2)};
    d.icpt = {Rat(0), Rat(-1)};
    return make_map(Space::Circle, std::move(d), "doubling");
}

/// Restricted tent map T_s with breakpoint c_s = 1 - 1/s, for rational
/// s in (1,2]. T_s(x) = s x + 2 - s on [0,c_s], -s x + s on [c_s,1].
inline PiecewiseLinearMap restricted_tent(const Rat& s) {
    if (!(s > 1 && s <= 2)) throw UsageError("restricted-tent requires s in (1,2]");
    Rat c = 1 - Rat(1) / s;
    MapData<Rat> d;
    if (c == 0) { // s == 1 excluded above; defensive
        throw UsageError("restricted-tent: degenerate breakpoint");
    }
    d.bp = {Rat(0), c, Rat(1)};
    d.slope = {s, -s};
    d.icpt = {2 - s, s};
    return make_map(Space::Interval, std::move(d), "restricted-tent(" + format_rat(s) + ")");
}

inline PiecewiseLinearMap restricted_tent_d(double s) {
    if (!(s > 1.0 && s <= 2.0)) throw UsageError("restricted-tent requires s in (1,2]");
    double c = 1.0 - 1.0 / s;
    MapData<double> d;
    d.bp = {0.0, c, 1.0};
    d.slope = {s, -s};
    d.icpt = {2.0 - s, s};
    return make_map_float(Space::Interval, std::move(d), "restricted-tent(~" + std::to_string(s) + ")");
}

inline PiecewiseLinearMap full_tent() {
    auto f = restricted_tent(Rat(2));
    f.label = "full-tent";
    return f;
}

/// The three-piece example map: 1/2 - 3|x - 1/6| on [0,1/3], mirrored so that
/// [0,1/2] and [1/2,1] are invariant transitive blocks.
inline PiecewiseLinearMap two_block_map() {
    MapData<Rat> d;
    d.bp = {Rat(0), Rat(1, 6), Rat(1, 3), Rat(2, 3), Rat(5, 6), Rat(1)};
    d.slope = {Rat(3), Rat(-3), Rat(3), Rat(-3), Rat(3)};
    d.icpt = {Rat(0), Rat(1), Rat(-1), Rat(3), Rat(-2)};
    return make_map(Space::Interval, std::move(d), "two-block");
}

// ---------------------------------------------------------------------------
// Config round-trip

inline nlohmann::json map_to_json(const PiecewiseLinearMap& f) {
    nlohmann::json j;
    j["space"] = f.space == Space::Interval ? "interval" : "circle";
    j["label"] = f.label;
    auto& bps = j["breakpoints"] = nlohmann::json::array();
    auto& brs = j["branches"] = nlohmann::json::array();
    if (f.exact_ok) {
        for (const auto& x : f.exact.bp) bps.push_back(format_rat(x));
        for (std::size_t l = 0; l < f.exact.slope.size(); ++l)
            brs.push_back({{"slope", format_rat(f.exact.slope[l])}, {"intercept", format_rat(f.exact.icpt[l])}});
    } else {
        char buf[40];
        auto fmt = [&](double v) { std::snprintf(buf, sizeof buf, "%.17g", v); return std::string(buf); };
        for (double x : f.flt.bp) bps.push_back(fmt(x));
        for (std::size_t l = 0; l < f.flt.slope.size(); ++l)
            brs.push_back({{"slope", fmt(f.flt.slope[l])}, {"intercept", fmt(f.flt.icpt[l])}});
    }
    return j;
}

inline PiecewiseLinearMap map_from_json(const nlohmann::json& j) {
    std::string sp = j.at("space").get<std::string>();
    Space space;
    if (sp == "interval")
        space = Space::Interval;
    else if (sp == "circle")
        space = Space::Circle;
    else
        throw UsageError("map config: space must be 'interval' or 'circle'");
    std::string label = j.value("label", "user-map");
    bool exact = true;
    std::vector<ParsedScalar> bps, slopes, icpts;
    for (const auto& e : j.at("breakpoints")) bps.push_back(parse_scalar(e.get<std::string>()));
    for (const auto& e : j.at("branches")) {
        slopes.push_back(parse_scalar(e.at("slope").get<std::string>()));
        icpts.push_back(parse_scalar(e.at("intercept").get<std::string>()));
    }
    for (const auto& p : bps) exact = exact && p.exact;
    for (const auto& p : slopes) exact = exact && p.exact;
    for (const auto& p : icpts) exact = exact && p.exact;
    if (exact) {
        MapData<Rat> d;
        for (const auto& p : bps) d.bp.push_back(p.r);
        for (const auto& p : slopes) d.slope.push_back(p.r);
        for (const auto& p : icpts) d.icpt.push_back(p.r);
        return make_map(space, std::move(d), label);
    }
    MapData<double> d;
    for (const auto& p : bps) d.bp.push_back(p.d);
    for (const auto& p : slopes) d.slope.push_back(p.d);
    for (const auto& p : icpts) d.icpt.push_back(p.d);
    return make_map_float(space, std::move(d), label);
}

/// Resolves a builtin name like "doubling" or "restricted-tent(3/2)", or a
/// path to a JSON config file.
inline PiecewiseLinearMap builtin(const std::string& name) {
    if (name == "doubling") return doubling_map();
    if (name == "full-tent") return full_tent();
    if (name == "two-block") return two_block_map();
    const std::string rt = "restricted-tent(";
    if (name.rfind(rt, 0) == 0 && name.back() == ')') {
        std::string arg = name.substr(rt.size(), name.size() - rt.size() - 1);
        ParsedScalar s = parse_scalar(arg);
        return s.exact ? restricted_tent(s.r) : restricted_tent_d(s.d);
    }
    std::ifstream in(name);
    if (!in) throw UsageError("unknown map '" + name + "' (not a builtin, not a readable config)");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw UsageError("map config '" + name + "': " + e.what());
    }
    return map_from_json(j);
}

} // namespace holescope
