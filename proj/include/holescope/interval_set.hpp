#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "holescope/phase.hpp"
#include "holescope/rational.hpp"

namespace holescope {

inline constexpr std::size_t kDefaultComponentCap = 10'000'000;

/// Finite disjoint union of closed subintervals of [0,1]. Components are
/// sorted, pairwise disjoint and non-adjacent; degenerate point components
/// are kept (they can be surviving periodic points). Circle sets are stored
/// as subsets of [0,1]; the identification 0 ~ 1 is handled by the callers
/// that need it (preimages, hole subtraction).
struct IntervalSet {
    struct Iv {
        Rat lo, hi; // lo <= hi, closed
    };
    std::vector<Iv> comps;

    static IntervalSet full() {
        IntervalSet s;
        s.comps.push_back({Rat(0), Rat(1)});
        return s;
    }

    static IntervalSet empty() { return IntervalSet{}; }

    bool is_empty() const { return comps.empty(); }
    std::size_t size() const { return comps.size(); }

    Rat measure() const {
        Rat m = 0;
        for (const auto& c : comps) m += c.hi - c.lo;
        return m;
    }

    bool contains(const Rat& x) const {
        auto it = std::upper_bound(comps.begin(), comps.end(), x,
                                   [](const Rat& v, const Iv& c) { return v < c.lo; });
        if (it == comps.begin()) return false;
        --it;
        return x >= it->lo && x <= it->hi;
    }

    std::string to_string() const {
        std::string out;
        for (const auto& c : comps) {
            if (!out.empty()) out += " ";
            out += "[" + format_rat(c.lo) + "," + format_rat(c.hi) + "]";
        }
        return out.empty() ? "{}" : out;
    }
};

/// Sorts and merges raw intervals (closed semantics: touching components merge).
inline IntervalSet normalize_intervals(std::vector<IntervalSet::Iv> raw,
                                       std::size_t cap = kDefaultComponentCap) {
    IntervalSet out;
    if (raw.empty()) return out;
    std::sort(raw.begin(), raw.end(),
              [](const IntervalSet::Iv& x, const IntervalSet::Iv& y) {
                  return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi);
              });
    for (auto& iv : raw) {
        if (iv.hi < iv.lo) continue;
        if (!out.comps.empty() && iv.lo <= out.comps.back().hi) {
            if (iv.hi > out.comps.back().hi) out.comps.back().hi = iv.hi;
        } else {
            out.comps.push_back(iv);
            if (out.comps.size() > cap)
                throw ResourceCapError("IntervalSet component cap exceeded (" + std::to_string(cap) + ")");
        }
    }
    return out;
}

inline IntervalSet set_union(const IntervalSet& a, const IntervalSet& b,
                             std::size_t cap = kDefaultComponentCap) {
    std::vector<IntervalSet::Iv> raw = a.comps;
    raw.insert(raw.end(), b.comps.begin(), b.comps.end());
    return normalize_intervals(std::move(raw), cap);
}

inline IntervalSet set_intersect(const IntervalSet& a, const IntervalSet& b,
                                 std::size_t cap = kDefaultComponentCap) {
    IntervalSet out;
    std::size_t i = 0, j = 0;
    while (i < a.comps.size() && j < b.comps.size()) {
        const auto& x = a.comps[i];
        const auto& y = b.comps[j];
        Rat lo = x.lo > y.lo ? x.lo : y.lo;
        Rat hi = x.hi < y.hi ? x.hi : y.hi;
        if (lo <= hi) {
            out.comps.push_back({lo, hi});
            if (out.comps.size() > cap)
                throw ResourceCapError("IntervalSet component cap exceeded");
        }
        if (x.hi < y.hi)
            ++i;
        else
            ++j;
    }
    return out;
}

/// Removes the open interval (a,b), a < b, from every component.
inline IntervalSet subtract_open(const IntervalSet& s, const Rat& a, const Rat& b,
                                 std::size_t cap = kDefaultComponentCap) {
    IntervalSet out;
    for (const auto& c : s.comps) {
        if (c.hi <= a || c.lo >= b) {
            out.comps.push_back(c);
        } else {
            if (c.lo <= a) out.comps.push_back({c.lo, a});
            if (c.hi >= b) out.comps.push_back({b, c.hi});
        }
        if (out.comps.size() > cap) throw ResourceCapError("IntervalSet component cap exceeded");
    }
    return out;
}

/// Drops a bare degenerate component {1} when the set already contains 0;
/// on the circle they are the same point, and 0 is the canonical copy.
inline IntervalSet canonicalize_circle(IntervalSet s) {
    bool bare_one = !s.comps.empty() && s.comps.back().lo == 1 && s.comps.back().hi == 1;
    bool has_zero = !s.comps.empty() && s.comps.front().lo == 0;
    if (bare_one && has_zero) s.comps.pop_back();
    return s;
}

/// Removes an open hole, handling the wrapping circle case. On the circle the
/// wrapping arc (a,b) with a > b covers (a,1] and [0,b): the point 1 ~ 0 is
/// interior to the arc unless b == 0, in which case it is the excluded
/// endpoint b itself and survives as its canonical copy 0.
inline IntervalSet subtract_hole(const IntervalSet& s, const Hole& h,
                                 std::size_t cap = kDefaultComponentCap) {
    if (h.space == Space::Interval || h.a < h.b) return subtract_open(s, h.a, h.b, cap);
    if (h.b == 0) {
        bool id_pt = s.contains(Rat(0)) || s.contains(Rat(1));
        IntervalSet out = subtract_open(s, h.a, Rat(2), cap); // removes (a,1]
        if (id_pt && !out.contains(Rat(0))) {
            IntervalSet zero;
            zero.comps.push_back({Rat(0), Rat(0)});
            out = set_union(out, zero, cap);
        }
        return canonicalize_circle(std::move(out));
    }
    IntervalSet out = subtract_open(s, h.a, Rat(2), cap);   // removes (a,1]
    return subtract_open(out, Rat(-1), h.b, cap);           // removes [0,b)
}

/// Subset test (a subseteq b), exact.
inline bool is_subset(const IntervalSet& a, const IntervalSet& b) {
    std::size_t j = 0;
    for (const auto& c : a.comps) {
        while (j < b.comps.size() && b.comps[j].hi < c.lo) ++j;
        if (j >= b.comps.size()) return false;
        if (!(b.comps[j].lo <= c.lo && c.hi <= b.comps[j].hi)) return false;
    }
    return true;
}

} // namespace holescope
