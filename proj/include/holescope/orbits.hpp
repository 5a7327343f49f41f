#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "holescope/map.hpp"

namespace holescope {

inline constexpr std::size_t kDefaultNodeCap = 5'000'000;

namespace detail {

template <class T>
bool near_eq(const T& x, const T& y) {
    if constexpr (std::is_same_v<T, Rat>)
        return x == y;
    else
        return std::abs(x - y) <= 1e-9;
}

template <class T>
T dom_slack() {
    if constexpr (std::is_same_v<T, Rat>)
        return T(0);
    else
        return 1e-12;
}

} // namespace detail

/// All solutions of f^n(x) = x, by depth-first itinerary enumeration with
/// empty-cylinder pruning. Solutions landing on shared cylinder endpoints
/// are deduplicated; circle solutions are normalized to [0,1).
template <class T>
std::vector<T> fixed_points_of_power(const PiecewiseLinearMap& f, long n,
                                     std::size_t node_cap = kDefaultNodeCap) {
    if (n < 1) throw UsageError("fixed_points_of_power: n >= 1 required");
    const auto& d = detail::map_data<T>(f);
    std::size_t K = d.slope.size();
    std::vector<T> sols;
    std::size_t nodes = 0;
    const T slack = detail::dom_slack<T>();

    // frame: depth, cylinder [u,v], composite S*x + C of the branches so far
    struct Frame {
        long depth;
        T u, v, S, C;
    };
    std::vector<Frame> stack;
    for (std::size_t l = 0; l < K; ++l)
        stack.push_back({1, d.bp[l], d.bp[l + 1], d.slope[l], d.icpt[l]});

    while (!stack.empty()) {
        Frame fr = std::move(stack.back());
        stack.pop_back();
        if (++nodes > node_cap)
            throw ResourceCapError("fixed_points_of_power: itinerary node cap exceeded");
        if (fr.depth == n) {
            // solve S*x + C = x + t inside [u,v]; t absorbs the circle wrap
            int t_lo = f.space == Space::Circle ? -1 : 0;
            int t_hi = f.space == Space::Circle ? 1 : 0;
            for (int t = t_lo; t <= t_hi; ++t) {
                if (fr.S == T(1)) {
                    if (detail::near_eq(fr.C, T(t)))
                        throw UsageError("fixed_points_of_power: a whole branch cylinder is fixed");
                    continue;
                }
                T x = (T(t) - fr.C) / (fr.S - T(1));
                if (x < fr.u - slack || x > fr.v + slack) continue;
                if (f.space == Space::Circle && detail::near_eq(x, T(1))) x = T(0);
                sols.push_back(x);
            }
            continue;
        }
        for (std::size_t l = 0; l < K; ++l) {
            // constrain S*x + C into branch domain [bp[l], bp[l+1]]
            T x0 = (d.bp[l] - fr.C) / fr.S;
            T x1 = (d.bp[l + 1] - fr.C) / fr.S;
            if (x0 > x1) std::swap(x0, x1);
            T u = fr.u > x0 ? fr.u : x0;
            T v = fr.v < x1 ? fr.v : x1;
            if (u > v) continue;
            stack.push_back({fr.depth + 1, u, v, d.slope[l] * fr.S, d.slope[l] * fr.C + d.icpt[l]});
        }
    }
    std::sort(sols.begin(), sols.end());
    std::vector<T> out;
    for (const auto& x : sols)
        if (out.empty() || !detail::near_eq(out.back(), x)) out.push_back(x);
    return out;
}

enum class Orientation { Preserves, Reverses, NotApplicable };
enum class CriticalSign { Positive, Negative, NotApplicable };

struct SideDerivatives {
    double left = 0, right = 0; // one-sided derivatives of f^p
};

/// One-sided derivative of f^p at x from side sigma (-1 left, +1 right),
/// walking the orbit and picking branches at breakpoints by the current side.
template <class T>
T side_derivative(const PiecewiseLinearMap& f, T x, long p, int sigma) {
    const auto& d = detail::map_data<T>(f);
    std::size_t K = d.slope.size();
    T D = 1;
    for (long k = 0; k < p; ++k) {
        std::size_t l = branch_at(f, x);
        // at an interior breakpoint the side decides the branch; on the circle
        // the point 0 from the left is the top of the last branch
        bool at_bp = false;
        if (l > 0 && detail::near_eq(x, d.bp[l])) at_bp = true;
        if (sigma < 0) {
            if (at_bp)
                l = l - 1;
            else if (detail::near_eq(x, d.bp[l]) && l == 0 && f.space == Space::Circle)
                l = K - 1;
        } else if (detail::near_eq(x, d.bp[l + 1]) && f.space == Space::Circle) {
            if (l + 1 < K)
                l = l + 1;
            else
                l = 0; // wrap: right side of 1 ~ 0 is the first branch
        }
        D = d.slope[l] * D;
        if (d.slope[l] < T(0)) sigma = -sigma;
        T y = d.slope[l] * x + d.icpt[l];
        if (f.space == Space::Circle && y >= T(1)) y -= 1;
        x = y;
    }
    return D;
}

template <class T>
struct PeriodicOrbitT {
    std::vector<T> points; // sorted
    long minimal_period = 0;
    std::vector<Orientation> orientation_at;
    std::vector<CriticalSign> signs_at;
    bool critical = false;
};

using PeriodicOrbit = PeriodicOrbitT<Rat>;
using PeriodicOrbitD = PeriodicOrbitT<double>;

/// All distinct periodic orbits of minimal period <= p_max, with orientation
/// flags from the sign of the derivative of f^p, and positive/negative
/// classification at points where the two one-sided derivatives disagree
/// (orbits through a critical point).
template <class T>
std::vector<PeriodicOrbitT<T>> periodic_orbits(const PiecewiseLinearMap& f, long p_max,
                                               std::size_t node_cap = kDefaultNodeCap) {
    std::vector<PeriodicOrbitT<T>> out;
    std::vector<T> seen; // sorted points already assigned to an orbit
    auto known = [&](const T& x) {
        auto it = std::lower_bound(seen.begin(), seen.end(), x);
        if (it != seen.end() && detail::near_eq(*it, x)) return true;
        if (it != seen.begin() && detail::near_eq(*(it - 1), x)) return true;
        return false;
    };
    for (long p = 1; p <= p_max; ++p) {
        for (const T& x0 : fixed_points_of_power<T>(f, p, node_cap)) {
            if (known(x0)) continue;
            std::vector<T> pts;
            T x = x0;
            for (long k = 0; k < p; ++k) {
                pts.push_back(x);
                x = eval(f, x);
            }
            std::sort(pts.begin(), pts.end());
            bool dup = false;
            for (std::size_t i = 1; i < pts.size(); ++i)
                if (detail::near_eq(pts[i - 1], pts[i])) dup = true;
            if (dup) continue; // minimal period is a proper divisor, handled earlier
            PeriodicOrbitT<T> orb;
            orb.points = pts;
            orb.minimal_period = p;
            for (const T& pt : pts) {
                T dl = side_derivative(f, pt, p, -1);
                T dr = side_derivative(f, pt, p, +1);
                if ((dl > T(0)) == (dr > T(0))) {
                    orb.orientation_at.push_back(dr > T(0) ? Orientation::Preserves
                                                           : Orientation::Reverses);
                    orb.signs_at.push_back(CriticalSign::NotApplicable);
                } else {
                    orb.critical = true;
                    orb.orientation_at.push_back(Orientation::NotApplicable);
                    orb.signs_at.push_back(dl < T(0) && dr > T(0) ? CriticalSign::Positive
                                                                  : CriticalSign::Negative);
                }
            }
            for (const T& pt : pts) {
                seen.insert(std::lower_bound(seen.begin(), seen.end(), pt), pt);
            }
            out.push_back(std::move(orb));
        }
    }
    return out;
}

struct EntropyEstimate {
    std::vector<long> ns;
    std::vector<BigInt> counts;    // #Fix(f^n), exact
    std::vector<double> estimates; // (1/n) log count
    double reported = 0.0;         // max over the last three estimates
    bool expanding = true;         // estimator hypotheses hold
};

inline EntropyEstimate entropy_estimate(const PiecewiseLinearMap& f, long n_max,
                                        std::size_t node_cap = kDefaultNodeCap) {
    if (n_max < 1) throw UsageError("entropy_estimate: n_max >= 1 required");
    EntropyEstimate e;
    e.expanding = f.expanding;
    for (long n = 1; n <= n_max; ++n) {
        auto fx = fixed_points_of_power<Rat>(f, n, node_cap);
        e.ns.push_back(n);
        e.counts.push_back(BigInt(fx.size()));
        e.estimates.push_back(fx.empty() ? 0.0 : std::log(double(fx.size())) / double(n));
    }
    std::size_t m = e.estimates.size();
    std::size_t from = m > 3 ? m - 3 : 0;
    double best = 0;
    for (std::size_t i = from; i < m; ++i) best = std::max(best, e.estimates[i]);
    e.reported = best;
    return e;
}

inline std::string orbits_to_csv(const std::vector<PeriodicOrbit>& orbits) {
    std::string out = "period,points,orientation,critical\n";
    for (const auto& o : orbits) {
        std::string pts, ori;
        for (std::size_t i = 0; i < o.points.size(); ++i) {
            if (i) { pts += " "; ori += " "; }
            pts += format_rat(o.points[i]);
            switch (o.orientation_at[i]) {
                case Orientation::Preserves: ori += "+"; break;
                case Orientation::Reverses: ori += "-"; break;
                case Orientation::NotApplicable:
                    ori += o.signs_at[i] == CriticalSign::Positive ? "pos" : "neg";
                    break;
            }
        }
        out += std::to_string(o.minimal_period) + "," + pts + "," + ori + "," +
               (o.critical ? "yes" : "no") + "\n";
    }
    return out;
}

} // namespace holescope
