#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "holescope/bifset.hpp"

namespace holescope {

enum class CriticalVerdict { Periodic, Preperiodic, HitsCritical, Undecided };

struct CriticalOrbitReport {
    double s = 0;
    double c = 0; // c_s = 1 - 1/s
    bool exact = false;
    std::vector<double> orbit_prefix; // first iterates of c_s, for display
    CriticalVerdict verdict = CriticalVerdict::Undecided;
    long period = 0; // periodic / preperiodic
    long tail = 0;   // preperiodic
    long n0c = 0;    // first n with T_s^n(0) = c_s, 0 if not seen
    double tolerance = 0;

    std::string verdict_str() const {
        switch (verdict) {
            case CriticalVerdict::Periodic: return "periodic(" + std::to_string(period) + ")";
            case CriticalVerdict::Preperiodic:
                return "preperiodic(" + std::to_string(tail) + "," + std::to_string(period) + ")";
            case CriticalVerdict::HitsCritical: return "hits_critical(" + std::to_string(n0c) + ")";
            case CriticalVerdict::Undecided: return "undecided";
        }
        return "undecided";
    }
};

/// Orbit analysis of the critical point c_s of the restricted tent map.
/// Exact repeat detection at rational s; anything unresolved within n_max
/// steps stays undecided.
inline CriticalOrbitReport critical_orbit(const Rat& s, long n_max,
                                          unsigned budget_bits = kDefaultBitBudget) {
    if (!(s > 1 && s <= 2)) throw UsageError("critical_orbit: s in (1,2] required");
    auto f = restricted_tent(s);
    Rat c = 1 - Rat(1) / s;
    CriticalOrbitReport rep;
    rep.s = to_double(s);
    rep.c = to_double(c);
    rep.exact = true;
    rep.tolerance = 0;
    std::map<Rat, long> seen;
    Rat x = c;
    for (long n = 0; n <= n_max; ++n) {
        if (n < 16) rep.orbit_prefix.push_back(to_double(x));
        auto it = seen.find(x);
        if (it != seen.end()) {
            rep.tail = it->second;
            rep.period = n - it->second;
            rep.verdict = rep.tail == 0 ? CriticalVerdict::Periodic : CriticalVerdict::Preperiodic;
            break;
        }
        seen[x] = n;
        x = eval(f, x);
        check_budget(x, budget_bits);
    }
    Rat z = 0;
    for (long n = 1; n <= n_max && rep.n0c == 0; ++n) {
        z = eval(f, z);
        check_budget(z, budget_bits);
        if (z == c) rep.n0c = n;
    }
    if (rep.verdict == CriticalVerdict::Undecided && rep.n0c > 0)
        rep.verdict = CriticalVerdict::HitsCritical;
    return rep;
}

/// Float-mode variant: periodicity is asserted only when a return to within
/// tol of c_s recurs with the same period three times in a row.
inline CriticalOrbitReport critical_orbit_d(double s, long n_max, double tol = 1e-10) {
    if (!(s > 1.0 && s <= 2.0)) throw UsageError("critical_orbit: s in (1,2] required");
    auto f = restricted_tent_d(s);
    double c = 1.0 - 1.0 / s;
    CriticalOrbitReport rep;
    rep.s = s;
    rep.c = c;
    rep.exact = false;
    rep.tolerance = tol;
    std::vector<long> hits; // iterates n >= 1 with T^n(c) within tol of c
    double x = c;
    for (long n = 0; n <= n_max; ++n) {
        if (n < 16) rep.orbit_prefix.push_back(x);
        if (n >= 1 && std::abs(x - c) < tol) hits.push_back(n);
        x = eval(f, x);
    }
    for (std::size_t k = 0; k + 2 < hits.size() && rep.verdict == CriticalVerdict::Undecided; ++k) {
        long p = hits[k + 1] - hits[k];
        if (hits[k + 2] - hits[k + 1] == p && hits[k] == p) {
            rep.verdict = CriticalVerdict::Periodic;
            rep.period = p;
        }
    }
    double z = 0;
    for (long n = 1; n <= n_max && rep.n0c == 0; ++n) {
        z = eval(f, z);
        if (std::abs(z - c) < tol) rep.n0c = n;
    }
    if (rep.verdict == CriticalVerdict::Undecided && rep.n0c > 0)
        rep.verdict = CriticalVerdict::HitsCritical;
    return rep;
}

template <class T>
struct ParamDerivativeT {
    T s{};
    long n = 0;
    T value{};          // d/ds T_s^n(0)
    T orbit_value{};    // T_s^n(0)
    std::vector<int> branch_history; // 0: [0,c_s), 1: (c_s,1]
};

using ParamDerivative = ParamDerivativeT<Rat>;
using ParamDerivativeD = ParamDerivativeT<double>;

/// Parameter derivative of T_s^n(0) by the two-branch recursion
/// d_{l+1} = -1 + x_l + s d_l on [0,c_s) and d_{l+1} = 1 - x_l - s d_l on
/// (c_s,1], undefined as soon as the orbit of 0 hits c_s.
template <class T>
ParamDerivativeT<T> dds_iterate_zero(const T& s, long n) {
    if (!(s > T(1) && s <= T(2))) throw UsageError("dds_iterate_zero: s in (1,2] required");
    if (n < 0) throw UsageError("dds_iterate_zero: n >= 0 required");
    T c = T(1) - T(1) / s;
    ParamDerivativeT<T> out;
    out.s = s;
    out.n = n;
    T x = 0, d = 0;
    for (long l = 0; l < n; ++l) {
        bool at_c;
        if constexpr (std::is_same_v<T, Rat>)
            at_c = x == c;
        else
            at_c = std::abs(x - c) <= 1e-12;
        if (at_c)
            throw UsageError("dds_iterate_zero: orbit of 0 hits c_s at step " + std::to_string(l) +
                             "; derivative undefined beyond it");
        if (x < c) {
            d = T(-1) + x + s * d;
            x = s * x + T(2) - s;
            out.branch_history.push_back(0);
        } else {
            d = T(1) - x - s * d;
            x = s - s * x;
            out.branch_history.push_back(1);
        }
    }
    out.value = d;
    out.orbit_value = x;
    return out;
}

struct ContinuityScanReport {
    double s0 = 0;
    std::vector<double> deltas;
    std::vector<double> dist_minus; // Hausdorff(B_{s0}, B_{s0-delta})
    std::vector<double> dist_plus;  // ... +delta side, NaN when outside the window
    CriticalOrbitReport crit;
    bool probe_applicable = false; // periodic critical orbit: test the emptied rectangle
    bool probe_empty = false;      // (0,eps) x B_eps(b) free of in-set cells below s0
    double probe_eps = 0.0;
    double probe_b = 0.0;

    std::string to_csv() const {
        std::string out = "delta,dist_minus,dist_plus\n";
        for (std::size_t i = 0; i < deltas.size(); ++i) {
            out += std::to_string(deltas[i]) + "," + std::to_string(dist_minus[i]) + "," +
                   std::to_string(dist_plus[i]) + "\n";
        }
        out += "# s0=" + std::to_string(s0) + " verdict=" + crit.verdict_str() + "\n";
        return out;
    }
};

inline constexpr double kTransLo = 1.4142135623730951; // sqrt(2), transitivity window
inline constexpr double kProbeEpsDefault = 0.02;

/// Parameter-continuity scan of s -> B_{T_s} near s0: Hausdorff distances of
/// rasters at s0 +- delta against s0, uniform float center sampling with a
/// sparse exact stair overlay on every raster so all parameters are measured
/// by the same detector. When the critical orbit of s0 is periodic, also
/// probes the rectangle (0,eps) x B_eps(b) (b = orbit point of 0 closest to
/// 0) for emptiness just below s0, the mechanism behind the discontinuity.
inline ContinuityScanReport continuity_scan(double s0, const std::vector<double>& deltas,
                                            long resolution, long N, long stairs_pmax = 5,
                                            double probe_eps = kProbeEpsDefault) {
    if (!(s0 >= kTransLo && s0 <= 2.0))
        throw UsageError("continuity_scan: s0 outside the transitivity window [sqrt 2, 2]");
    ContinuityScanReport rep;
    rep.s0 = s0;
    rep.deltas = deltas;
    rep.crit = critical_orbit_d(s0, 10000);
    RasterOptions opts;
    opts.sampling = Sampling::Center;
    opts.stairs_pmax = stairs_pmax;
    auto make = [&](double s) {
        return rasterize(restricted_tent_d(s), resolution, N, opts);
    };
    BifRaster base = make(s0);
    double smallest = 0;
    BifRaster smallest_minus;
    for (double d : deltas) {
        double sm = s0 - d, sp = s0 + d;
        if (sm >= kTransLo) {
            BifRaster rm = make(sm);
            rep.dist_minus.push_back(hausdorff_distance(base, rm));
            if (smallest == 0 || d < smallest) {
                smallest = d;
                smallest_minus = rm;
            }
        } else {
            rep.dist_minus.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        if (sp <= 2.0)
            rep.dist_plus.push_back(hausdorff_distance(base, make(sp)));
        else
            rep.dist_plus.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    if (rep.crit.verdict == CriticalVerdict::Periodic && smallest > 0) {
        // orbit of 0 at a periodic-critical parameter is finite; find its
        // point closest to 0 (excluding 0 itself)
        auto f0 = restricted_tent_d(s0);
        double b = 2.0, x = 0.0;
        for (long n = 0; n < 4 * rep.crit.period + 8; ++n) {
            x = eval(f0, x);
            if (x > 1e-9 && x < b) b = x;
        }
        if (b <= 1.0) {
            rep.probe_applicable = true;
            rep.probe_b = b;
            rep.probe_eps = probe_eps;
            long hits = 0;
            const BifRaster& r = smallest_minus;
            for (long j = 0; j < r.R; ++j)
                for (long i = 0; i < r.R; ++i) {
                    if (!r.in_set(i, j)) continue;
                    double ac = (i + 0.5) / r.R, bc = (j + 0.5) / r.R;
                    if (ac > 0 && ac < probe_eps && std::abs(bc - b) < probe_eps) ++hits;
                }
            rep.probe_empty = hits == 0;
        }
    }
    return rep;
}

struct JWitness {
    bool found = false;
    double s = 0;
    long period = 0;
    StepT<double> step; // an accumulated-from-below step of B_{T_s}
};

/// Searches [s_lo, s_hi] for a parameter whose critical orbit is periodic
/// with period <= p_max and carries a step where T_s^p is negative at a and
/// positive at b. Such parameters are irrational (the return polynomials of
/// c_s are monic up to sign, so any rational root would be an integer), so
/// the search brackets sign changes of T_s^p(c_s) - c_s on a grid, keeping
/// only brackets with a constant branch itinerary, and bisects.
inline JWitness find_J_parameter(double s_lo, double s_hi, long p_max, long grid = 4000) {
    if (!(kTransLo - 1e-12 <= s_lo && s_lo <= s_hi && s_hi <= 2.0 + 1e-12))
        throw UsageError("find_J_parameter: range outside the transitivity window");
    JWitness w;
    if (s_lo >= s_hi) return w;
    auto itin = [&](double s, long p, double& gap) {
        // branch word of the orbit of c_s for p-1 steps, plus the signed gap
        // T_s^p(c_s) - c_s
        auto f = restricted_tent_d(s);
        double c = 1.0 - 1.0 / s;
        double x = c;
        long word = 0;
        for (long k = 0; k < p; ++k) {
            x = eval(f, x);
            if (k + 1 < p) word = word * 2 + (x > 1.0 - 1.0 / s ? 1 : 0);
        }
        gap = x - c;
        return word;
    };
    for (long p = 2; p <= p_max; ++p) {
        double g0, g1;
        long w0 = itin(s_lo, p, g0);
        for (long k = 1; k <= grid; ++k) {
            double s1 = s_lo + (s_hi - s_lo) * k / grid;
            long w1 = itin(s1, p, g1);
            if (w0 == w1 && ((g0 < 0) != (g1 < 0))) {
                double lo = s_lo + (s_hi - s_lo) * (k - 1) / grid, hi = s1;
                double glo = g0;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (lo + hi), gm;
                    itin(mid, p, gm);
                    if ((gm < 0) == (glo < 0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                // the root is pinned to about one ulp, but on one side of it
                // the hyperbolic orbit that border-collides with the critical
                // cycle still exists and masks it in the enumeration, so try
                // candidates on both sides of the bracket
                for (double s : {0.5 * (lo + hi), hi, lo, hi + 1e-13, lo - 1e-13}) {
                    auto rep = critical_orbit_d(s, 400);
                    if (rep.verdict != CriticalVerdict::Periodic || rep.period != p) continue;
                    auto ss = stairs_from_orbits<double>(restricted_tent_d(s), p);
                    for (const auto& st : ss.stairs)
                        for (const auto& step : st.steps)
                            if (step.cls == StepClass::AccumulatedFromBelow) {
                                w.found = true;
                                w.s = s;
                                w.period = p;
                                w.step = step;
                                return w;
                            }
                }
            }
            w0 = w1;
            g0 = g1;
        }
    }
    return w;
}

} // namespace holescope
