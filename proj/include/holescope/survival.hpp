#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "holescope/interval_set.hpp"
#include "holescope/map.hpp"

namespace holescope {

struct EscapeVerdict {
    bool escaped = false;
    long time = -1; // first n with f^n(x) in the open hole, valid iff escaped
    long horizon = 0;
};

/// First entry time of x into the open hole, scanning n = 0..N. Exact.
inline EscapeVerdict escape_time(const PiecewiseLinearMap& f, const Hole& h, Rat x, long N,
                                 unsigned budget_bits = kDefaultBitBudget) {
    for (long n = 0; n <= N; ++n) {
        if (hole_contains(h, x)) return {true, n, N};
        if (n == N) break;
        x = eval(f, x);
        check_budget(x, budget_bits);
    }
    return {false, -1, N};
}

/// Float-mode escape time; endpoint ties break toward "not contained".
inline EscapeVerdict escape_time_d(const PiecewiseLinearMap& f, const HoleD& h, double x, long N,
                                   double eps = kEpsTol) {
    for (long n = 0; n <= N; ++n) {
        if (hole_contains_tol(h, x, eps)) return {true, n, N};
        if (n == N) break;
        x = eval(f, x);
    }
    return {false, -1, N};
}

namespace detail {

/// Scaled-integer pullback sweep for maps whose slopes are all integers.
/// A point y in [0,1] is stored as the numerator Y = y * D over the running
/// denominator D = D0 * L^k (L = lcm of |slopes|), so one pullback needs only
/// big-integer adds, exact small divisions, and compares. This sidesteps the
/// gcd normalization a rational endpoint pays on every operation, which
/// dominates once denominators reach thousands of bits.
struct IntegerSweep {
    struct Iv {
        BigInt lo, hi;
    };

    bool circle = false;
    BigInt L = 1;              // scale growth per step
    BigInt D = 1;              // current denominator, D0 * L^k
    BigInt F = 1;              // D / D0
    std::vector<BigInt> slope; // integer slopes
    std::vector<BigInt> bpn;   // breakpoints at base scale D0
    std::vector<BigInt> tn;    // intercepts at base scale D0
    std::vector<Iv> a0;        // hole complement at base scale D0
    std::vector<Iv> cur;       // surviving set at scale D

    static bool applicable(const PiecewiseLinearMap& f) {
        if (!f.exact_ok) return false;
        for (const auto& s : f.exact.slope)
            if (boost::multiprecision::denominator(s) != 1) return false;
        return true;
    }

    IntegerSweep(const PiecewiseLinearMap& f, const Hole& h, std::size_t cap) {
        using boost::multiprecision::denominator;
        using boost::multiprecision::numerator;
        circle = f.space == Space::Circle;
        BigInt d0 = 1;
        auto fold = [&](const Rat& x) { d0 = boost::multiprecision::lcm(d0, denominator(x)); };
        for (const auto& x : f.exact.bp) fold(x);
        for (const auto& x : f.exact.icpt) fold(x);
        fold(h.a);
        fold(h.b);
        auto scaled = [&](const Rat& x) { return BigInt(numerator(x) * (d0 / denominator(x))); };
        for (const auto& s : f.exact.slope) {
            BigInt a = numerator(s) < 0 ? BigInt(-numerator(s)) : BigInt(numerator(s));
            L = boost::multiprecision::lcm(L, a);
            slope.push_back(numerator(s));
        }
        for (const auto& x : f.exact.bp) bpn.push_back(scaled(x));
        for (const auto& x : f.exact.icpt) tn.push_back(scaled(x));
        IntervalSet base = subtract_hole(IntervalSet::full(), h, cap);
        for (const auto& c : base.comps) a0.push_back({scaled(c.lo), scaled(c.hi)});
        D = d0;
        cur = a0;
    }

    bool empty() const { return cur.empty(); }

    Rat measure() const {
        BigInt s = 0;
        for (const auto& c : cur) s += c.hi - c.lo;
        return Rat(s, D);
    }

    IntervalSet to_interval_set() const {
        IntervalSet out;
        for (const auto& c : cur) out.comps.push_back({Rat(c.lo, D), Rat(c.hi, D)});
        return out;
    }

    void step(std::size_t cap, unsigned budget_bits) {
        BigInt Dp = D * L, Fp = F * L;
        for (auto& c : cur) {
            c.lo *= L;
            c.hi *= L;
        }
        std::vector<Iv> next;
        std::size_t K = slope.size();
        for (std::size_t l = 0; l < K; ++l) {
            BigInt blo = bpn[l] * Fp, bhi = bpn[l + 1] * Fp, t = tn[l] * Fp;
            BigInt r1 = slope[l] * blo + t, r2 = slope[l] * bhi + t;
            BigInt raw_lo = r1 < r2 ? r1 : r2, raw_hi = r1 < r2 ? r2 : r1;
            long j_lo = 0, j_hi = 0;
            if (circle) {
                // the branch image may cross the wrap point; shifting the
                // target by j*Dp realizes every determination of f(x) mod 1
                j_lo = static_cast<long>(BigInt(raw_lo / Dp).convert_to<long long>());
                j_hi = static_cast<long>(BigInt(raw_hi / Dp).convert_to<long long>());
            }
            for (long j = j_lo; j <= j_hi; ++j) {
                BigInt jD = BigInt(j) * Dp;
                for (const auto& c : cur) {
                    BigInt seg_lo = c.lo + jD;
                    BigInt seg_hi = c.hi + jD;
                    if (seg_lo < raw_lo) seg_lo = raw_lo;
                    if (seg_hi > raw_hi) seg_hi = raw_hi;
                    if (seg_lo > seg_hi) continue;
                    BigInt x1 = (seg_lo - t) / slope[l], x2 = (seg_hi - t) / slope[l];
                    if (x1 > x2) std::swap(x1, x2);
                    next.push_back({std::move(x1), std::move(x2)});
                }
            }
        }
        std::sort(next.begin(), next.end(),
                  [](const Iv& a, const Iv& b) { return a.lo < b.lo; });
        std::vector<Iv> merged;
        for (auto& c : next) {
            if (!merged.empty() && c.lo <= merged.back().hi) {
                if (c.hi > merged.back().hi) merged.back().hi = std::move(c.hi);
            } else {
                merged.push_back(std::move(c));
            }
        }
        // A_{k+1} = A_0 intersect f^{-1}(A_k)
        std::vector<Iv> out;
        std::size_t i = 0, k = 0;
        while (i < merged.size() && k < a0.size()) {
            BigInt alo = a0[k].lo * Fp, ahi = a0[k].hi * Fp;
            const BigInt& mlo = merged[i].lo;
            const BigInt& mhi = merged[i].hi;
            BigInt lo = mlo < alo ? alo : mlo;
            BigInt hi = mhi < ahi ? mhi : ahi;
            if (lo <= hi) out.push_back({std::move(lo), std::move(hi)});
            if (mhi < ahi)
                ++i;
            else
                ++k;
        }
        if (out.size() > cap) throw ResourceCapError("integer sweep: component cap exceeded");
        cur = std::move(out);
        D = std::move(Dp);
        F = std::move(Fp);
        if (bit_size_int(D) > budget_bits)
            throw BudgetError("integer sweep: denominator size " +
                              std::to_string(bit_size_int(D)) + " bits exceeds budget");
    }

    static unsigned bit_size_int(const BigInt& x) {
        return x == 0 ? 1u : static_cast<unsigned>(boost::multiprecision::msb(x)) + 1u;
    }
};

} // namespace detail

/// Exact S_f^N via the backward recursion A_0 = I minus hole,
/// A_{k+1} = A_0 intersect f^{-1}(A_k). Survivors form a closed set;
/// degenerate point components are kept. Integer-slope maps take the
/// scaled-integer sweep, everything else the generic rational one.
inline IntervalSet surviving_set(const PiecewiseLinearMap& f, const Hole& h, long N,
                                 std::size_t cap = kDefaultComponentCap,
                                 unsigned budget_bits = kDefaultBitBudget) {
    if (detail::IntegerSweep::applicable(f)) {
        detail::IntegerSweep sw(f, h, cap);
        for (long k = 0; k < N && !sw.empty(); ++k) sw.step(cap, budget_bits);
        return sw.to_interval_set();
    }
    IntervalSet a0 = subtract_hole(IntervalSet::full(), h, cap);
    IntervalSet cur = a0;
    for (long k = 0; k < N; ++k) {
        cur = set_intersect(a0, preimage(f, cur, cap), cap);
        if (cur.is_empty()) break;
        unsigned bits = 0;
        for (const auto& c : cur.comps) {
            bits = std::max(bits, bit_size(c.lo));
            bits = std::max(bits, bit_size(c.hi));
        }
        if (bits > budget_bits)
            throw BudgetError("surviving_set: endpoint size " + std::to_string(bits) +
                              " bits exceeds budget");
    }
    return cur;
}

struct EscapeRateSeries {
    Hole hole;
    std::vector<long> horizons;
    std::vector<Rat> measures;    // mu(S^N); may end with a single 0 entry
    std::vector<double> rates;    // -(1/N) log mu, only while mu > 0
    double fitted_rate = 0.0;     // LSQ slope over the tail half; +inf on truncation

    std::string to_csv() const {
        std::string out = "N,measure,rate\n";
        for (std::size_t i = 0; i < horizons.size(); ++i) {
            out += std::to_string(horizons[i]) + "," + format_rat(measures[i]) + ",";
            out += i < rates.size() ? std::to_string(rates[i]) : "inf";
            out += "\n";
        }
        return out;
    }
};

/// Measures mu(S_f^N) along the given horizons (one pullback sweep up to the
/// largest), with rates and a least-squares fit of -log mu against N over the
/// tail half of the series. Truncates at the first zero measure, if any,
/// reporting fitted_rate = +inf there.
inline EscapeRateSeries escape_rate(const PiecewiseLinearMap& f, const Hole& h,
                                    std::vector<long> horizons,
                                    std::size_t cap = kDefaultComponentCap,
                                    unsigned budget_bits = kDefaultBitBudget) {
    if (horizons.empty()) throw UsageError("escape_rate: no horizons");
    std::sort(horizons.begin(), horizons.end());
    for (long n : horizons)
        if (n < 0) throw UsageError("escape_rate: negative horizon");
    EscapeRateSeries out;
    out.hole = h;
    long k = 0;
    std::size_t hi = 0;
    bool dead = false;
    auto record = [&](long N, const Rat& m) {
        out.horizons.push_back(N);
        out.measures.push_back(m);
        if (m > 0) {
            out.rates.push_back(N > 0 ? -log_rat(m) / static_cast<double>(N)
                                      : 0.0);
        } else {
            dead = true;
        }
    };
    if (detail::IntegerSweep::applicable(f)) {
        detail::IntegerSweep sw(f, h, cap);
        while (hi < horizons.size() && !dead) {
            while (k < horizons[hi] && !sw.empty()) {
                sw.step(cap, budget_bits);
                ++k;
            }
            record(horizons[hi], sw.measure());
            ++hi;
        }
    } else {
        IntervalSet a0 = subtract_hole(IntervalSet::full(), h, cap);
        IntervalSet cur = a0;
        while (hi < horizons.size() && !dead) {
            while (k < horizons[hi] && !cur.is_empty()) {
                cur = set_intersect(a0, preimage(f, cur, cap), cap);
                ++k;
                unsigned bits = 0;
                for (const auto& c : cur.comps) {
                    bits = std::max(bits, bit_size(c.lo));
                    bits = std::max(bits, bit_size(c.hi));
                }
                if (bits > budget_bits) throw BudgetError("escape_rate: bit budget exceeded");
            }
            record(horizons[hi], cur.measure());
            ++hi;
        }
    }
    if (dead) {
        out.fitted_rate = std::numeric_limits<double>::infinity();
        return out;
    }
    // slope of -log mu vs N over the last ceil(k/2) points
    std::size_t m = out.horizons.size();
    std::size_t start = m - (m + 1) / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t i = start; i < m; ++i) {
        double x = static_cast<double>(out.horizons[i]);
        double y = -log_rat(out.measures[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++cnt;
    }
    double den = cnt * sxx - sx * sx;
    out.fitted_rate = den != 0 ? (cnt * sxy - sx * sy) / den
                               : (cnt == 1 && out.horizons[start] > 0
                                      ? -log_rat(out.measures[start]) / out.horizons[start]
                                      : 0.0);
    return out;
}

struct StabilityWindow {
    Rat eps;  // admissible endpoint perturbation
    long L;   // lag: max of the two endpoint escape times
};

/// Stability window for a hole off the bifurcation set: both endpoints escape
/// by horizon N, and eps is small enough that the escaping iterate of the
/// eps-ball around each endpoint stays eps-deep inside the hole. With these,
/// S^{N+2L}(a,b) subseteq S^{N+L}(a',b') subseteq S^N(a,b) for holes within eps.
inline StabilityWindow stability_window(const PiecewiseLinearMap& f, const Hole& h, long N,
                                        unsigned budget_bits = kDefaultBitBudget) {
    auto va = escape_time(f, h, h.a, N, budget_bits);
    auto vb = escape_time(f, h, h.b, N, budget_bits);
    if (!va.escaped || !vb.escaped)
        throw UsageError("stability_window: hole endpoints survive to the horizon");
    const auto& d = detail::map_data<Rat>(f);
    Rat lambda = 0;
    for (const auto& s : d.slope) {
        Rat a = s < 0 ? Rat(-s) : s;
        if (a > lambda) lambda = a;
    }
    auto depth_of = [&](const Rat& x, long t) {
        Rat y = iterate(f, x, t, budget_bits);
        Rat da, db;
        if (h.space == Space::Circle) {
            da = wrap01(y - h.a);
            db = wrap01(h.b - y);
        } else {
            da = y - h.a;
            db = h.b - y;
        }
        return da < db ? da : db;
    };
    Rat pa = 1, pb = 1;
    for (long i = 0; i < va.time; ++i) pa *= lambda;
    for (long i = 0; i < vb.time; ++i) pb *= lambda;
    Rat ea = depth_of(h.a, va.time) / (2 * (pa + 1));
    Rat eb = depth_of(h.b, vb.time) / (2 * (pb + 1));
    StabilityWindow w;
    w.eps = ea < eb ? ea : eb;
    w.L = std::max(va.time, vb.time);
    return w;
}

inline std::string interval_set_to_csv(const IntervalSet& s) {
    std::string out;
    for (const auto& c : s.comps) out += format_rat(c.lo) + "," + format_rat(c.hi) + "\n";
    return out;
}

} // namespace holescope
