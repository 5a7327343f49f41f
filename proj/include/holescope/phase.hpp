#pragma once

#include <cmath>

#include "holescope/rational.hpp"

namespace holescope {

enum class Space { Interval, Circle };

/// Float-mode tolerance for point-equality queries.
inline constexpr double kEpsTol = 1e-12;

inline Rat wrap01(const Rat& x) {
    Rat y = x;
    while (y < 0) y += 1;
    while (y >= 1) y -= 1;
    return y;
}

inline double wrap01(double x) {
    double y = x - std::floor(x);
    if (y >= 1.0) y -= 1.0;
    return y;
}

/// An ordered hole (a,b). Interval: the open interval, 0 < a < b < 1.
/// Circle: the positively oriented open arc from a to b, possibly wrapping.
template <class T>
struct HoleT {
    T a{};
    T b{};
    Space space = Space::Interval;
};

using Hole = HoleT<Rat>;
using HoleD = HoleT<double>;

template <class T>
HoleT<T> make_hole(Space space, const T& a, const T& b) {
    if (space == Space::Interval) {
        if (!(T(0) < a && a < b && b < T(1)))
            throw UsageError("interval hole requires 0 < a < b < 1");
    } else {
        T aa = a == T(1) ? T(0) : a; // 1 ~ 0 on the circle
        T bb = b == T(1) ? T(0) : b;
        if (!(T(0) <= aa && aa < T(1) && T(0) <= bb && bb < T(1)))
            throw UsageError("circle hole endpoints must lie in [0,1]");
        if (aa == bb) throw UsageError("circle hole requires a != b");
        return HoleT<T>{aa, bb, space};
    }
    return HoleT<T>{a, b, space};
}

/// Strict membership in the open hole.
template <class T>
bool hole_contains(const HoleT<T>& h, const T& x) {
    if (h.space == Space::Interval) return x > h.a && x < h.b;
    if (h.a < h.b) return x > h.a && x < h.b;
    return x > h.a || x < h.b; // wrapping arc
}

/// Float-mode membership: ties at the endpoints break toward "not contained",
/// guarded by eps.
inline bool hole_contains_tol(const HoleD& h, double x, double eps = kEpsTol) {
    if (h.space == Space::Interval) return x > h.a + eps && x < h.b - eps;
    if (h.a < h.b) return x > h.a + eps && x < h.b - eps;
    return x > h.a + eps || x < h.b - eps;
}

template <class T>
T circle_dist(const T& x, const T& y) {
    T d = x < y ? T(y - x) : T(x - y);
    T w = T(1) - d;
    return d < w ? d : w;
}

} // namespace holescope
