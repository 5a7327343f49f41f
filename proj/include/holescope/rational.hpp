#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace holescope {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

/// Thrown when an exact computation exceeds the configured bit budget.
struct BudgetError : std::runtime_error {
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a computation exceeds a configured resource cap
/// (component counts, itinerary nodes, ...).
struct ResourceCapError : std::runtime_error {
    explicit ResourceCapError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on invalid arguments / contract violations at API boundaries.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a computational consistency assertion fails (a result that
/// should be mathematically guaranteed did not hold).
struct AssertionError : std::runtime_error {
    explicit AssertionError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr unsigned kDefaultBitBudget = 4096;

inline unsigned bit_size(const BigInt& n) {
    if (n == 0) return 1;
    return static_cast<unsigned>(boost::multiprecision::msb(boost::multiprecision::abs(n))) + 1;
}

inline unsigned bit_size(const Rat& x) {
    unsigned nb = bit_size(boost::multiprecision::numerator(x));
    unsigned db = bit_size(boost::multiprecision::denominator(x));
    return nb > db ? nb : db;
}

inline void check_budget(const Rat& x, unsigned budget_bits = kDefaultBitBudget) {
    if (bit_size(x) > budget_bits)
        throw BudgetError("exact value exceeds bit budget of " + std::to_string(budget_bits) + " bits");
}

inline double to_double(const Rat& x) { return x.template convert_to<double>(); }

/// Natural log of a positive big integer, usable far beyond double range.
inline double log_big(const BigInt& n) {
    if (n <= 0) throw UsageError("log_big: nonpositive argument");
    unsigned k = bit_size(n);
    if (k <= 52) return std::log(n.template convert_to<double>());
    unsigned shift = k - 52;
    BigInt top = n >> shift;
    return std::log(top.template convert_to<double>()) + shift * 0.6931471805599453;
}

/// Natural log of a positive rational.
inline double log_rat(const Rat& x) {
    if (x <= 0) throw UsageError("log_rat: nonpositive argument");
    return log_big(boost::multiprecision::numerator(x)) - log_big(boost::multiprecision::denominator(x));
}

/// A parsed scalar: exact when the input was "p/q" or a finite decimal.
struct ParsedScalar {
    bool exact = false;
    Rat r;
    double d = 0.0;
};

/// Parses "p/q" rational strings and decimal strings. Finite decimals parse
/// exactly; anything else falls back to a double-only value.
inline ParsedScalar parse_scalar(const std::string& s) {
    ParsedScalar out;
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            BigInt num(s.substr(0, slash));
            BigInt den(s.substr(slash + 1));
            if (den == 0) throw UsageError("parse_scalar: zero denominator in '" + s + "'");
            out.r = Rat(num, den);
            out.exact = true;
            out.d = to_double(out.r);
            return out;
        }
        auto dot = s.find('.');
        bool plain = s.find_first_of("eEnN") == std::string::npos;
        if (plain) {
            if (dot == std::string::npos) {
                out.r = Rat(BigInt(s));
            } else {
                std::string intpart = s.substr(0, dot);
                std::string frac = s.substr(dot + 1);
                bool neg = !intpart.empty() && intpart[0] == '-';
                if (intpart.empty() || intpart == "-" || intpart == "+") intpart += "0";
                BigInt scale = 1;
                for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
                BigInt whole(intpart);
                BigInt fnum = frac.empty() ? BigInt(0) : BigInt(frac);
                BigInt num = boost::multiprecision::abs(whole) * scale + fnum;
                if (neg) num = -num;
                out.r = Rat(num, scale);
            }
            out.exact = true;
            out.d = to_double(out.r);
            return out;
        }
    } catch (const std::exception&) {
        // fall through to double parsing
    }
    out.exact = false;
    size_t pos = 0;
    out.d = std::stod(s, &pos);
    if (pos != s.size()) throw UsageError("parse_scalar: cannot parse '" + s + "'");
    return out;
}

inline std::string format_rat(const Rat& x) {
    const BigInt& n = boost::multiprecision::numerator(x);
    const BigInt& d = boost::multiprecision::denominator(x);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

/// FNV-1a 64-bit digest, used for output manifests and golden tests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 14695981039346656037ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace holescope
