#pragma once

// Shared arithmetic vocabulary: exact integers/rationals (GMP), small-prime
// helpers, and the library's error type.

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssiw {

using Integer = mpz_class;
using Rational = mpq_class;

/// Sign of a modular symbol / plus-minus invariant.
enum class Sign : int { plus = 1, minus = -1 };

inline char sign_char(Sign s) { return s == Sign::plus ? '+' : '-'; }

enum class Errc {
    SingularCurve,
    ConductorMismatch,
    BadReductionPrime,
    EigenlineNotUnique,
    EigenlineEmpty,
    ZeroPolynomial,
    ZeroRemainder,
    NonIntegralTheta,
    NotStabilized,
    NegativeLambda,
    ZeroSum,
    ParseError,
    CacheCorrupt,
    InvalidArgument,
};

inline const char* errc_name(Errc e) {
    switch (e) {
        case Errc::SingularCurve: return "SingularCurve";
        case Errc::ConductorMismatch: return "ConductorMismatch";
        case Errc::BadReductionPrime: return "BadReductionPrime";
        case Errc::EigenlineNotUnique: return "EigenlineNotUnique";
        case Errc::EigenlineEmpty: return "EigenlineEmpty";
        case Errc::ZeroPolynomial: return "ZeroPolynomial";
        case Errc::ZeroRemainder: return "ZeroRemainder";
        case Errc::NonIntegralTheta: return "NonIntegralTheta";
        case Errc::NotStabilized: return "NotStabilized";
        case Errc::NegativeLambda: return "NegativeLambda";
        case Errc::ZeroSum: return "ZeroSum";
        case Errc::ParseError: return "ParseError";
        case Errc::CacheCorrupt: return "CacheCorrupt";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Errors that falsify a mathematical expectation (as opposed to bad input).
inline bool is_math_anomaly(Errc e) {
    return e == Errc::NonIntegralTheta || e == Errc::ZeroSum || e == Errc::NegativeLambda;
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// ---------------------------------------------------------------------------
// small integer helpers

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

/// b^e, throwing on 64-bit overflow.
inline std::uint64_t ipow(std::uint64_t b, unsigned e) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < e; ++i) {
        if (b != 0 && r > std::numeric_limits<std::uint64_t>::max() / b)
            throw Error(Errc::InvalidArgument, "ipow overflow");
        r *= b;
    }
    return r;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

/// Nonnegative residue of a (possibly negative) x modulo m.
inline std::uint64_t mod_floor(std::int64_t x, std::uint64_t m) {
    std::int64_t r = x % static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(m) : r);
}

inline std::uint64_t mod_floor(const Integer& x, std::uint64_t m) {
    Integer r;
    mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), m);
    return r.get_ui();
}

/// p-adic valuation of a nonzero integer.
inline unsigned ord_p(const Integer& x, std::uint64_t p) {
    if (x == 0) throw Error(Errc::InvalidArgument, "ord_p of zero");
    Integer pz(static_cast<unsigned long>(p));
    Integer t;
    return static_cast<unsigned>(mpz_remove(t.get_mpz_t(), x.get_mpz_t(), pz.get_mpz_t()));
}

inline unsigned ord_p(std::int64_t x, std::uint64_t p) {
    if (x == 0) throw Error(Errc::InvalidArgument, "ord_p of zero");
    unsigned v = 0;
    std::uint64_t u = x < 0 ? static_cast<std::uint64_t>(-(x + 1)) + 1 : static_cast<std::uint64_t>(x);
    while (u % p == 0) {
        u /= p;
        ++v;
    }
    return v;
}

/// Signed p-adic valuation of a nonzero rational.
inline long ord_p(const Rational& x, std::uint64_t p) {
    if (x == 0) throw Error(Errc::InvalidArgument, "ord_p of zero");
    return static_cast<long>(ord_p(Integer(x.get_num()), p)) -
           static_cast<long>(ord_p(Integer(x.get_den()), p));
}

inline Integer binomial(std::uint64_t n, std::uint64_t k) {
    Integer r;
    if (k > n) return r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline Integer integer_pow(std::uint64_t p, unsigned long e) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), p, e);
    return r;
}

/// "num/den" with den always present.
inline std::string to_fraction_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Rational parse_fraction_string(const std::string& s) {
    Rational q;
    if (s.empty() || q.set_str(s, 10) != 0 || q.get_den() == 0)
        throw Error(Errc::ParseError, "bad rational '" + s + "'");
    q.canonicalize();
    return q;
}

}  // namespace ssiw
