#pragma once

// Elliptic curves over Q given by integral Weierstrass models: validation,
// traces of Frobenius by point counting, supersingular prime detection.

#include <ssiw/core.hpp>

#include <cstdint>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

namespace ssiw {

struct EllipticCurve {
    std::string label;
    Integer a1, a2, a3, a4, a6;
    std::uint64_t conductor = 1;

    Integer b2() const { return a1 * a1 + 4 * a2; }
    Integer b4() const { return 2 * a4 + a1 * a3; }
    Integer b6() const { return a3 * a3 + 4 * a6; }
    Integer b8() const {
        return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    }
    Integer discriminant() const {
        Integer B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
        return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
    }

    bool operator==(const EllipticCurve&) const = default;
};

struct FrobeniusTrace {
    std::uint64_t ell;
    long a_ell;

    bool within_hasse_bound() const {
        return static_cast<unsigned __int128>(a_ell * a_ell) <= static_cast<unsigned __int128>(ell) * 4;
    }
};

inline EllipticCurve validate(EllipticCurve curve) {
    Integer disc = curve.discriminant();
    if (disc == 0) throw Error(Errc::SingularCurve, curve.label + " has zero discriminant");
    if (curve.conductor == 0)
        throw Error(Errc::ConductorMismatch, curve.label + ": conductor must be positive");
    for (auto q : prime_factors(curve.conductor)) {
        if (mod_floor(disc, q) != 0)
            throw Error(Errc::ConductorMismatch, curve.label + ": prime " + std::to_string(q) +
                                                     " divides the conductor but not the discriminant");
    }
    return curve;
}

namespace detail {

// #E(F_ell) - 1 (affine points only), by direct enumeration of F_ell^2.
inline std::uint64_t affine_points_naive(const EllipticCurve& c, std::uint64_t ell) {
    const std::uint64_t A1 = mod_floor(c.a1, ell), A2 = mod_floor(c.a2, ell), A3 = mod_floor(c.a3, ell),
                        A4 = mod_floor(c.a4, ell), A6 = mod_floor(c.a6, ell);
    std::uint64_t count = 0;
    for (std::uint64_t x = 0; x < ell; ++x) {
        std::uint64_t rhs = (((x + A2) % ell * x + A4) % ell * x + A6) % ell;
        for (std::uint64_t y = 0; y < ell; ++y) {
            std::uint64_t lhs = (y * y + A1 * x % ell * y + A3 * y) % ell;
            if (lhs == rhs) ++count;
        }
    }
    return count;
}

// Same count through the completed model (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6;
// ell odd.
inline std::uint64_t affine_points_sweep(const EllipticCurve& c, std::uint64_t ell) {
    std::vector<signed char> chi(ell, -1);
    chi[0] = 0;
    for (std::uint64_t y = 1; y < ell; ++y) chi[y * y % ell] = 1;
    const std::uint64_t B2 = mod_floor(c.b2(), ell), B4 = mod_floor(2 * c.b4(), ell),
                        B6 = mod_floor(c.b6(), ell), four = 4 % ell;
    long total = 0;
    for (std::uint64_t x = 0; x < ell; ++x) {
        std::uint64_t f = (((four * x + B2) % ell * x + B4) % ell * x + B6) % ell;
        total += chi[f];
    }
    return static_cast<std::uint64_t>(static_cast<long>(ell) + total);
}

}  // namespace detail

/// Trace of Frobenius a_ell = ell + 1 - #E(F_ell) at a prime of good reduction.
inline long ap(const EllipticCurve& curve, std::uint64_t ell) {
    if (!is_prime(ell)) throw Error(Errc::InvalidArgument, std::to_string(ell) + " is not prime");
    if (curve.conductor % ell == 0)
        throw Error(Errc::BadReductionPrime, curve.label + " has bad reduction at " + std::to_string(ell));
    if (mod_floor(curve.discriminant(), ell) == 0)
        throw Error(Errc::BadReductionPrime,
                    curve.label + ": model is not minimal at " + std::to_string(ell));
    std::uint64_t affine = ell <= 3 ? detail::affine_points_naive(curve, ell)
                                    : detail::affine_points_sweep(curve, ell);
    long a = static_cast<long>(ell) + 1 - static_cast<long>(affine + 1);
    if (!FrobeniusTrace{ell, a}.within_hasse_bound())
        throw Error(Errc::InvalidArgument, "Hasse bound violated; point count is wrong");
    return a;
}

/// a_p = 0 at a good prime p >= 5. The primes 2 and 3 are never reported.
inline bool is_supersingular(const EllipticCurve& curve, std::uint64_t p) {
    if (p < 5 || !is_prime(p) || curve.conductor % p == 0) return false;
    return ap(curve, p) == 0;
}

inline std::vector<std::uint64_t> supersingular_primes(const EllipticCurve& curve, std::uint64_t bound) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 5; p <= bound; ++p)
        if (is_supersingular(curve, p)) out.push_back(p);
    return out;
}

/// Memoized a_ell for one curve. Concurrent readers, serialized writers.
class ApCache {
public:
    explicit ApCache(EllipticCurve curve) : curve_(std::move(curve)) {}

    const EllipticCurve& curve() const { return curve_; }

    long operator()(std::uint64_t ell) const {
        {
            std::shared_lock lock(mutex_);
            if (auto it = table_.find(ell); it != table_.end()) return it->second;
        }
        long a = ap(curve_, ell);
        std::unique_lock lock(mutex_);
        table_.emplace(ell, a);
        return a;
    }

private:
    EllipticCurve curve_;
    mutable std::shared_mutex mutex_;
    mutable std::map<std::uint64_t, long> table_;
};

// ---------------------------------------------------------------------------
// curve files: "label a1 a2 a3 a4 a6 conductor" per line, '#' starts a comment

inline std::vector<EllipticCurve> parse_curve_file(std::istream& in) {
    std::vector<EllipticCurve> curves;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        auto fail = [&](const std::string& why) {
            throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": " + why);
        };
        if (tok.size() != 7) fail("expected 7 fields, got " + std::to_string(tok.size()));
        EllipticCurve c;
        c.label = tok[0];
        Integer* coeffs[] = {&c.a1, &c.a2, &c.a3, &c.a4, &c.a6};
        for (int i = 0; i < 5; ++i) {
            if (coeffs[i]->set_str(tok[1 + i], 10) != 0) fail("bad integer '" + tok[1 + i] + "'");
        }
        Integer n;
        if (n.set_str(tok[6], 10) != 0 || n <= 0 || !n.fits_ulong_p()) fail("bad conductor '" + tok[6] + "'");
        c.conductor = n.get_ui();
        try {
            curves.push_back(validate(std::move(c)));
        } catch (const Error& e) {
            fail(e.what());
        }
    }
    return curves;
}

inline std::string canonical_record(const EllipticCurve& c) {
    std::ostringstream os;
    os << c.label << ' ' << c.a1 << ' ' << c.a2 << ' ' << c.a3 << ' ' << c.a4 << ' ' << c.a6 << ' '
       << c.conductor;
    return os.str();
}

/// FNV-1a of the canonical record; stable across platforms (cache keys).
inline std::uint64_t record_hash(const EllipticCurve& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_record(c)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace ssiw
