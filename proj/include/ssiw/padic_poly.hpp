#pragma once

// Polynomials over Z_(p) with exact rational coefficients, and the Iwasawa
// invariants attached to them: mu is the least coefficient valuation, lambda
// the least index attaining it. Also omega_n = (1+T)^{p^n} - 1, its cyclotomic
// factors, division by omega_n, and refined invariants of projections.

#include <ssiw/core.hpp>

#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ssiw {

struct InvariantPair {
    unsigned mu = 0;
    std::size_t lambda = 0;

    bool operator==(const InvariantPair&) const = default;
};

class PAdicPoly {
public:
    explicit PAdicPoly(std::uint64_t p) : p_(p) {
        if (!is_prime(p)) throw Error(Errc::InvalidArgument, std::to_string(p) + " is not prime");
    }

    /// Coefficients lowest degree first; each must be p-integral.
    PAdicPoly(std::uint64_t p, std::vector<Rational> coeffs) : PAdicPoly(p) {
        coeffs_ = std::move(coeffs);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            coeffs_[i].canonicalize();
            if (mpz_divisible_ui_p(coeffs_[i].get_den_mpz_t(), p_))
                throw Error(Errc::InvalidArgument, "coefficient " + std::to_string(i) + " = " +
                                                       coeffs_[i].get_str() + " is not p-integral");
        }
        trim();
    }

    static PAdicPoly constant(std::uint64_t p, const Rational& c) { return PAdicPoly(p, {c}); }

    static PAdicPoly monomial(std::uint64_t p, std::size_t k, const Rational& c = 1) {
        std::vector<Rational> v(k + 1);
        v[k] = c;
        return PAdicPoly(p, std::move(v));
    }

    std::uint64_t p() const { return p_; }
    bool is_zero() const { return coeffs_.empty(); }

    /// Degree; the zero polynomial has no degree.
    std::size_t degree() const {
        if (is_zero()) throw Error(Errc::ZeroPolynomial, "degree of zero polynomial");
        return coeffs_.size() - 1;
    }

    /// Number of stored coefficients (degree + 1, or 0 for the zero polynomial).
    std::size_t size() const { return coeffs_.size(); }

    std::span<const Rational> coeffs() const { return coeffs_; }

    Rational coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : Rational(0); }

    bool operator==(const PAdicPoly& o) const { return p_ == o.p_ && coeffs_ == o.coeffs_; }

    friend PAdicPoly operator+(const PAdicPoly& f, const PAdicPoly& g) {
        check_same_prime(f, g);
        std::vector<Rational> c(std::max(f.size(), g.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = f.coeff(i) + g.coeff(i);
        return PAdicPoly(f.p_, std::move(c));
    }

    friend PAdicPoly operator-(const PAdicPoly& f, const PAdicPoly& g) {
        check_same_prime(f, g);
        std::vector<Rational> c(std::max(f.size(), g.size()));
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = f.coeff(i) - g.coeff(i);
        return PAdicPoly(f.p_, std::move(c));
    }

    friend PAdicPoly operator*(const PAdicPoly& f, const PAdicPoly& g) {
        check_same_prime(f, g);
        if (f.is_zero() || g.is_zero()) return PAdicPoly(f.p_);
        std::vector<Rational> c(f.size() + g.size() - 1);
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f.coeffs_[i] == 0) continue;
            for (std::size_t j = 0; j < g.size(); ++j) c[i + j] += f.coeffs_[i] * g.coeffs_[j];
        }
        return PAdicPoly(f.p_, std::move(c));
    }

private:
    static void check_same_prime(const PAdicPoly& f, const PAdicPoly& g) {
        if (f.p_ != g.p_) throw Error(Errc::InvalidArgument, "polynomials over different primes");
    }

    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
    }

    std::uint64_t p_;
    std::vector<Rational> coeffs_;
};

inline InvariantPair invariants(const PAdicPoly& f) {
    if (f.is_zero()) throw Error(Errc::ZeroPolynomial, "Iwasawa invariants of the zero polynomial");
    std::optional<long> best;
    std::size_t at = 0;
    const auto cs = f.coeffs();
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i] == 0) continue;
        const long v = ord_p(cs[i], f.p());
        if (!best || v < *best) {
            best = v;
            at = i;
        }
    }
    return {static_cast<unsigned>(*best), at};
}

/// omega_n = (1+T)^{p^n} - 1.
inline PAdicPoly omega(std::uint64_t p, unsigned n) {
    const std::uint64_t deg = ipow(p, n);
    std::vector<Rational> c(deg + 1);
    for (std::uint64_t k = 1; k <= deg; ++k) c[k] = Rational(binomial(deg, k));
    return PAdicPoly(p, std::move(c));
}

/// Long division by a monic polynomial: f = g q + r with deg r < deg g.
inline std::pair<PAdicPoly, PAdicPoly> divmod_monic(const PAdicPoly& f, const PAdicPoly& g) {
    if (g.is_zero() || g.coeffs().back() != 1) throw Error(Errc::InvalidArgument, "divisor must be monic");
    const std::size_t dg = g.degree();
    if (f.size() <= dg) return {PAdicPoly(f.p()), f};
    std::vector<Rational> r(f.coeffs().begin(), f.coeffs().end());
    std::vector<Rational> q(r.size() - dg);
    const auto gc = g.coeffs();
    for (std::size_t i = r.size(); i-- > dg;) {
        const Rational lead = r[i];
        if (lead == 0) continue;
        q[i - dg] = lead;
        for (std::size_t j = 0; j <= dg; ++j) r[i - dg + j] -= lead * gc[j];
    }
    r.resize(dg);
    return {PAdicPoly(f.p(), std::move(q)), PAdicPoly(f.p(), std::move(r))};
}

/// Phi_{p^i}(1+T) = omega_i / omega_{i-1}, i >= 1.
inline PAdicPoly phi_cyclo(std::uint64_t p, unsigned i) {
    if (i == 0) throw Error(Errc::InvalidArgument, "phi_cyclo needs i >= 1");
    auto [q, r] = divmod_monic(omega(p, i), omega(p, i - 1));
    if (!r.is_zero()) throw Error(Errc::InvalidArgument, "omega_{i-1} does not divide omega_i");
    return q;
}

/// omega_n^+ (even i) or omega_n^- (odd i): product of Phi_{p^i}(1+T) over 1 <= i <= n.
inline PAdicPoly omega_pm(std::uint64_t p, unsigned n, Sign sign) {
    PAdicPoly out = PAdicPoly::constant(p, 1);
    for (unsigned i = 1; i <= n; ++i) {
        const bool even = i % 2 == 0;
        if (even == (sign == Sign::plus)) out = out * phi_cyclo(p, i);
    }
    return out;
}

/// q_0 = q_1 = 0; q_n = p^{n-1} - p^{n-2} + ... ending in -1 (n even) or -p (n odd).
inline std::uint64_t q_seq(std::uint64_t p, unsigned n) {
    if (n < 2) return 0;
    std::int64_t total = 0;
    for (unsigned k = (n % 2 == 0 ? 0 : 1); k < n; ++k) {
        const auto term = static_cast<std::int64_t>(ipow(p, k));
        total += (k % 2 == (n - 1) % 2) ? term : -term;
    }
    return static_cast<std::uint64_t>(total);
}

/// F = omega_n Q + R with deg R < p^n.
inline std::pair<PAdicPoly, PAdicPoly> divmod_omega(const PAdicPoly& f, unsigned n) {
    return divmod_monic(f, omega(f.p(), n));
}

/// Invariants of the image of F in Lambda / (omega_n).
inline InvariantPair refined_invariants(const PAdicPoly& f, unsigned n) {
    auto [q, r] = divmod_omega(f, n);
    if (r.is_zero()) throw Error(Errc::ZeroRemainder, "F is divisible by omega_" + std::to_string(n));
    return invariants(r);
}

// ---------------------------------------------------------------------------
// the binomial basis: G = sum_j b_j (1+T)^j with integer b_j

/// Coefficient of T^k in sum_j b_j (1+T)^j.
inline Integer binomial_basis_coefficient(std::span<const std::int64_t> b, std::size_t k) {
    Integer acc;
    for (std::size_t j = k; j < b.size(); ++j)
        if (b[j] != 0) acc += binomial(j, k) * Integer(static_cast<long>(b[j]));
    return acc;
}

/// sum_j b_j (1+T)^j expanded in powers of T (Taylor shift by 1, quadratic).
inline PAdicPoly from_binomial_basis(std::uint64_t p, std::span<const std::int64_t> b) {
    const std::size_t D = b.size();
    std::vector<Integer> c(D);
    for (std::size_t j = 0; j < D; ++j) c[j] = static_cast<long>(b[j]);
    for (std::size_t i = 0; i + 1 < D; ++i)
        for (std::size_t j = D - 1; j-- > i;) c[j] += c[j + 1];
    std::vector<Rational> q(D);
    for (std::size_t j = 0; j < D; ++j) q[j] = Rational(c[j]);
    return PAdicPoly(p, std::move(q));
}

/// Invariants of sum_j b_j (1+T)^j without expanding it. The change of basis
/// to powers of T is unipotent over Z, so mu = min_j ord_p(b_j); lambda is the
/// multiplicity of X = 1 as a root of (sum_j b_j X^j) / p^mu modulo p.
inline InvariantPair binomial_basis_invariants(std::uint64_t p, std::span<const std::int64_t> b) {
    std::optional<unsigned> mu;
    for (auto x : b)
        if (x != 0) mu = std::min(mu.value_or(ord_p(x, p)), ord_p(x, p));
    if (!mu) throw Error(Errc::ZeroPolynomial, "Iwasawa invariants of the zero polynomial");
    const auto scale = static_cast<std::int64_t>(ipow(p, *mu));
    std::vector<std::uint32_t> c(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) c[j] = static_cast<std::uint32_t>(mod_floor(b[j] / scale, p));
    const auto pp = static_cast<std::uint32_t>(p);
    // Each pass of synthetic division by (X - 1) leaves B(1) in c[lo] and the
    // quotient in c[lo+1 ..]; the first nonzero remainder ends the scan.
    std::size_t hi = c.size();
    while (hi > 0 && c[hi - 1] == 0) --hi;
    for (std::size_t lo = 0; lo < hi; ++lo) {
        for (std::size_t j = hi - 1; j-- > lo;) {
            std::uint32_t s = c[j] + c[j + 1];
            c[j] = s >= pp ? s - pp : s;
        }
        if (c[lo] != 0) return {*mu, lo};
    }
    throw Error(Errc::InvalidArgument, "binomial-basis scan did not terminate");
}

// ---------------------------------------------------------------------------
// serialization: {"p": p, "coeffs": ["num/den", ...]} lowest degree first

inline void to_json(nlohmann::json& j, const PAdicPoly& f) {
    std::vector<std::string> cs;
    cs.reserve(f.size());
    for (const auto& c : f.coeffs()) cs.push_back(to_fraction_string(c));
    j = nlohmann::json{{"p", f.p()}, {"coeffs", cs}};
}

inline PAdicPoly poly_from_json(const nlohmann::json& j) {
    try {
        const auto p = j.at("p").get<std::uint64_t>();
        std::vector<Rational> cs;
        for (const auto& s : j.at("coeffs")) cs.push_back(parse_fraction_string(s.get<std::string>()));
        return PAdicPoly(p, std::move(cs));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
}

}  // namespace ssiw
