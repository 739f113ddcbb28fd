#pragma once

// Runtime invariant suites behind `ssiw selftest`. Each check is seeded and
// reports pass/fail with a short detail string.

#include <ssiw/curves.hpp>
#include <ssiw/mazur_tate.hpp>
#include <ssiw/modsym.hpp>
#include <ssiw/padic_poly.hpp>

#include <random>
#include <string>
#include <vector>

namespace ssiw {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Curves used by the built-in suites: 11a1 (rank 0), 32a2 (rank 0, CM), 37a1 (rank 1).
inline std::vector<EllipticCurve> reference_curves() {
    auto mk = [](const char* label, long a1, long a2, long a3, long a4, long a6, std::uint64_t N) {
        EllipticCurve c;
        c.label = label;
        c.a1 = a1;
        c.a2 = a2;
        c.a3 = a3;
        c.a4 = a4;
        c.a6 = a6;
        c.conductor = N;
        return validate(std::move(c));
    };
    return {mk("11a1", 0, -1, 1, -10, -20, 11), mk("32a2", 0, 0, 0, -1, 0, 32), mk("37a1", 0, 0, 1, -1, 0, 37)};
}

namespace detail {

inline Rational random_p_integral(std::mt19937_64& rng, std::uint64_t p, long range = 20) {
    std::uniform_int_distribution<long> num(-range, range);
    std::uniform_int_distribution<long> den(1, 6);
    long d = den(rng);
    while (d % static_cast<long>(p) == 0) d = den(rng);
    Rational q(num(rng), d);
    q.canonicalize();
    return q;
}

inline PAdicPoly random_poly(std::mt19937_64& rng, std::uint64_t p, std::size_t size) {
    std::vector<Rational> c(size);
    for (auto& x : c) x = random_p_integral(rng, p);
    return PAdicPoly(p, std::move(c));
}

/// p^mu (T^lambda + p F0) U with deg F0 < lambda and U(0) a p-unit.
inline PAdicPoly weierstrass_product(std::mt19937_64& rng, std::uint64_t p, unsigned mu, std::size_t lambda,
                                     std::size_t unit_size) {
    std::vector<Rational> dist(lambda + 1);
    dist[lambda] = 1;
    for (std::size_t i = 0; i < lambda; ++i) dist[i] = Rational(static_cast<unsigned long>(p)) * random_p_integral(rng, p);
    std::vector<Rational> u(unit_size);
    for (auto& x : u) x = random_p_integral(rng, p);
    while (u[0] == 0 || ord_p(u[0], p) != 0) u[0] = random_p_integral(rng, p);
    return PAdicPoly::constant(p, Rational(integer_pow(p, mu))) * PAdicPoly(p, std::move(dist)) *
           PAdicPoly(p, std::move(u));
}

}  // namespace detail

inline std::vector<CheckResult> run_selftest(std::uint64_t seed) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);
    const std::uint64_t primes[] = {3, 5, 7};
    auto pick_prime = [&] { return primes[std::uniform_int_distribution<int>(0, 2)(rng)]; };

    {
        CheckResult r{"projection keeps invariants when lambda < p^n", true, ""};
        for (int t = 0; t < 200 && r.passed; ++t) {
            const std::uint64_t p = pick_prime();
            const unsigned n = std::uniform_int_distribution<unsigned>(1, 2)(rng);
            const auto lambda = std::uniform_int_distribution<std::size_t>(0, ipow(p, n) - 1)(rng);
            const unsigned mu = std::uniform_int_distribution<unsigned>(0, 3)(rng);
            const auto F = detail::weierstrass_product(rng, p, mu, lambda, 1 + std::uniform_int_distribution<std::size_t>(0, 6)(rng));
            const auto got = refined_invariants(F, n);
            if (got != InvariantPair{mu, lambda}) {
                r.passed = false;
                r.detail = "p=" + std::to_string(p) + " n=" + std::to_string(n) + " expected (" + std::to_string(mu) +
                           "," + std::to_string(lambda) + ")";
            }
        }
        out.push_back(r);
    }
    {
        CheckResult r{"division by omega_n reconstructs F", true, ""};
        for (int t = 0; t < 50 && r.passed; ++t) {
            const std::uint64_t p = pick_prime();
            const unsigned n = std::uniform_int_distribution<unsigned>(0, 2)(rng);
            const auto F = detail::random_poly(rng, p, std::uniform_int_distribution<std::size_t>(1, 40)(rng));
            auto [q, rem] = divmod_omega(F, n);
            if (!(omega(p, n) * q + rem == F) || (!rem.is_zero() && rem.degree() >= ipow(p, n))) r.passed = false;
        }
        out.push_back(r);
    }
    {
        CheckResult r{"invariants are additive under products", true, ""};
        for (int t = 0; t < 100 && r.passed; ++t) {
            const std::uint64_t p = pick_prime();
            const auto F = detail::random_poly(rng, p, 6), G = detail::random_poly(rng, p, 6);
            if (F.is_zero() || G.is_zero()) continue;
            const auto a = invariants(F), b = invariants(G), c = invariants(F * G);
            r.passed = c.mu == a.mu + b.mu && c.lambda == a.lambda + b.lambda;
        }
        out.push_back(r);
    }
    {
        CheckResult r{"omega_n = omega_{n-1} Phi_{p^n}(1+T)", true, ""};
        for (std::uint64_t p : primes)
            for (unsigned n = 1; n <= 3; ++n) r.passed = r.passed && omega(p, n) == omega(p, n - 1) * phi_cyclo(p, n);
        out.push_back(r);
    }
    {
        CheckResult r{"binomial-basis invariants match the expanded polynomial", true, ""};
        for (int t = 0; t < 100 && r.passed; ++t) {
            const std::uint64_t p = pick_prime();
            std::vector<std::int64_t> b(std::uniform_int_distribution<std::size_t>(1, 30)(rng));
            const auto scale = static_cast<std::int64_t>(ipow(p, std::uniform_int_distribution<unsigned>(0, 2)(rng)));
            for (auto& x : b) x = scale * std::uniform_int_distribution<std::int64_t>(-3, 3)(rng);
            const auto F = from_binomial_basis(p, b);
            if (F.is_zero()) continue;
            r.passed = binomial_basis_invariants(p, b) == invariants(F);
        }
        out.push_back(r);
    }
    {
        CheckResult r{"log table reproduces every unit", true, ""};
        for (std::uint64_t p : {5ull, 7ull})
            for (unsigned n = 0; n <= 2; ++n) {
                const LogTable lt(p, n);
                for (std::uint64_t a = 1; a < lt.modulus(); ++a) {
                    if (a % p == 0) continue;
                    const std::uint64_t w = lt.teichmuller(a);
                    if (mulmod(w, powmod(lt.gamma(), lt.log(a), lt.modulus()), lt.modulus()) != a ||
                        powmod(w, p - 1, lt.modulus()) != 1 || w % p != a % p)
                        r.passed = false;
                }
            }
        out.push_back(r);
    }
    for (const auto& curve : reference_curves()) {
        CheckResult r{"modular symbols of " + curve.label + ": relations and held-out Hecke", true, ""};
        try {
            const ModularSymbolSpace space(curve.conductor);
            for (Sign s : {Sign::plus, Sign::minus}) {
                const auto sym = eigensymbol(space, curve, s);
                const auto& v = sym.values;
                for (std::size_t g = 0; g < space.num_generators(); ++g) {
                    const auto S = space.act(g, {0, -1, 1, 0});
                    const auto U = space.act(g, {0, -1, 1, -1});
                    const auto U2 = space.act(g, {-1, 1, -1, 0});
                    if (v[g] + v[S] != 0 || v[g] + v[U] + v[U2] != 0) r.passed = false;
                }
                for (std::uint64_t ell = 2; ell <= 20; ++ell) {
                    if (!is_prime(ell) || curve.conductor % ell == 0) continue;
                    if (!detail::hecke_eigen_on_generators(space, v, ell, ap(curve, ell))) r.passed = false;
                }
            }
        } catch (const Error& e) {
            r.passed = false;
            r.detail = e.what();
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace ssiw
