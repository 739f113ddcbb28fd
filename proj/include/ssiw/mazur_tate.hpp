#pragma once

// Mazur-Tate elements theta_n = sum_{a in (Z/p^{n+1})^x} [a/p^{n+1}]^+ (1+T)^{log_gamma a},
// the signed invariants they determine at levels of alternating parity, the
// four coefficient sums that pin mu^+- when lambda^+- is 0 or 1, and an audit
// of the resulting mu bounds.

#include <ssiw/core.hpp>
#include <ssiw/modsym.hpp>
#include <ssiw/padic_poly.hpp>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace ssiw {

/// a -> log_gamma(a) on (Z/p^{n+1})^x for gamma = 1 + p, where
/// a = omega(a) gamma^{log a} mod p^{n+1} and omega is the Teichmueller lift.
class LogTable {
public:
    LogTable(std::uint64_t p, unsigned n) : p_(p), n_(n) {
        if (!is_prime(p) || p == 2) throw Error(Errc::InvalidArgument, "LogTable needs an odd prime");
        modulus_ = ipow(p, n + 1);
        const std::uint64_t period = ipow(p, n);
        if (period > std::numeric_limits<std::uint32_t>::max())
            throw Error(Errc::InvalidArgument, "LogTable level too large");
        // omega(r) = r^{p^n} mod p^{n+1}; it depends only on r mod p.
        teich_.assign(p, 0);
        teich_inv_.assign(p, 0);
        for (std::uint64_t r = 1; r < p; ++r) teich_[r] = powmod(r, period, modulus_);
        for (std::uint64_t r = 1; r < p; ++r) teich_inv_[r] = teich_[powmod(r, p - 2, p)];
        // gamma^j runs over 1 + pZ/p^{n+1}; index those residues by (u - 1) / p.
        log_one_.assign(period, 0);
        std::uint64_t g = 1;
        for (std::uint64_t j = 0; j < period; ++j) {
            log_one_[(g - 1) / p] = static_cast<std::uint32_t>(j);
            g = mulmod(g, 1 + p, modulus_);
        }
    }

    std::uint64_t p() const { return p_; }
    unsigned level() const { return n_; }
    std::uint64_t modulus() const { return modulus_; }
    std::uint64_t gamma() const { return 1 + p_; }

    std::uint64_t teichmuller(std::uint64_t a) const { return teich_[checked_residue(a) % p_]; }

    std::uint32_t log(std::uint64_t a) const {
        a = checked_residue(a);
        const std::uint64_t u = mulmod(a, teich_inv_[a % p_], modulus_);
        return log_one_[(u - 1) / p_];
    }

private:
    std::uint64_t checked_residue(std::uint64_t a) const {
        a %= modulus_;
        if (a % p_ == 0) throw Error(Errc::InvalidArgument, "log_gamma of a non-unit");
        return a;
    }

    std::uint64_t p_;
    unsigned n_;
    std::uint64_t modulus_ = 0;
    std::vector<std::uint64_t> teich_, teich_inv_;
    std::vector<std::uint32_t> log_one_;
};

/// theta_n held exactly in the basis (1+T)^j, 0 <= j < p^n.
struct ThetaElement {
    std::string label;
    std::uint64_t p = 0;
    unsigned n = 0;
    std::vector<std::int64_t> group_ring;
    std::optional<InvariantPair> invariants;  // empty iff theta_n = 0

    bool is_zero() const { return !invariants.has_value(); }
    std::size_t degree_bound() const { return group_ring.size(); }

    /// Coefficient of T^k.
    Integer coefficient(std::size_t k) const { return binomial_basis_coefficient(group_ring, k); }

    /// Expansion in powers of T (quadratic in p^n; meant for low levels).
    PAdicPoly to_poly() const {
        try {
            return from_binomial_basis(p, group_ring);
        } catch (const Error& e) {
            if (e.code() == Errc::InvalidArgument) throw Error(Errc::NonIntegralTheta, e.what());
            throw;
        }
    }
};

namespace detail {

inline void checked_accumulate(std::int64_t& into, std::int64_t x) {
    if (__builtin_add_overflow(into, x, &into)) throw Error(Errc::InvalidArgument, "theta coefficient overflow");
}

template <class Fn>
void parallel_for_chunks(unsigned jobs, Fn&& fn) {
    jobs = std::max(1u, jobs);
    if (jobs == 1) {
        fn(0u, 1u);
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back([&fn, t, jobs] { fn(t, jobs); });
}

}  // namespace detail

/// Assemble theta_n from the plus symbol by accumulating [a/p^{n+1}]^+ into
/// the bucket log_gamma(a). Worker partitions merge by exact addition.
inline ThetaElement theta(const EigenSymbol& plus, const LogTable& logs, unsigned jobs = 1) {
    if (plus.sign != Sign::plus) throw Error(Errc::InvalidArgument, "theta is built from the plus symbol");
    const std::uint64_t p = logs.p();
    const auto m = static_cast<std::int64_t>(logs.modulus());
    const std::size_t D = ipow(p, logs.level());
    std::vector<std::vector<std::int64_t>> partial(std::max(1u, jobs));
    std::vector<std::exception_ptr> failures(partial.size());
    detail::parallel_for_chunks(jobs, [&](unsigned t, unsigned stride) {
        try {
            auto& acc = partial[t];
            acc.assign(D, 0);
            for (std::int64_t a = 1 + t; a < m; a += stride) {
                if (a % static_cast<std::int64_t>(p) == 0) continue;
                detail::checked_accumulate(acc[logs.log(static_cast<std::uint64_t>(a))], plus.value_at(a, m));
            }
        } catch (...) {
            failures[t] = std::current_exception();
        }
    });
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
    ThetaElement th;
    th.label = plus.label;
    th.p = p;
    th.n = logs.level();
    th.group_ring = std::move(partial[0]);
    for (std::size_t t = 1; t < partial.size(); ++t)
        for (std::size_t j = 0; j < D; ++j) detail::checked_accumulate(th.group_ring[j], partial[t][j]);
    if (std::any_of(th.group_ring.begin(), th.group_ring.end(), [](auto x) { return x != 0; }))
        th.invariants = binomial_basis_invariants(p, th.group_ring);
    return th;
}

inline ThetaElement theta(const EigenSymbol& plus, std::uint64_t p, unsigned n, unsigned jobs = 1) {
    return theta(plus, LogTable(p, n), jobs);
}

// ---------------------------------------------------------------------------
// signed invariants

struct ThetaBudget {
    unsigned n_max = 3;
    std::uint64_t max_degree = 216000;  // skip levels with p^n above this (60^3)
    unsigned jobs = 1;
};

struct LevelRecord {
    enum class State { computed, zero, skipped };
    unsigned n = 0;
    State state = State::skipped;
    InvariantPair invariants;
    std::int64_t shifted_lambda = 0;  // lambda(theta_n) - q_n
};

struct SignResult {
    enum class Status { certified, not_stabilized };
    Sign sign = Sign::plus;
    Status status = Status::not_stabilized;
    std::optional<unsigned> mu;
    std::optional<std::size_t> lambda;
    std::optional<unsigned> stabilized_at;
    std::vector<unsigned> witnesses;
    std::vector<LevelRecord> levels;

    bool certified() const { return status == Status::certified; }
};

struct SignedInvariants {
    std::uint64_t p = 0;
    SignResult plus, minus;

    const SignResult& get(Sign s) const { return s == Sign::plus ? plus : minus; }
};

/// Recover (mu^+-, lambda^+-) from theta_n: even n speaks for the minus side
/// and odd n for the plus side, with lambda(theta_n) = lambda^+- + q_n. A sign
/// is certified at n + 2 when levels n and n + 2 agree and lambda^+- < p^{n+2} - q_{n+2}.
/// Computed elements are stored in `thetas` when given.
inline SignedInvariants signed_invariants(const EigenSymbol& plus, std::uint64_t p, const ThetaBudget& budget,
                                          std::map<unsigned, ThetaElement>* thetas = nullptr) {
    if (budget.n_max < 2) throw Error(Errc::InvalidArgument, "signed_invariants needs n_max >= 2");
    std::vector<LevelRecord> recs(budget.n_max + 1);
    for (unsigned n = 0; n <= budget.n_max; ++n) {
        LevelRecord& r = recs[n];
        r.n = n;
        if (ipow(p, n) > budget.max_degree) continue;
        ThetaElement th = theta(plus, p, n, budget.jobs);
        if (th.is_zero()) {
            r.state = LevelRecord::State::zero;
        } else {
            r.state = LevelRecord::State::computed;
            r.invariants = *th.invariants;
            r.shifted_lambda = static_cast<std::int64_t>(r.invariants.lambda) - static_cast<std::int64_t>(q_seq(p, n));
            if (r.shifted_lambda < 0)
                throw Error(Errc::NegativeLambda, plus.label + " p=" + std::to_string(p) + " n=" + std::to_string(n) +
                                                      ": lambda(theta_n) = " + std::to_string(r.invariants.lambda) +
                                                      " < q_n = " + std::to_string(q_seq(p, n)));
        }
        if (thetas) thetas->insert_or_assign(n, std::move(th));
    }

    SignedInvariants out;
    out.p = p;
    auto solve = [&](Sign s) {
        SignResult res;
        res.sign = s;
        const unsigned parity = s == Sign::plus ? 1 : 0;
        for (unsigned n = parity; n <= budget.n_max; n += 2) res.levels.push_back(recs[n]);
        for (unsigned n = parity; n + 2 <= budget.n_max; n += 2) {
            const auto &lo = recs[n], &hi = recs[n + 2];
            if (lo.state != LevelRecord::State::computed || hi.state != LevelRecord::State::computed) continue;
            if (lo.invariants.mu != hi.invariants.mu || lo.shifted_lambda != hi.shifted_lambda) continue;
            const auto top = static_cast<std::int64_t>(ipow(p, n + 2) - q_seq(p, n + 2));
            if (hi.shifted_lambda >= top) continue;
            res.status = SignResult::Status::certified;
            res.mu = hi.invariants.mu;
            res.lambda = static_cast<std::size_t>(hi.shifted_lambda);
            res.stabilized_at = n + 2;
            res.witnesses = {n, n + 2};
            break;
        }
        return res;
    };
    out.plus = solve(Sign::plus);
    out.minus = solve(Sign::minus);
    return out;
}

// ---------------------------------------------------------------------------
// coefficient sums and bounds

enum class BoundCase { minus_lambda0, plus_lambda0, minus_lambda1, plus_lambda1 };

inline constexpr std::array<BoundCase, 4> all_bound_cases = {BoundCase::minus_lambda0, BoundCase::plus_lambda0,
                                                             BoundCase::minus_lambda1, BoundCase::plus_lambda1};

inline const char* bound_case_name(BoundCase c) {
    switch (c) {
        case BoundCase::minus_lambda0: return "minus_lambda0";
        case BoundCase::plus_lambda0: return "plus_lambda0";
        case BoundCase::minus_lambda1: return "minus_lambda1";
        case BoundCase::plus_lambda1: return "plus_lambda1";
    }
    return "?";
}

inline Sign bound_case_sign(BoundCase c) {
    return (c == BoundCase::plus_lambda0 || c == BoundCase::plus_lambda1) ? Sign::plus : Sign::minus;
}

inline std::size_t bound_case_lambda(BoundCase c) {
    return (c == BoundCase::minus_lambda1 || c == BoundCase::plus_lambda1) ? 1 : 0;
}

/// The exact sum whose valuation is mu^+- under the case's lambda hypothesis:
///   minus_lambda0: sum_{a mod p} [a/p]            plus_lambda0: sum_{a mod p^2} [a/p^2]
///   minus_lambda1: sum_{a mod p^3} C(log a, p) [a/p^3]
///   plus_lambda1:  sum_{a mod p^2} log a [a/p^2]
/// (sums over units, plus symbol throughout).
inline Integer coefficient_sum_value(const EigenSymbol& plus, std::uint64_t p, BoundCase which) {
    if (plus.sign != Sign::plus) throw Error(Errc::InvalidArgument, "coefficient sums use the plus symbol");
    const auto sp = static_cast<std::int64_t>(p);
    Integer total;
    switch (which) {
        case BoundCase::minus_lambda0: {
            std::int64_t s = 0;
            for (std::int64_t a = 1; a < sp; ++a) s += plus.value_at(a, sp);
            total = static_cast<long>(s);
            break;
        }
        case BoundCase::plus_lambda0: {
            std::int64_t s = 0;
            for (std::int64_t a = 1; a < sp * sp; ++a)
                if (a % sp) s += plus.value_at(a, sp * sp);
            total = static_cast<long>(s);
            break;
        }
        case BoundCase::plus_lambda1: {
            const LogTable logs(p, 1);
            for (std::int64_t a = 1; a < sp * sp; ++a)
                if (a % sp)
                    total += Integer(static_cast<unsigned long>(logs.log(static_cast<std::uint64_t>(a)))) *
                             static_cast<long>(plus.value_at(a, sp * sp));
            break;
        }
        case BoundCase::minus_lambda1: {
            const LogTable logs(p, 2);
            const std::int64_t m = sp * sp * sp;
            for (std::int64_t a = 1; a < m; ++a) {
                if (a % sp == 0) continue;
                const auto L = logs.log(static_cast<std::uint64_t>(a));
                if (L < p) continue;  // C(L, p) = 0
                total += binomial(L, p) * static_cast<long>(plus.value_at(a, m));
            }
            break;
        }
    }
    return total;
}

struct CoefficientSum {
    Integer value;
    unsigned ord;
};

inline CoefficientSum coefficient_sum(const EigenSymbol& plus, std::uint64_t p, BoundCase which) {
    Integer s = coefficient_sum_value(plus, p, which);
    if (s == 0)
        throw Error(Errc::ZeroSum, std::string(bound_case_name(which)) + " sum vanishes for " + plus.label +
                                       " at p=" + std::to_string(p));
    return {s, ord_p(s, p)};
}

/// ceil(p / ln p), guarding against a quotient too close to an integer for long double.
inline std::uint64_t ceil_p_over_log_p(std::uint64_t p) {
    const long double x = static_cast<long double>(p) / std::log(static_cast<long double>(p));
    const long double nearest = std::round(x);
    if (std::fabs(x - nearest) > 1e-9L) return static_cast<std::uint64_t>(std::ceil(x));
    using big = boost::multiprecision::cpp_dec_float_100;
    const big y = big(p) / boost::multiprecision::log(big(p));
    return static_cast<std::uint64_t>(boost::multiprecision::ceil(y));
}

/// Upper bound on mu^+- for all but finitely many supersingular p, per case.
inline std::uint64_t mu_bound(std::uint64_t p, BoundCase which) {
    switch (which) {
        case BoundCase::minus_lambda0: return 1;
        case BoundCase::plus_lambda0: return 2;
        case BoundCase::plus_lambda1: return 3;
        case BoundCase::minus_lambda1: return p + 1 + ceil_p_over_log_p(p);
    }
    return 0;
}

/// |S| < p^e for each coefficient sum S (the case's proof-side estimate).
inline unsigned sum_bound_exponent(std::uint64_t p, BoundCase which) {
    switch (which) {
        case BoundCase::minus_lambda0: return 2;
        case BoundCase::plus_lambda0: return 3;
        case BoundCase::plus_lambda1: return 4;
        case BoundCase::minus_lambda1: return static_cast<unsigned>(p + 2 + ceil_p_over_log_p(p));
    }
    return 0;
}

struct CaseAudit {
    enum class Verdict { pass, fail, not_applicable };
    BoundCase which = BoundCase::minus_lambda0;
    bool hypothesis = false;  // the sign is certified with the case's lambda
    std::optional<unsigned> mu;
    std::uint64_t bound = 0;
    Verdict verdict = Verdict::not_applicable;
    Integer sum;
    std::optional<unsigned> sum_ord;  // empty iff sum = 0
    unsigned sum_exponent = 0;
    bool sum_within_bound = false;  // |sum| < p^sum_exponent
};

struct SupNormCheck {
    unsigned n = 0;
    Rational sup_norm;
    bool holds = false;  // sup_norm < p
};

struct BoundsReport {
    std::uint64_t p = 0;
    std::array<CaseAudit, 4> cases;
    std::vector<SupNormCheck> sup_norms;
    bool triangle_ok = false;  // |S_1| <= (p - 1) max_a |[a/p]^+|
    std::vector<std::string> anomalies;

    const CaseAudit& get(BoundCase c) const { return cases[static_cast<std::size_t>(c)]; }
};

inline const char* verdict_name(CaseAudit::Verdict v) {
    switch (v) {
        case CaseAudit::Verdict::pass: return "pass";
        case CaseAudit::Verdict::fail: return "fail";
        case CaseAudit::Verdict::not_applicable: return "na";
    }
    return "?";
}

/// Audit the mu bounds for each case whose lambda hypothesis holds, plus the
/// unconditional size estimates on the sums and on |[a/p^n]^+| for n <= sup_levels.
inline BoundsReport check_bounds(const EigenSymbol& plus, std::uint64_t p, const SignedInvariants& inv,
                                 unsigned sup_levels = 3, unsigned jobs = 1) {
    BoundsReport rep;
    rep.p = p;
    for (BoundCase c : all_bound_cases) {
        CaseAudit& a = rep.cases[static_cast<std::size_t>(c)];
        a.which = c;
        a.bound = mu_bound(p, c);
        a.sum = coefficient_sum_value(plus, p, c);
        if (a.sum != 0) a.sum_ord = ord_p(a.sum, p);
        a.sum_exponent = sum_bound_exponent(p, c);
        a.sum_within_bound = abs(a.sum) < integer_pow(p, a.sum_exponent);

        const SignResult& s = inv.get(bound_case_sign(c));
        a.hypothesis = s.certified() && *s.lambda == bound_case_lambda(c);
        if (!a.hypothesis) continue;
        a.mu = s.mu;
        a.verdict = *s.mu <= a.bound ? CaseAudit::Verdict::pass : CaseAudit::Verdict::fail;
        const std::string tag = std::string(bound_case_name(c)) + ": ";
        if (!a.sum_ord)
            rep.anomalies.push_back(tag + "ZeroSum under its lambda hypothesis");
        else if (*a.sum_ord != *s.mu)
            rep.anomalies.push_back(tag + "ord_p(sum) = " + std::to_string(*a.sum_ord) + " but mu = " +
                                    std::to_string(*s.mu));
    }
    for (unsigned n = 1; n <= sup_levels; ++n) {
        SupNormCheck ch;
        ch.n = n;
        ch.sup_norm = symbol_sup_norm(plus, p, n, jobs);
        ch.holds = ch.sup_norm < Rational(static_cast<unsigned long>(p));
        rep.sup_norms.push_back(ch);
    }
    const Rational max1 = sup_levels >= 1 ? rep.sup_norms[0].sup_norm : symbol_sup_norm(plus, p, 1, jobs);
    rep.triangle_ok = Rational(abs(rep.get(BoundCase::minus_lambda0).sum)) <=
                      Rational(static_cast<unsigned long>(p - 1)) * max1;
    return rep;
}

}  // namespace ssiw
