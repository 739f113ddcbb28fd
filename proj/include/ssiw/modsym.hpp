#pragma once

// Weight-2 modular symbols for Gamma_0(N) through Manin's finite presentation,
// the rational eigen-functional r -> [r]^sign attached to an elliptic curve,
// and its evaluation by continued fractions.

#include <ssiw/core.hpp>
#include <ssiw/curves.hpp>
#include <ssiw/linalg.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace ssiw {

/// P^1(Z/N): pairs (c:d) with gcd(c,d,N) = 1 modulo scaling by units. The
/// canonical representative of a class is its lexicographically least pair.
class P1List {
public:
    static constexpr std::uint64_t max_level = 4096;

    explicit P1List(std::uint64_t level) : level_(level) {
        if (level == 0 || level > max_level)
            throw Error(Errc::InvalidArgument, "level " + std::to_string(level) + " out of range");
        const std::uint64_t N = level;
        std::vector<std::uint64_t> units;
        for (std::uint64_t u = 1; u <= N; ++u)
            if (std::gcd(u % N, N) == 1 || N == 1) units.push_back(u % N);
        if (N == 1) units = {0};
        table_.assign(N * N, -1);
        for (std::uint64_t c = 0; c < N; ++c) {
            for (std::uint64_t d = 0; d < N; ++d) {
                if (std::gcd(std::gcd(c, d), N) != 1 || table_[c * N + d] >= 0) continue;
                const auto idx = static_cast<std::int32_t>(reps_.size());
                reps_.emplace_back(c, d);
                for (auto u : units) table_[(u * c % N) * N + u * d % N] = idx;
            }
        }
    }

    std::uint64_t level() const { return level_; }
    std::size_t size() const { return reps_.size(); }

    std::pair<std::uint64_t, std::uint64_t> rep(std::size_t i) const { return reps_[i]; }

    /// Index of the class of (c:d); (c,d) must be coprime to N jointly.
    std::size_t index(std::int64_t c, std::int64_t d) const {
        const auto cr = mod_floor(c, level_), dr = mod_floor(d, level_);
        const auto idx = table_[cr * level_ + dr];
        if (idx < 0)
            throw Error(Errc::InvalidArgument,
                        "(" + std::to_string(c) + ":" + std::to_string(d) + ") is not in P^1(Z/N)");
        return static_cast<std::size_t>(idx);
    }

    /// #P^1(Z/N) = N prod_{q | N} (1 + 1/q).
    static std::uint64_t expected_size(std::uint64_t N) {
        std::uint64_t n = N;
        for (auto q : prime_factors(N)) n = n / q * (q + 1);
        return n;
    }

private:
    std::uint64_t level_;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> reps_;
    std::vector<std::int32_t> table_;
};

/// Integer 2x2 matrix (a b; c d), acting on row vectors (u, v) from the right.
struct Mat2 {
    std::int64_t a, b, c, d;
    std::int64_t det() const { return a * d - b * c; }
};

/// Merel's Heilbronn matrices of determinant n: a > b >= 0, d > c >= 0, ad - bc = n.
inline std::vector<Mat2> heilbronn_merel(std::uint64_t n) {
    std::vector<Mat2> out;
    const auto ln = static_cast<std::int64_t>(n);
    for (std::int64_t b = 0; b < ln; ++b) {
        for (std::int64_t c = 0; b + c + 1 <= ln; ++c) {
            const std::int64_t num = ln + b * c;
            for (std::int64_t a = b + 1; a <= num / (c + 1); ++a) {
                if (num % a != 0) continue;
                const std::int64_t d = num / a;
                if (d > c) out.push_back({a, b, c, d});
            }
        }
    }
    return out;
}

/// Free module on P^1(Z/N) modulo the Manin relations
///   x + xS = 0,  x + xU + xU^2 = 0,   S = (0 -1; 1 0),  U = (0 -1; 1 -1).
class ModularSymbolSpace {
public:
    explicit ModularSymbolSpace(std::uint64_t level) : p1_(std::make_shared<const P1List>(level)) {
        const P1List& P = *p1_;
        const std::size_t n = P.size();
        std::vector<linalg::IntRow> rel;
        for (std::size_t i = 0; i < n; ++i) {
            const auto [c, d] = signed_rep(i);
            linalg::IntRow two(n), three(n);
            two[i] += 1;
            two[P.index(d, -c)] += 1;
            three[i] += 1;
            three[P.index(d, -c - d)] += 1;
            three[P.index(-c - d, c)] += 1;
            rel.push_back(std::move(two));
            rel.push_back(std::move(three));
        }
        relations_ = rel;
        auto ech = linalg::row_reduce(std::move(rel), n);
        rank_ = ech.rank();
        basis_ = ech.free_columns();
        std::vector<std::size_t> pos(n, n);
        for (std::size_t k = 0; k < basis_.size(); ++k) pos[basis_[k]] = k;
        coords_.assign(n, linalg::QVector(basis_.size()));
        for (std::size_t k = 0; k < basis_.size(); ++k) coords_[basis_[k]][k] = 1;
        for (std::size_t r = 0; r < ech.rows.size(); ++r) {
            const auto& row = ech.rows[r];
            const std::size_t pc = ech.pivots[r];
            for (std::size_t k = 0; k < basis_.size(); ++k) {
                Rational q(-row[basis_[k]], row[pc]);
                q.canonicalize();
                coords_[pc][k] = q;
            }
        }
    }

    std::uint64_t level() const { return p1_->level(); }
    const P1List& p1() const { return *p1_; }
    std::shared_ptr<const P1List> p1_shared() const { return p1_; }

    std::size_t num_generators() const { return p1_->size(); }
    std::size_t dimension() const { return basis_.size(); }
    std::size_t relation_rank() const { return rank_; }

    /// Relation matrix rows (2-term and 3-term interleaved, one pair per generator).
    const std::vector<linalg::IntRow>& relations() const { return relations_; }

    /// Generators whose classes form the chosen quotient basis.
    const std::vector<std::size_t>& basis() const { return basis_; }

    /// Quotient coordinates of generator g in terms of basis().
    const linalg::QVector& coordinates(std::size_t g) const { return coords_[g]; }

    /// (c,d) * m for the canonical representative of generator g.
    std::size_t act(std::size_t g, const Mat2& m) const {
        const auto [c, d] = signed_rep(g);
        return p1_->index(c * m.a + d * m.c, c * m.b + d * m.d);
    }

    /// Star involution (c:d) -> (-c:d) on the quotient; rows are images of basis vectors.
    linalg::QMatrix star_involution() const { return operator_matrix({Mat2{-1, 0, 0, 1}}); }

    /// T_ell on the quotient through Heilbronn-Merel matrices (ell prime, ell not dividing N).
    linalg::QMatrix hecke_operator(std::uint64_t ell) const {
        check_good_prime(ell);
        return operator_matrix(heilbronn_merel(ell));
    }

    /// Primes at which the integral Manin presentation has torsion (elliptic
    /// points of order 2 or 3): away from these the content-1 functional is
    /// integrally normalized.
    std::vector<std::uint64_t> torsion_primes() const {
        bool two = false, three = false;
        for (std::size_t g = 0; g < num_generators(); ++g) {
            two = two || act(g, Mat2{0, -1, 1, 0}) == g;
            three = three || act(g, Mat2{0, -1, 1, -1}) == g;
        }
        std::vector<std::uint64_t> out;
        if (two) out.push_back(2);
        if (three) out.push_back(3);
        return out;
    }

    void check_good_prime(std::uint64_t ell) const {
        if (!is_prime(ell)) throw Error(Errc::InvalidArgument, std::to_string(ell) + " is not prime");
        if (level() % ell == 0)
            throw Error(Errc::BadReductionPrime, "T_" + std::to_string(ell) + " requested at level " +
                                                     std::to_string(level()));
    }

private:
    std::pair<std::int64_t, std::int64_t> signed_rep(std::size_t g) const {
        const auto [c, d] = p1_->rep(g);
        return {static_cast<std::int64_t>(c), static_cast<std::int64_t>(d)};
    }

    linalg::QMatrix operator_matrix(const std::vector<Mat2>& mats) const {
        const std::size_t dim = dimension();
        linalg::QMatrix m(dim, dim);
        for (std::size_t b = 0; b < dim; ++b)
            for (const auto& h : mats) {
                const auto& img = coords_[act(basis_[b], h)];
                for (std::size_t k = 0; k < dim; ++k)
                    if (img[k] != 0) m(b, k) += img[k];
            }
        return m;
    }

    std::shared_ptr<const P1List> p1_;
    std::vector<linalg::IntRow> relations_;
    std::size_t rank_ = 0;
    std::vector<std::size_t> basis_;
    std::vector<linalg::QVector> coords_;
};

/// Normalized sign-eigen functional of a newform: integer values on the
/// Manin generators with gcd 1, first nonzero value positive.
struct EigenSymbol {
    std::string label;
    Sign sign = Sign::plus;
    std::shared_ptr<const P1List> p1;
    std::vector<std::int64_t> values;
    Rational normalization_scale = 1;  // values = scale * (primitive kernel vector pushed to generators)
    std::vector<std::uint64_t> cutting_primes;
    std::vector<std::uint64_t> exceptional_primes;

    std::uint64_t level() const { return p1->level(); }

    /// [a/m]^sign for m > 0, by Manin's continued-fraction decomposition of {a/m, oo}.
    std::int64_t value_at(std::int64_t a, std::int64_t m) const {
        // {a/m, oo} = - sum_k {p_{k-1}/q_{k-1}, p_k/q_k}, each term g_k{0,oo} with
        // g_k = (p_k, s p_{k-1}; q_k, s q_{k-1}) and s = (-1)^{k-1}.
        std::int64_t result = 0;
        std::int64_t q_prev = 0, q_prev2 = 1;  // q_{-1}, q_{-2}
        std::int64_t x = a, y = m;
        std::int64_t s = -1;
        const auto N = static_cast<std::int64_t>(p1->level());
        while (true) {
            std::int64_t digit = x / y;
            std::int64_t rem = x % y;
            if (rem < 0) {
                rem += y;
                --digit;
            }
            const std::int64_t qk = (digit % N * q_prev + q_prev2) % N;
            result -= values[p1->index(qk, s * q_prev)];
            if (rem == 0) break;
            x = y;
            y = rem;
            q_prev2 = q_prev;
            q_prev = qk;
            s = -s;
        }
        return result;
    }
};

namespace detail {

inline bool hecke_eigen_on_generators(const ModularSymbolSpace& space, const std::vector<std::int64_t>& v,
                                      std::uint64_t ell, long a) {
    const auto hs = heilbronn_merel(ell);
    for (std::size_t g = 0; g < space.num_generators(); ++g) {
        std::int64_t sum = 0;
        for (const auto& h : hs) sum += v[space.act(g, h)];
        if (sum != a * v[g]) return false;
    }
    return true;
}

}  // namespace detail

/// Upper bound for Hecke cutting primes.
inline constexpr std::uint64_t hecke_cut_bound = 50;

/// Cut out the sign-eigenline of the newform attached to `curve` by the
/// operators T_ell - a_ell for good ell <= 50 in increasing order, stopping as
/// soon as the line is one-dimensional. The line is then confirmed against the
/// remaining good ell <= 50; a mismatch means the level carries no such
/// eigensystem.
inline EigenSymbol eigensymbol(const ModularSymbolSpace& space, const EllipticCurve& curve, Sign sign) {
    const long eps = static_cast<int>(sign);
    const std::size_t dim = space.dimension();
    if (dim == 0) throw Error(Errc::EigenlineEmpty, "level " + std::to_string(space.level()) + " has no symbols");
    linalg::QMatrix stack = space.star_involution().shifted(eps);
    std::vector<linalg::IntRow> ker = linalg::kernel(stack);
    std::vector<std::uint64_t> used;
    ApCache aps(curve);
    for (std::uint64_t ell = 2; ell <= hecke_cut_bound; ++ell) {
        if (!is_prime(ell) || space.level() % ell == 0) continue;
        if (!used.empty() && ker.size() <= 1) break;
        stack = stack.vstack(space.hecke_operator(ell).shifted(aps(ell)));
        used.push_back(ell);
        ker = linalg::kernel(stack);
    }
    const std::string where = curve.label + sign_char(sign) + " at level " + std::to_string(space.level());
    if (ker.empty()) throw Error(Errc::EigenlineEmpty, where);
    if (ker.size() > 1)
        throw Error(Errc::EigenlineNotUnique,
                    where + ": eigenspace has dimension " + std::to_string(ker.size()) + " after Hecke cutting");

    const auto& w = ker.front();
    std::vector<Rational> raw(space.num_generators());
    Integer den = 1;
    for (std::size_t g = 0; g < raw.size(); ++g) {
        const auto& cg = space.coordinates(g);
        for (std::size_t k = 0; k < dim; ++k) raw[g] += cg[k] * w[k];
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), raw[g].get_den_mpz_t());
    }
    linalg::IntRow scaled(raw.size());
    for (std::size_t g = 0; g < raw.size(); ++g) scaled[g] = raw[g].get_num() * (den / raw[g].get_den());
    Integer cont = linalg::content(scaled);
    if (cont == 0) throw Error(Errc::EigenlineEmpty, where + ": functional vanishes on all generators");
    Integer orient = 1;
    for (const auto& x : scaled)
        if (x != 0) {
            orient = x > 0 ? 1 : -1;
            break;
        }

    EigenSymbol sym;
    sym.label = curve.label;
    sym.sign = sign;
    sym.p1 = space.p1_shared();
    sym.normalization_scale = Rational(den * orient, cont);
    sym.normalization_scale.canonicalize();
    sym.values.resize(raw.size());
    for (std::size_t g = 0; g < raw.size(); ++g) {
        Integer v = scaled[g] * orient / cont;
        if (!v.fits_slong_p()) throw Error(Errc::InvalidArgument, where + ": symbol value exceeds 64 bits");
        sym.values[g] = v.get_si();
    }
    sym.cutting_primes = used;
    sym.exceptional_primes = space.torsion_primes();

    for (std::uint64_t ell = 2; ell <= hecke_cut_bound; ++ell) {
        if (!is_prime(ell) || space.level() % ell == 0) continue;
        if (std::find(used.begin(), used.end(), ell) != used.end()) continue;
        if (!detail::hecke_eigen_on_generators(space, sym.values, ell, aps(ell)))
            throw Error(Errc::EigenlineEmpty,
                        where + ": candidate line fails T_" + std::to_string(ell) + " = a_" + std::to_string(ell));
    }
    return sym;
}

/// [r]^sign as an exact rational (integral under the content-1 normalization).
inline Rational eval(const EigenSymbol& sym, const Rational& r) {
    const Integer& num = r.get_num();
    const Integer& den = r.get_den();
    if (!num.fits_slong_p() || !den.fits_slong_p())
        throw Error(Errc::InvalidArgument, "eval argument exceeds 64 bits");
    return Rational(sym.value_at(num.get_si(), den.get_si()));
}

/// max over a in (Z/p^n)^x of |[a/p^n]^sign|.
inline Rational symbol_sup_norm(const EigenSymbol& sym, std::uint64_t p, unsigned n, unsigned jobs = 1) {
    if (!is_prime(p) || n == 0) throw Error(Errc::InvalidArgument, "symbol_sup_norm needs prime p and n >= 1");
    const auto m = static_cast<std::int64_t>(ipow(p, n));
    jobs = std::max(1u, jobs);
    std::vector<std::int64_t> partial(jobs, 0);
    auto work = [&](unsigned t) {
        std::int64_t best = 0;
        for (std::int64_t a = 1 + t; a < m; a += jobs) {
            if (a % static_cast<std::int64_t>(p) == 0) continue;
            best = std::max(best, std::abs(sym.value_at(a, m)));
        }
        partial[t] = best;
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work, t);
    }
    return Rational(*std::max_element(partial.begin(), partial.end()));
}

// ---------------------------------------------------------------------------
// on-disk cache of a normalized symbol, keyed by the curve record hash

inline constexpr const char* modsym_cache_magic = "ssiw-modsym v1";

inline void write_symbol_cache(std::ostream& os, const EigenSymbol& sym, const EllipticCurve& curve) {
    auto join = [](const auto& xs) {
        std::ostringstream s;
        for (std::size_t i = 0; i < xs.size(); ++i) s << (i ? " " : "") << xs[i];
        return s.str();
    };
    std::ostringstream hash;
    hash << std::hex << record_hash(curve);
    os << modsym_cache_magic << '\n'
       << "label " << sym.label << '\n'
       << "curve-hash " << hash.str() << '\n'
       << "level " << sym.level() << '\n'
       << "sign " << sign_char(sym.sign) << '\n'
       << "scale " << to_fraction_string(sym.normalization_scale) << '\n'
       << "cutting-primes " << join(sym.cutting_primes) << '\n'
       << "exceptional-primes " << join(sym.exceptional_primes) << '\n'
       << "denominator 1\n"
       << "values " << sym.values.size() << '\n'
       << join(sym.values) << '\n';
}

/// Parse a cache file written for `curve` and `sign`. Throws CacheCorrupt on
/// any mismatch, including a stale curve hash.
inline EigenSymbol read_symbol_cache(std::istream& in, const EllipticCurve& curve, Sign sign) {
    auto corrupt = [](const std::string& why) -> Error { return Error(Errc::CacheCorrupt, why); };
    std::string line;
    if (!std::getline(in, line) || line != modsym_cache_magic) throw corrupt("bad header");
    auto field = [&](const std::string& key) {
        if (!std::getline(in, line)) throw corrupt("truncated at " + key);
        if (line.rfind(key, 0) != 0) throw corrupt("expected " + key);
        return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
    };
    auto ints = [&](const std::string& text) {
        std::vector<std::uint64_t> out;
        std::istringstream s(text);
        for (std::uint64_t x; s >> x;) out.push_back(x);
        return out;
    };
    EigenSymbol sym;
    sym.label = field("label");
    std::ostringstream hash;
    hash << std::hex << record_hash(curve);
    if (sym.label != curve.label || field("curve-hash") != hash.str()) throw corrupt("curve record changed");
    std::uint64_t level = 0;
    try {
        level = std::stoull(field("level"));
    } catch (const std::logic_error&) {
        throw corrupt("bad level");
    }
    if (level != curve.conductor) throw corrupt("level mismatch");
    if (field("sign") != std::string(1, sign_char(sign))) throw corrupt("sign mismatch");
    sym.sign = sign;
    try {
        sym.normalization_scale = parse_fraction_string(field("scale"));
    } catch (const Error&) {
        throw corrupt("bad scale");
    }
    sym.cutting_primes = ints(field("cutting-primes"));
    sym.exceptional_primes = ints(field("exceptional-primes"));
    if (field("denominator") != "1") throw corrupt("non-integral values");
    sym.p1 = std::make_shared<const P1List>(level);
    std::size_t count = 0;
    try {
        count = std::stoull(field("values"));
    } catch (const std::logic_error&) {
        throw corrupt("bad value count");
    }
    if (count != sym.p1->size()) throw corrupt("value count does not match P^1(Z/N)");
    if (!std::getline(in, line)) throw corrupt("missing values");
    std::istringstream vs(line);
    for (std::int64_t v; vs >> v;) sym.values.push_back(v);
    if (sym.values.size() != count || !vs.eof()) throw corrupt("value list malformed");
    return sym;
}

}  // namespace ssiw
