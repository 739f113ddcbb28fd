#include <ssiw/curves.hpp>
#include <ssiw/selftest.hpp>

#include <gtest/gtest.h>

#include <sstream>
#include <thread>

using namespace ssiw;

namespace {

EllipticCurve make(const char* label, long a1, long a2, long a3, long a4, long a6, std::uint64_t N) {
    EllipticCurve c;
    c.label = label;
    c.a1 = a1;
    c.a2 = a2;
    c.a3 = a3;
    c.a4 = a4;
    c.a6 = a6;
    c.conductor = N;
    return c;
}

const EllipticCurve e11 = make("11a1", 0, -1, 1, -10, -20, 11);
const EllipticCurve e32 = make("32a2", 0, 0, 0, -1, 0, 32);
const EllipticCurve e37 = make("37a1", 0, 0, 1, -1, 0, 37);

// Oracle: count (x, y) in F_l^2 on the long Weierstrass equation, plus infinity.
long brute_force_ap(const EllipticCurve& c, long l) {
    auto r = [l](const Integer& x) { return static_cast<long>(mod_floor(x, l)); };
    const long a1 = r(c.a1), a2 = r(c.a2), a3 = r(c.a3), a4 = r(c.a4), a6 = r(c.a6);
    long points = 1;
    for (long x = 0; x < l; ++x)
        for (long y = 0; y < l; ++y) {
            long lhs = (y * y + a1 * x * y + a3 * y) % l;
            long rhs = (x * x % l * x + a2 * x % l * x + a4 * x + a6) % l;
            if (lhs == rhs) ++points;
        }
    return l + 1 - points;
}

}  // namespace

TEST(Validate, DiscriminantOf11a1) {
    EXPECT_EQ(e11.discriminant(), Integer(-161051));
    EXPECT_EQ(Integer(-161051), Integer(-1) * 11 * 11 * 11 * 11 * 11);
    EXPECT_NO_THROW(validate(e11));
}

TEST(Validate, SingularCurveRejected) {
    try {
        validate(make("zero", 0, 0, 0, 0, 0, 1));
        FAIL() << "expected SingularCurve";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SingularCurve);
    }
}

TEST(Validate, CongruentNumberCurve) {
    EXPECT_EQ(e32.discriminant(), Integer(64));
    EXPECT_NO_THROW(validate(e32));
}

TEST(Validate, ConductorMustDivideDiscriminant) {
    try {
        validate(make("bad", 0, -1, 1, -10, -20, 13));
        FAIL() << "expected ConductorMismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ConductorMismatch);
    }
}

TEST(Ap, KnownValuesFor11a1) {
    EXPECT_EQ(ap(e11, 3), -1);
    EXPECT_EQ(ap(e11, 19), 0);
    EXPECT_EQ(ap(e11, 2), -2);
    EXPECT_EQ(ap(e11, 7), -2);
}

TEST(Ap, BadPrimeRejected) {
    try {
        ap(e32, 2);
        FAIL() << "expected BadReductionPrime";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::BadReductionPrime);
    }
    EXPECT_THROW(ap(e11, 11), Error);
}

TEST(Ap, MatchesBruteForceOracleUpTo100) {
    for (const auto* c : {&e11, &e32, &e37})
        for (long l = 2; l <= 100; ++l) {
            if (!is_prime(l) || c->conductor % l == 0) continue;
            EXPECT_EQ(ap(*c, l), brute_force_ap(*c, l)) << c->label << " l=" << l;
        }
}

TEST(Ap, HasseBound) {
    for (const auto* c : {&e11, &e32, &e37})
        for (std::uint64_t l = 2; l <= 1000; ++l) {
            if (!is_prime(l) || c->conductor % l == 0) continue;
            const long a = ap(*c, l);
            EXPECT_LE(static_cast<double>(a * a), 4.0 * l) << c->label << " l=" << l;
        }
}

TEST(Supersingular, Membership) {
    EXPECT_TRUE(is_supersingular(e11, 19));
    EXPECT_FALSE(is_supersingular(e11, 11));
    EXPECT_FALSE(is_supersingular(e11, 7));
    // 32a2 is supersingular at 3 mathematically, but 2 and 3 are excluded
    EXPECT_EQ(ap(e32, 3), 0);
    EXPECT_FALSE(is_supersingular(e32, 3));
}

TEST(Supersingular, PrimesUpTo30) {
    EXPECT_EQ(supersingular_primes(e11, 30), (std::vector<std::uint64_t>{19, 29}));
    EXPECT_TRUE(supersingular_primes(e11, 4).empty());
}

TEST(Supersingular, PrefixProperty) {
    const auto full = supersingular_primes(e32, 200);
    for (std::uint64_t b = 5; b <= 200; b += 7) {
        const auto part = supersingular_primes(e32, b);
        ASSERT_LE(part.size(), full.size());
        EXPECT_TRUE(std::equal(part.begin(), part.end(), full.begin()));
        for (auto p : part) EXPECT_TRUE(is_supersingular(e32, p));
    }
    // CM by Z[i]: supersingular exactly at p = 3 mod 4
    for (auto p : full) EXPECT_EQ(p % 4, 3u);
}

TEST(ApCache, ConcurrentReadersAgree) {
    ApCache cache(e37);
    std::vector<long> got(8);
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < 8; ++t)
            pool.emplace_back([&, t] {
                long s = 0;
                for (std::uint64_t l = 2; l < 300; ++l)
                    if (is_prime(l) && l != 37) s += cache(l) * static_cast<long>(l);
                got[t] = s;
            });
    }
    for (int t = 1; t < 8; ++t) EXPECT_EQ(got[t], got[0]);
    EXPECT_EQ(cache(17), 0);
}

TEST(CurveFile, ParsesRecordsAndComments) {
    std::istringstream in("# header\n11a1 0 -1 1 -10 -20 11  # trailing\n\n37a1 0 0 1 -1 0 37\n");
    const auto curves = parse_curve_file(in);
    ASSERT_EQ(curves.size(), 2u);
    EXPECT_EQ(curves[0], e11);
    EXPECT_EQ(curves[1], e37);
}

TEST(CurveFile, Errors) {
    for (const char* text : {"11a1 0 -1 1 -10 11\n", "11a1 0 -1 x -10 -20 11\n", "z 0 0 0 0 0 1\n",
                             "11a1 0 -1 1 -10 -20 0\n"}) {
        std::istringstream in(text);
        try {
            parse_curve_file(in);
            FAIL() << "accepted: " << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), Errc::ParseError) << text;
        }
    }
}

TEST(CurveFile, RecordHashTracksEveryField) {
    EXPECT_EQ(record_hash(e11), record_hash(make("11a1", 0, -1, 1, -10, -20, 11)));
    EXPECT_NE(record_hash(e11), record_hash(make("11a1", 0, -1, 1, -10, -21, 11)));
    EXPECT_NE(record_hash(e11), record_hash(make("11a2", 0, -1, 1, -10, -20, 11)));
}

TEST(CurveFile, ReferenceCurvesValidate) { EXPECT_EQ(reference_curves().size(), 3u); }
