#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "npuf/bch.hpp"
#include "npuf/errors.hpp"

using namespace npuf;

namespace {

using Poly = std::vector<int>;  // coefficient list, index = power

// Schoolbook remainder over GF(2), written independently of the library.
Poly poly_rem(Poly a, const Poly& b) {
    int db = static_cast<int>(b.size()) - 1;
    while (db >= 0 && !b[db]) --db;
    for (int i = static_cast<int>(a.size()) - 1; i >= db; --i)
        if (a[i])
            for (int j = 0; j <= db; ++j) a[i - db + j] ^= b[j];
    a.resize(std::max(db, 0));
    return a;
}

bool is_zero(const Poly& p) { return std::all_of(p.begin(), p.end(), [](int c) { return c == 0; }); }

Poly to_poly(const std::vector<std::uint8_t>& g) { return Poly(g.begin(), g.end()); }

// Codeword bit i is the coefficient of x^(len-1-i).
Poly codeword_poly(const BitVector& c) {
    Poly p(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) p[c.size() - 1 - i] = c.get(i);
    return p;
}

BitVector random_bits(std::size_t n, std::mt19937_64& rng) {
    BitVector v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(rng() & 1);
    return v;
}

std::vector<int> error_positions(int len, int count, std::mt19937_64& rng) {
    std::vector<int> idx(len);
    for (int i = 0; i < len; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(count);
    return idx;
}

}  // namespace

TEST_CASE("GF(2^4) arithmetic") {
    GaloisField f(4);
    CHECK(f.order() == 15);
    std::set<std::uint32_t> seen;
    for (int i = 0; i < 15; ++i) seen.insert(f.exp(i));
    CHECK(seen.size() == 15);
    CHECK(f.exp(4) == 0b0011);  // alpha^4 = alpha + 1
    for (std::uint32_t a = 1; a < 16; ++a) {
        CHECK(f.mul(a, f.inv(a)) == 1);
        CHECK(f.log(f.exp(f.log(a))) == f.log(a));
    }
    CHECK_THROWS_AS(GaloisField(1), ConfigError);
}

TEST_CASE("textbook generators of length-15 codes") {
    // t=2: x^8+x^7+x^6+x^4+1; t=3: x^10+x^8+x^5+x^4+x^2+x+1
    const auto c2 = bch_build_with_m(7, 2, 4), c3 = bch_build_with_m(5, 3, 4);
    CHECK(to_poly(c2.generator) == Poly{1, 0, 0, 0, 1, 0, 1, 1, 1});
    CHECK(to_poly(c3.generator) == Poly{1, 1, 1, 0, 1, 1, 0, 0, 1, 0, 1});
    CHECK(c2.k == 7);
    CHECK(c3.k == 5);
}

TEST_CASE("generator divides x^n + 1 and parity is bounded by m t") {
    for (int t : {1, 2, 5, 16, 32}) {
        const auto code = bch_build(1060, t);
        Poly xn1(code.n + 1, 0);
        xn1[0] = xn1[code.n] = 1;
        CHECK(is_zero(poly_rem(xn1, to_poly(code.generator))));
        CHECK(code.parity() <= code.m * t);
        CHECK(code.key_len == 1060);
        CHECK(code.length() == 1060 + code.parity());
    }
    CHECK(bch_build(1060, 1).parity() == 11);
    const auto c32 = bch_build(1060, 32);
    CHECK(c32.m == 11);
    CHECK(c32.parity() == 352);
    CHECK_THROWS_AS(bch_build_with_m(1060, 32, 10), ConfigError);
    CHECK_THROWS_AS(bch_build(1060, 0), ConfigError);
}

TEST_CASE("bch_encode: systematic, divisible by g, linear") {
    std::mt19937_64 rng(1);
    const auto code = bch_build(1060, 32);
    const auto a = random_bits(1060, rng), b = random_bits(1060, rng);
    const auto ca = bch_encode(code, a), cb = bch_encode(code, b);
    CHECK(ca.size() == static_cast<std::size_t>(code.length()));
    CHECK(ca.slice(0, 1060) == a);
    CHECK(is_zero(poly_rem(codeword_poly(ca), to_poly(code.generator))));
    BitVector ab = a, cab = ca;
    for (std::size_t i = 0; i < ab.size(); ++i) ab.set(i, a.get(i) != b.get(i));
    for (std::size_t i = 0; i < cab.size(); ++i) cab.set(i, ca.get(i) != cb.get(i));
    CHECK(bch_encode(code, ab) == cab);
    CHECK_THROWS_AS(bch_encode(code, random_bits(100, rng)), InputError);
}

TEST_CASE("bch_decode: random trials up to t errors") {
    std::mt19937_64 rng(2);
    struct Case {
        int key_len, t, trials;
    };
    for (const Case c : {Case{7, 2, 2000}, Case{64, 5, 3000}, Case{1060, 32, 300}, Case{1060, 8, 500}}) {
        const auto code = bch_build(c.key_len, c.t);
        for (int trial = 0; trial < c.trials; ++trial) {
            const auto msg = random_bits(static_cast<std::size_t>(c.key_len), rng);
            const auto cw = bch_encode(code, msg);
            const int w = static_cast<int>(rng() % static_cast<unsigned>(c.t + 1));
            BitVector rx = cw;
            auto pos = error_positions(code.length(), w, rng);
            for (int p : pos) rx.flip(static_cast<std::size_t>(p));
            const auto d = bch_decode(code, rx);
            REQUIRE(d.ok);
            CHECK(d.message == msg);
            CHECK(d.codeword == cw);
            CHECK(d.errors == w);
            std::sort(pos.begin(), pos.end());
            auto got = d.positions;
            std::sort(got.begin(), got.end());
            CHECK(got == pos);
        }
    }
}

TEST_CASE("bch_decode: t+1 errors never reproduce the original silently") {
    std::mt19937_64 rng(3);
    const auto code = bch_build(64, 5);
    int failures = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const auto msg = random_bits(64, rng);
        const auto cw = bch_encode(code, msg);
        BitVector rx = cw;
        for (int p : error_positions(code.length(), 6, rng)) rx.flip(static_cast<std::size_t>(p));
        const auto d = bch_decode(code, rx);
        if (!d.ok) {
            ++failures;
            continue;
        }
        // a miscorrection lands on another codeword at distance <= t from rx
        CHECK(d.message != msg);
        CHECK(is_zero(poly_rem(codeword_poly(d.codeword), to_poly(code.generator))));
    }
    CHECK(failures > 1000);
}

TEST_CASE("gf2_poly_mod agrees with the reference remainder") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::uint8_t> a(1 + rng() % 60), b(1 + rng() % 20);
        for (auto& v : a) v = rng() & 1;
        for (auto& v : b) v = rng() & 1;
        b.back() = 1;
        auto r = to_poly(gf2_poly_mod(a, b));
        auto ref = poly_rem(to_poly(a), to_poly(b));
        r.resize(std::max(r.size(), ref.size()), 0);
        ref.resize(r.size(), 0);
        CHECK(r == ref);
    }
}
