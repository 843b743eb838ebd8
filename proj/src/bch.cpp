#include "npuf/bch.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>

#include "npuf/errors.hpp"

namespace npuf {

namespace {

// Primitive polynomials of degree 2..16 (bit i = coefficient of x^i).
constexpr std::uint32_t kPrimitive[17] = {0,      0,      0x7,    0xB,    0x13,   0x25,   0x43,    0x89,   0x11D,
                                          0x211,  0x409,  0x805,  0x1053, 0x201B, 0x4443, 0x8003, 0x1100B};

const GaloisField& field(int m) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaloisField>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[m];
    if (!slot) slot = std::make_unique<GaloisField>(m);
    return *slot;
}

}  // namespace

GaloisField::GaloisField(int m) : m_(m), n_((1 << m) - 1) {
    if (m < 2 || m > 16) throw ConfigError("field degree must lie in [2, 16]");
    prim_ = kPrimitive[m];
    exp_.resize(static_cast<std::size_t>(2 * n_));
    log_.assign(static_cast<std::size_t>(n_ + 1), -1);
    std::uint32_t x = 1;
    for (int i = 0; i < n_; ++i) {
        if (log_[x] != -1) throw ConfigError("polynomial is not primitive for m = " + std::to_string(m));
        exp_[static_cast<std::size_t>(i)] = x;
        log_[x] = i;
        x <<= 1;
        if (x & (1u << m)) x ^= prim_;
    }
    for (int i = n_; i < 2 * n_; ++i) exp_[static_cast<std::size_t>(i)] = exp_[static_cast<std::size_t>(i - n_)];
}

std::uint32_t GaloisField::div(std::uint32_t a, std::uint32_t b) const {
    if (b == 0) throw NumericalError("division by zero in GF(2^m)");
    if (a == 0) return 0;
    return exp_[static_cast<std::size_t>((log_[a] - log_[b] + n_) % n_)];
}

std::vector<std::uint8_t> gf2_poly_mod(std::vector<std::uint8_t> a, const std::vector<std::uint8_t>& b) {
    int db = static_cast<int>(b.size()) - 1;
    while (db >= 0 && !b[static_cast<std::size_t>(db)]) --db;
    if (db < 0) throw NumericalError("polynomial division by zero");
    for (int i = static_cast<int>(a.size()) - 1; i >= db; --i) {
        if (!a[static_cast<std::size_t>(i)]) continue;
        for (int j = 0; j <= db; ++j) a[static_cast<std::size_t>(i - db + j)] ^= b[static_cast<std::size_t>(j)];
    }
    a.resize(static_cast<std::size_t>(std::max(db, 1)));
    return a;
}

BchCode bch_build_with_m(int key_len, int t, int m) {
    if (key_len < 1) throw ConfigError("key length must be positive");
    if (t < 1) throw ConfigError("t must be at least 1");
    const GaloisField& gf = field(m);
    const int n = gf.order();

    // generator = lcm of minimal polynomials of alpha^1 .. alpha^2t
    std::vector<std::uint8_t> g{1};
    std::set<int> covered;
    for (int i = 1; i <= 2 * t; ++i) {
        if (covered.count(i % n)) continue;
        std::vector<int> coset;
        for (int c = i % n; !covered.count(c); c = (2 * c) % n) {
            covered.insert(c);
            coset.push_back(c);
        }
        // product of (x + alpha^c) over the coset, in GF(2^m)
        std::vector<std::uint32_t> mp{1};
        for (int c : coset) {
            std::vector<std::uint32_t> next(mp.size() + 1, 0);
            const std::uint32_t root = gf.exp(c);
            for (std::size_t j = 0; j < mp.size(); ++j) {
                next[j + 1] ^= mp[j];
                next[j] ^= gf.mul(mp[j], root);
            }
            mp = std::move(next);
        }
        std::vector<std::uint8_t> prod(g.size() + mp.size() - 1, 0);
        for (std::size_t a = 0; a < g.size(); ++a) {
            if (!g[a]) continue;
            for (std::size_t b = 0; b < mp.size(); ++b) {
                if (mp[b] > 1) throw NumericalError("minimal polynomial is not binary");
                prod[a + b] ^= static_cast<std::uint8_t>(mp[b]);
            }
        }
        g = std::move(prod);
    }
    BchCode code;
    code.m = m;
    code.n = n;
    code.t = t;
    code.k = n - (static_cast<int>(g.size()) - 1);
    code.key_len = key_len;
    code.shortening = code.k - key_len;
    code.generator = std::move(g);
    if (code.k < key_len) throw ConfigError("BCH code with m = " + std::to_string(m) + " cannot carry the key");
    return code;
}

BchCode bch_build(int key_len, int t) {
    if (key_len < 1) throw ConfigError("key length must be positive");
    if (t < 1) throw ConfigError("t must be at least 1");
    for (int m = 2; m <= 16; ++m) {
        if ((1 << m) - 1 < key_len + m * t) continue;
        BchCode code = bch_build_with_m(key_len, t, m);
        if (code.k >= key_len) return code;
    }
    throw ConfigError("no BCH code with m <= 16 fits key_len = " + std::to_string(key_len) + ", t = " + std::to_string(t));
}

BitVector bch_encode(const BchCode& code, const BitVector& message) {
    if (static_cast<int>(message.size()) != code.key_len) throw InputError("message length does not match the code");
    const int p = code.parity();
    // LFSR division; reg[j] is the coefficient of x^j in the running remainder
    std::vector<std::uint8_t> reg(static_cast<std::size_t>(p), 0);
    for (int i = 0; i < code.key_len; ++i) {
        const std::uint8_t fb = static_cast<std::uint8_t>(message.get(static_cast<std::size_t>(i))) ^ reg[static_cast<std::size_t>(p - 1)];
        for (int j = p - 1; j > 0; --j)
            reg[static_cast<std::size_t>(j)] = reg[static_cast<std::size_t>(j - 1)] ^ (fb & code.generator[static_cast<std::size_t>(j)]);
        reg[0] = fb & code.generator[0];
    }
    BitVector cw = message;
    for (int j = p - 1; j >= 0; --j) cw.push_back(reg[static_cast<std::size_t>(j)]);
    return cw;
}

DecodeResult bch_decode(const BchCode& code, const BitVector& received) {
    const int len = code.length();
    if (static_cast<int>(received.size()) != len) throw InputError("received length does not match the code");
    const GaloisField& gf = field(code.m);
    const int t = code.t;

    // bit i is the coefficient of x^(len-1-i)
    std::vector<std::uint32_t> syn(static_cast<std::size_t>(2 * t + 1), 0);
    bool clean = true;
    for (int j = 1; j <= 2 * t; ++j) {
        std::uint32_t s = 0;
        for (int i = 0; i < len; ++i) {
            if (!received.get(static_cast<std::size_t>(i))) continue;
            s ^= gf.pow_alpha(static_cast<long long>(j) * (len - 1 - i));
        }
        syn[static_cast<std::size_t>(j)] = s;
        clean = clean && s == 0;
    }
    DecodeResult res;
    if (clean) {
        res.ok = true;
        res.codeword = received;
        res.message = received.slice(0, static_cast<std::size_t>(code.key_len));
        return res;
    }

    // Berlekamp-Massey
    std::vector<std::uint32_t> lambda{1}, prev{1};
    int L = 0, shift = 1;
    std::uint32_t prev_disc = 1;
    for (int r = 1; r <= 2 * t; ++r) {
        std::uint32_t d = syn[static_cast<std::size_t>(r)];
        for (int i = 1; i <= L && i < static_cast<int>(lambda.size()); ++i)
            d ^= gf.mul(lambda[static_cast<std::size_t>(i)], syn[static_cast<std::size_t>(r - i)]);
        if (d == 0) {
            ++shift;
            continue;
        }
        const std::uint32_t coef = gf.div(d, prev_disc);
        std::vector<std::uint32_t> next = lambda;
        if (next.size() < prev.size() + static_cast<std::size_t>(shift)) next.resize(prev.size() + static_cast<std::size_t>(shift), 0);
        for (std::size_t i = 0; i < prev.size(); ++i) next[i + static_cast<std::size_t>(shift)] ^= gf.mul(coef, prev[i]);
        if (2 * L <= r - 1) {
            prev = lambda;
            L = r - L;
            prev_disc = d;
            shift = 1;
        } else {
            ++shift;
        }
        lambda = std::move(next);
    }
    while (lambda.size() > 1 && lambda.back() == 0) lambda.pop_back();
    const int degree = static_cast<int>(lambda.size()) - 1;
    if (degree != L || L > t) return res;

    // Chien search over the shortened positions only
    BitVector corrected = received;
    for (int i = 0; i < len; ++i) {
        const long long e = -(static_cast<long long>(len) - 1 - i);
        std::uint32_t v = 0;
        for (int j = 0; j <= degree; ++j) v ^= gf.mul(lambda[static_cast<std::size_t>(j)], gf.pow_alpha(e * j));
        if (v == 0) {
            res.positions.push_back(i);
            corrected.flip(static_cast<std::size_t>(i));
        }
    }
    if (static_cast<int>(res.positions.size()) != L) {
        res.positions.clear();
        return res;
    }
    res.ok = true;
    res.errors = L;
    res.codeword = corrected;
    res.message = corrected.slice(0, static_cast<std::size_t>(code.key_len));
    return res;
}

}  // namespace npuf
