#pragma once

#include <cstdint>
#include <vector>

#include "npuf/bits.hpp"

namespace npuf {

// GF(2^m) with log/antilog tables.
class GaloisField {
public:
    explicit GaloisField(int m);

    int m() const { return m_; }
    int order() const { return n_; }  // 2^m - 1
    std::uint32_t primitive_poly() const { return prim_; }

    std::uint32_t exp(int i) const { return exp_[static_cast<std::size_t>(((i % n_) + n_) % n_)]; }
    int log(std::uint32_t a) const { return log_[a]; }
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
        return (a && b) ? exp_[static_cast<std::size_t>(log_[a] + log_[b])] : 0;
    }
    std::uint32_t div(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t inv(std::uint32_t a) const { return div(1, a); }
    std::uint32_t pow_alpha(long long e) const { return exp(static_cast<int>(((e % n_) + n_) % n_)); }

private:
    int m_, n_;
    std::uint32_t prim_;
    std::vector<std::uint32_t> exp_;  // doubled so mul needs no modulo
    std::vector<int> log_;
};

// Narrow-sense binary BCH code, shortened so the message is exactly key_len bits.
struct BchCode {
    int m = 0;
    int n = 0;             // natural length 2^m - 1
    int k = 0;             // natural message length
    int t = 0;
    int key_len = 0;       // shortened message length
    int shortening = 0;    // k - key_len
    std::vector<std::uint8_t> generator;  // coefficients, index = power

    int parity() const { return n - k; }
    int length() const { return key_len + parity(); }  // shortened codeword length
};

struct DecodeResult {
    bool ok = false;
    BitVector message;
    BitVector codeword;
    int errors = 0;
    std::vector<int> positions;  // corrected indices in the shortened codeword
};

BchCode bch_build(int key_len, int t);
// Builds for a fixed field degree; throws if the shortened code does not fit.
BchCode bch_build_with_m(int key_len, int t, int m);

// Codeword = message followed by parity (message * x^parity mod g).
BitVector bch_encode(const BchCode& code, const BitVector& message);
DecodeResult bch_decode(const BchCode& code, const BitVector& received);

// Polynomial remainder over GF(2); coefficients indexed by power.
std::vector<std::uint8_t> gf2_poly_mod(std::vector<std::uint8_t> a, const std::vector<std::uint8_t>& b);

}  // namespace npuf
