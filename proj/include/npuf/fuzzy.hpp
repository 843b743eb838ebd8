#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "npuf/bch.hpp"
#include "npuf/bits.hpp"

namespace npuf {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(const std::vector<std::uint8_t>& data);
std::string to_hex(const Digest& d);
Digest digest_from_hex(const std::string& hex);
// SHA-256 over the bit length (8 bytes, big endian) followed by the packed key.
Digest key_digest(const BitVector& key);

// Public helper data. t = 0 means no code: only the digest is checked.
struct HelperData {
    int key_len = 0;
    int t = 0;
    int m = 0;
    BitVector parity;
    Digest digest{};

    int parity_bits() const { return static_cast<int>(parity.size()); }
};

enum class ReconstructStatus { Accepted, Uncorrectable, DigestMismatch };
std::string to_string(ReconstructStatus s);

struct Reconstruction {
    ReconstructStatus status = ReconstructStatus::Uncorrectable;
    BitVector key;      // valid only when accepted
    int corrected = 0;  // bit flips repaired by the decoder
    bool accepted() const { return status == ReconstructStatus::Accepted; }
};

HelperData enroll(const BitVector& key, int t);
HelperData enroll(const BitVector& key, const BchCode& code);
Reconstruction reconstruct(const HelperData& helper, const BitVector& noisy_key);

struct EccSweepRow {
    int t = 0;
    int m = 0;
    int parity_bits = 0;
    double intra_corrected = 0.0;  // fraction of intra re-responses reconstructed exactly
    double inter_accepted = 0.0;   // fraction of other-challenge keys accepted
};

// enrolled: reference key; intra: noisy repeats of the same challenge; inter: keys of other challenges.
std::vector<EccSweepRow> ecc_sweep(const BitVector& enrolled, const std::vector<BitVector>& intra,
                                   const std::vector<BitVector>& inter, const std::vector<int>& t_values,
                                   unsigned jobs = 1);

}  // namespace npuf
