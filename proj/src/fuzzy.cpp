#include "npuf/fuzzy.hpp"

#include <openssl/evp.h>

#include <cstdio>

#include "npuf/errors.hpp"
#include "npuf/seeding.hpp"

namespace npuf {

Digest sha256(const std::vector<std::uint8_t>& data) {
    Digest d{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), d.data(), &len, EVP_sha256(), nullptr) != 1 || len != d.size())
        throw std::runtime_error("SHA-256 computation failed");
    return d;
}

std::string to_hex(const Digest& d) {
    std::string s;
    char buf[3];
    for (auto b : d) {
        std::snprintf(buf, sizeof buf, "%02x", b);
        s += buf;
    }
    return s;
}

Digest digest_from_hex(const std::string& hex) {
    if (hex.size() != 64) throw FormatError("digest must be 64 hex characters");
    Digest d{};
    for (std::size_t i = 0; i < 32; ++i) d[i] = static_cast<std::uint8_t>(std::stoul(hex.substr(2 * i, 2), nullptr, 16));
    return d;
}

Digest key_digest(const BitVector& key) {
    std::vector<std::uint8_t> buf;
    const std::uint64_t n = key.size();
    for (int i = 7; i >= 0; --i) buf.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    const auto packed = key.to_bytes_msb();
    buf.insert(buf.end(), packed.begin(), packed.end());
    return sha256(buf);
}

std::string to_string(ReconstructStatus s) {
    switch (s) {
        case ReconstructStatus::Accepted: return "accepted";
        case ReconstructStatus::Uncorrectable: return "uncorrectable";
        case ReconstructStatus::DigestMismatch: return "digest_mismatch";
    }
    return "unknown";
}

HelperData enroll(const BitVector& key, const BchCode& code) {
    if (static_cast<int>(key.size()) != code.key_len) throw InputError("key length does not match the code");
    HelperData h;
    h.key_len = code.key_len;
    h.t = code.t;
    h.m = code.m;
    h.parity = bch_encode(code, key).slice(key.size(), static_cast<std::size_t>(code.parity()));
    h.digest = key_digest(key);
    return h;
}

HelperData enroll(const BitVector& key, int t) {
    if (t < 0) throw ConfigError("t must be non-negative");
    if (t > 0) return enroll(key, bch_build(static_cast<int>(key.size()), t));
    HelperData h;
    h.key_len = static_cast<int>(key.size());
    h.digest = key_digest(key);
    return h;
}

Reconstruction reconstruct(const HelperData& helper, const BitVector& noisy_key) {
    if (static_cast<int>(noisy_key.size()) != helper.key_len) throw InputError("key length does not match the helper data");
    Reconstruction r;
    BitVector candidate = noisy_key;
    if (helper.t > 0) {
        const BchCode code = bch_build_with_m(helper.key_len, helper.t, helper.m);
        if (code.parity() != helper.parity_bits()) throw FormatError("helper parity length does not match its code");
        BitVector word = noisy_key;
        word.append(helper.parity);
        const DecodeResult d = bch_decode(code, word);
        if (!d.ok) return r;
        candidate = d.message;
        r.corrected = d.errors;
    }
    if (key_digest(candidate) != helper.digest) {
        r.status = ReconstructStatus::DigestMismatch;
        return r;
    }
    r.status = ReconstructStatus::Accepted;
    r.key = std::move(candidate);
    return r;
}

std::vector<EccSweepRow> ecc_sweep(const BitVector& enrolled, const std::vector<BitVector>& intra,
                                   const std::vector<BitVector>& inter, const std::vector<int>& t_values,
                                   unsigned jobs) {
    std::vector<EccSweepRow> rows(t_values.size());
    for (std::size_t i = 0; i < t_values.size(); ++i) {
        const int t = t_values[i];
        const HelperData h = enroll(enrolled, t);
        std::vector<char> intra_ok(intra.size()), inter_ok(inter.size());
        parallel_for(intra.size(), jobs, [&](std::size_t j) { intra_ok[j] = reconstruct(h, intra[j]).accepted(); });
        parallel_for(inter.size(), jobs, [&](std::size_t j) { inter_ok[j] = reconstruct(h, inter[j]).accepted(); });
        auto frac = [](const std::vector<char>& v) {
            std::size_t n = 0;
            for (char c : v) n += c ? 1 : 0;
            return v.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(v.size());
        };
        rows[i] = {t, h.m, h.parity_bits(), frac(intra_ok), frac(inter_ok)};
    }
    return rows;
}

}  // namespace npuf
