#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace npuf {

// Packed, growable bit string. Bit i lives in word i/64, position i%64.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n, bool value = false);

    static BitVector from_string(std::string_view s01);
    static BitVector from_bytes_msb(const std::vector<std::uint8_t>& bytes, std::size_t n_bits);

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v);
    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
    void push_back(bool v);
    void append(const BitVector& other);

    std::size_t popcount() const;
    // Number of differing positions; sizes must match.
    std::size_t hamming(const BitVector& other) const;

    BitVector slice(std::size_t begin, std::size_t len) const;
    std::string to_string() const;
    std::vector<std::uint8_t> to_bytes_msb() const;
    std::vector<int> to_ints() const;

    bool operator==(const BitVector& o) const { return size_ == o.size_ && words_ == o.words_; }

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

}  // namespace npuf
