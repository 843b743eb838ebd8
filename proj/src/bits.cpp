#include "npuf/bits.hpp"

#include <bit>

#include "npuf/errors.hpp"

namespace npuf {

BitVector::BitVector(std::size_t n, bool value)
    : words_((n + 63) / 64, value ? ~std::uint64_t{0} : 0), size_(n) {
    if (value && (n & 63)) words_.back() &= (std::uint64_t{1} << (n & 63)) - 1;
}

BitVector BitVector::from_string(std::string_view s01) {
    BitVector out;
    for (char c : s01) {
        if (c == '0' || c == '1')
            out.push_back(c == '1');
        else if (c != ' ' && c != '\n' && c != '\r' && c != '\t')
            throw InputError(std::string("invalid bit character '") + c + "'");
    }
    return out;
}

BitVector BitVector::from_bytes_msb(const std::vector<std::uint8_t>& bytes, std::size_t n_bits) {
    if (n_bits > bytes.size() * 8) throw InputError("bit count exceeds byte payload");
    BitVector out(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i)
        if ((bytes[i >> 3] >> (7 - (i & 7))) & 1u) out.set(i, true);
    return out;
}

void BitVector::set(std::size_t i, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v)
        words_[i >> 6] |= mask;
    else
        words_[i >> 6] &= ~mask;
}

void BitVector::push_back(bool v) {
    if ((size_ & 63) == 0) words_.push_back(0);
    ++size_;
    set(size_ - 1, v);
}

void BitVector::append(const BitVector& other) {
    for (std::size_t i = 0; i < other.size_; ++i) push_back(other.get(i));
}

std::size_t BitVector::popcount() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::size_t BitVector::hamming(const BitVector& other) const {
    if (other.size_ != size_) throw InputError("hamming distance needs equal lengths");
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
        n += static_cast<std::size_t>(std::popcount(words_[i] ^ other.words_[i]));
    return n;
}

BitVector BitVector::slice(std::size_t begin, std::size_t len) const {
    if (begin + len > size_) throw InputError("slice out of range");
    BitVector out(len);
    for (std::size_t i = 0; i < len; ++i)
        if (get(begin + i)) out.set(i, true);
    return out;
}

std::string BitVector::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

std::vector<std::uint8_t> BitVector::to_bytes_msb() const {
    std::vector<std::uint8_t> out((size_ + 7) / 8, 0);
    for (std::size_t i = 0; i < size_; ++i)
        if (get(i)) out[i >> 3] |= static_cast<std::uint8_t>(0x80u >> (i & 7));
    return out;
}

std::vector<int> BitVector::to_ints() const {
    std::vector<int> out(size_);
    for (std::size_t i = 0; i < size_; ++i) out[i] = get(i) ? 1 : 0;
    return out;
}

}  // namespace npuf
