#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qir/errors.hpp"

namespace qir {

// One bit per element, value 0 or 1.
using BitVec = std::vector<std::uint8_t>;

inline BitVec operator^(const BitVec& a, const BitVec& b) {
    if (a.size() != b.size())
        throw ParameterError("xor: length mismatch (" + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    BitVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

inline std::size_t hamming_weight(const BitVec& v) {
    std::size_t w = 0;
    for (auto b : v) w += b;
    return w;
}

inline std::size_t hamming_distance(const BitVec& a, const BitVec& b) {
    if (a.size() != b.size()) throw ParameterError("hamming_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] ^ b[i];
    return d;
}

inline BitVec bits_from_string(const std::string& s) {
    BitVec v;
    v.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw ParameterError("bits_from_string: expected '0'/'1'");
        v.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return v;
}

inline std::string bits_to_string(const BitVec& v) {
    std::string s;
    s.reserve(v.size());
    for (auto b : v) s.push_back(b ? '1' : '0');
    return s;
}

// MSB-first bit packing. The final partial byte is zero-padded.
class BitWriter {
public:
    void put_bit(std::uint8_t b) {
        if (fill_ == 0) bytes_.push_back(0);
        if (b) bytes_.back() |= static_cast<std::uint8_t>(1u << (7 - fill_));
        fill_ = (fill_ + 1) & 7;
        ++nbits_;
    }

    void put_bits(std::uint64_t value, int width) {
        for (int i = width - 1; i >= 0; --i) put_bit(static_cast<std::uint8_t>((value >> i) & 1u));
    }

    void put_bitvec(const BitVec& v) {
        for (auto b : v) put_bit(b);
    }

    std::size_t bit_count() const { return nbits_; }
    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
    int fill_ = 0;
    std::size_t nbits_ = 0;
};

class BitReader {
public:
    BitReader(const std::uint8_t* data, std::size_t nbits) : data_(data), nbits_(nbits) {}

    std::uint8_t get_bit() {
        if (pos_ >= nbits_) throw ParameterError("BitReader: read past end");
        std::uint8_t b = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return b;
    }

    std::uint64_t get_bits(int width) {
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v = (v << 1) | get_bit();
        return v;
    }

    BitVec get_bitvec(std::size_t count) {
        BitVec v(count);
        for (std::size_t i = 0; i < count; ++i) v[i] = get_bit();
        return v;
    }

    std::size_t remaining() const { return nbits_ - pos_; }

private:
    const std::uint8_t* data_;
    std::size_t nbits_;
    std::size_t pos_ = 0;
};

}  // namespace qir
