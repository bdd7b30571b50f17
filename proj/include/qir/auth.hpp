#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "qir/bits.hpp"
#include "qir/errors.hpp"
#include "qir/gf2poly.hpp"

namespace qir {

/// Rabin test: p of degree d is irreducible over GF(2) iff
/// x^(2^d) == x (mod p) and gcd(x^(2^(d/q)) - x, p) = 1 for every prime
/// divisor q of d.
inline bool is_irreducible(const Gf2Poly& poly) {
    if (poly.is_zero()) throw ParameterError("is_irreducible: zero polynomial");
    int d = poly.degree();
    if (d < 1) return false;  // nonzero constants are units
    if (d == 1) return true;

    if (x_pow_pow2_mod(d, poly) != Gf2Poly::x().mod(poly)) return false;

    int rem = d;
    for (int q = 2; q * q <= rem; ++q) {
        if (rem % q != 0) continue;
        while (rem % q == 0) rem /= q;
        Gf2Poly t = x_pow_pow2_mod(d / q, poly) ^ Gf2Poly::x().mod(poly);
        if (Gf2Poly::gcd(t, poly).degree() != 0) return false;
    }
    if (rem > 1) {  // remaining prime factor
        Gf2Poly t = x_pow_pow2_mod(d / rem, poly) ^ Gf2Poly::x().mod(poly);
        if (Gf2Poly::gcd(t, poly).degree() != 0) return false;
    }
    return true;
}

/// Default tag polynomial: x^64 + x^4 + x^3 + x + 1, irreducible of
/// degree 64 (a unit test re-derives this via is_irreducible).
inline Gf2Poly default_mac_poly_64() {
    return Gf2Poly::from_exponents({64, 4, 3, 1, 0});
}

/// One-time-pad CRC MAC key. otp_K may authenticate exactly one message;
/// mac_tag flips `consumed` and refuses a second use.
struct MacKey {
    Gf2Poly poly_p;  // irreducible, degree m >= 2
    BitVec otp_K;    // m bits
    bool consumed = false;

    MacKey(Gf2Poly poly, BitVec otp) : poly_p(std::move(poly)), otp_K(std::move(otp)) {
        int m = poly_p.degree();
        if (m < 2) throw ParameterError("MacKey: polynomial degree must be >= 2");
        if (static_cast<int>(otp_K.size()) != m)
            throw ParameterError("MacKey: one-time pad must be " + std::to_string(m) + " bits");
        if (!is_irreducible(poly_p)) throw ParameterError("MacKey: polynomial is not irreducible");
    }

    int m() const { return poly_p.degree(); }
};

struct Tag {
    BitVec aut;  // m bits, coefficient of x^(m-1) first
};

class KeyReuseError : public std::logic_error {
public:
    KeyReuseError() : std::logic_error("MAC key already consumed; one-time-pad keys are single-use") {}
};

namespace detail {

// m-bit remainder register. Feeding bit b advances the message polynomial
// by one degree: R <- R*x + b*x^m (mod p).
class CrcRegister {
public:
    explicit CrcRegister(const Gf2Poly& p) : m_(p.degree()) {
        // q = p - x^m, i.e. x^m reduced mod p.
        Gf2Poly q = p;
        Gf2Poly top;
        top.set(m_);
        q ^= top;
        use_fast_ = m_ <= 64;
        if (use_fast_) {
            q64_ = 0;
            for (int i = 0; i < m_; ++i)
                if (q.get(i)) q64_ |= 1ull << i;
            mask64_ = (m_ == 64) ? ~0ull : ((1ull << m_) - 1);
        } else {
            q_ = q;
        }
    }

    void feed(std::uint8_t bit) {
        if (use_fast_) {
            std::uint64_t carry = (r64_ >> (m_ - 1)) & 1u;
            r64_ = (r64_ << 1) & mask64_;
            if (carry) r64_ ^= q64_;
            if (bit) r64_ ^= q64_;
        } else {
            bool carry = r_.get(m_ - 1);
            r_ = r_.shifted_left(1);
            if (carry) {
                Gf2Poly top;
                top.set(m_);
                r_ ^= top;
                r_ ^= q_;
            }
            if (bit) r_ ^= q_;
        }
    }

    void feed_byte(std::uint8_t byte) {
        for (int b = 7; b >= 0; --b) feed((byte >> b) & 1u);
    }

    BitVec digest() const {
        BitVec out(m_);
        if (use_fast_) {
            for (int i = 0; i < m_; ++i) out[i] = static_cast<std::uint8_t>((r64_ >> (m_ - 1 - i)) & 1u);
        } else {
            for (int i = 0; i < m_; ++i) out[i] = r_.get(m_ - 1 - i) ? 1 : 0;
        }
        return out;
    }

private:
    int m_;
    bool use_fast_;
    std::uint64_t r64_ = 0, q64_ = 0, mask64_ = 0;
    Gf2Poly r_, q_;
};

}  // namespace detail

/// h(M) = coef(M(x) * x^m mod p(x)). The message vector is given highest
/// coefficient first: element 0 is M_{n-1}, the coefficient of x^(n-1).
/// Output is m bits, coefficient of x^(m-1) first.
inline BitVec crc_hash(const BitVec& message, const Gf2Poly& poly_p) {
    if (message.empty()) throw ParameterError("crc_hash: empty message");
    if (poly_p.degree() < 1) throw ParameterError("crc_hash: polynomial degree must be >= 1");
    detail::CrcRegister reg(poly_p);
    for (auto b : message) reg.feed(b);
    return reg.digest();
}

/// Same hash over a byte string; bits are taken MSB-first, byte 0 first,
/// matching the packet wire order (first wire bit = highest coefficient).
inline BitVec crc_hash(std::span<const std::uint8_t> message, const Gf2Poly& poly_p) {
    if (message.empty()) throw ParameterError("crc_hash: empty message");
    if (poly_p.degree() < 1) throw ParameterError("crc_hash: polynomial degree must be >= 1");
    detail::CrcRegister reg(poly_p);
    for (auto byte : message) reg.feed_byte(byte);
    return reg.digest();
}

template <typename Message>
inline Tag mac_tag(const Message& message, MacKey& key) {
    if (key.consumed) throw KeyReuseError{};
    BitVec h = crc_hash(message, key.poly_p);
    key.consumed = true;
    return Tag{h ^ key.otp_K};
}

template <typename Message>
inline bool mac_verify(const Message& message, const Tag& tag, const MacKey& key) {
    if (tag.aut.size() != key.otp_K.size()) return false;
    BitVec expect = crc_hash(message, key.poly_p) ^ key.otp_K;
    // Constant-time over the tag length.
    std::uint8_t diff = 0;
    for (std::size_t i = 0; i < expect.size(); ++i) diff |= expect[i] ^ tag.aut[i];
    return diff == 0;
}

/// Successful-forgery probability bound (n + m) / 2^(m-1) for an n-bit
/// message and m-bit tag.
inline double forgery_bound(std::uint64_t msg_bits, int m) {
    if (m <= 1) throw ParameterError("forgery_bound: m must be > 1");
    return std::ldexp(static_cast<double>(msg_bits) + m, -(m - 1));
}

}  // namespace qir
