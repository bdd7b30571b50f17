#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "qir/errors.hpp"

namespace qir {

/// Polynomial over GF(2), bit i of the word array = coefficient of x^i.
class Gf2Poly {
public:
    Gf2Poly() = default;

    static Gf2Poly zero() { return Gf2Poly{}; }

    static Gf2Poly x() { return from_exponents({1}); }

    static Gf2Poly from_exponents(std::initializer_list<int> exps) {
        Gf2Poly p;
        for (int e : exps) p.set(e);
        return p;
    }

    // Low 64 coefficients from a mask, e.g. 0b1011 = x^3 + x + 1.
    static Gf2Poly from_mask(std::uint64_t mask) {
        Gf2Poly p;
        if (mask) p.w_.push_back(mask);
        p.trim();
        return p;
    }

    bool is_zero() const { return w_.empty(); }

    int degree() const {
        if (w_.empty()) return -1;
        std::uint64_t top = w_.back();
        int b = 63;
        while (((top >> b) & 1u) == 0) --b;
        return static_cast<int>((w_.size() - 1) * 64) + b;
    }

    bool get(int i) const {
        std::size_t wi = static_cast<std::size_t>(i) / 64;
        if (wi >= w_.size()) return false;
        return (w_[wi] >> (i % 64)) & 1u;
    }

    void set(int i) {
        std::size_t wi = static_cast<std::size_t>(i) / 64;
        if (wi >= w_.size()) w_.resize(wi + 1, 0);
        w_[wi] |= 1ull << (i % 64);
    }

    Gf2Poly& operator^=(const Gf2Poly& o) {
        if (o.w_.size() > w_.size()) w_.resize(o.w_.size(), 0);
        for (std::size_t i = 0; i < o.w_.size(); ++i) w_[i] ^= o.w_[i];
        trim();
        return *this;
    }

    friend Gf2Poly operator^(Gf2Poly a, const Gf2Poly& b) { return a ^= b; }

    bool operator==(const Gf2Poly&) const = default;

    Gf2Poly shifted_left(int k) const {
        if (is_zero() || k == 0) return *this;
        Gf2Poly r;
        int words = k / 64, bits = k % 64;
        r.w_.assign(w_.size() + words + 1, 0);
        for (std::size_t i = 0; i < w_.size(); ++i) {
            r.w_[i + words] ^= w_[i] << bits;
            if (bits) r.w_[i + words + 1] ^= w_[i] >> (64 - bits);
        }
        r.trim();
        return r;
    }

    Gf2Poly mod(const Gf2Poly& p) const {
        if (p.is_zero()) throw ParameterError("Gf2Poly::mod: zero modulus");
        Gf2Poly r = *this;
        int dp = p.degree();
        for (int d = r.degree(); d >= dp; d = r.degree()) r ^= p.shifted_left(d - dp);
        return r;
    }

    Gf2Poly mulmod(const Gf2Poly& b, const Gf2Poly& p) const {
        Gf2Poly acc;
        Gf2Poly shifted = this->mod(p);
        for (int i = 0, db = b.degree(); i <= db; ++i) {
            if (b.get(i)) acc ^= shifted;
            shifted = shifted.shifted_left(1).mod(p);
        }
        return acc;
    }

    static Gf2Poly gcd(Gf2Poly a, Gf2Poly b) {
        while (!b.is_zero()) {
            Gf2Poly r = a.mod(b);
            a = b;
            b = r;
        }
        return a;
    }

private:
    void trim() {
        while (!w_.empty() && w_.back() == 0) w_.pop_back();
    }

    std::vector<std::uint64_t> w_;  // little-endian 64-bit limbs
};

// x^(2^e) mod p, by e successive squarings of x.
inline Gf2Poly x_pow_pow2_mod(int e, const Gf2Poly& p) {
    Gf2Poly t = Gf2Poly::x().mod(p);
    for (int i = 0; i < e; ++i) t = t.mulmod(t, p);
    return t;
}

}  // namespace qir
