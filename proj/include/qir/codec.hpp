#pragma once

#include <bit>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <utility>
#include <vector>

#include "qir/bits.hpp"
#include "qir/errors.hpp"

namespace qir {

using BigInt = boost::multiprecision::cpp_int;

/// A [n, n-k, 3] binary Hamming code, n = 2^k - 1. Bit positions are
/// 1-based; parity-check column j is the k-bit binary expansion of j with
/// s_1 as the most significant syndrome bit, so a syndrome's binary value
/// is directly the position of a single error. Check bits live at the
/// power-of-two positions, information bits at the rest.
struct CodeParams {
    int k_chk = 0;                        // check bits per block
    int n = 0;                            // block length, 2^k_chk - 1
    int k_info = 0;                       // information bits per block, n - k_chk
    std::vector<int> check_positions;     // 1-based: {1, 2, 4, ..., 2^(k_chk-1)}
    std::vector<int> info_positions;      // 1-based, ascending
    std::vector<BitVec> generator;        // k_info x n over GF(2)
    std::vector<BitVec> parity_check;     // k_chk x n over GF(2)

    // One guaranteed-correctable error per block, as a per-bit fraction.
    // This is the 1/n figure sometimes quoted as the code's correction
    // ability; the threshold that matters for concatenation planning is
    // the stricter 2/(3(n-1)) one in the analysis module.
    double correctable_fraction() const { return 1.0 / n; }
};

inline constexpr int kMinCheckBits = 2;
inline constexpr int kMaxCheckBits = 12;

inline CodeParams build_code(int k_chk) {
    if (k_chk < kMinCheckBits || k_chk > kMaxCheckBits)
        throw ParameterError("build_code: k_chk must be in [2, 12], got " + std::to_string(k_chk));

    CodeParams code;
    code.k_chk = k_chk;
    code.n = (1 << k_chk) - 1;
    code.k_info = code.n - k_chk;

    for (int t = 0; t < k_chk; ++t) code.check_positions.push_back(1 << t);
    for (int pos = 1; pos <= code.n; ++pos)
        if ((pos & (pos - 1)) != 0) code.info_positions.push_back(pos);

    // H column j = binary(j), row 0 holding the most significant bit.
    code.parity_check.assign(k_chk, BitVec(code.n, 0));
    for (int pos = 1; pos <= code.n; ++pos)
        for (int r = 0; r < k_chk; ++r)
            code.parity_check[r][pos - 1] = static_cast<std::uint8_t>((pos >> (k_chk - 1 - r)) & 1);

    // Row r encodes the unit info word at info position q: a 1 at q plus
    // check bits equal to binary(q), which makes every row orthogonal to H.
    // This is the systematic generator with its check columns moved into
    // the power-of-two positions.
    code.generator.assign(code.k_info, BitVec(code.n, 0));
    for (int r = 0; r < code.k_info; ++r) {
        int q = code.info_positions[r];
        code.generator[r][q - 1] = 1;
        for (int t = 0; t < k_chk; ++t)
            if ((q >> t) & 1) code.generator[r][(1 << t) - 1] = 1;
    }
    return code;
}

/// Syndrome as an integer in [0, n]: XOR of the 1-based positions of the
/// set bits. Zero iff the word is a codeword.
inline std::uint32_t syndrome_value(const CodeParams& code, const BitVec& word) {
    if (static_cast<int>(word.size()) != code.n)
        throw ParameterError("syndrome: word length " + std::to_string(word.size()) + " != n = " +
                             std::to_string(code.n));
    std::uint32_t v = 0;
    for (int i = 0; i < code.n; ++i)
        if (word[i]) v ^= static_cast<std::uint32_t>(i + 1);
    return v;
}

/// Syndrome bit vector (s_1 ... s_k), s_1 first.
inline BitVec syndrome(const CodeParams& code, const BitVec& word) {
    std::uint32_t v = syndrome_value(code, word);
    BitVec s(code.k_chk);
    for (int r = 0; r < code.k_chk; ++r)
        s[r] = static_cast<std::uint8_t>((v >> (code.k_chk - 1 - r)) & 1);
    return s;
}

inline BitVec encode(const CodeParams& code, const BitVec& info) {
    if (static_cast<int>(info.size()) != code.k_info)
        throw ParameterError("encode: info length " + std::to_string(info.size()) + " != k_info = " +
                             std::to_string(code.k_info));
    BitVec word(code.n, 0);
    for (int r = 0; r < code.k_info; ++r) word[code.info_positions[r] - 1] = info[r];
    std::uint32_t v = syndrome_value(code, word);
    for (int t = 0; t < code.k_chk; ++t)
        word[(1 << t) - 1] = static_cast<std::uint8_t>((v >> t) & 1);
    return word;
}

/// Flips the bit named by a nonzero syndrome. The result always has zero
/// syndrome; with two or more errors present it is a codeword other than
/// the transmitted one.
inline std::pair<BitVec, bool> correct_one(const CodeParams& code, const BitVec& word) {
    std::uint32_t v = syndrome_value(code, word);
    if (v == 0) return {word, false};
    BitVec out = word;
    out[v - 1] ^= 1;
    return {out, true};
}

/// Bits at the non-check positions, ascending. Accepts any n-bit word,
/// codeword or not.
inline BitVec extract_info(const CodeParams& code, const BitVec& word) {
    if (static_cast<int>(word.size()) != code.n)
        throw ParameterError("extract_info: word length != n");
    BitVec info(code.k_info);
    for (int r = 0; r < code.k_info; ++r) info[r] = word[code.info_positions[r] - 1];
    return info;
}

struct WeightDistribution {
    int n = 0;
    std::vector<BigInt> coefficients;  // A_0 ... A_n
};

inline bool is_hamming_length(int n) {
    return n >= 3 && ((n + 1) & n) == 0;  // n = 2^m - 1, m >= 2
}

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 0; i < k; ++i) {
        r *= (n - i);
        r /= (i + 1);
    }
    return r;
}

/// A_k = [ C(n,k) + n * (-1)^ceil(k/2) * C((n-1)/2, floor(k/2)) ] / (n+1),
/// in exact integer arithmetic. Each coefficient must divide out evenly;
/// a nonzero remainder means the formula or its inputs are wrong.
inline WeightDistribution weight_distribution_closed_form(int n) {
    if (!is_hamming_length(n))
        throw ParameterError("weight_distribution_closed_form: n must be 2^m - 1, m >= 2");
    WeightDistribution wd;
    wd.n = n;
    wd.coefficients.resize(n + 1);
    const int half = (n - 1) / 2;
    BigInt choose_n = 1;     // C(n, k), updated per k
    BigInt choose_half = 1;  // C(half, k/2)
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            choose_n = choose_n * (n - k + 1) / k;
            if (k % 2 == 0) choose_half = choose_half * (half - k / 2 + 1) / (k / 2);
        }
        BigInt alt = BigInt(n) * choose_half;
        if (((k + 1) / 2) % 2 != 0) alt = -alt;
        BigInt term = choose_n + alt;
        if (term % (n + 1) != 0)
            throw InternalError("weight_distribution_closed_form: non-integer A_" + std::to_string(k));
        BigInt a = term / (n + 1);
        if (a < 0)
            throw InternalError("weight_distribution_closed_form: negative A_" + std::to_string(k));
        wd.coefficients[k] = a;
    }
    return wd;
}

inline constexpr int kBruteforceInfoCap = 20;

/// Enumerates all 2^k_info codewords and histograms their weights.
inline WeightDistribution weight_distribution_bruteforce(const CodeParams& code) {
    if (code.k_info > kBruteforceInfoCap)
        throw ParameterError("weight_distribution_bruteforce: k_info > " +
                             std::to_string(kBruteforceInfoCap));
    // Pack generator rows into words; walk info space in Gray-code order so
    // each step XORs a single row.
    std::vector<std::uint64_t> rows(code.k_info, 0);
    for (int r = 0; r < code.k_info; ++r)
        for (int i = 0; i < code.n; ++i)
            if (code.generator[r][i]) rows[r] |= 1ull << i;

    WeightDistribution wd;
    wd.n = code.n;
    wd.coefficients.assign(code.n + 1, 0);
    std::uint64_t word = 0;
    wd.coefficients[0] += 1;
    const std::uint64_t total = 1ull << code.k_info;
    for (std::uint64_t i = 1; i < total; ++i) {
        int flip = std::countr_zero(i);  // Gray code: bit that changes at step i
        word ^= rows[flip];
        wd.coefficients[std::popcount(word)] += 1;
    }
    return wd;
}

}  // namespace qir
