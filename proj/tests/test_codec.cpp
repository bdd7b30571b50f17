#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "qir/codec.hpp"
#include "qir/rng.hpp"

using namespace qir;

namespace {

// Independent oracle: all n-bit words with zero syndrome, via direct
// enumeration of the parity-check null space.
std::set<std::string> null_space_words(const CodeParams& code) {
    std::set<std::string> words;
    for (std::uint64_t w = 0; w < (1ull << code.n); ++w) {
        BitVec v(code.n);
        for (int i = 0; i < code.n; ++i) v[i] = (w >> i) & 1;
        std::uint32_t s = 0;
        for (int r = 0; r < code.k_chk; ++r) {
            std::uint8_t bit = 0;
            for (int i = 0; i < code.n; ++i) bit ^= code.parity_check[r][i] & v[i];
            s = (s << 1) | bit;
        }
        if (s == 0) words.insert(bits_to_string(v));
    }
    return words;
}

// Independent route to the weight distribution: expand
// [(1+z)^n + n (1+z)^((n-1)/2) (1-z)^((n+1)/2)] / (n+1)
// with exact big-integer polynomial arithmetic.
std::vector<BigInt> weights_from_enumerator(int n) {
    auto mul = [](const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
        std::vector<BigInt> c(a.size() + b.size() - 1);
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
        return c;
    };
    auto poly_pow = [&](std::vector<BigInt> base, int e) {
        std::vector<BigInt> acc{1};
        for (int i = 0; i < e; ++i) acc = mul(acc, base);
        return acc;
    };
    std::vector<BigInt> one_plus{1, 1}, one_minus{1, -1};
    std::vector<BigInt> lhs = poly_pow(one_plus, n);
    std::vector<BigInt> rhs = mul(poly_pow(one_plus, (n - 1) / 2), poly_pow(one_minus, (n + 1) / 2));
    std::vector<BigInt> out(n + 1);
    for (int k = 0; k <= n; ++k) {
        BigInt num = lhs[k] + BigInt(n) * rhs[k];
        REQUIRE(num % (n + 1) == 0);
        out[k] = num / (n + 1);
    }
    return out;
}

}  // namespace

TEST_CASE("build_code dimensions and positions", "[codec]") {
    CodeParams c7 = build_code(3);
    CHECK(c7.n == 7);
    CHECK(c7.k_info == 4);
    CHECK(c7.check_positions == std::vector<int>{1, 2, 4});
    CHECK(c7.info_positions == std::vector<int>{3, 5, 6, 7});

    CodeParams c15 = build_code(4);
    CHECK(c15.n == 15);
    CHECK(c15.k_info == 11);
    CHECK(c15.check_positions == std::vector<int>{1, 2, 4, 8});

    CodeParams c3 = build_code(2);
    CHECK(c3.n == 3);
    CHECK(c3.k_info == 1);
    CHECK(c15.correctable_fraction() == Catch::Approx(1.0 / 15));

    CHECK_THROWS_AS(build_code(1), ParameterError);
    CHECK_THROWS_AS(build_code(13), ParameterError);
}

TEST_CASE("parity-check columns count in binary and G H^T = 0", "[codec]") {
    for (int k = 2; k <= 12; ++k) {
        CodeParams code = build_code(k);
        // column j = binary(j): every nonzero pattern appears exactly once
        std::set<int> seen;
        for (int j = 1; j <= code.n; ++j) {
            int v = 0;
            for (int r = 0; r < k; ++r) v = (v << 1) | code.parity_check[r][j - 1];
            CHECK(v == j);
            seen.insert(v);
        }
        CHECK(static_cast<int>(seen.size()) == code.n);

        for (int r = 0; r < code.k_info; ++r) {
            for (int s = 0; s < code.k_chk; ++s) {
                std::uint8_t dot = 0;
                for (int i = 0; i < code.n; ++i) dot ^= code.generator[r][i] & code.parity_check[s][i];
                REQUIRE(dot == 0);
            }
        }
    }
}

TEST_CASE("encode basics", "[codec]") {
    CodeParams code = build_code(3);
    CHECK(encode(code, bits_from_string("0000")) == bits_from_string("0000000"));
    CHECK(encode(code, bits_from_string("1111")) == bits_from_string("1111111"));
    CHECK_THROWS_AS(encode(code, bits_from_string("00000")), ParameterError);
}

TEST_CASE("encode matches the parity-check null space exhaustively", "[codec]") {
    CodeParams code = build_code(3);
    std::set<std::string> expected = null_space_words(code);
    std::set<std::string> got;
    for (int w = 0; w < 16; ++w) {
        BitVec info(4);
        for (int i = 0; i < 4; ++i) info[i] = (w >> i) & 1;
        BitVec cw = encode(code, info);
        CHECK(syndrome_value(code, cw) == 0);
        CHECK(extract_info(code, cw) == info);
        got.insert(bits_to_string(cw));
    }
    CHECK(got == expected);
    CHECK(got.size() == 16);
}

TEST_CASE("syndrome names the flipped position", "[codec]") {
    CodeParams code = build_code(3);
    BitVec cw = encode(code, bits_from_string("1011"));
    CHECK(syndrome_value(code, cw) == 0);
    CHECK(syndrome(code, cw) == bits_from_string("000"));

    BitVec flipped = cw;
    flipped[4] ^= 1;  // position 5
    CHECK(syndrome_value(code, flipped) == 5);
    CHECK(syndrome(code, flipped) == bits_from_string("101"));

    BitVec two = cw;
    two[2] ^= 1;  // position 3
    two[4] ^= 1;  // position 5
    CHECK(syndrome_value(code, two) == (3u ^ 5u));

    CHECK_THROWS_AS(syndrome(code, bits_from_string("000")), ParameterError);
}

TEST_CASE("correct_one fixes every single error", "[codec]") {
    for (int k : {3, 4}) {
        CodeParams code = build_code(k);
        CounterRng rng(11, k);
        for (int trial = 0; trial < 50; ++trial) {
            BitVec cw = encode(code, rng.random_bits(code.k_info));
            auto [same, corrected] = correct_one(code, cw);
            CHECK(same == cw);
            CHECK_FALSE(corrected);
            for (int j = 0; j < code.n; ++j) {
                BitVec noisy = cw;
                noisy[j] ^= 1;
                auto [fixed, did] = correct_one(code, noisy);
                REQUIRE(did);
                REQUIRE(fixed == cw);
            }
        }
    }
}

TEST_CASE("correct_one on two errors lands three away", "[codec]") {
    CodeParams code = build_code(3);
    for (int w = 0; w < 16; ++w) {
        BitVec info(4);
        for (int i = 0; i < 4; ++i) info[i] = (w >> i) & 1;
        BitVec cw = encode(code, info);
        for (int a = 0; a < 7; ++a) {
            for (int b = a + 1; b < 7; ++b) {
                BitVec noisy = cw;
                noisy[a] ^= 1;
                noisy[b] ^= 1;
                auto [fixed, did] = correct_one(code, noisy);
                REQUIRE(did);
                REQUIRE(syndrome_value(code, fixed) == 0);
                REQUIRE(hamming_distance(fixed, cw) == 3);
            }
        }
    }

    // sampled at n=15
    CodeParams c15 = build_code(4);
    CounterRng rng(7, 0);
    for (int trial = 0; trial < 200; ++trial) {
        BitVec cw = encode(c15, rng.random_bits(11));
        int a = static_cast<int>(rng.next() % 15);
        int b = static_cast<int>(rng.next() % 15);
        if (a == b) continue;
        BitVec noisy = cw;
        noisy[a] ^= 1;
        noisy[b] ^= 1;
        auto [fixed, did] = correct_one(c15, noisy);
        REQUIRE(did);
        REQUIRE(hamming_distance(fixed, cw) == 3);
    }
}

TEST_CASE("extract_info", "[codec]") {
    CodeParams code = build_code(3);
    CHECK(extract_info(code, bits_from_string("1111111")) == bits_from_string("1111"));
    CHECK(extract_info(code, bits_from_string("0000000")) == bits_from_string("0000"));
    CHECK_THROWS_AS(extract_info(code, bits_from_string("101")), ParameterError);
}

TEST_CASE("weight distribution closed form", "[codec]") {
    WeightDistribution w7 = weight_distribution_closed_form(7);
    CHECK(w7.coefficients == std::vector<BigInt>{1, 0, 0, 7, 7, 0, 0, 1});

    WeightDistribution w15 = weight_distribution_closed_form(15);
    std::vector<BigInt> expect15{1, 0, 0, 35, 105, 168, 280, 435, 435, 280, 168, 105, 35, 0, 0, 1};
    CHECK(w15.coefficients == expect15);
    BigInt sum = 0;
    for (const auto& a : w15.coefficients) sum += a;
    CHECK(sum == 2048);

    CHECK(weight_distribution_closed_form(3).coefficients == std::vector<BigInt>{1, 0, 0, 1});
    CHECK_THROWS_AS(weight_distribution_closed_form(8), ParameterError);
    CHECK_THROWS_AS(weight_distribution_closed_form(2), ParameterError);
}

TEST_CASE("closed form vs brute force vs enumerator expansion", "[codec]") {
    // brute force is capped at k_info <= 20, so it covers k_chk in {2,3,4};
    // the polynomial-expansion route covers the whole supported family.
    for (int k = 2; k <= 4; ++k) {
        CodeParams code = build_code(k);
        WeightDistribution bf = weight_distribution_bruteforce(code);
        WeightDistribution cf = weight_distribution_closed_form(code.n);
        REQUIRE(bf.coefficients == cf.coefficients);
    }
    // the expansion oracle is O(n^2) big-int products; n = 255 is plenty
    for (int k = 2; k <= 8; ++k) {
        int n = (1 << k) - 1;
        REQUIRE(weight_distribution_closed_form(n).coefficients == weights_from_enumerator(n));
    }
    CHECK_THROWS_AS(weight_distribution_bruteforce(build_code(5)), ParameterError);
}

TEST_CASE("weight distribution structural invariants", "[codec]") {
    for (int k = 2; k <= 12; ++k) {
        int n = (1 << k) - 1;
        WeightDistribution wd = weight_distribution_closed_form(n);
        REQUIRE(wd.coefficients[0] == 1);
        REQUIRE(wd.coefficients[n] == 1);
        REQUIRE(wd.coefficients[1] == 0);
        REQUIRE(wd.coefficients[2] == 0);
        REQUIRE(wd.coefficients[n - 1] == 0);
        REQUIRE(wd.coefficients[n - 2] == 0);
        BigInt sum = 0;
        for (int i = 0; i <= n; ++i) {
            REQUIRE(wd.coefficients[i] >= 0);
            REQUIRE(wd.coefficients[i] == wd.coefficients[n - i]);
            sum += wd.coefficients[i];
        }
        REQUIRE(sum == BigInt(1) << (n - k));
    }
}

TEST_CASE("distance distribution equals weight distribution at n=7", "[codec]") {
    CodeParams code = build_code(3);
    std::vector<BitVec> words;
    for (int w = 0; w < 16; ++w) {
        BitVec info(4);
        for (int i = 0; i < 4; ++i) info[i] = (w >> i) & 1;
        words.push_back(encode(code, info));
    }
    WeightDistribution wd = weight_distribution_closed_form(7);
    for (const BitVec& c : words) {
        std::vector<int> hist(8, 0);
        for (const BitVec& d : words) ++hist[hamming_distance(c, d)];
        for (int i = 0; i <= 7; ++i) REQUIRE(BigInt(hist[i]) == wd.coefficients[i]);
    }
}
