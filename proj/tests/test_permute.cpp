#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <set>

#include "qir/permute.hpp"
#include "qir/rng.hpp"

using namespace qir;

TEST_CASE("2x3 transpose pattern", "[permute]") {
    BitVec in{1, 0, 1, 1, 1, 0};  // a b c | d e f
    BitVec out = wlp_apply(in, WlpShape{2, 3});
    BitVec expect{1, 1, 0, 1, 1, 0};  // a d b e c f
    CHECK(out == expect);
    CHECK(wlp_inverse(out, WlpShape{2, 3}) == in);
}

TEST_CASE("single row is the identity", "[permute]") {
    CounterRng rng(3, 0);
    BitVec v = rng.random_bits(17);
    CHECK(wlp_apply(v, WlpShape{1, 17}) == v);
    CHECK(wlp_apply(v, WlpShape{17, 1}) == v);
}

TEST_CASE("length mismatch is rejected", "[permute]") {
    BitVec v(10);
    CHECK_THROWS_AS(wlp_apply(v, WlpShape{3, 4}), ParameterError);
    CHECK_THROWS_AS(wlp_inverse(v, WlpShape{3, 4}), ParameterError);
}

TEST_CASE("round-trip identity over random shapes", "[permute]") {
    CounterRng rng(42, 1);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t m = 1 + rng.next() % 20;
        std::size_t n = 1 + rng.next() % 20;
        BitVec v = rng.random_bits(m * n);
        CHECK(wlp_inverse(wlp_apply(v, WlpShape{m, n}), WlpShape{m, n}) == v);
    }
    // the shapes named in the examples
    BitVec v = rng.random_bits(4 * 15);
    CHECK(wlp_apply(wlp_apply(v, WlpShape{4, 15}), WlpShape{15, 4}) == v);
    BitVec u = rng.random_bits(165);
    CHECK(wlp_inverse(wlp_apply(u, WlpShape{11, 15}), WlpShape{11, 15}) == u);
}

TEST_CASE("square shape is an involution", "[permute]") {
    CounterRng rng(5, 2);
    BitVec v = rng.random_bits(49);
    CHECK(wlp_apply(wlp_apply(v, WlpShape{7, 7}), WlpShape{7, 7}) == v);
}

TEST_CASE("index map is a bijection", "[permute]") {
    for (auto [m, n] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 3}, {5, 7}, {15, 15}, {1, 9}}) {
        std::vector<std::size_t> idx(m * n);
        std::iota(idx.begin(), idx.end(), 0);
        // run the bit permutation over index payloads one bit at a time
        std::vector<std::size_t> out(m * n, 0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) out[j * m + i] = idx[i * n + j];
        std::sort(out.begin(), out.end());
        REQUIRE(out == idx);
    }
}

TEST_CASE("block bits disperse into distinct output blocks when m >= n", "[permute]") {
    const std::size_t m = 15, n = 7;
    for (std::size_t block = 0; block < m; ++block) {
        std::set<std::size_t> out_blocks;
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t out_pos = j * m + block;
            out_blocks.insert(out_pos / n);
        }
        REQUIRE(out_blocks.size() == n);
    }
}
