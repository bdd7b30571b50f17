#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "qir/analysis.hpp"
#include "qir/auth.hpp"
#include "qir/codec.hpp"
#include "qir/errors.hpp"
#include "qir/protocol.hpp"
#include "qir/rng.hpp"

namespace qir {

// Binary symmetric channel: each bit flips independently with probability p.
struct ChannelModel {
    double p = 0.0;
    std::uint64_t seed = 0;
};

// Test-harness view of both parties' raw keys; protocol code never sees both.
struct RawKeyPair {
    BitVec alice_key;
    BitVec bob_key;
};

struct TrialReport {
    std::uint64_t trials = 0;
    double input_error_rate = 0.0;
    double post_round_error_rate = 0.0;
    double post_round_stderr = 0.0;
    std::uint64_t end_to_end_mismatch_count = 0;
    std::uint64_t abort_count = 0;
    double wall_time = 0.0;  // informational; not part of the deterministic report
};

inline RawKeyPair gen_raw_pair(std::size_t length, const ChannelModel& channel,
                               std::uint64_t stream = 0) {
    if (length < 1) throw ParameterError("gen_raw_pair: length must be >= 1");
    if (!(channel.p >= 0.0 && channel.p <= 1.0))
        throw ParameterError("gen_raw_pair: p must be in [0, 1]");
    CounterRng rng(channel.seed, stream);
    RawKeyPair pair;
    pair.alice_key = rng.random_bits(length);
    pair.bob_key = pair.alice_key;
    for (std::size_t i = 0; i < length; ++i)
        if (rng.bernoulli(channel.p)) pair.bob_key[i] ^= 1;
    return pair;
}

/// Sends `blocks` random codewords through the channel and decodes each
/// once; reports the residual error rate against the transmitted codeword.
inline TrialReport monte_carlo_single_round(const CodeParams& code, double p, std::uint64_t blocks,
                                            std::uint64_t seed) {
    if (blocks < 1) throw ParameterError("monte_carlo_single_round: blocks must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("monte_carlo_single_round: p must be in [0, 1]");
    auto t0 = std::chrono::steady_clock::now();

    CounterRng rng(seed, 0x6d635f31ull);
    std::uint64_t flips_in = 0, residual = 0, residual_sq = 0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        BitVec info = rng.random_bits(code.k_info);
        BitVec sent = encode(code, info);
        BitVec noisy = sent;
        for (int i = 0; i < code.n; ++i) {
            if (rng.bernoulli(p)) {
                noisy[i] ^= 1;
                ++flips_in;
            }
        }
        auto [fixed, corrected] = correct_one(code, noisy);
        std::uint64_t diff = hamming_distance(fixed, sent);
        residual += diff;
        residual_sq += diff * diff;
    }

    TrialReport rep;
    rep.trials = blocks;
    const double bits = static_cast<double>(blocks) * code.n;
    rep.input_error_rate = static_cast<double>(flips_in) / bits;
    rep.post_round_error_rate = static_cast<double>(residual) / bits;
    double mean = static_cast<double>(residual) / static_cast<double>(blocks);
    double var = static_cast<double>(residual_sq) / static_cast<double>(blocks) - mean * mean;
    if (var < 0) var = 0;
    rep.post_round_stderr = std::sqrt(var / static_cast<double>(blocks)) / code.n;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

/// Full Alice -> Bob sessions with fresh keys per trial. Mismatch = any
/// differing final-key bit; aborts are counted separately.
inline TrialReport end_to_end(const SessionConfig& cfg, std::size_t raw_len,
                              const ChannelModel& channel, std::uint64_t trials) {
    validate_config(cfg);
    if (trials < 1) throw ParameterError("end_to_end: trials must be >= 1");
    if (cfg.mac_width_m != 64)
        throw ParameterError("end_to_end: the harness derives MAC keys for mac_width_m = 64 only");
    auto t0 = std::chrono::steady_clock::now();

    TrialReport rep;
    rep.trials = trials;
    std::uint64_t in_flips = 0, in_bits = 0, out_diff = 0, out_bits = 0;

    for (std::uint64_t t = 0; t < trials; ++t) {
        RawKeyPair pair = gen_raw_pair(raw_len, channel, 4 * t);
        CounterRng key_rng(channel.seed, 4 * t + 1);
        BitVec otp = key_rng.random_bits(64);
        MacKey alice_key(default_mac_poly_64(), otp);
        MacKey bob_key(default_mac_poly_64(), otp);
        std::uint64_t alice_rng_seed = CounterRng(channel.seed, 4 * t + 2).next();

        in_flips += hamming_distance(pair.alice_key, pair.bob_key);
        in_bits += raw_len;

        AliceResult alice;
        BobResult bob;
        switch (cfg.protocol_id) {
            case ProtocolId::SyndromeIr:
                alice = alice_syndrome_ir(pair.alice_key, cfg, alice_key);
                bob = bob_syndrome_ir(pair.bob_key, alice.packet, cfg, bob_key);
                break;
            case ProtocolId::KeyRedistribution:
                alice = alice_key_redistribution(pair.alice_key, cfg, alice_key, alice_rng_seed);
                bob = bob_key_redistribution(pair.bob_key, alice.packet, cfg, bob_key);
                break;
            case ProtocolId::MayersEcc:
                alice = alice_mayers(pair.alice_key, cfg, alice_key, alice_rng_seed);
                bob = bob_mayers(pair.bob_key, alice.packet, cfg, bob_key);
                break;
        }

        if (bob.status != BobStatus::Ok) {
            ++rep.abort_count;
            continue;
        }
        std::uint64_t diff = bob.final_key.size() == alice.final_key.size()
                                 ? hamming_distance(alice.final_key, bob.final_key)
                                 : alice.final_key.size();
        out_diff += diff;
        out_bits += alice.final_key.size();
        if (diff != 0) ++rep.end_to_end_mismatch_count;
    }

    rep.input_error_rate = in_bits ? static_cast<double>(in_flips) / static_cast<double>(in_bits) : 0.0;
    rep.post_round_error_rate =
        out_bits ? static_cast<double>(out_diff) / static_cast<double>(out_bits) : 0.0;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

/// Diagnostic: runs protocol I's rounds on both sides at once and reports
/// the relative error rate of the surviving strings after each round.
inline std::vector<double> protocol1_round_error_trace(const BitVec& alice_raw,
                                                       const BitVec& bob_raw,
                                                       const SessionConfig& cfg) {
    if (alice_raw.size() != bob_raw.size())
        throw ParameterError("protocol1_round_error_trace: raw keys must have equal length");
    std::vector<double> rates;
    BitVec a = alice_raw, b = bob_raw;
    for (int j = 0; j < cfg.depth_l; ++j) {
        detail::P1Round ar = detail::alice_p1_round(cfg.code, a);
        detail::P1BobRound br = detail::bob_p1_round(cfg.code, b, ar.syndromes);
        a = std::move(ar.survivor);
        b = std::move(br.survivor);
        rates.push_back(static_cast<double>(hamming_distance(a, b)) / static_cast<double>(a.size()));
    }
    return rates;
}

}  // namespace qir
