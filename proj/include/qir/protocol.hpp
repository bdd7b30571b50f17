#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qir/auth.hpp"
#include "qir/bits.hpp"
#include "qir/codec.hpp"
#include "qir/errors.hpp"
#include "qir/permute.hpp"
#include "qir/rng.hpp"

namespace qir {

enum class ProtocolId : std::uint8_t {
    SyndromeIr = 1,        // Alice publishes per-round syndromes
    KeyRedistribution = 2, // masked concatenated codeword, key = Alice's random string
    MayersEcc = 3,         // masked concatenated codeword, key = Alice's raw key
};

struct SessionConfig {
    ProtocolId protocol_id = ProtocolId::SyndromeIr;
    CodeParams code;
    int depth_l = 1;
    int mac_width_m = 64;
    double expected_p = 0.0;                  // channel rate assumed by the gate
    std::optional<double> gate_margin_delta;  // nullopt: 3 binomial sigmas of the zero rate
};

inline void validate_config(const SessionConfig& cfg) {
    if (cfg.depth_l < 1) throw ParameterError("SessionConfig: depth_l must be >= 1");
    if (cfg.mac_width_m % 8 != 0 || cfg.mac_width_m < 16 || cfg.mac_width_m > 128)
        throw ParameterError("SessionConfig: mac_width_m must be a multiple of 8 in [16, 128]");
    if (!(cfg.expected_p >= 0.0 && cfg.expected_p <= 1.0))
        throw ParameterError("SessionConfig: expected_p must be in [0, 1]");
}

// ---------------------------------------------------------------------------
// Wire format
//
//   bytes 0-3   magic "QIR1"
//   byte  4     version (1)
//   byte  5     protocol id
//   byte  6     k_chk
//   byte  7     depth_l
//   byte  8     MAC width in bits
//   bytes 9-12  payload bit length, unsigned 32-bit big-endian
//   ...         payload, bits packed MSB-first, final byte zero-padded
//   ...         MAC tag (mac_width/8 bytes) over all preceding bytes
//
// Syndrome-IR payload: per round, a 32-bit block count followed by that many
// k_chk-bit syndromes (s_1 first). Protocols II/III: the masked codeword.
// ---------------------------------------------------------------------------

inline constexpr std::uint8_t kPacketMagic[4] = {0x51, 0x49, 0x52, 0x31};
inline constexpr std::uint8_t kPacketVersion = 1;
inline constexpr std::size_t kHeaderBytes = 13;

struct IrPacket {
    std::uint8_t version = kPacketVersion;
    std::uint8_t protocol_id = 0;
    std::uint8_t k_chk = 0;
    std::uint8_t depth_l = 0;
    std::uint8_t mac_width = 0;
    BitVec payload;
    std::vector<std::uint8_t> mac;
};

class PacketError : public std::runtime_error {
public:
    enum class Kind { Truncated, BadMagic, BadVersion, BadField, Malformed };

    PacketError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline std::vector<std::uint8_t> packet_encode(const IrPacket& pkt) {
    BitWriter w;
    for (auto b : kPacketMagic) w.put_bits(b, 8);
    w.put_bits(pkt.version, 8);
    w.put_bits(pkt.protocol_id, 8);
    w.put_bits(pkt.k_chk, 8);
    w.put_bits(pkt.depth_l, 8);
    w.put_bits(pkt.mac_width, 8);
    w.put_bits(static_cast<std::uint32_t>(pkt.payload.size()), 32);
    w.put_bitvec(pkt.payload);
    std::vector<std::uint8_t> out = w.bytes();
    out.insert(out.end(), pkt.mac.begin(), pkt.mac.end());
    return out;
}

/// Structural decode: magic, version, field ranges, exact length. The MAC is
/// carried through untouched; checking it needs the key (verify_packet_mac).
inline IrPacket packet_decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes)
        throw PacketError(PacketError::Kind::Truncated, "packet shorter than header");
    for (int i = 0; i < 4; ++i)
        if (bytes[i] != kPacketMagic[i]) throw PacketError(PacketError::Kind::BadMagic, "bad magic");
    IrPacket pkt;
    pkt.version = bytes[4];
    if (pkt.version != kPacketVersion)
        throw PacketError(PacketError::Kind::BadVersion,
                          "unsupported version " + std::to_string(pkt.version));
    pkt.protocol_id = bytes[5];
    pkt.k_chk = bytes[6];
    pkt.depth_l = bytes[7];
    pkt.mac_width = bytes[8];
    if (pkt.protocol_id < 1 || pkt.protocol_id > 3)
        throw PacketError(PacketError::Kind::BadField, "unknown protocol id");
    if (pkt.mac_width % 8 != 0 || pkt.mac_width < 16)
        throw PacketError(PacketError::Kind::BadField, "bad MAC width");
    std::uint32_t payload_bits = 0;
    for (int i = 9; i < 13; ++i) payload_bits = (payload_bits << 8) | bytes[i];

    std::size_t payload_bytes = (payload_bits + 7) / 8;
    std::size_t expect = kHeaderBytes + payload_bytes + pkt.mac_width / 8;
    if (bytes.size() < expect)
        throw PacketError(PacketError::Kind::Truncated,
                          "packet truncated: " + std::to_string(bytes.size()) + " < " +
                              std::to_string(expect) + " bytes");
    if (bytes.size() > expect)
        throw PacketError(PacketError::Kind::Malformed, "trailing bytes after MAC");

    BitReader r(bytes.data() + kHeaderBytes, payload_bytes * 8);
    pkt.payload = r.get_bitvec(payload_bits);
    pkt.mac.assign(bytes.begin() + static_cast<std::ptrdiff_t>(kHeaderBytes + payload_bytes),
                   bytes.end());
    return pkt;
}

inline bool verify_packet_mac(std::span<const std::uint8_t> bytes, const MacKey& key) {
    std::size_t tag_bytes = static_cast<std::size_t>(key.m() / 8);
    if (bytes.size() <= tag_bytes) return false;
    std::span<const std::uint8_t> message = bytes.subspan(0, bytes.size() - tag_bytes);
    Tag tag;
    tag.aut.reserve(key.m());
    for (std::size_t i = bytes.size() - tag_bytes; i < bytes.size(); ++i)
        for (int b = 7; b >= 0; --b) tag.aut.push_back((bytes[i] >> b) & 1u);
    return mac_verify(message, tag, key);
}

namespace detail {

inline std::vector<std::uint8_t> bits_to_bytes_msb(const BitVec& bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) out[i >> 3] |= static_cast<std::uint8_t>(1u << (7 - (i & 7)));
    return out;
}

// Signs header+payload with the one-time key and returns the full wire bytes.
inline std::vector<std::uint8_t> seal_packet(IrPacket& pkt, MacKey& mac_key) {
    std::vector<std::uint8_t> unsigned_bytes = packet_encode(pkt);  // pkt.mac still empty
    Tag tag = mac_tag(std::span<const std::uint8_t>(unsigned_bytes), mac_key);
    pkt.mac = bits_to_bytes_msb(tag.aut);
    unsigned_bytes.insert(unsigned_bytes.end(), pkt.mac.begin(), pkt.mac.end());
    return unsigned_bytes;
}

}  // namespace detail

struct SyndromeSet {
    std::vector<std::vector<std::uint32_t>> rounds;  // per round, per block
    std::vector<std::uint32_t> block_counts;
};

struct AliceResult {
    BitVec final_key;
    std::vector<std::uint8_t> packet;  // the single one-way message
    SyndromeSet syndromes;             // protocol I only; empty otherwise
};

enum class BobStatus {
    Ok,
    AuthFailure,  // MAC did not verify
    GateAbort,    // round-1 syndrome statistics inconsistent with expected_p
};

struct BobResult {
    BobStatus status = BobStatus::Ok;
    BitVec final_key;  // valid when status == Ok
};

// ---------------------------------------------------------------------------
// Protocol I: syndrome IR
// ---------------------------------------------------------------------------

namespace detail {

// One Alice-side round: permute whole blocks, record their syndromes, keep
// the information positions. Bits past the last whole block ride along
// unpermuted and uncoded.
struct P1Round {
    std::vector<std::uint32_t> syndromes;
    BitVec survivor;
};

inline P1Round alice_p1_round(const CodeParams& code, const BitVec& cur) {
    const std::size_t n = static_cast<std::size_t>(code.n);
    const std::size_t m = cur.size() / n;
    const std::size_t body = m * n;

    P1Round out;
    out.syndromes.reserve(m);
    out.survivor.reserve(m * code.k_info + (cur.size() - body));

    BitVec permuted;
    if (m > 0) permuted = wlp_apply(BitVec(cur.begin(), cur.begin() + body), WlpShape{m, n});
    BitVec block(n);
    for (std::size_t i = 0; i < m; ++i) {
        std::copy(permuted.begin() + i * n, permuted.begin() + (i + 1) * n, block.begin());
        out.syndromes.push_back(syndrome_value(code, block));
        for (int r = 0; r < code.k_info; ++r)
            out.survivor.push_back(block[code.info_positions[r] - 1]);
    }
    out.survivor.insert(out.survivor.end(), cur.begin() + body, cur.end());
    return out;
}

// Bob's mirror of a round: same permutation, then per block flip the bit
// named by the relative syndrome before discarding the check positions.
struct P1BobRound {
    std::vector<std::uint32_t> relative_syndromes;
    BitVec survivor;
};

inline P1BobRound bob_p1_round(const CodeParams& code, const BitVec& cur,
                               const std::vector<std::uint32_t>& alice_syndromes) {
    const std::size_t n = static_cast<std::size_t>(code.n);
    const std::size_t m = cur.size() / n;
    const std::size_t body = m * n;
    if (alice_syndromes.size() != m)
        throw ParameterError("bob round: block count mismatch (" + std::to_string(m) + " local vs " +
                             std::to_string(alice_syndromes.size()) + " in packet)");

    P1BobRound out;
    out.relative_syndromes.reserve(m);
    out.survivor.reserve(m * code.k_info + (cur.size() - body));

    BitVec permuted;
    if (m > 0) permuted = wlp_apply(BitVec(cur.begin(), cur.begin() + body), WlpShape{m, n});
    BitVec block(n);
    for (std::size_t i = 0; i < m; ++i) {
        std::copy(permuted.begin() + i * n, permuted.begin() + (i + 1) * n, block.begin());
        std::uint32_t rel = syndrome_value(code, block) ^ alice_syndromes[i];
        out.relative_syndromes.push_back(rel);
        if (rel != 0) block[rel - 1] ^= 1;
        for (int r = 0; r < code.k_info; ++r)
            out.survivor.push_back(block[code.info_positions[r] - 1]);
    }
    out.survivor.insert(out.survivor.end(), cur.begin() + body, cur.end());
    return out;
}

}  // namespace detail

/// Accept iff the fraction of zero relative syndromes is at least
/// (1 - expected_p)^n - delta. A block is error-free with probability
/// (1-p)^n, so the zero fraction is the statistic that sits near that
/// value under an honest channel.
inline bool syndrome_gate(const std::vector<std::uint32_t>& relative_syndromes,
                          const SessionConfig& cfg) {
    if (relative_syndromes.empty()) throw ParameterError("syndrome_gate: no round-1 syndromes");
    std::size_t zero = 0;
    for (auto s : relative_syndromes)
        if (s == 0) ++zero;
    double z = static_cast<double>(zero) / static_cast<double>(relative_syndromes.size());
    double zbar = std::pow(1.0 - cfg.expected_p, cfg.code.n);
    double delta = cfg.gate_margin_delta
                       ? *cfg.gate_margin_delta
                       : 3.0 * std::sqrt(zbar * (1.0 - zbar) /
                                         static_cast<double>(relative_syndromes.size()));
    return z >= zbar - delta;
}

inline AliceResult alice_syndrome_ir(const BitVec& raw_key, const SessionConfig& cfg,
                                     MacKey& mac_key) {
    validate_config(cfg);
    if (cfg.protocol_id != ProtocolId::SyndromeIr)
        throw ParameterError("alice_syndrome_ir: config protocol_id must be SyndromeIr");
    if (mac_key.m() != cfg.mac_width_m)
        throw ParameterError("alice_syndrome_ir: MAC key width differs from config");
    const std::size_t n = static_cast<std::size_t>(cfg.code.n);
    if (raw_key.size() < n * n)
        throw ParameterError("alice_syndrome_ir: raw key must be at least n^2 = " +
                             std::to_string(n * n) + " bits");

    AliceResult res;
    BitVec cur = raw_key;
    for (int j = 0; j < cfg.depth_l; ++j) {
        detail::P1Round round = detail::alice_p1_round(cfg.code, cur);
        res.syndromes.block_counts.push_back(static_cast<std::uint32_t>(round.syndromes.size()));
        res.syndromes.rounds.push_back(std::move(round.syndromes));
        cur = std::move(round.survivor);
    }
    res.final_key = std::move(cur);

    BitWriter payload;
    for (int j = 0; j < cfg.depth_l; ++j) {
        payload.put_bits(res.syndromes.block_counts[j], 32);
        for (auto s : res.syndromes.rounds[j]) payload.put_bits(s, cfg.code.k_chk);
    }
    IrPacket pkt;
    pkt.protocol_id = static_cast<std::uint8_t>(cfg.protocol_id);
    pkt.k_chk = static_cast<std::uint8_t>(cfg.code.k_chk);
    pkt.depth_l = static_cast<std::uint8_t>(cfg.depth_l);
    pkt.mac_width = static_cast<std::uint8_t>(cfg.mac_width_m);
    BitReader r(payload.bytes().data(), payload.bytes().size() * 8);
    pkt.payload = r.get_bitvec(payload.bit_count());
    res.packet = detail::seal_packet(pkt, mac_key);
    return res;
}

namespace detail {

inline void check_packet_matches_config(const IrPacket& pkt, const SessionConfig& cfg) {
    if (pkt.protocol_id != static_cast<std::uint8_t>(cfg.protocol_id) ||
        pkt.k_chk != cfg.code.k_chk || pkt.depth_l != cfg.depth_l ||
        pkt.mac_width != cfg.mac_width_m)
        throw ParameterError("packet header disagrees with session config");
}

inline SyndromeSet parse_syndrome_payload(const IrPacket& pkt, const SessionConfig& cfg) {
    std::vector<std::uint8_t> payload_bytes = bits_to_bytes_msb(pkt.payload);
    BitReader r(payload_bytes.data(), pkt.payload.size());
    SyndromeSet set;
    for (int j = 0; j < cfg.depth_l; ++j) {
        if (r.remaining() < 32)
            throw PacketError(PacketError::Kind::Malformed, "payload ends inside round header");
        std::uint32_t m = static_cast<std::uint32_t>(r.get_bits(32));
        if (r.remaining() < static_cast<std::size_t>(m) * cfg.code.k_chk)
            throw PacketError(PacketError::Kind::Malformed, "payload ends inside syndrome list");
        std::vector<std::uint32_t> round(m);
        for (auto& s : round) s = static_cast<std::uint32_t>(r.get_bits(cfg.code.k_chk));
        set.block_counts.push_back(m);
        set.rounds.push_back(std::move(round));
    }
    if (r.remaining() != 0)
        throw PacketError(PacketError::Kind::Malformed, "payload longer than declared rounds");
    return set;
}

}  // namespace detail

inline BobResult bob_syndrome_ir(const BitVec& raw_key, std::span<const std::uint8_t> packet_bytes,
                                 const SessionConfig& cfg, const MacKey& mac_key) {
    validate_config(cfg);
    if (cfg.protocol_id != ProtocolId::SyndromeIr)
        throw ParameterError("bob_syndrome_ir: config protocol_id must be SyndromeIr");
    if (mac_key.m() != cfg.mac_width_m)
        throw ParameterError("bob_syndrome_ir: MAC key width differs from config");

    IrPacket pkt = packet_decode(packet_bytes);
    if (!verify_packet_mac(packet_bytes, mac_key)) return {BobStatus::AuthFailure, {}};
    detail::check_packet_matches_config(pkt, cfg);
    SyndromeSet alice = detail::parse_syndrome_payload(pkt, cfg);

    BitVec cur = raw_key;
    for (int j = 0; j < cfg.depth_l; ++j) {
        detail::P1BobRound round = detail::bob_p1_round(cfg.code, cur, alice.rounds[j]);
        if (j == 0 && !syndrome_gate(round.relative_syndromes, cfg)) return {BobStatus::GateAbort, {}};
        cur = std::move(round.survivor);
    }
    return {BobStatus::Ok, std::move(cur)};
}

// ---------------------------------------------------------------------------
// Protocols II and III: masked concatenated codeword
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t base, int exp) {
    std::uint64_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > (1ull << 62) / base) throw ParameterError("length overflow: n^l is impractically large");
        r *= base;
    }
    return r;
}

inline void require_codeword_length(const CodeParams& code, int depth_l, std::size_t len) {
    std::uint64_t unit = checked_pow(static_cast<std::uint64_t>(code.n), depth_l);
    if (len >= unit && len % unit == 0) return;
    std::uint64_t t = len / unit;
    std::uint64_t below = t * unit, above = (t + 1) * unit;
    std::uint64_t nearest = (t == 0 || above - len <= len - below) ? above : below;
    throw ParameterError("raw key length " + std::to_string(len) + " is not a multiple of n^l = " +
                         std::to_string(unit) + "; nearest valid length is " +
                         std::to_string(nearest));
}

// C_l[P_{l-1}[ ... C_2[P_1[C_1(r)]] ... ]]: encode k-bit blocks to n-bit
// blocks each round, transposing between rounds but not after the last.
inline BitVec encode_chain(const CodeParams& code, const BitVec& r, int depth_l) {
    const std::size_t n = static_cast<std::size_t>(code.n);
    const std::size_t k = static_cast<std::size_t>(code.k_info);
    BitVec cur = r;
    BitVec info(k);
    for (int j = 1; j <= depth_l; ++j) {
        if (cur.size() % k != 0)
            throw InternalError("encode_chain: intermediate length not divisible by k_info");
        const std::size_t m = cur.size() / k;
        BitVec next(m * n);
        for (std::size_t i = 0; i < m; ++i) {
            std::copy(cur.begin() + i * k, cur.begin() + (i + 1) * k, info.begin());
            BitVec word = encode(code, info);
            std::copy(word.begin(), word.end(), next.begin() + i * n);
        }
        if (j < depth_l) next = wlp_apply(next, WlpShape{m, n});
        cur = std::move(next);
    }
    return cur;
}

// Inverse walk: correct and strip each round's blocks, undoing the
// interleaving between rounds.
inline BitVec decode_chain(const CodeParams& code, const BitVec& received, int depth_l) {
    const std::size_t n = static_cast<std::size_t>(code.n);
    const std::size_t k = static_cast<std::size_t>(code.k_info);
    BitVec cur = received;
    BitVec block(n);
    for (int j = depth_l; j >= 1; --j) {
        if (cur.size() % n != 0)
            throw InternalError("decode_chain: intermediate length not divisible by n");
        const std::size_t m = cur.size() / n;
        BitVec next(m * k);
        for (std::size_t i = 0; i < m; ++i) {
            std::copy(cur.begin() + i * n, cur.begin() + (i + 1) * n, block.begin());
            std::uint32_t v = syndrome_value(code, block);
            if (v != 0) block[v - 1] ^= 1;
            for (int t = 0; t < code.k_info; ++t)
                next[i * k + t] = block[code.info_positions[t] - 1];
        }
        cur = std::move(next);
        if (j > 1) cur = wlp_inverse(cur, WlpShape{cur.size() / n, n});
    }
    return cur;
}

inline AliceResult alice_masked_codeword(const BitVec& raw_key, const SessionConfig& cfg,
                                         MacKey& mac_key, std::uint64_t rng_seed,
                                         bool final_key_is_raw) {
    validate_config(cfg);
    if (mac_key.m() != cfg.mac_width_m)
        throw ParameterError("alice: MAC key width differs from config");
    require_codeword_length(cfg.code, cfg.depth_l, raw_key.size());

    std::uint64_t unit_k = checked_pow(static_cast<std::uint64_t>(cfg.code.k_info), cfg.depth_l);
    std::uint64_t unit_n = checked_pow(static_cast<std::uint64_t>(cfg.code.n), cfg.depth_l);
    std::size_t r_len = static_cast<std::size_t>(raw_key.size() / unit_n * unit_k);

    CounterRng rng(rng_seed, 0x72616e64ull);
    BitVec r = rng.random_bits(r_len);
    BitVec codeword = encode_chain(cfg.code, r, cfg.depth_l);

    AliceResult res;
    res.final_key = final_key_is_raw ? raw_key : std::move(r);

    IrPacket pkt;
    pkt.protocol_id = static_cast<std::uint8_t>(cfg.protocol_id);
    pkt.k_chk = static_cast<std::uint8_t>(cfg.code.k_chk);
    pkt.depth_l = static_cast<std::uint8_t>(cfg.depth_l);
    pkt.mac_width = static_cast<std::uint8_t>(cfg.mac_width_m);
    pkt.payload = raw_key ^ codeword;
    res.packet = detail::seal_packet(pkt, mac_key);
    return res;
}

}  // namespace detail

inline AliceResult alice_key_redistribution(const BitVec& raw_key, const SessionConfig& cfg,
                                            MacKey& mac_key, std::uint64_t rng_seed) {
    if (cfg.protocol_id != ProtocolId::KeyRedistribution)
        throw ParameterError("alice_key_redistribution: config protocol_id must be KeyRedistribution");
    return detail::alice_masked_codeword(raw_key, cfg, mac_key, rng_seed, false);
}

inline AliceResult alice_mayers(const BitVec& raw_key, const SessionConfig& cfg, MacKey& mac_key,
                                std::uint64_t rng_seed) {
    if (cfg.protocol_id != ProtocolId::MayersEcc)
        throw ParameterError("alice_mayers: config protocol_id must be MayersEcc");
    return detail::alice_masked_codeword(raw_key, cfg, mac_key, rng_seed, true);
}

namespace detail {

inline BobResult bob_masked_codeword(const BitVec& raw_key,
                                     std::span<const std::uint8_t> packet_bytes,
                                     const SessionConfig& cfg, const MacKey& mac_key,
                                     bool reencode) {
    validate_config(cfg);
    if (mac_key.m() != cfg.mac_width_m)
        throw ParameterError("bob: MAC key width differs from config");

    IrPacket pkt = packet_decode(packet_bytes);
    if (!verify_packet_mac(packet_bytes, mac_key)) return {BobStatus::AuthFailure, {}};
    detail::check_packet_matches_config(pkt, cfg);
    if (pkt.payload.size() != raw_key.size())
        throw ParameterError("bob: raw key length " + std::to_string(raw_key.size()) +
                             " differs from payload bit length " + std::to_string(pkt.payload.size()));
    require_codeword_length(cfg.code, cfg.depth_l, raw_key.size());

    BitVec noisy = pkt.payload ^ raw_key;  // c^(l) + e
    BitVec r_b = decode_chain(cfg.code, noisy, cfg.depth_l);
    if (!reencode) return {BobStatus::Ok, std::move(r_b)};

    BitVec c_prime = encode_chain(cfg.code, r_b, cfg.depth_l);
    return {BobStatus::Ok, pkt.payload ^ c_prime};  // K_A'
}

}  // namespace detail

inline BobResult bob_key_redistribution(const BitVec& raw_key,
                                        std::span<const std::uint8_t> packet_bytes,
                                        const SessionConfig& cfg, const MacKey& mac_key) {
    if (cfg.protocol_id != ProtocolId::KeyRedistribution)
        throw ParameterError("bob_key_redistribution: config protocol_id must be KeyRedistribution");
    return detail::bob_masked_codeword(raw_key, packet_bytes, cfg, mac_key, false);
}

inline BobResult bob_mayers(const BitVec& raw_key, std::span<const std::uint8_t> packet_bytes,
                            const SessionConfig& cfg, const MacKey& mac_key) {
    if (cfg.protocol_id != ProtocolId::MayersEcc)
        throw ParameterError("bob_mayers: config protocol_id must be MayersEcc");
    return detail::bob_masked_codeword(raw_key, packet_bytes, cfg, mac_key, true);
}

}  // namespace qir
