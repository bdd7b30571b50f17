// Command-line front end: paper-table and curve CSVs, concatenation
// planning, Monte-Carlo protocol simulation, MAC self-test.
//
// Exit codes: 0 success, 2 usage error, 3 planning failure,
// 4 simulation mismatch, 5 abort-dominated run.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "qir/analysis.hpp"
#include "qir/auth.hpp"
#include "qir/codec.hpp"
#include "qir/protocol.hpp"
#include "qir/rng.hpp"
#include "qir/sim.hpp"

using qir::operator^;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitPlanning = 3;
constexpr int kExitMismatch = 4;
constexpr int kExitAbortDominated = 5;

int k_chk_for_length(int n) {
    int k = 0;
    while ((1 << (k + 1)) - 1 <= n) ++k;
    if ((1 << k) - 1 != n)
        throw qir::ParameterError("--code must be a Hamming length 2^k - 1 (e.g. 7 or 15)");
    return k;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw qir::ParameterError("cannot open output file: " + path);
    return file;
}

const std::vector<double>& table_p_values(int table) {
    static const std::vector<double> t15{0.01, 0.02, 0.04, 0.05, 0.06, 0.07, 0.08};
    static const std::vector<double> t7{0.05, 0.07, 0.09, 0.10, 0.12, 0.13, 0.14};
    return table == 1 ? t15 : t7;
}

int run_analyze(int code_n, int table, bool curve, int samples, const std::string& out_path) {
    int k = k_chk_for_length(code_n);
    std::ofstream file;
    std::ostream& os = open_output(out_path, file);

    if (curve) {
        qir::curve_csv(code_n, samples, os);
        return kExitOk;
    }
    if (table == 3) {
        if (code_n != 15) throw qir::ParameterError("--table 3 is defined for --code 15");
        os << "round,error_rate,left_rate\n";
        double p = 0.03;
        for (int round = 1; round <= 6; ++round) {
            p = qir::block_error_bound(15, p) / 15;
            double left = qir::left_rate_exact(qir::build_code(4), round).convert_to<double>();
            os << round << ',' << qir::format_sig12(p) << ',' << qir::format_sig12(left) << '\n';
        }
        return kExitOk;
    }
    if ((table == 1 && code_n != 15) || (table == 2 && code_n != 7))
        throw qir::ParameterError("--table 1 needs --code 15, --table 2 needs --code 7");
    qir::CodeParams code = qir::build_code(k);
    os << "p,l,eta,alpha\n";
    for (double p : table_p_values(table)) {
        qir::ReconciliationPlan plan = qir::plan(code, p, 1e-9, qir::ModelKind::DistanceModel);
        os << qir::format_sig12(p) << ',' << plan.depth_l << ',' << qir::format_sig12(plan.eta())
           << ',' << qir::format_sig12(plan.predicted_alpha) << '\n';
    }
    return kExitOk;
}

int run_plan(int code_n, double p, double target_alpha, const std::string& model_name,
             const std::string& out_path) {
    int k = k_chk_for_length(code_n);
    qir::CodeParams code = qir::build_code(k);
    qir::ModelKind model =
        model_name == "lemma1" ? qir::ModelKind::WorstCaseBound : qir::ModelKind::DistanceModel;

    qir::ReconciliationPlan plan;
    try {
        plan = qir::plan(code, p, target_alpha, model);
    } catch (const qir::PlanningError& e) {
        std::cout << "planning failed: " << e.what() << "\n";
        std::printf("contraction condition at p: %s\n",
                    qir::contraction_condition_holds(code_n, p) ? "satisfied" : "violated");
        std::printf("threshold p_th = %.6f\n", qir::contraction_threshold(code_n));
        return kExitPlanning;
    }

    std::printf("code [%d,%d,3], model %s, p = %g, target alpha = %g\n", code.n, code.k_info,
                model == qir::ModelKind::WorstCaseBound ? "lemma1" : "distance", p, target_alpha);
    std::printf("rounds l = %d\n", plan.depth_l);
    std::printf("left rate eta = %.3f (%s exactly)\n", plan.eta(),
                plan.eta_exact.str().c_str());
    std::printf("final error rate alpha = %s\n", qir::format_sig12(plan.predicted_alpha).c_str());
    for (std::size_t i = 0; i < plan.per_round.size(); ++i)
        std::printf("round %zu: error rate %s, left rate %s\n", i + 1,
                    qir::format_sig12(plan.per_round[i].first).c_str(),
                    qir::format_sig12(plan.per_round[i].second).c_str());

    if (!out_path.empty()) {
        std::ofstream file;
        std::ostream& os = open_output(out_path, file);
        os << "round,error_rate,left_rate\n";
        for (std::size_t i = 0; i < plan.per_round.size(); ++i)
            os << (i + 1) << ',' << qir::format_sig12(plan.per_round[i].first) << ','
               << qir::format_sig12(plan.per_round[i].second) << '\n';
    }
    return kExitOk;
}

int run_simulate(int protocol, int code_n, int depth, double p, std::uint64_t len,
                 std::uint64_t trials, std::uint64_t seed, std::optional<double> expected_p,
                 std::optional<double> delta, const std::string& out_path) {
    int k = k_chk_for_length(code_n);
    qir::SessionConfig cfg;
    cfg.protocol_id = static_cast<qir::ProtocolId>(protocol);
    cfg.code = qir::build_code(k);
    cfg.depth_l = depth;
    cfg.expected_p = expected_p.value_or(p);
    cfg.gate_margin_delta = delta;

    qir::ChannelModel channel{p, seed};
    qir::TrialReport rep = qir::end_to_end(cfg, static_cast<std::size_t>(len), channel, trials);

    std::printf("protocol %d, code [%d,%d,3], depth %d, p = %g, len = %llu, trials = %llu, seed = %llu\n",
                protocol, cfg.code.n, cfg.code.k_info, depth, p,
                static_cast<unsigned long long>(len), static_cast<unsigned long long>(trials),
                static_cast<unsigned long long>(seed));
    std::printf("input error rate:  %s\n", qir::format_sig12(rep.input_error_rate).c_str());
    std::printf("final error rate:  %s\n", qir::format_sig12(rep.post_round_error_rate).c_str());
    std::printf("mismatched trials: %llu\n",
                static_cast<unsigned long long>(rep.end_to_end_mismatch_count));
    std::printf("aborted trials:    %llu\n", static_cast<unsigned long long>(rep.abort_count));
    std::fprintf(stderr, "wall time: %.3f s\n", rep.wall_time);

    if (!out_path.empty()) {
        std::ofstream file;
        std::ostream& os = open_output(out_path, file);
        os << "trials,input_error_rate,final_error_rate,mismatches,aborts\n";
        os << rep.trials << ',' << qir::format_sig12(rep.input_error_rate) << ','
           << qir::format_sig12(rep.post_round_error_rate) << ',' << rep.end_to_end_mismatch_count
           << ',' << rep.abort_count << '\n';
    }

    if (2 * rep.abort_count > rep.trials) return kExitAbortDominated;
    if (rep.end_to_end_mismatch_count > 0) return kExitMismatch;
    return kExitOk;
}

int run_mac_selftest(bool tamper, const std::string& poly_str, const std::string& msg_str) {
    if (!poly_str.empty() || !msg_str.empty()) {
        if (poly_str.empty() || msg_str.empty())
            throw qir::ParameterError("--poly and --msg must be given together");
        std::uint64_t mask = 0;
        std::string digits = poly_str.substr(0, 2) == "0b" ? poly_str.substr(2) : poly_str;
        for (char c : digits) {
            if (c != '0' && c != '1') throw qir::ParameterError("--poly expects a binary literal");
            mask = (mask << 1) | static_cast<std::uint64_t>(c - '0');
        }
        qir::Gf2Poly poly = qir::Gf2Poly::from_mask(mask);
        qir::BitVec msg = qir::bits_from_string(msg_str);
        qir::BitVec tag = qir::crc_hash(msg, poly);  // K = 0
        std::printf("%s\n", qir::bits_to_string(tag).c_str());
        return kExitOk;
    }

    int failures = 0;
    auto report = [&](const char* name, bool ok) {
        std::printf("%s %s\n", ok ? "[PASS]" : "[FAIL]", name);
        if (!ok) ++failures;
    };

    report("default polynomial is irreducible", qir::is_irreducible(qir::default_mac_poly_64()));

    {
        qir::Gf2Poly p = qir::Gf2Poly::from_mask(0b1011);
        bool ok = qir::crc_hash(qir::bits_from_string("1010"), p) == qir::bits_from_string("011");
        report("worked example h(1010) = 011 under x^3+x+1", ok);
    }

    {
        qir::CounterRng rng(1, 0);
        qir::Gf2Poly p = qir::default_mac_poly_64();
        bool roundtrip = true, tampered_detected = true;
        for (int t = 0; t < 1000 && roundtrip && tampered_detected; ++t) {
            std::size_t len = 1 + rng.next() % 512;
            qir::BitVec msg = rng.random_bits(len);
            qir::MacKey key(p, rng.random_bits(64));
            qir::Tag tag = qir::mac_tag(msg, key);
            if (tamper && t == 500) msg[0] ^= 1;  // injected corruption
            if (!qir::mac_verify(msg, tag, key)) {
                roundtrip = false;
                std::printf("  verification failed at trial %d (message length %zu)\n", t, len);
                break;
            }
            qir::BitVec bad = msg;
            bad[rng.next() % len] ^= 1;
            if (qir::mac_verify(bad, tag, key)) tampered_detected = false;
        }
        report("1000 random round-trips verify", roundtrip);
        report("single-bit tampers are rejected", tampered_detected);
    }

    {
        qir::CounterRng rng(2, 0);
        qir::Gf2Poly p = qir::default_mac_poly_64();
        bool linear = true;
        for (int t = 0; t < 100; ++t) {
            std::size_t len = 1 + rng.next() % 256;
            qir::BitVec a = rng.random_bits(len), b = rng.random_bits(len);
            if (qir::crc_hash(a ^ b, p) != (qir::crc_hash(a, p) ^ qir::crc_hash(b, p))) linear = false;
        }
        report("hash is linear", linear);
    }

    {
        qir::CounterRng rng(3, 0);
        qir::MacKey key(qir::default_mac_poly_64(), rng.random_bits(64));
        qir::BitVec msg = rng.random_bits(64);
        (void)qir::mac_tag(msg, key);
        bool raised = false;
        try {
            (void)qir::mac_tag(msg, key);
        } catch (const qir::KeyReuseError&) {
            raised = true;
        }
        report("key reuse is refused", raised);
    }

    return failures == 0 ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"concatenated one-way information reconciliation toolkit"};
    app.require_subcommand(1);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "emit table/curve CSVs");
    int an_code = 15, an_table = 0, an_samples = 101;
    bool an_curve = false;
    std::string an_out;
    analyze->add_option("--code", an_code, "block length (7 or 15)")->required();
    analyze->add_option("--table", an_table, "table number (1, 2 or 3)");
    analyze->add_flag("--curve", an_curve, "emit the p -> p1 curve");
    analyze->add_option("--samples", an_samples, "curve sample count");
    analyze->add_option("--out", an_out, "output CSV path (default stdout)");

    // plan
    auto* planned = app.add_subcommand("plan", "choose the concatenation depth");
    int pl_code = 15;
    double pl_p = 0.03, pl_alpha = 1e-9;
    std::string pl_model = "lemma1", pl_out;
    planned->add_option("--code", pl_code, "block length (2^k - 1)")->required();
    planned->add_option("--p", pl_p, "channel error rate")->required();
    planned->add_option("--target-alpha", pl_alpha, "target final error rate")->required();
    planned->add_option("--model", pl_model, "lemma1 | distance")
        ->check(CLI::IsMember({"lemma1", "distance"}));
    planned->add_option("--out", pl_out, "per-round CSV path");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run end-to-end protocol trials");
    int sm_protocol = 1, sm_code = 15, sm_depth = 5;
    double sm_p = 0.03;
    std::uint64_t sm_len = 759375, sm_trials = 1, sm_seed = 0;
    std::optional<double> sm_expected_p, sm_delta;
    std::string sm_out;
    sim->add_option("--protocol", sm_protocol, "1 = syndrome, 2 = key redistribution, 3 = ecc")
        ->required()
        ->check(CLI::Range(1, 3));
    sim->add_option("--code", sm_code, "block length (2^k - 1)")->required();
    sim->add_option("--depth", sm_depth, "concatenation depth l")->required();
    sim->add_option("--p", sm_p, "channel error rate")->required();
    sim->add_option("--len", sm_len, "raw key length in bits");
    sim->add_option("--trials", sm_trials, "number of sessions");
    sim->add_option("--seed", sm_seed, "RNG seed");
    sim->add_option("--expected-p", sm_expected_p, "gate expectation (default: --p)");
    sim->add_option("--delta", sm_delta, "gate margin (default: 3 sigma)");
    sim->add_option("--out", sm_out, "report CSV path");

    // mac-selftest
    auto* mac = app.add_subcommand("mac-selftest", "exercise the authentication scheme");
    bool mc_tamper = false;
    std::string mc_poly, mc_msg;
    mac->add_flag("--tamper", mc_tamper, "inject a corruption to prove detection");
    mac->add_option("--poly", mc_poly, "binary polynomial literal, e.g. 0b1011");
    mac->add_option("--msg", mc_msg, "message bits, M_{n-1} first");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*analyze) {
            if (an_curve == (an_table != 0))
                throw qir::ParameterError("analyze needs exactly one of --table or --curve");
            if (an_table != 0 && (an_table < 1 || an_table > 3))
                throw qir::ParameterError("--table must be 1, 2 or 3");
            return run_analyze(an_code, an_table, an_curve, an_samples, an_out);
        }
        if (*planned) return run_plan(pl_code, pl_p, pl_alpha, pl_model, pl_out);
        if (*sim)
            return run_simulate(sm_protocol, sm_code, sm_depth, sm_p, sm_len, sm_trials, sm_seed,
                                sm_expected_p, sm_delta, sm_out);
        if (*mac) return run_mac_selftest(mc_tamper, mc_poly, mc_msg);
    } catch (const qir::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
