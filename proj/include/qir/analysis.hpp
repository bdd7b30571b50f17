#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qir/codec.hpp"
#include "qir/errors.hpp"

namespace qir {

using BigRational = boost::multiprecision::cpp_rational;
using BigFloat = boost::multiprecision::cpp_bin_float_50;

enum class ModelKind {
    DistanceModel,  // expected residual rate from the distance distribution
    WorstCaseBound,    // worst-case +1-error bound, per bit
};

class PlanningError : public std::runtime_error {
public:
    PlanningError(std::string what, int round) : std::runtime_error(std::move(what)), round_(round) {}
    int round() const { return round_; }

private:
    int round_ = 0;
};

namespace detail {

// Per-length tables for the distance model: c_k = C(n,k) - A_k and the
// ratio (A_{k+1} - A_{k-1}) / (A_{k-1} + A_{k+1}), with A_{-1} = A_{n+1} = 0
// and 0/0 read as 0.
struct DistanceTable {
    int n = 0;
    std::vector<double> c;      // C(n,k) - A_k
    std::vector<double> ratio;  // signed, in [-1, 1]
};

inline DistanceTable make_distance_table(int n) {
    WeightDistribution wd = weight_distribution_closed_form(n);
    auto coeff = [&](int i) -> BigInt {
        if (i < 0 || i > n) return 0;
        return wd.coefficients[i];
    };
    DistanceTable t;
    t.n = n;
    t.c.resize(n + 1);
    t.ratio.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        t.c[k] = static_cast<double>(binomial(n, k) - coeff(k));
        BigInt num = coeff(k + 1) - coeff(k - 1);
        BigInt den = coeff(k - 1) + coeff(k + 1);
        t.ratio[k] = den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    }
    return t;
}

inline const DistanceTable& distance_table(int n) {
    thread_local DistanceTable cached;
    if (cached.n != n) cached = make_distance_table(n);
    return cached;
}

}  // namespace detail

/// Expected per-bit error rate after one decoding round:
///   n*p1 = sum_k (C(n,k) - A_k) * ratio_k * p^k (1-p)^(n-k) + n*p.
/// Evaluated in binary64 for n <= 63; wider codes go through 50-digit
/// floats because the binomials overflow double.
inline double p1_distance_model(int n, double p) {
    if (!is_hamming_length(n)) throw ParameterError("p1_distance_model: n must be 2^m - 1, m >= 2");
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("p1_distance_model: p must be in [0, 1]");
    const detail::DistanceTable& t = detail::distance_table(n);
    if (n <= 63) {
        double s = 0.0;
        for (int k = 0; k <= n; ++k) {
            if (t.c[k] == 0.0 || t.ratio[k] == 0.0) continue;
            s += t.c[k] * t.ratio[k] * std::pow(p, k) * std::pow(1.0 - p, n - k);
        }
        return (s + n * p) / n;
    }
    WeightDistribution wd = weight_distribution_closed_form(n);
    BigFloat s = 0, bp = p, bq = 1.0 - p;
    for (int k = 0; k <= n; ++k) {
        BigInt c = binomial(n, k) - wd.coefficients[k];
        BigInt num = (k + 1 <= n ? wd.coefficients[k + 1] : BigInt(0)) -
                     (k - 1 >= 0 ? wd.coefficients[k - 1] : BigInt(0));
        BigInt den = (k - 1 >= 0 ? wd.coefficients[k - 1] : BigInt(0)) +
                     (k + 1 <= n ? wd.coefficients[k + 1] : BigInt(0));
        if (c == 0 || den == 0 || num == 0) continue;
        s += BigFloat(c) * BigFloat(num) / BigFloat(den) * pow(bp, k) * pow(bq, n - k);
    }
    s = (s + BigFloat(n) * bp) / n;
    return s.convert_to<double>();
}

/// 1 + np - 2p^n - (1 - p + 2np)(1-p)^(n-1): upper bound on the expected
/// errors per block after one round, with every no-codeword pattern charged
/// a +1-error correction. Plain binary64, one rounding
/// per step.
inline double block_error_bound(int n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("block_error_bound: p must be in [0, 1]");
    if (n < 3) throw ParameterError("block_error_bound: n must be >= 3");
    const double pw_pn = std::pow(p, n);
    const double pw_q = std::pow(1.0 - p, n - 1);
    const double head = 1.0 + n * p;
    const double mid = head - 2.0 * pw_pn;
    const double factor = 1.0 - p + 2.0 * n * p;
    const double tail = factor * pw_q;
    return mid - tail;
}

/// The quadratic form n(n-1)p^2 [1 + (1-p)^(n-2) / 2] dominating the
/// block error bound on (0, 1).
inline double block_error_bound_quadratic(int n, double p) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("block_error_bound_quadratic: p must be in (0, 1)");
    return n * (n - 1.0) * p * p * (1.0 + 0.5 * std::pow(1.0 - p, n - 2));
}

/// p < 1 / ((n-1) [1 + (1-p)^(n-2) / 2]): the regime where the
/// concatenation contracts.
inline bool contraction_condition_holds(int n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("contraction_condition_holds: p must be in [0, 1]");
    if (n < 3) throw ParameterError("contraction_condition_holds: n must be >= 3");
    return p < 1.0 / ((n - 1.0) * (1.0 + 0.5 * std::pow(1.0 - p, n - 2)));
}

/// p_th = 2 / (3(n-1)).
inline double contraction_threshold(int n) {
    if (n < 3) throw ParameterError("contraction_threshold: n must be >= 3");
    return 2.0 / (3.0 * (n - 1.0));
}

/// Fixed points of p1(p) = p on [0, 1]: a 10^4-cell scan of p1(p) - p with
/// bisection on each sign change.
inline std::vector<double> fixed_points(int n) {
    if (n != 7 && n != 15) throw ParameterError("fixed_points: supported lengths are 7 and 15");
    auto f = [n](double p) { return p1_distance_model(n, p) - p; };

    constexpr int kCells = 10000;
    std::vector<double> roots;
    double prev_x = 0.0, prev_f = f(0.0);
    if (prev_f == 0.0) roots.push_back(0.0);
    for (int i = 1; i <= kCells; ++i) {
        double x = static_cast<double>(i) / kCells;
        double fx = f(x);
        if (fx == 0.0) {
            roots.push_back(x);
        } else if (prev_f != 0.0 && ((prev_f < 0) != (fx < 0))) {
            double lo = prev_x, hi = x, flo = prev_f;
            while (hi - lo > 1e-12) {
                double mid = 0.5 * (lo + hi);
                double fm = f(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((flo < 0) != (fm < 0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = fx;
    }
    return roots;
}

/// Intervals of p in [0, 1] where one round strictly lowers the error rate
/// (p1 < p), bounded by the fixed points.
inline std::vector<std::pair<double, double>> usable_interval(int n) {
    std::vector<double> roots = fixed_points(n);
    std::vector<std::pair<double, double>> usable;
    for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
        double mid = 0.5 * (roots[i] + roots[i + 1]);
        if (p1_distance_model(n, mid) < mid) usable.emplace_back(roots[i], roots[i + 1]);
    }
    return usable;
}

// A single-round model bound to a code length; eval(p) is the predicted
// (DistanceModel) or bounding (WorstCaseBound) error rate after one round.
struct RoundModel {
    int n = 0;
    WeightDistribution weights;
    ModelKind model_kind = ModelKind::WorstCaseBound;

    double eval(double p) const {
        switch (model_kind) {
            case ModelKind::DistanceModel: return p1_distance_model(n, p);
            case ModelKind::WorstCaseBound: return block_error_bound(n, p) / n;
        }
        throw ParameterError("RoundModel: unknown model kind");
    }
};

inline RoundModel make_round_model(int n, ModelKind kind) {
    RoundModel m;
    m.n = n;
    m.weights = weight_distribution_closed_form(n);
    m.model_kind = kind;
    return m;
}

struct ReconciliationPlan {
    CodeParams code;
    int depth_l = 0;
    double channel_p = 0.0;
    double predicted_alpha = 0.0;
    ModelKind model = ModelKind::WorstCaseBound;
    BigRational eta_exact;                               // (k_info / n)^depth_l
    std::vector<std::pair<double, double>> per_round;    // (error rate, left rate)

    double eta() const { return eta_exact.convert_to<double>(); }
};

inline BigRational left_rate_exact(const CodeParams& code, int depth) {
    BigInt num = 1, den = 1;
    for (int i = 0; i < depth; ++i) {
        num *= code.k_info;
        den *= code.n;
    }
    return BigRational(num, den);
}

inline constexpr int kMaxPlanRounds = 64;

/// Iterates the chosen single-round model until the rate reaches
/// target_alpha, recording the per-round rates and the surviving fraction.
inline ReconciliationPlan plan(const CodeParams& code, double p, double target_alpha,
                               ModelKind model) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("plan: p must be in (0, 1)");
    if (!(target_alpha > 0.0 && target_alpha < p))
        throw ParameterError("plan: target_alpha must be in (0, p)");
    if (model == ModelKind::WorstCaseBound && !contraction_condition_holds(code.n, p))
        throw PlanningError(
            "plan: p = " + std::to_string(p) + " violates the contraction condition for n = " +
                std::to_string(code.n) + " (threshold " +
                std::to_string(contraction_threshold(code.n)) + ")",
            0);

    ReconciliationPlan out;
    out.code = code;
    out.channel_p = p;
    out.model = model;

    RoundModel round_model = make_round_model(code.n, model);
    double rate = p;
    for (int round = 1; round <= kMaxPlanRounds; ++round) {
        double next = round_model.eval(rate);
        if (next >= rate)
            throw PlanningError("plan: round " + std::to_string(round) +
                                    " does not decrease the error rate (" + std::to_string(rate) +
                                    " -> " + std::to_string(next) + ")",
                                round);
        rate = next;
        out.per_round.emplace_back(rate, left_rate_exact(code, round).convert_to<double>());
        if (rate <= target_alpha) {
            out.depth_l = round;
            out.predicted_alpha = rate;
            out.eta_exact = left_rate_exact(code, round);
            return out;
        }
    }
    throw PlanningError("plan: no convergence within " + std::to_string(kMaxPlanRounds) + " rounds",
                        kMaxPlanRounds);
}

struct LeakageAccount {
    double eavesdrop_rate_eta_adv = 0.0;
    std::uint64_t raw_len_n_bits = 0;
    int depth_l = 0;
    double leaked_bits_final = 0.0;
    double leakage_rate_final = 0.0;
};

/// After l rounds, (k/n)^l * rate * raw_len eavesdropped bits survive; the
/// leakage *rate* of the surviving string is unchanged.
inline LeakageAccount leakage(double eavesdrop_rate, std::uint64_t raw_len, const CodeParams& code,
                              int depth_l) {
    if (!(eavesdrop_rate >= 0.0 && eavesdrop_rate <= 1.0))
        throw ParameterError("leakage: rate must be in [0, 1]");
    if (depth_l < 0) throw ParameterError("leakage: depth must be >= 0");
    LeakageAccount acc;
    acc.eavesdrop_rate_eta_adv = eavesdrop_rate;
    acc.raw_len_n_bits = raw_len;
    acc.depth_l = depth_l;
    acc.leaked_bits_final =
        left_rate_exact(code, depth_l).convert_to<double>() * eavesdrop_rate * static_cast<double>(raw_len);
    acc.leakage_rate_final = eavesdrop_rate;
    return acc;
}

struct CurveRow {
    double p = 0.0;
    double p1 = 0.0;
};

inline std::vector<CurveRow> curve_points(int n, int samples) {
    if (samples < 2) throw ParameterError("curve_points: samples must be >= 2");
    std::vector<CurveRow> rows;
    rows.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        double p = static_cast<double>(i) / (samples - 1);
        rows.push_back({p, p1_distance_model(n, p)});
    }
    return rows;
}

inline std::string format_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// CSV: header "p,p1", 12 significant digits, newline-terminated rows.
inline void curve_csv(int n, int samples, std::ostream& os) {
    os << "p,p1\n";
    for (const CurveRow& r : curve_points(n, samples))
        os << format_sig12(r.p) << ',' << format_sig12(r.p1) << '\n';
}

/// Cross-check of the closed-form weight-ratio identity
///   (A_{k+1} - A_{k-1}) / (A_{k-1} + A_{k+1})
///     = [C(n,k+1) - C(n,k-1) + n s C((n+1)/2, f)]
///     / [C(n,k+1) + C(n,k-1) + n s C((n+1)/2, f) (1 - 4f/(n+1))],
/// s = (-1)^ceil((k+1)/2), f = floor((k+1)/2), against the ratio computed
/// directly from the weight distribution. Exact rational comparison for
/// every k; both sides read 0/0 as 0.
inline bool weight_ratio_identity_check(int n) {
    if (n != 7 && n != 15 && n != 31)
        throw ParameterError("weight_ratio_identity_check: supported lengths are 7, 15, 31");
    WeightDistribution wd = weight_distribution_closed_form(n);
    auto coeff = [&](int i) -> BigInt {
        if (i < 0 || i > n) return 0;
        return wd.coefficients[i];
    };
    for (int k = 0; k <= n; ++k) {
        BigInt dnum = coeff(k + 1) - coeff(k - 1);
        BigInt dden = coeff(k - 1) + coeff(k + 1);
        bool direct_is_convention_zero = (dden == 0);
        if (direct_is_convention_zero && dnum != 0) return false;

        int f = (k + 1) / 2;
        int sign = ((k + 2) / 2) % 2 == 0 ? 1 : -1;  // (-1)^ceil((k+1)/2)
        BigInt corr = BigInt(n) * binomial((n + 1) / 2, f) * sign;
        BigRational cnum = BigRational(binomial(n, k + 1) - binomial(n, k - 1) + corr);
        BigRational cden = BigRational(binomial(n, k + 1) + binomial(n, k - 1)) +
                           BigRational(corr) * (BigRational(1) - BigRational(4 * f, n + 1));

        if (direct_is_convention_zero) {
            // The closed form must agree with the 0 convention: 0/0 or 0/x.
            if (cnum != 0) return false;
            continue;
        }
        if (cden == 0) return false;
        if (BigRational(dnum, dden) != cnum / cden) return false;
    }
    return true;
}

}  // namespace qir
