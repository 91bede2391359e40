#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "bcplab/errors.hpp"
#include "bcplab/rational.hpp"

namespace bcplab {

/// Per-stage upper/lower thresholds of the hardening pipeline:
///   d = after add-common, s = after squaring-and-sampling, a = after add-red.
/// j2star is the idealized lower threshold before the alpha correction.
struct StageThresholds {
    double j1d = 0, j2d = 0;
    double j1s = 0, j2s = 0;
    double j1a = 0, j2a = 0;
    double j2star = 0;
};

/// Every derived constant of one hardening pipeline run. Floats are 64-bit;
/// x2 is kept exact because it enters the sample-size formula with huge powers.
struct ParamPlan {
    double delta = 0;
    std::uint64_t T = 0, m = 0, n = 0;
    double j1 = 0, j2 = 0;

    double gamma = 0;
    bool gamma_overridden = false;  // caller pinned gamma instead of the derived value
    std::uint32_t i = 0;
    double alpha = 1.0;
    double epsilon_bound = 0;       // NaN when gamma sits above delta/(20T)
    bool hardness_applies = false;  // j1 <= j2^(1-epsilon_bound)
    Rational x2;
    std::uint64_t universe_after_g = 0;
    std::vector<std::uint64_t> sample_sizes;
    std::uint64_t sample_cap = 0;
    std::string sample_size_formula;
    StageThresholds stage_thresholds;
    double universe_bound = 0;
};

inline void require_plan_domain(double delta, std::uint64_t T) {
    if (!(0.0 < delta && delta <= 1.0)) throw ValidationError("delta must be in (0,1]");
    if (T < 1) throw ValidationError("T must be positive");
}

/// Thresholds after add-common with dilution factor delta.
inline std::pair<double, double> stage_thresholds_after_g(double delta, std::uint64_t T) {
    require_plan_domain(delta, T);
    double Td = static_cast<double>(T);
    double j1d = delta / Td + 1.0 - delta;
    double j2d = (delta / (2.0 * Td) + 1.0 - delta) / (1.0 + delta / (2.0 * Td));
    return {j1d, j2d};
}

namespace detail {
inline double pow_2i(double base, std::uint32_t i) { return std::pow(base, std::exp2(i)); }
}  // namespace detail

/// Thresholds after i rounds of squaring-and-sampling, including the
/// worst-case (1±gamma)/(1∓4gamma) sampling distortion.
inline std::pair<double, double> stage_thresholds_after_f(double delta, std::uint64_t T,
                                                          std::uint32_t i, double gamma) {
    require_plan_domain(delta, T);
    if (!(0.0 <= gamma && gamma < 0.25)) throw ValidationError("gamma must be in [0, 1/4)");
    auto [j1d, j2d] = stage_thresholds_after_g(delta, T);
    if (i == 0) return {j1d, j2d};
    double Td = static_cast<double>(T);
    double low = detail::pow_2i((1.0 - gamma) / (1.0 + 4.0 * gamma), i);
    double up = detail::pow_2i((1.0 + gamma) / (1.0 - 4.0 * gamma), i);
    double j1s = low * detail::pow_2i(delta / Td + 1.0 - delta, i);
    double A = detail::pow_2i(1.0 / (2.0 * Td) + 1.0 / delta - 1.0, i);
    double B = detail::pow_2i(1.0 / delta, i);
    double C = detail::pow_2i(1.0 / Td + 1.0 / delta - 1.0, i);
    double j2s = up * A / (B + C - A);
    return {j1s, j2s};
}

/// Largest i whose post-squaring upper threshold still clears j1, and the
/// matching dilution alpha = j1/j1s(i). Falls back to i=0 (no squaring) when
/// j1 already reaches j1d, or when a single squaring overshoots.
inline std::pair<std::uint32_t, double> choose_i_and_alpha(double delta, std::uint64_t T,
                                                           double gamma, double j1) {
    auto [j1d, j2d] = stage_thresholds_after_g(delta, T);
    (void)j2d;
    if (!(0.0 < j1 && j1 < 1.0)) throw ValidationError("j1 must be in (0,1)");
    if (j1 >= j1d) return {0, j1 / j1d};
    std::uint32_t best = 0;
    for (std::uint32_t i = 1; i <= 40; ++i) {
        double j1s = stage_thresholds_after_f(delta, T, i, gamma).first;
        if (j1s >= j1) best = i;
        else break;  // j1s is strictly decreasing in i
    }
    double j1s = best == 0 ? j1d : stage_thresholds_after_f(delta, T, best, gamma).first;
    return {best, j1 / j1s};
}

/// Power inequalities that the envelope algebra relies on. The master
/// condition (1+gamma)^(2^i) <= 1 + 1.5 * 2^i * gamma implies the symmetric
/// comparison 2(1+gamma)^e <= (1+4gamma)^e + (1-gamma)^e via Bernoulli; both
/// hold for gamma < 1/2^(i+1). Comparisons carry 1e-12 slack.
inline bool check_gamma_inequalities(std::uint32_t i, double gamma) {
    if (i < 1) throw ValidationError("check_gamma_inequalities needs i ≥ 1");
    if (!(gamma > 0.0)) throw ValidationError("check_gamma_inequalities needs gamma > 0");
    const double slack = 1e-12;
    double e = std::exp2(i);
    double up = std::pow(1.0 + gamma, e);
    double lo = std::pow(1.0 - gamma, e);
    double up4 = std::pow(1.0 + 4.0 * gamma, e);
    return up <= 1.0 + 1.5 * e * gamma + slack &&
           2.0 * up <= up4 + lo + slack;
}

/// Intersection size realizing the lower threshold on the fixed-size shape
/// after add-common: m/2 + Tm(1/delta - 1).
inline Rational compute_x2(double delta, std::uint64_t T, std::uint64_t m) {
    require_plan_domain(delta, T);
    if (m < 1) throw ValidationError("m must be positive");
    Rational dd(delta);
    return Rational(BigInt(m), BigInt(2)) + Rational(BigInt(T * m)) * (1 / dd - 1);
}

/// Sample size making one subsampling step preserve a relative weight m'
/// within (1±gamma), per the Chernoff bound: 30 ln(n) / (gamma² m'²).
inline std::uint64_t concentration_sample_size(std::uint64_t n, double gamma, double m_prime) {
    if (n < 2 || !(gamma > 0.0) || !(m_prime > 0.0))
        throw ValidationError("concentration_sample_size domain violation");
    return static_cast<std::uint64_t>(
        std::ceil(30.0 * std::log(static_cast<double>(n)) / (gamma * gamma * m_prime * m_prime)));
}

inline constexpr std::uint64_t kDefaultSampleCap = 0x7fffffffULL;

/// s_j = ceil(30 ln(n) d^(2^j) / (gamma² (1−gamma)^(2^j) x2^(2^j))) for each
/// step j, evaluated in exact arithmetic. The (1−gamma)^(2^j) exponent is the
/// conservative variant (larger s_j than the (2^j − 2) alternative).
inline std::vector<std::uint64_t> compute_sample_sizes(std::uint64_t n, double gamma,
                                                       std::uint32_t iterations,
                                                       std::uint64_t d_after_g,
                                                       const Rational& x2,
                                                       std::uint64_t cap = kDefaultSampleCap) {
    if (iterations == 0) return {};
    if (n < 2 || !(gamma > 0.0 && gamma < 1.0)) throw ValidationError("sample-size domain violation");
    if (!(x2 > 0)) throw ValidationError("x2 must be positive");
    Rational num_scale(30.0 * std::log(static_cast<double>(n)));
    Rational g2(gamma * gamma);
    Rational one_minus(1.0 - gamma);
    std::vector<std::uint64_t> sizes;
    sizes.reserve(iterations);
    for (std::uint32_t j = 1; j <= iterations; ++j) {
        Rational dj(pow2i(BigInt(d_after_g), j));
        Rational s = num_scale * dj /
                     (g2 * Rational(pow2i(numerator(one_minus), j), pow2i(denominator(one_minus), j)) *
                      Rational(pow2i(numerator(x2), j), pow2i(denominator(x2), j)));
        BigInt whole = numerator(s) / denominator(s);
        if (Rational(whole) < s) whole += 1;
        if (whole > BigInt(cap))
            throw CapacityError("sample size at step " + std::to_string(j) +
                                " exceeds the configured cap");
        sizes.push_back(whole.convert_to<std::uint64_t>());
    }
    return sizes;
}

/// Hardness exponent: epsilon = 1 − log(q²)/log(q·r). Independent of i since
/// the 2^i factors cancel between numerator and denominator.
inline double epsilon_bound(double delta, std::uint64_t T, double gamma) {
    require_plan_domain(delta, T);
    if (!(0.0 <= gamma && gamma < 0.25)) throw ValidationError("gamma must be in [0, 1/4)");
    if (gamma >= delta / (20.0 * static_cast<double>(T)))
        throw ValidationError("epsilon bound requires gamma < delta/(20T)");
    double Td = static_cast<double>(T);
    double q = ((1.0 - gamma) / (1.0 + 4.0 * gamma)) * (delta / Td + 1.0 - delta);
    double r = ((1.0 + gamma) / (1.0 - 4.0 * gamma)) * (delta / (2.0 * Td) + 1.0 - delta);
    if (q * r >= 1.0) throw ValidationError("epsilon bound degenerate: q·r ≥ 1");
    return 1.0 - std::log(q * q) / std::log(q * r);
}

namespace detail {

inline StageThresholds make_stage_thresholds(double delta, std::uint64_t T, std::uint32_t i,
                                             double gamma, double alpha, double j1) {
    StageThresholds st;
    auto [j1d, j2d] = stage_thresholds_after_g(delta, T);
    st.j1d = j1d;
    st.j2d = j2d;
    auto [j1s, j2s] = stage_thresholds_after_f(delta, T, i, gamma);
    st.j1s = j1s;
    st.j2s = j2s;
    st.j1a = j1;  // alpha * j1s = j1 by construction
    double Td = static_cast<double>(T);
    if (i == 0) {
        // No squaring round: the distortion factors are absent.
        st.j2star = delta / (2.0 * Td) + 1.0 - delta;
        double A = 1.0 / (2.0 * Td) + 1.0 / delta - 1.0;
        double B = 1.0 / delta;
        double C = 1.0 / Td + 1.0 / delta - 1.0;
        st.j2a = A / (B / alpha + C - A);
    } else {
        double up = pow_2i((1.0 + gamma) / (1.0 - 4.0 * gamma), i);
        st.j2star = up * pow_2i(delta / (2.0 * Td) + 1.0 - delta, i);
        double A = pow_2i(1.0 / (2.0 * Td) + 1.0 / delta - 1.0, i);
        double B = pow_2i(1.0 / delta, i);
        double C = pow_2i(1.0 / Td + 1.0 / delta - 1.0, i);
        st.j2a = up * A / (B / alpha + C - A);
    }
    return st;
}

inline std::uint64_t ceil_positive(const Rational& r) {
    BigInt whole = numerator(r) / denominator(r);
    if (Rational(whole) < r) whole += 1;
    return whole.convert_to<std::uint64_t>();
}

}  // namespace detail

/// ell for add-common: ceil(maxsize · (1/delta − 1)).
inline std::uint64_t ell_for_delta(std::uint64_t max_size, double delta) {
    if (!(0.0 < delta && delta <= 1.0)) throw ValidationError("delta must be in (0,1]");
    Rational dd(delta);
    return detail::ceil_positive(Rational(BigInt(max_size)) * (1 / dd - 1));
}

/// ell for add-red: ceil(maxsize · (1/alpha − 1)).
inline std::uint64_t ell_for_alpha(std::uint64_t max_size, double alpha) {
    if (!(0.0 < alpha && alpha <= 1.0)) throw ValidationError("alpha must be in (0,1]");
    Rational aa(alpha);
    return detail::ceil_positive(Rational(BigInt(max_size)) * (1 / aa - 1));
}

/// Composes the full calculation: add-common thresholds, maximal i, gamma
/// (half its admissible ceiling, interleaved with i to a fixed point), alpha,
/// x2, sample sizes, epsilon and the universe bound. When gamma_override is
/// set, that gamma is pinned instead; the plan then only promises the
/// envelope algebra (gamma inequalities gate), not the epsilon bound.
inline ParamPlan build_plan(double delta, std::uint64_t T, std::uint64_t m, std::uint64_t n,
                            double j1, double j2,
                            std::optional<double> gamma_override = std::nullopt,
                            std::uint64_t sample_cap = kDefaultSampleCap) {
    require_plan_domain(delta, T);
    if (m < 1 || n < 2) throw ValidationError("need m ≥ 1 and n ≥ 2");
    if (!(0.0 < j2 && j2 < j1)) throw ValidationError("need 0 < j2 < j1");
    if (!(j1 < 1.0 - delta + 1e-15))
        throw ValidationError("need j1 < 1 − delta");

    ParamPlan p;
    p.delta = delta;
    p.T = T;
    p.m = m;
    p.n = n;
    p.j1 = j1;
    p.j2 = j2;
    p.sample_cap = sample_cap;

    double gamma_ceiling = delta / (20.0 * static_cast<double>(T));
    std::uint32_t i = 0;
    double alpha = 1.0, gamma = 0.0;
    if (gamma_override) {
        gamma = *gamma_override;
        if (!(gamma > 0.0 && gamma < 0.25)) throw ValidationError("gamma override must be in (0, 1/4)");
        std::tie(i, alpha) = choose_i_and_alpha(delta, T, gamma, j1);
        p.gamma_overridden = true;
    } else {
        // gamma depends on i through its ceiling, i depends on gamma through
        // j1s; iterate to a joint fixed point.
        std::tie(i, alpha) = choose_i_and_alpha(delta, T, 0.0, j1);
        bool settled = false;
        for (int round = 0; round < 8; ++round) {
            gamma = 0.5 * std::min(1.0 / std::exp2(i + 1), gamma_ceiling);
            auto [ni, na] = choose_i_and_alpha(delta, T, gamma, j1);
            if (ni == i) {
                alpha = na;
                settled = true;
                break;
            }
            i = ni;
            alpha = na;
        }
        if (!settled) throw ValidationError("gamma/i fixed point did not converge");
    }

    if (i >= 1) {
        if (!(gamma < 1.0 / std::exp2(i + 1)))
            throw ValidationError("gamma must stay below 1/2^(i+1)");
        if (!check_gamma_inequalities(i, gamma))
            throw ValidationError("gamma fails the power-inequality gate");
    }
    p.gamma = gamma;
    p.i = i;
    p.alpha = alpha;

    p.x2 = compute_x2(delta, T, m);
    p.universe_after_g = 2 * T * m + ell_for_delta(T * m, delta);
    p.sample_sizes = compute_sample_sizes(n, gamma, i, p.universe_after_g, p.x2, sample_cap);
    p.sample_size_formula = "ceil(30 ln(n) d^(2^j) / (gamma^2 (1-gamma)^(2^j) x2^(2^j)))";
    p.stage_thresholds = detail::make_stage_thresholds(delta, T, i, gamma, alpha, j1);

    if (gamma < gamma_ceiling) {
        p.epsilon_bound = epsilon_bound(delta, T, gamma);
        p.hardness_applies = j1 <= std::pow(j2, 1.0 - p.epsilon_bound) + 1e-15;
    } else {
        p.epsilon_bound = std::numeric_limits<double>::quiet_NaN();
        p.hardness_applies = false;
    }

    double last_universe = i == 0 ? static_cast<double>(p.universe_after_g)
                                  : static_cast<double>(p.sample_sizes.back());
    p.universe_bound = last_universe / alpha;
    return p;
}

/// Closed form s_i/alpha; the constructed instance never exceeds it.
inline double universe_bound(const ParamPlan& plan) { return plan.universe_bound; }

}  // namespace bcplab
