#include "modrec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "modrec/error.hpp"

namespace modrec {

namespace {

constexpr double kNegativeVarianceTolerance = 1e-9;

double clamp_variance(double v, const char* formula) {
    if (v < -kNegativeVarianceTolerance)
        throw Error(std::string(formula) + ": negative variance " + std::to_string(v));
    return std::max(v, 0.0);
}

}  // namespace

ConstellationMoments constellation_moments(const LinearScheme& scheme) {
    if (scheme.constellation.empty()) throw InvalidArgument("empty constellation");
    double m2 = 0.0;
    double m4 = 0.0;
    for (const Complex& c : scheme.constellation) {
        const double a2 = std::norm(c);
        m2 += a2;
        m4 += a2 * a2;
    }
    const double n = static_cast<double>(scheme.constellation.size());
    return {m2 / n, m4 / n};
}

PulseCorrSums pulse_corr_sums(const RrcPulse& pulse, const SymbolTiming& timing, long k,
                              std::optional<SymbolRange> symbols) {
    const double period = timing.period();
    const double u = (static_cast<double>(k) - timing.delay()) / period;
    const double u_prev = u - 1.0 / period;
    long n_lo = static_cast<long>(std::ceil(u_prev - pulse.span_symbols));
    long n_hi = static_cast<long>(std::floor(u + pulse.span_symbols));
    if (symbols) {
        n_lo = std::max(n_lo, symbols->first);
        n_hi = std::min(n_hi, symbols->last);
    }
    PulseCorrSums s;
    for (long n = n_lo; n <= n_hi; ++n) {
        const double p = rrc_eval(u - n, pulse);
        const double pm = rrc_eval(u_prev - n, pulse);
        s.s_pp += p * pm;
        s.s_p2 += p * p;
        s.s_pm2 += pm * pm;
        s.s_sq += (p * pm) * (p * pm);
    }
    return s;
}

double q_integral(long m, long k, const SymbolTiming& timing, double tone_increment) {
    const double b = static_cast<double>(k) - timing.delay();
    return tone_increment * symbol_overlap(b - 1.0, b, m, timing.period());
}

std::vector<double> bfsk_q_values(long k, const SymbolTiming& timing, double tone_increment) {
    const double b = static_cast<double>(k) - timing.delay();
    const double period = timing.period();
    std::vector<double> q;
    for (long m = static_cast<long>(std::floor((b - 1.0) / period));
         m <= static_cast<long>(std::floor(b / period)); ++m) {
        const double v = q_integral(m, k, timing, tone_increment);
        if (v != 0.0) q.push_back(v);
    }
    return q;
}

double mean_im_linear(double delta_prime, const PulseCorrSums& sums, const ConstellationMoments& moments) {
    return std::sin(delta_prime) * sums.s_pp * moments.m2;
}

double mean_im_bfsk(double delta_prime, std::span<const double> q) {
    double prod = 1.0;
    for (double v : q) prod *= std::cos(v);
    return std::sin(delta_prime) * prod;
}

double var_im_bpsk(double delta_prime, const PulseCorrSums& sums) {
    const double s = std::sin(delta_prime);
    const double v = s * s * (sums.s_pp * sums.s_pp + sums.s_p2 * sums.s_pm2 - 2.0 * sums.s_sq);
    return clamp_variance(v, "var_im_bpsk");
}

double var_im_qampsk(double delta_prime, const PulseCorrSums& sums, const ConstellationMoments& moments) {
    const double s = std::sin(delta_prime);
    const double m2sq = moments.m2 * moments.m2;
    const double v = s * s * ((moments.m4 - 2.0 * m2sq) * sums.s_sq + m2sq * sums.s_pp * sums.s_pp) +
                     0.5 * m2sq * (sums.s_p2 * sums.s_pm2 - sums.s_pp * sums.s_pp);
    return clamp_variance(v, "var_im_qampsk");
}

double var_im_bfsk(double delta_prime, std::span<const double> q) {
    double prod_cos2q = 1.0;
    double prod_cossq = 1.0;
    for (double v : q) {
        prod_cos2q *= std::cos(2.0 * v);
        prod_cossq *= std::cos(v) * std::cos(v);
    }
    const double s = std::sin(delta_prime);
    return 0.5 - 0.5 * prod_cos2q + s * s * (prod_cos2q - prod_cossq);
}

namespace {

const LinearSource& as_linear(const OracleSource& source) {
    if (const auto* l = std::get_if<LinearSource>(&source)) return *l;
    throw InvalidArgument("formula needs a linear (PSK/QAM) source");
}

double bfsk_increment(const OracleSource& source) {
    const auto* c = std::get_if<CpfskScheme>(&source);
    if (!c || c->order != 2) throw InvalidArgument("formula needs a BFSK source");
    return c->tone_offsets[1];
}

bool is_variance(OracleFormula f) {
    return f == OracleFormula::VarBpsk || f == OracleFormula::VarQamPsk || f == OracleFormula::VarBfsk;
}

}  // namespace

double oracle_value(OracleFormula formula, const OracleSource& source, const SymbolTiming& timing,
                    double delta_prime, long k) {
    switch (formula) {
        case OracleFormula::MeanLinear: {
            const auto& l = as_linear(source);
            return mean_im_linear(delta_prime, pulse_corr_sums(l.pulse, timing, k),
                                  constellation_moments(l.scheme));
        }
        case OracleFormula::VarBpsk: {
            const auto& l = as_linear(source);
            if (l.scheme.kind != Modulation::BPSK) throw InvalidArgument("BPSK variance needs a BPSK source");
            return var_im_bpsk(delta_prime, pulse_corr_sums(l.pulse, timing, k));
        }
        case OracleFormula::VarQamPsk: {
            const auto& l = as_linear(source);
            if (l.scheme.kind == Modulation::BPSK)
                throw InvalidArgument("BPSK is not invariant to pi/2 rotation");
            return var_im_qampsk(delta_prime, pulse_corr_sums(l.pulse, timing, k),
                                 constellation_moments(l.scheme));
        }
        case OracleFormula::MeanBfsk:
            return mean_im_bfsk(delta_prime, bfsk_q_values(k, timing, bfsk_increment(source)));
        case OracleFormula::VarBfsk:
            return var_im_bfsk(delta_prime, bfsk_q_values(k, timing, bfsk_increment(source)));
    }
    throw InvalidArgument("unknown oracle formula");
}

namespace {

// Symbols overlapping the lag interval (k-1, k].
std::pair<long, long> bfsk_symbol_span(long k, const SymbolTiming& timing) {
    const double b = static_cast<double>(k) - timing.delay();
    return {static_cast<long>(std::floor((b - 1.0) / timing.period())),
            static_cast<long>(std::floor(b / timing.period()))};
}

// Cov(Im w[j], Im w[k]) for BFSK. Im w = sin(dp + sum_m a_m q_m) with
// independent equiprobable a_m = +-1, so E[e^{i sum a_m d_m}] = prod cos d_m.
double bfsk_covariance(long j, long k, const SymbolTiming& timing, double increment, double delta_prime) {
    const auto [jl, jh] = bfsk_symbol_span(j, timing);
    const auto [kl, kh] = bfsk_symbol_span(k, timing);
    double diff = 1.0, sum = 1.0, cj = 1.0, ck = 1.0;
    for (long m = std::min(jl, kl); m <= std::max(jh, kh); ++m) {
        const double qj = q_integral(m, j, timing, increment);
        const double qk = q_integral(m, k, timing, increment);
        diff *= std::cos(qj - qk);
        sum *= std::cos(qj + qk);
        cj *= std::cos(qj);
        ck *= std::cos(qk);
    }
    const double s = std::sin(delta_prime);
    return 0.5 * diff - 0.5 * std::cos(2.0 * delta_prime) * sum - s * s * cj * ck;
}

// Variance of the time average of Im w[k], k = 1..n-1.
double bfsk_time_average_variance(const SymbolTiming& timing, double increment, double delta_prime, long n) {
    double total = 0.0;
    for (long j = 1; j < n; ++j) {
        const long last_symbol = bfsk_symbol_span(j, timing).second;
        total += bfsk_covariance(j, j, timing, increment, delta_prime);
        for (long k = j + 1; k < n && bfsk_symbol_span(k, timing).first <= last_symbol; ++k)
            total += 2.0 * bfsk_covariance(j, k, timing, increment, delta_prime);
    }
    const double count = static_cast<double>(n - 1);
    return total / (count * count);
}

}  // namespace

double time_average_prediction(OracleFormula formula, const OracleSource& source,
                               const SymbolTiming& timing, double delta_prime, std::size_t n_samples) {
    if (n_samples < 2) throw InvalidArgument("time_average_prediction: need at least 2 samples");
    const long k_end = static_cast<long>(n_samples);
    const double count = static_cast<double>(k_end - 1);
    double sum = 0.0;
    if (!is_variance(formula)) {
        for (long k = 1; k < k_end; ++k) sum += oracle_value(formula, source, timing, delta_prime, k);
        return sum / count;
    }
    if (formula != OracleFormula::VarBfsk)
        throw InvalidArgument("time_average_prediction: sample variance needs cross-sample covariances, "
                              "available for BFSK only");
    if (n_samples < 3) throw InvalidArgument("time_average_prediction: sample variance needs at least 3 samples");

    // E[s^2] = N/(N-1) (mean per-k variance + spread of per-k means - Var(time average)).
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(k_end - 1));
    double mean_sum = 0.0;
    for (long k = 1; k < k_end; ++k) {
        sum += oracle_value(formula, source, timing, delta_prime, k);
        means.push_back(oracle_value(OracleFormula::MeanBfsk, source, timing, delta_prime, k));
        mean_sum += means.back();
    }
    const double grand = mean_sum / count;
    double spread = 0.0;
    for (double m : means) spread += (m - grand) * (m - grand);
    const double var_of_average = bfsk_time_average_variance(timing, bfsk_increment(source), delta_prime, k_end);
    return count / (count - 1.0) * (sum / count + spread / count - var_of_average);
}

}  // namespace modrec
