#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <fmt/format.h>

#include "modrec/error.hpp"
#include "modrec/experiment.hpp"
#include "modrec/oracle.hpp"
#include "modrec/rng.hpp"
#include "parallel.hpp"

namespace modrec {

namespace {

constexpr double kAbsoluteSlack = 1e-12;

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0;
    double se_mean = 0.0;
    double se_variance = 0.0;
};

// Neumaier-compensated sum. Plain summation of 10^5 near-equal values
// biases the mean by ~1e-12, which matters when the true spread is zero.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

SampleStats sample_stats(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    CompensatedSum sum;
    for (double x : v) sum.add(x);
    const double mean = sum.value() / n;
    CompensatedSum sum2, sum4;
    for (double x : v) {
        const double d = (x - mean) * (x - mean);
        sum2.add(d);
        sum4.add(d * d);
    }
    const double m2 = sum2.value();
    const double m4 = sum4.value();
    SampleStats s;
    s.mean = mean;
    s.variance = m2 / (n - 1.0);
    s.se_mean = std::sqrt(s.variance / n);
    // Var(s^2) = (mu4 - sigma^4) / n + 2 sigma^4 / (n (n - 1)). The second
    // term dominates for two-point distributions, where mu4 = sigma^4.
    const double central4 = m4 / n;
    const double pop_var = m2 / n;
    s.se_variance = std::sqrt(std::max(central4 - pop_var * pop_var, 0.0) / n +
                              2.0 * s.variance * s.variance / (n * (n - 1.0)));
    return s;
}

OracleRow make_row(std::string formula, Modulation m, double dp, long k, double analytic, double mc, double se) {
    OracleRow r{std::move(formula), m, dp, k, analytic, mc, se, false};
    r.pass = std::abs(analytic - mc) <= 3.0 * se + kAbsoluteSlack;
    return r;
}

ChannelParams noiseless_channel(double delta_prime) {
    ChannelParams ch;
    ch.delta_prime = delta_prime;
    ch.snr_db = std::numeric_limits<double>::infinity();
    return ch;
}

OracleSource source_for(Modulation m, const OracleCheckConfig& cfg, const SymbolTiming& timing) {
    if (is_cpfsk(m)) return CpfskScheme::make(cpfsk_order(m), cfg.h, timing.period());
    return LinearSource{LinearScheme::make(m), RrcPulse::normalized(cfg.rolloff)};
}

// Clean noiseless realization of n_samples with fixed timing.
Signal fixed_timing_signal(const OracleSource& source, const SymbolTiming& timing, double delta_prime,
                           std::size_t n_samples, Rng& rng) {
    Signal clean;
    if (const auto* scheme = std::get_if<CpfskScheme>(&source)) {
        const auto tones = draw_tones(scheme->order, cpfsk_symbols_needed(timing, n_samples), rng);
        clean = modulate_cpfsk(tones, *scheme, timing, n_samples);
    } else {
        const auto& lin = std::get<LinearSource>(source);
        const auto symbols = draw_symbols(lin.scheme, linear_symbols_needed(lin.pulse, timing, n_samples), rng);
        clean = modulate_linear(symbols, lin.pulse, timing, n_samples);
    }
    return apply_channel(clean, noiseless_channel(delta_prime), rng);
}

// var_im_bfsk with the sign of its carrier-offset term flipped.
double mutated_var_im_bfsk(double delta_prime, std::span<const double> q) {
    double prod_cos2q = 1.0;
    double prod_cossq = 1.0;
    for (double v : q) {
        prod_cos2q *= std::cos(2.0 * v);
        prod_cossq *= std::cos(v) * std::cos(v);
    }
    const double s = std::sin(delta_prime);
    return 0.5 - 0.5 * prod_cos2q - s * s * (prod_cos2q - prod_cossq);
}

void per_k_checks(Modulation m, std::size_t dp_index, double dp, const OracleCheckConfig& cfg,
                  const SymbolTiming& timing, OracleReport& report) {
    if (m == Modulation::FSK4 || m == Modulation::FSK8)
        throw InvalidArgument("closed forms exist for BFSK only");
    const long k_max = *std::max_element(cfg.ks.begin(), cfg.ks.end());
    const auto n_samples = static_cast<std::size_t>(k_max + 1);
    std::vector<std::vector<double>> values(cfg.ks.size(), std::vector<double>(cfg.n_draws));
    const OracleSource source = source_for(m, cfg, timing);

    detail::parallel_for(cfg.n_draws, cfg.threads, [&](std::size_t d) {
        Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(m), dp_index, d}));
        const Signal s = fixed_timing_signal(source, timing, dp, n_samples, rng);
        const Signal w = lag_product(s);
        for (std::size_t i = 0; i < cfg.ks.size(); ++i)
            values[i][d] = w[static_cast<std::size_t>(cfg.ks[i] - 1)].imag();
    });

    const bool fsk = is_cpfsk(m);
    const OracleFormula mean_f = fsk ? OracleFormula::MeanBfsk : OracleFormula::MeanLinear;
    const OracleFormula var_f =
        fsk ? OracleFormula::VarBfsk : (m == Modulation::BPSK ? OracleFormula::VarBpsk : OracleFormula::VarQamPsk);
    const char* mean_name = fsk ? "mean_im_bfsk" : "mean_im_linear";
    const char* var_name = fsk ? "var_im_bfsk" : (m == Modulation::BPSK ? "var_im_bpsk" : "var_im_qampsk");

    for (std::size_t i = 0; i < cfg.ks.size(); ++i) {
        const long k = cfg.ks[i];
        const SampleStats st = sample_stats(values[i]);
        report.rows.push_back(make_row(mean_name, m, dp, k, oracle_value(mean_f, source, timing, dp, k), st.mean,
                                       st.se_mean));
        double var_analytic = oracle_value(var_f, source, timing, dp, k);
        if (fsk && cfg.inject_bfsk_variance_bug)
            var_analytic = mutated_var_im_bfsk(dp, bfsk_q_values(k, timing, std::get<CpfskScheme>(source).tone_offsets[1]));
        report.rows.push_back(make_row(var_name, m, dp, k, var_analytic, st.variance, st.se_variance));
    }
}

// Whole-realization statistics against the time-averaged closed forms.
void time_average_checks(const OracleCheckConfig& cfg, const SymbolTiming& timing, OracleReport& report) {
    constexpr double kResidual = std::numbers::pi / 20.0;
    const std::size_t n_samples = static_cast<std::size_t>(std::floor(600 * timing.period()));
    const std::size_t n = cfg.n_realizations;

    struct Case {
        const char* name;
        Modulation m;
        OracleFormula formula;
        double delta_prime;  // offset seen by Im(w) for the statistic
    };
    const Case cases[] = {
        {"time_avg_f1_bpsk", Modulation::BPSK, OracleFormula::MeanLinear, kResidual + std::numbers::pi / 2},
        {"time_avg_f2_bfsk", Modulation::FSK2, OracleFormula::VarBfsk, kResidual},
    };
    for (std::size_t ci = 0; ci < std::size(cases); ++ci) {
        const Case& c = cases[ci];
        std::vector<double> stat(n);
        const OracleSource source = source_for(c.m, cfg, timing);
        detail::parallel_for(n, cfg.threads, [&](std::size_t d) {
            Rng rng(derive_seed(cfg.seed, {0x7441, ci, d}));
            const FeatureVector fv = extract_features(fixed_timing_signal(source, timing, kResidual, n_samples, rng));
            stat[d] = c.formula == OracleFormula::MeanLinear ? fv.f1 : fv.f2;
        });
        const SampleStats st = sample_stats(stat);
        const double predicted =
            time_average_prediction(c.formula, source, timing, c.delta_prime, n_samples);
        report.rows.push_back(make_row(c.name, c.m, c.delta_prime, -1, predicted, st.mean, st.se_mean));
    }
}

}  // namespace

bool OracleReport::all_pass() const noexcept {
    return std::all_of(rows.begin(), rows.end(), [](const OracleRow& r) { return r.pass; });
}

OracleReport oracle_check(const OracleCheckConfig& config) {
    if (config.n_draws < 2 || config.ks.empty()) throw InvalidArgument("oracle_check: need draws and sample indices");
    for (long k : config.ks)
        if (k < 1) throw InvalidArgument("oracle_check: sample indices must be >= 1");
    SymbolTiming timing{config.ns, config.eps, config.eps0, 0};
    timing.validate();
    std::vector<double> dps = config.delta_primes;
    if (dps.empty()) dps = {0.0, std::numbers::pi / 20.0, std::numbers::pi / 2.0};

    OracleReport report;
    for (Modulation m : config.modulations)
        for (std::size_t i = 0; i < dps.size(); ++i) per_k_checks(m, i, dps[i], config, timing, report);
    if (config.include_time_average) time_average_checks(config, timing, report);
    return report;
}

void write_oracle_csv(std::ostream& os, const OracleReport& report) {
    os << kOracleCsvHeader << '\n';
    for (const auto& r : report.rows)
        os << fmt::format("{},{},{:.17g},{},{:.17g},{:.17g},{:.17g},{}\n", r.formula, to_string(r.modulation),
                          r.delta_prime, r.k, r.analytic, r.monte_carlo, r.std_err, r.pass ? "pass" : "fail");
}

}  // namespace modrec
