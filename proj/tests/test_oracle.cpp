#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "modrec/channel.hpp"
#include "modrec/error.hpp"
#include "modrec/features.hpp"
#include "modrec/oracle.hpp"

using namespace modrec;
using std::numbers::pi;

namespace {

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

// Exact mean/variance of Im(e^{i dp} x[k] conj(x[k-1])) by enumerating every
// symbol combination in [first, last]; x is built directly from the pulse.
Moments enumerate_linear(const LinearScheme& scheme, const RrcPulse& pulse, const SymbolTiming& timing,
                         double dp, long k, long first, long last) {
    const std::size_t count = static_cast<std::size_t>(last - first + 1);
    const std::size_t m = scheme.constellation.size();
    const double u = (k - timing.delay()) / timing.period();
    const double u_prev = (k - 1 - timing.delay()) / timing.period();
    std::vector<std::size_t> idx(count, 0);
    double s1 = 0.0, s2 = 0.0, total = 0.0;
    while (true) {
        Complex x{}, xm{};
        for (std::size_t j = 0; j < count; ++j) {
            const long n = first + static_cast<long>(j);
            const Complex c = scheme.constellation[idx[j]];
            x += c * rrc_eval(u - n, pulse);
            xm += c * rrc_eval(u_prev - n, pulse);
        }
        const double v = (std::polar(1.0, dp) * x * std::conj(xm)).imag();
        s1 += v;
        s2 += v * v;
        total += 1.0;
        std::size_t j = 0;
        while (j < count && ++idx[j] == m) idx[j++] = 0;
        if (j == count) break;
    }
    const double mean = s1 / total;
    return {mean, s2 / total - mean * mean};
}

// Same for BFSK: the phase step over (k-1, k] is a sum of +-Q_m terms.
Moments enumerate_bfsk(const std::vector<double>& q, double dp) {
    const std::size_t n = q.size();
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        double phase = dp;
        for (std::size_t j = 0; j < n; ++j) phase += (mask >> j & 1) ? q[j] : -q[j];
        const double v = std::sin(phase);
        s1 += v;
        s2 += v * v;
    }
    const double total = static_cast<double>(std::size_t{1} << n);
    const double mean = s1 / total;
    return {mean, s2 / total - mean * mean};
}

}  // namespace

TEST_CASE("constellation moments") {
    for (Modulation m : {Modulation::BPSK, Modulation::PSK4, Modulation::PSK8}) {
        const auto c = constellation_moments(LinearScheme::make(m));
        CHECK(c.m2 == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(c.m4 == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto q = constellation_moments(LinearScheme::make(Modulation::QAM16));
    CHECK(q.m2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.m4 == doctest::Approx((4 * 0.04 + 8 * 1.0 + 4 * 3.24) / 16).epsilon(1e-14));
    CHECK(q.m4 == doctest::Approx(1.32).epsilon(1e-14));
}

TEST_CASE("pulse correlation sums") {
    const RrcPulse pulse = RrcPulse::normalized(0.35);
    const SymbolTiming timing{6, 0.37, 0.61, 2};
    const auto far = pulse_corr_sums(pulse, timing, 1000, SymbolRange{0, 10});
    CHECK(far.s_pp == 0.0);
    CHECK(far.s_p2 == 0.0);
    CHECK(far.s_pm2 == 0.0);
    CHECK(far.s_sq == 0.0);

    const SymbolTiming integer{6, 0.0, 0.3, 0};
    for (long k = 10; k < 40; ++k) {
        const auto a = pulse_corr_sums(pulse, integer, k);
        const auto b = pulse_corr_sums(pulse, integer, k + 6);
        CHECK(a.s_pp == doctest::Approx(b.s_pp).epsilon(1e-13));
        CHECK(a.s_sq == doctest::Approx(b.s_sq).epsilon(1e-13));
    }

    Rng rng(1);
    std::uniform_int_distribution<long> kd(-100, 5000);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const SymbolTiming t{6, ud(rng), ud(rng), 0};
        const auto s = pulse_corr_sums(RrcPulse::normalized(0.1 * (1 + i % 10)), t, kd(rng));
        CHECK(s.s_sq <= s.s_p2 * s.s_pm2 + 1e-15);
        CHECK(std::isfinite(s.s_pp));
    }
}

TEST_CASE("q integral") {
    const SymbolTiming timing{6, 0.5, 0.25, 1};
    const double beta = 0.2;
    // k - t0 = 4.75: the interval (3.75, 4.75] lies inside symbol 0 = [0, 6.5).
    CHECK(q_integral(0, 6, timing, beta) == doctest::Approx(beta).epsilon(1e-15));
    CHECK(q_integral(1, 6, timing, beta) == 0.0);
    CHECK(q_integral(-1, 6, timing, beta) == 0.0);
    for (long k = 1; k < 200; ++k) {
        double total = 0.0;
        for (long m = -2; m < 40; ++m) {
            const double q = q_integral(m, k, timing, beta);
            CHECK(q >= 0.0);
            CHECK(q <= beta + 1e-15);
            total += q;
        }
        CHECK(total == doctest::Approx(beta).epsilon(1e-13));
        const auto qs = bfsk_q_values(k, timing, beta);
        CHECK(qs.size() >= 1);
        CHECK(qs.size() <= 2);
    }
}

TEST_CASE("closed forms at special points") {
    const PulseCorrSums sums{0.3, 0.8, 0.7, 0.05};
    const ConstellationMoments unit{1.0, 1.0};
    CHECK(mean_im_linear(0.0, sums, unit) == 0.0);
    CHECK(mean_im_linear(pi / 2, sums, unit) == doctest::Approx(0.3).epsilon(1e-15));

    const double q1[] = {pi / 12};
    CHECK(mean_im_bfsk(0.0, q1) == 0.0);
    CHECK(mean_im_bfsk(pi / 2, q1) == doctest::Approx(0.96593).epsilon(1e-5));
    CHECK(var_im_bfsk(0.0, q1) == doctest::Approx(0.5 - std::cos(pi / 6) / 2).epsilon(1e-14));
    CHECK(var_im_bfsk(0.0, q1) == doctest::Approx(0.06699).epsilon(1e-4));
    const double q0[] = {0.0, 0.0};
    CHECK(var_im_bfsk(0.7, q0) == 0.0);

    CHECK(var_im_bpsk(0.0, sums) == 0.0);
    CHECK(var_im_qampsk(0.0, sums, unit) == doctest::Approx(0.5 * (0.8 * 0.7 - 0.09)).epsilon(1e-15));

    // Single pulse: s_pp^2 + s_p2 s_pm2 - 2 s_sq vanishes.
    const RrcPulse pulse = RrcPulse::normalized(0.5);
    const SymbolTiming t{6, 0.37, 0.61, 0};
    const auto single = pulse_corr_sums(pulse, t, 3, SymbolRange{0, 0});
    CHECK(var_im_bpsk(1.0, single) < 1e-15);

    CHECK_THROWS_AS(var_im_bpsk(1.0, PulseCorrSums{1.0, 0.0, 0.0, 10.0}), Error);
    // Rounding-level negatives clamp to zero.
    CHECK(var_im_bpsk(pi / 2, PulseCorrSums{0.0, 0.0, 0.0, 1e-12}) == 0.0);
}

TEST_CASE("means are odd and variances even in the carrier offset") {
    const RrcPulse pulse = RrcPulse::normalized(0.35);
    const SymbolTiming t{6, 0.37, 0.61, 0};
    const auto qam = LinearSource{LinearScheme::make(Modulation::QAM16), pulse};
    const auto bpsk = LinearSource{LinearScheme::make(Modulation::BPSK), pulse};
    const auto bfsk = CpfskScheme::make(2, 0.5, t.period());
    for (double dp : {0.1, pi / 20, 1.0}) {
        for (long k : {20L, 23L, 26L}) {
            CHECK(oracle_value(OracleFormula::MeanLinear, qam, t, -dp, k) ==
                  doctest::Approx(-oracle_value(OracleFormula::MeanLinear, qam, t, dp, k)).epsilon(1e-14));
            CHECK(oracle_value(OracleFormula::MeanBfsk, bfsk, t, -dp, k) ==
                  doctest::Approx(-oracle_value(OracleFormula::MeanBfsk, bfsk, t, dp, k)).epsilon(1e-14));
            CHECK(oracle_value(OracleFormula::VarQamPsk, qam, t, -dp, k) ==
                  doctest::Approx(oracle_value(OracleFormula::VarQamPsk, qam, t, dp, k)).epsilon(1e-14));
            CHECK(oracle_value(OracleFormula::VarBpsk, bpsk, t, -dp, k) ==
                  doctest::Approx(oracle_value(OracleFormula::VarBpsk, bpsk, t, dp, k)).epsilon(1e-14));
            CHECK(oracle_value(OracleFormula::VarBfsk, bfsk, t, -dp, k) ==
                  doctest::Approx(oracle_value(OracleFormula::VarBfsk, bfsk, t, dp, k)).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(oracle_value(OracleFormula::VarBpsk, qam, t, 0.1, 20), InvalidArgument);
    CHECK_THROWS_AS(oracle_value(OracleFormula::VarQamPsk, bpsk, t, 0.1, 20), InvalidArgument);
    CHECK_THROWS_AS(oracle_value(OracleFormula::MeanBfsk, qam, t, 0.1, 20), InvalidArgument);
    CHECK_THROWS_AS(oracle_value(OracleFormula::MeanLinear, CpfskScheme::make(4, 0.5, t.period()), t, 0.1, 20),
                    InvalidArgument);
}

TEST_CASE("linear closed forms match exhaustive enumeration") {
    const RrcPulse pulse = RrcPulse::normalized(0.35);
    struct Case {
        Modulation m;
        long half_width;  // symbols on each side of the centre symbol
    };
    const Case cases[] = {{Modulation::BPSK, 4}, {Modulation::PSK4, 3}, {Modulation::PSK8, 2},
                          {Modulation::QAM16, 1}};
    for (const SymbolTiming& t : {SymbolTiming{6, 0.37, 0.61, 0}, SymbolTiming{6, 0.0, 0.0, 3}}) {
        for (const Case& c : cases) {
            const auto scheme = LinearScheme::make(c.m);
            const auto moments = constellation_moments(scheme);
            for (long k : {20L, 23L, 26L}) {
                const long centre = static_cast<long>(std::floor((k - t.delay()) / t.period()));
                const SymbolRange range{centre - c.half_width, centre + c.half_width};
                const auto sums = pulse_corr_sums(pulse, t, k, range);
                for (double dp : {0.0, pi / 20, pi / 2, 2.0}) {
                    const Moments e = enumerate_linear(scheme, pulse, t, dp, k, range.first, range.last);
                    CHECK(mean_im_linear(dp, sums, moments) == doctest::Approx(e.mean).epsilon(1e-12).scale(1.0));
                    const double var = c.m == Modulation::BPSK ? var_im_bpsk(dp, sums)
                                                               : var_im_qampsk(dp, sums, moments);
                    CHECK(var == doctest::Approx(e.variance).epsilon(1e-11).scale(1.0));
                }
            }
        }
    }
}

TEST_CASE("bfsk closed forms match exhaustive enumeration") {
    const SymbolTiming t{6, 0.37, 0.61, 0};
    const auto scheme = CpfskScheme::make(2, 0.5, t.period());
    for (long k = 1; k < 60; ++k) {
        const auto q = bfsk_q_values(k, t, scheme.tone_offsets[1]);
        for (double dp : {0.0, pi / 20, pi / 2, -1.0}) {
            const Moments e = enumerate_bfsk(q, dp);
            CHECK(mean_im_bfsk(dp, q) == doctest::Approx(e.mean).epsilon(1e-13).scale(1.0));
            CHECK(var_im_bfsk(dp, q) == doctest::Approx(e.variance).epsilon(1e-13).scale(1.0));
        }
    }
}

TEST_CASE("time average of a constant quantity is the per-k value") {
    const SymbolTiming t{6, 0.0, 0.0, 0};
    const auto bfsk = CpfskScheme::make(2, 0.5, t.period());
    const double per_k = oracle_value(OracleFormula::MeanBfsk, bfsk, t, pi / 2, 7);
    CHECK(per_k == doctest::Approx(std::cos(pi / 12)).epsilon(1e-14));
    CHECK(time_average_prediction(OracleFormula::MeanBfsk, bfsk, t, pi / 2, 600) ==
          doctest::Approx(per_k).epsilon(1e-14));
}

TEST_CASE("expected BFSK sample variance matches exhaustive enumeration") {
    // Average f2 over every equally likely tone sequence of a short burst.
    for (const SymbolTiming t : {SymbolTiming{6, 0.37, 0.61, 0}, SymbolTiming{6, 0.0, 0.0, 0},
                                 SymbolTiming{4, 0.8, 0.15, 0}}) {
        const auto bfsk = CpfskScheme::make(2, 0.5, t.period());
        for (const std::size_t n : {std::size_t{3}, std::size_t{12}, std::size_t{40}}) {
            const std::size_t symbols = cpfsk_symbols_needed(t, n);
            REQUIRE(symbols <= 16);
            for (double dp : {0.0, pi / 20, 1.2}) {
                double total = 0.0;
                const std::size_t combos = std::size_t{1} << symbols;
                for (std::size_t bits = 0; bits < combos; ++bits) {
                    std::vector<int> tones(symbols);
                    for (std::size_t j = 0; j < symbols; ++j) tones[j] = 1 + static_cast<int>((bits >> j) & 1U);
                    Rng unused(0);
                    const Signal s = apply_channel(modulate_cpfsk(tones, bfsk, t, n),
                                                   {1.0, 0.0, 0.0, dp, 0, std::numeric_limits<double>::infinity()},
                                                   unused);
                    total += extract_features(s).f2;
                }
                const double expected = total / static_cast<double>(combos);
                CAPTURE(n);
                CAPTURE(dp);
                CHECK(time_average_prediction(OracleFormula::VarBfsk, bfsk, t, dp, n) ==
                      doctest::Approx(expected).epsilon(1e-12).scale(1.0));
            }
        }
    }
    const SymbolTiming t{6, 0.37, 0.61, 0};
    const auto bfsk = CpfskScheme::make(2, 0.5, t.period());
    CHECK_THROWS_AS(time_average_prediction(OracleFormula::VarBfsk, bfsk, t, 0.1, 2), InvalidArgument);
    const LinearSource bpsk{LinearScheme::make(Modulation::BPSK), RrcPulse::normalized(0.5)};
    CHECK_THROWS_AS(time_average_prediction(OracleFormula::VarBpsk, bpsk, t, 0.1, 100), InvalidArgument);
}
