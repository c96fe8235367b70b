#pragma once

// Closed-form per-sample mean and variance of Im(w[k]) for noiseless,
// fading-free signals. Used as an independent check on the
// waveform -> channel -> lag-product pipeline.

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "modrec/waveform.hpp"

namespace modrec {

// Pulse correlation sums at sample k with P_n[k] = p(k - t0 - nT) and
// P_n^-[k] = p(k - 1 - t0 - nT).
struct PulseCorrSums {
    double s_pp = 0.0;   // sum P_n P_n^-
    double s_p2 = 0.0;   // sum P_n^2
    double s_pm2 = 0.0;  // sum (P_n^-)^2
    double s_sq = 0.0;   // sum (P_n P_n^-)^2
};

struct ConstellationMoments {
    double m2 = 0.0;  // E[a^2]
    double m4 = 0.0;  // E[a^4]
};

// Inclusive range of transmitted symbol indices.
struct SymbolRange {
    long first = 0;
    long last = 0;
};

ConstellationMoments constellation_moments(const LinearScheme& scheme);

// Sums run over all symbols whose pulses reach k or k-1, optionally
// restricted to the transmitted range.
PulseCorrSums pulse_corr_sums(const RrcPulse& pulse, const SymbolTiming& timing, long k,
                              std::optional<SymbolRange> symbols = std::nullopt);

// Q_m[k]: phase accumulated from symbol m's rectangular frequency pulse
// over (k - 1 - t0, k - t0]. Lies in [0, tone_increment].
double q_integral(long m, long k, const SymbolTiming& timing, double tone_increment);

// Nonzero Q_m[k] for all symbols overlapping sample interval k (at most two).
std::vector<double> bfsk_q_values(long k, const SymbolTiming& timing, double tone_increment);

double mean_im_linear(double delta_prime, const PulseCorrSums& sums, const ConstellationMoments& moments);
double mean_im_bfsk(double delta_prime, std::span<const double> q);
double var_im_bpsk(double delta_prime, const PulseCorrSums& sums);
double var_im_qampsk(double delta_prime, const PulseCorrSums& sums, const ConstellationMoments& moments);
double var_im_bfsk(double delta_prime, std::span<const double> q);

enum class OracleFormula { MeanLinear, MeanBfsk, VarBpsk, VarQamPsk, VarBfsk };

struct LinearSource {
    LinearScheme scheme;
    RrcPulse pulse;
};
using OracleSource = std::variant<LinearSource, CpfskScheme>;

// Per-k value of one formula for the given source.
double oracle_value(OracleFormula formula, const OracleSource& source, const SymbolTiming& timing,
                    double delta_prime, long k);

// Expected per-realization statistic over the lag-product indices
// k = 1..n_samples-1: the time-averaged mean, or for VarBfsk the expected
// sample variance, which accounts for the spread of the per-k means and the
// correlation between samples of the same symbol. Linear variance formulas
// throw InvalidArgument.
double time_average_prediction(OracleFormula formula, const OracleSource& source,
                               const SymbolTiming& timing, double delta_prime, std::size_t n_samples);

}  // namespace modrec
