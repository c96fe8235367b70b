#pragma once

// Clean complex-baseband transmit waveforms: RRC-shaped linear modulations
// and continuous-phase FSK with rectangular frequency pulses. Time is
// measured in sample periods; a symbol lasts Ns + eps samples.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "modrec/rng.hpp"

namespace modrec {

using Complex = std::complex<double>;
using Signal = std::vector<Complex>;

enum class Modulation { BPSK, PSK4, PSK8, QAM16, FSK2, FSK4, FSK8 };

inline constexpr Modulation kAllModulations[] = {
    Modulation::FSK2, Modulation::FSK4, Modulation::FSK8, Modulation::BPSK,
    Modulation::PSK4, Modulation::PSK8, Modulation::QAM16,
};

std::string_view to_string(Modulation m);
Modulation parse_modulation(std::string_view name);

bool is_cpfsk(Modulation m) noexcept;
// 1 for CPFSK, 0 for the linear (PSK/QAM) family.
int class_label(Modulation m) noexcept;
int cpfsk_order(Modulation m);

struct LinearScheme {
    Modulation kind = Modulation::BPSK;
    std::vector<Complex> constellation;

    static LinearScheme make(Modulation kind);
};

struct SymbolTiming {
    int ns = 6;          // nominal samples per symbol
    double eps = 0.0;    // fractional part of the symbol period, [0,1)
    double eps0 = 0.0;   // fractional part of the delay, [0,1)
    int k0 = 0;          // integer part of the delay

    double period() const noexcept { return ns + eps; }
    // Total delay t0 / Ts.
    double delay() const noexcept { return k0 + eps0; }
    int max_k0() const noexcept;
    void validate() const;
};

struct CpfskScheme {
    int order = 2;
    double h = 0.5;
    // Per-sample phase increment of each tone relative to the carrier.
    std::vector<double> tone_offsets;

    static CpfskScheme make(int order, double h, double symbol_period);
};

struct RrcPulse {
    double rolloff = 0.5;
    double amplitude_scale = 1.0;
    int span_symbols = 8;

    // Pulse scaled so a unit-power i.i.d. symbol stream has unit average
    // sample power.
    static RrcPulse normalized(double rolloff, int span_symbols = 8);
};

// p(t) with t in symbol periods. Zero outside [-span, span].
double rrc_eval(double t, const RrcPulse& pulse);

// Integral of p(t)^2 over the truncated support, t in symbol periods.
double rrc_energy(double rolloff, int span_symbols);

double modulation_index(int ns, double eps, double delta);

std::vector<Complex> draw_symbols(const LinearScheme& scheme, std::size_t n, Rng& rng);
// Tone indices in [1, order].
std::vector<int> draw_tones(int order, std::size_t n, Rng& rng);

// symbols[j] is transmitted as symbol n = j - span_symbols.
std::size_t linear_symbols_needed(const RrcPulse& pulse, const SymbolTiming& timing,
                                  std::size_t n_samples);

// Sample k = sum_n c_n p((k - eps0)/T - n). Only the fractional delay eps0
// is applied; the integer delay k0 is a sample shift done by the channel.
Signal modulate_linear(std::span<const Complex> symbols, const RrcPulse& pulse,
                       const SymbolTiming& timing, std::size_t n_samples);

// tones[j] drives symbol n = j - 1, occupying [nT, (n+1)T).
std::size_t cpfsk_symbols_needed(const SymbolTiming& timing, std::size_t n_samples);

// Length of the overlap between (a, b] and symbol n's interval [nT, (n+1)T).
double symbol_overlap(double a, double b, long n, double period) noexcept;

Signal modulate_cpfsk(std::span<const int> tones, const CpfskScheme& scheme,
                      const SymbolTiming& timing, std::size_t n_samples);

}  // namespace modrec
