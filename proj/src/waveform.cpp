#include "modrec/waveform.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "modrec/error.hpp"

namespace modrec {

namespace {

constexpr double kPi = std::numbers::pi;

// Unscaled RRC with unit symbol period.
double rrc_raw(double t, double beta) {
    const double at = std::abs(t);
    if (at < 1e-12) return 1.0 - beta + 4.0 * beta / kPi;
    const double x = 4.0 * beta * t;
    const double den_factor = 1.0 - x * x;
    if (std::abs(den_factor) < 1e-9) {
        const double arg = kPi / (4.0 * beta);
        return beta / std::numbers::sqrt2 *
               ((1.0 + 2.0 / kPi) * std::sin(arg) + (1.0 - 2.0 / kPi) * std::cos(arg));
    }
    const double num = std::sin(kPi * t * (1.0 - beta)) + x * std::cos(kPi * t * (1.0 + beta));
    return num / (kPi * t * den_factor);
}

void check_rolloff(double rolloff) {
    if (!(rolloff > 0.0 && rolloff <= 1.0))
        throw InvalidArgument("RRC roll-off must be in (0, 1], got " + std::to_string(rolloff));
}

double simpson_energy(double rolloff, int span) {
    const int intervals = 2 * span * 512;
    const double a = -span;
    const double step = 2.0 * span / intervals;
    double acc = 0.0;
    for (int i = 0; i <= intervals; ++i) {
        const double p = rrc_raw(a + i * step, rolloff);
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * p * p;
    }
    return acc * step / 3.0;
}

}  // namespace

std::string_view to_string(Modulation m) {
    switch (m) {
        case Modulation::BPSK: return "BPSK";
        case Modulation::PSK4: return "4PSK";
        case Modulation::PSK8: return "8PSK";
        case Modulation::QAM16: return "16QAM";
        case Modulation::FSK2: return "BFSK";
        case Modulation::FSK4: return "4FSK";
        case Modulation::FSK8: return "8FSK";
    }
    return "?";
}

Modulation parse_modulation(std::string_view name) {
    for (Modulation m : kAllModulations)
        if (to_string(m) == name) return m;
    throw InvalidArgument("unknown modulation '" + std::string(name) + "'");
}

bool is_cpfsk(Modulation m) noexcept {
    return m == Modulation::FSK2 || m == Modulation::FSK4 || m == Modulation::FSK8;
}

int class_label(Modulation m) noexcept { return is_cpfsk(m) ? 1 : 0; }

int cpfsk_order(Modulation m) {
    switch (m) {
        case Modulation::FSK2: return 2;
        case Modulation::FSK4: return 4;
        case Modulation::FSK8: return 8;
        default: throw InvalidArgument(std::string(to_string(m)) + " is not a CPFSK modulation");
    }
}

LinearScheme LinearScheme::make(Modulation kind) {
    LinearScheme s;
    s.kind = kind;
    switch (kind) {
        case Modulation::BPSK:
            s.constellation = {Complex(1.0, 0.0), Complex(-1.0, 0.0)};
            break;
        case Modulation::PSK4:
        case Modulation::PSK8: {
            const int m = kind == Modulation::PSK4 ? 4 : 8;
            for (int n = 0; n < m; ++n) s.constellation.push_back(std::polar(1.0, (2 * n + 1) * kPi / m));
            break;
        }
        case Modulation::QAM16: {
            const double scale = 1.0 / std::sqrt(10.0);
            for (int re : {-3, -1, 1, 3})
                for (int im : {-3, -1, 1, 3}) s.constellation.emplace_back(re * scale, im * scale);
            break;
        }
        default:
            throw InvalidArgument(std::string(to_string(kind)) + " is not a linear modulation");
    }
    return s;
}

int SymbolTiming::max_k0() const noexcept {
    return static_cast<int>(std::ceil(ns + eps)) - 1;
}

void SymbolTiming::validate() const {
    if (ns < 2) throw InvalidArgument("oversampling Ns must be >= 2");
    if (!(eps >= 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in [0, 1)");
    if (!(eps0 >= 0.0 && eps0 < 1.0)) throw InvalidArgument("eps0 must lie in [0, 1)");
    if (k0 < 0 || k0 > max_k0()) throw InvalidArgument("k0 must lie in {0, ..., ceil(Ns+eps)-1}");
}

CpfskScheme CpfskScheme::make(int order, double h, double symbol_period) {
    if (order != 2 && order != 4 && order != 8)
        throw InvalidArgument("CPFSK order must be 2, 4 or 8");
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("modulation index must be > 0");
    if (!(symbol_period > 0.0)) throw InvalidArgument("symbol period must be > 0");
    CpfskScheme s;
    s.order = order;
    s.h = h;
    for (int i = 1; i <= order; ++i)
        s.tone_offsets.push_back((2 * i - (order + 1)) * h * kPi / ((order - 1) * symbol_period));
    return s;
}

double rrc_energy(double rolloff, int span_symbols) {
    check_rolloff(rolloff);
    if (span_symbols < 1) throw InvalidArgument("RRC span must be >= 1 symbol");
    return simpson_energy(rolloff, span_symbols);
}

RrcPulse RrcPulse::normalized(double rolloff, int span_symbols) {
    check_rolloff(rolloff);
    // Roll-offs k/10 at the default span are drawn for every realization.
    static const std::array<double, 10> table = [] {
        std::array<double, 10> t{};
        for (int k = 1; k <= 10; ++k) t[k - 1] = simpson_energy(k / 10.0, 8);
        return t;
    }();
    double energy = 0.0;
    const double k = std::round(rolloff * 10.0);
    if (span_symbols == 8 && k >= 1 && k <= 10 && k / 10.0 == rolloff)
        energy = table[static_cast<std::size_t>(k) - 1];
    else
        energy = rrc_energy(rolloff, span_symbols);
    return RrcPulse{rolloff, 1.0 / std::sqrt(energy), span_symbols};
}

double rrc_eval(double t, const RrcPulse& pulse) {
    if (!std::isfinite(t)) throw InvalidArgument("rrc_eval: non-finite time");
    check_rolloff(pulse.rolloff);
    if (std::abs(t) > pulse.span_symbols) return 0.0;
    return pulse.amplitude_scale * rrc_raw(t, pulse.rolloff);
}

double modulation_index(int ns, double eps, double delta) {
    if (ns < 1 || !std::isfinite(eps) || !std::isfinite(delta))
        throw InvalidArgument("modulation_index: Ns >= 1 and finite eps, delta required");
    return (ns + eps) * delta / kPi;
}

std::vector<Complex> draw_symbols(const LinearScheme& scheme, std::size_t n, Rng& rng) {
    if (n == 0) throw InvalidArgument("draw_symbols: n must be >= 1");
    std::uniform_int_distribution<std::size_t> pick(0, scheme.constellation.size() - 1);
    std::vector<Complex> out(n);
    for (auto& c : out) c = scheme.constellation[pick(rng)];
    return out;
}

std::vector<int> draw_tones(int order, std::size_t n, Rng& rng) {
    std::uniform_int_distribution<int> pick(1, order);
    std::vector<int> out(n);
    for (auto& t : out) t = pick(rng);
    return out;
}

std::size_t linear_symbols_needed(const RrcPulse& pulse, const SymbolTiming& timing,
                                  std::size_t n_samples) {
    if (n_samples == 0) return 0;
    const double u_max = (static_cast<double>(n_samples - 1) - timing.eps0) / timing.period();
    const long n_hi = static_cast<long>(std::floor(u_max + pulse.span_symbols));
    return static_cast<std::size_t>(n_hi + pulse.span_symbols + 1);
}

Signal modulate_linear(std::span<const Complex> symbols, const RrcPulse& pulse,
                       const SymbolTiming& timing, std::size_t n_samples) {
    timing.validate();
    check_rolloff(pulse.rolloff);
    const std::size_t needed = linear_symbols_needed(pulse, timing, n_samples);
    if (symbols.size() < needed)
        throw InvalidArgument("modulate_linear: " + std::to_string(needed) + " symbols needed, got " +
                              std::to_string(symbols.size()));

    const double period = timing.period();
    const int span = pulse.span_symbols;
    Signal out(n_samples);
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double u = (static_cast<double>(k) - timing.eps0) / period;
        const long n_lo = static_cast<long>(std::ceil(u - span));
        const long n_hi = static_cast<long>(std::floor(u + span));
        Complex acc{};
        for (long n = n_lo; n <= n_hi; ++n)
            acc += symbols[static_cast<std::size_t>(n + span)] * rrc_eval(u - n, pulse);
        out[k] = acc;
    }
    return out;
}

std::size_t cpfsk_symbols_needed(const SymbolTiming& timing, std::size_t n_samples) {
    if (n_samples == 0) return 0;
    const double b_max = static_cast<double>(n_samples - 1) - timing.eps0;
    return static_cast<std::size_t>(std::floor(b_max / timing.period())) + 2;
}

double symbol_overlap(double a, double b, long n, double period) noexcept {
    const double lo = std::max(a, n * period);
    const double hi = std::min(b, (n + 1) * period);
    return hi > lo ? hi - lo : 0.0;
}

Signal modulate_cpfsk(std::span<const int> tones, const CpfskScheme& scheme,
                      const SymbolTiming& timing, std::size_t n_samples) {
    timing.validate();
    const std::size_t needed = cpfsk_symbols_needed(timing, n_samples);
    if (tones.size() < needed)
        throw InvalidArgument("modulate_cpfsk: " + std::to_string(needed) + " symbols needed, got " +
                              std::to_string(tones.size()));
    for (int t : tones)
        if (t < 1 || t > scheme.order)
            throw InvalidArgument("modulate_cpfsk: tone index " + std::to_string(t) + " outside [1, " +
                                  std::to_string(scheme.order) + "]");

    const double period = timing.period();
    Signal out(n_samples);
    double phase = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        // Integrate the rectangular frequency pulse train over (k-1-eps0, k-eps0].
        const double b = static_cast<double>(k) - timing.eps0;
        const double a = b - 1.0;
        const long n_lo = static_cast<long>(std::floor(a / period));
        const long n_hi = static_cast<long>(std::floor(b / period));
        double increment = 0.0;
        for (long n = n_lo; n <= n_hi; ++n) {
            const int tone = tones[static_cast<std::size_t>(n + 1)];
            increment += scheme.tone_offsets[static_cast<std::size_t>(tone - 1)] *
                         symbol_overlap(a, b, n, period);
        }
        phase = std::remainder(phase + increment, 2.0 * kPi);
        out[k] = std::polar(1.0, phase);
    }
    return out;
}

}  // namespace modrec
