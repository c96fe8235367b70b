#include "modrec/channel.hpp"

#include <cmath>
#include <numbers>

#include "modrec/error.hpp"

namespace modrec {

double snr_amplitude(double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0) return 1.0;
    if (std::isinf(snr_db)) return 0.0;
    if (!std::isfinite(snr_db)) throw InvalidArgument("SNR must be finite or +inf");
    return std::sqrt(std::pow(10.0, snr_db / 10.0));
}

ChannelParams draw_channel(Rng& rng, double gamma_prime, int ns, double eps, double snr_db) {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    constexpr double kHalfWidth = std::numbers::pi / 20.0;
    std::uniform_real_distribution<double> offset(gamma_prime - kHalfWidth, gamma_prime + kHalfWidth);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ChannelParams p;
    p.snr_db = snr_db;
    p.delta_prime = offset(rng);
    p.theta_c = angle(rng);
    p.psi = angle(rng);
    // alpha^2 ~ Exp(1)
    p.alpha = std::sqrt(-std::log1p(-unit(rng)));
    const int k0_max = static_cast<int>(std::ceil(ns + eps)) - 1;
    p.k0 = std::uniform_int_distribution<int>(0, k0_max)(rng);
    return p;
}

Signal apply_channel(std::span<const Complex> clean, const ChannelParams& params, Rng& rng) {
    if (params.k0 < 0 || static_cast<std::size_t>(params.k0) >= clean.size())
        throw InvalidArgument("apply_channel: delay k0 must be smaller than the input length");
    const bool noiseless = std::isinf(params.snr_db) && params.snr_db > 0;
    const Complex gain = snr_amplitude(params.snr_db) * std::polar(params.alpha, params.psi);
    std::normal_distribution<double> noise(0.0, std::sqrt(0.5));

    const std::size_t n = clean.size() - static_cast<std::size_t>(params.k0);
    Signal out(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = static_cast<double>(j + static_cast<std::size_t>(params.k0));
        Complex s = gain * clean[j] * std::polar(1.0, params.delta_prime * k + params.theta_c);
        if (!noiseless) {
            const double re = noise(rng);
            const double im = noise(rng);
            s += Complex(re, im);
        }
        out[j] = s;
    }
    return out;
}

double measure_snr(std::span<const Complex> signal_part, std::span<const Complex> noise_part) {
    if (signal_part.empty() || noise_part.empty())
        throw InvalidArgument("measure_snr: empty input");
    if (signal_part.size() != noise_part.size())
        throw InvalidArgument("measure_snr: length mismatch");
    double ps = 0.0;
    double pn = 0.0;
    for (std::size_t i = 0; i < signal_part.size(); ++i) {
        ps += std::norm(signal_part[i]);
        pn += std::norm(noise_part[i]);
    }
    return 10.0 * std::log10(ps / pn);
}

}  // namespace modrec
