#pragma once

// Block-fading AWGN channel producing the received discrete-time signal.

#include <span>

#include "modrec/rng.hpp"
#include "modrec/waveform.hpp"

namespace modrec {

struct ChannelParams {
    double alpha = 1.0;        // block fading magnitude, Rayleigh with E[alpha^2] = 1
    double psi = 0.0;          // block fading phase
    double theta_c = 0.0;      // initial carrier phase
    double delta_prime = 0.0;  // carrier offset, radians per sample
    int k0 = 0;                // integer delay in samples
    // Average transmitted-signal power over unit noise power. +inf disables
    // the noise and leaves the signal unscaled.
    double snr_db = 0.0;
};

// sqrt(10^(snr_db/10)); 1 for +inf (noiseless), 0 for -inf (noise only).
double snr_amplitude(double snr_db);

// gamma_prime is the nominal spectral center (0 or pi/2); the carrier
// offset is drawn uniformly within pi/20 of it.
ChannelParams draw_channel(Rng& rng, double gamma_prime, int ns, double eps, double snr_db);

// out[j] = g * clean[j] * e^{i(dp*k + theta_c)} * alpha * e^{i psi} + v[k]
// with absolute sample index k = j + k0. Length is clean.size() - k0.
Signal apply_channel(std::span<const Complex> clean, const ChannelParams& params, Rng& rng);

double measure_snr(std::span<const Complex> signal_part, std::span<const Complex> noise_part);

}  // namespace modrec
