#pragma once

// Lag-product features: w[k] = s[k] conj(s[k-1]) and the three sample
// statistics of its imaginary part used for classification.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "modrec/waveform.hpp"

namespace modrec {

using Features = std::array<double, 3>;

struct FeatureVector {
    double f1 = 0.0;  // mean of Im(w), spectrum centered at pi/2
    double f2 = 0.0;  // variance of Im(w), centered at 0
    double f3 = 0.0;  // variance of Im(w), centered at pi/2
    int label = 0;    // 1 = CPFSK, 0 = linear
    Modulation modulation = Modulation::BPSK;
    double snr_db = 0.0;
    std::uint64_t seed = 0;

    Features values() const noexcept { return {f1, f2, f3}; }
};

// w[k-1] = s[k] conj(s[k-1]) for k = 1..N-1.
Signal lag_product(std::span<const Complex> s);

// out[k] = s[k] e^{i phi k}
Signal shift_center(std::span<const Complex> s, double phi);

struct MeanVar {
    double mean = 0.0;
    double variance = 0.0;  // 1/(N-1) estimator
};

MeanVar sample_mean_var(std::span<const double> x);

// s0 must be centered at 0. The pi/2-centered statistics use
// Im(w e^{i pi/2}) = Re(w). Only the f-values are filled in.
FeatureVector extract_features(std::span<const Complex> s0);

inline constexpr const char* kFeatureCsvHeader = "label,modulation,snr_db,seed,f1,f2,f3";

void write_features_csv(std::ostream& os, std::span<const FeatureVector> rows);
std::vector<FeatureVector> read_features_csv(std::istream& is);
void write_features_csv(const std::string& path, std::span<const FeatureVector> rows);
std::vector<FeatureVector> read_features_csv(const std::string& path);

}  // namespace modrec
