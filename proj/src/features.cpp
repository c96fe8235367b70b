#include "modrec/features.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "modrec/error.hpp"

namespace modrec {

Signal lag_product(std::span<const Complex> s) {
    if (s.size() < 2) throw InvalidArgument("lag_product: need at least 2 samples");
    Signal w(s.size() - 1);
    for (std::size_t k = 1; k < s.size(); ++k) w[k - 1] = s[k] * std::conj(s[k - 1]);
    return w;
}

namespace {

// phi * k reduced to about [-pi, pi]. The product is kept as an exact
// hi + lo pair and 2 pi in double-double, so the rotation between adjacent
// samples stays exactly phi even at large k.
double reduced_angle(double phi, double k) noexcept {
    constexpr double kTwoPiHi = 6.283185307179586;
    constexpr double kTwoPiLo = 2.4492935982947064e-16;
    const double hi = phi * k;
    const double lo = std::fma(phi, k, -hi);
    const double n = std::nearbyint(hi / kTwoPiHi);
    return (std::fma(-n, kTwoPiHi, hi) - n * kTwoPiLo) + lo;
}

}  // namespace

Signal shift_center(std::span<const Complex> s, double phi) {
    Signal out(s.size());
    for (std::size_t k = 0; k < s.size(); ++k)
        out[k] = s[k] * std::polar(1.0, reduced_angle(phi, static_cast<double>(k)));
    return out;
}

MeanVar sample_mean_var(std::span<const double> x) {
    if (x.size() < 2) throw InvalidArgument("sample variance needs at least 2 values");
    double sum = 0.0;
    for (double v : x) sum += v;
    const double mean = sum / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, ss / static_cast<double>(x.size() - 1)};
}

FeatureVector extract_features(std::span<const Complex> s0) {
    if (s0.size() < 3) throw InvalidArgument("extract_features: need at least 3 samples");
    const Signal w = lag_product(s0);
    std::vector<double> re(w.size());
    std::vector<double> im(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        re[k] = w[k].real();
        im[k] = w[k].imag();
    }
    const MeanVar at_half_pi = sample_mean_var(re);
    const MeanVar at_zero = sample_mean_var(im);
    FeatureVector fv;
    fv.f1 = at_half_pi.mean;
    fv.f2 = at_zero.variance;
    fv.f3 = at_half_pi.variance;
    return fv;
}

void write_features_csv(std::ostream& os, std::span<const FeatureVector> rows) {
    os << kFeatureCsvHeader << '\n';
    for (const auto& r : rows)
        os << fmt::format("{},{},{:.17g},{},{:.17g},{:.17g},{:.17g}\n", r.label, to_string(r.modulation),
                          r.snr_db, r.seed, r.f1, r.f2, r.f3);
}

namespace {

double parse_double(const std::string& field, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(field, &used);
        if (used != field.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw DataError(fmt::format("features CSV line {}: bad number '{}'", line, field));
    }
}

std::uint64_t parse_u64(const std::string& field, std::size_t line) {
    std::uint64_t v = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw DataError(fmt::format("features CSV line {}: bad integer '{}'", line, field));
    return v;
}

}  // namespace

std::vector<FeatureVector> read_features_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kFeatureCsvHeader)
        throw DataError(std::string("features CSV: expected header '") + kFeatureCsvHeader + "'");
    std::vector<FeatureVector> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 7)
            throw DataError(fmt::format("features CSV line {}: expected 7 fields, got {}", lineno, fields.size()));
        FeatureVector r;
        const auto label = parse_u64(fields[0], lineno);
        if (label > 1) throw DataError(fmt::format("features CSV line {}: label must be 0 or 1", lineno));
        r.label = static_cast<int>(label);
        try {
            r.modulation = parse_modulation(fields[1]);
        } catch (const InvalidArgument& e) {
            throw DataError(fmt::format("features CSV line {}: {}", lineno, e.what()));
        }
        if (r.label != class_label(r.modulation))
            throw DataError(fmt::format("features CSV line {}: label {} does not match {}", lineno, r.label,
                                        to_string(r.modulation)));
        r.snr_db = parse_double(fields[2], lineno);
        r.seed = parse_u64(fields[3], lineno);
        r.f1 = parse_double(fields[4], lineno);
        r.f2 = parse_double(fields[5], lineno);
        r.f3 = parse_double(fields[6], lineno);
        if (!std::isfinite(r.f1) || !std::isfinite(r.f2) || !std::isfinite(r.f3) || r.f2 < 0 || r.f3 < 0)
            throw DataError(fmt::format("features CSV line {}: features must be finite, variances >= 0", lineno));
        rows.push_back(r);
    }
    return rows;
}

void write_features_csv(const std::string& path, std::span<const FeatureVector> rows) {
    std::ofstream os(path);
    if (!os) throw IoError(path, "cannot open for writing");
    write_features_csv(os, rows);
    if (!os) throw IoError(path, "write failed");
}

std::vector<FeatureVector> read_features_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError(path, "cannot open for reading");
    return read_features_csv(is);
}

}  // namespace modrec
