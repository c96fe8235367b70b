#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "modrec/error.hpp"
#include "modrec/experiment.hpp"

namespace modrec {

namespace {

// Header: "MRIQ", u16 version, u16 reserved (0), u64 sample count; all
// little-endian. Payload: interleaved f32 re/im pairs, little-endian.
constexpr std::array<char, 4> kMagic = {'M', 'R', 'I', 'Q'};
constexpr std::size_t kHeaderBytes = 16;

template <typename T>
void put_le(std::string& buf, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(const unsigned char* p) {
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(p[i]) << (8 * i);
    return v;
}

nlohmann::json params_to_json(const RealizationParams& p) {
    return {
        {"modulation", std::string(to_string(p.spec.modulation))},
        {"seed", p.spec.seed},
        {"n_symbols", p.spec.n_symbols},
        {"ns", p.spec.ns},
        {"h", p.spec.h},
        {"snr_db", p.spec.snr_db},
        {"gamma_prime", p.spec.gamma_prime},
        {"rolloff", p.rolloff},
        {"eps", p.timing.eps},
        {"eps0", p.timing.eps0},
        {"k0", p.timing.k0},
        {"alpha", p.channel.alpha},
        {"psi", p.channel.psi},
        {"theta_c", p.channel.theta_c},
        {"delta_prime", p.channel.delta_prime},
        {"n_samples", p.n_samples},
        {"sample_format", "cf32le"},
    };
}

RealizationParams params_from_json(const nlohmann::json& j) {
    RealizationParams p;
    p.spec.modulation = parse_modulation(j.at("modulation").get<std::string>());
    p.spec.seed = j.at("seed").get<std::uint64_t>();
    p.spec.n_symbols = j.at("n_symbols").get<std::size_t>();
    p.spec.ns = j.at("ns").get<int>();
    p.spec.h = j.at("h").get<double>();
    p.spec.snr_db = j.at("snr_db").get<double>();
    p.spec.gamma_prime = j.at("gamma_prime").get<double>();
    p.rolloff = j.at("rolloff").get<double>();
    p.timing.ns = p.spec.ns;
    p.timing.eps = j.at("eps").get<double>();
    p.timing.eps0 = j.at("eps0").get<double>();
    p.timing.k0 = j.at("k0").get<int>();
    p.channel.alpha = j.at("alpha").get<double>();
    p.channel.psi = j.at("psi").get<double>();
    p.channel.theta_c = j.at("theta_c").get<double>();
    p.channel.delta_prime = j.at("delta_prime").get<double>();
    p.channel.k0 = p.timing.k0;
    p.channel.snr_db = p.spec.snr_db;
    p.n_samples = j.at("n_samples").get<std::size_t>();
    return p;
}

}  // namespace

void export_iq(const RealizationSpec& spec, const std::string& path) {
    if (!std::isfinite(spec.snr_db)) throw InvalidArgument("export_iq: SNR must be finite");
    const Realization r = synthesize_realization(spec);

    std::string buf;
    buf.reserve(kHeaderBytes + r.samples.size() * 8);
    buf.append(kMagic.data(), kMagic.size());
    put_le<std::uint16_t>(buf, kIqFormatVersion);
    put_le<std::uint16_t>(buf, 0);
    put_le<std::uint64_t>(buf, r.samples.size());
    for (const Complex& c : r.samples) {
        put_le(buf, std::bit_cast<std::uint32_t>(static_cast<float>(c.real())));
        put_le(buf, std::bit_cast<std::uint32_t>(static_cast<float>(c.imag())));
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError(path, "cannot open for writing");
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw IoError(path, "write failed");

    const std::string sidecar = path + ".json";
    std::ofstream js(sidecar);
    if (!js) throw IoError(sidecar, "cannot open for writing");
    js << params_to_json(r.params).dump(2) << '\n';
    if (!js) throw IoError(sidecar, "write failed");
}

IqFile read_iq(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(path, "cannot open for reading");
    const std::string data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (data.size() < kHeaderBytes || std::memcmp(data.data(), kMagic.data(), kMagic.size()) != 0)
        throw IoError(path, "not an MRIQ file");
    const auto* p = reinterpret_cast<const unsigned char*>(data.data());
    IqFile f;
    f.version = get_le<std::uint16_t>(p + 4);
    if (f.version != kIqFormatVersion) throw IoError(path, "unsupported MRIQ version " + std::to_string(f.version));
    const auto count = get_le<std::uint64_t>(p + 8);
    if (data.size() - kHeaderBytes != count * 8)
        throw IoError(path, "sample count " + std::to_string(count) + " does not match payload size");
    f.samples.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const unsigned char* q = p + kHeaderBytes + i * 8;
        f.samples[i] = {std::bit_cast<float>(get_le<std::uint32_t>(q)), std::bit_cast<float>(get_le<std::uint32_t>(q + 4))};
    }
    return f;
}

RealizationParams read_iq_sidecar(const std::string& path) {
    const std::string sidecar = path + ".json";
    std::ifstream is(sidecar);
    if (!is) throw IoError(sidecar, "cannot open for reading");
    try {
        return params_from_json(nlohmann::json::parse(is));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(sidecar, e.what());
    } catch (const InvalidArgument& e) {
        throw IoError(sidecar, e.what());
    }
}

}  // namespace modrec
