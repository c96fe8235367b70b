#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "modrec/error.hpp"
#include "modrec/experiment.hpp"
#include "modrec/oracle.hpp"

using namespace modrec;
using std::numbers::pi;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig c = ExperimentConfig::from_preset(Preset::Ci);
    c.modulations = {Modulation::BPSK, Modulation::FSK2};
    c.n_per_modulation = 10;
    c.n_symbols = 60;
    c.training_sizes = {5};
    c.snr_grid_db = {10.0};
    c.master_seed = 123;
    return c;
}

std::string features_text(const std::vector<FeatureVector>& rows) {
    std::ostringstream os;
    write_features_csv(os, rows);
    return os.str();
}

std::string results_text(const SweepResult& r) {
    std::ostringstream os;
    write_results_csv(os, r);
    return os.str();
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("modrec_test_" + name);
}

}  // namespace

TEST_CASE("dataset shape, labels and order") {
    const ExperimentConfig c = tiny_config();
    const auto rows = generate_dataset(c, 10.0, 1);
    REQUIRE(rows.size() == 20);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Modulation m = i < 10 ? Modulation::BPSK : Modulation::FSK2;
        CHECK(rows[i].modulation == m);
        CHECK(rows[i].label == class_label(m));
        CHECK(rows[i].snr_db == 10.0);
        CHECK(rows[i].seed == realization_seed(123, m, i % 10, 10.0));
        CHECK(std::isfinite(rows[i].f1));
        CHECK(rows[i].f2 >= 0.0);
        CHECK(rows[i].f3 >= 0.0);
    }
    CHECK(class_label(Modulation::FSK2) == 1);
    CHECK(class_label(Modulation::QAM16) == 0);
}

TEST_CASE("parallel generation matches the serial reference") {
    ExperimentConfig c = tiny_config();
    c.modulations = {Modulation::BPSK, Modulation::QAM16, Modulation::FSK4, Modulation::FSK8};
    c.n_per_modulation = 25;
    const std::string reference = features_text(generate_dataset_serial(c, 0.0));
    for (int threads : {1, 4, 16}) CHECK(features_text(generate_dataset(c, 0.0, threads)) == reference);
    CHECK(features_text(generate_dataset(c, 0.0, 4)) == reference);
}

TEST_CASE("realization seeds are distinct across SNR, modulation and index") {
    std::set<std::uint64_t> seeds;
    std::size_t count = 0;
    for (double snr : {-10.0, 0.0, 5.0, 20.0})
        for (Modulation m : kAllModulations)
            for (std::size_t i = 0; i < 200; ++i, ++count) seeds.insert(realization_seed(7, m, i, snr));
    CHECK(seeds.size() == count);
    CHECK(realization_seed(7, Modulation::BPSK, 0, 0.0) != realization_seed(8, Modulation::BPSK, 0, 0.0));
}

TEST_CASE("train and test rows never share a seed") {
    ExperimentConfig c = tiny_config();
    c.training_sizes = {3, 7};
    const auto rows = generate_dataset(c, 10.0, 1);
    for (std::size_t size : c.training_sizes) {
        const auto split = split_dataset(rows, c, size);
        CHECK(split.train.size() == 2 * size);
        CHECK(split.test.size() == 2 * (10 - size));
        std::set<std::uint64_t> train_seeds;
        for (const auto& r : split.train) train_seeds.insert(r.seed);
        for (const auto& r : split.test) CHECK(train_seeds.count(r.seed) == 0);
    }
    CHECK_THROWS_AS(split_dataset(rows, c, 10), InvalidArgument);
}

TEST_CASE("sweep covers the grid in canonical order and is reproducible") {
    ExperimentConfig c = tiny_config();
    c.snr_grid_db = {0.0, 10.0, 20.0};
    c.classifiers = {ClassifierKind::LR};
    const SweepResult r = run_sweep(c, 1);
    REQUIRE(r.rows.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.rows[i].classifier == ClassifierKind::LR);
        CHECK(r.rows[i].training_size == 5);
        CHECK(r.rows[i].snr_db == c.snr_grid_db[i]);
        CHECK(r.rows[i].n_test == 10);
        CHECK(r.rows[i].seed == 123);
        CHECK(r.rows[i].accuracy >= 0.0);
        CHECK(r.rows[i].accuracy <= 1.0);
    }
    CHECK(&r.at(ClassifierKind::LR, 5, 10.0) == &r.rows[1]);
    CHECK_THROWS_AS(r.at(ClassifierKind::NN, 5, 10.0), InvalidArgument);

    c.classifiers = {ClassifierKind::SVM, ClassifierKind::LR, ClassifierKind::NN};
    c.training_sizes = {3, 6};
    const std::string once = results_text(run_sweep(c, 1));
    CHECK(once.rfind(std::string(kResultsCsvHeader) + "\n", 0) == 0);
    CHECK(results_text(run_sweep(c, 1)) == once);
    CHECK(results_text(run_sweep(c, 4)) == once);
    CHECK(results_text(run_sweep(c, 16)) == once);
}

TEST_CASE("mean lag product tracks the analytic time average") {
    // At high SNR the first feature is alpha^2 g^2 times the time average of
    // the pi/2-shifted mean formula, up to symbol randomness.
    const double snr = 40.0;
    const double g2 = std::pow(10.0, snr / 10.0);
    double cpfsk_sum = 0.0, linear_sum = 0.0;
    int cpfsk_n = 0, linear_n = 0;
    for (Modulation m : {Modulation::BPSK, Modulation::PSK8, Modulation::QAM16, Modulation::FSK2}) {
        double ratio_sum = 0.0;
        const int n = 40;
        for (int i = 0; i < n; ++i) {
            const RealizationSpec spec{m, 300, 6, 0.5, snr, 0.0, derive_seed(5, {static_cast<std::uint64_t>(m),
                                                                               static_cast<std::uint64_t>(i)})};
            const Realization r = synthesize_realization(spec);
            const FeatureVector fv = realization_features(spec);
            const auto& p = r.params;
            const double scale = p.channel.alpha * p.channel.alpha * g2;
            const double normalized = fv.f1 / (scale * std::cos(p.channel.delta_prime));
            OracleSource source = CpfskScheme::make(2, 0.5, p.timing.period());
            OracleFormula formula = OracleFormula::MeanBfsk;
            if (!is_cpfsk(m)) {
                source = LinearSource{LinearScheme::make(m), RrcPulse::normalized(p.rolloff)};
                formula = OracleFormula::MeanLinear;
            }
            const double predicted =
                time_average_prediction(formula, source, p.timing, p.channel.delta_prime + pi / 2, r.samples.size());
            ratio_sum += fv.f1 / (scale * predicted);
            if (is_cpfsk(m)) {
                cpfsk_sum += normalized;
                ++cpfsk_n;
            } else {
                linear_sum += normalized;
                ++linear_n;
            }
        }
        INFO(to_string(m));
        CHECK(std::abs(ratio_sum / n - 1.0) < 0.01);
    }
    // The raised-cosine correlation at one sample lag keeps linear schemes
    // below the CPFSK tone term cos(pi h / T).
    CHECK(cpfsk_sum / cpfsk_n > linear_sum / linear_n + 0.01);
}

TEST_CASE("IQ export round trip") {
    const RealizationSpec spec{Modulation::FSK4, 80, 6, 0.5, 7.0, 0.0, 99};
    const auto path = temp_path("roundtrip.iq").string();
    export_iq(spec, path);

    const IqFile f = read_iq(path);
    CHECK(f.version == kIqFormatVersion);
    const Realization direct = synthesize_realization(spec);
    REQUIRE(f.samples.size() == direct.samples.size());
    CHECK(std::filesystem::file_size(path) == 16 + 8 * f.samples.size());
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        CHECK(f.samples[i].real() == static_cast<float>(direct.samples[i].real()));
        CHECK(f.samples[i].imag() == static_cast<float>(direct.samples[i].imag()));
    }

    // The sidecar alone regenerates the same samples.
    const RealizationParams p = read_iq_sidecar(path);
    CHECK(p.spec.modulation == spec.modulation);
    CHECK(p.spec.seed == spec.seed);
    CHECK(p.n_samples == f.samples.size());
    CHECK(p.channel.alpha == direct.params.channel.alpha);
    CHECK(p.timing.eps == direct.params.timing.eps);
    const Realization again = synthesize_realization(p.spec);
    CHECK(again.samples == direct.samples);

    CHECK_THROWS_AS(export_iq(RealizationSpec{Modulation::BPSK, 80, 6, 0.5, std::nan(""), 0.0, 1}, path),
                    InvalidArgument);
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".json");
}

TEST_CASE("read_iq rejects damaged files") {
    const RealizationSpec spec{Modulation::BPSK, 40, 6, 0.5, 0.0, 0.0, 3};
    const auto path = temp_path("damaged.iq").string();
    export_iq(spec, path);
    std::string bytes;
    {
        std::ifstream is(path, std::ios::binary);
        bytes.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
    }
    auto write = [&](const std::string& b) {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        os.write(b.data(), static_cast<std::streamsize>(b.size()));
    };

    write(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_iq(path), IoError);
    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    write(bad_magic);
    CHECK_THROWS_AS(read_iq(path), IoError);
    std::string bad_version = bytes;
    bad_version[4] = 9;
    write(bad_version);
    CHECK_THROWS_AS(read_iq(path), IoError);
    write(bytes.substr(0, 10));
    CHECK_THROWS_AS(read_iq(path), IoError);

    {
        std::ofstream js(path + ".json");
        js << "{\"modulation\": \"BPSK\"}";
    }
    CHECK_THROWS_AS(read_iq_sidecar(path), IoError);
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".json");
    CHECK_THROWS_AS(read_iq(path), IoError);
    CHECK_THROWS_AS(read_iq_sidecar(path), IoError);
}

TEST_CASE("presets") {
    const auto desk = ExperimentConfig::from_preset(Preset::Desk);
    CHECK(desk.n_symbols == 600);
    CHECK(desk.modulations.size() == 7);
    CHECK(desk.snr_grid_db == std::vector<double>{-10, -5, 0, 5, 10, 15, 20});
    const auto paper = ExperimentConfig::from_preset(Preset::Paper);
    CHECK(paper.n_per_modulation == 10000);
    const auto ci = ExperimentConfig::from_preset(Preset::Ci);
    CHECK(ci.n_per_modulation == 200);
    CHECK(ci.n_symbols == 150);
    for (Preset p : {Preset::Paper, Preset::Desk, Preset::Ci}) CHECK(parse_preset(to_string(p)) == p);
    CHECK_THROWS_AS(parse_preset("huge"), InvalidArgument);
    CHECK_THROWS_AS(ci.seed(), InvalidArgument);
}

TEST_CASE("TOML config parsing") {
    const ExperimentConfig c = parse_experiment_config(R"(
preset = "ci"
modulations = ["BPSK", "8FSK"]
snr_grid_db = [0.0, 5.5]
training_sizes = [10, 20]
classifiers = ["LR", "NN"]
master_seed = 42
svm_c = 2.5
mlp_epochs = 7
)");
    CHECK(c.preset == Preset::Ci);
    CHECK(c.n_symbols == 150);
    CHECK(c.modulations == std::vector<Modulation>{Modulation::BPSK, Modulation::FSK8});
    CHECK(c.snr_grid_db == std::vector<double>{0.0, 5.5});
    CHECK(c.training_sizes == std::vector<std::size_t>{10, 20});
    CHECK(c.classifiers == std::vector<ClassifierKind>{ClassifierKind::LR, ClassifierKind::NN});
    CHECK(c.seed() == 42);
    CHECK(c.train.svm.c == 2.5);
    CHECK(c.train.mlp.epochs == 7);
    c.validate();

    CHECK(parse_experiment_config("preset = \"ci\"", Preset::Paper).n_per_modulation == 10000);
    CHECK(parse_experiment_config("").preset == Preset::Desk);
    CHECK_THROWS_AS(parse_experiment_config("bogus = 1"), DataError);
    CHECK_THROWS_AS(parse_experiment_config("ns = \"six\""), DataError);
    CHECK_THROWS_AS(parse_experiment_config("ns = -3"), DataError);
    CHECK_THROWS_AS(parse_experiment_config("modulations = [\"OOK\"]"), DataError);
    CHECK_THROWS_AS(parse_experiment_config("preset = \"huge\""), DataError);
    CHECK_THROWS_AS(parse_experiment_config("this is not toml"), DataError);
    CHECK_THROWS_AS(load_experiment_config(temp_path("missing.toml").string()), IoError);

    const auto path = temp_path("config.toml").string();
    {
        std::ofstream os(path);
        os << "preset = \"ci\"\nmaster_seed = 9\n";
    }
    CHECK(load_experiment_config(path).seed() == 9);
    std::filesystem::remove(path);
}

TEST_CASE("config overrides accept TOML and bare forms") {
    ExperimentConfig c = ExperimentConfig::from_preset(Preset::Ci);
    apply_config_override(c, "master_seed", "17");
    CHECK(c.seed() == 17);
    apply_config_override(c, "snr_grid_db", "[1, 2.5]");
    CHECK(c.snr_grid_db == std::vector<double>{1.0, 2.5});
    apply_config_override(c, "snr_grid_db", "-3,4");
    CHECK(c.snr_grid_db == std::vector<double>{-3.0, 4.0});
    apply_config_override(c, "snr_grid_db", "8");
    CHECK(c.snr_grid_db == std::vector<double>{8.0});
    apply_config_override(c, "modulations", "BPSK,BFSK");
    CHECK(c.modulations == std::vector<Modulation>{Modulation::BPSK, Modulation::FSK2});
    apply_config_override(c, "classifiers", "SVM");
    CHECK(c.classifiers == std::vector<ClassifierKind>{ClassifierKind::SVM});
    apply_config_override(c, "h", "0.25");
    CHECK(c.h == 0.25);
    CHECK_THROWS_AS(apply_config_override(c, "nope", "1"), DataError);
    CHECK_THROWS_AS(apply_config_override(c, "ns", "abc"), DataError);
    CHECK_THROWS_AS(apply_config_override(c, "modulations", "BPSK,OOK"), DataError);
    const auto& keys = experiment_config_keys();
    CHECK(std::find(keys.begin(), keys.end(), "svm_c") != keys.end());
}

TEST_CASE("config validation") {
    auto expect_invalid = [](auto mutate) {
        ExperimentConfig c = tiny_config();
        mutate(c);
        CHECK_THROWS_AS(c.validate(), InvalidArgument);
    };
    tiny_config().validate();
    expect_invalid([](ExperimentConfig& c) { c.modulations = {Modulation::BPSK, Modulation::QAM16}; });
    expect_invalid([](ExperimentConfig& c) { c.modulations.clear(); });
    expect_invalid([](ExperimentConfig& c) { c.n_per_modulation = 1; });
    expect_invalid([](ExperimentConfig& c) { c.n_symbols = 0; });
    expect_invalid([](ExperimentConfig& c) { c.ns = 1; });
    expect_invalid([](ExperimentConfig& c) { c.h = 0.0; });
    expect_invalid([](ExperimentConfig& c) { c.snr_grid_db.clear(); });
    expect_invalid([](ExperimentConfig& c) { c.snr_grid_db = {std::nan("")}; });
    expect_invalid([](ExperimentConfig& c) { c.classifiers.clear(); });
    expect_invalid([](ExperimentConfig& c) { c.training_sizes = {10}; });
    expect_invalid([](ExperimentConfig& c) { c.training_sizes = {0}; });
    ExperimentConfig unseeded = tiny_config();
    unseeded.master_seed.reset();
    CHECK_THROWS_AS(run_sweep(unseeded, 1), InvalidArgument);
}
