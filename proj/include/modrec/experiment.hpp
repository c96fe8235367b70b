#pragma once

// Monte-Carlo experiment protocol: labeled feature datasets across SNRs,
// per-SNR training of each classifier at each training-set size, accuracy
// tables, analytic cross-checks and raw IQ export.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "modrec/channel.hpp"
#include "modrec/classifiers.hpp"
#include "modrec/features.hpp"
#include "modrec/waveform.hpp"

namespace modrec {

enum class Preset { Paper, Desk, Ci };

std::string_view to_string(Preset p);
Preset parse_preset(std::string_view name);

struct ExperimentConfig {
    Preset preset = Preset::Desk;
    std::vector<Modulation> modulations{std::begin(kAllModulations), std::end(kAllModulations)};
    std::size_t n_per_modulation = 3000;
    std::size_t n_symbols = 600;
    int ns = 6;
    double h = 0.5;
    double gamma_prime = 0.0;
    std::vector<double> snr_grid_db{-10, -5, 0, 5, 10, 15, 20};
    std::vector<std::size_t> training_sizes{50, 100, 200, 500, 1000, 2000};
    std::vector<ClassifierKind> classifiers{ClassifierKind::SVM, ClassifierKind::LR, ClassifierKind::NN};
    std::optional<std::uint64_t> master_seed;
    TrainConfig train;

    static ExperimentConfig from_preset(Preset preset);
    void validate() const;
    std::uint64_t seed() const;
};

// Flat TOML document. The preset (override, else the `preset` key, else
// desk) supplies defaults; every other key then overrides one field.
ExperimentConfig parse_experiment_config(std::string_view toml_text,
                                         std::optional<Preset> preset_override = std::nullopt);
ExperimentConfig load_experiment_config(const std::string& path,
                                        std::optional<Preset> preset_override = std::nullopt);
// Sets one key from its text form: TOML syntax, a bare string, or a bare
// comma-separated list.
void apply_config_override(ExperimentConfig& config, std::string_view key, std::string_view value);
const std::vector<std::string>& experiment_config_keys();

// What a single realization needs beyond its seed.
struct RealizationSpec {
    Modulation modulation = Modulation::BPSK;
    std::size_t n_symbols = 600;
    int ns = 6;
    double h = 0.5;
    double snr_db = 0.0;
    double gamma_prime = 0.0;
    std::uint64_t seed = 0;
};

// Every random draw of one realization.
struct RealizationParams {
    RealizationSpec spec;
    double rolloff = 0.0;
    SymbolTiming timing;
    ChannelParams channel;
    std::size_t n_samples = 0;  // received length
};

struct Realization {
    RealizationParams params;
    Signal samples;  // received, centered at gamma_prime
};

Realization synthesize_realization(const RealizationSpec& spec);

// Features of one realization, downconverted to center 0 first.
FeatureVector realization_features(const RealizationSpec& spec);

std::uint64_t realization_seed(std::uint64_t master_seed, Modulation m, std::size_t index, double snr_db);

// Rows ordered by modulation (config order), then realization index.
// threads <= 0 uses the OpenMP default.
std::vector<FeatureVector> generate_dataset(const ExperimentConfig& config, double snr_db, int threads = 0);
// Single-threaded reference; identical output.
std::vector<FeatureVector> generate_dataset_serial(const ExperimentConfig& config, double snr_db);

struct SweepRow {
    ClassifierKind classifier = ClassifierKind::SVM;
    std::size_t training_size = 0;  // per modulation
    double snr_db = 0.0;
    double accuracy = 0.0;
    std::size_t n_test = 0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    const SweepRow& at(ClassifierKind c, std::size_t size, double snr_db) const;
};

struct DatasetSplit {
    std::vector<FeatureVector> train;
    std::vector<FeatureVector> test;
};

// First `training_size` rows of every modulation train, the rest test.
DatasetSplit split_dataset(const std::vector<FeatureVector>& rows, const ExperimentConfig& config,
                           std::size_t training_size);

// Rows in canonical order: classifier, training size, SNR.
SweepResult run_sweep(const ExperimentConfig& config, int threads = 0);

inline constexpr const char* kResultsCsvHeader = "classifier,training_size,snr_db,accuracy,n_test,seed";
void write_results_csv(std::ostream& os, const SweepResult& result);

// ---------------------------------------------------------------------------
// Analytic cross-check

struct OracleCheckConfig {
    std::size_t n_draws = 100000;
    std::uint64_t seed = 20160101;
    int ns = 6;
    double eps = 0.37;
    double eps0 = 0.61;
    double rolloff = 0.35;
    double h = 0.5;
    std::vector<long> ks{20, 23, 26};
    std::vector<double> delta_primes;  // empty = {0, pi/20, pi/2}
    std::vector<Modulation> modulations{Modulation::BPSK, Modulation::PSK4, Modulation::PSK8,
                                        Modulation::QAM16, Modulation::FSK2};
    std::size_t n_realizations = 200;  // for the whole-realization checks
    bool include_time_average = true;
    bool inject_bfsk_variance_bug = false;  // mutation testing only
    int threads = 0;
};

struct OracleRow {
    std::string formula;
    Modulation modulation = Modulation::BPSK;
    double delta_prime = 0.0;
    long k = 0;  // -1 for whole-realization statistics
    double analytic = 0.0;
    double monte_carlo = 0.0;
    double std_err = 0.0;
    bool pass = false;
};

struct OracleReport {
    std::vector<OracleRow> rows;
    bool all_pass() const noexcept;
};

OracleReport oracle_check(const OracleCheckConfig& config = {});

inline constexpr const char* kOracleCsvHeader =
    "formula,modulation,delta_prime,k,analytic,monte_carlo,std_err,result";
void write_oracle_csv(std::ostream& os, const OracleReport& report);

// ---------------------------------------------------------------------------
// Raw IQ export

inline constexpr std::uint16_t kIqFormatVersion = 1;

// Binary file plus `<path>.json` sidecar holding the realization params.
void export_iq(const RealizationSpec& spec, const std::string& path);

struct IqFile {
    std::uint16_t version = 0;
    std::vector<std::complex<float>> samples;
};

IqFile read_iq(const std::string& path);
RealizationParams read_iq_sidecar(const std::string& path);

}  // namespace modrec
