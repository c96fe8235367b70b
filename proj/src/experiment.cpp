#include "modrec/experiment.hpp"

#include <algorithm>
#include <bit>
#include <exception>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <toml.hpp>

#include "modrec/error.hpp"
#include "modrec/rng.hpp"
#include "parallel.hpp"

namespace modrec {

std::string_view to_string(Preset p) {
    switch (p) {
        case Preset::Paper: return "paper";
        case Preset::Desk: return "desk";
        case Preset::Ci: return "ci";
    }
    return "?";
}

Preset parse_preset(std::string_view name) {
    for (auto p : {Preset::Paper, Preset::Desk, Preset::Ci})
        if (to_string(p) == name) return p;
    throw InvalidArgument("unknown preset '" + std::string(name) + "' (expected paper, desk or ci)");
}

ExperimentConfig ExperimentConfig::from_preset(Preset preset) {
    ExperimentConfig c;
    c.preset = preset;
    switch (preset) {
        case Preset::Paper:
            c.n_per_modulation = 10000;
            c.n_symbols = 600;
            c.training_sizes = {50, 100, 200, 500, 1000, 2000};
            break;
        case Preset::Desk:
            c.n_per_modulation = 3000;
            c.n_symbols = 600;
            c.training_sizes = {50, 100, 200, 500, 1000, 2000};
            break;
        case Preset::Ci:
            c.n_per_modulation = 200;
            c.n_symbols = 150;
            c.training_sizes = {20, 50, 100};
            break;
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (modulations.empty()) throw InvalidArgument("config: no modulations");
    bool has_class[2] = {false, false};
    for (Modulation m : modulations) has_class[class_label(m)] = true;
    if (!has_class[0] || !has_class[1])
        throw InvalidArgument("config: modulations must include both CPFSK and linear schemes");
    if (n_per_modulation < 2) throw InvalidArgument("config: n_per_modulation must be >= 2");
    if (n_symbols < 1) throw InvalidArgument("config: n_symbols must be >= 1");
    if (ns < 2) throw InvalidArgument("config: ns must be >= 2");
    if (!(h > 0.0)) throw InvalidArgument("config: h must be > 0");
    if (snr_grid_db.empty()) throw InvalidArgument("config: empty snr_grid_db");
    for (double s : snr_grid_db)
        if (!std::isfinite(s)) throw InvalidArgument("config: SNR grid values must be finite");
    if (classifiers.empty()) throw InvalidArgument("config: no classifiers");
    if (training_sizes.empty()) throw InvalidArgument("config: no training sizes");
    for (std::size_t t : training_sizes) {
        if (t < 1) throw InvalidArgument("config: training sizes must be >= 1");
        if (t >= n_per_modulation)
            throw InvalidArgument(fmt::format("config: training size {} leaves no test rows out of {} per modulation",
                                              t, n_per_modulation));
    }
}

std::uint64_t ExperimentConfig::seed() const {
    if (!master_seed) throw InvalidArgument("config: master_seed is required");
    return *master_seed;
}

// ---------------------------------------------------------------------------
// Config file

namespace {

template <typename T>
T scalar(const toml::node& node, std::string_view key) {
    if constexpr (std::is_same_v<T, double>) {
        if (auto v = node.value<double>()) return *v;
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (auto v = node.value<std::string>()) return *v;
    } else {
        if (auto v = node.value<std::int64_t>()) {
            if (*v < 0) throw DataError(fmt::format("config key '{}' must be non-negative", key));
            return static_cast<T>(*v);
        }
    }
    throw DataError(fmt::format("config key '{}' has the wrong type", key));
}

template <typename T>
std::vector<T> list(const toml::node& node, std::string_view key) {
    const auto* arr = node.as_array();
    if (!arr) throw DataError(fmt::format("config key '{}' must be an array", key));
    std::vector<T> out;
    for (const auto& item : *arr) out.push_back(scalar<T>(item, key));
    return out;
}

void apply_entry(ExperimentConfig& c, std::string_view key, const toml::node& v) {
    try {
        if (key == "preset") {
            // Handled before the other keys.
        } else if (key == "modulations") {
            c.modulations.clear();
            for (const auto& s : list<std::string>(v, key)) c.modulations.push_back(parse_modulation(s));
        } else if (key == "n_per_modulation") {
            c.n_per_modulation = scalar<std::size_t>(v, key);
        } else if (key == "n_symbols") {
            c.n_symbols = scalar<std::size_t>(v, key);
        } else if (key == "ns") {
            c.ns = scalar<int>(v, key);
        } else if (key == "h") {
            c.h = scalar<double>(v, key);
        } else if (key == "gamma_prime") {
            c.gamma_prime = scalar<double>(v, key);
        } else if (key == "snr_grid_db") {
            c.snr_grid_db = list<double>(v, key);
        } else if (key == "training_sizes") {
            c.training_sizes = list<std::size_t>(v, key);
        } else if (key == "classifiers") {
            c.classifiers.clear();
            for (const auto& s : list<std::string>(v, key)) c.classifiers.push_back(parse_classifier(s));
        } else if (key == "master_seed" || key == "seed") {
            c.master_seed = scalar<std::uint64_t>(v, key);
        } else if (key == "svm_c") {
            c.train.svm.c = scalar<double>(v, key);
        } else if (key == "svm_tolerance") {
            c.train.svm.tolerance = scalar<double>(v, key);
        } else if (key == "svm_max_epochs") {
            c.train.svm.max_epochs = scalar<int>(v, key);
        } else if (key == "logreg_max_iterations") {
            c.train.logreg.max_iterations = scalar<int>(v, key);
        } else if (key == "logreg_gradient_tolerance") {
            c.train.logreg.gradient_tolerance = scalar<double>(v, key);
        } else if (key == "mlp_epochs") {
            c.train.mlp.epochs = scalar<int>(v, key);
        } else if (key == "mlp_batch_size") {
            c.train.mlp.batch_size = scalar<int>(v, key);
        } else if (key == "mlp_learning_rate") {
            c.train.mlp.learning_rate = scalar<double>(v, key);
        } else if (key == "mlp_validation_fraction") {
            c.train.mlp.validation_fraction = scalar<double>(v, key);
        } else {
            throw DataError(fmt::format("unknown config key '{}'", key));
        }
    } catch (const InvalidArgument& e) {
        throw DataError(fmt::format("config key '{}': {}", key, e.what()));
    }
}

toml::table parse_toml(std::string_view text) {
    try {
        return toml::parse(text);
    } catch (const toml::parse_error& e) {
        throw DataError(fmt::format("config: {}", e.description()));
    }
}

}  // namespace

const std::vector<std::string>& experiment_config_keys() {
    static const std::vector<std::string> keys = {
        "preset", "modulations", "n_per_modulation", "n_symbols", "ns", "h", "gamma_prime", "snr_grid_db",
        "training_sizes", "classifiers", "master_seed", "svm_c", "svm_tolerance", "svm_max_epochs",
        "logreg_max_iterations", "logreg_gradient_tolerance", "mlp_epochs", "mlp_batch_size",
        "mlp_learning_rate", "mlp_validation_fraction"};
    return keys;
}

ExperimentConfig parse_experiment_config(std::string_view toml_text, std::optional<Preset> preset_override) {
    const toml::table t = parse_toml(toml_text);
    Preset preset = Preset::Desk;
    if (preset_override) {
        preset = *preset_override;
    } else if (const auto* node = t.get("preset")) {
        try {
            preset = parse_preset(scalar<std::string>(*node, "preset"));
        } catch (const InvalidArgument& e) {
            throw DataError(e.what());
        }
    }
    ExperimentConfig c = ExperimentConfig::from_preset(preset);
    for (const auto& [key, value] : t) apply_entry(c, key.str(), value);
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path, std::optional<Preset> preset_override) {
    std::ifstream is(path);
    if (!is) throw IoError(path, "cannot open config");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_experiment_config(ss.str(), preset_override);
}

void apply_config_override(ExperimentConfig& config, std::string_view key, std::string_view value) {
    const auto& keys = experiment_config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw DataError(fmt::format("unknown config key '{}'", key));
    // Accept TOML syntax as well as bare strings and bare comma-separated lists.
    const std::string v(value);
    std::string quoted_items;
    std::stringstream items(v);
    for (std::string item; std::getline(items, item, ',');)
        quoted_items += (quoted_items.empty() ? "'" : ",'") + item + "'";
    const std::string k(key);
    std::exception_ptr last;
    for (const std::string& candidate : {v, "[" + v + "]", "'" + v + "'", "[" + quoted_items + "]"}) {
        toml::table t;
        try {
            t = toml::parse(k + " = " + candidate);
        } catch (const toml::parse_error&) {
            continue;
        }
        try {
            apply_entry(config, key, *t.get(k));
            return;
        } catch (const DataError&) {
            last = std::current_exception();
        }
    }
    if (last) std::rethrow_exception(last);
    throw DataError(fmt::format("cannot parse value '{}' for config key '{}'", value, key));
}

// ---------------------------------------------------------------------------
// Realizations

Realization synthesize_realization(const RealizationSpec& spec) {
    Rng rng(spec.seed);
    RealizationParams p;
    p.spec = spec;
    p.rolloff = std::uniform_int_distribution<int>(1, 10)(rng) / 10.0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    p.timing.ns = spec.ns;
    p.timing.eps = unit(rng);
    p.timing.eps0 = unit(rng);
    p.channel = draw_channel(rng, spec.gamma_prime, spec.ns, p.timing.eps, spec.snr_db);
    p.timing.k0 = p.channel.k0;
    p.timing.validate();

    p.n_samples = static_cast<std::size_t>(std::floor(static_cast<double>(spec.n_symbols) * p.timing.period()));
    const std::size_t n_clean = p.n_samples + static_cast<std::size_t>(p.timing.k0);

    Signal clean;
    if (is_cpfsk(spec.modulation)) {
        const auto scheme = CpfskScheme::make(cpfsk_order(spec.modulation), spec.h, p.timing.period());
        const auto tones = draw_tones(scheme.order, cpfsk_symbols_needed(p.timing, n_clean), rng);
        clean = modulate_cpfsk(tones, scheme, p.timing, n_clean);
    } else {
        const auto scheme = LinearScheme::make(spec.modulation);
        const auto pulse = RrcPulse::normalized(p.rolloff);
        const auto symbols = draw_symbols(scheme, linear_symbols_needed(pulse, p.timing, n_clean), rng);
        clean = modulate_linear(symbols, pulse, p.timing, n_clean);
    }
    Realization r;
    r.samples = apply_channel(clean, p.channel, rng);
    r.params = p;
    return r;
}

FeatureVector realization_features(const RealizationSpec& spec) {
    const Realization r = synthesize_realization(spec);
    FeatureVector fv = spec.gamma_prime == 0.0 ? extract_features(r.samples)
                                               : extract_features(shift_center(r.samples, -spec.gamma_prime));
    fv.label = class_label(spec.modulation);
    fv.modulation = spec.modulation;
    fv.snr_db = spec.snr_db;
    fv.seed = spec.seed;
    return fv;
}

std::uint64_t realization_seed(std::uint64_t master_seed, Modulation m, std::size_t index, double snr_db) {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(m), index, std::bit_cast<std::uint64_t>(snr_db)});
}

namespace {

RealizationSpec spec_for(const ExperimentConfig& config, double snr_db, std::size_t flat_index) {
    const Modulation m = config.modulations[flat_index / config.n_per_modulation];
    const std::size_t i = flat_index % config.n_per_modulation;
    return RealizationSpec{m, config.n_symbols, config.ns, config.h, snr_db, config.gamma_prime,
                           realization_seed(config.seed(), m, i, snr_db)};
}

FeatureVector features_with_provenance(const RealizationSpec& spec, std::size_t flat_index,
                                       std::size_t n_per_modulation) {
    try {
        return realization_features(spec);
    } catch (const Error& e) {
        throw DataError(fmt::format("{} realization {} (seed {}, snr {} dB): {}", to_string(spec.modulation),
                                    flat_index % n_per_modulation, spec.seed, spec.snr_db, e.what()));
    }
}

}  // namespace

std::vector<FeatureVector> generate_dataset(const ExperimentConfig& config, double snr_db, int threads) {
    config.validate();
    const std::size_t n = config.modulations.size() * config.n_per_modulation;
    std::vector<FeatureVector> rows(n);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        rows[i] = features_with_provenance(spec_for(config, snr_db, i), i, config.n_per_modulation);
    });
    return rows;
}

std::vector<FeatureVector> generate_dataset_serial(const ExperimentConfig& config, double snr_db) {
    config.validate();
    const std::size_t n = config.modulations.size() * config.n_per_modulation;
    std::vector<FeatureVector> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        rows.push_back(features_with_provenance(spec_for(config, snr_db, i), i, config.n_per_modulation));
    return rows;
}

// ---------------------------------------------------------------------------
// Sweep

const SweepRow& SweepResult::at(ClassifierKind c, std::size_t size, double snr_db) const {
    for (const auto& r : rows)
        if (r.classifier == c && r.training_size == size && r.snr_db == snr_db) return r;
    throw InvalidArgument(fmt::format("no sweep row for {} size {} at {} dB", to_string(c), size, snr_db));
}

DatasetSplit split_dataset(const std::vector<FeatureVector>& rows, const ExperimentConfig& config,
                           std::size_t training_size) {
    const std::size_t n = config.n_per_modulation;
    if (training_size >= n)
        throw InvalidArgument(fmt::format("training size {} must be below the {} rows per modulation",
                                          training_size, n));
    if (rows.size() != n * config.modulations.size()) throw InvalidArgument("dataset does not match config");
    DatasetSplit split;
    for (std::size_t m = 0; m < config.modulations.size(); ++m)
        for (std::size_t i = 0; i < n; ++i)
            (i < training_size ? split.train : split.test).push_back(rows[m * n + i]);
    return split;
}

SweepResult run_sweep(const ExperimentConfig& config, int threads) {
    config.validate();
    const std::uint64_t master = config.seed();
    const std::size_t n_cls = config.classifiers.size();
    const std::size_t n_sizes = config.training_sizes.size();
    const std::size_t n_snr = config.snr_grid_db.size();

    SweepResult result;
    result.rows.resize(n_cls * n_sizes * n_snr);
    for (std::size_t si = 0; si < n_snr; ++si) {
        const double snr = config.snr_grid_db[si];
        const auto dataset = generate_dataset(config, snr, threads);
        std::vector<DatasetSplit> splits;
        for (std::size_t size : config.training_sizes) splits.push_back(split_dataset(dataset, config, size));

        detail::parallel_for(n_cls * n_sizes, threads, [&](std::size_t task) {
            const std::size_t ci = task / n_sizes;
            const std::size_t zi = task % n_sizes;
            const ClassifierKind kind = config.classifiers[ci];
            const std::size_t size = config.training_sizes[zi];
            TrainConfig tc = config.train;
            tc.mlp.seed = derive_seed(master, {std::bit_cast<std::uint64_t>(snr), size,
                                               static_cast<std::uint64_t>(kind)});
            const TrainedModel model = train_model(kind, splits[zi].train, tc);
            SweepRow& row = result.rows[(ci * n_sizes + zi) * n_snr + si];
            row.classifier = kind;
            row.training_size = size;
            row.snr_db = snr;
            row.accuracy = evaluate_accuracy(model, splits[zi].test);
            row.n_test = splits[zi].test.size();
            row.seed = master;
        });
    }
    return result;
}

void write_results_csv(std::ostream& os, const SweepResult& result) {
    os << kResultsCsvHeader << '\n';
    for (const auto& r : result.rows)
        os << fmt::format("{},{},{:.17g},{:.17g},{},{}\n", to_string(r.classifier), r.training_size, r.snr_db,
                          r.accuracy, r.n_test, r.seed);
}

}  // namespace modrec
