#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "modrec/classifiers.hpp"
#include "modrec/error.hpp"
#include "modrec/experiment.hpp"

namespace modrec::cli {

namespace {

// Config keys exposed as --<key> flags on the subcommands that build an
// ExperimentConfig.
struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> values;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Experiment config file (TOML)")->check(CLI::ExistingFile);
        for (const auto& key : experiment_config_keys()) {
            const std::string names = key == "master_seed" ? "--master_seed,--seed" : "--" + key;
            cmd->add_option(names, values[key], "Override config key '" + key + "'");
        }
    }

    ExperimentConfig build() const {
        std::optional<Preset> preset;
        if (const auto& p = values.at("preset"); !p.empty()) preset = parse_preset(p);
        ExperimentConfig c = config_path.empty() ? ExperimentConfig::from_preset(preset.value_or(Preset::Desk))
                                                 : load_experiment_config(config_path, preset);
        for (const auto& [key, value] : values)
            if (key != "preset" && !value.empty()) apply_config_override(c, key, value);
        return c;
    }
};

class UsageError : public Error {
public:
    using Error::Error;
};

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return fallback;
    file.open(path);
    if (!file) throw IoError(path, "cannot open for writing");
    return file;
}

void finish_output(const std::string& path, std::ofstream& file) {
    if (!path.empty() && path != "-") {
        file.flush();
        if (!file) throw IoError(path, "write failed");
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Modulation recognition toolkit: CPFSK vs PSK/QAM from lag-product features"};
    // -h is taken by the CPFSK modulation index flag.
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = OpenMP default)");

    // generate
    auto* gen = app.add_subcommand("generate", "Simulate realizations and write the features CSV");
    ConfigFlags gen_flags;
    gen_flags.attach(gen);
    std::string gen_out;
    gen->add_option("--out,-o", gen_out, "Output CSV (default stdout)");

    // train
    auto* train = app.add_subcommand("train", "Train a classifier on a features CSV");
    std::string train_in, train_out, train_kind = "LR";
    std::map<std::string, std::string> train_overrides;
    train->add_option("--features", train_in, "Features CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--classifier", train_kind, "SVM, LR or NN")->check(CLI::IsMember({"SVM", "LR", "NN"}));
    train->add_option("--out,-o", train_out, "Model file (JSON)")->required();
    for (const char* key : {"svm_c", "svm_tolerance", "svm_max_epochs", "logreg_max_iterations",
                            "logreg_gradient_tolerance", "mlp_epochs", "mlp_batch_size", "mlp_learning_rate",
                            "mlp_validation_fraction", "seed"})
        train->add_option(std::string("--") + key, train_overrides[key]);

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "Accuracy of a trained model on a features CSV");
    std::string eval_model, eval_in;
    eval->add_option("--model", eval_model, "Model file")->required()->check(CLI::ExistingFile);
    eval->add_option("--features", eval_in, "Features CSV")->required()->check(CLI::ExistingFile);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Train and evaluate every (classifier, size, SNR) grid point");
    ConfigFlags sweep_flags;
    sweep_flags.attach(sweep);
    std::string sweep_out;
    sweep->add_option("--out,-o", sweep_out, "Results CSV (default stdout)");

    // oracle-check
    auto* oracle = app.add_subcommand("oracle-check", "Compare closed-form statistics with Monte-Carlo");
    OracleCheckConfig ocfg;
    std::string oracle_out;
    oracle->add_option("--draws", ocfg.n_draws, "Monte-Carlo draws per check")->check(CLI::Range(2, 100000000));
    oracle->add_option("--seed", ocfg.seed, "Random seed");
    oracle->add_option("--out,-o", oracle_out, "Report CSV (default stdout)");
    oracle->add_flag("--inject-bug", ocfg.inject_bfsk_variance_bug)->group("");

    // export-iq
    auto* iq = app.add_subcommand("export-iq", "Write one received realization as raw IQ");
    RealizationSpec spec;
    std::string iq_mod = "BFSK", iq_out;
    iq->add_option("--modulation", iq_mod, "BPSK, 4PSK, 8PSK, 16QAM, BFSK, 4FSK or 8FSK");
    iq->add_option("--seed", spec.seed, "Realization seed")->required();
    iq->add_option("--snr_db", spec.snr_db, "SNR in dB");
    iq->add_option("--n_symbols", spec.n_symbols, "Symbols per realization")->check(CLI::PositiveNumber);
    iq->add_option("--ns", spec.ns, "Oversampling")->check(CLI::Range(2, 1 << 16));
    iq->add_option("--h", spec.h, "CPFSK modulation index")->check(CLI::PositiveNumber);
    iq->add_option("--gamma_prime", spec.gamma_prime, "Nominal spectral center");
    iq->add_option("--out,-o", iq_out, "Output file (sidecar: <out>.json)")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (gen->parsed()) {
            const ExperimentConfig c = gen_flags.build();
            if (!c.master_seed) throw UsageError("--seed (or master_seed in the config) is required");
            std::vector<FeatureVector> rows;
            for (double snr : c.snr_grid_db) {
                auto part = generate_dataset(c, snr, threads);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            std::ofstream f;
            write_features_csv(open_output(gen_out, f, out), rows);
            finish_output(gen_out, f);
        } else if (train->parsed()) {
            TrainConfig tc;
            ExperimentConfig scratch;
            for (const auto& [key, value] : train_overrides)
                if (!value.empty() && key != "seed") apply_config_override(scratch, key, value);
            tc = scratch.train;
            if (const auto& s = train_overrides["seed"]; !s.empty()) tc.mlp.seed = std::stoull(s);
            const auto rows = read_features_csv(train_in);
            const TrainedModel model = train_model(parse_classifier(train_kind), rows, tc);
            save_model(train_out, model);
            out << fmt::format("trained {} on {} rows, training accuracy {:.6f}\n", train_kind, rows.size(),
                               evaluate_accuracy(model, rows));
        } else if (eval->parsed()) {
            const TrainedModel model = load_model(eval_model);
            const auto rows = read_features_csv(eval_in);
            out << fmt::format("accuracy,n\n{:.17g},{}\n", evaluate_accuracy(model, rows), rows.size());
        } else if (sweep->parsed()) {
            const ExperimentConfig c = sweep_flags.build();
            if (!c.master_seed) throw UsageError("--seed (or master_seed in the config) is required for sweep");
            const SweepResult result = run_sweep(c, threads);
            std::ofstream f;
            write_results_csv(open_output(sweep_out, f, out), result);
            finish_output(sweep_out, f);
        } else if (oracle->parsed()) {
            ocfg.threads = threads;
            const OracleReport report = oracle_check(ocfg);
            std::ofstream f;
            write_oracle_csv(open_output(oracle_out, f, out), report);
            finish_output(oracle_out, f);
            const auto failed = std::count_if(report.rows.begin(), report.rows.end(),
                                              [](const OracleRow& r) { return !r.pass; });
            err << fmt::format("oracle-check: {} of {} checks passed\n", report.rows.size() - failed,
                               report.rows.size());
            if (failed) return kOracleFailure;
        } else if (iq->parsed()) {
            spec.modulation = parse_modulation(iq_mod);
            export_iq(spec, iq_out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    }
    return kSuccess;
}

}  // namespace modrec::cli
