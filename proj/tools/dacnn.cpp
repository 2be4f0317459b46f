// Command-line front end: augment -> train -> eval -> regress, exchanging
// files between stages. Exit codes: 0 ok, 2 usage/config/format error,
// 3 numerical failure.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "dacnn/augment.hpp"
#include "dacnn/config.hpp"
#include "dacnn/evaluate.hpp"
#include "dacnn/idx.hpp"
#include "dacnn/quantile.hpp"
#include "dacnn/trainer.hpp"

namespace fs = std::filesystem;
using namespace dacnn;

namespace {

struct CommonFlags {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    void add_override(const std::string& key, const std::string& value) {
        overrides.emplace_back(key, value);
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path.empty()) cfg.load_file(config_path);
        for (const auto& [k, v] : overrides) cfg.set(k, v);
        return cfg;
    }
};

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw ConfigError("missing required " + what + " path");
    if (!fs::exists(path)) throw IoError(what + " file not found: " + path);
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    fs::path out(cfg.get("out"));
    fs::create_directories(out);
    return out;
}

int cmd_augment(const CommonFlags& flags) {
    RunConfig cfg = flags.resolve();
    require_file(cfg.get("images"), "images");
    require_file(cfg.get("labels"), "labels");
    const fs::path out = prepare_out_dir(cfg);

    const BaseDataset base = load_dataset(cfg.get("images"), cfg.get("labels"));
    const AugmentedDataset aug =
        expand_dataset(base, cfg.get_int("replicas"), cfg.get_double("q_lo"),
                       cfg.get_double("q_hi"), scheme_from_name(cfg.get("scheme")),
                       cfg.get_u64("seed"));
    const fs::path ds = out / "augmented.ds";
    save_augmented(aug, ds.string());
    cfg.write_resolved((out / "augment.config").string());
    std::cout << "base samples: " << base.samples.size() << "\n"
              << "augmented samples: " << aug.samples.size() << "\n"
              << "written: " << ds.string() << "\n";
    return 0;
}

int cmd_train(const CommonFlags& flags) {
    RunConfig cfg = flags.resolve();
    require_file(cfg.get("dataset"), "dataset");
    const fs::path out = prepare_out_dir(cfg);

    AugmentedDataset ds = load_augmented(cfg.get("dataset"));
    const std::size_t before = ds.samples.size();
    ds = filter_min_q(ds, cfg.get_double("q_min"));
    std::cout << "training samples: " << ds.samples.size() << " (q >= "
              << cfg.get_double("q_min") << " filter dropped " << before - ds.samples.size()
              << ")\n";

    const TrainConfig tc = cfg.train_config();
    const RbfConfig rc = cfg.rbf_config();
    NetworkModel net = NetworkModel::lenet_like(rc.K);
    net.init_parameters(tc.seed);
    std::cout << "architecture parameters: " << net.parameter_count() << "\n";

    const TrainedModel tm = train(ds, net, tc, rc);
    const fs::path model_path = out / "model.dacnn";
    save_model(tm, model_path.string());
    save_history_csv(tm, (out / "history.csv").string());
    cfg.write_resolved((out / "train.config").string());

    if (!tm.history.empty())
        std::cout << "final epoch loss " << tm.history.back().loss << ", train accuracy "
                  << 100.0 * tm.history.back().accuracy << "%\n";
    std::cout << "written: " << model_path.string() << "\n";
    return 0;
}

int cmd_eval(const CommonFlags& flags) {
    RunConfig cfg = flags.resolve();
    require_file(cfg.get("model"), "model");
    require_file(cfg.get("dataset"), "dataset");
    const fs::path out = prepare_out_dir(cfg);

    TrainedModel tm = load_model(cfg.get("model"));
    const AugmentedDataset test = load_augmented(cfg.get("dataset"));
    if (test.samples.empty()) throw EmptyRecords("test dataset is empty");

    const std::vector<EvalRecord> records = evaluate_model(tm, test);
    const RateDenominator denom = cfg.get("error_free_denominator") == "correct"
                                      ? RateDenominator::CorrectOnly
                                      : RateDenominator::AllRecords;
    const Population pop = cfg.get("population") == "correct" ? Population::CorrectOnly
                                                              : Population::AllRecords;
    const MetricsReport report = compute_metrics(records, denom, pop);

    export_correlation_field(records, (out / "correlation_field.csv").string());
    write_metrics_text(report, (out / "metrics.txt").string());
    write_metrics_csv(report, (out / "metrics.csv").string());
    cfg.write_resolved((out / "eval.config").string());
    std::cout << format_metrics(report);
    return 0;
}

int cmd_regress(const CommonFlags& flags) {
    RunConfig cfg = flags.resolve();
    require_file(cfg.get("field"), "correlation field");
    const fs::path out = prepare_out_dir(cfg);

    const std::vector<EvalRecord> records = read_correlation_field(cfg.get("field"));
    const Population pop = cfg.get("population") == "correct" ? Population::CorrectOnly
                                                              : Population::AllRecords;
    const double tau = cfg.get_double("tau");

    const auto fits = fit_interval_models(records, tau, default_breakpoints(), pop);
    const BinMedianTable bins =
        empirical_bin_medians(records, cfg.get_double("bin_width"), pop);

    write_fits_csv(fits, (out / "interval_fits.csv").string());
    write_bins_csv(bins, (out / "bin_medians.csv").string());
    cfg.write_resolved((out / "regress.config").string());

    for (const auto& f : fits) {
        std::cout << "[" << f.q_lo << ", " << f.q_hi << "] ";
        if (!f.fit) {
            std::cout << "sparse\n";
            continue;
        }
        std::cout << "beta0=" << f.fit->beta0 << " beta1=" << f.fit->beta1;
        try {
            std::cout << " adequacy=" << adequacy_check(*f.fit, bins);
        } catch (const NoBinsInInterval&) {
            std::cout << " adequacy=n/a";
        }
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distortion-aware CNN training and evaluation toolkit"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string mode, scheme, seed, epochs, tau, qmin, outdir;
    std::string images, labels, dataset, model, field;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", flags.config_path, "key=value configuration file");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--out", outdir, "output directory");
    };

    CLI::App* augment = app.add_subcommand("augment", "expand an IDX dataset with blur");
    add_common(augment);
    augment->add_option("--images", images, "IDX image file");
    augment->add_option("--labels", labels, "IDX label file");
    augment->add_option("--scheme", scheme, "grid or random");

    CLI::App* train = app.add_subcommand("train", "train a model on an augmented dataset");
    add_common(train);
    train->add_option("--dataset", dataset, "augmented dataset file");
    train->add_option("--mode", mode, "baseline or rbf");
    train->add_option("--epochs", epochs, "epoch cap");
    train->add_option("--qmin", qmin, "training filter threshold");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a model on a test dataset");
    add_common(eval);
    eval->add_option("--model", model, "model file");
    eval->add_option("--dataset", dataset, "augmented test dataset file");

    CLI::App* regress = app.add_subcommand("regress", "interval quantile regression");
    add_common(regress);
    regress->add_option("--field", field, "correlation field CSV");
    regress->add_option("--tau", tau, "quantile level");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        auto maybe = [&](const std::string& key, const std::string& value) {
            if (!value.empty()) flags.add_override(key, value);
        };
        maybe("seed", seed);
        maybe("out", outdir);
        maybe("images", images);
        maybe("labels", labels);
        maybe("dataset", dataset);
        maybe("model", model);
        maybe("field", field);
        maybe("scheme", scheme);
        maybe("mode", mode);
        maybe("epochs", epochs);
        maybe("tau", tau);
        maybe("q_min", qmin);

        if (augment->parsed()) return cmd_augment(flags);
        if (train->parsed()) return cmd_train(flags);
        if (eval->parsed()) return cmd_eval(flags);
        if (regress->parsed()) return cmd_regress(flags);
        return 2;
    } catch (const Diverged& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
