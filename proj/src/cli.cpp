#include "gwgb/cli.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "gwgb/boosting.hpp"
#include "gwgb/dataset.hpp"
#include "gwgb/errors.hpp"
#include "gwgb/eval.hpp"
#include "gwgb/io.hpp"
#include "gwgb/model_io.hpp"

namespace gwgb::cli {
namespace {

struct DataFlags {
    std::string data;
    std::string label_column;
    std::optional<std::size_t> label_index;
};

void add_data_flags(CLI::App& app, DataFlags& flags) {
    app.add_option("--data", flags.data, "Input CSV (header row, comma separated)")->required();
    auto* name = app.add_option("--label-column", flags.label_column, "Name of the label column");
    auto* index = app.add_option("--label-index", flags.label_index, "Zero-based index of the label column");
    name->excludes(index);
}

Dataset load(const DataFlags& flags, Task task) {
    if (flags.label_index) return load_csv(flags.data, ColumnRef{*flags.label_index}, task);
    if (flags.label_column.empty()) throw ConfigError("one of --label-column or --label-index is required");
    return load_csv(flags.data, ColumnRef{flags.label_column}, task);
}

// Boosting flags; unset values fall back to the provided defaults.
struct ConfigFlags {
    std::optional<int> depth;
    std::optional<std::size_t> iterations;
    std::optional<double> nu;
    std::optional<double> subsample;
    std::optional<std::size_t> min_leaf;
    std::uint64_t seed = 0;
    bool no_pruning = false;

    BoostConfig resolve(BoostConfig base) const {
        if (depth) base.max_depth = *depth;
        if (iterations) base.iterations = *iterations;
        if (nu) base.nu = *nu;
        if (subsample) base.subsample = *subsample;
        if (min_leaf) base.min_leaf = *min_leaf;
        base.seed = seed;
        base.wavelet_pruning = !no_pruning;
        base.validate();
        return base;
    }
};

void add_config_flags(CLI::App& app, ConfigFlags& flags) {
    app.add_option("--depth", flags.depth, "Maximum tree depth J (root at depth 0)");
    app.add_option("--iterations", flags.iterations, "Boosting iterations K");
    app.add_option("--nu", flags.nu, "Shrinkage in (0, 1]");
    app.add_option("--subsample", flags.subsample, "In-bag fraction in (0, 1]; the rest selects M");
    app.add_option("--min-leaf", flags.min_leaf, "Minimum rows per leaf");
    app.add_option("--seed", flags.seed, "Random seed");
    app.add_flag("--no-pruning", flags.no_pruning, "Keep every wavelet (M_k = node count)");
}

std::string format_loss(double v) { return std::isnan(v) ? std::string("nan") : format_double(v); }

int cmd_train(const DataFlags& data_flags, const std::string& task_name, const ConfigFlags& config_flags,
              const std::string& out_path, std::ostream& out) {
    const Task task = parse_task(task_name);
    BoostConfig base;
    base.task = task;
    const BoostConfig config = config_flags.resolve(base);
    const Dataset data = load(data_flags, task);

    auto log = [&](const StageReport& r) {
        out << "iteration " << r.iteration << " nodes " << r.node_count << " m_terms " << r.m_terms << " in_bag "
            << r.in_bag_size << " oob " << r.oob_size << (r.oob_size == 0 ? " (empty)" : "") << " in_bag_loss "
            << format_loss(r.in_bag_loss) << " oob_loss " << format_loss(r.oob_loss) << "\n";
    };
    const Ensemble ens = task == Task::classification ? train_classifier(data, config, log) : train(data, config, log);
    save_model(ens, out_path);
    out << "wrote " << out_path << " (" << ens.stages.size() << " stages)\n";
    return kOk;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path,
                std::ostream& out) {
    const Ensemble ens = load_model(model_path);
    const Dataset data = load_feature_csv(data_path, ens.label_name);
    if (data.feature_names != ens.feature_names) {
        std::ostringstream msg;
        msg << "feature names do not match the model:";
        const std::size_t n = std::max(data.feature_names.size(), ens.feature_names.size());
        for (std::size_t i = 0; i < n; ++i) {
            const std::string want = i < ens.feature_names.size() ? ens.feature_names[i] : "<none>";
            const std::string got = i < data.feature_names.size() ? data.feature_names[i] : "<none>";
            if (want != got) msg << " [" << i << "] model '" << want << "' data '" << got << "';";
        }
        throw DataError(msg.str());
    }

    std::string csv;
    if (ens.task == Task::regression) {
        csv = "prediction\n";
        const Matrix pred = predict(ens, data.features);
        for (std::size_t r = 0; r < pred.rows(); ++r) csv += format_double(pred(r, 0)) + "\n";
    } else {
        const bool binary = ens.encoding->class_count() == 2;
        csv = binary ? "label,confidence,score\n" : "label,confidence\n";
        for (const auto& p : predict_labels(ens, data.features)) {
            csv += p.label + "," + format_double(p.confidence);
            if (binary) csv += "," + format_double(p.score);
            csv += "\n";
        }
    }
    write_file_atomic(out_path, csv);
    out << "wrote " << data.rows() << " predictions to " << out_path << "\n";
    return kOk;
}

struct EvaluateFlags {
    std::string protocol;
    std::optional<std::size_t> k;
    std::string folds_file;
    std::optional<double> noise_level;
    std::optional<std::size_t> trials;
    std::string report;
    std::string per_fold_csv;
    bool no_stratify = false;
};

int cmd_evaluate(const DataFlags& data_flags, const EvaluateFlags& flags, const ConfigFlags& config_flags,
                 std::ostream& out, std::ostream& err) {
    const Protocol protocol = parse_protocol(flags.protocol);
    ProtocolSpec spec = protocol == Protocol::imbalance_auc     ? ProtocolSpec::imbalance()
                        : protocol == Protocol::regression_rmse ? ProtocolSpec::regression()
                                                                : ProtocolSpec::noise(0.0);
    if (flags.k) spec.folds = *flags.k;
    if (flags.trials) spec.trials = *flags.trials;
    if (flags.noise_level) {
        if (protocol != Protocol::noise_accuracy) throw ConfigError("--noise-level applies to the noise protocol only");
        spec.noise_level = *flags.noise_level;
    }
    if (flags.no_stratify) spec.stratified = false;
    const BoostConfig config = config_flags.resolve(protocol_config(protocol));
    const Dataset data = load(data_flags, config.task);
    if (!flags.folds_file.empty()) {
        if (flags.k) throw ConfigError("--folds and --k are mutually exclusive");
        spec.external_folds = read_fold_file(data, flags.folds_file);
        spec.folds = spec.external_folds->folds.size();
    }

    const EvalReport report = run_protocol(data, spec, config, config_flags.seed);
    out << report.to_table();
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    if (!flags.report.empty()) write_file_atomic(flags.report, report.to_json());
    if (!flags.per_fold_csv.empty()) write_file_atomic(flags.per_fold_csv, report.per_fold_csv());
    return kOk;
}

int cmd_folds(const DataFlags& data_flags, const std::string& task_name, std::size_t k, std::uint64_t seed,
              bool stratified, const std::string& out_path, std::ostream& out, std::ostream& err) {
    const Dataset data = load(data_flags, parse_task(task_name));
    const FoldPlan plan = kfold_indices(data, k, seed, stratified);
    if (!plan.warning.empty()) err << "warning: " << plan.warning << "\n";
    write_fold_file(data, plan, out_path);
    out << "wrote " << k << " folds for " << data.rows() << " rows to " << out_path << "\n";
    return kOk;
}

int cmd_wavelets(const std::string& model_path, std::size_t stage, const std::string& out_path, std::ostream& out) {
    const Ensemble ens = load_model(model_path);
    if (stage < 1 || stage > ens.stages.size())
        throw ConfigError("--stage must lie in [1, " + std::to_string(ens.stages.size()) + "]");
    const Stage& s = ens.stages[stage - 1];
    write_file_atomic(out_path, wavelet_table_csv(s.tree, s.order));
    out << "stage " << stage << ": " << s.tree.size() << " wavelets, m_terms " << s.m_terms << "\n";
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gradient boosting with geometric-wavelet pruned trees"};
    app.require_subcommand(1);

    DataFlags data_flags;
    ConfigFlags config_flags;
    std::string task_name;
    std::string out_path;

    auto* train_cmd = app.add_subcommand("train", "Train a model");
    add_data_flags(*train_cmd, data_flags);
    add_config_flags(*train_cmd, config_flags);
    train_cmd->add_option("--task", task_name, "regression or classification")->required();
    train_cmd->add_option("--out", out_path, "Model file to write")->required();

    std::string model_path;
    std::string predict_data;
    auto* predict_cmd = app.add_subcommand("predict", "Predict with a trained model");
    predict_cmd->add_option("--model", model_path, "Model file")->required();
    predict_cmd->add_option("--data", predict_data, "CSV with the model's feature columns")->required();
    predict_cmd->add_option("--out", out_path, "Predictions CSV to write")->required();

    EvaluateFlags eval_flags;
    auto* eval_cmd = app.add_subcommand("evaluate", "Run a cross-validation protocol");
    add_data_flags(*eval_cmd, data_flags);
    add_config_flags(*eval_cmd, config_flags);
    eval_cmd->add_option("--protocol", eval_flags.protocol, "imbalance, regression or noise")->required();
    auto* k_opt = eval_cmd->add_option("--k", eval_flags.k, "Folds per trial");
    eval_cmd->add_option("--folds", eval_flags.folds_file, "External sample_id,fold CSV")->excludes(k_opt);
    eval_cmd->add_option("--noise-level", eval_flags.noise_level, "Label noise level in [0, 1)");
    eval_cmd->add_option("--trials", eval_flags.trials, "Repetitions of the cross validation");
    eval_cmd->add_option("--report", eval_flags.report, "JSON report to write");
    eval_cmd->add_option("--per-fold-csv", eval_flags.per_fold_csv, "Per-fold CSV to write");
    eval_cmd->add_flag("--no-stratify", eval_flags.no_stratify, "Plain (unstratified) folds");

    std::size_t fold_count = 5;
    std::uint64_t fold_seed = 0;
    bool stratified = false;
    auto* folds_cmd = app.add_subcommand("folds", "Write a k-fold assignment as sample_id,fold CSV");
    add_data_flags(*folds_cmd, data_flags);
    folds_cmd->add_option("--task", task_name, "regression or classification")->required();
    folds_cmd->add_option("--k", fold_count, "Fold count");
    folds_cmd->add_option("--seed", fold_seed, "Random seed");
    folds_cmd->add_flag("--stratified", stratified, "Stratify by label");
    folds_cmd->add_option("--out", out_path, "Fold CSV to write")->required();

    std::size_t stage = 1;
    auto* wavelets_cmd = app.add_subcommand("wavelets", "Export one stage's wavelet norms as CSV");
    wavelets_cmd->add_option("--model", model_path, "Model file")->required();
    wavelets_cmd->add_option("--stage", stage, "Stage number, 1-based");
    wavelets_cmd->add_option("--out", out_path, "CSV to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kUsageError;
    }

    try {
        if (*train_cmd) return cmd_train(data_flags, task_name, config_flags, out_path, out);
        if (*predict_cmd) return cmd_predict(model_path, predict_data, out_path, out);
        if (*eval_cmd) return cmd_evaluate(data_flags, eval_flags, config_flags, out, err);
        if (*folds_cmd) return cmd_folds(data_flags, task_name, fold_count, fold_seed, stratified, out_path, out, err);
        if (*wavelets_cmd) return cmd_wavelets(model_path, stage, out_path, out);
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const ModelError& e) {
        err << "model error: " << e.what() << "\n";
        return kModelError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kUsageError;
}

}  // namespace gwgb::cli
