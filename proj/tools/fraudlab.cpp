// fraudlab — imbalanced-classification toolkit and experiment runner.
// Every subcommand is deterministic given its inputs and seed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fraudlab/config.hpp"
#include "fraudlab/error.hpp"
#include "fraudlab/evaluate.hpp"
#include "fraudlab/experiments.hpp"
#include "fraudlab/report.hpp"
#include "fraudlab/resample.hpp"
#include "fraudlab/svg.hpp"
#include "fraudlab/sweep.hpp"

namespace fs = std::filesystem;
using namespace fraudlab;

namespace {

struct DataFlags {
    std::string csv;
    std::string synthetic;

    bool any() const { return !csv.empty() || !synthetic.empty(); }
    Dataset load() const {
        if (!any()) throw ValidationError("no data source: pass --data or --synthetic");
        Dataset ds = csv.empty() ? generate_synthetic(parse_synthetic_spec(synthetic)) : load_csv(csv);
        ds.validate();
        return ds;
    }
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
    auto* data = cmd->add_option("--data", flags.csv, "Input CSV (last column must be 'Class')");
    auto* synth = cmd->add_option("--synthetic", flags.synthetic,
                                  "Synthetic spec: n_majority=..,n_minority=..,dims=..,sep=..,clusters=..,seed=..");
    data->excludes(synth);
    synth->excludes(data);
}

// Exit-code mapping for the execution phase.
int run_mapped(const std::function<void()>& body) {
    try {
        body();
        return exit_ok;
    } catch (const InfeasiblePlanError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_internal;
    }
}

std::string default_out_dir() {
    const char* env = std::getenv("FRAUDLAB_OUT");
    return env && *env ? env : "out";
}

void print_class1_line(const std::string& model, const std::string& tag, const EvalReport& r) {
    std::printf("%-8s %-16s precision=%.4f recall=%.4f f1=%.4f accuracy=%.4f\n", model.c_str(),
                tag.c_str(), r.class1.precision, r.class1.recall, r.class1.f1, r.class1.accuracy);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraudlab — resampling strategies and classifiers for imbalanced fraud data"};
    app.require_subcommand(1);

    // ---- inspect ----
    auto* inspect = app.add_subcommand("inspect", "Print the class distribution of a data source");
    DataFlags inspect_data;
    add_data_flags(inspect, inspect_data);
    std::string inspect_format = "text";
    inspect->add_option("--format", inspect_format, "Output format: text|csv")->default_str("text");

    // ---- resample ----
    auto* resample = app.add_subcommand("resample", "Apply a resampling plan and write the result CSV");
    DataFlags resample_data;
    add_data_flags(resample, resample_data);
    std::string plan_name = "undersample";
    std::size_t plan_target = 0;
    double plan_ratio = 0.0, plan_multiplier = 10.0;
    std::size_t plan_k = 5;
    std::uint64_t plan_seed = 0;
    std::string resample_out;
    resample->add_option("--plan", plan_name, "Plan kind: undersample|smote|hybrid")->required();
    resample->add_option("--target", plan_target,
                         "Target count (majority for undersample, minority for smote); 0 = balance 1:1");
    resample->add_option("--ratio", plan_ratio, "Hybrid target fraud ratio in (0, 0.5]");
    resample->add_option("--multiplier", plan_multiplier, "Hybrid minority multiplier (>= 1)");
    resample->add_option("--k", plan_k, "SMOTE neighbor count");
    resample->add_option("--seed", plan_seed, "Resampling seed");
    int resample_threads = 0;
    resample->add_option("--threads", resample_threads,
                         "Worker cap (plans are single-threaded; accepted for interface symmetry)");
    resample->add_option("--out", resample_out, "Output CSV path")->required();

    // ---- train ----
    auto* train = app.add_subcommand("train", "Fit one model and save it as JSON");
    DataFlags train_data;
    add_data_flags(train, train_data);
    std::string train_model = "logreg";
    std::uint64_t train_seed = 0;
    std::vector<std::string> train_hyper;
    int train_threads = 0;
    std::string train_out;
    train->add_option("--model", train_model, "Model family: logreg|forest|gbt|knn|mlp")->required();
    train->add_option("--seed", train_seed, "Training seed");
    train->add_option("--hyper", train_hyper, "Hyperparameter override key=value (repeatable)");
    train->add_option("--threads", train_threads, "Worker cap (0 = hardware)");
    train->add_option("--out", train_out, "Output model path")->required();

    // ---- evaluate ----
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a saved model on a data source");
    DataFlags eval_data;
    add_data_flags(evaluate_cmd, eval_data);
    std::string eval_model_path, eval_out, eval_formats = "json,markdown";
    double eval_threshold = 0.5;
    int eval_threads = 0;
    evaluate_cmd->add_option("--model", eval_model_path, "Saved model JSON path")->required();
    evaluate_cmd->add_option("--threshold", eval_threshold, "Decision threshold (class 1 iff proba > t)");
    evaluate_cmd->add_option("--out", eval_out, "Report output directory")->envname("FRAUDLAB_OUT");
    evaluate_cmd->add_option("--format", eval_formats, "Comma list of json|csv|markdown");
    evaluate_cmd->add_option("--threads", eval_threads, "Worker cap (0 = hardware)");

    // ---- experiment ----
    auto* experiment = app.add_subcommand("experiment", "Run a canned experiment end to end");
    std::string experiment_name;
    experiment->add_option("name", experiment_name, "baseline|undersample|smote|hybrid")->required();
    DataFlags exp_data;
    add_data_flags(experiment, exp_data);
    std::string exp_config_path, exp_out, exp_formats = "json,csv,markdown,svg";
    std::vector<std::string> exp_models;
    double exp_split = -1.0, exp_threshold = -1.0, exp_ratio = 0.0, exp_multiplier = 0.0;
    std::size_t exp_k = 0;
    std::int64_t exp_seed = -1;
    int exp_threads = -1;
    bool exp_paper_protocol = false;
    experiment->add_option("--config", exp_config_path, "Experiment config file");
    experiment->add_option("--model", exp_models, "Restrict to these model families (repeatable)");
    experiment->add_option("--seed", exp_seed, "Master seed override");
    experiment->add_option("--split", exp_split, "Test fraction override");
    experiment->add_option("--threshold", exp_threshold, "Decision threshold override");
    experiment->add_option("--ratio", exp_ratio, "Hybrid: pin the sweep to this single ratio");
    experiment->add_option("--multiplier", exp_multiplier, "Hybrid sweep minority multiplier override");
    experiment->add_option("--k", exp_k, "SMOTE neighbor count override");
    experiment->add_option("--out", exp_out, "Output directory")->envname("FRAUDLAB_OUT");
    experiment->add_option("--format", exp_formats, "Comma list of json|csv|markdown|svg");
    experiment->add_option("--threads", exp_threads, "Worker cap (0 = hardware)");
    experiment->add_flag("--paper-protocol", exp_paper_protocol,
                         "Sweep scores on the test set (the paper's leaky protocol)");

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "Fraud-ratio sweep for one model; writes CSV + SVG");
    DataFlags sweep_data;
    add_data_flags(sweep_cmd, sweep_data);
    std::string sweep_config_path, sweep_model = "logreg", sweep_out;
    std::int64_t sweep_seed = -1;
    double sweep_multiplier = 0.0;
    std::size_t sweep_k = 0;
    int sweep_threads = -1;
    bool sweep_paper_protocol = false;
    sweep_cmd->add_option("--config", sweep_config_path, "Experiment config file");
    sweep_cmd->add_option("--model", sweep_model, "Model family to sweep")->required();
    sweep_cmd->add_option("--seed", sweep_seed, "Master seed override");
    sweep_cmd->add_option("--multiplier", sweep_multiplier, "Minority multiplier override");
    sweep_cmd->add_option("--k", sweep_k, "SMOTE neighbor count override");
    sweep_cmd->add_option("--out", sweep_out, "Output directory")->envname("FRAUDLAB_OUT");
    sweep_cmd->add_option("--threads", sweep_threads, "Worker cap (0 = hardware)");
    sweep_cmd->add_flag("--paper-protocol", sweep_paper_protocol,
                        "Sweep scores on the test set (the paper's leaky protocol)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (inspect->parsed()) {
        if (inspect_format != "text" && inspect_format != "csv") {
            std::cerr << "error: --format must be text or csv\n";
            return exit_usage;
        }
        if (!inspect_data.any()) {
            std::cerr << "error: no data source: pass --data or --synthetic\n";
            return exit_usage;
        }
        return run_mapped([&] {
            const Dataset ds = inspect_data.load();
            const std::size_t neg = ds.class_count(0), pos = ds.class_count(1);
            if (inspect_format == "csv") {
                std::printf("class,count\n0,%zu\n1,%zu\n", neg, pos);
                std::printf("fraud_fraction,%.6f\n", ds.fraud_fraction());
            } else {
                std::printf("rows: %zu\n", ds.rows());
                std::printf("class 0 (non-fraud): %zu\n", neg);
                std::printf("class 1 (fraud):     %zu\n", pos);
                std::printf("fraud fraction:      %.6f\n", ds.fraud_fraction());
            }
        });
    }

    if (resample->parsed()) {
        ResamplePlan plan;
        try {
            if (plan_name == "undersample") plan.kind = PlanKind::undersample;
            else if (plan_name == "smote") plan.kind = PlanKind::smote;
            else if (plan_name == "hybrid") plan.kind = PlanKind::hybrid;
            else throw ValidationError("unknown plan '" + plan_name + "'");
            plan.target_majority = plan_target;
            plan.target_minority = plan_target;
            plan.fraud_ratio = plan_ratio;
            plan.minority_multiplier = plan_multiplier;
            plan.smote_k = plan_k;
            plan.seed = plan_seed;
            if (!resample_data.any()) throw ValidationError("no data source: pass --data or --synthetic");
        } catch (const ValidationError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return exit_usage;
        }
        return run_mapped([&] {
            const Dataset ds = resample_data.load();
            // --target 0 means "balance to 1:1"
            if (plan.kind == PlanKind::undersample && plan.target_majority == 0)
                plan.target_majority = ds.class_count(1);
            if (plan.kind == PlanKind::smote && plan.target_minority == 0)
                plan.target_minority = ds.class_count(0);
            plan.validate();
            const Dataset out = apply_plan(ds, plan);
            save_csv(out, resample_out);
            std::printf("%s -> %zu rows (%zu non-fraud, %zu fraud) -> %s\n", plan.describe().c_str(),
                        out.rows(), out.class_count(0), out.class_count(1), resample_out.c_str());
        });
    }

    if (train->parsed()) {
        ModelSpec spec;
        try {
            spec = ModelSpec::defaults(family_from_name(train_model), train_seed);
            for (const auto& kv : train_hyper) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw ValidationError("--hyper expects key=value, got '" + kv + "'");
                apply_hyper(spec, kv.substr(0, eq), kv.substr(eq + 1));
            }
            spec.validate();
            if (!train_data.any()) throw ValidationError("no data source: pass --data or --synthetic");
        } catch (const ValidationError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return exit_usage;
        }
        return run_mapped([&] {
            const Dataset ds = train_data.load();
            const TrainedModel model = fit_model(spec, ds, train_threads);
            save_model(model, train_out);
            std::printf("trained %s on %zu rows -> %s\n", spec.describe().c_str(), ds.rows(),
                        train_out.c_str());
        });
    }

    if (evaluate_cmd->parsed()) {
        std::set<ReportFormat> eval_format_set;
        try {
            eval_format_set = formats_from_list(eval_formats);
            if (!eval_data.any()) throw ValidationError("no data source: pass --data or --synthetic");
        } catch (const ValidationError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return exit_usage;
        }
        return run_mapped([&] {
            const TrainedModel model = load_model(eval_model_path);
            const Dataset ds = eval_data.load();
            const EvalReport report = evaluate(model, ds, eval_threshold, eval_threads);
            const std::string name = family_name(model.spec.family);
            print_class1_line(name, "eval", report);
            if (!eval_out.empty()) {
                ensure_writable_dir(eval_out);
                const auto& formats = eval_format_set;
                const fs::path dir(eval_out);
                if (formats.count(ReportFormat::json)) {
                    std::ofstream f(dir / (name + "-eval.json"), std::ios::binary);
                    f << report_to_json(report);
                }
                if (formats.count(ReportFormat::csv)) {
                    std::ofstream f(dir / (name + "-eval.csv"), std::ios::binary);
                    f << report_to_csv(name, report);
                }
                if (formats.count(ReportFormat::markdown)) {
                    std::ofstream f(dir / (name + "-eval.md"), std::ios::binary);
                    f << report_to_markdown(name, "eval", report);
                }
            }
        });
    }

    if (experiment->parsed() || sweep_cmd->parsed()) {
        const bool is_sweep = sweep_cmd->parsed();
        if (!is_sweep && experiment_name != "baseline" && experiment_name != "undersample" &&
            experiment_name != "smote" && experiment_name != "hybrid") {
            std::cerr << "error: unknown experiment '" << experiment_name
                      << "' (expected baseline|undersample|smote|hybrid)\n";
            return exit_usage;
        }
        ExperimentConfig config;
        try {
            const std::string& config_path = is_sweep ? sweep_config_path : exp_config_path;
            if (!config_path.empty()) config = load_config(config_path);
            const DataFlags& data = is_sweep ? sweep_data : exp_data;
            if (!data.csv.empty()) {
                config.csv_path = data.csv;
                config.synthetic.reset();
            }
            if (!data.synthetic.empty()) {
                config.synthetic = parse_synthetic_spec(data.synthetic);
                config.csv_path.clear();
            }
            const std::int64_t seed = is_sweep ? sweep_seed : exp_seed;
            if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
            const int threads = is_sweep ? sweep_threads : exp_threads;
            if (threads >= 0) config.threads = threads;
            const double multiplier = is_sweep ? sweep_multiplier : exp_multiplier;
            if (multiplier > 0) config.sweep.multiplier = multiplier;
            const std::size_t k = is_sweep ? sweep_k : exp_k;
            if (k > 0) {
                config.sweep.smote_k = k;
                config.sampling.smote_k = k;
            }
            if ((is_sweep ? sweep_paper_protocol : exp_paper_protocol)) config.sweep.paper_protocol = true;
            if (!is_sweep) {
                if (exp_split > 0) config.split_fraction = exp_split;
                if (exp_threshold >= 0) config.threshold = exp_threshold;
                if (exp_ratio > 0) config.sweep.ratios = {exp_ratio};
                if (!exp_models.empty()) {
                    config.model_names = exp_models;
                    config.model_overrides.clear();
                }
            } else {
                config.model_names = {sweep_model};
                config.model_overrides.clear();
            }
            const std::string& out = is_sweep ? sweep_out : exp_out;
            config.out_dir = out.empty() ? default_out_dir() : out;
            if (!is_sweep) formats_from_list(exp_formats); // reject bad names as usage
            config.validate();
        } catch (const ValidationError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return exit_usage;
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return exit_data;
        }

        if (is_sweep) {
            return run_mapped([&] {
                ensure_writable_dir(config.out_dir);
                const Dataset ds = config.load_data();
                auto [train_part, test_part] =
                    stratified_split(ds, config.split_fraction, derive_seed(config.seed, "split"));
                std::vector<std::string> scale_cols;
                for (const auto& c : config.scale_columns)
                    if (train_part.column_index(c)) scale_cols.push_back(c);
                const ScalerParams scaler = fit_robust_scaler(train_part, scale_cols);
                const Dataset train_s = apply_scaler(train_part, scaler);
                const Dataset test_s = apply_scaler(test_part, scaler);

                Dataset sweep_train = train_s, sweep_eval = test_s;
                if (!config.sweep.paper_protocol) {
                    auto parts = stratified_split(train_s, config.sweep.validation_fraction,
                                                  derive_seed(config.seed, "sweep/val"));
                    sweep_train = std::move(parts.first);
                    sweep_eval = std::move(parts.second);
                }
                const ModelSpec spec = config.resolved_models().front();
                const auto ratios = config.sweep.resolved_ratios();
                const RatioSweepResult result = ratio_sweep(
                    sweep_train, ratios, spec, sweep_eval, config.sweep.multiplier,
                    config.sweep.smote_k, derive_seed(config.seed, "sweep/" + sweep_model),
                    config.threads, config.threshold);

                const fs::path dir = fs::path(config.out_dir) / "sweeps";
                fs::create_directories(dir);
                write_sweep_csv(result, (dir / (sweep_model + ".csv")).string());
                SvgSeries p_series{"precision", {}}, r_series{"recall", {}}, f_series{"f1", {}};
                for (const auto& p : result.points) {
                    if (p.skipped) continue;
                    p_series.points.emplace_back(p.ratio, p.precision);
                    r_series.points.emplace_back(p.ratio, p.recall);
                    f_series.points.emplace_back(p.ratio, p.f1);
                }
                write_line_chart((dir / (sweep_model + ".svg")).string(),
                                 "precision / recall vs training fraud ratio — " + sweep_model,
                                 "training fraud ratio", "metric on evaluation set",
                                 {p_series, r_series, f_series});
                const double selected =
                    select_ratio(result, config.sweep.criterion, config.sweep.precision_floor);
                std::printf("sweep %s: %zu ratios, selected %.6g (%s) -> %s\n", sweep_model.c_str(),
                            ratios.size(), selected, criterion_name(config.sweep.criterion).c_str(),
                            dir.string().c_str());
            });
        }

        return run_mapped([&] {
            ensure_writable_dir(config.out_dir); // fail before any training starts
            const ExperimentResult result = run_experiment(experiment_name, config);
            for (const auto& r : result.reports) print_class1_line(r.model, r.eval_tag, r.report);
            for (const auto& ms : result.sweeps)
                std::printf("%-8s selected ratio %.6g\n", ms.model.c_str(), ms.selected_ratio);
            const auto emitted =
                emit_reports(result, formats_from_list(exp_formats), config.out_dir);
            std::printf("experiment %s: %zu artifacts, manifest %s (%.1fs)\n", result.experiment.c_str(),
                        emitted.paths.size(), emitted.manifest_path.c_str(), result.wall_seconds);
        });
    }

    std::cerr << "error: no subcommand\n";
    return exit_usage;
}
