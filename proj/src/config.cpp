#include "fraudlab/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fraudlab/error.hpp"

namespace fraudlab {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(const std::string& text, char sep = ',') {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("config: key '" + key + "' has non-numeric value '" + value + "'");
    }
}

long long parse_int(const std::string& value, const std::string& key) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ValidationError("config: key '" + key + "' has non-integer value '" + value + "'");
    return v;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ValidationError("config: key '" + key + "' has non-boolean value '" + value + "'");
}

// Sweep ratio grids accept either an explicit list "0.01,0.02,..." or a
// log-spaced range "lo:hi:count".
std::vector<double> parse_ratio_grid(const std::string& value) {
    if (value.find(':') != std::string::npos) {
        const auto parts = split_list(value, ':');
        if (parts.size() != 3) throw ValidationError("config: ratio range must be lo:hi:count");
        return log_spaced_ratios(parse_double(parts[0], "sweep.ratios"),
                                 parse_double(parts[1], "sweep.ratios"),
                                 static_cast<std::size_t>(parse_int(parts[2], "sweep.ratios")));
    }
    std::vector<double> out;
    for (const auto& item : split_list(value)) out.push_back(parse_double(item, "sweep.ratios"));
    return out;
}

void apply_model_key(ExperimentConfig& config, const std::string& key, const std::string& value) {
    const auto dot = key.find('.');
    if (dot == std::string::npos)
        throw ValidationError("config: unknown key '" + key + "' in [models]");
    const std::string family = key.substr(0, dot);
    const std::string knob = key.substr(dot + 1);

    // Materialize overrides lazily; seeds stay 0 here and fan out at use time.
    if (config.model_overrides.empty()) {
        std::vector<std::string> names = config.model_names;
        if (names.empty()) names = {"logreg", "forest", "gbt", "knn", "mlp"};
        for (const auto& name : names)
            config.model_overrides.push_back(ModelSpec::defaults(family_from_name(name)));
    }
    ModelSpec* spec = nullptr;
    for (auto& s : config.model_overrides)
        if (family_name(s.family) == family) spec = &s;
    if (!spec)
        throw ValidationError("config: model '" + family + "' is not in the models list");
    apply_hyper(*spec, knob, value);
}

} // namespace

void apply_hyper(ModelSpec& spec, const std::string& knob, const std::string& value) {
    const std::string key = family_name(spec.family) + "." + knob;
    auto bad_knob = [&] {
        return ValidationError("unknown hyperparameter '" + knob + "' for model '" +
                               family_name(spec.family) + "'");
    };
    switch (spec.family) {
    case ModelFamily::logreg: {
        auto& h = std::get<LogRegHyper>(spec.hyper);
        if (knob == "l2") h.l2 = parse_double(value, key);
        else if (knob == "max_iters") h.max_iters = static_cast<int>(parse_int(value, key));
        else if (knob == "tol") h.tol = parse_double(value, key);
        else if (knob == "learning_rate") h.learning_rate = parse_double(value, key);
        else throw bad_knob();
        break;
    }
    case ModelFamily::forest: {
        auto& h = std::get<ForestHyper>(spec.hyper);
        if (knob == "trees") h.n_trees = static_cast<int>(parse_int(value, key));
        else if (knob == "depth") h.max_depth = static_cast<int>(parse_int(value, key));
        else if (knob == "min_leaf") h.min_leaf = static_cast<std::size_t>(parse_int(value, key));
        else if (knob == "features_per_split")
            h.features_per_split = static_cast<std::size_t>(parse_int(value, key));
        else throw bad_knob();
        break;
    }
    case ModelFamily::gbt: {
        auto& h = std::get<GbtHyper>(spec.hyper);
        if (knob == "rounds") h.n_rounds = static_cast<int>(parse_int(value, key));
        else if (knob == "learning_rate") h.learning_rate = parse_double(value, key);
        else if (knob == "depth") h.max_depth = static_cast<int>(parse_int(value, key));
        else if (knob == "lambda") h.lambda_l2 = parse_double(value, key);
        else if (knob == "min_child_weight") h.min_child_weight = parse_double(value, key);
        else throw bad_knob();
        break;
    }
    case ModelFamily::knn: {
        auto& h = std::get<KnnHyper>(spec.hyper);
        if (knob == "k") h.k = static_cast<std::size_t>(parse_int(value, key));
        else throw bad_knob();
        break;
    }
    case ModelFamily::mlp: {
        auto& h = std::get<MlpHyper>(spec.hyper);
        if (knob == "hidden") {
            h.hidden.clear();
            for (const auto& item : split_list(value))
                h.hidden.push_back(static_cast<std::size_t>(parse_int(item, key)));
        } else if (knob == "epochs") h.epochs = static_cast<int>(parse_int(value, key));
        else if (knob == "batch") h.batch_size = static_cast<std::size_t>(parse_int(value, key));
        else if (knob == "val_fraction") h.val_fraction = parse_double(value, key);
        else if (knob == "alpha") h.adam.alpha = parse_double(value, key);
        else throw bad_knob();
        break;
    }
    }
}

SyntheticSpec parse_synthetic_spec(const std::string& text) {
    SyntheticSpec spec;
    for (const auto& item : split_list(text)) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ValidationError("synthetic spec: expected key=value, got '" + item + "'");
        const std::string key = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        if (key == "n_majority") spec.n_majority = static_cast<std::size_t>(parse_int(value, key));
        else if (key == "n_minority") spec.n_minority = static_cast<std::size_t>(parse_int(value, key));
        else if (key == "dims") spec.dimensions = static_cast<std::size_t>(parse_int(value, key));
        else if (key == "sep") spec.class_separation = parse_double(value, key);
        else if (key == "clusters") spec.clusters_per_class = static_cast<std::size_t>(parse_int(value, key));
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_int(value, key));
        else throw ValidationError("synthetic spec: unknown key '" + key + "'");
    }
    spec.validate();
    return spec;
}

std::string synthetic_spec_to_string(const SyntheticSpec& spec) {
    char sep[32];
    std::snprintf(sep, sizeof sep, "%.17g", spec.class_separation);
    return "n_majority=" + std::to_string(spec.n_majority) +
           ",n_minority=" + std::to_string(spec.n_minority) +
           ",dims=" + std::to_string(spec.dimensions) + ",sep=" + sep +
           ",clusters=" + std::to_string(spec.clusters_per_class) +
           ",seed=" + std::to_string(spec.seed);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ValidationError("config line " + std::to_string(line_no) + ": bad section header");
            section = stripped.substr(1, stripped.size() - 2);
            if (section != "data" && section != "models" && section != "sampling" &&
                section != "sweep" && section != "output")
                throw ValidationError("config: unknown section [" + section + "]");
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (section == "data") {
            if (key == "csv") config.csv_path = value;
            else if (key == "schema") config.csv_schema = value;
            else if (key == "synthetic") config.synthetic = parse_synthetic_spec(value);
            else if (key == "split") config.split_fraction = parse_double(value, key);
            else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(value, key));
            else if (key == "threshold") config.threshold = parse_double(value, key);
            else if (key == "scale") config.scale_columns = split_list(value);
            else if (key == "threads") config.threads = static_cast<int>(parse_int(value, key));
            else throw ValidationError("config: unknown key '" + key + "' in [data]");
        } else if (section == "models") {
            if (key == "list") {
                if (!config.model_overrides.empty())
                    throw ValidationError("config: 'list' must come before per-model keys in [models]");
                config.model_names = split_list(value);
                for (const auto& name : config.model_names) family_from_name(name);
            } else {
                apply_model_key(config, key, value);
            }
        } else if (section == "sampling") {
            if (key == "plan") {
                if (value == "undersample") config.sampling.kind = PlanKind::undersample;
                else if (value == "smote") config.sampling.kind = PlanKind::smote;
                else if (value == "hybrid") config.sampling.kind = PlanKind::hybrid;
                else throw ValidationError("config: unknown plan '" + value + "'");
            } else if (key == "target_majority")
                config.sampling.target_majority = static_cast<std::size_t>(parse_int(value, key));
            else if (key == "target_minority")
                config.sampling.target_minority = static_cast<std::size_t>(parse_int(value, key));
            else if (key == "ratio") config.sampling.fraud_ratio = parse_double(value, key);
            else if (key == "multiplier") config.sampling.minority_multiplier = parse_double(value, key);
            else if (key == "k") config.sampling.smote_k = static_cast<std::size_t>(parse_int(value, key));
            else if (key == "seed") config.sampling.seed = static_cast<std::uint64_t>(parse_int(value, key));
            else throw ValidationError("config: unknown key '" + key + "' in [sampling]");
        } else if (section == "sweep") {
            if (key == "ratios") config.sweep.ratios = parse_ratio_grid(value);
            else if (key == "criterion") config.sweep.criterion = criterion_from_name(value);
            else if (key == "precision_floor") config.sweep.precision_floor = parse_double(value, key);
            else if (key == "paper_protocol") config.sweep.paper_protocol = parse_bool(value, key);
            else if (key == "validation_fraction")
                config.sweep.validation_fraction = parse_double(value, key);
            else if (key == "multiplier") config.sweep.multiplier = parse_double(value, key);
            else if (key == "k") config.sweep.smote_k = static_cast<std::size_t>(parse_int(value, key));
            else throw ValidationError("config: unknown key '" + key + "' in [sweep]");
        } else if (section == "output") {
            if (key == "dir") config.out_dir = value;
            else throw ValidationError("config: unknown key '" + key + "' in [output]");
        } else {
            throw ValidationError("config line " + std::to_string(line_no) + ": key outside any section");
        }
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream out;
    char num[40];
    auto put_double = [&](const char* key, double v) {
        std::snprintf(num, sizeof num, "%.17g", v);
        out << key << " = " << num << '\n';
    };

    out << "[data]\n";
    if (!config.csv_path.empty()) {
        out << "csv = " << config.csv_path << '\n';
        out << "schema = " << config.csv_schema << '\n';
    }
    if (config.synthetic) out << "synthetic = " << synthetic_spec_to_string(*config.synthetic) << '\n';
    put_double("split", config.split_fraction);
    out << "seed = " << config.seed << '\n';
    put_double("threshold", config.threshold);
    if (!config.scale_columns.empty()) {
        out << "scale = ";
        for (std::size_t i = 0; i < config.scale_columns.size(); ++i)
            out << (i ? "," : "") << config.scale_columns[i];
        out << '\n';
    }
    // threads and the output dir are machine facts, not experiment identity;
    // the snapshot leaves them out so reruns hash identically anywhere

    out << "\n[models]\n";
    const auto specs = config.resolved_models();
    out << "list = ";
    for (std::size_t i = 0; i < specs.size(); ++i)
        out << (i ? "," : "") << family_name(specs[i].family);
    out << '\n';
    for (const auto& spec : specs) {
        const std::string p = family_name(spec.family) + ".";
        std::visit(
            [&](const auto& h) {
                using T = std::decay_t<decltype(h)>;
                if constexpr (std::is_same_v<T, LogRegHyper>) {
                    put_double((p + "l2").c_str(), h.l2);
                    out << p << "max_iters = " << h.max_iters << '\n';
                    put_double((p + "tol").c_str(), h.tol);
                    put_double((p + "learning_rate").c_str(), h.learning_rate);
                } else if constexpr (std::is_same_v<T, ForestHyper>) {
                    out << p << "trees = " << h.n_trees << '\n';
                    out << p << "depth = " << h.max_depth << '\n';
                    out << p << "min_leaf = " << h.min_leaf << '\n';
                    out << p << "features_per_split = " << h.features_per_split << '\n';
                } else if constexpr (std::is_same_v<T, GbtHyper>) {
                    out << p << "rounds = " << h.n_rounds << '\n';
                    put_double((p + "learning_rate").c_str(), h.learning_rate);
                    out << p << "depth = " << h.max_depth << '\n';
                    put_double((p + "lambda").c_str(), h.lambda_l2);
                    put_double((p + "min_child_weight").c_str(), h.min_child_weight);
                } else if constexpr (std::is_same_v<T, KnnHyper>) {
                    out << p << "k = " << h.k << '\n';
                } else if constexpr (std::is_same_v<T, MlpHyper>) {
                    out << p << "hidden = ";
                    for (std::size_t i = 0; i < h.hidden.size(); ++i) out << (i ? "," : "") << h.hidden[i];
                    out << '\n';
                    out << p << "epochs = " << h.epochs << '\n';
                    out << p << "batch = " << h.batch_size << '\n';
                    put_double((p + "val_fraction").c_str(), h.val_fraction);
                    put_double((p + "alpha").c_str(), h.adam.alpha);
                }
            },
            spec.hyper);
    }

    out << "\n[sampling]\n";
    switch (config.sampling.kind) {
    case PlanKind::undersample: out << "plan = undersample\n"; break;
    case PlanKind::smote: out << "plan = smote\n"; break;
    case PlanKind::hybrid: out << "plan = hybrid\n"; break;
    }
    if (config.sampling.target_majority) out << "target_majority = " << config.sampling.target_majority << '\n';
    if (config.sampling.target_minority) out << "target_minority = " << config.sampling.target_minority << '\n';
    if (config.sampling.fraud_ratio > 0) put_double("ratio", config.sampling.fraud_ratio);
    put_double("multiplier", config.sampling.minority_multiplier);
    out << "k = " << config.sampling.smote_k << '\n';
    out << "seed = " << config.sampling.seed << '\n';

    out << "\n[sweep]\n";
    out << "ratios = ";
    const auto ratios = config.sweep.resolved_ratios();
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        std::snprintf(num, sizeof num, "%.17g", ratios[i]);
        out << (i ? "," : "") << num;
    }
    out << '\n';
    out << "criterion = " << criterion_name(config.sweep.criterion) << '\n';
    put_double("precision_floor", config.sweep.precision_floor);
    out << "paper_protocol = " << (config.sweep.paper_protocol ? "true" : "false") << '\n';
    put_double("validation_fraction", config.sweep.validation_fraction);
    put_double("multiplier", config.sweep.multiplier);
    out << "k = " << config.sweep.smote_k << '\n';

    return out.str();
}

} // namespace fraudlab
