#include "fraudlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fraudlab/error.hpp"
#include "fraudlab/parallel.hpp"

namespace fraudlab {

using nlohmann::json;

std::string family_name(ModelFamily family) {
    switch (family) {
    case ModelFamily::logreg: return "logreg";
    case ModelFamily::forest: return "forest";
    case ModelFamily::gbt: return "gbt";
    case ModelFamily::knn: return "knn";
    case ModelFamily::mlp: return "mlp";
    }
    return "?";
}

ModelFamily family_from_name(const std::string& name) {
    if (name == "logreg") return ModelFamily::logreg;
    if (name == "forest") return ModelFamily::forest;
    if (name == "gbt") return ModelFamily::gbt;
    if (name == "knn") return ModelFamily::knn;
    if (name == "mlp") return ModelFamily::mlp;
    throw ValidationError("unknown model family '" + name + "' (expected logreg|forest|gbt|knn|mlp)");
}

ModelSpec ModelSpec::defaults(ModelFamily family, std::uint64_t seed) {
    ModelSpec spec;
    spec.family = family;
    spec.seed = seed;
    switch (family) {
    case ModelFamily::logreg: spec.hyper = LogRegHyper{}; break;
    case ModelFamily::forest: spec.hyper = ForestHyper{}; break;
    case ModelFamily::gbt: spec.hyper = GbtHyper{}; break;
    case ModelFamily::knn: spec.hyper = KnnHyper{}; break;
    case ModelFamily::mlp: spec.hyper = MlpHyper{}; break;
    }
    return spec;
}

std::string ModelSpec::describe() const {
    std::ostringstream out;
    out << family_name(family);
    std::visit(
        [&](const auto& h) {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, LogRegHyper>)
                out << "(l2=" << h.l2 << ",iters=" << h.max_iters << ",tol=" << h.tol << ")";
            else if constexpr (std::is_same_v<T, ForestHyper>)
                out << "(trees=" << h.n_trees << ",depth=" << h.max_depth << ",min_leaf=" << h.min_leaf
                    << ",fps=" << h.features_per_split << ")";
            else if constexpr (std::is_same_v<T, GbtHyper>)
                out << "(rounds=" << h.n_rounds << ",lr=" << h.learning_rate << ",depth=" << h.max_depth
                    << ",lambda=" << h.lambda_l2 << ")";
            else if constexpr (std::is_same_v<T, KnnHyper>)
                out << "(k=" << h.k << ")";
            else if constexpr (std::is_same_v<T, MlpHyper>) {
                out << "(hidden=";
                for (std::size_t i = 0; i < h.hidden.size(); ++i) out << (i ? "x" : "") << h.hidden[i];
                out << ",epochs=" << h.epochs << ",batch=" << h.batch_size << ")";
            }
        },
        hyper);
    out << " seed=" << seed;
    return out.str();
}

void ModelSpec::validate() const {
    std::visit(
        [&](const auto& h) {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, LogRegHyper>) {
                if (h.l2 < 0) throw ValidationError("logreg: l2 must be >= 0");
                if (h.max_iters < 0 || h.tol <= 0 || h.learning_rate <= 0)
                    throw ValidationError("logreg: bad optimizer settings");
            } else if constexpr (std::is_same_v<T, ForestHyper>) {
                if (h.n_trees < 1) throw ValidationError("forest: n_trees must be >= 1");
                if (h.max_depth < 1 || h.min_leaf < 1) throw ValidationError("forest: bad tree settings");
            } else if constexpr (std::is_same_v<T, GbtHyper>) {
                if (h.n_rounds < 0 || h.learning_rate <= 0 || h.max_depth < 1 || h.lambda_l2 < 0 ||
                    h.min_child_weight < 0)
                    throw ValidationError("gbt: bad settings");
            } else if constexpr (std::is_same_v<T, KnnHyper>) {
                if (h.k < 1) throw ValidationError("knn: k must be >= 1");
            } else if constexpr (std::is_same_v<T, MlpHyper>) {
                if (h.hidden.empty()) throw ValidationError("mlp: need at least one hidden layer");
                if (h.epochs < 0 || h.batch_size < 1) throw ValidationError("mlp: bad training settings");
                if (h.val_fraction < 0 || h.val_fraction >= 1)
                    throw ValidationError("mlp: val_fraction must be in [0,1)");
            }
        },
        hyper);
}

namespace {

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

void require_both_classes(const Dataset& ds, const char* who) {
    if (ds.class_count(0) == 0 || ds.class_count(1) == 0)
        throw ValidationError(std::string(who) + ": both classes must be present in training data");
}

} // namespace

// ---------------------------------------------------------------------------
// Logistic regression: full-batch gradient descent on mean logistic loss with
// an L2 penalty on the coefficients (intercept unpenalized).
// ---------------------------------------------------------------------------

namespace {

struct LogRegObjective {
    const Dataset& ds;
    double l2;

    double loss(const std::vector<double>& beta, double intercept) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            const auto x = ds.row(i);
            double z = intercept;
            for (std::size_t j = 0; j < x.size(); ++j) z += beta[j] * x[j];
            const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
            sum += softplus - ds.label(i) * z;
        }
        double penalty = 0.0;
        for (double b : beta) penalty += b * b;
        return sum / static_cast<double>(ds.rows()) + 0.5 * l2 * penalty;
    }

    // returns infinity norm of the gradient
    double gradient(const std::vector<double>& beta, double intercept,
                    std::vector<double>& grad, double& grad_intercept) const {
        grad.assign(beta.size(), 0.0);
        grad_intercept = 0.0;
        const double inv_n = 1.0 / static_cast<double>(ds.rows());
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            const auto x = ds.row(i);
            double z = intercept;
            for (std::size_t j = 0; j < x.size(); ++j) z += beta[j] * x[j];
            const double err = (sigmoid(z) - ds.label(i)) * inv_n;
            grad_intercept += err;
            for (std::size_t j = 0; j < x.size(); ++j) grad[j] += err * x[j];
        }
        double norm = std::abs(grad_intercept);
        for (std::size_t j = 0; j < beta.size(); ++j) {
            grad[j] += l2 * beta[j];
            norm = std::max(norm, std::abs(grad[j]));
        }
        return norm;
    }
};

} // namespace

double logreg_objective(const Dataset& ds, std::span<const double> beta, double intercept, double l2,
                        std::vector<double>* grad, double* grad_intercept) {
    const LogRegObjective obj{ds, l2};
    const std::vector<double> b(beta.begin(), beta.end());
    if (grad && grad_intercept) obj.gradient(b, intercept, *grad, *grad_intercept);
    return obj.loss(b, intercept);
}

LogRegModel logreg_fit(const Dataset& ds, const LogRegHyper& hyper, std::uint64_t /*seed*/) {
    if (ds.empty()) throw ValidationError("logreg_fit: empty dataset");
    require_both_classes(ds, "logreg_fit");

    LogRegModel model;
    model.coefficients.assign(ds.cols(), 0.0);
    LogRegObjective obj{ds, hyper.l2};

    std::vector<double> grad;
    double grad_intercept = 0.0;
    double current_loss = obj.loss(model.coefficients, model.intercept);
    std::vector<double> trial(ds.cols());

    for (int iter = 0; iter < hyper.max_iters; ++iter) {
        const double norm = obj.gradient(model.coefficients, model.intercept, grad, grad_intercept);
        model.final_grad_norm = norm;
        if (norm <= hyper.tol) {
            model.converged = true;
            return model;
        }
        double step = hyper.learning_rate;
        double grad_sq = grad_intercept * grad_intercept;
        for (double g : grad) grad_sq += g * g;
        for (int halvings = 0;; ++halvings) {
            for (std::size_t j = 0; j < trial.size(); ++j)
                trial[j] = model.coefficients[j] - step * grad[j];
            const double trial_intercept = model.intercept - step * grad_intercept;
            const double trial_loss = obj.loss(trial, trial_intercept);
            const bool accept = !hyper.backtracking ||
                                trial_loss <= current_loss - 1e-4 * step * grad_sq || halvings >= 40;
            if (accept) {
                model.coefficients = trial;
                model.intercept = trial_intercept;
                current_loss = trial_loss;
                break;
            }
            step *= 0.5;
        }
    }
    const double norm = obj.gradient(model.coefficients, model.intercept, grad, grad_intercept);
    model.final_grad_norm = norm;
    model.converged = norm <= hyper.tol;
    for (double b : model.coefficients)
        if (!std::isfinite(b)) throw Error("logreg_fit: non-finite coefficient after training");
    if (!std::isfinite(model.intercept)) throw Error("logreg_fit: non-finite intercept after training");
    return model;
}

// ---------------------------------------------------------------------------
// Random forest: bagged Gini CART trees, soft-vote average of leaf fractions.
// ---------------------------------------------------------------------------

double ForestModel::predict_one(std::span<const double> x) const {
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(x);
    return sum / static_cast<double>(trees.size());
}

ForestModel forest_fit(const Dataset& ds, const ForestHyper& hyper, std::uint64_t seed, int threads) {
    require_both_classes(ds, "forest_fit");
    if (hyper.n_trees < 1) throw ValidationError("forest_fit: n_trees must be >= 1");

    GiniGrowth growth;
    growth.max_depth = hyper.max_depth;
    growth.min_leaf = hyper.min_leaf;
    growth.features_per_split =
        hyper.features_per_split == 0
            ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(ds.cols()))))
            : hyper.features_per_split;

    ForestModel model;
    model.n_features = ds.cols();
    model.trees.resize(hyper.n_trees);
    const std::size_t n = ds.rows();
    parallel_for(static_cast<std::size_t>(hyper.n_trees), threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, "forest/tree", t));
        std::vector<std::uint32_t> sample(n);
        if (hyper.bootstrap) {
            for (auto& s : sample) s = static_cast<std::uint32_t>(rng.uniform_below(n));
        } else {
            for (std::size_t i = 0; i < n; ++i) sample[i] = static_cast<std::uint32_t>(i);
        }
        model.trees[t] = grow_gini_tree(ds, sample, growth, rng);
    });
    return model;
}

// ---------------------------------------------------------------------------
// Gradient-boosted trees with second-order leaf weights.
// ---------------------------------------------------------------------------

double GbtModel::score(std::span<const double> x) const {
    double s = base_score;
    for (const auto& tree : trees) s += learning_rate * tree.predict(x);
    return s;
}

GbtModel gbt_fit(const Dataset& ds, const GbtHyper& hyper, std::uint64_t /*seed*/, int threads) {
    require_both_classes(ds, "gbt_fit");

    const std::size_t n = ds.rows();
    const double prevalence = ds.fraud_fraction();
    GbtModel model;
    model.n_features = ds.cols();
    model.learning_rate = hyper.learning_rate;
    model.base_score = std::log(prevalence / (1.0 - prevalence));

    XgbGrowth growth;
    growth.max_depth = hyper.max_depth;
    growth.lambda_l2 = hyper.lambda_l2;
    growth.min_child_weight = hyper.min_child_weight;

    std::vector<double> scores(n, model.base_score);
    std::vector<double> grad(n), hess(n);
    auto mean_loss = [&] {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = scores[i];
            const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
            sum += softplus - ds.label(i) * z;
        }
        return sum / static_cast<double>(n);
    };
    model.train_loss.push_back(mean_loss());

    for (int round = 0; round < hyper.n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(scores[i]);
            grad[i] = p - ds.label(i);
            hess[i] = p * (1.0 - p);
        }
        Tree tree = grow_xgb_tree(ds, grad, hess, growth, threads);
        for (std::size_t i = 0; i < n; ++i)
            scores[i] += hyper.learning_rate * tree.predict(ds.row(i));
        model.trees.push_back(std::move(tree));
        model.train_loss.push_back(mean_loss());
    }
    return model;
}

// ---------------------------------------------------------------------------
// KNN: stores the data; all work happens at query time.
// ---------------------------------------------------------------------------

KnnModel knn_fit(const Dataset& ds, std::size_t k) {
    if (k < 1 || k > ds.rows())
        throw ValidationError("knn_fit: k must be in [1, " + std::to_string(ds.rows()) + "], got " +
                              std::to_string(k));
    return KnnModel{std::make_shared<Dataset>(ds), k};
}

namespace {

struct KnnCandidate {
    double dist2;
    RowId id;
    int label;
};

// strict "better" order: nearer first, ties toward smaller row id. Heaped
// with this comparator the top element is the one to evict first.
bool knn_better(const KnnCandidate& a, const KnnCandidate& b) {
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    return a.id < b.id;
}

double knn_proba(const KnnModel& model, std::span<const double> x) {
    const Dataset& train = *model.train;
    const std::size_t k = model.k;
    std::vector<KnnCandidate> heap;
    heap.reserve(k + 1);
    for (std::size_t i = 0; i < train.rows(); ++i) {
        const auto r = train.row(i);
        double d2 = 0.0;
        if (heap.size() == k) {
            // early abandon: partial sums only grow, strict > cannot win a tie
            const double bound = heap.front().dist2;
            bool pruned = false;
            for (std::size_t j = 0; j < r.size(); ++j) {
                const double diff = x[j] - r[j];
                d2 += diff * diff;
                if (d2 > bound) {
                    pruned = true;
                    break;
                }
            }
            if (pruned) continue;
        } else {
            for (std::size_t j = 0; j < r.size(); ++j) {
                const double diff = x[j] - r[j];
                d2 += diff * diff;
            }
        }
        KnnCandidate cand{d2, train.row_id(i), train.label(i)};
        if (heap.size() < k) {
            heap.push_back(cand);
            std::push_heap(heap.begin(), heap.end(), knn_better);
        } else if (knn_better(cand, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), knn_better);
            heap.back() = cand;
            std::push_heap(heap.begin(), heap.end(), knn_better);
        }
    }
    std::size_t positives = 0;
    for (const auto& c : heap) positives += c.label;
    return static_cast<double>(positives) / static_cast<double>(k);
}

} // namespace

// ---------------------------------------------------------------------------
// Unified contract
// ---------------------------------------------------------------------------

TrainedModel fit_model(const ModelSpec& spec, const Dataset& ds, int threads) {
    spec.validate();
    TrainedModel model;
    model.spec = spec;
    switch (spec.family) {
    case ModelFamily::logreg:
        model.impl = logreg_fit(ds, std::get<LogRegHyper>(spec.hyper), spec.seed);
        break;
    case ModelFamily::forest:
        model.impl = forest_fit(ds, std::get<ForestHyper>(spec.hyper), spec.seed, threads);
        break;
    case ModelFamily::gbt:
        model.impl = gbt_fit(ds, std::get<GbtHyper>(spec.hyper), spec.seed, threads);
        break;
    case ModelFamily::knn:
        model.impl = knn_fit(ds, std::get<KnnHyper>(spec.hyper).k);
        break;
    case ModelFamily::mlp:
        model.impl = mlp_fit(ds, std::get<MlpHyper>(spec.hyper), spec.seed);
        break;
    }
    return model;
}

namespace {

std::size_t model_dimension(const TrainedModel& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogRegModel>) return m.coefficients.size();
            else if constexpr (std::is_same_v<T, KnnModel>) return m.train->cols();
            else if constexpr (std::is_same_v<T, MlpModel>) return m.net.sizes.front();
            else return m.n_features;
        },
        model.impl);
}

} // namespace

double predict_proba(const TrainedModel& model, std::span<const double> x) {
    const std::size_t want = model_dimension(model);
    if (want != 0 && x.size() != want)
        throw ValidationError("predict: expected " + std::to_string(want) + " features, got " +
                              std::to_string(x.size()));
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogRegModel>) {
                double z = m.intercept;
                for (std::size_t j = 0; j < x.size(); ++j) z += m.coefficients[j] * x[j];
                return sigmoid(z);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                return m.predict_one(x);
            } else if constexpr (std::is_same_v<T, GbtModel>) {
                return sigmoid(m.score(x));
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                return knn_proba(m, x);
            } else {
                return m.net.predict_proba(x);
            }
        },
        model.impl);
}

int predict(const TrainedModel& model, std::span<const double> x, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ValidationError("predict: threshold must be in [0,1]");
    return predict_proba(model, x) > threshold ? 1 : 0;
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

json tree_to_json(const Tree& tree) {
    json nodes = json::array();
    for (const auto& n : tree.nodes)
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    return nodes;
}

Tree tree_from_json(const json& j) {
    Tree tree;
    for (const auto& n : j) {
        TreeNode node;
        node.feature = n.at(0).get<std::int32_t>();
        node.threshold = n.at(1).get<double>();
        node.left = n.at(2).get<std::int32_t>();
        node.right = n.at(3).get<std::int32_t>();
        node.value = n.at(4).get<double>();
        tree.nodes.push_back(node);
    }
    return tree;
}

json dataset_to_json(const Dataset& ds) {
    json rows = json::array();
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const auto r = ds.row(i);
        rows.push_back({{"id", ds.row_id(i)},
                        {"label", ds.label(i)},
                        {"x", std::vector<double>(r.begin(), r.end())}});
    }
    return {{"feature_names", ds.feature_names()},
            {"fresh_id_base", ds.fresh_id_base()},
            {"rows", rows}};
}

Dataset dataset_from_json(const json& j) {
    Dataset ds(j.at("feature_names").get<std::vector<std::string>>());
    for (const auto& row : j.at("rows")) {
        const auto x = row.at("x").get<std::vector<double>>();
        ds.append_row(x, row.at("label").get<int>(), row.at("id").get<RowId>());
    }
    ds.set_fresh_id_base(j.at("fresh_id_base").get<RowId>());
    return ds;
}

json hyper_to_json(const HyperParams& hyper) {
    return std::visit(
        [](const auto& h) -> json {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, LogRegHyper>)
                return {{"l2", h.l2}, {"max_iters", h.max_iters}, {"tol", h.tol},
                        {"learning_rate", h.learning_rate}, {"backtracking", h.backtracking}};
            else if constexpr (std::is_same_v<T, ForestHyper>)
                return {{"n_trees", h.n_trees}, {"max_depth", h.max_depth}, {"min_leaf", h.min_leaf},
                        {"features_per_split", h.features_per_split}, {"bootstrap", h.bootstrap}};
            else if constexpr (std::is_same_v<T, GbtHyper>)
                return {{"n_rounds", h.n_rounds}, {"learning_rate", h.learning_rate},
                        {"max_depth", h.max_depth}, {"lambda_l2", h.lambda_l2},
                        {"min_child_weight", h.min_child_weight}};
            else if constexpr (std::is_same_v<T, KnnHyper>)
                return {{"k", h.k}};
            else
                return {{"hidden", h.hidden}, {"epochs", h.epochs}, {"batch_size", h.batch_size},
                        {"val_fraction", h.val_fraction}, {"alpha", h.adam.alpha},
                        {"beta1", h.adam.beta1}, {"beta2", h.adam.beta2}, {"eps", h.adam.eps}};
        },
        hyper);
}

HyperParams hyper_from_json(ModelFamily family, const json& j) {
    switch (family) {
    case ModelFamily::logreg: {
        LogRegHyper h;
        h.l2 = j.at("l2");
        h.max_iters = j.at("max_iters");
        h.tol = j.at("tol");
        h.learning_rate = j.at("learning_rate");
        h.backtracking = j.at("backtracking");
        return h;
    }
    case ModelFamily::forest: {
        ForestHyper h;
        h.n_trees = j.at("n_trees");
        h.max_depth = j.at("max_depth");
        h.min_leaf = j.at("min_leaf");
        h.features_per_split = j.at("features_per_split");
        h.bootstrap = j.at("bootstrap");
        return h;
    }
    case ModelFamily::gbt: {
        GbtHyper h;
        h.n_rounds = j.at("n_rounds");
        h.learning_rate = j.at("learning_rate");
        h.max_depth = j.at("max_depth");
        h.lambda_l2 = j.at("lambda_l2");
        h.min_child_weight = j.at("min_child_weight");
        return h;
    }
    case ModelFamily::knn: {
        KnnHyper h;
        h.k = j.at("k");
        return h;
    }
    case ModelFamily::mlp: {
        MlpHyper h;
        h.hidden = j.at("hidden").get<std::vector<std::size_t>>();
        h.epochs = j.at("epochs");
        h.batch_size = j.at("batch_size");
        h.val_fraction = j.at("val_fraction");
        h.adam.alpha = j.at("alpha");
        h.adam.beta1 = j.at("beta1");
        h.adam.beta2 = j.at("beta2");
        h.adam.eps = j.at("eps");
        return h;
    }
    }
    throw ValidationError("unknown family in model file");
}

} // namespace

std::string model_to_json(const TrainedModel& model) {
    json doc;
    doc["format_version"] = 1;
    doc["family"] = family_name(model.spec.family);
    doc["seed"] = model.spec.seed;
    doc["scaler_id"] = model.scaler_id;
    doc["hyper"] = hyper_to_json(model.spec.hyper);

    json params;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogRegModel>) {
                params = {{"coefficients", m.coefficients}, {"intercept", m.intercept},
                          {"converged", m.converged}, {"final_grad_norm", m.final_grad_norm}};
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                json trees = json::array();
                for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
                params = {{"n_features", m.n_features}, {"trees", trees}};
            } else if constexpr (std::is_same_v<T, GbtModel>) {
                json trees = json::array();
                for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
                params = {{"base_score", m.base_score}, {"learning_rate", m.learning_rate},
                          {"n_features", m.n_features}, {"trees", trees}, {"train_loss", m.train_loss}};
            } else if constexpr (std::is_same_v<T, KnnModel>) {
                params = {{"k", m.k}, {"train", dataset_to_json(*m.train)}};
            } else {
                params = {{"sizes", m.net.sizes}, {"weights", m.net.weights}, {"biases", m.net.biases},
                          {"train_loss", m.history.train_loss}, {"val_loss", m.history.val_loss}};
            }
        },
        model.impl);
    doc["params"] = params;
    return doc.dump(2);
}

TrainedModel model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        if (doc.at("format_version").get<int>() != 1)
            throw ValidationError("unsupported model format_version");
        TrainedModel model;
        model.spec.family = family_from_name(doc.at("family"));
        model.spec.seed = doc.at("seed");
        model.scaler_id = doc.at("scaler_id");
        model.spec.hyper = hyper_from_json(model.spec.family, doc.at("hyper"));

        const json& params = doc.at("params");
        switch (model.spec.family) {
        case ModelFamily::logreg: {
            LogRegModel m;
            m.coefficients = params.at("coefficients").get<std::vector<double>>();
            m.intercept = params.at("intercept");
            m.converged = params.at("converged");
            m.final_grad_norm = params.at("final_grad_norm");
            model.impl = std::move(m);
            break;
        }
        case ModelFamily::forest: {
            ForestModel m;
            m.n_features = params.at("n_features");
            for (const auto& t : params.at("trees")) m.trees.push_back(tree_from_json(t));
            model.impl = std::move(m);
            break;
        }
        case ModelFamily::gbt: {
            GbtModel m;
            m.base_score = params.at("base_score");
            m.learning_rate = params.at("learning_rate");
            m.n_features = params.at("n_features");
            for (const auto& t : params.at("trees")) m.trees.push_back(tree_from_json(t));
            m.train_loss = params.at("train_loss").get<std::vector<double>>();
            model.impl = std::move(m);
            break;
        }
        case ModelFamily::knn: {
            KnnModel m;
            m.k = params.at("k");
            m.train = std::make_shared<Dataset>(dataset_from_json(params.at("train")));
            model.impl = std::move(m);
            break;
        }
        case ModelFamily::mlp: {
            MlpModel m;
            m.net.sizes = params.at("sizes").get<std::vector<std::size_t>>();
            m.net.weights = params.at("weights").get<std::vector<std::vector<double>>>();
            m.net.biases = params.at("biases").get<std::vector<std::vector<double>>>();
            m.history.train_loss = params.at("train_loss").get<std::vector<double>>();
            m.history.val_loss = params.at("val_loss").get<std::vector<double>>();
            m.hyper = std::get<MlpHyper>(model.spec.hyper);
            model.impl = std::move(m);
            break;
        }
        }
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("model file is missing fields: ") + e.what());
    }
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file: " + path);
    out << model_to_json(model) << '\n';
    if (!out) throw Error("write failed: " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace fraudlab
