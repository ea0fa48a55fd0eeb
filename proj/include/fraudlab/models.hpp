#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fraudlab/dataset.hpp"
#include "fraudlab/mlp.hpp"
#include "fraudlab/tree.hpp"

namespace fraudlab {

enum class ModelFamily { logreg, forest, gbt, knn, mlp };

std::string family_name(ModelFamily family);
ModelFamily family_from_name(const std::string& name);

struct LogRegHyper {
    double l2 = 1e-4;
    int max_iters = 1000;
    double tol = 1e-6; // infinity norm of the mean-loss gradient
    double learning_rate = 1.0;
    bool backtracking = true;
};

struct ForestHyper {
    int n_trees = 100;
    int max_depth = 12;
    std::size_t min_leaf = 1;
    std::size_t features_per_split = 0; // 0 = ceil(sqrt(d))
    bool bootstrap = true;              // test hook; disabling makes one tree a plain CART
};

struct GbtHyper {
    int n_rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    double lambda_l2 = 1.0;
    double min_child_weight = 1.0;
};

struct KnnHyper {
    std::size_t k = 5;
};

using HyperParams = std::variant<LogRegHyper, ForestHyper, GbtHyper, KnnHyper, MlpHyper>;

/// Which classifier to train, with what knobs and what seed.
struct ModelSpec {
    ModelFamily family = ModelFamily::logreg;
    HyperParams hyper;
    std::uint64_t seed = 0;

    static ModelSpec defaults(ModelFamily family, std::uint64_t seed = 0);
    std::string describe() const;
    void validate() const;
};

struct LogRegModel {
    std::vector<double> coefficients;
    double intercept = 0.0;
    bool converged = false;
    double final_grad_norm = 0.0; // infinity norm at the last iterate
};

struct ForestModel {
    std::vector<Tree> trees;
    std::size_t n_features = 0;
    double predict_one(std::span<const double> x) const; // mean of tree leaf values
};

struct GbtModel {
    double base_score = 0.0; // log-odds of training prevalence
    double learning_rate = 0.1;
    std::size_t n_features = 0;
    std::vector<Tree> trees;
    std::vector<double> train_loss; // [0] = base-score loss, then one per round

    double score(std::span<const double> x) const;
};

struct KnnModel {
    std::shared_ptr<const Dataset> train;
    std::size_t k = 5;
};

struct TrainedModel {
    ModelSpec spec;
    std::variant<LogRegModel, ForestModel, GbtModel, KnnModel, MlpModel> impl;
    std::uint64_t scaler_id = 0; // fingerprint of the dataset the scaler was fitted on
};

LogRegModel logreg_fit(const Dataset& ds, const LogRegHyper& hyper, std::uint64_t seed);

/// The objective logreg_fit minimizes: mean logistic loss + (l2/2)||beta||^2
/// (intercept unpenalized). Fills the gradient when out params are given.
double logreg_objective(const Dataset& ds, std::span<const double> beta, double intercept, double l2,
                        std::vector<double>* grad = nullptr, double* grad_intercept = nullptr);
ForestModel forest_fit(const Dataset& ds, const ForestHyper& hyper, std::uint64_t seed, int threads = 1);
GbtModel gbt_fit(const Dataset& ds, const GbtHyper& hyper, std::uint64_t seed, int threads = 1);
KnnModel knn_fit(const Dataset& ds, std::size_t k);

/// Dispatch on the spec's family. Fitting is deterministic under the seed.
TrainedModel fit_model(const ModelSpec& spec, const Dataset& ds, int threads = 1);

/// Class-1 probability in [0,1] (strictly inside (0,1) for logreg/gbt/mlp).
double predict_proba(const TrainedModel& model, std::span<const double> x);

/// 1 iff predict_proba(x) > threshold (strict). Threshold must be in [0,1].
int predict(const TrainedModel& model, std::span<const double> x, double threshold = 0.5);

/// Versioned JSON round-trip for resumable experiments.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

} // namespace fraudlab
