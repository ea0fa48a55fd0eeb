#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fraudlab/dataset.hpp"
#include "fraudlab/rng.hpp"

namespace fraudlab {

/// Fully connected network: ReLU hidden layers, single sigmoid output.
/// Weights are public so tests can perturb individual parameters for
/// finite-difference gradient checks.
struct MlpNetwork {
    std::vector<std::size_t> sizes;          // [input, hidden..., 1]
    std::vector<std::vector<double>> weights; // per layer, out x in row-major
    std::vector<std::vector<double>> biases;  // per layer, out

    static MlpNetwork he_init(std::vector<std::size_t> layer_sizes, Rng& rng);

    std::size_t layer_count() const { return weights.size(); }
    std::size_t parameter_count() const;

    /// Output-layer pre-activation for one input.
    double logit(std::span<const double> x) const;
    double predict_proba(std::span<const double> x) const;

    /// Mean binary cross-entropy over the given rows.
    double mean_loss(const Dataset& ds, std::span<const std::uint32_t> rows) const;

    /// Mean BCE plus gradients (same shapes as weights/biases) via backprop.
    double loss_and_gradients(const Dataset& ds, std::span<const std::uint32_t> rows,
                              std::vector<std::vector<double>>& grad_w,
                              std::vector<std::vector<double>>& grad_b) const;
};

struct AdamConfig {
    double alpha = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction over a set of parameter tensors.
class AdamOptimizer {
public:
    AdamOptimizer(const MlpNetwork& net, AdamConfig cfg);
    void step(MlpNetwork& net, const std::vector<std::vector<double>>& grad_w,
              const std::vector<std::vector<double>>& grad_b);

private:
    AdamConfig cfg_;
    std::vector<std::vector<double>> m_w_, v_w_, m_b_, v_b_;
    std::int64_t t_ = 0;
};

struct MlpHyper {
    std::vector<std::size_t> hidden{32, 16};
    int epochs = 15;
    std::size_t batch_size = 256;
    double val_fraction = 0.15;
    AdamConfig adam;
};

struct TrainHistory {
    std::vector<double> train_loss; // one entry per epoch
    std::vector<double> val_loss;
};

struct MlpModel {
    MlpNetwork net;
    MlpHyper hyper;
    TrainHistory history;
};

/// Stratified validation carve-out, shuffled mini-batches, Adam updates.
/// Aborts with a diagnostic naming the epoch and batch if the loss goes
/// non-finite. Zero epochs returns the freshly initialized network.
MlpModel mlp_fit(const Dataset& ds, const MlpHyper& hyper, std::uint64_t seed);

} // namespace fraudlab
