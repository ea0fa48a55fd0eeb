#include "fraudlab/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "fraudlab/error.hpp"

namespace fraudlab {

namespace {

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

// BCE from the logit: softplus(z) - y*z, stable for large |z|.
double bce_from_logit(double z, double y) {
    const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return softplus - y * z;
}

} // namespace

MlpNetwork MlpNetwork::he_init(std::vector<std::size_t> layer_sizes, Rng& rng) {
    MlpNetwork net;
    net.sizes = std::move(layer_sizes);
    for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
        const std::size_t fan_in = net.sizes[l];
        const std::size_t fan_out = net.sizes[l + 1];
        const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        std::vector<double> w(fan_in * fan_out);
        for (auto& v : w) v = scale * rng.normal();
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
    }
    return net;
}

std::size_t MlpNetwork::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

double MlpNetwork::logit(std::span<const double> x) const {
    std::vector<double> act(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        const std::size_t in = sizes[l], out = sizes[l + 1];
        next.assign(out, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            double z = biases[l][o];
            const double* wrow = weights[l].data() + o * in;
            for (std::size_t i = 0; i < in; ++i) z += wrow[i] * act[i];
            const bool last = (l + 1 == weights.size());
            next[o] = last ? z : std::max(0.0, z);
        }
        act.swap(next);
    }
    return act[0];
}

double MlpNetwork::predict_proba(std::span<const double> x) const { return sigmoid(logit(x)); }

double MlpNetwork::mean_loss(const Dataset& ds, std::span<const std::uint32_t> rows) const {
    double sum = 0.0;
    for (auto r : rows) sum += bce_from_logit(logit(ds.row(r)), ds.label(r));
    return sum / static_cast<double>(rows.size());
}

double MlpNetwork::loss_and_gradients(const Dataset& ds, std::span<const std::uint32_t> rows,
                                      std::vector<std::vector<double>>& grad_w,
                                      std::vector<std::vector<double>>& grad_b) const {
    const std::size_t layers = weights.size();
    grad_w.resize(layers);
    grad_b.resize(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        grad_w[l].assign(weights[l].size(), 0.0);
        grad_b[l].assign(biases[l].size(), 0.0);
    }

    const double inv_n = 1.0 / static_cast<double>(rows.size());
    double loss = 0.0;
    std::vector<std::vector<double>> act(layers + 1); // act[0] = input
    std::vector<double> delta, prev_delta;

    for (auto r : rows) {
        const auto x = ds.row(r);
        act[0].assign(x.begin(), x.end());
        for (std::size_t l = 0; l < layers; ++l) {
            const std::size_t in = sizes[l], out = sizes[l + 1];
            act[l + 1].assign(out, 0.0);
            for (std::size_t o = 0; o < out; ++o) {
                double z = biases[l][o];
                const double* wrow = weights[l].data() + o * in;
                for (std::size_t i = 0; i < in; ++i) z += wrow[i] * act[l][i];
                act[l + 1][o] = (l + 1 == layers) ? z : std::max(0.0, z);
            }
        }
        const double z_out = act[layers][0];
        const double y = ds.label(r);
        loss += bce_from_logit(z_out, y) * inv_n;

        // dL/dz for the sigmoid+BCE output collapses to (p - y)
        delta.assign(1, (sigmoid(z_out) - y) * inv_n);
        for (std::size_t l = layers; l-- > 0;) {
            const std::size_t in = sizes[l], out = sizes[l + 1];
            for (std::size_t o = 0; o < out; ++o) {
                grad_b[l][o] += delta[o];
                double* grow = grad_w[l].data() + o * in;
                for (std::size_t i = 0; i < in; ++i) grow[i] += delta[o] * act[l][i];
            }
            if (l == 0) break;
            prev_delta.assign(in, 0.0);
            for (std::size_t o = 0; o < out; ++o) {
                const double* wrow = weights[l].data() + o * in;
                for (std::size_t i = 0; i < in; ++i) prev_delta[i] += delta[o] * wrow[i];
            }
            // ReLU gate: activation zero means gradient zero
            for (std::size_t i = 0; i < in; ++i)
                if (act[l][i] <= 0.0) prev_delta[i] = 0.0;
            delta.swap(prev_delta);
        }
    }
    return loss;
}

AdamOptimizer::AdamOptimizer(const MlpNetwork& net, AdamConfig cfg) : cfg_(cfg) {
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        m_w_.emplace_back(net.weights[l].size(), 0.0);
        v_w_.emplace_back(net.weights[l].size(), 0.0);
        m_b_.emplace_back(net.biases[l].size(), 0.0);
        v_b_.emplace_back(net.biases[l].size(), 0.0);
    }
}

void AdamOptimizer::step(MlpNetwork& net, const std::vector<std::vector<double>>& grad_w,
                         const std::vector<std::vector<double>>& grad_b) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    auto update = [&](std::vector<double>& param, const std::vector<double>& grad,
                      std::vector<double>& m, std::vector<double>& v) {
        for (std::size_t i = 0; i < param.size(); ++i) {
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * grad[i];
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            param[i] -= cfg_.alpha * m_hat / (std::sqrt(v_hat) + cfg_.eps);
        }
    };
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        update(net.weights[l], grad_w[l], m_w_[l], v_w_[l]);
        update(net.biases[l], grad_b[l], m_b_[l], v_b_[l]);
    }
}

MlpModel mlp_fit(const Dataset& ds, const MlpHyper& hyper, std::uint64_t seed) {
    if (ds.class_count(0) == 0 || ds.class_count(1) == 0)
        throw ValidationError("mlp_fit: both classes must be present");

    // Stratified validation carve-out for loss monitoring.
    Dataset train = ds, val;
    bool have_val = false;
    if (hyper.val_fraction > 0.0 && ds.class_count(0) >= 2 && ds.class_count(1) >= 2) {
        auto parts = stratified_split(ds, hyper.val_fraction, derive_seed(seed, "mlp/val"));
        train = std::move(parts.first);
        val = std::move(parts.second);
        have_val = true;
    }
    if (hyper.batch_size == 0 || hyper.batch_size > train.rows())
        throw ValidationError("mlp_fit: batch_size " + std::to_string(hyper.batch_size) +
                              " exceeds the " + std::to_string(train.rows()) +
                              " rows left after the validation carve-out");

    std::vector<std::size_t> layer_sizes{train.cols()};
    layer_sizes.insert(layer_sizes.end(), hyper.hidden.begin(), hyper.hidden.end());
    layer_sizes.push_back(1);

    Rng init_rng(derive_seed(seed, "mlp/init"));
    MlpModel model;
    model.hyper = hyper;
    model.net = MlpNetwork::he_init(layer_sizes, init_rng);

    AdamOptimizer adam(model.net, hyper.adam);
    Rng shuffle_rng(derive_seed(seed, "mlp/shuffle"));
    std::vector<std::uint32_t> order(train.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    std::vector<std::uint32_t> val_rows(val.rows());
    for (std::size_t i = 0; i < val_rows.size(); ++i) val_rows[i] = static_cast<std::uint32_t>(i);

    std::vector<std::vector<double>> grad_w, grad_b;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        int batch_index = 0;
        for (std::size_t start = 0; start < order.size(); start += hyper.batch_size, ++batch_index) {
            const std::size_t len = std::min(hyper.batch_size, order.size() - start);
            const std::span<const std::uint32_t> batch(order.data() + start, len);
            const double batch_loss = model.net.loss_and_gradients(train, batch, grad_w, grad_b);
            if (!std::isfinite(batch_loss))
                throw Error("mlp_fit: non-finite loss at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(batch_index));
            epoch_loss += batch_loss * static_cast<double>(len);
            seen += len;
            adam.step(model.net, grad_w, grad_b);
        }
        model.history.train_loss.push_back(epoch_loss / static_cast<double>(seen));
        if (have_val) model.history.val_loss.push_back(model.net.mean_loss(val, val_rows));
    }
    for (std::size_t l = 0; l < model.net.weights.size(); ++l) {
        for (double w : model.net.weights[l])
            if (!std::isfinite(w)) throw Error("mlp_fit: non-finite weight after training");
        for (double b : model.net.biases[l])
            if (!std::isfinite(b)) throw Error("mlp_fit: non-finite bias after training");
    }
    return model;
}

} // namespace fraudlab
