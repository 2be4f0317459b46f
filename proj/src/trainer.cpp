#include "dacnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

namespace dacnn {

std::string mode_name(TrainMode m) { return m == TrainMode::Baseline ? "baseline" : "rbf"; }

TrainMode mode_from_name(const std::string& name) {
    if (name == "baseline") return TrainMode::Baseline;
    if (name == "rbf") return TrainMode::Rbf;
    throw ConfigError("unknown mode '" + name + "' (expected baseline or rbf)");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("momentum must be in [0, 1)");
}

double cross_entropy(const std::vector<double>& probabilities, int label) {
    if (label < 0 || label >= static_cast<int>(probabilities.size()))
        throw LabelOutOfRange("label " + std::to_string(label) + " for K = " +
                              std::to_string(probabilities.size()));
    return -std::log(std::max(probabilities[label], 1e-12));
}

SgdState SgdState::for_model(const NetworkModel& model) {
    SgdState s;
    for (std::size_t i = 0; i < model.specs().size(); ++i) {
        const Tensor& w = model.weights()[i];
        const Tensor& b = model.biases()[i];
        s.vw.push_back(w.size() ? Tensor(w.shape) : Tensor());
        s.vb.push_back(b.size() ? Tensor(b.shape) : Tensor());
    }
    return s;
}

namespace {

// Loss and upstream logit gradient for one sample. predicted/correctness are
// read off the raw logits in both modes.
struct SampleLoss {
    double loss;
    bool correct;
};

SampleLoss sample_loss_and_gradient(NetworkModel& model, const DistortedSample& sample,
                                    TrainMode mode, const RbfConfig& rbf_cfg,
                                    std::vector<double>& input_buf, Gradients& grads) {
    input_buf.assign(sample.pixels.begin(), sample.pixels.end());
    const std::vector<double> z = model.forward(input_buf);
    const int label = sample.label;
    const int K = static_cast<int>(z.size());
    const int pred = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());

    double loss;
    std::vector<double> gz(z.size());
    if (mode == TrainMode::Baseline) {
        const std::vector<double> p = softmax(z);
        loss = cross_entropy(p, label);
        for (int k = 0; k < K; ++k) gz[k] = p[k] - (k == label ? 1.0 : 0.0);
    } else {
        const double zeta = center_from_target(target_estimate(sample.q, rbf_cfg), rbf_cfg.K);
        const std::vector<double> g = rbf_transform(z, zeta, rbf_cfg);
        const std::vector<double> p = softmax(g);
        loss = cross_entropy(p, label);
        std::vector<double> gg(z.size());
        for (int k = 0; k < K; ++k) gg[k] = p[k] - (k == label ? 1.0 : 0.0);
        gz = rbf_backward(z, zeta, rbf_cfg, gg);
    }
    model.backward_accumulate(gz, grads);
    return {loss, pred == label};
}

void zero_gradients(Gradients& g) {
    for (Tensor& t : g.weights) std::fill(t.v.begin(), t.v.end(), 0.0);
    for (Tensor& t : g.biases) std::fill(t.v.begin(), t.v.end(), 0.0);
    std::fill(g.input.begin(), g.input.end(), 0.0);
}

void sgd_update(NetworkModel& model, const Gradients& grads, SgdState& opt,
                double batch_inv, double lr, double mu) {
    for (std::size_t i = 0; i < model.specs().size(); ++i) {
        Tensor& w = model.weights()[i];
        if (w.size() == 0) continue;
        Tensor& b = model.biases()[i];
        for (std::size_t j = 0; j < w.size(); ++j) {
            opt.vw[i].v[j] = mu * opt.vw[i].v[j] - lr * grads.weights[i].v[j] * batch_inv;
            w.v[j] = to_float32(w.v[j] + opt.vw[i].v[j]);
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
            opt.vb[i].v[j] = mu * opt.vb[i].v[j] - lr * grads.biases[i].v[j] * batch_inv;
            b.v[j] = to_float32(b.v[j] + opt.vb[i].v[j]);
        }
    }
}

}  // namespace

double train_step(NetworkModel& model, std::span<const DistortedSample> batch,
                  TrainMode mode, const RbfConfig& rbf_cfg, SgdState& opt,
                  double learning_rate, double momentum) {
    if (batch.empty()) throw ConfigError("train_step needs a non-empty batch");

    Gradients grads = model.make_zero_gradients();
    std::vector<double> input_buf;
    double loss = 0.0;
    for (const DistortedSample& s : batch)
        loss += sample_loss_and_gradient(model, s, mode, rbf_cfg, input_buf, grads).loss;
    loss /= static_cast<double>(batch.size());

    sgd_update(model, grads, opt, 1.0 / static_cast<double>(batch.size()), learning_rate,
               momentum);
    return loss;
}

TrainedModel train(const AugmentedDataset& dataset, const NetworkModel& net,
                   const TrainConfig& train_cfg, const RbfConfig& rbf_cfg) {
    train_cfg.validate();
    if (train_cfg.mode == TrainMode::Rbf) rbf_cfg.validate();
    if (dataset.samples.empty()) throw EmptyResult("training dataset is empty");

    TrainedModel tm{net, train_cfg.mode, {}, {}};
    NetworkModel& model = tm.model;
    SgdState opt = SgdState::for_model(model);

    std::vector<std::size_t> order(dataset.samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(train_cfg.seed);

    Gradients grads = model.make_zero_gradients();
    std::vector<double> input_buf;

    for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
        if (train_cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t correct = 0;

        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(train_cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(train_cfg.batch_size));
            zero_gradients(grads);
            double batch_loss = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                const auto r = sample_loss_and_gradient(model, dataset.samples[order[i]],
                                                        train_cfg.mode, rbf_cfg, input_buf,
                                                        grads);
                batch_loss += r.loss;
                correct += r.correct ? 1 : 0;
            }
            const double n = static_cast<double>(end - start);
            if (!std::isfinite(batch_loss))
                throw Diverged("non-finite loss in epoch " + std::to_string(epoch + 1));
            sgd_update(model, grads, opt, 1.0 / n, train_cfg.learning_rate,
                       train_cfg.momentum);
            epoch_loss += batch_loss;
        }
        tm.history.push_back(EpochStats{
            epoch_loss / static_cast<double>(order.size()),
            static_cast<double>(correct) / static_cast<double>(order.size())});
    }

    auto& snap = tm.config_snapshot;
    snap["mode"] = mode_name(train_cfg.mode);
    snap["epochs"] = std::to_string(train_cfg.epochs);
    snap["batch_size"] = std::to_string(train_cfg.batch_size);
    snap["learning_rate"] = std::to_string(train_cfg.learning_rate);
    snap["momentum"] = std::to_string(train_cfg.momentum);
    snap["seed"] = std::to_string(train_cfg.seed);
    snap["shuffle"] = train_cfg.shuffle ? "1" : "0";
    snap["p_max"] = std::to_string(rbf_cfg.p_max);
    snap["p_min"] = std::to_string(rbf_cfg.p_min);
    snap["a"] = std::to_string(rbf_cfg.a);
    snap["b"] = std::to_string(rbf_cfg.b);
    snap["peak"] = std::to_string(rbf_cfg.A);
    snap["sigma_rbf"] = std::to_string(rbf_cfg.sigma_rbf);
    snap["k"] = std::to_string(rbf_cfg.K);
    return tm;
}

void save_model(const TrainedModel& tm, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");

    const NetworkModel& m = tm.model;
    out << "DACNN v1\n";
    out << "mode " << mode_name(tm.mode_trained) << "\n";
    out << "classes " << m.num_classes() << "\n";
    const Shape3 in = m.input_shape();
    out << "input " << in.c << " " << in.h << " " << in.w << "\n";
    for (const LayerSpec& s : m.specs()) out << "layer " << s.to_line() << "\n";
    for (const auto& [k, v] : tm.config_snapshot) out << "config " << k << "=" << v << "\n";
    out << "params " << m.parameter_count() << "\n";

    for (std::size_t i = 0; i < m.specs().size(); ++i) {
        for (double x : m.weights()[i].v) {
            const float f = static_cast<float>(x);
            out.write(reinterpret_cast<const char*>(&f), sizeof(float));
        }
        for (double x : m.biases()[i].v) {
            const float f = static_cast<float>(x);
            out.write(reinterpret_cast<const char*>(&f), sizeof(float));
        }
    }
    if (!out) throw IoError("short write to " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw Truncated("empty model file " + path);
    {
        std::istringstream is(line);
        std::string magic, version;
        is >> magic >> version;
        if (magic != "DACNN") throw BadMagic("bad model magic in " + path);
        if (version != "v1") throw VersionMismatch("unsupported model version " + version);
    }

    TrainMode mode = TrainMode::Baseline;
    int classes = 0;
    Shape3 input{};
    std::vector<LayerSpec> specs;
    std::map<std::string, std::string> snap;
    std::size_t param_count = 0;

    while (std::getline(in, line)) {
        std::istringstream is(line);
        std::string tag;
        is >> tag;
        if (tag == "mode") {
            std::string name;
            is >> name;
            mode = mode_from_name(name);
        } else if (tag == "classes") {
            is >> classes;
        } else if (tag == "input") {
            is >> input.c >> input.h >> input.w;
        } else if (tag == "layer") {
            std::string rest;
            std::getline(is, rest);
            specs.push_back(LayerSpec::from_line(rest));
        } else if (tag == "config") {
            std::string kv;
            is >> kv;
            const auto eq = kv.find('=');
            if (eq != std::string::npos) snap[kv.substr(0, eq)] = kv.substr(eq + 1);
        } else if (tag == "params") {
            is >> param_count;
            break;
        } else {
            throw BadMagic("unknown model file line '" + line + "'");
        }
    }

    NetworkModel model(std::move(specs), input, classes);
    if (model.parameter_count() != param_count)
        throw Truncated("parameter count " + std::to_string(param_count) +
                        " disagrees with the layer specs");

    for (std::size_t i = 0; i < model.specs().size(); ++i) {
        for (Tensor* t : {&model.weights()[i], &model.biases()[i]}) {
            for (double& x : t->v) {
                float f;
                in.read(reinterpret_cast<char*>(&f), sizeof(float));
                if (!in) throw Truncated("model payload ends early in " + path);
                x = static_cast<double>(f);
            }
        }
    }
    return TrainedModel{std::move(model), mode, {}, std::move(snap)};
}

void save_history_csv(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "epoch,loss,accuracy\n";
    for (std::size_t e = 0; e < model.history.size(); ++e) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g\n", e + 1, model.history[e].loss,
                      model.history[e].accuracy);
        out << buf;
    }
}

}  // namespace dacnn
