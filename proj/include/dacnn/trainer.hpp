#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "dacnn/augment.hpp"
#include "dacnn/network.hpp"
#include "dacnn/rbf.hpp"

namespace dacnn {

enum class TrainMode { Baseline, Rbf };

std::string mode_name(TrainMode m);
TrainMode mode_from_name(const std::string& name);

struct TrainConfig {
    TrainMode mode = TrainMode::Baseline;
    int epochs = 200;
    int batch_size = 64;
    double learning_rate = 0.1;
    double momentum = 0.0;
    std::uint64_t seed = 5;
    bool shuffle = true;

    void validate() const;
};

struct EpochStats {
    double loss = 0.0;
    double accuracy = 0.0;  // fraction in [0, 1]
};

// The trained network never contains the head; in RBF mode the head lives
// only inside the training loss.
struct TrainedModel {
    NetworkModel model;
    TrainMode mode_trained = TrainMode::Baseline;
    std::vector<EpochStats> history;
    std::map<std::string, std::string> config_snapshot;
};

// -log(probabilities[label]) with the probability floored at 1e-12.
double cross_entropy(const std::vector<double>& probabilities, int label);

struct SgdState {
    std::vector<Tensor> vw, vb;  // momentum velocity, shaped like the parameters

    static SgdState for_model(const NetworkModel& model);
};

// One SGD-with-momentum step on a mini-batch; returns the mean batch loss.
// Baseline mode: CE(softmax(forward(x)), y). RBF mode: the logits pass
// through the head transform centered at zeta(q) before softmax.
double train_step(NetworkModel& model, std::span<const DistortedSample> batch,
                  TrainMode mode, const RbfConfig& rbf_cfg, SgdState& opt,
                  double learning_rate, double momentum);

TrainedModel train(const AugmentedDataset& dataset, const NetworkModel& net,
                   const TrainConfig& train_cfg, const RbfConfig& rbf_cfg);

// "DACNN v1" model file: text magic line, layer/classes/mode lines, config
// key=value lines, then the little-endian float32 parameter payload.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

void save_history_csv(const TrainedModel& model, const std::string& path);

}  // namespace dacnn
