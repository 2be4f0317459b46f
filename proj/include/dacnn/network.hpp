#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dacnn/tensor.hpp"

namespace dacnn {

enum class LayerKind { Conv, Subsample, Dense, Relu, Relu6 };

struct LayerSpec {
    LayerKind kind = LayerKind::Relu;
    // Conv
    int in_ch = 0, out_ch = 0, ksize = 0, stride = 1;
    // Subsample (non-overlapping average pooling)
    int pool = 0;
    // Dense
    int in_dim = 0, out_dim = 0;

    static LayerSpec conv(int in_ch, int out_ch, int ksize, int stride = 1);
    static LayerSpec subsample(int pool);
    static LayerSpec dense(int in_dim, int out_dim);
    static LayerSpec relu();
    static LayerSpec relu6();

    std::string to_line() const;
    static LayerSpec from_line(const std::string& line);
    bool operator==(const LayerSpec&) const = default;
};

struct Shape3 {
    int c = 0, h = 0, w = 0;
    int count() const { return c * h * w; }
    bool operator==(const Shape3&) const = default;
};

double relu(double x);
double relu6(double x);

// Numerically stable softmax (max subtraction).
std::vector<double> softmax(const std::vector<double>& logits);

struct Gradients {
    std::vector<Tensor> weights;  // one entry per layer, empty for non-parametric layers
    std::vector<Tensor> biases;
    std::vector<double> input;  // gradient w.r.t. the network input
};

// Feed-forward network over the five layer kinds. Shapes are validated at
// construction and the final layer must be ReLU6 so every logit lands in
// [0, 6]. forward() retains the activations backward() consumes; a model
// instance therefore serves one caller at a time.
class NetworkModel {
public:
    NetworkModel(std::vector<LayerSpec> specs, Shape3 input_shape, int num_classes);

    // Conv(1->6,5) ReLU Pool2 Conv(6->12,5) ReLU Pool2 Dense(192->64) ReLU
    // Dense(64->K) ReLU6 on a 28x28 single-channel input.
    static NetworkModel lenet_like(int num_classes = 10);

    // Uniform [-s, s] with s = sqrt(6 / (fan_in + fan_out)); biases zero.
    // Parameters are rounded to float32-representable values so the model
    // file round-trips bit-exactly.
    void init_parameters(std::uint64_t seed);

    std::vector<double> forward(const std::vector<double>& input);
    Gradients backward(const std::vector<double>& upstream_gradient) const;
    // Accumulating variant used by the training loop; grads must be shaped
    // like make_zero_gradients().
    void backward_accumulate(const std::vector<double>& upstream_gradient,
                             Gradients& grads) const;

    Gradients make_zero_gradients() const;

    std::size_t parameter_count() const;
    int num_classes() const { return num_classes_; }
    Shape3 input_shape() const { return shapes_.front(); }
    const std::vector<LayerSpec>& specs() const { return specs_; }
    std::vector<Tensor>& weights() { return w_; }
    std::vector<Tensor>& biases() { return b_; }
    const std::vector<Tensor>& weights() const { return w_; }
    const std::vector<Tensor>& biases() const { return b_; }

private:
    std::vector<LayerSpec> specs_;
    std::vector<Shape3> shapes_;  // shapes_[i] feeds layer i; back() is the output
    std::vector<Tensor> w_, b_;
    int num_classes_ = 0;

    // forward state
    mutable std::vector<std::vector<double>> acts_;
    bool has_forward_state_ = false;
};

// Quantize to the nearest float32 value (kept as double).
inline double to_float32(double x) { return static_cast<double>(static_cast<float>(x)); }

}  // namespace dacnn
