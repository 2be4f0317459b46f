#include "dacnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace dacnn {

LayerSpec LayerSpec::conv(int in_ch, int out_ch, int ksize, int stride) {
    LayerSpec s;
    s.kind = LayerKind::Conv;
    s.in_ch = in_ch;
    s.out_ch = out_ch;
    s.ksize = ksize;
    s.stride = stride;
    return s;
}

LayerSpec LayerSpec::subsample(int pool) {
    LayerSpec s;
    s.kind = LayerKind::Subsample;
    s.pool = pool;
    return s;
}

LayerSpec LayerSpec::dense(int in_dim, int out_dim) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.in_dim = in_dim;
    s.out_dim = out_dim;
    return s;
}

LayerSpec LayerSpec::relu() {
    LayerSpec s;
    s.kind = LayerKind::Relu;
    return s;
}

LayerSpec LayerSpec::relu6() {
    LayerSpec s;
    s.kind = LayerKind::Relu6;
    return s;
}

std::string LayerSpec::to_line() const {
    std::ostringstream os;
    switch (kind) {
        case LayerKind::Conv:
            os << "Conv " << in_ch << " " << out_ch << " " << ksize << " " << stride;
            break;
        case LayerKind::Subsample:
            os << "Subsample " << pool;
            break;
        case LayerKind::Dense:
            os << "Dense " << in_dim << " " << out_dim;
            break;
        case LayerKind::Relu:
            os << "ReLU";
            break;
        case LayerKind::Relu6:
            os << "ReLU6";
            break;
    }
    return os.str();
}

LayerSpec LayerSpec::from_line(const std::string& line) {
    std::istringstream is(line);
    std::string kind;
    is >> kind;
    LayerSpec s;
    if (kind == "Conv") {
        is >> s.in_ch >> s.out_ch >> s.ksize >> s.stride;
        s.kind = LayerKind::Conv;
    } else if (kind == "Subsample") {
        is >> s.pool;
        s.kind = LayerKind::Subsample;
    } else if (kind == "Dense") {
        is >> s.in_dim >> s.out_dim;
        s.kind = LayerKind::Dense;
    } else if (kind == "ReLU") {
        s.kind = LayerKind::Relu;
    } else if (kind == "ReLU6") {
        s.kind = LayerKind::Relu6;
    } else {
        throw BadMagic("unknown layer kind '" + kind + "'");
    }
    if (is.fail()) throw BadMagic("malformed layer line '" + line + "'");
    return s;
}

double relu(double x) { return x > 0.0 ? x : 0.0; }
double relu6(double x) { return std::min(6.0, std::max(0.0, x)); }

std::vector<double> softmax(const std::vector<double>& logits) {
    if (logits.size() < 2) throw ShapeMismatch("softmax needs K >= 2 logits");
    const double zmax = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        p[k] = std::exp(logits[k] - zmax);
        sum += p[k];
    }
    for (double& x : p) x /= sum;
    return p;
}

NetworkModel::NetworkModel(std::vector<LayerSpec> specs, Shape3 input_shape,
                           int num_classes)
    : specs_(std::move(specs)), num_classes_(num_classes) {
    if (num_classes_ < 2) throw ShapeMismatch("num_classes must be >= 2");
    if (specs_.empty()) throw ShapeMismatch("network needs at least one layer");

    shapes_.push_back(input_shape);
    for (const LayerSpec& s : specs_) {
        const Shape3 in = shapes_.back();
        Shape3 out = in;
        Tensor w, b;
        switch (s.kind) {
            case LayerKind::Conv: {
                if (s.in_ch != in.c)
                    throw ShapeMismatch("conv expects " + std::to_string(s.in_ch) +
                                        " channels, got " + std::to_string(in.c));
                out.c = s.out_ch;
                out.h = (in.h - s.ksize) / s.stride + 1;
                out.w = (in.w - s.ksize) / s.stride + 1;
                if (out.h <= 0 || out.w <= 0) throw ShapeMismatch("conv output collapses");
                w = Tensor({s.out_ch, s.in_ch, s.ksize, s.ksize});
                b = Tensor({s.out_ch});
                break;
            }
            case LayerKind::Subsample: {
                if (s.pool <= 0 || in.h % s.pool != 0 || in.w % s.pool != 0)
                    throw ShapeMismatch("pool size must divide the spatial extent");
                out.h = in.h / s.pool;
                out.w = in.w / s.pool;
                break;
            }
            case LayerKind::Dense: {
                if (s.in_dim != in.count())
                    throw ShapeMismatch("dense expects " + std::to_string(s.in_dim) +
                                        " inputs, got " + std::to_string(in.count()));
                out = Shape3{s.out_dim, 1, 1};
                w = Tensor({s.out_dim, s.in_dim});
                b = Tensor({s.out_dim});
                break;
            }
            case LayerKind::Relu:
            case LayerKind::Relu6:
                break;
        }
        shapes_.push_back(out);
        w_.push_back(std::move(w));
        b_.push_back(std::move(b));
    }

    if (specs_.back().kind != LayerKind::Relu6)
        throw ShapeMismatch("final layer must be ReLU6");
    if (shapes_.back().count() != num_classes_)
        throw ShapeMismatch("network output has " + std::to_string(shapes_.back().count()) +
                            " values, expected K = " + std::to_string(num_classes_));
}

NetworkModel NetworkModel::lenet_like(int num_classes) {
    std::vector<LayerSpec> specs = {
        LayerSpec::conv(1, 6, 5),   LayerSpec::relu(),  LayerSpec::subsample(2),
        LayerSpec::conv(6, 12, 5),  LayerSpec::relu(),  LayerSpec::subsample(2),
        LayerSpec::dense(192, 64),  LayerSpec::relu(),  LayerSpec::dense(64, num_classes),
        LayerSpec::relu6(),
    };
    return NetworkModel(std::move(specs), Shape3{1, 28, 28}, num_classes);
}

void NetworkModel::init_parameters(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (w_[i].size() == 0) continue;
        int fan_in = 0, fan_out = 0;
        if (specs_[i].kind == LayerKind::Conv) {
            fan_in = specs_[i].in_ch * specs_[i].ksize * specs_[i].ksize;
            fan_out = specs_[i].out_ch * specs_[i].ksize * specs_[i].ksize;
        } else {
            fan_in = specs_[i].in_dim;
            fan_out = specs_[i].out_dim;
        }
        const double s = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> uni(-s, s);
        for (double& x : w_[i].v) x = to_float32(uni(rng));
        std::fill(b_[i].v.begin(), b_[i].v.end(), 0.0);
    }
    has_forward_state_ = false;
}

namespace {

void conv_forward(const LayerSpec& s, const Shape3& in_sh, const Shape3& out_sh,
                  const double* in, const Tensor& w, const Tensor& b, double* out) {
    const int OC = out_sh.c, OH = out_sh.h, OW = out_sh.w;
    const int IC = in_sh.c, IH = in_sh.h, IW = in_sh.w;
    const int K = s.ksize, st = s.stride;
    for (int o = 0; o < OC; ++o)
        std::fill(out + o * OH * OW, out + (o + 1) * OH * OW, b.v[o]);
    for (int o = 0; o < OC; ++o)
        for (int c = 0; c < IC; ++c)
            for (int ky = 0; ky < K; ++ky)
                for (int kx = 0; kx < K; ++kx) {
                    const double wv = w.v[((o * IC + c) * K + ky) * K + kx];
                    for (int y = 0; y < OH; ++y) {
                        const double* ir = in + (c * IH + y * st + ky) * IW + kx;
                        double* orow = out + (o * OH + y) * OW;
                        if (st == 1)
                            for (int x = 0; x < OW; ++x) orow[x] += wv * ir[x];
                        else
                            for (int x = 0; x < OW; ++x) orow[x] += wv * ir[x * st];
                    }
                }
}

void conv_backward(const LayerSpec& s, const Shape3& in_sh, const Shape3& out_sh,
                   const double* in, const Tensor& w, const double* gout, Tensor& gw,
                   Tensor& gb, double* gin) {
    const int OC = out_sh.c, OH = out_sh.h, OW = out_sh.w;
    const int IC = in_sh.c, IH = in_sh.h, IW = in_sh.w;
    const int K = s.ksize, st = s.stride;
    for (int o = 0; o < OC; ++o) {
        double acc = 0.0;
        const double* g = gout + o * OH * OW;
        for (int i = 0; i < OH * OW; ++i) acc += g[i];
        gb.v[o] += acc;
    }
    for (int o = 0; o < OC; ++o)
        for (int c = 0; c < IC; ++c)
            for (int ky = 0; ky < K; ++ky)
                for (int kx = 0; kx < K; ++kx) {
                    const double wv = w.v[((o * IC + c) * K + ky) * K + kx];
                    double wacc = 0.0;
                    for (int y = 0; y < OH; ++y) {
                        const double* ir = in + (c * IH + y * st + ky) * IW + kx;
                        const double* g = gout + (o * OH + y) * OW;
                        double* gr = gin + (c * IH + y * st + ky) * IW + kx;
                        if (st == 1)
                            for (int x = 0; x < OW; ++x) {
                                wacc += g[x] * ir[x];
                                gr[x] += g[x] * wv;
                            }
                        else
                            for (int x = 0; x < OW; ++x) {
                                wacc += g[x] * ir[x * st];
                                gr[x * st] += g[x] * wv;
                            }
                    }
                    gw.v[((o * IC + c) * K + ky) * K + kx] += wacc;
                }
}

}  // namespace

std::vector<double> NetworkModel::forward(const std::vector<double>& input) {
    if (static_cast<int>(input.size()) != shapes_.front().count())
        throw ShapeMismatch("input has " + std::to_string(input.size()) +
                            " values, expected " + std::to_string(shapes_.front().count()));

    acts_.assign(specs_.size() + 1, {});
    acts_[0] = input;
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        const LayerSpec& s = specs_[i];
        const Shape3& in_sh = shapes_[i];
        const Shape3& out_sh = shapes_[i + 1];
        const std::vector<double>& x = acts_[i];
        std::vector<double> y(out_sh.count());
        switch (s.kind) {
            case LayerKind::Conv:
                conv_forward(s, in_sh, out_sh, x.data(), w_[i], b_[i], y.data());
                break;
            case LayerKind::Subsample: {
                const int p = s.pool;
                const double inv = 1.0 / (p * p);
                for (int c = 0; c < out_sh.c; ++c)
                    for (int oy = 0; oy < out_sh.h; ++oy)
                        for (int ox = 0; ox < out_sh.w; ++ox) {
                            double acc = 0.0;
                            for (int dy = 0; dy < p; ++dy)
                                for (int dx = 0; dx < p; ++dx)
                                    acc += x[(c * in_sh.h + oy * p + dy) * in_sh.w +
                                             ox * p + dx];
                            y[(c * out_sh.h + oy) * out_sh.w + ox] = acc * inv;
                        }
                break;
            }
            case LayerKind::Dense: {
                for (int o = 0; o < s.out_dim; ++o) {
                    const double* wr = w_[i].v.data() + static_cast<std::size_t>(o) * s.in_dim;
                    double acc = b_[i].v[o];
                    for (int j = 0; j < s.in_dim; ++j) acc += wr[j] * x[j];
                    y[o] = acc;
                }
                break;
            }
            case LayerKind::Relu:
                for (std::size_t j = 0; j < x.size(); ++j) y[j] = relu(x[j]);
                break;
            case LayerKind::Relu6:
                for (std::size_t j = 0; j < x.size(); ++j) y[j] = relu6(x[j]);
                break;
        }
        acts_[i + 1] = std::move(y);
    }
    has_forward_state_ = true;
    return acts_.back();
}

Gradients NetworkModel::make_zero_gradients() const {
    Gradients g;
    g.weights.resize(specs_.size());
    g.biases.resize(specs_.size());
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        if (w_[i].size() == 0) continue;
        g.weights[i] = Tensor(w_[i].shape);
        g.biases[i] = Tensor(b_[i].shape);
    }
    g.input.assign(shapes_.front().count(), 0.0);
    return g;
}

Gradients NetworkModel::backward(const std::vector<double>& upstream_gradient) const {
    Gradients g = make_zero_gradients();
    backward_accumulate(upstream_gradient, g);
    return g;
}

void NetworkModel::backward_accumulate(const std::vector<double>& upstream_gradient,
                                       Gradients& grads) const {
    if (!has_forward_state_) throw NoForwardState("backward called before forward");
    if (static_cast<int>(upstream_gradient.size()) != shapes_.back().count())
        throw ShapeMismatch("upstream gradient size mismatch");

    std::vector<double> g = upstream_gradient;
    for (std::size_t ii = specs_.size(); ii-- > 0;) {
        const LayerSpec& s = specs_[ii];
        const Shape3& in_sh = shapes_[ii];
        const Shape3& out_sh = shapes_[ii + 1];
        const std::vector<double>& x = acts_[ii];
        std::vector<double> gin(in_sh.count(), 0.0);
        switch (s.kind) {
            case LayerKind::Conv:
                conv_backward(s, in_sh, out_sh, x.data(), w_[ii], g.data(),
                              grads.weights[ii], grads.biases[ii], gin.data());
                break;
            case LayerKind::Subsample: {
                const int p = s.pool;
                const double inv = 1.0 / (p * p);
                for (int c = 0; c < out_sh.c; ++c)
                    for (int oy = 0; oy < out_sh.h; ++oy)
                        for (int ox = 0; ox < out_sh.w; ++ox) {
                            const double gv =
                                g[(c * out_sh.h + oy) * out_sh.w + ox] * inv;
                            for (int dy = 0; dy < p; ++dy)
                                for (int dx = 0; dx < p; ++dx)
                                    gin[(c * in_sh.h + oy * p + dy) * in_sh.w + ox * p +
                                        dx] = gv;
                        }
                break;
            }
            case LayerKind::Dense: {
                for (int o = 0; o < s.out_dim; ++o) {
                    const double go = g[o];
                    grads.biases[ii].v[o] += go;
                    const double* wr =
                        w_[ii].v.data() + static_cast<std::size_t>(o) * s.in_dim;
                    double* gwr =
                        grads.weights[ii].v.data() + static_cast<std::size_t>(o) * s.in_dim;
                    for (int j = 0; j < s.in_dim; ++j) {
                        gwr[j] += go * x[j];
                        gin[j] += wr[j] * go;
                    }
                }
                break;
            }
            case LayerKind::Relu:
                for (std::size_t j = 0; j < x.size(); ++j)
                    gin[j] = x[j] > 0.0 ? g[j] : 0.0;
                break;
            case LayerKind::Relu6:
                // derivative defined as 0 at both clamp boundaries
                for (std::size_t j = 0; j < x.size(); ++j)
                    gin[j] = (x[j] > 0.0 && x[j] < 6.0) ? g[j] : 0.0;
                break;
        }
        g = std::move(gin);
    }
    for (std::size_t j = 0; j < g.size(); ++j) grads.input[j] += g[j];
}

std::size_t NetworkModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < specs_.size(); ++i) n += w_[i].size() + b_[i].size();
    return n;
}

}  // namespace dacnn
