#include <doctest.h>

#include <cmath>
#include <random>

#include "dacnn/network.hpp"
#include "dacnn/trainer.hpp"

using namespace dacnn;

namespace {

NetworkModel tiny_model() {
    std::vector<LayerSpec> specs = {
        LayerSpec::conv(1, 2, 3), LayerSpec::relu(),       LayerSpec::subsample(2),
        LayerSpec::dense(8, 4),   LayerSpec::relu6(),
    };
    return NetworkModel(std::move(specs), Shape3{1, 6, 6}, 4);
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = uni(rng);
    return v;
}

double model_loss(NetworkModel& m, const std::vector<double>& input, int label) {
    return cross_entropy(softmax(m.forward(input)), label);
}

}  // namespace

TEST_CASE("relu and relu6 basics") {
    CHECK(relu(-1.0) == 0.0);
    CHECK(relu(0.0) == 0.0);
    CHECK(relu(3.5) == 3.5);
    CHECK(relu6(7.0) == 6.0);
    CHECK(relu6(-1.0) == 0.0);
    CHECK(relu6(2.5) == 2.5);
}

TEST_CASE("softmax: uniform logits give uniform probabilities") {
    const auto p = softmax(std::vector<double>(10, 0.0));
    for (double x : p) CHECK(x == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("softmax on (6, 0, ..., 0)") {
    std::vector<double> z(10, 0.0);
    z[0] = 6.0;
    const auto p = softmax(z);
    CHECK(p[0] == doctest::Approx(std::exp(6.0) / (std::exp(6.0) + 9.0)).epsilon(1e-12));
    CHECK(p[0] == doctest::Approx(0.97818).epsilon(1e-4));
}

TEST_CASE("softmax sums to 1 and is shift invariant") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        const auto z = random_vec(10, rng, 6.0);
        const auto p = softmax(z);
        double sum = 0.0;
        for (double x : p) sum += x;
        CHECK(std::abs(sum - 1.0) < 1e-12);

        auto zs = z;
        for (double& x : zs) x += 3.7;
        const auto ps = softmax(zs);
        for (std::size_t k = 0; k < p.size(); ++k)
            CHECK(std::abs(p[k] - ps[k]) < 1e-14);
    }
}

TEST_CASE("lenet_like: output dimension and pinned parameter count") {
    NetworkModel m = NetworkModel::lenet_like(10);
    // conv1 6*25+6 + conv2 12*6*25+12 + dense 192*64+64 + dense 64*10+10
    CHECK(m.parameter_count() == 156u + 1812u + 12352u + 650u);
    CHECK(m.parameter_count() == 14970u);

    m.init_parameters(1);
    std::vector<double> input(784, 0.3);
    const auto z = m.forward(input);
    CHECK(z.size() == 10);
}

TEST_CASE("forward: zero input through zero parameters gives zero logits") {
    NetworkModel m = NetworkModel::lenet_like(10);
    const auto z = m.forward(std::vector<double>(784, 0.0));
    for (double x : z) CHECK(x == 0.0);
}

TEST_CASE("forward: logits always land in [0, 6]") {
    NetworkModel m = NetworkModel::lenet_like(10);
    m.init_parameters(3);
    // inflate parameters so the clamp actually engages
    for (auto& w : m.weights())
        for (double& x : w.v) x *= 50.0;
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 5; ++rep) {
        const auto input = random_vec(784, rng);
        for (double z : m.forward(input)) {
            CHECK(z >= 0.0);
            CHECK(z <= 6.0);
        }
    }
}

TEST_CASE("forward rejects a wrong input shape") {
    NetworkModel m = tiny_model();
    CHECK_THROWS_AS(m.forward(std::vector<double>(10, 0.0)), ShapeMismatch);
}

TEST_CASE("model construction validates the layer chain") {
    CHECK_THROWS_AS(NetworkModel({LayerSpec::dense(10, 4), LayerSpec::relu6()},
                                 Shape3{1, 6, 6}, 4),
                    ShapeMismatch);
    CHECK_THROWS_AS(NetworkModel({LayerSpec::dense(36, 4), LayerSpec::relu()},
                                 Shape3{1, 6, 6}, 4),
                    ShapeMismatch);  // final layer must be ReLU6
}

TEST_CASE("tiny model forward matches an independent scalar-loop computation") {
    NetworkModel m = tiny_model();
    std::mt19937_64 rng(7);
    for (auto& w : m.weights())
        for (double& x : w.v) x = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    for (auto& b : m.biases())
        for (double& x : b.v) x = std::uniform_real_distribution<double>(-0.1, 0.1)(rng);

    const auto input = random_vec(36, rng);
    const auto z = m.forward(input);

    // independent recomputation
    const auto& wc = m.weights()[0].v;
    const auto& bc = m.biases()[0].v;
    double conv[2][4][4];
    for (int o = 0; o < 2; ++o)
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) {
                double acc = bc[o];
                for (int ky = 0; ky < 3; ++ky)
                    for (int kx = 0; kx < 3; ++kx)
                        acc += input[(y + ky) * 6 + (x + kx)] * wc[(o * 9) + ky * 3 + kx];
                conv[o][y][x] = acc > 0.0 ? acc : 0.0;  // fused ReLU
            }
    double pooled[8];
    for (int o = 0; o < 2; ++o)
        for (int y = 0; y < 2; ++y)
            for (int x = 0; x < 2; ++x)
                pooled[o * 4 + y * 2 + x] =
                    (conv[o][2 * y][2 * x] + conv[o][2 * y][2 * x + 1] +
                     conv[o][2 * y + 1][2 * x] + conv[o][2 * y + 1][2 * x + 1]) /
                    4.0;
    const auto& wd = m.weights()[3].v;
    const auto& bd = m.biases()[3].v;
    for (int o = 0; o < 4; ++o) {
        double acc = bd[o];
        for (int j = 0; j < 8; ++j) acc += wd[o * 8 + j] * pooled[j];
        acc = std::min(6.0, std::max(0.0, acc));
        CHECK(z[o] == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("backward requires a prior forward") {
    NetworkModel m = tiny_model();
    CHECK_THROWS_AS(m.backward(std::vector<double>(4, 0.0)), NoForwardState);
}

TEST_CASE("backward: zero upstream gradient yields zero parameter gradients") {
    NetworkModel m = tiny_model();
    m.init_parameters(2);
    std::mt19937_64 rng(8);
    m.forward(random_vec(36, rng));
    const Gradients g = m.backward(std::vector<double>(4, 0.0));
    for (const auto& t : g.weights)
        for (double x : t.v) CHECK(x == 0.0);
    for (const auto& t : g.biases)
        for (double x : t.v) CHECK(x == 0.0);
}

TEST_CASE("backward matches central finite differences") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 5; ++rep) {
        NetworkModel m = tiny_model();
        m.init_parameters(100 + rep);
        const auto input = random_vec(36, rng);
        const int label = static_cast<int>(rng() % 4);

        const auto z = m.forward(input);
        const auto p = softmax(z);
        std::vector<double> gz(4);
        for (int k = 0; k < 4; ++k) gz[k] = p[k] - (k == label ? 1.0 : 0.0);
        const Gradients g = m.backward(gz);

        const double eps = 1e-4;
        for (std::size_t li = 0; li < m.specs().size(); ++li) {
            for (auto [tensor, grad] :
                 {std::pair{&m.weights()[li], &g.weights[li]},
                  std::pair{&m.biases()[li], &g.biases[li]}}) {
                for (std::size_t j = 0; j < tensor->size(); ++j) {
                    const double saved = tensor->v[j];
                    tensor->v[j] = saved + eps;
                    const double lp = model_loss(m, input, label);
                    tensor->v[j] = saved - eps;
                    const double lm = model_loss(m, input, label);
                    tensor->v[j] = saved;
                    const double fd = (lp - lm) / (2.0 * eps);
                    const double an = grad->v[j];
                    CHECK(std::abs(an - fd) <=
                          1e-3 * std::max({std::abs(an), std::abs(fd)}) + 1e-7);
                }
            }
        }
    }
}

TEST_CASE("no gradient flows through a logit clamped at 6") {
    NetworkModel m = tiny_model();
    m.init_parameters(4);
    // saturate output 0 well past the clamp
    m.biases()[3].v[0] = 50.0;
    std::mt19937_64 rng(10);
    const auto input = random_vec(36, rng);
    const auto z = m.forward(input);
    REQUIRE(z[0] == 6.0);

    std::vector<double> upstream(4, 0.0);
    upstream[0] = 1.0;  // only the clamped logit carries gradient
    const Gradients g = m.backward(upstream);
    for (const auto& t : g.weights)
        for (double x : t.v) CHECK(x == 0.0);
    for (double x : g.input) CHECK(x == 0.0);
}

TEST_CASE("init_parameters is reproducible and zero-bias") {
    NetworkModel a = NetworkModel::lenet_like(10);
    NetworkModel b = NetworkModel::lenet_like(10);
    a.init_parameters(77);
    b.init_parameters(77);
    for (std::size_t i = 0; i < a.specs().size(); ++i) {
        CHECK(a.weights()[i].v == b.weights()[i].v);
        for (double x : a.biases()[i].v) CHECK(x == 0.0);
    }
}

TEST_CASE("init_parameters: empirical spread matches the uniform moment") {
    NetworkModel m({LayerSpec::dense(100, 100), LayerSpec::relu6()}, Shape3{100, 1, 1}, 100);
    m.init_parameters(123);
    const double s = std::sqrt(6.0 / 200.0);
    double sq = 0.0;
    const auto& w = m.weights()[0].v;
    for (double x : w) sq += x * x;
    const double stddev = std::sqrt(sq / static_cast<double>(w.size()));
    CHECK(stddev == doctest::Approx(s / std::sqrt(3.0)).epsilon(0.1));
}

TEST_CASE("forward and backward are deterministic") {
    NetworkModel m = tiny_model();
    m.init_parameters(5);
    std::mt19937_64 rng(11);
    const auto input = random_vec(36, rng);
    const auto z1 = m.forward(input);
    const Gradients g1 = m.backward({0.1, -0.2, 0.3, -0.4});
    const auto z2 = m.forward(input);
    const Gradients g2 = m.backward({0.1, -0.2, 0.3, -0.4});
    CHECK(z1 == z2);
    for (std::size_t i = 0; i < g1.weights.size(); ++i)
        CHECK(g1.weights[i].v == g2.weights[i].v);
}

TEST_CASE("layer spec lines round-trip") {
    for (const LayerSpec& s :
         {LayerSpec::conv(1, 6, 5), LayerSpec::subsample(2), LayerSpec::dense(192, 64),
          LayerSpec::relu(), LayerSpec::relu6()}) {
        CHECK(LayerSpec::from_line(s.to_line()) == s);
    }
}
