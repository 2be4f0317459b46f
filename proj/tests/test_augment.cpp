#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "dacnn/augment.hpp"
#include "oracles.hpp"

using namespace dacnn;

namespace {

std::vector<float> random_image(std::mt19937& rng) {
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    std::vector<float> img(kImagePixels);
    for (auto& p : img) p = uni(rng);
    return img;
}

BaseDataset tiny_base(int n) {
    BaseDataset ds;
    std::mt19937 rng(11);
    for (int i = 0; i < n; ++i) {
        LabeledImage img;
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
        img.label = static_cast<std::uint8_t>(i % 10);
        ds.samples.push_back(img);
    }
    return ds;
}

}  // namespace

TEST_CASE("gaussian_kernel: sigma 0 is the identity") {
    const BlurKernel k = gaussian_kernel(0.0);
    CHECK(k.radius == 0);
    REQUIRE(k.weights.size() == 1);
    CHECK(k.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("gaussian_kernel weights sum to 1") {
    for (double sigma : {0.1, 0.5, 1.0, 2.3, 4.0}) {
        const BlurKernel k = gaussian_kernel(sigma);
        const double sum = std::accumulate(k.weights.begin(), k.weights.end(), 0.0);
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("gaussian_kernel sigma 1 matches high-precision evaluation") {
    const BlurKernel k = gaussian_kernel(1.0);
    REQUIRE(k.radius == 3);
    long double sum = 0.0L;
    for (int t = -3; t <= 3; ++t) sum += std::exp(-static_cast<long double>(t) * t / 2.0L);
    for (int t = -3; t <= 3; ++t) {
        const long double expect = std::exp(-static_cast<long double>(t) * t / 2.0L) / sum;
        CHECK(std::abs(k.weights[t + 3] - static_cast<double>(expect)) < 1e-15);
    }
}

TEST_CASE("gaussian_kernel is symmetric and unimodal") {
    for (double sigma : {0.7, 1.5, 3.9}) {
        const BlurKernel k = gaussian_kernel(sigma);
        for (int t = 0; t <= k.radius; ++t) {
            CHECK(k.weights[k.radius - t] == doctest::Approx(k.weights[k.radius + t]));
            if (t > 0) CHECK(k.weights[k.radius + t] <= k.weights[k.radius + t - 1]);
        }
    }
}

TEST_CASE("gaussian_kernel rejects negative sigma") {
    CHECK_THROWS_AS(gaussian_kernel(-0.1), NegativeSigma);
}

TEST_CASE("blur: q = 0 returns the input") {
    std::mt19937 rng(1);
    const auto img = random_image(rng);
    CHECK(blur(img, 0.0) == img);
}

TEST_CASE("blur: zero image stays zero") {
    const std::vector<float> zero(kImagePixels, 0.0f);
    const auto out = blur(zero, 2.0);
    for (float p : out) CHECK(p == 0.0f);
}

TEST_CASE("blur matches the direct 2-D convolution oracle") {
    std::mt19937 rng(2);
    for (int rep = 0; rep < 5; ++rep) {
        const auto img = random_image(rng);
        for (double q : {0.5, 1.0, 2.0, 4.0}) {
            const auto sep = blur(img, q);
            const auto direct = oracles::blur2d(img, kImageRows, kImageCols, q);
            double maxdiff = 0.0;
            for (int i = 0; i < kImagePixels; ++i)
                maxdiff = std::max(maxdiff, std::abs(sep[i] - direct[i]));
            CHECK(maxdiff < 1e-6);
        }
    }
}

TEST_CASE("blur conserves intensity away from the border") {
    // Support in the central 8x8 block; radius 3 at q = 1 stays inside.
    std::vector<float> img(kImagePixels, 0.0f);
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> uni(0.0f, 1.0f);
    for (int y = 10; y < 18; ++y)
        for (int x = 10; x < 18; ++x) img[y * kImageCols + x] = uni(rng);

    const double before = std::accumulate(img.begin(), img.end(), 0.0);
    const auto out = blur(img, 1.0);
    const double after = std::accumulate(out.begin(), out.end(), 0.0);
    CHECK(std::abs(before - after) < 1e-6);
}

TEST_CASE("blur: max pixel is non-increasing in q") {
    std::mt19937 rng(4);
    const auto img = random_image(rng);
    double prev = *std::max_element(img.begin(), img.end());
    for (double q : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
        const auto out = blur(img, q);
        const double mx = *std::max_element(out.begin(), out.end());
        CHECK(mx <= prev + 1e-12);
        prev = mx;
    }
}

TEST_CASE("expand_dataset emits replicas per image on the grid") {
    const BaseDataset base = tiny_base(7);
    const AugmentedDataset aug = expand_dataset(base, 10, 0.0, 4.0, Scheme::Grid, 1);
    REQUIRE(aug.samples.size() == 70);
    for (int j = 0; j < 10; ++j)
        CHECK(aug.samples[j].q == doctest::Approx(j * 4.0 / 9.0));
    // order is base order x replica index
    CHECK(aug.samples[10].label == base.samples[1].label);
    // pixels are normalized to [0, 1]
    for (const auto& s : aug.samples)
        for (float p : s.pixels) {
            CHECK(p >= 0.0f);
            CHECK(p <= 1.0f);
        }
}

TEST_CASE("expand_dataset: replicas 1 produces a single copy at q_lo") {
    const AugmentedDataset aug = expand_dataset(tiny_base(3), 1, 0.0, 4.0, Scheme::Grid, 1);
    REQUIRE(aug.samples.size() == 3);
    for (const auto& s : aug.samples) CHECK(s.q == 0.0);
}

TEST_CASE("expand_dataset random scheme is reproducible from the seed") {
    const BaseDataset base = tiny_base(4);
    const AugmentedDataset a = expand_dataset(base, 5, 0.0, 4.0, Scheme::Random, 42);
    const AugmentedDataset b = expand_dataset(base, 5, 0.0, 4.0, Scheme::Random, 42);
    const AugmentedDataset c = expand_dataset(base, 5, 0.0, 4.0, Scheme::Random, 43);
    REQUIRE(a.samples.size() == b.samples.size());
    bool same = true, diff = false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        same = same && a.samples[i].q == b.samples[i].q &&
               a.samples[i].pixels == b.samples[i].pixels;
        diff = diff || a.samples[i].q != c.samples[i].q;
    }
    CHECK(same);
    CHECK(diff);
    for (const auto& s : a.samples) {
        CHECK(s.q >= 0.0);
        CHECK(s.q <= 4.0);
    }
}

TEST_CASE("filter_min_q drops the two sub-0.5 grid replicas") {
    const AugmentedDataset aug = expand_dataset(tiny_base(6), 10, 0.0, 4.0, Scheme::Grid, 1);
    const AugmentedDataset kept = filter_min_q(aug, 0.5);
    CHECK(kept.samples.size() == 6 * 8);  // grid points 0 and 4/9 fall below 0.5
    for (const auto& s : kept.samples) CHECK(s.q >= 0.5);
}

TEST_CASE("filter_min_q: q_min 0 is the identity") {
    const AugmentedDataset aug = expand_dataset(tiny_base(2), 10, 0.0, 4.0, Scheme::Grid, 1);
    CHECK(filter_min_q(aug, 0.0).samples.size() == aug.samples.size());
}

TEST_CASE("filter_min_q: empty survivor set is an error") {
    const AugmentedDataset aug = expand_dataset(tiny_base(2), 10, 0.0, 4.0, Scheme::Grid, 1);
    CHECK_THROWS_AS(filter_min_q(aug, 5.0), EmptyResult);
}

TEST_CASE("augmented dataset file round-trips") {
    const AugmentedDataset aug = expand_dataset(tiny_base(3), 4, 0.0, 4.0, Scheme::Random, 9);
    const auto path =
        (std::filesystem::temp_directory_path() / "aug_roundtrip.ds").string();
    save_augmented(aug, path);
    const AugmentedDataset back = load_augmented(path);
    REQUIRE(back.samples.size() == aug.samples.size());
    CHECK(back.seed == aug.seed);
    CHECK(back.scheme == aug.scheme);
    for (std::size_t i = 0; i < aug.samples.size(); ++i) {
        CHECK(back.samples[i].label == aug.samples[i].label);
        CHECK(back.samples[i].q == aug.samples[i].q);
        CHECK(back.samples[i].pixels == aug.samples[i].pixels);
    }
}
