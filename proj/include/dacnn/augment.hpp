#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dacnn/idx.hpp"

namespace dacnn {

// Odd symmetric 1-D Gaussian kernel, truncated at radius ceil(3*sigma) and
// renormalized; the same kernel runs horizontally and vertically.
struct BlurKernel {
    double sigma = 0.0;
    int radius = 0;
    std::vector<double> weights;  // size 2*radius + 1, sums to 1
};

BlurKernel gaussian_kernel(double sigma);

// Separable blur of a 28x28 unit-interval image. Out-of-bounds taps read 0;
// output is clamped to [0, 1].
std::vector<float> blur(const std::vector<float>& pixels, double q);

enum class Scheme { Grid, Random };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct DistortedSample {
    std::vector<float> pixels;  // 784 unit-interval values
    std::uint8_t label = 0;
    double q = 0.0;
};

struct AugmentedDataset {
    std::vector<DistortedSample> samples;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::Grid;
};

// Emits `replicas` distorted copies per base image. Under Grid the q values
// are the fixed lattice q_lo + j*(q_hi - q_lo)/(replicas - 1); under Random
// they are i.i.d. uniform draws from the seeded generator. Sample order is
// base order x replica index.
AugmentedDataset expand_dataset(const BaseDataset& base, int replicas = 10,
                                double q_lo = 0.0, double q_hi = 4.0,
                                Scheme scheme = Scheme::Grid, std::uint64_t seed = 1);

// Keeps samples with q >= q_min, order preserved. Throws EmptyResult when
// nothing survives.
AugmentedDataset filter_min_q(const AugmentedDataset& ds, double q_min = 0.5);

// Flat binary dataset file: one text header line, then per sample a label
// byte, q as little-endian float64, and 784 little-endian float32 pixels.
void save_augmented(const AugmentedDataset& ds, const std::string& path);
AugmentedDataset load_augmented(const std::string& path);

}  // namespace dacnn
