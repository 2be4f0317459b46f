// Small learnable datasets for training-loop tests: class k is a bright
// block at a class-specific location on a 28x28 canvas, plus noise. Easy to
// learn in a handful of epochs.
#pragma once

#include <random>

#include "dacnn/augment.hpp"

namespace fixtures {

inline dacnn::AugmentedDataset patch_dataset(int per_class, std::uint64_t seed,
                                             double q_lo = 0.5, double q_hi = 4.0) {
    dacnn::AugmentedDataset ds;
    ds.seed = seed;
    ds.scheme = dacnn::Scheme::Random;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> noise(0.0f, 0.15f);
    std::uniform_real_distribution<double> uq(q_lo, q_hi);
    std::uniform_int_distribution<int> jitter(-1, 1);

    for (int i = 0; i < per_class; ++i) {
        for (int label = 0; label < 10; ++label) {
            dacnn::DistortedSample s;
            s.label = static_cast<std::uint8_t>(label);
            s.q = uq(rng);
            s.pixels.assign(dacnn::kImagePixels, 0.0f);
            for (auto& p : s.pixels) p = noise(rng);
            const int row0 = 2 + (label / 4) * 8 + jitter(rng);
            const int col0 = 2 + (label % 4) * 6 + jitter(rng);
            for (int y = row0; y < row0 + 6; ++y)
                for (int x = col0; x < col0 + 5; ++x)
                    s.pixels[y * dacnn::kImageCols + x] = 1.0f;
            ds.samples.push_back(std::move(s));
        }
    }
    return ds;
}

}  // namespace fixtures
