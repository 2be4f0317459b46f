#include "dacnn/augment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

static_assert(std::endian::native == std::endian::little,
              "dataset file layout assumes a little-endian host");

namespace dacnn {

BlurKernel gaussian_kernel(double sigma) {
    if (sigma < 0.0) throw NegativeSigma("sigma must be nonnegative, got " + std::to_string(sigma));

    BlurKernel k;
    k.sigma = sigma;
    k.radius = static_cast<int>(std::ceil(3.0 * sigma));
    if (k.radius <= 0) {
        k.radius = 0;
        k.weights = {1.0};
        return k;
    }
    k.weights.resize(2 * k.radius + 1);
    double sum = 0.0;
    for (int t = -k.radius; t <= k.radius; ++t) {
        const double w = std::exp(-static_cast<double>(t) * t / (2.0 * sigma * sigma));
        k.weights[t + k.radius] = w;
        sum += w;
    }
    for (double& w : k.weights) w /= sum;
    return k;
}

std::vector<float> blur(const std::vector<float>& pixels, double q) {
    if (pixels.size() != static_cast<std::size_t>(kImagePixels))
        throw ShapeMismatch("blur expects a 28x28 image");
    const BlurKernel k = gaussian_kernel(q);
    if (k.radius == 0) return pixels;

    const int R = kImageRows, C = kImageCols, r = k.radius;
    std::vector<double> tmp(kImagePixels, 0.0);
    // Horizontal pass, zero padding outside the image.
    for (int y = 0; y < R; ++y) {
        for (int x = 0; x < C; ++x) {
            double acc = 0.0;
            const int t0 = std::max(-r, -x), t1 = std::min(r, C - 1 - x);
            for (int t = t0; t <= t1; ++t)
                acc += k.weights[t + r] * pixels[y * C + x + t];
            tmp[y * C + x] = acc;
        }
    }
    // Vertical pass.
    std::vector<float> out(kImagePixels);
    for (int y = 0; y < R; ++y) {
        const int t0 = std::max(-r, -y), t1 = std::min(r, R - 1 - y);
        for (int x = 0; x < C; ++x) {
            double acc = 0.0;
            for (int t = t0; t <= t1; ++t)
                acc += k.weights[t + r] * tmp[(y + t) * C + x];
            out[y * C + x] = static_cast<float>(std::clamp(acc, 0.0, 1.0));
        }
    }
    return out;
}

std::string scheme_name(Scheme s) { return s == Scheme::Grid ? "grid" : "random"; }

Scheme scheme_from_name(const std::string& name) {
    if (name == "grid") return Scheme::Grid;
    if (name == "random") return Scheme::Random;
    throw ConfigError("unknown scheme '" + name + "' (expected grid or random)");
}

AugmentedDataset expand_dataset(const BaseDataset& base, int replicas, double q_lo,
                                double q_hi, Scheme scheme, std::uint64_t seed) {
    if (replicas < 1) throw ConfigError("replicas must be >= 1");
    if (!(q_lo < q_hi) && replicas > 1) throw ConfigError("q_lo must be below q_hi");

    AugmentedDataset out;
    out.seed = seed;
    out.scheme = scheme;
    out.samples.reserve(base.samples.size() * static_cast<std::size_t>(replicas));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(q_lo, q_hi);

    std::vector<float> unit(kImagePixels);
    for (const auto& img : base.samples) {
        for (int p = 0; p < kImagePixels; ++p)
            unit[p] = static_cast<float>(img.pixels[p]) / 255.0f;
        for (int j = 0; j < replicas; ++j) {
            double q;
            if (scheme == Scheme::Grid)
                q = replicas == 1 ? q_lo : q_lo + j * (q_hi - q_lo) / (replicas - 1);
            else
                q = uni(rng);
            out.samples.push_back(DistortedSample{blur(unit, q), img.label, q});
        }
    }
    return out;
}

AugmentedDataset filter_min_q(const AugmentedDataset& ds, double q_min) {
    AugmentedDataset out;
    out.seed = ds.seed;
    out.scheme = ds.scheme;
    for (const auto& s : ds.samples)
        if (s.q >= q_min) out.samples.push_back(s);
    if (out.samples.empty())
        throw EmptyResult("no samples with q >= " + std::to_string(q_min));
    return out;
}

void save_augmented(const AugmentedDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "DADS v1 count=" << ds.samples.size() << " scheme=" << scheme_name(ds.scheme)
        << " seed=" << ds.seed << "\n";
    for (const auto& s : ds.samples) {
        out.put(static_cast<char>(s.label));
        out.write(reinterpret_cast<const char*>(&s.q), sizeof(double));
        out.write(reinterpret_cast<const char*>(s.pixels.data()),
                  kImagePixels * sizeof(float));
    }
    if (!out) throw IoError("short write to " + path);
}

AugmentedDataset load_augmented(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw Truncated("missing dataset header in " + path);

    std::istringstream hs(header);
    std::string magic, version, kv;
    hs >> magic >> version;
    if (magic != "DADS") throw BadMagic("bad dataset magic in " + path);
    if (version != "v1") throw VersionMismatch("unsupported dataset version " + version);

    std::size_t count = 0;
    AugmentedDataset ds;
    while (hs >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw BadMagic("malformed dataset header field " + kv);
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "count")
            count = std::stoull(val);
        else if (key == "scheme")
            ds.scheme = scheme_from_name(val);
        else if (key == "seed")
            ds.seed = std::stoull(val);
        else
            throw BadMagic("unknown dataset header field " + key);
    }

    ds.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        DistortedSample& s = ds.samples[i];
        int c = in.get();
        if (c == EOF) throw Truncated("dataset payload ends at sample " + std::to_string(i));
        s.label = static_cast<std::uint8_t>(c);
        s.pixels.resize(kImagePixels);
        in.read(reinterpret_cast<char*>(&s.q), sizeof(double));
        in.read(reinterpret_cast<char*>(s.pixels.data()), kImagePixels * sizeof(float));
        if (!in) throw Truncated("dataset payload ends at sample " + std::to_string(i));
        if (s.label > 9) throw LabelOutOfRange("label " + std::to_string(s.label));
    }
    return ds;
}

}  // namespace dacnn
