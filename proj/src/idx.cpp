#include "dacnn/idx.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace dacnn {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t off) {
    if (off + 4 > bytes.size()) throw Truncated("IDX header shorter than expected");
    return (static_cast<std::uint32_t>(bytes[off]) << 24) |
           (static_cast<std::uint32_t>(bytes[off + 1]) << 16) |
           (static_cast<std::uint32_t>(bytes[off + 2]) << 8) |
           static_cast<std::uint32_t>(bytes[off + 3]);
}

void push_be32(std::vector<std::uint8_t>& out, std::uint32_t x) {
    out.push_back(static_cast<std::uint8_t>(x >> 24));
    out.push_back(static_cast<std::uint8_t>(x >> 16));
    out.push_back(static_cast<std::uint8_t>(x >> 8));
    out.push_back(static_cast<std::uint8_t>(x));
}

}  // namespace

std::vector<PixelGrid> parse_idx_images(std::span<const std::uint8_t> bytes) {
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != kIdxImageMagic)
        throw BadMagic("IDX image magic is " + std::to_string(magic) + ", expected 2051");
    const std::uint32_t count = read_be32(bytes, 4);
    const std::uint32_t rows = read_be32(bytes, 8);
    const std::uint32_t cols = read_be32(bytes, 12);
    if (rows != kImageRows || cols != kImageCols)
        throw DimensionMismatch("IDX images are " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", expected 28x28");
    const std::size_t need = 16 + static_cast<std::size_t>(count) * rows * cols;
    if (bytes.size() < need)
        throw Truncated("IDX image payload holds fewer than " + std::to_string(count) +
                        " images");

    std::vector<PixelGrid> images(count);
    const std::uint8_t* p = bytes.data() + 16;
    for (std::uint32_t i = 0; i < count; ++i, p += kImagePixels)
        std::memcpy(images[i].data(), p, kImagePixels);
    return images;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic != kIdxLabelMagic)
        throw BadMagic("IDX label magic is " + std::to_string(magic) + ", expected 2049");
    const std::uint32_t count = read_be32(bytes, 4);
    if (bytes.size() < 8 + static_cast<std::size_t>(count))
        throw Truncated("IDX label payload holds fewer than " + std::to_string(count) +
                        " labels");

    std::vector<std::uint8_t> labels(bytes.begin() + 8, bytes.begin() + 8 + count);
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] > 9)
            throw LabelOutOfRange("label " + std::to_string(labels[i]) + " at index " +
                                  std::to_string(i));
    return labels;
}

std::vector<std::uint8_t> serialize_idx_images(const std::vector<PixelGrid>& images) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + images.size() * kImagePixels);
    push_be32(out, kIdxImageMagic);
    push_be32(out, static_cast<std::uint32_t>(images.size()));
    push_be32(out, kImageRows);
    push_be32(out, kImageCols);
    for (const auto& img : images) out.insert(out.end(), img.begin(), img.end());
    return out;
}

std::vector<std::uint8_t> serialize_idx_labels(const std::vector<std::uint8_t>& labels) {
    std::vector<std::uint8_t> out;
    out.reserve(8 + labels.size());
    push_be32(out, kIdxLabelMagic);
    push_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path);
}

BaseDataset load_dataset(const std::string& images_path, const std::string& labels_path) {
    const auto images = parse_idx_images(read_file_bytes(images_path));
    const auto labels = parse_idx_labels(read_file_bytes(labels_path));
    if (images.size() != labels.size())
        throw CountMismatch(images_path + " holds " + std::to_string(images.size()) +
                            " images but " + labels_path + " holds " +
                            std::to_string(labels.size()) + " labels");

    BaseDataset ds;
    ds.samples.resize(images.size());
    for (std::size_t i = 0; i < images.size(); ++i)
        ds.samples[i] = LabeledImage{images[i], labels[i]};
    ds.source = images_path + ";" + labels_path;
    return ds;
}

}  // namespace dacnn
