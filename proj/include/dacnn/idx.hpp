#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dacnn/error.hpp"

namespace dacnn {

inline constexpr int kImageRows = 28;
inline constexpr int kImageCols = 28;
inline constexpr int kImagePixels = kImageRows * kImageCols;
inline constexpr int kNumClasses = 10;

inline constexpr std::uint32_t kIdxImageMagic = 2051;
inline constexpr std::uint32_t kIdxLabelMagic = 2049;

using PixelGrid = std::array<std::uint8_t, kImagePixels>;

struct LabeledImage {
    PixelGrid pixels;
    std::uint8_t label;  // 0..9
};

struct BaseDataset {
    std::vector<LabeledImage> samples;
    std::string source;
};

// IDX parsing. All header integers are big-endian 32-bit unsigned.
std::vector<PixelGrid> parse_idx_images(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes);

// Inverse of the parsers, used for round-trip checks and fixtures.
std::vector<std::uint8_t> serialize_idx_images(const std::vector<PixelGrid>& images);
std::vector<std::uint8_t> serialize_idx_labels(const std::vector<std::uint8_t>& labels);

// Pairs image i with label i; throws CountMismatch when the files disagree.
BaseDataset load_dataset(const std::string& images_path, const std::string& labels_path);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace dacnn
