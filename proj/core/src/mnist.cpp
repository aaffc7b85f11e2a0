#include "monotone/mnist.hpp"

#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

namespace monotone {

namespace {

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IdxError(IdxError::Kind::io, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (bytes.size() < offset + 4) {
    throw IdxError(IdxError::Kind::truncated, "truncated file: " + path.string());
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

LabeledDataset load_mnist(const std::filesystem::path& images_path,
                          const std::filesystem::path& labels_path) {
  const auto images = read_all(images_path);
  const auto labels = read_all(labels_path);

  if (read_be32(images, 0, images_path) != kIdxImageMagic) {
    throw IdxError(IdxError::Kind::bad_magic, "bad magic number in " + images_path.string());
  }
  if (read_be32(labels, 0, labels_path) != kIdxLabelMagic) {
    throw IdxError(IdxError::Kind::bad_magic, "bad magic number in " + labels_path.string());
  }
  const std::uint32_t image_count = read_be32(images, 4, images_path);
  const std::uint32_t rows = read_be32(images, 8, images_path);
  const std::uint32_t cols = read_be32(images, 12, images_path);
  const std::uint32_t label_count = read_be32(labels, 4, labels_path);
  if (image_count != label_count) {
    throw IdxError(IdxError::Kind::count_mismatch,
                   "image count " + std::to_string(image_count) + " != label count " +
                       std::to_string(label_count));
  }

  const std::size_t pixels = std::size_t{rows} * cols;
  constexpr std::size_t kImageHeader = 16;
  constexpr std::size_t kLabelHeader = 8;
  if (images.size() < kImageHeader + pixels * image_count) {
    throw IdxError(IdxError::Kind::truncated, "truncated file: " + images_path.string());
  }
  if (labels.size() < kLabelHeader + label_count) {
    throw IdxError(IdxError::Kind::truncated, "truncated file: " + labels_path.string());
  }

  Matrix x(static_cast<Eigen::Index>(image_count), static_cast<Eigen::Index>(pixels));
  Labels y(image_count);
  for (std::size_t i = 0; i < image_count; ++i) {
    const unsigned char* src = images.data() + kImageHeader + i * pixels;
    for (std::size_t j = 0; j < pixels; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = src[j] / 255.0;
    }
    const int label = labels[kLabelHeader + i];
    if (label > 9) {
      throw IdxError(IdxError::Kind::count_mismatch,
                     "label " + std::to_string(label) + " outside 0-9 in " + labels_path.string());
    }
    y[i] = label;
  }
  return LabeledDataset(std::move(x), std::move(y), 10);
}

}  // namespace monotone
