#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "monotone/dataset.hpp"

namespace monotone {

/// IDX parse failure. `kind()` distinguishes the failure classes.
class IdxError : public std::runtime_error {
 public:
  enum class Kind { io, bad_magic, truncated, count_mismatch };
  IdxError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Images become rows of pixel/255 in [0, 1]; labels 0-9, class_count 10.
[[nodiscard]] LabeledDataset load_mnist(const std::filesystem::path& images_path,
                                        const std::filesystem::path& labels_path);

}  // namespace monotone
