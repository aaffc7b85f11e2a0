#pragma once

// Experiment configuration as a JSON document: named presets, file loading,
// dotted `key=value` overrides, and serialization back to text.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "monotone/harness.hpp"

namespace monotone {

/// Environment variable holding a directory with the four MNIST IDX files.
inline constexpr const char* kMnistDirEnv = "MONOTONE_MNIST_DIR";

/// first-experiment, table1-peaking, table1-dipping, table1-mnist.
[[nodiscard]] std::vector<std::string> preset_names();
/// Throws ConfigError("preset", ...) for unknown names.
[[nodiscard]] ExperimentConfig preset(const std::string& name);

/// Parse a config document. A top-level "preset" key supplies the defaults the
/// rest of the document overrides. Each override is "dotted.key=value" where
/// value is JSON, or a bare string. Unknown keys and wrong types are rejected
/// with the key named. The result is validated.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text,
                                            const std::vector<std::string>& overrides = {});
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path,
                                           const std::vector<std::string>& overrides = {});

/// Pretty-printed JSON that parse_config reads back to an equal config.
[[nodiscard]] std::string config_to_json(const ExperimentConfig& config);

/// Generator section on its own (the `gen-data` spec file).
[[nodiscard]] GeneratorSpec parse_generator_spec(std::string_view text);
[[nodiscard]] GeneratorSpec load_generator_spec(const std::filesystem::path& path);

/// Comma-separated numbers, e.g. "0.01,0.05,0.5". Throws ConfigError(key, ...).
[[nodiscard]] std::vector<double> parse_number_list(const std::string& key,
                                                    const std::string& text);

/// Read a whole file; throws std::runtime_error naming the path.
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace monotone
