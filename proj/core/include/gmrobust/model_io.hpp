#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gmrobust/network.hpp"
#include "gmrobust/tensor.hpp"

namespace gmrobust {

inline constexpr int kModelFormatVersion = 1;

/// Parses a model document (see docs/model-format.md). Rejects instead of
/// repairing: ParseError for malformed JSON or missing/mistyped fields,
/// VersionError for unsupported versions, InvariantError for structural
/// violations.
Network load_model(std::string_view text);

/// Serializes a generator or classifier. Numbers use the shortest decimal
/// form that parses back to the same double. Composed networks are not
/// serializable (ConfigError).
std::string save_model(const Network& net);

Network load_model_file(const std::filesystem::path& path);
void save_model_file(const std::filesystem::path& path, const Network& net);

/// Tensor documents share the model format's number encoding; used for the
/// noise vectors written by the attacks.
std::string save_tensor(const Tensor& tensor, const Meta& meta = {});
Tensor load_tensor(std::string_view text);
Tensor load_tensor_file(const std::filesystem::path& path);
void save_tensor_file(const std::filesystem::path& path, const Tensor& tensor, const Meta& meta = {});

/// Shortest round-trip decimal representation of a finite double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

} // namespace gmrobust
