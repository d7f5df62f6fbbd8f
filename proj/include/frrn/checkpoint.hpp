#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>

#include "frrn/adam.hpp"

namespace frrn {
inline namespace FRRN_ABI_NAMESPACE {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// On-disk layout:
///   "FRRN" | u32 version | u64 manifest bytes | manifest JSON | payload
/// The manifest holds the config echo and, per tensor, its name, shape and
/// byte offset into the payload. The payload is little-endian float32 in
/// manifest order.
struct Checkpoint {
  nlohmann::json config;
  ParameterSet tensors;
};

/// Writes to a temporary sibling file, then renames it over `path`.
/// Tensor names must be unique.
void save_checkpoint(const std::filesystem::path& path, const ParameterSet& tensors,
                     const nlohmann::json& config);

/// Reads and validates framing; throws DataError on a bad magic, version
/// mismatch, malformed manifest or truncated payload.
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint tensors into `targets` by name. Every target must be
/// present with the same shape and the checkpoint may not hold unknown
/// names; all problems are listed in one DataError.
void load_into(const Checkpoint& checkpoint, const ParameterSet& targets);

}  // namespace FRRN_ABI_NAMESPACE
}  // namespace frrn
