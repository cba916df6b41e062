#pragma once

#include <filesystem>
#include <stdexcept>

#include "nav2goal/network.hpp"

namespace nav2goal::net {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes magic, version, architecture descriptor, parameter count and the
/// parameters as little-endian float32 (see docs/formats.md).
void save_checkpoint(const std::filesystem::path& path, const PolicyNetwork& net);
PolicyNetwork load_checkpoint(const std::filesystem::path& path);

}  // namespace nav2goal::net
