#pragma once

#include <filesystem>
#include <stdexcept>
#include <vector>

#include "nav2goal/trajectory.hpp"

namespace nav2goal::hindsight {

class StoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kStoreVersion = 1;

/// Observation geometry shared by every record in a store.
struct StoreHeader {
  std::uint32_t version = kStoreVersion;
  std::uint32_t obs_width = 0;
  std::uint32_t obs_height = 0;
  double range_max = 0.0;
  std::uint64_t trajectory_count = 0;
  std::uint64_t record_count = 0;
};

/// Serialized trajectory block: u32 payload length, payload, u32 CRC-32 of the payload.
std::vector<std::uint8_t> encode_trajectory(const Trajectory& traj);

/// Writes a fresh store (header plus one block per trajectory).
void store_save(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories);
/// Appends to an existing store, creating it if missing; header counts are rewritten.
void store_append(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories);
std::vector<Trajectory> store_load(const std::filesystem::path& path);
StoreHeader store_header(const std::filesystem::path& path);

}  // namespace nav2goal::hindsight
