#include "nav2goal/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "nav2goal/io_util.hpp"

namespace nav2goal::net {

namespace {

constexpr char kMagic[8] = {'N', '2', 'G', 'C', 'K', 'P', 'T', '\0'};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const PolicyNetwork& net) {
  const auto& a = net.arch();
  io::ByteWriter w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  for (int v : {a.obs_width, a.obs_height, a.in_channels, a.conv1_channels, a.conv2_channels, a.kernel, a.stride,
                a.padding, a.hidden, a.classes}) {
    w.u32(static_cast<std::uint32_t>(v));
  }
  w.u32(static_cast<std::uint32_t>(a.fusion));
  w.u32(static_cast<std::uint32_t>(a.goal_format));
  w.f64(a.goal_scale);
  w.u64(net.param_count());
  for (double p : net.params()) w.f32(static_cast<float>(p));
  io::write_file_atomic(path, w.data());
}

PolicyNetwork load_checkpoint(const std::filesystem::path& path) {
  std::vector<std::uint8_t> data;
  try {
    data = io::read_file(path);
  } catch (const std::exception& e) {
    throw CheckpointError(std::string("cannot read checkpoint: ") + e.what());
  }
  io::ByteReader r(data);
  try {
    char magic[8];
    r.bytes(magic, sizeof magic);
    if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw CheckpointError(path.string() + ": not a checkpoint");
    const auto version = r.u32();
    if (version != kCheckpointVersion) {
      throw CheckpointError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
    }
    Architecture a;
    a.obs_width = static_cast<int>(r.u32());
    a.obs_height = static_cast<int>(r.u32());
    a.in_channels = static_cast<int>(r.u32());
    a.conv1_channels = static_cast<int>(r.u32());
    a.conv2_channels = static_cast<int>(r.u32());
    a.kernel = static_cast<int>(r.u32());
    a.stride = static_cast<int>(r.u32());
    a.padding = static_cast<int>(r.u32());
    a.hidden = static_cast<int>(r.u32());
    a.classes = static_cast<int>(r.u32());
    const auto fusion = r.u32();
    const auto format = r.u32();
    if (fusion > 2 || format > 1) throw CheckpointError(path.string() + ": bad architecture descriptor");
    a.fusion = static_cast<GoalFusion>(fusion);
    a.goal_format = static_cast<GoalFormat>(format);
    a.goal_scale = r.f64();
    PolicyNetwork net(a);
    const auto count = r.u64();
    if (count != net.param_count()) {
      throw CheckpointError(path.string() + ": parameter count " + std::to_string(count) +
                            " does not match the architecture (" + std::to_string(net.param_count()) + ")");
    }
    for (auto& p : net.params()) p = r.f32();
    if (!r.done()) throw CheckpointError(path.string() + ": trailing bytes after parameters");
    return net;
  } catch (const io::FormatError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

}  // namespace nav2goal::net
