#include "nav2goal/trajectory_store.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

#include "nav2goal/io_util.hpp"

namespace nav2goal::hindsight {

sim::RobotState record_state(const TrajectoryRecord& record, const sim::RobotState& limits) {
  sim::RobotState s = limits;
  s.pose = record.true_pose;
  s.speed = record.speed;
  s.yaw_rate = record.yaw_rate;
  s.pitch_rate = record.pitch_rate;
  return s;
}

std::size_t total_records(const std::vector<Trajectory>& trajectories) {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.length();
  return n;
}

namespace {

constexpr char kMagic[8] = {'N', '2', 'G', 'T', 'R', 'A', 'J', '\0'};
constexpr std::size_t kHeaderSize = 8 + 4 + 4 + 4 + 8 + 8 + 8;

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t n) {
  return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), data, static_cast<uInt>(n)));
}

void put_pose(io::ByteWriter& w, const Pose& p) {
  w.f64(p.x);
  w.f64(p.y);
  w.f64(p.z);
  w.f64(p.yaw);
  w.f64(p.pitch);
}

Pose get_pose(io::ByteReader& r) {
  Pose p;
  p.x = r.f64();
  p.y = r.f64();
  p.z = r.f64();
  p.yaw = r.f64();
  p.pitch = r.f64();
  return p;
}

std::vector<std::uint8_t> encode_header(const StoreHeader& h) {
  io::ByteWriter w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(h.version);
  w.u32(h.obs_width);
  w.u32(h.obs_height);
  w.f64(h.range_max);
  w.u64(h.trajectory_count);
  w.u64(h.record_count);
  return w.data();
}

StoreHeader decode_header(const std::vector<std::uint8_t>& data, const std::filesystem::path& path) {
  if (data.size() < kHeaderSize) {
    throw StoreError(path.string() + ": truncated header at offset " + std::to_string(data.size()));
  }
  io::ByteReader r(data.data(), kHeaderSize);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw StoreError(path.string() + ": not a trajectory store");
  StoreHeader h;
  h.version = r.u32();
  if (h.version != kStoreVersion) {
    throw StoreError(path.string() + ": unsupported store version " + std::to_string(h.version));
  }
  h.obs_width = r.u32();
  h.obs_height = r.u32();
  h.range_max = r.f64();
  h.trajectory_count = r.u64();
  h.record_count = r.u64();
  return h;
}

/// Geometry of the first observation in the set, or of an empty header.
void check_geometry(StoreHeader& h, const std::vector<Trajectory>& trajectories) {
  for (const auto& t : trajectories) {
    for (const auto& rec : t.records) {
      const auto& o = rec.observation;
      if (h.obs_width == 0 && h.obs_height == 0) {
        h.obs_width = static_cast<std::uint32_t>(o.width);
        h.obs_height = static_cast<std::uint32_t>(o.height);
        h.range_max = o.range_max;
      }
      if (static_cast<std::uint32_t>(o.width) != h.obs_width || static_cast<std::uint32_t>(o.height) != h.obs_height ||
          o.range_max != h.range_max) {
        throw StoreError("trajectory " + std::to_string(t.id) + ": observation geometry differs from the store");
      }
      if (o.cell_class.size() != static_cast<std::size_t>(o.width) * o.height ||
          o.distance.size() != o.cell_class.size()) {
        throw StoreError("trajectory " + std::to_string(t.id) + ": malformed observation");
      }
    }
  }
}

Trajectory decode_trajectory(io::ByteReader& r, const StoreHeader& h) {
  Trajectory t;
  t.id = r.u32();
  t.seed = r.u64();
  t.collision = r.u8() != 0;
  const auto n = r.u32();
  const std::size_t cells = static_cast<std::size_t>(h.obs_width) * h.obs_height;
  t.records.resize(n);
  for (auto& rec : t.records) {
    rec.time_index = r.i32();
    rec.true_pose = get_pose(r);
    rec.est_pose = get_pose(r);
    rec.action.yaw_class = static_cast<std::int8_t>(r.u8());
    rec.action.pitch_class = static_cast<std::int8_t>(r.u8());
    rec.speed = r.f64();
    rec.yaw_rate = r.f64();
    rec.pitch_rate = r.f64();
    rec.command.x = r.f64();
    rec.command.y = r.f64();
    auto& o = rec.observation;
    o.width = static_cast<int>(h.obs_width);
    o.height = static_cast<int>(h.obs_height);
    o.range_max = h.range_max;
    o.down_coral_fraction = r.f32();
    o.down_ray_count = r.i32();
    o.down_coral_hits = r.i32();
    o.cell_class.resize(cells);
    o.distance.resize(cells);
    for (auto& c : o.cell_class) {
      const float v = r.f32();
      if (!(v >= 0.0f && v < static_cast<float>(sim::kNumViewClasses)) || v != static_cast<float>(static_cast<int>(v))) {
        throw io::FormatError("invalid cell class in trajectory " + std::to_string(t.id), r.offset());
      }
      c = static_cast<sim::ViewClass>(static_cast<int>(v));
    }
    for (auto& d : o.distance) d = r.f32();
  }
  return t;
}

void write_blocks(std::ostream& out, const std::vector<Trajectory>& trajectories) {
  for (const auto& t : trajectories) {
    const auto block = encode_trajectory(t);
    out.write(reinterpret_cast<const char*>(block.data()), static_cast<std::streamsize>(block.size()));
  }
}

}  // namespace

std::vector<std::uint8_t> encode_trajectory(const Trajectory& t) {
  io::ByteWriter w;
  w.u32(t.id);
  w.u64(t.seed);
  w.u8(t.collision ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(t.records.size()));
  for (const auto& rec : t.records) {
    w.i32(rec.time_index);
    put_pose(w, rec.true_pose);
    put_pose(w, rec.est_pose);
    w.u8(static_cast<std::uint8_t>(static_cast<std::int8_t>(rec.action.yaw_class)));
    w.u8(static_cast<std::uint8_t>(static_cast<std::int8_t>(rec.action.pitch_class)));
    w.f64(rec.speed);
    w.f64(rec.yaw_rate);
    w.f64(rec.pitch_rate);
    w.f64(rec.command.x);
    w.f64(rec.command.y);
    const auto& o = rec.observation;
    w.f32(o.down_coral_fraction);
    w.i32(o.down_ray_count);
    w.i32(o.down_coral_hits);
    for (auto c : o.cell_class) w.f32(static_cast<float>(static_cast<int>(c)));
    for (float d : o.distance) w.f32(d);
  }
  io::ByteWriter block;
  block.u32(static_cast<std::uint32_t>(w.size()));
  block.bytes(w.data().data(), w.size());
  block.u32(crc32_of(w.data().data(), w.size()));
  return block.data();
}

void store_save(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories) {
  StoreHeader h;
  check_geometry(h, trajectories);
  h.trajectory_count = trajectories.size();
  h.record_count = total_records(trajectories);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + tmp.string());
    const auto header = encode_header(h);
    out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
    write_blocks(out, trajectories);
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw StoreError("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

StoreHeader store_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot open trajectory store " + path.string());
  std::vector<std::uint8_t> buf(kHeaderSize);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  buf.resize(static_cast<std::size_t>(in.gcount()));
  return decode_header(buf, path);
}

void store_append(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories) {
  if (!std::filesystem::exists(path)) {
    store_save(path, trajectories);
    return;
  }
  StoreHeader h = store_header(path);
  check_geometry(h, trajectories);
  h.trajectory_count += trajectories.size();
  h.record_count += total_records(trajectories);
  std::fstream io(path, std::ios::binary | std::ios::in | std::ios::out);
  if (!io) throw StoreError("cannot open trajectory store " + path.string());
  io.seekp(0, std::ios::end);
  write_blocks(io, trajectories);
  io.seekp(0, std::ios::beg);
  const auto header = encode_header(h);
  io.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  if (!io) throw StoreError("append failed for " + path.string());
}

std::vector<Trajectory> store_load(const std::filesystem::path& path) {
  std::vector<std::uint8_t> data;
  try {
    data = io::read_file(path);
  } catch (const std::exception& e) {
    throw StoreError(std::string("cannot read trajectory store: ") + e.what());
  }
  const StoreHeader h = decode_header(data, path);
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(h.trajectory_count));
  std::size_t pos = kHeaderSize;
  while (pos < data.size()) {
    const std::size_t block_start = pos;
    if (data.size() - pos < 4) {
      throw StoreError(path.string() + ": truncated record length at offset " + std::to_string(block_start));
    }
    io::ByteReader len_reader(data.data() + pos, 4, pos);
    const std::size_t len = len_reader.u32();
    pos += 4;
    if (data.size() - pos < len + 4) {
      throw StoreError(path.string() + ": truncated record at offset " + std::to_string(block_start) +
                       " (trajectory " + std::to_string(out.size()) + " in file order)");
    }
    const std::uint8_t* payload = data.data() + pos;
    io::ByteReader crc_reader(payload + len, 4, pos + len);
    const std::uint32_t stored_crc = crc_reader.u32();
    std::uint32_t id = 0;
    if (len >= 4) id = io::ByteReader(payload, 4).u32();
    if (crc32_of(payload, len) != stored_crc) {
      throw StoreError(path.string() + ": corrupted record for trajectory id " + std::to_string(id) + " at offset " +
                       std::to_string(block_start));
    }
    io::ByteReader r(payload, len, pos);
    try {
      out.push_back(decode_trajectory(r, h));
    } catch (const io::FormatError& e) {
      throw StoreError(path.string() + ": malformed record for trajectory id " + std::to_string(id) + ": " + e.what());
    }
    if (!r.done()) {
      throw StoreError(path.string() + ": record for trajectory id " + std::to_string(id) + " at offset " +
                       std::to_string(block_start) + " has trailing bytes");
    }
    pos += len + 4;
  }
  if (out.size() != h.trajectory_count || total_records(out) != h.record_count) {
    throw StoreError(path.string() + ": header counts do not match the records (expected " +
                     std::to_string(h.trajectory_count) + " trajectories, found " + std::to_string(out.size()) + ")");
  }
  return out;
}

}  // namespace nav2goal::hindsight
