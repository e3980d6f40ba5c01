#include "core/tile_format.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "core/crc32.hpp"
#include "core/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "tile serialization assumes a little-endian host");

namespace apc {

namespace {

constexpr char kMagic[4] = {'A', 'P', 'C', 'T'};
constexpr uint32_t kVersion = 1;

enum class FieldType : uint8_t { F64 = 0, F32 = 1, U8 = 2, I32 = 3 };

size_t field_type_size(FieldType t) {
  switch (t) {
    case FieldType::F64: return 8;
    case FieldType::F32: return 4;
    case FieldType::U8: return 1;
    case FieldType::I32: return 4;
  }
  return 0;
}

struct FieldDesc {
  std::string name;
  FieldType type;
  uint64_t count;
};

void put_u32(std::string& out, uint32_t v) { out.append(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::string& out, uint64_t v) { out.append(reinterpret_cast<const char*>(&v), 8); }
void put_u16(std::string& out, uint16_t v) { out.append(reinterpret_cast<const char*>(&v), 2); }

class Reader {
 public:
  Reader(const std::string& bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  template <typename T>
  T get() {
    T v;
    need(sizeof(T));
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_string(size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  const char* view(size_t n) {
    need(n);
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  size_t pos() const { return pos_; }
  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(size_t n) {
    if (pos_ + n > bytes_.size())
      fail(ErrorCode::Format, "truncated tile payload in '" + origin_ + "' (need " +
                                  std::to_string(n) + " bytes at offset " + std::to_string(pos_) +
                                  ", have " + std::to_string(bytes_.size() - pos_) + ")");
  }

  const std::string& bytes_;
  std::string origin_;
  size_t pos_ = 0;
};

std::string meta_json(const Tile& tile) {
  nlohmann::ordered_json meta;
  meta["dataset_id"] = tile.dataset_id;
  meta["subset_tags"] = tile.subset_tags;
  meta["sensor_kind"] = to_string(tile.sensor_kind);
  return meta.dump();
}

}  // namespace

std::string encode_tile(const Tile& tile) {
  tile.validate();
  const uint64_t n = tile.size();

  std::vector<FieldDesc> fields;
  std::string payload;

  const auto add_field = [&](const std::string& name, FieldType type, const void* data,
                             uint64_t count) {
    fields.push_back({name, type, count});
    payload.append(static_cast<const char*>(data), count * field_type_size(type));
  };

  std::vector<double> column(n);
  for (int axis = 0; axis < 3; ++axis) {
    for (uint64_t i = 0; i < n; ++i) column[i] = tile.positions[i][axis];
    add_field(axis == 0 ? "x" : (axis == 1 ? "y" : "z"), FieldType::F64, column.data(), n);
  }
  {
    std::vector<uint8_t> labels(n);
    for (uint64_t i = 0; i < n; ++i) labels[i] = static_cast<uint8_t>(tile.labels[i]);
    add_field("label", FieldType::U8, labels.data(), n);
  }
  if (tile.rgb) {
    std::vector<uint8_t> chan(n);
    const char* names[3] = {"red", "green", "blue"};
    for (int c = 0; c < 3; ++c) {
      for (uint64_t i = 0; i < n; ++i) chan[i] = (*tile.rgb)[i][static_cast<size_t>(c)];
      add_field(names[c], FieldType::U8, chan.data(), n);
    }
  }
  if (tile.intensity) add_field("intensity", FieldType::F32, tile.intensity->data(), n);
  add_field("overhead_density", FieldType::F64, &tile.overhead_density, 1);
  const std::string meta = meta_json(tile);
  add_field("meta", FieldType::U8, meta.data(), meta.size());

  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<uint32_t>(fields.size()));
  for (const auto& f : fields) {
    put_u16(out, static_cast<uint16_t>(f.name.size()));
    out.append(f.name);
    out.push_back(static_cast<char>(f.type));
    put_u64(out, f.count);
  }
  out.append(payload);
  put_u32(out, crc32(payload.data(), payload.size()));
  return out;
}

Tile decode_tile(const std::string& bytes, const std::string& origin) {
  Reader reader(bytes, origin);
  const std::string magic = reader.get_string(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0)
    fail(ErrorCode::Format, "bad magic in '" + origin + "': not an APCT tile");
  const auto version = reader.get<uint32_t>();
  if (version != kVersion)
    fail(ErrorCode::Format, "unsupported tile version " + std::to_string(version) + " in '" +
                                origin + "' (expected " + std::to_string(kVersion) + ")");
  const auto field_count = reader.get<uint32_t>();
  std::vector<FieldDesc> fields;
  fields.reserve(field_count);
  for (uint32_t i = 0; i < field_count; ++i) {
    FieldDesc f;
    const auto name_len = reader.get<uint16_t>();
    f.name = reader.get_string(name_len);
    const auto type_byte = reader.get<uint8_t>();
    if (type_byte > static_cast<uint8_t>(FieldType::I32))
      fail(ErrorCode::Format, "unknown field type in '" + origin + "'");
    f.type = static_cast<FieldType>(type_byte);
    f.count = reader.get<uint64_t>();
    if (f.count > bytes.size() / field_type_size(f.type))
      fail(ErrorCode::Format, "field '" + f.name + "' in '" + origin +
                                  "' declares more data than the file holds");
    fields.push_back(std::move(f));
  }

  size_t payload_size = 0;
  for (const auto& f : fields) {
    payload_size += f.count * field_type_size(f.type);
    if (payload_size > bytes.size())
      fail(ErrorCode::Format, "truncated tile payload in '" + origin + "'");
  }
  const size_t payload_start = reader.pos();
  if (reader.remaining() < payload_size + 4)
    fail(ErrorCode::Format, "truncated tile payload in '" + origin + "'");

  std::vector<const char*> field_data;
  field_data.reserve(fields.size());
  for (const auto& f : fields) field_data.push_back(reader.view(f.count * field_type_size(f.type)));

  const auto stored_crc = reader.get<uint32_t>();
  const uint32_t actual_crc = crc32(bytes.data() + payload_start, payload_size);
  if (stored_crc != actual_crc)
    fail(ErrorCode::Format, "checksum failure in '" + origin + "': payload corrupt");

  const auto find_field = [&](const std::string& name) -> int {
    for (size_t i = 0; i < fields.size(); ++i)
      if (fields[i].name == name) return static_cast<int>(i);
    return -1;
  };
  const auto require_field = [&](const std::string& name, FieldType type) -> int {
    const int idx = find_field(name);
    if (idx < 0) fail(ErrorCode::Format, "tile '" + origin + "' lacks field '" + name + "'");
    if (fields[idx].type != type)
      fail(ErrorCode::Format, "tile field '" + name + "' has unexpected type in '" + origin + "'");
    return idx;
  };

  Tile tile;
  const int xi = require_field("x", FieldType::F64);
  const int yi = require_field("y", FieldType::F64);
  const int zi = require_field("z", FieldType::F64);
  const uint64_t n = fields[xi].count;
  if (fields[yi].count != n || fields[zi].count != n)
    fail(ErrorCode::Format, "coordinate columns disagree on length in '" + origin + "'");
  tile.positions.resize(n);
  for (uint64_t i = 0; i < n; ++i) {
    std::memcpy(&tile.positions[i].x, field_data[xi] + i * 8, 8);
    std::memcpy(&tile.positions[i].y, field_data[yi] + i * 8, 8);
    std::memcpy(&tile.positions[i].z, field_data[zi] + i * 8, 8);
  }

  const int li = require_field("label", FieldType::U8);
  if (fields[li].count != n)
    fail(ErrorCode::Format, "label column length mismatch in '" + origin + "'");
  tile.labels.resize(n);
  for (uint64_t i = 0; i < n; ++i) {
    const auto v = static_cast<uint8_t>(field_data[li][i]);
    if (v > static_cast<uint8_t>(UnifiedClass::Undefined))
      fail(ErrorCode::Format, "invalid unified label " + std::to_string(v) + " in '" + origin + "'");
    tile.labels[i] = static_cast<UnifiedClass>(v);
  }

  if (find_field("red") >= 0) {
    const int ri = require_field("red", FieldType::U8);
    const int gi = require_field("green", FieldType::U8);
    const int bi = require_field("blue", FieldType::U8);
    if (fields[ri].count != n || fields[gi].count != n || fields[bi].count != n)
      fail(ErrorCode::Format, "rgb column length mismatch in '" + origin + "'");
    tile.rgb.emplace(n);
    for (uint64_t i = 0; i < n; ++i)
      (*tile.rgb)[i] = {static_cast<uint8_t>(field_data[ri][i]),
                        static_cast<uint8_t>(field_data[gi][i]),
                        static_cast<uint8_t>(field_data[bi][i])};
  }
  if (find_field("intensity") >= 0) {
    const int ii = require_field("intensity", FieldType::F32);
    if (fields[ii].count != n)
      fail(ErrorCode::Format, "intensity column length mismatch in '" + origin + "'");
    tile.intensity.emplace(n);
    std::memcpy(tile.intensity->data(), field_data[ii], n * 4);
  }

  const int di = require_field("overhead_density", FieldType::F64);
  if (fields[di].count != 1)
    fail(ErrorCode::Format, "overhead_density must be a single value in '" + origin + "'");
  std::memcpy(&tile.overhead_density, field_data[di], 8);

  const int mi = require_field("meta", FieldType::U8);
  const std::string meta_text(field_data[mi], fields[mi].count);
  try {
    const auto meta = nlohmann::json::parse(meta_text);
    tile.dataset_id = meta.at("dataset_id").get<std::string>();
    tile.subset_tags = meta.at("subset_tags").get<std::vector<std::string>>();
    tile.sensor_kind = sensor_kind_from_string(meta.at("sensor_kind").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, "tile metadata malformed in '" + origin + "': " + e.what());
  }

  tile.validate();
  return tile;
}

void write_tile(const Tile& tile, const std::filesystem::path& path) {
  const std::string bytes = encode_tile(tile);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

Tile read_tile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open tile '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_tile(bytes, path.string());
}

}  // namespace apc
