#include "core/ply.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "core/error.hpp"

namespace apc {

namespace {

enum class PlyType { I8, U8, I16, U16, I32, U32, F32, F64 };

size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::I8:
    case PlyType::U8: return 1;
    case PlyType::I16:
    case PlyType::U16: return 2;
    case PlyType::I32:
    case PlyType::U32:
    case PlyType::F32: return 4;
    case PlyType::F64: return 8;
  }
  return 0;
}

PlyType parse_type(const std::string& name, size_t offset) {
  if (name == "char" || name == "int8") return PlyType::I8;
  if (name == "uchar" || name == "uint8") return PlyType::U8;
  if (name == "short" || name == "int16") return PlyType::I16;
  if (name == "ushort" || name == "uint16") return PlyType::U16;
  if (name == "int" || name == "int32") return PlyType::I32;
  if (name == "uint" || name == "uint32") return PlyType::U32;
  if (name == "float" || name == "float32") return PlyType::F32;
  if (name == "double" || name == "float64") return PlyType::F64;
  fail(ErrorCode::Parse,
       "unknown PLY property type '" + name + "' at byte offset " + std::to_string(offset));
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Semantic slot a vertex property feeds, if any.
enum class Slot { X, Y, Z, Red, Green, Blue, Intensity, Label, Skip };

Slot classify_property(const std::string& raw_name) {
  std::string name = to_lower(raw_name);
  if (name.rfind("scalar_", 0) == 0) name = name.substr(7);
  if (name == "x") return Slot::X;
  if (name == "y") return Slot::Y;
  if (name == "z") return Slot::Z;
  if (name == "red" || name == "r") return Slot::Red;
  if (name == "green" || name == "g") return Slot::Green;
  if (name == "blue" || name == "b") return Slot::Blue;
  if (name == "intensity") return Slot::Intensity;
  if (name == "label" || name == "class" || name == "classification" || name == "labels")
    return Slot::Label;
  return Slot::Skip;
}

struct Property {
  PlyType type;
  Slot slot;
};

struct Element {
  std::string name;
  size_t count = 0;
  std::vector<Property> properties;
  bool has_list = false;
};

struct Header {
  bool binary = false;
  std::vector<Element> elements;
  std::string vocab_id;
  size_t data_offset = 0;
};

Header parse_header(const std::string& bytes) {
  Header header;
  size_t pos = 0;
  size_t line_no = 0;
  bool format_seen = false;
  bool done = false;
  while (!done) {
    const size_t line_start = pos;
    const size_t eol = bytes.find('\n', pos);
    if (eol == std::string::npos)
      fail(ErrorCode::Parse, "PLY header not terminated (missing end_header) at byte offset " +
                                 std::to_string(pos));
    std::string line = bytes.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol + 1;

    std::istringstream ss(line);
    std::string keyword;
    ss >> keyword;
    if (line_no == 0) {
      if (keyword != "ply")
        fail(ErrorCode::Parse, "not a PLY file (missing 'ply' magic) at byte offset 0");
      ++line_no;
      continue;
    }
    ++line_no;

    if (keyword == "format") {
      std::string kind, version;
      ss >> kind >> version;
      if (kind == "ascii")
        header.binary = false;
      else if (kind == "binary_little_endian")
        header.binary = true;
      else
        fail(ErrorCode::Parse, "unsupported PLY format '" + kind + "' at byte offset " +
                                   std::to_string(line_start));
      format_seen = true;
    } else if (keyword == "comment" || keyword == "obj_info") {
      std::string rest;
      std::getline(ss, rest);
      const auto key_pos = rest.find("vocab_id=");
      if (key_pos != std::string::npos) header.vocab_id = rest.substr(key_pos + 9);
    } else if (keyword == "element") {
      Element element;
      long long count = -1;
      ss >> element.name >> count;
      if (element.name.empty() || count < 0)
        fail(ErrorCode::Parse,
             "malformed element declaration at byte offset " + std::to_string(line_start));
      element.count = static_cast<size_t>(count);
      header.elements.push_back(element);
    } else if (keyword == "property") {
      if (header.elements.empty())
        fail(ErrorCode::Parse,
             "property before any element at byte offset " + std::to_string(line_start));
      std::string type_name;
      ss >> type_name;
      if (type_name == "list") {
        header.elements.back().has_list = true;
        continue;
      }
      std::string prop_name;
      ss >> prop_name;
      if (prop_name.empty())
        fail(ErrorCode::Parse,
             "malformed property declaration at byte offset " + std::to_string(line_start));
      header.elements.back().properties.push_back(
          {parse_type(type_name, line_start), classify_property(prop_name)});
    } else if (keyword == "end_header") {
      done = true;
    } else if (keyword.empty()) {
      // blank line, tolerated
    } else {
      fail(ErrorCode::Parse, "unrecognized header line '" + keyword + "' at byte offset " +
                                 std::to_string(line_start));
    }
  }
  if (!format_seen)
    fail(ErrorCode::Parse, "PLY header missing format declaration");
  header.data_offset = pos;
  return header;
}

double decode_scalar(const char* p, PlyType t) {
  switch (t) {
    case PlyType::I8: return static_cast<double>(*reinterpret_cast<const int8_t*>(p));
    case PlyType::U8: return static_cast<double>(*reinterpret_cast<const uint8_t*>(p));
    case PlyType::I16: {
      int16_t v;
      std::memcpy(&v, p, 2);
      return static_cast<double>(v);
    }
    case PlyType::U16: {
      uint16_t v;
      std::memcpy(&v, p, 2);
      return static_cast<double>(v);
    }
    case PlyType::I32: {
      int32_t v;
      std::memcpy(&v, p, 4);
      return static_cast<double>(v);
    }
    case PlyType::U32: {
      uint32_t v;
      std::memcpy(&v, p, 4);
      return static_cast<double>(v);
    }
    case PlyType::F32: {
      float v;
      std::memcpy(&v, p, 4);
      return static_cast<double>(v);
    }
    case PlyType::F64: {
      double v;
      std::memcpy(&v, p, 8);
      return v;
    }
  }
  return 0.0;
}

struct VertexLayout {
  int x = -1, y = -1, z = -1, red = -1, green = -1, blue = -1, intensity = -1, label = -1;
};

VertexLayout make_layout(const Element& vertex) {
  VertexLayout layout;
  for (size_t i = 0; i < vertex.properties.size(); ++i) {
    const int idx = static_cast<int>(i);
    switch (vertex.properties[i].slot) {
      case Slot::X: layout.x = idx; break;
      case Slot::Y: layout.y = idx; break;
      case Slot::Z: layout.z = idx; break;
      case Slot::Red: layout.red = idx; break;
      case Slot::Green: layout.green = idx; break;
      case Slot::Blue: layout.blue = idx; break;
      case Slot::Intensity: layout.intensity = idx; break;
      case Slot::Label:
        if (layout.label < 0) layout.label = idx;
        break;
      case Slot::Skip: break;
    }
  }
  if (layout.x < 0 || layout.y < 0 || layout.z < 0)
    fail(ErrorCode::Parse, "PLY vertex element lacks x/y/z properties");
  return layout;
}

void store_vertex(RawCloud& cloud, const VertexLayout& layout, const std::vector<double>& values,
                  bool has_rgb, bool has_intensity, size_t index, size_t offset) {
  Vec3 p{values[layout.x], values[layout.y], values[layout.z]};
  if (!finite(p))
    fail(ErrorCode::Parse, "non-finite coordinate in vertex " + std::to_string(index) +
                               " at byte offset " + std::to_string(offset));
  cloud.positions.push_back(p);
  cloud.labels.push_back(layout.label >= 0
                             ? static_cast<int32_t>(std::llround(values[layout.label]))
                             : kUnlabeledCode);
  if (has_rgb)
    cloud.rgb->push_back({static_cast<uint8_t>(values[layout.red]),
                          static_cast<uint8_t>(values[layout.green]),
                          static_cast<uint8_t>(values[layout.blue])});
  if (has_intensity) cloud.intensity->push_back(static_cast<float>(values[layout.intensity]));
}

void append_le(std::string& out, const void* data, size_t n) {
  out.append(static_cast<const char*>(data), n);
}

}  // namespace

RawCloud parse_ply(const std::string& bytes) {
  const Header header = parse_header(bytes);

  const auto vertex_it =
      std::find_if(header.elements.begin(), header.elements.end(),
                   [](const Element& e) { return e.name == "vertex"; });
  if (vertex_it == header.elements.end())
    fail(ErrorCode::Parse, "PLY file declares no vertex element");
  const Element& vertex = *vertex_it;
  if (vertex.has_list) fail(ErrorCode::Parse, "list properties on the vertex element are unsupported");
  if (vertex.count == 0) fail(ErrorCode::Parse, "PLY file declares zero vertices");

  const VertexLayout layout = make_layout(vertex);
  const bool has_rgb = layout.red >= 0 && layout.green >= 0 && layout.blue >= 0;
  const bool has_intensity = layout.intensity >= 0;

  RawCloud cloud;
  cloud.source_vocab_id = header.vocab_id;
  cloud.positions.reserve(vertex.count);
  cloud.labels.reserve(vertex.count);
  if (has_rgb) cloud.rgb.emplace();
  if (has_intensity) cloud.intensity.emplace();

  if (header.binary) {
    size_t pos = header.data_offset;
    //  Fixed-stride elements ahead of the vertex data are skipped; anything
    //  with list properties there makes offsets unknowable.
    for (const auto& element : header.elements) {
      if (element.name == "vertex") break;
      if (element.has_list)
        fail(ErrorCode::Parse, "cannot skip list element '" + element.name +
                                   "' preceding vertex data in binary PLY");
      size_t stride = 0;
      for (const auto& prop : element.properties) stride += type_size(prop.type);
      pos += stride * element.count;
    }
    size_t stride = 0;
    std::vector<size_t> offsets;
    for (const auto& prop : vertex.properties) {
      offsets.push_back(stride);
      stride += type_size(prop.type);
    }
    if (pos + stride * vertex.count > bytes.size()) {
      const size_t complete = pos <= bytes.size() ? (bytes.size() - pos) / stride : 0;
      fail(ErrorCode::Parse, "vertex count mismatch: header declares " +
                                 std::to_string(vertex.count) + " vertices but data holds " +
                                 std::to_string(complete) + " (truncated at byte offset " +
                                 std::to_string(bytes.size()) + ")");
    }
    std::vector<double> values(vertex.properties.size());
    for (size_t v = 0; v < vertex.count; ++v) {
      const char* record = bytes.data() + pos + v * stride;
      for (size_t p = 0; p < vertex.properties.size(); ++p)
        values[p] = decode_scalar(record + offsets[p], vertex.properties[p].type);
      store_vertex(cloud, layout, values, has_rgb, has_intensity, v, pos + v * stride);
    }
  } else {
    size_t pos = header.data_offset;
    const auto next_token = [&](size_t vertex_index) -> double {
      while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      if (pos >= bytes.size())
        fail(ErrorCode::Parse, "vertex count mismatch: header declares " +
                                   std::to_string(vertex.count) + " vertices but data ends after " +
                                   std::to_string(vertex_index) + " (byte offset " +
                                   std::to_string(pos) + ")");
      const size_t start = pos;
      while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
      const std::string token = bytes.substr(start, pos - start);
      try {
        size_t used = 0;
        const double value = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return value;
      } catch (const std::exception&) {
        fail(ErrorCode::Parse,
             "malformed numeric token '" + token + "' at byte offset " + std::to_string(start));
      }
    };
    std::vector<double> values(vertex.properties.size());
    for (size_t v = 0; v < vertex.count; ++v) {
      const size_t record_offset = pos;
      for (size_t p = 0; p < vertex.properties.size(); ++p) values[p] = next_token(v);
      store_vertex(cloud, layout, values, has_rgb, has_intensity, v, record_offset);
    }
  }
  return cloud;
}

std::string write_ply(const RawCloud& cloud, const std::optional<PlyExtraColumn>& extra) {
  cloud.validate();
  if (extra && extra->second.size() != cloud.size())
    fail(ErrorCode::InvalidArgument, "extra PLY column length does not match point count");

  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\n";
  if (!cloud.source_vocab_id.empty()) header << "comment vocab_id=" << cloud.source_vocab_id << "\n";
  header << "element vertex " << cloud.size() << "\n";
  header << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.rgb) header << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  if (cloud.intensity) header << "property float intensity\n";
  header << "property int label\n";
  if (extra) header << "property uchar " << extra->first << "\n";
  header << "end_header\n";

  std::string out = header.str();
  const size_t stride = 24 + (cloud.rgb ? 3 : 0) + (cloud.intensity ? 4 : 0) + 4 + (extra ? 1 : 0);
  out.reserve(out.size() + stride * cloud.size());
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.positions[i];
    append_le(out, &p.x, 8);
    append_le(out, &p.y, 8);
    append_le(out, &p.z, 8);
    if (cloud.rgb) out.append(reinterpret_cast<const char*>((*cloud.rgb)[i].data()), 3);
    if (cloud.intensity) append_le(out, &(*cloud.intensity)[i], 4);
    append_le(out, &cloud.labels[i], 4);
    if (extra) out.push_back(static_cast<char>(extra->second[i]));
  }
  return out;
}

}  // namespace apc
