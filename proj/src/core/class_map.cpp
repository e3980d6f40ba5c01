#include "core/class_map.hpp"

#include <fstream>

#include <json.hpp>

#include "core/error.hpp"

namespace apc {

void ClassMap::validate() const {
  if (vocab_id.empty()) fail(ErrorCode::Parse, "class map has no vocab_id");
  if (entries.empty()) fail(ErrorCode::Parse, "class map has no entries");
  bool seen[3] = {false, false, false};
  for (const auto& [code, cls] : entries) {
    if (cls != UnifiedClass::Undefined) seen[static_cast<size_t>(cls)] = true;
  }
  for (int i = 0; i < 3; ++i) {
    if (!seen[i])
      fail(ErrorCode::Parse, std::string("class map '") + vocab_id + "' maps no source code to " +
                                 to_string(static_cast<UnifiedClass>(i)));
  }
}

ClassMap ClassMap::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("class map is not valid JSON: ") + e.what());
  }
  ClassMap map;
  try {
    map.vocab_id = doc.at("vocab_id").get<std::string>();
    for (const auto& [key, value] : doc.at("entries").items()) {
      int32_t code = 0;
      try {
        code = static_cast<int32_t>(std::stol(key));
      } catch (const std::exception&) {
        fail(ErrorCode::Parse, "class map entry key '" + key + "' is not an integer code");
      }
      if (map.entries.count(code))
        fail(ErrorCode::Parse, "class map lists source code " + key + " twice");
      map.entries[code] = unified_class_from_string(value.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("class map JSON malformed: ") + e.what());
  }
  map.validate();
  return map;
}

ClassMap ClassMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open class map '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_text(text);
}

std::string ClassMap::to_json_text() const {
  nlohmann::ordered_json doc;
  doc["vocab_id"] = vocab_id;
  nlohmann::ordered_json entries_doc = nlohmann::ordered_json::object();
  for (const auto& [code, cls] : entries) entries_doc[std::to_string(code)] = to_string(cls);
  doc["entries"] = entries_doc;
  return doc.dump(2) + "\n";
}

RemapResult remap_labels(const RawCloud& raw, const ClassMap& map) {
  raw.validate();
  map.validate();
  if (!raw.source_vocab_id.empty() && raw.source_vocab_id != map.vocab_id)
    fail(ErrorCode::InvalidArgument, "cloud vocabulary '" + raw.source_vocab_id +
                                         "' does not match class map '" + map.vocab_id + "'");
  RemapResult result;
  result.labels.reserve(raw.labels.size());
  for (const int32_t code : raw.labels) {
    UnifiedClass cls;
    if (code == kUnlabeledCode) {
      cls = UnifiedClass::Undefined;
    } else {
      const auto it = map.entries.find(code);
      if (it == map.entries.end())
        fail(ErrorCode::State, "source code " + std::to_string(code) +
                                   " has no entry in class map '" + map.vocab_id + "'");
      cls = it->second;
    }
    result.labels.push_back(cls);
    result.counts.add(cls);
  }
  return result;
}

}  // namespace apc
