// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#include "mtsar/manifest.hpp"

#include <fstream>

#include "json.hpp"
#include "mtsar/error.hpp"
#include "mtsar/io.hpp"

namespace mtsar {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  fail(ErrorCode::kSchemaViolation, where + ": " + what);
}

json parse_json(std::string_view text, const std::string& where) {
  auto doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) schema(where, "not valid JSON");
  if (!doc.is_object()) schema(where, "top level must be an object");
  return doc;
}

double get_positive(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number()) schema(where, std::string("'") + key + "' must be a number");
  return obj[key].get<double>();
}

std::size_t get_count(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number_unsigned()) {
    schema(where, std::string("'") + key + "' must be a non-negative integer");
  }
  return obj[key].get<std::size_t>();
}

SceneKind scene_from_json(const json& j, const std::string& where) {
  if (j.is_string()) return parse_scene_kind(j.get<std::string>());
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    schema(where, "'scene' must be a string or an object with a 'kind'");
  }
  const auto kind = j["kind"].get<std::string>();
  if (kind == "constant") return ConstantScene{get_positive(j, "level", where)};
  if (kind == "edge") {
    return EdgeScene{get_positive(j, "left", where), get_positive(j, "right", where),
                     get_count(j, "column", where)};
  }
  if (kind == "point_targets") {
    PointTargetsScene s{get_positive(j, "background", where), get_positive(j, "target", where), {}};
    for (const auto& p : j.value("positions", json::array())) {
      if (!p.is_array() || p.size() != 2) schema(where, "positions must be [x, y] pairs");
      s.positions.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
    }
    return s;
  }
  if (kind == "lines") {
    LinesScene s{get_positive(j, "background", where), get_positive(j, "level", where), {}};
    for (const auto& r : j.value("rows", json::array())) s.rows.push_back(r.get<std::size_t>());
    return s;
  }
  schema(where, "unknown scene kind '" + kind + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

SceneScript script_from_json(const json& doc, const std::filesystem::path& base_dir,
                             const std::string& where) {
  SceneScript script;
  try {
    if (doc.contains("base")) {
      if (!doc["base"].is_string()) schema(where, "'base' must be a path string");
      script.base = read_image(resolve(base_dir, doc["base"].get<std::string>()));
    } else if (doc.contains("scene")) {
      script.base = generate_scene(scene_from_json(doc["scene"], where), get_count(doc, "width", where),
                                   get_count(doc, "height", where));
    } else {
      schema(where, "needs 'scene' or 'base'");
    }
    script.dates = get_count(doc, "dates", where);
    script.looks = doc.contains("looks") ? get_positive(doc, "looks", where) : kDefaultLooks;
    for (const auto& ev : doc.value("events", json::array())) {
      if (!ev.is_object() || !ev.contains("region") || !ev["region"].is_array() ||
          ev["region"].size() != 4) {
        schema(where, "each event needs 'date', 'region' [x0, y0, w, h] and 'value'");
      }
      const auto& r = ev["region"];
      script.events.push_back(ChangeEvent{
          get_count(ev, "date", where),
          Region{r[0].get<std::size_t>(), r[1].get<std::size_t>(), r[2].get<std::size_t>(),
                 r[3].get<std::size_t>()},
          get_positive(ev, "value", where)});
    }
  } catch (const json::exception& e) {
    schema(where, e.what());
  }
  validate_script(script);
  return script;
}

}  // namespace

SceneScript parse_scene_script(std::string_view json_text, const std::filesystem::path& base_dir) {
  return script_from_json(parse_json(json_text, "scene script"), base_dir, "scene script");
}

LoadedManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open manifest '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = path.string();
  const json doc = parse_json(text, where);
  const auto base_dir = path.parent_path();

  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    schema(where, "'schema_version' missing");
  }
  if (doc["schema_version"].get<int>() != kManifestSchemaVersion) {
    schema(where, "unsupported schema_version " + doc["schema_version"].dump());
  }

  LoadedManifest out;
  if (doc.contains("scene_script")) {
    if (!doc["scene_script"].is_object()) schema(where, "'scene_script' must be an object");
    out.script = script_from_json(doc["scene_script"], base_dir, where + " scene_script");
  }
  if (!doc.contains("entries")) {
    if (!out.script) schema(where, "needs 'entries' or 'scene_script'");
    return out;
  }
  const auto& entries = doc["entries"];
  if (!entries.is_array() || entries.empty()) schema(where, "'entries' must be a non-empty array");

  Stack stack;
  stack.looks = get_positive(doc, "looks", where);
  bool all_truth = true;
  std::vector<Image> truth;
  for (const auto& e : entries) {
    if (!e.is_object() || !e.contains("date") || !e["date"].is_string() || !e.contains("path") ||
        !e["path"].is_string()) {
      schema(where, "each entry needs string 'date' and 'path'");
    }
    stack.dates.push_back(e["date"].get<std::string>());
    stack.images.push_back(read_image(resolve(base_dir, e["path"].get<std::string>())));
    if (e.contains("truth") && e["truth"].is_string()) {
      truth.push_back(read_image(resolve(base_dir, e["truth"].get<std::string>())));
    } else {
      all_truth = false;
    }
  }
  validate_stack(stack);
  if (all_truth) {
    for (const auto& v : truth) {
      if (!v.same_shape(stack.images.front())) {
        fail(ErrorCode::kDimensionMismatch, where + ": truth image size differs from stack");
      }
    }
    out.truth = std::move(truth);
  }
  out.stack = std::move(stack);
  return out;
}

void write_manifest(const std::filesystem::path& path, double looks,
                    const std::vector<ManifestEntry>& entries, std::string_view scene_script_json,
                    std::optional<std::uint64_t> seed) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kManifestSchemaVersion;
  doc["looks"] = looks;
  doc["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json j{{"date", e.date}, {"path", e.path.generic_string()}};
    if (e.truth) j["truth"] = e.truth->generic_string();
    doc["entries"].push_back(std::move(j));
  }
  if (!scene_script_json.empty()) {
    doc["scene_script"] = nlohmann::ordered_json::parse(scene_script_json);
  }
  if (seed) doc["seed"] = *seed;
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) fail(ErrorCode::kIoFailure, "write to '" + path.string() + "' failed");
}

std::filesystem::path write_simulation(std::string_view scene_script_json, std::uint64_t seed,
                                       const std::filesystem::path& out_dir,
                                       const std::filesystem::path& base_dir) {
  const SceneScript script = parse_scene_script(scene_script_json, base_dir);
  const SimulatedStack sim = generate_stack(script, seed);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<ManifestEntry> entries;
  for (std::size_t t = 0; t < sim.stack.size(); ++t) {
    const auto& date = sim.stack.dates[t];
    ManifestEntry e{date, "w_" + date + ".sarr", "v_" + date + ".sarr"};
    write_image(sim.stack.images[t], out_dir / e.path);
    write_image(sim.truth[t], out_dir / *e.truth);
    entries.push_back(std::move(e));
  }
  // Re-serialise so the manifest carries a canonical copy of the recipe.
  auto recipe = json::parse(scene_script_json);
  if (recipe.contains("base")) {
    recipe["base"] = std::filesystem::absolute(resolve(base_dir, recipe["base"].get<std::string>())).string();
  }
  const auto canonical = recipe.dump();
  const auto manifest = out_dir / "manifest.json";
  write_manifest(manifest, script.looks, entries, canonical, seed);
  return manifest;
}

}  // namespace mtsar
