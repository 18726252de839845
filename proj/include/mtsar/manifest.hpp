// Copyright 2026 The mtsar Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtsar/core.hpp"
#include "mtsar/speckle.hpp"

namespace mtsar {

inline constexpr int kManifestSchemaVersion = 1;

// Stack manifest (JSON):
//   {
//     "schema_version": 1,
//     "looks": 4,
//     "entries": [{"date": "t00", "path": "w_t00.sarr", "truth": "v_t00.sarr"}, ...],
//     "scene_script": {...},          optional
//     "seed": 7                       optional, informational
//   }
// Paths are relative to the manifest's directory unless absolute; "truth"
// is optional per entry. A manifest without "entries" must carry a
// "scene_script" and describes a simulation recipe only.
//
// Scene script (JSON):
//   {
//     "width": 256, "height": 256, "dates": 17, "looks": 4,
//     "scene": "edge:50,200,128"  or  {"kind": "edge", "left": 50, ...},
//     "base": "base.sarr",            alternative to "scene"
//     "events": [{"date": 9, "region": [x0, y0, w, h], "value": 500}]
//   }
struct ManifestEntry {
  std::string date;
  std::filesystem::path path;
  std::optional<std::filesystem::path> truth;
};

struct LoadedManifest {
  std::optional<Stack> stack;
  std::vector<Image> truth;  // empty unless every entry names a truth image
  std::optional<SceneScript> script;
};

LoadedManifest read_manifest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, double looks,
                    const std::vector<ManifestEntry>& entries,
                    std::string_view scene_script_json = {},
                    std::optional<std::uint64_t> seed = std::nullopt);

// Relative "base" paths resolve against base_dir.
SceneScript parse_scene_script(std::string_view json_text,
                               const std::filesystem::path& base_dir = {});

/// Generates the stack described by the script and writes w_tXX.sarr,
/// v_tXX.sarr (truth) and manifest.json into out_dir. Returns the manifest
/// path.
std::filesystem::path write_simulation(std::string_view scene_script_json, std::uint64_t seed,
                                       const std::filesystem::path& out_dir,
                                       const std::filesystem::path& base_dir = {});

}  // namespace mtsar
