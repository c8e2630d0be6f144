#pragma once

#include "chiralkit/reconstruction.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chiralkit {

// On-disk scene description: cameras as row-major 3x4 arrays, optional world
// points, optional per-camera correspondence grids, and a free-form string
// map. UTF-8 JSON, no comments.
struct SceneFile {
  std::vector<Mat34> cameras;
  std::optional<std::vector<Vec4>> points;
  std::optional<Correspondences> correspondences;
  std::map<std::string, std::string> meta;

  CameraArrangement arrangement(double tol = kDefaultTol) const {
    std::vector<FiniteCamera> cams;
    cams.reserve(cameras.size());
    for (const auto& m : cameras) cams.emplace_back(m);
    return CameraArrangement(std::move(cams), tol);
  }
};

struct SceneParseError : Error {
  explicit SceneParseError(const std::string& what)
      : Error("scene parse error: " + what) {}
};

namespace scene_detail {

inline Mat34 camera_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 12)
    throw SceneParseError("camera must be a row-major array of 12 numbers");
  Mat34 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = j.at(4 * r + c).get<double>();
  return m;
}

inline Vec4 point_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4)
    throw SceneParseError("point must be an array of 4 numbers");
  return Vec4(j.at(0).get<double>(), j.at(1).get<double>(),
              j.at(2).get<double>(), j.at(3).get<double>());
}

}  // namespace scene_detail

inline SceneFile parse_scene(const nlohmann::json& j) {
  SceneFile scene;
  try {
    if (!j.is_object() || !j.contains("cameras"))
      throw SceneParseError("top-level object with a 'cameras' array required");
    for (const auto& cam : j.at("cameras"))
      scene.cameras.push_back(scene_detail::camera_from_json(cam));
    if (scene.cameras.empty()) throw SceneParseError("no cameras");
    if (j.contains("points")) {
      std::vector<Vec4> pts;
      for (const auto& p : j.at("points"))
        pts.push_back(scene_detail::point_from_json(p));
      scene.points = std::move(pts);
    }
    if (j.contains("correspondences")) {
      const auto& grid = j.at("correspondences");
      const int m = static_cast<int>(scene.cameras.size());
      if (!grid.is_array() || static_cast<int>(grid.size()) != m)
        throw SceneParseError("correspondence grid must have one row per camera");
      const int n = static_cast<int>(grid.at(0).size());
      Correspondences c(m, n);
      for (int i = 0; i < m; ++i) {
        if (static_cast<int>(grid.at(i).size()) != n)
          throw SceneParseError("ragged correspondence grid");
        for (int k = 0; k < n; ++k) {
          const auto& e = grid.at(i).at(k);
          if (!e.is_array() || e.size() != 2)
            throw SceneParseError("correspondence entries are 2-vectors");
          c.entries[i][k] = Vec2(e.at(0).get<double>(), e.at(1).get<double>());
        }
      }
      scene.correspondences = std::move(c);
    }
    if (j.contains("meta"))
      for (const auto& [key, value] : j.at("meta").items())
        scene.meta[key] = value.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw SceneParseError(e.what());
  }
  return scene;
}

inline SceneFile load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SceneParseError(e.what());
  }
  return parse_scene(j);
}

// Canonical serialization; parses back to an equal scene.
inline nlohmann::json scene_to_json(const SceneFile& scene) {
  nlohmann::json j;
  j["cameras"] = nlohmann::json::array();
  for (const auto& m : scene.cameras) {
    nlohmann::json cam = nlohmann::json::array();
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) cam.push_back(m(r, c));
    j["cameras"].push_back(std::move(cam));
  }
  if (scene.points) {
    j["points"] = nlohmann::json::array();
    for (const auto& p : *scene.points)
      j["points"].push_back({p[0], p[1], p[2], p[3]});
  }
  if (scene.correspondences) {
    const auto& c = *scene.correspondences;
    nlohmann::json grid = nlohmann::json::array();
    for (int i = 0; i < c.m; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int k = 0; k < c.n; ++k)
        row.push_back({c.entries[i][k][0], c.entries[i][k][1]});
      grid.push_back(std::move(row));
    }
    j["correspondences"] = std::move(grid);
  }
  if (!scene.meta.empty()) j["meta"] = scene.meta;
  return j;
}

}  // namespace chiralkit
