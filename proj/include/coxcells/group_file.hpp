#pragma once

// Group description files:
//   { "name": string, "rank": n, "labels_from": 0|1,
//     "coxeter_matrix": [[int,...],...], "a_bound": optional int }
// with matrix entry 0 meaning infinity.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "coxcells/coxeter_system.hpp"

namespace coxcells {

struct GroupFile {
  CoxeterSystem system;
  std::optional<int> a_bound;
};

inline GroupFile parse_group_json(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw InputError("group file must be a JSON object");
    auto name = j.value("name", std::string("unnamed"));
    int labels_from = j.value("labels_from", 1);
    auto matrix = j.at("coxeter_matrix").get<std::vector<std::vector<int>>>();
    if (j.contains("rank") && j.at("rank").get<int>() != static_cast<int>(matrix.size()))
      throw InputError("rank does not match the Coxeter matrix size");
    GroupFile gf{CoxeterSystem(std::move(name), std::move(matrix), labels_from), std::nullopt};
    if (j.contains("a_bound")) gf.a_bound = j.at("a_bound").get<int>();
    return gf;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed group file: ") + e.what());
  }
}

inline GroupFile load_group_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open group file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("group file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_group_json(j);
}

inline nlohmann::json to_json(const CoxeterSystem& sys) {
  return {{"name", sys.name()},
          {"rank", sys.rank()},
          {"labels_from", sys.labels_from()},
          {"coxeter_matrix", sys.matrix()}};
}

#ifdef COXCELLS_FIXTURE_DIR
/// Load one of the in-repo fixtures by stem, e.g. "a2_affine".
inline CoxeterSystem fixture(const std::string& stem) {
  return load_group_file(std::filesystem::path(COXCELLS_FIXTURE_DIR) / (stem + ".json")).system;
}
#endif

}  // namespace coxcells
