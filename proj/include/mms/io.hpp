#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mms/core.hpp"
#include "mms/dyadic.hpp"
#include "mms/functionals.hpp"
#include "mms/geometries.hpp"
#include "mms/regular_seq.hpp"

namespace mms::io {

using json = nlohmann::json;

json to_json(const Space& space);
// {"points": [...], "metric": "euclidean"|"chebyshev"} or {"dist": [[...]]}.
Space space_from_json(const json& j);

json to_json(const Measure& m);
Measure measure_from_json(const json& j, std::size_t n);
Field field_from_json(const json& j, std::size_t n);
PointSet pointset_from_json(const json& j, std::size_t n);

json to_json(const MeasureSequence& seq);
MeasureSequence sequence_from_json(const json& j, std::size_t n);

// Nested tree: level -> cubes {center, members, parent, children}.
json to_json(const CubeSystem& cubes);

json to_json(const BallFamily& fam);
json to_json(const FunctionalValue& v);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);
void write_text(const std::string& path, const std::string& text);

// Shortest decimal form that parses back to the same double.
std::string num(double x);

// A geometry on disk: space.json, mu.json, S.json, H.json, meta.json, plus
// sequence.json when the measures are given explicitly.
struct Instance {
  Geometry g;
  bool has_sequence = false;
  MeasureSequence seq;
};

void save_instance(const std::string& dir, const Geometry& g,
                   const MeasureSequence* seq = nullptr);
Instance load_instance(const std::string& dir);

}  // namespace mms::io
