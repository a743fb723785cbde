#include "mms/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mms::io {

namespace {

template <class T>
std::vector<T> array_of(const json& j, const char* what) {
  if (!j.is_array()) throw Error(Err::BadInput, std::string(what) + " must be an array");
  try {
    return j.get<std::vector<T>>();
  } catch (const json::exception& e) {
    throw Error(Err::BadInput, std::string(what) + ": " + e.what());
  }
}

std::string join(const std::string& dir, const char* file) {
  return (std::filesystem::path(dir) / file).string();
}

}  // namespace

std::string num(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json to_json(const Space& space) {
  json j;
  if (!space.coords().empty()) {
    j["points"] = space.coords();
    j["metric"] = space.metric() == Metric::Euclidean ? "euclidean" : "chebyshev";
    return j;
  }
  const std::size_t n = space.size();
  std::vector<std::vector<double>> t(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) t[i][k] = space.d(i, k);
  j["dist"] = t;
  return j;
}

Space space_from_json(const json& j) {
  if (!j.is_object()) throw Error(Err::BadInput, "space must be an object");
  if (j.contains("points")) {
    auto pts = array_of<std::vector<double>>(j["points"], "points");
    Metric m = Metric::Euclidean;
    if (j.contains("metric")) {
      std::string s = j["metric"].is_string() ? j["metric"].get<std::string>() : "";
      if (s == "chebyshev") m = Metric::Chebyshev;
      else if (s != "euclidean") throw Error(Err::BadInput, "unknown metric");
    }
    return Space::from_points(pts, m);
  }
  if (j.contains("dist"))
    return Space::from_table(array_of<std::vector<double>>(j["dist"], "dist"));
  throw Error(Err::BadInput, "space needs points or dist");
}

json to_json(const Measure& m) { return m.w; }

Measure measure_from_json(const json& j, std::size_t n) {
  auto w = array_of<double>(j, "measure");
  if (w.size() != n) throw Error(Err::BadInput, "measure length differs from the space");
  for (double v : w)
    if (!(v >= 0.0)) throw Error(Err::BadInput, "negative or NaN weight");
  return Measure(std::move(w));
}

Field field_from_json(const json& j, std::size_t n) {
  auto f = array_of<double>(j, "field");
  if (f.size() != n) throw Error(Err::BadInput, "field length differs from the space");
  return f;
}

PointSet pointset_from_json(const json& j, std::size_t n) {
  auto s = array_of<std::size_t>(j, "point set");
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (!s.empty() && s.back() >= n) throw Error(Err::BadInput, "point index out of range");
  return s;
}

json to_json(const MeasureSequence& seq) {
  json j;
  j["eps"] = seq.eps;
  j["theta"] = seq.theta;
  j["provenance"] = seq.provenance;
  j["weights"] = json::array();
  for (const auto& m : seq.m) j["weights"].push_back(m.w);
  return j;
}

MeasureSequence sequence_from_json(const json& j, std::size_t n) {
  if (!j.is_object() || !j.contains("weights"))
    throw Error(Err::BadInput, "sequence needs weights");
  MeasureSequence seq;
  seq.eps = j.value("eps", 0.5);
  seq.theta = j.value("theta", 0.0);
  seq.provenance = j.value("provenance", std::string("custom"));
  for (const auto& w : j["weights"]) seq.m.push_back(measure_from_json(w, n));
  if (seq.m.empty()) throw Error(Err::BadInput, "empty sequence");
  return seq;
}

json to_json(const CubeSystem& cubes) {
  json j;
  j["eps"] = cubes.eps;
  j["a"] = cubes.a;
  j["k_min"] = cubes.k_min;
  j["k_max"] = cubes.k_max;
  j["levels"] = json::array();
  for (const auto& lvl : cubes.levels) {
    json L = json::array();
    for (const auto& q : lvl) {
      json c;
      c["center"] = q.center;
      c["members"] = q.members;
      c["parent"] = q.parent == kNone ? json(nullptr) : json(q.parent);
      c["children"] = q.children;
      L.push_back(c);
    }
    j["levels"].push_back(L);
  }
  return j;
}

json to_json(const BallFamily& fam) {
  json j;
  j["kind"] = fam.kind == FamilyKind::Nice ? "nice" : "whitney";
  j["c"] = fam.c;
  j["delta"] = fam.delta;
  j["balls"] = json::array();
  for (const auto& b : fam.balls) j["balls"].push_back({{"center", b.center}, {"r", b.r}});
  return j;
}

json to_json(const FunctionalValue& v) {
  json j;
  j["value"] = v.value;
  j["lp"] = v.lp;
  j["osc"] = v.osc;
  j["exact"] = v.exact;
  j["witness"] = to_json(v.witness);
  if (!v.per_k.empty()) j["per_k"] = v.per_k;
  return j;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Err::BadInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Err::BadInput, path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(1) + "\n"); }

void write_text(const std::string& path, const std::string& text) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Err::BadInput, "cannot write " + path);
  out << text;
}

void save_instance(const std::string& dir, const Geometry& g, const MeasureSequence* seq) {
  write_json(join(dir, "space.json"), to_json(g.space));
  write_json(join(dir, "mu.json"), to_json(g.mu));
  write_json(join(dir, "S.json"), g.S);
  write_json(join(dir, "H.json"), to_json(g.H));
  json meta;
  meta["name"] = g.name;
  meta["n"] = g.space.size();
  meta["theta"] = g.theta;
  if (!g.parts.empty()) {
    meta["parts"] = g.parts;
    meta["part_theta"] = g.part_theta;
    meta["junction"] = g.junction;
    json ph = json::array();
    for (const auto& m : g.part_H) ph.push_back(m.w);
    meta["part_H"] = ph;
  }
  write_json(join(dir, "meta.json"), meta);
  if (seq) write_json(join(dir, "sequence.json"), to_json(*seq));
}

Instance load_instance(const std::string& dir) {
  Instance inst;
  Geometry& g = inst.g;
  g.space = space_from_json(read_json(join(dir, "space.json")));
  const std::size_t n = g.space.size();
  g.mu = measure_from_json(read_json(join(dir, "mu.json")), n);
  g.S = pointset_from_json(read_json(join(dir, "S.json")), n);
  g.H = measure_from_json(read_json(join(dir, "H.json")), n);
  json meta = read_json(join(dir, "meta.json"));
  g.name = meta.value("name", std::string("custom"));
  g.theta = meta.value("theta", 0.0);
  if (meta.contains("parts")) {
    for (const auto& p : meta["parts"]) g.parts.push_back(pointset_from_json(p, n));
    g.part_theta = array_of<double>(meta["part_theta"], "part_theta");
    for (const auto& w : meta["part_H"]) g.part_H.push_back(measure_from_json(w, n));
    g.junction = meta.value("junction", std::size_t{0});
  }
  if (std::filesystem::exists(join(dir, "sequence.json"))) {
    inst.has_sequence = true;
    inst.seq = sequence_from_json(read_json(join(dir, "sequence.json")), n);
  }
  return inst;
}

}  // namespace mms::io
