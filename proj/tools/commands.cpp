#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "mms/dyadic.hpp"
#include "mms/extension.hpp"
#include "mms/functionals.hpp"
#include "mms/potentials.hpp"

namespace mms::cli {

namespace {

constexpr const char* kEvalSchema =
    "# mms-eval v1 columns: id,lip,CN,BSN,BN,N,BSN_over_CN,BNosc_over_CN,N_over_BSN";

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string path_in(const std::string& dir, const char* file) {
  return (std::filesystem::path(dir) / file).string();
}

double eps_or(const RunConfig& cfg, double dflt) { return cfg.eps > 0.0 ? cfg.eps : dflt; }

double ratio(double a, double b) { return b > 0.0 ? a / b : 0.0; }

CantorConstruction build_cantor(double theta, int K) {
  return cantor_sequence(theta, K, std::ldexp(1.0, -(K + 3)));
}

Geometry cantor_geometry(const CantorConstruction& cc) {
  Geometry g;
  g.name = "cantor";
  g.space = cc.space;
  g.mu = cc.length;
  g.S = all_points(cc.space.size());
  g.H = cc.length;
  g.theta = cc.seq.theta;
  return g;
}

// Finest level whose radius drops below the smallest distance.
int resolving_level(const Space& space, double eps) {
  int k = 0;
  while (std::pow(eps, k) >= space.min_positive_distance()) ++k;
  return k;
}

double point_dist(Metric m, const std::vector<double>& p, const std::vector<double>& q) {
  double acc = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    double t = std::abs(p[c] - q[c]);
    acc = m == Metric::Euclidean ? acc + t * t : std::max(acc, t);
  }
  return m == Metric::Euclidean ? std::sqrt(acc) : acc;
}

struct Report {
  io::json checks = io::json::array();
  bool ok = true;

  void add(const std::string& name, bool pass, io::json detail = io::json::object()) {
    detail["name"] = name;
    detail["status"] = pass ? "pass" : "fail";
    checks.push_back(detail);
    ok = ok && pass;
  }
};

}  // namespace

std::vector<TestFunction> lipschitz_suite(const Space& space, std::size_t count,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = space.size();
  const auto& coords = space.coords();
  std::vector<double> lo, hi;
  if (!coords.empty()) {
    lo = hi = coords[0];
    for (const auto& p : coords)
      for (std::size_t c = 0; c < p.size(); ++c) {
        lo[c] = std::min(lo[c], p[c]);
        hi[c] = std::max(hi[c], p[c]);
      }
  }
  std::vector<TestFunction> out;
  for (std::size_t i = 0; i < count; ++i) {
    double a = 0.5 + 1.5 * unit(rng);
    double w = 1.0 + 7.0 * unit(rng);
    double phi = 6.283185307179586 * unit(rng);
    double b = -1.0 + 2.0 * unit(rng);
    TestFunction tf;
    tf.f.resize(n);
    if (coords.empty()) {
      std::size_t x0 = rng() % n, x1 = rng() % n;
      for (std::size_t x = 0; x < n; ++x)
        tf.f[x] = a * std::sin(w * space.d(x, x0) + phi) + b * space.d(x, x1);
    } else {
      // anchors anywhere in the bounding box, so refining the grid keeps f
      std::vector<double> y0(lo.size()), y1(lo.size());
      for (std::size_t c = 0; c < lo.size(); ++c) y0[c] = lo[c] + (hi[c] - lo[c]) * unit(rng);
      for (std::size_t c = 0; c < lo.size(); ++c) y1[c] = lo[c] + (hi[c] - lo[c]) * unit(rng);
      for (std::size_t x = 0; x < n; ++x)
        tf.f[x] = a * std::sin(w * point_dist(space.metric(), coords[x], y0) + phi) +
                  b * point_dist(space.metric(), coords[x], y1);
    }
    tf.lip = a * w + std::abs(b);
    out.push_back(std::move(tf));
  }
  return out;
}

io::Instance resolve_instance(const RunConfig& cfg) {
  if (!cfg.in.empty()) return io::load_instance(cfg.in);
  io::Instance inst;
  if (cfg.geometry == "cantor") {
    auto cc = build_cantor(cfg.cantor_theta, cfg.cantor_K);
    inst.g = cantor_geometry(cc);
    inst.has_sequence = true;
    inst.seq = cc.seq;
    return inst;
  }
  inst.g = make_geometry(cfg.geometry, cfg.size);
  return inst;
}

MeasureSequence sequence_for(const io::Instance& inst, double eps, double theta, int K) {
  if (inst.has_sequence) return inst.seq;
  const Geometry& g = inst.g;
  if (!g.parts.empty()) {
    double t = theta;
    for (double pt : g.part_theta) t = std::max(t, pt);
    return adr_composite(g.part_H, g.part_theta, t, eps, K);
  }
  return adr_sequence(g.H, g.theta, theta < 0.0 ? g.theta : theta, eps, K);
}

EvalResult run_eval(const RunConfig& cfg) {
  auto inst = resolve_instance(cfg);
  const Geometry& g = inst.g;
  double eps = inst.has_sequence ? inst.seq.eps : eps_or(cfg, 0.5);
  auto seq = sequence_for(inst, eps, cfg.theta, cfg.K);
  const double c = cfg.c > 0.0 ? cfg.c : 3.0 / eps;
  auto grid = cfg.delta_grid;
  if (grid.empty()) grid = {eps, eps * eps, eps * eps * eps};
  TraceSetup t{g.space, g.mu, g.S, seq, cfg.p};

  std::vector<TestFunction> suite;
  if (cfg.suite == "lipschitz") {
    suite = lipschitz_suite(g.space, cfg.functions, cfg.seed);
  } else if (cfg.suite == "constant") {
    std::mt19937_64 rng(cfg.seed);
    for (std::size_t i = 0; i < cfg.functions; ++i)
      suite.push_back({Field(g.space.size(), -2.0 + 4.0 * unit(rng)), 0.0});
  } else {
    throw Error(Err::BadParams, "unknown suite " + cfg.suite);
  }

  EvalResult res;
  std::ostringstream csv;
  csv << kEvalSchema << "\n";
  csv << "id,lip,CN,BSN,BN,N,BSN_over_CN,BNosc_over_CN,N_over_BSN\n";
  double lo[3], hi[3];
  for (int i = 0; i < 3; ++i) {
    lo[i] = std::numeric_limits<double>::infinity();
    hi[i] = -lo[i];
  }
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const Field& f = suite[i].f;
    EvalRow r;
    r.id = i;
    r.lip = suite[i].lip;
    r.CN = CN(f, t).value;
    auto nv = N_functional(f, t, c, grid, cfg.budget);
    r.BSN = nv.bsn1.value;
    r.N = nv.N.value;
    auto bn = BN(f, t, cfg.sigma);
    r.BN = bn.value;
    r.bn_osc = bn.osc;
    double q[3] = {ratio(r.BSN, r.CN), ratio(r.bn_osc, r.CN), ratio(r.N, r.BSN)};
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], q[k]);
      hi[k] = std::max(hi[k], q[k]);
    }
    csv << r.id << ',' << io::num(r.lip) << ',' << io::num(r.CN) << ',' << io::num(r.BSN)
        << ',' << io::num(r.BN) << ',' << io::num(r.N) << ',' << io::num(q[0]) << ','
        << io::num(q[1]) << ',' << io::num(q[2]) << '\n';
    res.rows.push_back(r);
  }
  res.csv = csv.str();
  io::json& s = res.summary;
  s["schema"] = "mms-eval v1";
  s["geometry"] = g.name;
  s["n"] = g.space.size();
  s["functions"] = suite.size();
  s["suite"] = cfg.suite;
  s["seed"] = cfg.seed;
  s["params"] = {{"eps", eps}, {"theta", seq.theta}, {"p", cfg.p}, {"c", c},
                 {"sigma", cfg.sigma}, {"K", seq.depth()}, {"budget", cfg.budget},
                 {"delta_grid", grid}};
  const char* names[3] = {"BSN_over_CN", "BNosc_over_CN", "N_over_BSN"};
  for (int k = 0; k < 3; ++k)
    s["ratios"][names[k]] = suite.empty() ? io::json{{"min", 0}, {"max", 0}}
                                          : io::json{{"min", lo[k]}, {"max", hi[k]}};
  return res;
}

int cmd_example(const RunConfig& cfg) {
  if (cfg.geometry == "cantor") {
    auto cc = build_cantor(cfg.cantor_theta, cfg.cantor_K);
    io::save_instance(cfg.out, cantor_geometry(cc), &cc.seq);
    io::json j;
    j["theta"] = cfg.cantor_theta;
    j["K"] = cfg.cantor_K;
    j["c1"] = cc.c1;
    j["c2"] = cc.c2;
    j["gap_length"] = cc.gap_length;
    j["E"] = cc.E;
    j["U"] = cc.U;
    j["U_tail"] = cc.U_tail;
    io::write_json(path_in(cfg.out, "cantor.json"), j);
    return kPass;
  }
  static const char* known[] = {"segment", "ball", "composite", "grid2d", "line"};
  if (std::find(std::begin(known), std::end(known), cfg.geometry) == std::end(known))
    throw Error(Err::BadParams, "unknown example " + cfg.geometry);
  io::save_instance(cfg.out, make_geometry(cfg.geometry, cfg.size));
  return kPass;
}

int cmd_eval(const RunConfig& cfg) {
  auto res = run_eval(cfg);
  io::write_text(path_in(cfg.out, "eval.csv"), res.csv);
  io::write_json(path_in(cfg.out, "eval_summary.json"), res.summary);
  return kPass;
}

int cmd_verify(const RunConfig& cfg) {
  auto inst = resolve_instance(cfg);
  const Geometry& g = inst.g;
  const Space& sp = g.space;
  const std::size_t n = sp.size();
  const double eps = eps_or(cfg, 0.1);
  Report rep;

  // nets, order, cubes
  const int kmax = resolving_level(sp, eps);
  auto nets = build_nets(sp, eps, 0, kmax);
  auto order = build_order(sp, nets);
  auto ov = verify_order(sp, nets, order);
  rep.add("partial_order", ov.empty(), {{"violations", ov}, {"k_max", kmax}});
  auto cubes = build_cubes(sp, nets, order);
  auto cv = verify_cubes(sp, cubes);
  rep.add("dyadic_cubes", cv.empty(), {{"violations", cv}});

  // partitions of unity
  Extender ext(sp, g.S, eps, cfg.J);
  {
    double worst = 0.0;
    for (int k = 1; k <= cfg.J; ++k) {
      PartitionOfUnity P = ext.pou(k);
      if (cfg.fault == "partition" && k == 1 && !P.rows[0].empty())
        P.rows[0][0].second *= 1.0 + 1e-6;
      for (std::size_t x = 0; x < n; ++x) worst = std::max(worst, std::abs(P.sum_at(x) - 1.0));
    }
    rep.add("partition_identity", worst <= 1e-12, {{"max_error", worst}});
  }

  // sequence conditions
  if (g.name == "cantor") {
    double th = cfg.cantor_theta;
    int K = cfg.cantor_K;
    if (!cfg.in.empty() && std::filesystem::exists(path_in(cfg.in, "cantor.json"))) {
      auto j = io::read_json(path_in(cfg.in, "cantor.json"));
      th = j.value("theta", th);
      K = j.value("K", K);
    }
    auto cc = build_cantor(th, K);
    auto b = cantor_bounds(cc);
    bool m2 = true, m3 = true, m5 = true;
    for (double r : b.m2_ratio) m2 = m2 && r <= 2.0;
    for (double r : b.m3_ratio) m3 = m3 && r >= 0.5;
    for (std::size_t k = 0; k < b.m5.size(); ++k) {
      m5 = m5 && b.m5[k] <= b.m5_bound[k];
      if (k >= 2 && k + 1 < b.m5.size()) m5 = m5 && b.m5[k + 1] < b.m5[k];
    }
    rep.add("cantor_M2", m2, {{"ratio_by_k", b.m2_ratio}, {"j_res", b.j_res}});
    rep.add("cantor_M3", m3, {{"ratio_by_k", b.m3_ratio}});
    rep.add("cantor_M4", b.C3 <= 2.0 * b.C3_bound, {{"C3", b.C3}, {"bound", b.C3_bound}});
    rep.add("cantor_M5_decay_observed", m5, {{"m5_by_k", b.m5}, {"bound_by_k", b.m5_bound}});
  } else {
    const int K = 5;
    auto seq = sequence_for(inst, 0.5, cfg.theta, K);
    auto sr = verify(seq, sp, g.mu, g.S, 0, K, {g.S});
    bool ok = std::isfinite(sr.C1) && sr.C2 > 0.0 && std::isfinite(sr.C3);
    rep.add("sequence_M1_M4", ok && sr.pass_M1,
            {{"C1", sr.C1}, {"C2", sr.C2}, {"C3", sr.C3}, {"m5_min", sr.m5_min_density}});
  }

  // extension steps and stabilization
  auto tf = lipschitz_suite(sp, 1, cfg.seed).front();
  {
    auto seq = inst.has_sequence && std::abs(inst.seq.eps - eps) < 1e-15
                   ? inst.seq
                   : adr_sequence(g.H, g.theta, g.theta, eps, cfg.J);
    auto er = ext.apply(tf.f, seq);
    std::vector<double> ds(n);
    for (std::size_t x = 0; x < n; ++x) ds[x] = sp.dist_to_set(x, g.S);
    std::size_t bad_support = 0, bad_stable = 0;
    for (int i = 1; i <= cfg.J; ++i)
      for (std::size_t x = 0; x < n; ++x)
        if (er.steps[i - 1][x] != 0.0 && !in_neighborhood(ds[x], eps, i - 2)) ++bad_support;
    for (std::size_t x = 0; x < n; ++x) {
      if (ds[x] == 0.0 || !er.stable[x]) continue;
      for (int j = er.j_star[x]; j <= cfg.J; ++j)
        if (er.approx[j - 1][x] != er.approx[er.j_star[x] - 1][x]) ++bad_stable;
    }
    rep.add("step_support", bad_support == 0, {{"violations", bad_support}});
    rep.add("stabilization", bad_stable == 0, {{"violations", bad_stable}});
  }

  // functionals
  {
    auto seq = sequence_for(inst, inst.has_sequence ? inst.seq.eps : 0.5, cfg.theta, cfg.K);
    const double fe = seq.eps;
    const double c = cfg.c > 0.0 ? cfg.c : 3.0 / fe;
    TraceSetup t{sp, g.mu, g.S, seq, cfg.p};
    auto nv = N_functional(tf.f, t, c, {fe, fe * fe, fe * fe * fe}, cfg.budget);
    bool nested = true;
    for (const auto& b : nv.bsn_delta) nested = nested && b.osc <= nv.bsn1.osc;
    double re = std::abs(family_value(tf.f, t, nv.bsn1.witness) - nv.bsn1.osc);
    auto viol = validate_family(nv.bsn1.witness, sp, g.S);
    rep.add("N_le_2BSN", nv.N.value <= 2.0 * nv.bsn1.value,
            {{"N", nv.N.value}, {"BSN", nv.bsn1.value}});
    rep.add("BSN_delta_nested", nested);
    rep.add("witness_reevaluation", re <= 1e-9 * std::max(1.0, nv.bsn1.osc) && viol.empty(),
            {{"abs_error", re}, {"violations", viol.size()}});
  }

  // potentials
  {
    const Measure& m = g.H;
    auto hw = hedberg_wolff_check(sp, g.mu, m, g.S, cfg.p, eps, cfg.R);
    rep.add("hedberg_wolff_finite", std::isfinite(hw.ratio) && (m.total() == 0.0 || !hw.undefined),
            {{"lhs", hw.lhs}, {"rhs", hw.rhs}, {"ratio", hw.ratio}});
    auto du = duality_gap(sp, g.mu, g.mu, m, cfg.p, eps, cfg.R);
    double gap = std::abs(du.primal - du.dual);
    rep.add("duality", gap <= 1e-9 * std::max(1.0, du.dual),
            {{"primal", du.primal}, {"dual", du.dual}});
  }

  io::json out;
  out["geometry"] = g.name;
  out["n"] = n;
  out["checks"] = rep.checks;
  out["pass"] = rep.ok;
  io::write_json(path_in(cfg.out, "verify.json"), out);
  return rep.ok ? kPass : kInvariantFailure;
}

int cmd_extend(const RunConfig& cfg) {
  auto inst = resolve_instance(cfg);
  const Geometry& g = inst.g;
  const double eps = eps_or(cfg, 0.1);
  auto seq = inst.has_sequence && std::abs(inst.seq.eps - eps) < 1e-15
                 ? inst.seq
                 : adr_sequence(g.H, g.theta, g.theta, eps, cfg.J);
  auto suite = lipschitz_suite(g.space, cfg.functions, cfg.seed);
  Extender ext(g.space, g.S, eps, cfg.J);
  io::json fields = io::json::array();
  std::ostringstream csv;
  csv << "# mms-residual v1 columns: function,point,k,residual\n";
  csv << "function,point,k,residual\n";
  for (std::size_t i = 0; i < suite.size(); ++i) {
    auto er = ext.apply(suite[i].f, seq);
    fields.push_back({{"id", i}, {"values", er.values}, {"j_star", er.j_star}});
    for (const auto& r : trace_residual(suite[i].f, er, g.space, g.mu, g.S, eps, 1, cfg.J))
      csv << i << ',' << r.point << ',' << r.k << ',' << io::num(r.residual) << '\n';
  }
  io::write_json(path_in(cfg.out, "extension.json"),
                 {{"eps", eps}, {"J", cfg.J}, {"seed", cfg.seed}, {"fields", fields}});
  io::write_text(path_in(cfg.out, "residuals.csv"), csv.str());
  return kPass;
}

int cmd_potentials(const RunConfig& cfg) {
  auto inst = resolve_instance(cfg);
  const Geometry& g = inst.g;
  const double eps = eps_or(cfg, 0.1);
  const Measure& m = g.H;
  auto I = riesz(g.space, g.mu, m, eps, cfg.R);
  auto W = wolff(g.space, g.mu, m, eps, cfg.R, cfg.p);
  auto hw = hedberg_wolff_check(g.space, g.mu, m, g.S, cfg.p, eps, cfg.R);
  io::write_json(path_in(cfg.out, "riesz.json"), I.values);
  io::write_json(path_in(cfg.out, "wolff.json"), W.values);
  io::json rep;
  rep["lhs"] = hw.lhs;
  rep["rhs"] = hw.rhs;
  rep["ratio"] = hw.ratio;
  rep["undefined"] = hw.undefined;
  rep["params"] = {{"p", cfg.p}, {"eps", eps}, {"R", cfg.R}, {"c1R", hw.c1R}, {"c2R", hw.c2R}};
  io::write_json(path_in(cfg.out, "hedberg_wolff.json"), rep);
  return kPass;
}

int run(const RunConfig& cfg) {
  try {
    if (cfg.command == "example") return cmd_example(cfg);
    if (cfg.command == "eval") return cmd_eval(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "extend") return cmd_extend(cfg);
    if (cfg.command == "potentials") return cmd_potentials(cfg);
    throw Error(Err::BadParams, "unknown command " + cfg.command);
  } catch (const Error& e) {
    std::cerr << "error: " << err_name(e.kind) << ": " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace mms::cli
