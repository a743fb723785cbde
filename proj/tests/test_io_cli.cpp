#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace mms;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("mms_io_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("json round trips") {
  gen::Rng r(3);
  auto s = Space::from_points(gen::cloud(r, 12, 2), Metric::Chebyshev);
  auto s2 = io::space_from_json(io::to_json(s));
  REQUIRE(s2.size() == 12);
  CHECK(s2.metric() == Metric::Chebyshev);
  for (std::size_t x = 0; x < 12; ++x)
    for (std::size_t y = 0; y < 12; ++y) CHECK(s2.d(x, y) == s.d(x, y));

  auto tab = Space::from_table({{0, 1, 2}, {1, 0, 1.5}, {2, 1.5, 0}});
  auto tab2 = io::space_from_json(io::to_json(tab));
  CHECK(tab2.d(0, 2) == 2.0);

  auto m = gen::measure(r, 12, true);
  CHECK(io::measure_from_json(io::to_json(m), 12).w == m.w);
  CHECK_THROWS_AS(io::measure_from_json(io::to_json(m), 11), Error);
  CHECK(io::pointset_from_json(io::json{5, 1, 5, 3}, 12) == PointSet{1, 3, 5});
  CHECK_THROWS_AS(io::pointset_from_json(io::json{12}, 12), Error);

  auto seq = adr_sequence(m, 0.0, 1.0, 0.5, 3);
  auto seq2 = io::sequence_from_json(io::to_json(seq), 12);
  CHECK(seq2.eps == seq.eps);
  CHECK(seq2.theta == seq.theta);
  REQUIRE(seq2.depth() == 3);
  for (int k = 0; k <= 3; ++k) CHECK(seq2.at(k).w == seq.at(k).w);

  for (double v : {0.1, 1.0 / 3, 1e-300, 123456789.125, -2.5})
    CHECK(std::stod(io::num(v)) == v);
}

TEST_CASE("instances on disk") {
  auto dir = scratch("instance");
  auto g = make_segment(11);
  io::save_instance(dir.string(), g);
  auto back = io::load_instance(dir.string());
  CHECK(back.g.space.size() == g.space.size());
  CHECK(back.g.S == g.S);
  CHECK(back.g.mu.w == g.mu.w);
  CHECK(back.g.H.w == g.H.w);
  CHECK(back.g.theta == g.theta);
  CHECK_FALSE(back.has_sequence);
  CHECK_THROWS_AS(io::load_instance((dir / "missing").string()), Error);
  fs::remove_all(dir);
}

TEST_CASE("lipschitz suite") {
  auto g = make_segment(11);
  auto a = cli::lipschitz_suite(g.space, 5, 9);
  auto b = cli::lipschitz_suite(g.space, 5, 9);
  auto c = cli::lipschitz_suite(g.space, 5, 10);
  CHECK(a[3].f == b[3].f);
  CHECK(a[3].f != c[3].f);
  // the stated Lipschitz constant bounds every difference quotient
  for (const auto& tf : a)
    for (std::size_t x = 0; x < g.space.size(); ++x)
      for (std::size_t y = x + 1; y < g.space.size(); ++y)
        CHECK(std::abs(tf.f[x] - tf.f[y]) <= tf.lip * g.space.d(x, y) + 1e-12);
}

TEST_CASE("eval output") {
  cli::RunConfig cfg;
  cfg.command = "eval";
  cfg.geometry = "segment";
  cfg.size = 11;
  cfg.functions = 3;
  auto one = cli::run_eval(cfg);
  auto two = cli::run_eval(cfg);
  CHECK(one.csv == two.csv);
  CHECK(one.csv.rfind("# mms-eval v1", 0) == 0);
  for (const auto& r : one.rows) CHECK(r.N <= 2 * r.BSN + 1e-12);

  cfg.suite = "constant";
  auto k = cli::run_eval(cfg);
  for (const auto& r : k.rows) {
    CHECK(r.bn_osc <= 1e-12);
    CHECK(r.BSN == doctest::Approx(r.CN));
    CHECK(r.N == doctest::Approx(r.CN));
    CHECK(r.BN == doctest::Approx(r.CN));
  }
}

TEST_CASE("functionals scale with |lambda|") {
  auto g = make_segment(11);
  auto seq = adr_sequence(g.H, g.theta, g.theta, 0.5, 12);
  TraceSetup t{g.space, g.mu, g.S, seq, 2.0};
  const std::vector<double> grid{0.5, 0.25, 0.125};
  for (const auto& tf : cli::lipschitz_suite(g.space, 3, 4)) {
    auto n1 = N_functional(tf.f, t, 6.0, grid);
    for (double lam : {2.0, 3.0, -2.0}) {
      Field h(tf.f);
      for (auto& v : h) v *= lam;
      const double L = std::abs(lam);
      CHECK(CN(h, t).value == doctest::Approx(L * CN(tf.f, t).value).epsilon(1e-12));
      CHECK(BN(h, t, 0.1).value == doctest::Approx(L * BN(tf.f, t, 0.1).value).epsilon(1e-12));
      auto n2 = N_functional(h, t, 6.0, grid);
      CHECK(n2.N.value == doctest::Approx(L * n1.N.value).epsilon(1e-12));
      CHECK(n2.bsn1.value == doctest::Approx(L * n1.bsn1.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("commands and exit codes") {
  auto dir = scratch("cmd");
  cli::RunConfig cfg;
  cfg.out = dir.string();
  cfg.size = 11;

  cfg.command = "nope";
  CHECK(cli::run(cfg) == cli::kInputError);

  cfg.command = "example";
  cfg.geometry = "teapot";
  CHECK(cli::run(cfg) == cli::kInputError);
  cfg.geometry = "segment";
  REQUIRE(cli::run(cfg) == cli::kPass);
  CHECK(fs::exists(dir / "space.json"));

  cli::RunConfig v;
  v.command = "verify";
  v.in = dir.string();
  v.out = (dir / "v").string();
  CHECK(cli::run(v) == cli::kPass);
  auto rep = io::read_json((dir / "v" / "verify.json").string());
  CHECK(rep["pass"] == true);

  v.fault = "partition";
  v.out = (dir / "vf").string();
  CHECK(cli::run(v) == cli::kInvariantFailure);
  auto bad = io::read_json((dir / "vf" / "verify.json").string());
  bool flagged = false;
  for (const auto& c : bad["checks"])
    if (c["name"] == "partition_identity") flagged = c["status"] == "fail";
  CHECK(flagged);

  cli::RunConfig missing;
  missing.command = "eval";
  missing.in = (dir / "absent").string();
  missing.out = (dir / "e").string();
  CHECK(cli::run(missing) == cli::kInputError);

  cli::RunConfig e;
  e.command = "eval";
  e.in = dir.string();
  e.functions = 2;
  e.out = (dir / "e1").string();
  REQUIRE(cli::run(e) == cli::kPass);
  e.out = (dir / "e2").string();
  REQUIRE(cli::run(e) == cli::kPass);
  CHECK(slurp(dir / "e1" / "eval.csv") == slurp(dir / "e2" / "eval.csv"));

  cli::RunConfig x;
  x.command = "extend";
  x.in = dir.string();
  x.functions = 2;
  x.out = (dir / "x").string();
  CHECK(cli::run(x) == cli::kPass);
  CHECK(fs::exists(dir / "x" / "residuals.csv"));

  cli::RunConfig p;
  p.command = "potentials";
  p.in = dir.string();
  p.out = (dir / "p").string();
  CHECK(cli::run(p) == cli::kPass);
  CHECK(io::read_json((dir / "p" / "hedberg_wolff.json").string())["undefined"] == false);

  cli::RunConfig cc;
  cc.command = "example";
  cc.geometry = "cantor";
  cc.out = (dir / "cantor").string();
  REQUIRE(cli::run(cc) == cli::kPass);
  auto cj = io::read_json((dir / "cantor" / "cantor.json").string());
  CHECK(cj["gap_length"].size() == 8);
  fs::remove_all(dir);
}
