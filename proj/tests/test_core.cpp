#include <cmath>

#include "doctest.h"
#include "gen.hpp"
#include "mms/core.hpp"
#include "mms/parallel.hpp"

using namespace mms;

namespace {

double brute_ball_mass(const Space& s, const Measure& m, std::size_t x, double r) {
  double t = 0.0;
  for (std::size_t y = 0; y < s.size(); ++y)
    if (s.d(x, y) <= r + kTol) t += m.w[y];
  return t;
}

}  // namespace

TEST_CASE("space construction") {
  auto line = Space::from_points({{0.0}, {0.5}, {1.0}});
  CHECK(line.d(0, 2) == doctest::Approx(1.0));
  auto sq = Space::from_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  CHECK(sq.d(0, 3) == doctest::Approx(1.41421356).epsilon(1e-8));
  auto cheb = Space::from_points({{0, 0}, {1, 1}}, Metric::Chebyshev);
  CHECK(cheb.d(0, 1) == 1.0);

  try {
    Space::from_table({{0, 1, 5}, {1, 0, 1}, {5, 1, 0}});
    FAIL("expected a triangle violation");
  } catch (const Error& e) {
    CHECK(e.kind == Err::TriangleViolation);
  }
  try {
    Space::from_table({{0, 1}, {2, 0}});
    FAIL("expected asymmetry");
  } catch (const Error& e) {
    CHECK(e.kind == Err::AsymmetricTable);
  }
  try {
    Space::from_table({{0, -1}, {-1, 0}});
    FAIL("expected a negative distance");
  } catch (const Error& e) {
    CHECK(e.kind == Err::NegativeDistance);
  }
}

TEST_CASE("closed balls") {
  auto line = Space::from_points({{0.0}, {0.5}, {1.0}});
  CHECK(line.ball(0, 0.5) == PointSet{0, 1});
  CHECK(line.ball(1, 0.0) == PointSet{1});
  auto sq = Space::from_points({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  CHECK(sq.ball(0, 1.0) == PointSet{0, 1, 2});
}

TEST_CASE("ball counts agree with a direct scan") {
  gen::Rng r(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = Space::from_points(gen::cloud(r, 40));
    for (int q = 0; q < 20; ++q) {
      std::size_t x = r.integer(0, 39);
      double rad = r.uniform(0.0, 1.0);
      std::size_t cnt = 0;
      for (std::size_t y = 0; y < s.size(); ++y) cnt += s.d(x, y) <= rad + kTol;
      CHECK(s.ball_count(x, rad) == cnt);
    }
  }
}

TEST_CASE("k of r") {
  CHECK(k_of_r(1.0, 0.1) == 0);
  CHECK(k_of_r(0.1, 0.1) == 1);
  CHECK(k_of_r(0.05, 0.1) == 1);
  CHECK(k_of_r(0.0100001, 0.1) == 1);
  CHECK(k_of_r(0.01, 0.1) == 2);
  CHECK(k_of_r(2.0, 0.5) == -1);
  gen::Rng g(3);
  for (int i = 0; i < 500; ++i) {
    double eps = g.uniform(0.05, 0.9), rad = g.uniform(1e-4, 3.0);
    int k = k_of_r(rad, eps);
    CHECK(rad <= std::pow(eps, k) * (1 + 1e-12));
    CHECK(rad > std::pow(eps, k + 1) * (1 + 1e-12));
  }
}

TEST_CASE("nets on the 101-point line") {
  auto s = Space::from_points(gen::line_grid(101));
  auto nets = build_nets(s, 0.1, 0, 2);
  // the endpoints sit exactly eps^0 apart, which counts as separated
  CHECK(nets.level(0) == PointSet{0, 100});
  // greedy in input order keeps 0, 0.1, ..., 1
  CHECK(nets.level(1).size() == 11);
  auto one = Space::from_points({{0.3, 0.3}});
  auto n1 = build_nets(one, 0.1, 0, 3);
  for (int k = 0; k <= 3; ++k) CHECK(n1.level(k) == PointSet{0});
  CHECK_THROWS_AS(build_nets(s, 0.2, 0, 1), Error);
}

TEST_CASE("nets are separated and maximal (property)") {
  gen::Rng r(5);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = r.integer(5, 80);
    auto s = Space::from_points(gen::cloud(r, n, r.integer(1, 3)));
    double eps = r.uniform(0.02, 0.1);
    auto nets = build_nets(s, eps, 0, 2);
    for (int k = 0; k <= 2; ++k) {
      const double ek = std::pow(eps, k);
      const auto& Z = nets.level(k);
      for (std::size_t a = 0; a < Z.size(); ++a)
        for (std::size_t b = a + 1; b < Z.size(); ++b) CHECK(s.d(Z[a], Z[b]) >= ek - kTol);
      for (std::size_t x = 0; x < n; ++x) {
        double best = 1e300;
        for (auto z : Z) best = std::min(best, s.d(x, z));
        CHECK(best < ek);
      }
    }
  }
}

TEST_CASE("neighbourhoods and layers") {
  auto s = Space::from_points(gen::line_grid(101));
  auto all = all_points(101);
  auto L = neighborhood_and_layer(s, all, 0.1, 2);
  CHECK(L.U == all);
  CHECK(L.V.empty());
  auto L0 = neighborhood_and_layer(s, {0}, 0.1, 0);
  CHECK(L0.U.size() == 101);
  auto L1 = neighborhood_and_layer(s, {0}, 0.1, 1);
  for (auto x : L1.U) CHECK(s.d(x, 0) < 0.5);
  for (auto x : L1.V) CHECK(s.d(x, 0) >= 0.5 - kTol);
  CHECK(L1.U.size() + L1.V.size() == 101);
  CHECK(L1.V.front() == 50);
  CHECK_THROWS_AS(neighborhood_and_layer(s, {}, 0.1, 1), Error);
}

TEST_CASE("doubling constant") {
  auto s = Space::from_points(gen::line_grid(21));
  Measure u(std::vector<double>(21, 1.0));
  CHECK(doubling_constant(s, u, 0.05) <= 3.0 + 1e-12);

  Measure dirac = Measure::zero(21);
  dirac.w[7] = 1.0;
  CHECK(doubling_constant(s, dirac, 0.5) == 1.0);

  auto two = Space::from_points({{0.0}, {1.0}});
  CHECK(doubling_constant(two, Measure({1.0, 100.0}), 1.0) == doctest::Approx(101.0));
  CHECK_THROWS_AS(doubling_constant(two, Measure::zero(2), 1.0), Error);
}

TEST_CASE("doubling constant matches a dense radius sweep (property)") {
  gen::Rng r(8);
  for (int trial = 0; trial < 15; ++trial) {
    std::size_t n = r.integer(3, 25);
    auto s = Space::from_points(gen::cloud(r, n, 1));
    auto mu = gen::measure(r, n);
    double R = r.uniform(0.05, 0.6);
    double oracle = 1.0;
    std::vector<double> radii;
    for (int i = 1; i <= 400; ++i) radii.push_back(R * i / 400.0);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < n; ++y)
        for (double d : {s.d(x, y), s.d(x, y) / 2})
          if (d > 0 && d <= R) radii.push_back(d);
    for (std::size_t x = 0; x < n; ++x)
      for (double rad : radii) {
        double in = brute_ball_mass(s, mu, x, rad);
        if (in > 0) oracle = std::max(oracle, brute_ball_mass(s, mu, x, 2 * rad) / in);
      }
    CHECK(doubling_constant(s, mu, R) == doctest::Approx(oracle).epsilon(1e-12));
    // monotone in R
    CHECK(doubling_constant(s, mu, R) <= doubling_constant(s, mu, 2 * R) + 1e-12);
  }
}

TEST_CASE("packing bound dominates disjoint ball counts (property)") {
  gen::Rng r(21);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = Space::from_points(gen::cloud(r, 60));
    Measure mu(std::vector<double>(60, 1.0 / 60));
    const double eps = 0.1, c = 3.0;
    for (int k = 0; k <= 1; ++k) {
      const double ek = std::pow(eps, k);
      const double bound = packing_bound(s, mu, ek, c);
      for (std::size_t x = 0; x < 60; x += 7) {
        // greedy disjoint radius-ek balls centred inside B_{c ek}(x)
        PointSet chosen;
        for (auto y : s.ball(x, c * ek)) {
          bool ok = true;
          for (auto z : chosen) ok = ok && s.d(y, z) > 2 * ek;
          if (ok) chosen.push_back(y);
        }
        CHECK(chosen.size() <= bound);
      }
    }
  }
}

TEST_CASE("set algebra") {
  CHECK(set_union({1, 3}, {2, 3}) == PointSet{1, 2, 3});
  CHECK(set_intersection({1, 3, 5}, {3, 4, 5}) == PointSet{3, 5});
  CHECK(set_difference({1, 3, 5}, {3}) == PointSet{1, 5});
  CHECK(from_mask(to_mask({0, 4}, 6)) == PointSet{0, 4});
}

TEST_CASE("parallel loops rethrow and cover the range") {
  set_threads(4);
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
                    if (i == 73) throw Error(Err::BadParams, "boom");
                  }),
                  Error);
  set_threads(1);
}
