#include <cmath>
#include <numeric>

#include "doctest.h"
#include "gen.hpp"
#include "mms/geometries.hpp"
#include "mms/regular_seq.hpp"

using namespace mms;

namespace {

// direct partial sum plus an Euler-Maclaurin tail from N on
double zeta_tail_oracle(double theta, long M) {
  const long N = 2000000;
  double s = 0.0;
  for (long m = N - 1; m >= M; --m) s += std::pow(static_cast<double>(m), -theta);
  const double n = static_cast<double>(std::max(N, M));
  s += std::pow(n, 1 - theta) / (theta - 1) + 0.5 * std::pow(n, -theta) -
       theta / 12 * std::pow(n, -theta - 1);
  return s;
}

}  // namespace

TEST_CASE("adr recipe") {
  Measure base({1.0, 2.0, 0.0, 0.5});
  auto same = adr_sequence(base, 1.0, 1.0, 0.5, 4);
  for (int k = 0; k <= 4; ++k) CHECK(same.at(k).w == base.w);
  auto up = adr_sequence(base, 1.0, 2.0, 0.5, 4);
  CHECK(up.at(3).w[1] == doctest::Approx(16.0));
  CHECK(up.at(3).w[2] == 0.0);
  CHECK_THROWS_AS(adr_sequence(base, 1.0, 0.5, 0.5, 2), Error);

  Measure b2({0.0, 1.0, 1.0, 0.0});
  auto comp = adr_composite({base, b2}, {1.0, 0.0}, 1.0, 0.5, 3);
  auto s1 = adr_sequence(base, 1.0, 1.0, 0.5, 3), s2 = adr_sequence(b2, 0.0, 1.0, 0.5, 3);
  for (int k = 0; k <= 3; ++k)
    for (std::size_t x = 0; x < 4; ++x)
      CHECK(comp.at(k).w[x] == doctest::Approx(s1.at(k).w[x] + s2.at(k).w[x]));
}

TEST_CASE("verify on the adr recipe") {
  auto g = make_segment(11);
  auto seq = adr_sequence(g.H, g.theta, g.theta, 0.5, 3);
  auto rep = verify(seq, g.space, g.mu, g.S, 0, 3, {g.S});
  CHECK(rep.pass_M1);
  CHECK(rep.C3 == doctest::Approx(1.0));
  CHECK(std::isfinite(rep.C1));
  CHECK(rep.C2 > 0.0);

  // theta = 0 constant sequence on a full-dimensional set
  auto b = make_ball(11);
  auto flat = adr_sequence(b.H, 0.0, 0.0, 0.5, 3);
  auto rb = verify(flat, b.space, b.mu, b.S, 0, 3, {b.S});
  CHECK(rb.C3 == 1.0);

  // supports that disagree
  auto bad = seq;
  bad.m[2].w[g.S.front()] = 0.0;
  CHECK_THROWS_AS(verify(bad, g.space, g.mu, g.S, 0, 3, {g.S}), Error);
}

TEST_CASE("zeta tail and Cantor constants") {
  for (double th : {1.2, 1.5, 1.8})
    for (long M : {1L, 2L, 7L, 100L}) {
      CAPTURE(th);
      CAPTURE(M);
      CHECK(zeta_tail(th, M) == doctest::Approx(zeta_tail_oracle(th, M)).epsilon(1e-9));
    }
  CHECK(cantor_c1(1.5) == doctest::Approx(2 * zeta_tail_oracle(1.5, 1)).epsilon(1e-9));
  CHECK(cantor_c1(1.5) == doctest::Approx(5.2247506974).epsilon(1e-9));
  // min over j of 2^j / (1+j)^(theta-1) is attained at j = 0 for theta < 2
  CHECK(cantor_c2(1.5) == 1.0);
}

TEST_CASE("Cantor construction") {
  const double th = 1.5;
  const int K = 4;
  auto cc = cantor_sequence(th, K, std::ldexp(1.0, -(K + 3)));
  CHECK(cc.gap_length[1] == doctest::Approx(1.0 / cc.c1));
  for (int k = 1; k <= K; ++k)
    CHECK(cc.gap_length[k + 1] ==
          doctest::Approx(1.0 / (cc.c1 * std::ldexp(1.0, k) * std::pow(k, th))));
  // omega_0 is identically one
  for (std::size_t x = 0; x < cc.space.size(); ++x)
    CHECK(cc.seq.at(0).w[x] == doctest::Approx(cc.length.w[x]));
  CHECK(cc.length.total() == doctest::Approx(1.0));
  CHECK_THROWS_AS(cantor_sequence(2.5, K, 0.01), Error);
  CHECK_THROWS_AS(cantor_sequence(th, K, 0.25), Error);

  auto cb = cantor_bounds(cc);
  for (int k = 0; k <= K; ++k) {
    CAPTURE(k);
    CHECK(cb.m2_ratio[k] <= 2.0);
    CHECK(cb.m3_ratio[k] >= 0.5);
    CHECK(cb.m5[k] <= cb.m5_bound[k] + 1e-12);
  }
  CHECK(cb.C3 <= cb.C3_bound + 1e-9);
  for (int k = 2; k < K; ++k) CHECK(cb.m5_bound[k + 1] < cb.m5_bound[k]);
}

TEST_CASE("redistribution caps (property)") {
  gen::Rng r(42);
  for (int trial = 0; trial < 12; ++trial) {
    std::size_t n = r.integer(20, 90);
    auto pts = gen::cloud(r, n, 1);
    auto s = Space::from_points(pts);
    auto mu = gen::measure(r, n);
    auto S = gen::subset(r, n, 0.5);
    const double eps = 0.1;
    auto nets = build_nets(s, eps, 0, 2, {}, S);
    auto po = build_order(s, nets);
    auto qc = build_quasicubes(s, nets, po);
    const double theta = r.uniform(0.0, 1.0);
    const int j = 2, k = static_cast<int>(r.integer(0, 2));
    Redistribution rd;
    try {
      rd = redistribute(s, qc, mu, theta, j, k);
    } catch (const Error& e) {
      CHECK(e.kind == Err::EmptyCube);
      continue;
    }
    const auto& fine = rd.stages.front();
    const auto& last = rd.stages.back();
    CHECK(rd.stages.size() == static_cast<std::size_t>(j - k + 1));
    // atomwise monotone, mass non-increasing stage to stage
    for (std::size_t t = 1; t < rd.stages.size(); ++t) {
      double a = 0.0, b = 0.0;
      for (std::size_t x = 0; x < fine.size(); ++x) {
        CHECK(rd.stages[t][x] <= rd.stages[t - 1][x]);
        a += rd.stages[t - 1][x];
        b += rd.stages[t][x];
      }
      CHECK(b <= a);
    }
    // caps at every level from k to j
    for (int i = k; i <= j; ++i) {
      std::vector<double> sum(qc.level(i).size(), 0.0);
      for (std::size_t b = 0; b < last.size(); ++b) sum[rd.anc[i][b]] += last[b];
      for (std::size_t a = 0; a < sum.size(); ++a) CHECK(sum[a] <= rd.h[i][a] * (1 + 1e-12));
    }
    // one factor per group at each stage
    for (std::size_t t = 1; t < rd.stages.size(); ++t) {
      const int i = j - static_cast<int>(t);
      std::vector<double> f(qc.level(i).size(), -1.0);
      for (std::size_t b = 0; b < fine.size(); ++b) {
        if (!(rd.stages[t - 1][b] > 0.0)) continue;
        double q = rd.stages[t][b] / rd.stages[t - 1][b];
        auto& slot = f[rd.anc[i][b]];
        if (slot < 0) slot = q;
        else CHECK(q == doctest::Approx(slot).epsilon(1e-12));
      }
    }
    // the measure puts the last stage on the level-j centres
    CHECK(rd.m.total() == doctest::Approx(std::accumulate(last.begin(), last.end(), 0.0)));
  }
}

TEST_CASE("redistribution with slack caps is the identity") {
  auto s = Space::from_points(gen::line_grid(11));
  Measure mu(std::vector<double>(11, 1.0));
  auto nets = build_nets(s, 0.1, 0, 1);
  auto qc = build_quasicubes(s, nets, build_order(s, nets));
  auto rd = redistribute(s, qc, mu, 0.0, 1, 1);
  CHECK(rd.stages.size() == 1);
  auto rd0 = redistribute(s, qc, mu, 0.0, 1, 0);
  // at theta = 0 the cap of a parent is its own mass, so no scaling happens
  CHECK(rd0.stages.back() == rd0.stages.front());
}
