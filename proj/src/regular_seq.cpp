#include "mms/regular_seq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mms {

const Measure& MeasureSequence::at(int k) const {
  if (k < 0 || k > depth())
    throw Error(Err::SequenceDepthExceeded, "sequence index out of range");
  return m[k];
}

namespace {

// Calls fn(count, r_lo, r_hi) for each constant piece [r_lo, r_hi) of the
// ball B_r(x), r_lo running over 0 and the distinct distances.
template <class Fn>
void for_each_piece(const Space& space, std::size_t x, Fn&& fn) {
  auto sd = space.sorted_dist(x);
  const std::size_t n = sd.size();
  std::size_t t = 1;
  double lo = 0.0;
  while (true) {
    std::size_t c = space.ball_count(x, lo);
    t = c;
    double hi = t < n ? sd[t] : std::numeric_limits<double>::infinity();
    if (!fn(c, lo, hi)) return;
    if (t >= n) return;
    lo = hi;
  }
}

}  // namespace

SequenceReport verify(const MeasureSequence& seq, const Space& space,
                      const Measure& mu, const PointSet& S, int k_lo, int k_hi,
                      const std::vector<PointSet>& test_sets,
                      const SequenceThresholds& th) {
  if (k_lo < 0 || k_hi > seq.depth() || k_lo > k_hi)
    throw Error(Err::SequenceDepthExceeded, "k range outside the sequence");
  const std::size_t n = space.size();
  const double eps = seq.eps, theta = seq.theta;
  SequenceReport rep;

  // M1
  PointSet supp0 = seq.at(0).support();
  for (int k = 0; k <= seq.depth(); ++k)
    if (seq.at(k).support() != supp0) rep.pass_M1 = false;
  if (supp0 != S) rep.pass_M1 = false;
  if (!rep.pass_M1) throw Error(Err::SupportMismatch, "supports differ (M1)");

  for (int k = k_lo; k <= k_hi; ++k) {
    const Measure& mk = seq.at(k);
    const double ek = std::pow(eps, k);
    for (std::size_t x = 0; x < n; ++x) {
      auto pm = prefix_mass(space, mk, x);
      auto pmu = prefix_mass(space, mu, x);
      // C1: sup over r in (0, eps^k]; on a piece the ball is fixed and r^theta
      // grows, so the sup is the right end of the piece
      for_each_piece(space, x, [&](std::size_t c, double lo, double hi) {
        if (lo > ek + kTol) return false;
        double r = std::min(hi, ek);
        if (pmu[c] > 0.0) rep.C1 = std::max(rep.C1, pm[c] * std::pow(r, theta) / pmu[c]);
        return true;
      });
    }
    for (auto x : S) {
      auto pm = prefix_mass(space, mk, x);
      auto pmu = prefix_mass(space, mu, x);
      // C2: inf over r in [eps^k, 1], attained at left ends of pieces
      auto eval = [&](double r) {
        std::size_t c = space.ball_count(x, r);
        if (!(pmu[c] > 0.0)) throw Error(Err::ZeroMuBall, "mu vanishes on a ball");
        rep.C2 = std::min(rep.C2, pm[c] * std::pow(r, theta) / pmu[c]);
      };
      if (ek <= 1.0 + kTol) eval(std::min(ek, 1.0));
      auto sd = space.sorted_dist(x);
      for (std::size_t t = 1; t < n; ++t)
        if (sd[t] > ek && sd[t] <= 1.0 + kTol) eval(sd[t]);
    }
  }

  // C3
  const Measure& m0 = seq.at(0);
  for (auto x : supp0)
    for (int k = k_lo; k <= k_hi; ++k)
      for (int j = 0; k + j <= k_hi; ++j) {
        double wk = seq.at(k)[x] / m0[x], wkj = seq.at(k + j)[x] / m0[x];
        if (!(wk > 0.0) || !(wkj > 0.0)) throw Error(Err::ZeroDensity, "zero density");
        rep.C3 = std::max({rep.C3, wk / wkj, std::pow(eps, theta * j) * wkj / wk});
      }

  // M5 surrogate
  rep.m5_min_by_k.assign(k_hi - k_lo + 1, std::numeric_limits<double>::infinity());
  rep.m5_max_by_k.assign(k_hi - k_lo + 1, 0.0);
  for (const auto& E : test_sets) {
    auto mask = to_mask(E, n);
    for (auto x : E) {
      double best = 0.0;
      for (int k = k_lo; k <= k_hi; ++k) {
        const Measure& mk = seq.at(k);
        auto ord = space.order(x);
        std::size_t c = space.ball_count(x, std::pow(eps, k));
        double in = 0.0, all = 0.0;
        for (std::size_t t = 0; t < c; ++t) {
          all += mk[ord[t]];
          if (mask[ord[t]]) in += mk[ord[t]];
        }
        double ratio = all > 0.0 ? in / all : 0.0;
        rep.m5_min_by_k[k - k_lo] = std::min(rep.m5_min_by_k[k - k_lo], ratio);
        rep.m5_max_by_k[k - k_lo] = std::max(rep.m5_max_by_k[k - k_lo], ratio);
        best = std::max(best, ratio);
      }
      rep.m5_min_density = std::min(rep.m5_min_density, best);
    }
  }

  rep.pass_C1 = std::isfinite(rep.C1) && rep.C1 <= th.C1_max;
  rep.pass_C2 = rep.C2 > 0.0 && rep.C2 >= th.C2_min;
  rep.pass_C3 = rep.C3 <= th.C3_max;
  rep.pass_M5 = test_sets.empty() || rep.m5_min_density >= th.m5_min;
  return rep;
}

MeasureSequence adr_sequence(const Measure& base, double theta_base, double theta,
                             double eps, int K) {
  return adr_composite({base}, {theta_base}, theta, eps, K);
}

MeasureSequence adr_composite(const std::vector<Measure>& bases,
                              const std::vector<double>& theta_bases, double theta,
                              double eps, int K) {
  if (bases.empty() || bases.size() != theta_bases.size())
    throw Error(Err::BadParams, "bases and exponents differ in length");
  if (!(eps > 0.0 && eps < 1.0) || K < 0) throw Error(Err::BadParams, "bad eps or K");
  for (double tb : theta_bases)
    if (theta < tb) throw Error(Err::ThetaOrder, "theta below a base exponent");
  MeasureSequence seq;
  seq.eps = eps;
  seq.theta = theta;
  seq.provenance = "adr";
  for (int k = 0; k <= K; ++k) {
    Measure mk = Measure::zero(bases[0].size());
    for (std::size_t i = 0; i < bases.size(); ++i)
      mk = mk + bases[i].scaled(std::pow(eps, -k * (theta - theta_bases[i])));
    seq.m.push_back(std::move(mk));
  }
  return seq;
}

double zeta_tail(double theta, long M) {
  if (!(theta > 1.0) || M < 1) throw Error(Err::BadParams, "zeta_tail needs theta > 1");
  const long N = M + 4000;
  double head = 0.0;
  for (long m = N - 1; m >= M; --m) head += std::pow(static_cast<double>(m), -theta);
  // Euler-Maclaurin remainder for the sum from N on
  const double x = static_cast<double>(N);
  double tail = std::pow(x, 1.0 - theta) / (theta - 1.0) + 0.5 * std::pow(x, -theta) +
                theta / 12.0 * std::pow(x, -theta - 1.0) -
                theta * (theta + 1) * (theta + 2) / 720.0 * std::pow(x, -theta - 3.0);
  return head + tail;
}

double cantor_c1(double theta) { return 2.0 * zeta_tail(theta, 1); }

double cantor_c2(double theta) {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j <= 400; ++j)
    best = std::min(best, std::pow(2.0, j) / std::pow(1.0 + j, theta - 1.0));
  return best;
}

CantorConstruction cantor_sequence(double theta, int K, double h_max) {
  if (!(theta > 1.0 && theta < 2.0))
    throw Error(Err::ThetaOutOfRange, "theta must lie in (1,2)");
  if (K < 1) throw Error(Err::BadParams, "depth must be at least 1");
  if (!(h_max > 0.0) || h_max > std::ldexp(1.0, -(K + 2)))
    throw Error(Err::GridTooCoarse, "cells must not exceed 2^-(K+2)");
  CantorConstruction cc;
  cc.K = K;
  cc.c1 = cantor_c1(theta);
  cc.c2 = cantor_c2(theta);
  cc.gap_length.assign(K + 2, 0.0);
  cc.gap_length[1] = 1.0 / cc.c1;
  for (int k = 1; k <= K; ++k)
    cc.gap_length[k + 1] = 1.0 / (cc.c1 * std::ldexp(1.0, k) * std::pow(k, theta));

  // pieces of [0,1]: kind 0 = interval of E_{K+1}, kind i = gap of U_i
  struct Piece { double a, b; int kind; };
  std::vector<Piece> pieces{{0.0, 1.0, 0}};
  for (int i = 1; i <= K + 1; ++i) {
    std::vector<Piece> next;
    for (const auto& p : pieces) {
      if (p.kind != 0) { next.push_back(p); continue; }
      double g = cc.gap_length[i];
      double mid = 0.5 * (p.a + p.b);
      if (!(g < p.b - p.a)) throw Error(Err::BadParams, "gap exceeds its interval");
      next.push_back({p.a, mid - g / 2, 0});
      next.push_back({mid - g / 2, mid + g / 2, i});
      next.push_back({mid + g / 2, p.b, 0});
    }
    pieces.swap(next);
  }
  // inside each interval of E_{K+1} the gaps of U_i, i > K+1, take a fixed
  // share: per interval sum_{i>=K+2} 2^{i-K-2} g_i = (1/(c1 2^{K+1})) sum_{m>=K+1} m^-theta
  const double tail_len = zeta_tail(theta, K + 1) / (cc.c1 * std::ldexp(1.0, K + 1));

  std::vector<std::vector<double>> pts;
  std::vector<double> len;
  std::vector<int> kind;  // 0 = E, i = U_i, -1 = tail gaps
  for (const auto& p : pieces) {
    double L = p.b - p.a;
    int cells = std::max(1, static_cast<int>(std::ceil(L / h_max - 1e-12)));
    double cl = L / cells;
    double tail_frac = p.kind == 0 ? tail_len / L : 0.0;
    for (int c = 0; c < cells; ++c) {
      double left = p.a + c * cl;
      if (p.kind == 0) {
        pts.push_back({left + 0.25 * cl, 0.0});
        len.push_back(cl * (1.0 - tail_frac));
        kind.push_back(0);
        pts.push_back({left + 0.75 * cl, 0.0});
        len.push_back(cl * tail_frac);
        kind.push_back(-1);
      } else {
        pts.push_back({left + 0.5 * cl, 0.0});
        len.push_back(cl);
        kind.push_back(p.kind);
      }
    }
  }
  cc.space = Space::from_points(pts);
  cc.length = Measure(len);
  cc.U.assign(K + 2, {});
  for (std::size_t x = 0; x < kind.size(); ++x) {
    if (kind[x] == 0) cc.E.push_back(x);
    else if (kind[x] < 0) cc.U_tail.push_back(x);
    else cc.U[kind[x]].push_back(x);
  }
  cc.seq.eps = 0.5;
  cc.seq.theta = theta;
  cc.seq.provenance = "cantor";
  for (int k = 0; k <= K; ++k) {
    const double tail_coef = std::pow(2.0, (theta - 1) * k) * std::pow(k + 1.0, theta - 1);
    std::vector<double> w(kind.size());
    for (std::size_t x = 0; x < kind.size(); ++x) {
      double omega;
      if (kind[x] == 0) omega = 1.0;
      else if (kind[x] < 0 || kind[x] > k) omega = tail_coef;
      else omega = std::pow(2.0, (theta - 1) * kind[x]) * std::pow(kind[x], theta - 1);
      w[x] = omega * len[x];
    }
    cc.seq.m.emplace_back(std::move(w));
  }
  return cc;
}

CantorBounds cantor_bounds(const CantorConstruction& cc) {
  const double th = cc.seq.theta;
  const Space& sp = cc.space;
  const std::size_t n = sp.size();
  CantorBounds b;
  const double gmin = cc.gap_length[cc.K + 1];
  b.j_res = static_cast<int>(std::floor(std::log2(1.0 / gmin)));
  const double m2c = std::pow(2.0, th) / (th - 1.0) * 15.0;
  const double m3c = 1.0 / (cc.c1 * (th - 1.0));
  for (int k = 0; k <= cc.K; ++k) {
    const Measure& mk = cc.seq.at(k);
    double worst2 = 0.0, worst3 = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < n; ++x) {
      auto pm = prefix_mass(sp, mk, x);
      for (int j = k; j <= b.j_res; ++j) {
        double m = pm[sp.ball_count(x, std::ldexp(1.0, -j))];
        worst2 = std::max(worst2, m / (m2c * std::pow(2.0, -(2.0 - th) * j)));
      }
    }
    for (auto x : cc.E) {
      double m = ball_mass(sp, mk, x, std::ldexp(1.0, -k));
      worst3 = std::min(worst3, m / (m3c * std::pow(2.0, -k * (2.0 - th))));
    }
    b.m2_ratio.push_back(worst2);
    b.m3_ratio.push_back(worst3);
  }
  auto rep = verify(cc.seq, sp, cc.length, all_points(n), 0, cc.K, {cc.E});
  b.C3 = rep.C3;
  b.C3_bound = std::max(1.0, 1.0 / cc.c2);
  b.m5 = rep.m5_max_by_k;
  for (int k = 0; k <= cc.K; ++k)
    b.m5_bound.push_back(2.0 * cc.c1 * (th - 1.0) * std::pow(2.0, -k * (th - 1.0)));
  return b;
}

Redistribution redistribute(const Space& space, const CubeSystem& qc,
                            const Measure& mu, double theta, int j, int k) {
  if (k > j || k < qc.k_min || j > qc.k_max)
    throw Error(Err::BadParams, "levels outside the quasicube system");
  Redistribution rd;
  rd.j = j;
  rd.k = k;
  auto ambient = quasicube_ambient(space, qc);
  const int top = qc.k_max - qc.k_min;
  rd.h.resize(top + 1);
  for (int li = 0; li <= top; ++li) {
    const double scale = std::pow(qc.eps, (qc.k_min + li) * theta);
    for (const auto& amb : ambient[li]) {
      double m = mu.mass(amb);
      if (!(m > 0.0)) throw Error(Err::EmptyCube, "quasicube with zero mass");
      rd.h[li].push_back(m / scale);
    }
  }
  const int lj = j - qc.k_min;
  const std::size_t nj = qc.levels[lj].size();
  rd.anc.assign(top + 1, {});
  rd.anc[lj].resize(nj);
  for (std::size_t b = 0; b < nj; ++b) rd.anc[lj][b] = b;
  for (int li = lj - 1; li >= 0; --li) {
    rd.anc[li].resize(nj);
    for (std::size_t b = 0; b < nj; ++b)
      rd.anc[li][b] = qc.levels[li + 1][rd.anc[li + 1][b]].parent;
  }
  std::vector<double> atoms(rd.h[lj]);
  rd.stages.push_back(atoms);
  for (int i = j - 1; i >= k; --i) {
    const int li = i - qc.k_min;
    std::vector<double> sum(qc.levels[li].size(), 0.0);
    for (std::size_t b = 0; b < nj; ++b) sum[rd.anc[li][b]] += atoms[b];
    std::vector<double> factor(sum.size(), 1.0);
    for (std::size_t a = 0; a < sum.size(); ++a)
      if (sum[a] > rd.h[li][a]) factor[a] = rd.h[li][a] / sum[a];
    // shave the factor until the rescaled group sum stays under the cap
    for (bool again = true; again;) {
      again = false;
      std::vector<double> s2(sum.size(), 0.0);
      for (std::size_t b = 0; b < nj; ++b) s2[rd.anc[li][b]] += atoms[b] * factor[rd.anc[li][b]];
      for (std::size_t a = 0; a < sum.size(); ++a)
        if (factor[a] < 1.0 && s2[a] > rd.h[li][a]) {
          factor[a] = std::nextafter(factor[a], 0.0);
          again = true;
        }
    }
    for (std::size_t b = 0; b < nj; ++b) atoms[b] *= factor[rd.anc[li][b]];
    rd.stages.push_back(atoms);
  }
  rd.m = Measure::zero(space.size());
  for (std::size_t b = 0; b < nj; ++b) rd.m.w[qc.levels[lj][b].center] = atoms[b];
  return rd;
}

}  // namespace mms
