#include "mms/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>

#include "mms/measures.hpp"
#include "mms/parallel.hpp"

namespace mms {

namespace {

std::vector<double> dist_to_S(const Space& space, const PointSet& S) {
  std::vector<double> ds(space.size(), std::numeric_limits<double>::infinity());
  for (std::size_t x = 0; x < space.size(); ++x)
    for (auto y : S) ds[x] = std::min(ds[x], space.d(x, y));
  return ds;
}

bool balls_meet(const Space& space, const Ball& a, const Ball& b) {
  std::size_t ca = space.ball_count(a.center, a.r);
  std::size_t cb = space.ball_count(b.center, b.r);
  const Ball& small = ca <= cb ? a : b;
  const Ball& big = ca <= cb ? b : a;
  auto ord = space.order(small.center);
  for (std::size_t t = 0, c = std::min(ca, cb); t < c; ++t)
    if (within(space.d(big.center, ord[t]), big.r)) return true;
  return false;
}

std::vector<std::unique_ptr<OscillationTracker>> make_trackers(
    const Field& f, const MeasureSequence& seq) {
  std::vector<std::unique_ptr<OscillationTracker>> tr;
  for (int k = 0; k <= seq.depth(); ++k)
    tr.push_back(std::make_unique<OscillationTracker>(f, seq.m[k]));
  return tr;
}

// Sorted radii with near-duplicates merged.
void sort_unique(std::vector<double>& r) {
  std::sort(r.begin(), r.end());
  std::vector<double> out;
  for (double v : r)
    if (out.empty() || v - out.back() > 1e-12 * std::max(1.0, v)) out.push_back(v);
  r.swap(out);
}

}  // namespace

std::vector<Violation> validate_family(const BallFamily& fam, const Space& space,
                                       const PointSet& S) {
  std::vector<Violation> bad;
  const auto& B = fam.balls;
  for (std::size_t i = 0; i < B.size(); ++i)
    for (std::size_t j = i + 1; j < B.size(); ++j)
      if (balls_meet(space, B[i], B[j])) bad.push_back({"B1", {i, j}});
  for (std::size_t i = 0; i < B.size(); ++i) {
    if (B[i].r > fam.delta + 1e-12) bad.push_back({"B2", {i}});
    double ds = space.dist_to_set(B[i].center, S);
    if (!within(ds, fam.c * B[i].r)) bad.push_back({"B3", {i}});
    if (fam.kind == FamilyKind::Whitney && within(ds, B[i].r)) bad.push_back({"B4", {i}});
  }
  return bad;
}

double lp_norm(const Field& f, const Measure& m, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (m.w[i] > 0.0) s += std::pow(std::abs(f[i]), p) * m.w[i];
  return std::pow(s, 1.0 / p);
}

Field sharp_maximal(const Field& f, const TraceSetup& t) {
  const Space& space = t.space;
  const std::size_t n = space.size();
  const double eps = t.seq.eps;
  const int K = t.seq.depth();
  auto ds = dist_to_S(space, t.S);
  Field out(n, 0.0);
  // depth check up front so the error does not depend on threading
  for (std::size_t x = 0; x < n; ++x) {
    auto sd = space.sorted_dist(x);
    std::size_t c0 = space.ball_count(x, 0.0);
    if (c0 >= n || sd[c0] / 2 > 1.0) continue;
    if (k_of_r(sd[c0] / 2, eps) > K)
      throw Error(Err::SequenceDepthExceeded, "sharp maximal needs finer measures");
  }
  parallel_blocks(n, [&](std::size_t lo, std::size_t hi) {
    auto tr = make_trackers(f, t.seq);
    std::vector<double> radii;
    for (std::size_t x = lo; x < hi; ++x) {
      auto sd = space.sorted_dist(x);
      auto ord = space.order(x);
      std::size_t c0 = space.ball_count(x, 0.0);
      if (c0 >= n) continue;
      const double r_lo = sd[c0] / 2;
      if (r_lo > 1.0) continue;
      const int k_top = k_of_r(r_lo, eps);
      double best = 0.0;
      for (int k = k_top; k >= 0; --k) {
        const double top = std::min(1.0, std::pow(eps, k));
        const double bottom = std::pow(eps, k + 1);
        radii.clear();
        // bottom is the open end of the band: the sup there is the limit
        // from the right, i.e. the closed balls at r = bottom under m_k
        radii.push_back(bottom);
        for (std::size_t j = c0; j < n; ++j) {
          double r = sd[j] / 2;
          if (r > top * (1 + 1e-12)) break;
          if (k_of_r(r, eps) == k) radii.push_back(r);
        }
        if (ds[x] > 0.0 && ds[x] <= top && k_of_r(ds[x], eps) == k) radii.push_back(ds[x]);
        sort_unique(radii);
        auto& T = *tr[k];
        T.reset();
        std::size_t ptr = 0;
        for (double r : radii) {
          if (!within(ds[x], r)) continue;
          std::size_t cnt = space.ball_count(x, 2 * r);
          for (; ptr < cnt; ++ptr) T.insert(ord[ptr]);
          if (!(T.mass() > 0.0)) continue;
          best = std::max(best, T.query().E / r);
        }
      }
      out[x] = best;
    }
  });
  return out;
}

FunctionalValue CN(const Field& f, const TraceSetup& t) {
  FunctionalValue v;
  v.lp = lp_norm(f, t.seq.at(0), t.p);
  v.osc = lp_norm(sharp_maximal(f, t), t.mu, t.p);
  v.value = v.lp + v.osc;
  return v;
}

PointSet porous_points(const Space& space, const PointSet& S, double r, double sigma) {
  if (!(sigma > 0.0) || sigma > 1.0 || !(r > 0.0))
    throw Error(Err::BadParams, "porosity needs sigma in (0,1] and r > 0");
  auto ds = dist_to_S(space, S);
  const double rho = sigma * r;
  PointSet out;
  for (std::size_t x = 0; x < space.size(); ++x) {
    // the smallest admissible rho is best for both conditions
    auto ord = space.order(x);
    std::size_t cnt = space.ball_count(x, r - rho);
    for (std::size_t t = 0; t < cnt; ++t)
      if (ds[ord[t]] > rho + kTol) {
        out.push_back(x);
        break;
      }
  }
  return out;
}

FunctionalValue BN(const Field& f, const TraceSetup& t, double sigma) {
  FunctionalValue v;
  const double p = t.p, eps = t.seq.eps, theta = t.seq.theta;
  v.lp = lp_norm(f, t.seq.at(0), p);
  Field fs = sharp_maximal(f, t);
  double sharp_S = 0.0;
  for (auto x : t.S) sharp_S += std::pow(fs[x], p) * t.mu.w[x];
  sharp_S = std::pow(sharp_S, 1.0 / p);
  double total = 0.0;
  for (int k = 1; k <= t.seq.depth(); ++k) {
    const Measure& mk = t.seq.at(k);
    const double ek = std::pow(eps, k);
    double term = 0.0;
    for (auto x : porous_points(t.space, t.S, ek, sigma)) {
      if (!(mk.w[x] > 0.0)) continue;
      double E = best_l1_constant(f, t.space.ball(x, ek), mk).E;
      term += std::pow(E, p) * mk.w[x];
    }
    term *= std::pow(eps, k * (theta - p));
    v.per_k.push_back(term);
    total += term;
  }
  v.osc = sharp_S + std::pow(total, 1.0 / p);
  v.value = v.lp + v.osc;
  return v;
}

double ball_contribution(const Field& f, const TraceSetup& t, double c, const Ball& b) {
  int k = k_of_r(b.r, t.seq.eps);
  double E = tilde_E(t.space, f, b.center, c * b.r, t.seq.at(k), t.S);
  return ball_mass(t.space, t.mu, b.center, b.r) / std::pow(b.r, t.p) * std::pow(E, t.p);
}

double family_value(const Field& f, const TraceSetup& t, const BallFamily& fam) {
  double s = 0.0;
  for (const auto& b : fam.balls) s += ball_contribution(f, t, fam.c, b);
  return std::pow(s, 1.0 / t.p);
}

CandidatePool build_pool(const Field& f, const TraceSetup& t, double c) {
  if (!(c > 1.0)) throw Error(Err::BadParams, "dilation c must exceed 1");
  const Space& space = t.space;
  const std::size_t n = space.size();
  const double eps = t.seq.eps, p = t.p;
  const int K = t.seq.depth();
  auto ds = dist_to_S(space, t.S);
  std::vector<std::vector<Candidate>> per(n);
  parallel_blocks(n, [&](std::size_t lo, std::size_t hi) {
    auto tr = make_trackers(f, t.seq);
    std::vector<double> radii;
    for (std::size_t x = lo; x < hi; ++x) {
      auto sd = space.sorted_dist(x);
      auto ord = space.order(x);
      auto pmu = prefix_mass(space, t.mu, x);
      radii.clear();
      for (std::size_t j = 1; j < n; ++j) {
        if (sd[j] <= kTol) continue;
        radii.push_back(sd[j]);
        radii.push_back(sd[j] / (2 * c));
      }
      if (ds[x] > 0.0) radii.push_back(ds[x] / c);
      sort_unique(radii);
      int cur = -1;
      std::size_t ptr = 0;
      double best = 0.0;
      auto& out = per[x];
      for (double r : radii) {
        if (r > 1.0 + 1e-12) break;
        r = std::min(r, 1.0);
        if (!within(ds[x], c * r)) continue;
        int k = k_of_r(r, eps);
        if (k > K) continue;
        if (k != cur) {
          tr[k]->reset();
          ptr = 0;
          cur = k;
        }
        auto& T = *tr[k];
        std::size_t cnt2 = space.ball_count(x, 2 * c * r);
        for (; ptr < cnt2; ++ptr) T.insert(ord[ptr]);
        if (!(T.mass() > 0.0)) continue;
        double E = T.query().E;
        std::size_t cnt = space.ball_count(x, r);
        double w = pmu[cnt] / std::pow(r, p) * std::pow(E, p);
        if (!(w > best)) continue;
        best = w;
        Candidate cd{{x, r}, w, cnt, ds[x] > r + kTol};
        if (!out.empty() && out.back().size == cnt) out.back() = cd;
        else out.push_back(cd);
      }
    }
  });
  CandidatePool pool;
  pool.c = c;
  for (auto& v : per) pool.items.insert(pool.items.end(), v.begin(), v.end());
  return pool;
}

namespace {

// Heuristic decisions compare weights on a grid of 2^-32 times the largest
// pool weight. Scaling f then moves a weight across a grid line only with
// negligible probability, so the chosen family does not depend on rounding.
std::vector<std::int64_t> weight_keys(const CandidatePool& pool) {
  double wmax = 0.0;
  for (const auto& c : pool.items) wmax = std::max(wmax, c.w);
  std::vector<std::int64_t> key(pool.items.size(), 0);
  if (!(wmax > 0.0)) return key;
  for (std::size_t i = 0; i < key.size(); ++i)
    key[i] = std::llround(std::ldexp(pool.items[i].w / wmax, 32));
  return key;
}

struct Searcher {
  const Space& space;
  const CandidatePool& pool;
  const std::vector<std::size_t>& idx;  // admissible pool items
  std::vector<std::int64_t> key;

  double weight(const std::vector<std::size_t>& fam) const {
    double s = 0.0;
    for (auto i : fam) s += pool.items[i].w;
    return s;
  }
  std::int64_t key_sum(const std::vector<std::size_t>& fam) const {
    std::int64_t s = 0;
    for (auto i : fam) s += key[i];
    return s;
  }

  SearchResult exact() const {
    const std::size_t m = idx.size();
    std::vector<std::size_t> ord(idx);
    std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
      return pool.items[a].w != pool.items[b].w ? pool.items[a].w > pool.items[b].w : a < b;
    });
    std::vector<std::uint32_t> conf(m, 0);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b)
        if (balls_meet(space, pool.items[ord[a]].ball, pool.items[ord[b]].ball)) {
          conf[a] |= 1u << b;
          conf[b] |= 1u << a;
        }
    std::vector<double> suffix(m + 1, 0.0);
    for (std::size_t a = m; a-- > 0;) suffix[a] = suffix[a + 1] + pool.items[ord[a]].w;
    double best = -1.0;
    std::uint32_t best_set = 0;
    std::function<void(std::size_t, std::uint32_t, std::uint32_t, double)> rec =
        [&](std::size_t a, std::uint32_t set, std::uint32_t banned, double s) {
          if (s > best) { best = s; best_set = set; }
          if (a == m || s + suffix[a] <= best) return;
          if (!(banned >> a & 1u))
            rec(a + 1, set | 1u << a, banned | conf[a], s + pool.items[ord[a]].w);
          rec(a + 1, set, banned, s);
        };
    rec(0, 0, 0, 0.0);
    SearchResult res;
    res.exact = true;
    for (std::size_t a = 0; a < m; ++a)
      if (best_set >> a & 1u) res.chosen.push_back(ord[a]);
    std::sort(res.chosen.begin(), res.chosen.end());
    res.sum = weight(res.chosen);
    return res;
  }

  // Occupancy of points by family members.
  struct Board {
    std::vector<std::size_t> owner;
    explicit Board(std::size_t n) : owner(n, kNoOwner) {}
    static constexpr std::size_t kNoOwner = static_cast<std::size_t>(-1);
  };

  void occupy(Board& b, std::size_t i, std::size_t who) const {
    const auto& c = pool.items[i];
    auto ord = space.order(c.ball.center);
    for (std::size_t t = 0; t < c.size; ++t) b.owner[ord[t]] = who;
  }

  bool free(const Board& b, std::size_t i) const {
    const auto& c = pool.items[i];
    auto ord = space.order(c.ball.center);
    for (std::size_t t = 0; t < c.size; ++t)
      if (b.owner[ord[t]] != Board::kNoOwner) return false;
    return true;
  }

  void fill(Board& b, std::vector<std::size_t>& fam,
            const std::vector<std::size_t>& order) const {
    for (auto i : order)
      if (free(b, i)) {
        occupy(b, i, i);
        fam.push_back(i);
      }
  }

  SearchResult heuristic(const std::vector<std::vector<std::size_t>>& incumbents) const {
    const std::size_t n = space.size();
    auto by_density = idx;
    std::sort(by_density.begin(), by_density.end(), [&](std::size_t a, std::size_t b) {
      const auto da = key[a] * static_cast<std::int64_t>(pool.items[b].size);
      const auto db = key[b] * static_cast<std::int64_t>(pool.items[a].size);
      return da != db ? da > db : a < b;
    });
    auto by_weight = idx;
    std::sort(by_weight.begin(), by_weight.end(), [&](std::size_t a, std::size_t b) {
      return key[a] != key[b] ? key[a] > key[b] : a < b;
    });
    std::vector<char> ok(pool.items.size(), 0);
    for (auto i : idx) ok[i] = 1;

    std::vector<std::vector<std::size_t>> starts;
    for (const auto* order : {&by_density, &by_weight}) {
      Board b(n);
      std::vector<std::size_t> fam;
      fill(b, fam, *order);
      starts.push_back(fam);
    }
    for (const auto& inc : incumbents) {
      Board b(n);
      std::vector<std::size_t> fam;
      for (auto i : inc)
        if (ok[i] && free(b, i)) {
          occupy(b, i, i);
          fam.push_back(i);
        }
      starts.push_back(fam);
    }
    std::size_t pick = 0;
    for (std::size_t s = 1; s < starts.size(); ++s)
      if (key_sum(starts[s]) > key_sum(starts[pick])) pick = s;
    std::vector<std::size_t> fam = starts[pick];

    Board b(n);
    for (auto i : fam) occupy(b, i, i);
    std::vector<char> in(pool.items.size(), 0);
    for (auto i : fam) in[i] = 1;
    fill(b, fam, by_density);
    for (auto i : fam) in[i] = 1;

    // 1-for-many swaps: bring in a ball worth more than what it displaces
    std::vector<std::size_t> hit;
    for (int pass = 0; pass < 30; ++pass) {
      bool improved = false;
      for (auto i : by_weight) {
        if (in[i]) continue;
        const auto& c = pool.items[i];
        auto ord = space.order(c.ball.center);
        hit.clear();
        for (std::size_t t = 0; t < c.size; ++t) {
          std::size_t o = b.owner[ord[t]];
          if (o != Board::kNoOwner) hit.push_back(o);
        }
        std::sort(hit.begin(), hit.end());
        hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
        std::int64_t lost = 0;
        for (auto h : hit) lost += key[h];
        if (key[i] <= lost) continue;
        for (auto h : hit) {
          const auto& ch = pool.items[h];
          auto oh = space.order(ch.ball.center);
          for (std::size_t t = 0; t < ch.size; ++t) b.owner[oh[t]] = Board::kNoOwner;
          in[h] = 0;
        }
        occupy(b, i, i);
        in[i] = 1;
        improved = true;
      }
      fam.clear();
      for (auto i : idx)
        if (in[i]) fam.push_back(i);
      std::size_t before = fam.size();
      fill(b, fam, by_density);
      for (std::size_t q = before; q < fam.size(); ++q) in[fam[q]] = 1;
      if (!improved) break;
    }
    SearchResult res;
    res.chosen.clear();
    for (auto i : idx)
      if (in[i]) res.chosen.push_back(i);
    res.sum = weight(res.chosen);
    res.exact = false;
    // never below an incumbent that is feasible as it stands
    for (const auto& inc : incumbents) {
      bool all_ok = true;
      for (auto i : inc) all_ok = all_ok && ok[i];
      if (all_ok && weight(inc) > res.sum) {
        res.chosen = inc;
        std::sort(res.chosen.begin(), res.chosen.end());
        res.sum = weight(res.chosen);
      }
    }
    return res;
  }
};

BallFamily to_family(const CandidatePool& pool, const SearchResult& r, double delta,
                     FamilyKind kind) {
  BallFamily fam;
  fam.kind = kind;
  fam.c = pool.c;
  fam.delta = delta;
  for (auto i : r.chosen) fam.balls.push_back(pool.items[i].ball);
  return fam;
}

}  // namespace

SearchResult search_family(const Space& space, const CandidatePool& pool,
                           double delta, bool whitney, std::size_t budget,
                           const std::vector<std::vector<std::size_t>>& incumbents) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < pool.items.size(); ++i) {
    const auto& c = pool.items[i];
    if (c.ball.r > delta + 1e-12) continue;
    if (whitney && !c.avoids_S) continue;
    idx.push_back(i);
  }
  Searcher s{space, pool, idx, weight_keys(pool)};
  if (idx.size() <= std::min<std::size_t>(budget, 31)) return s.exact();
  return s.heuristic(incumbents);
}

FunctionalValue BSN(const Field& f, const TraceSetup& t, double c, double delta,
                    std::size_t budget) {
  if (!(delta > 0.0) || delta > 1.0) throw Error(Err::BadParams, "delta must lie in (0,1]");
  auto pool = build_pool(f, t, c);
  auto r = search_family(t.space, pool, delta, false, budget);
  FunctionalValue v;
  v.lp = lp_norm(f, t.seq.at(0), t.p);
  v.osc = std::pow(r.sum, 1.0 / t.p);
  v.value = v.lp + v.osc;
  v.exact = r.exact;
  v.witness = to_family(pool, r, delta, FamilyKind::Nice);
  return v;
}

NValue N_functional(const Field& f, const TraceSetup& t, double c,
                    const std::vector<double>& delta_grid, std::size_t budget) {
  if (c < 3.0 / t.seq.eps - 1e-12) throw Error(Err::BadParams, "N needs c >= 3/eps");
  if (delta_grid.empty()) throw Error(Err::EmptyGrid, "empty delta grid");
  auto pool = build_pool(f, t, c);
  const double lp = lp_norm(f, t.seq.at(0), t.p);
  auto make = [&](const SearchResult& r, double delta, FamilyKind kind, bool with_lp) {
    FunctionalValue v;
    v.lp = with_lp ? lp : 0.0;
    v.osc = std::pow(r.sum, 1.0 / t.p);
    v.value = v.lp + v.osc;
    v.exact = r.exact;
    v.witness = to_family(pool, r, delta, kind);
    return v;
  };
  NValue out;
  std::vector<std::vector<std::size_t>> seeds;
  auto w = search_family(t.space, pool, 1.0, true, budget);
  seeds.push_back(w.chosen);
  out.whitney = make(w, 1.0, FamilyKind::Whitney, false);
  for (double d : delta_grid) {
    if (!(d > 0.0) || d > 1.0) throw Error(Err::BadParams, "delta must lie in (0,1]");
    auto r = search_family(t.space, pool, d, false, budget);
    seeds.push_back(r.chosen);
    out.bsn_delta.push_back(make(r, d, FamilyKind::Nice, true));
  }
  auto b1 = search_family(t.space, pool, 1.0, false, budget, seeds);
  out.bsn1 = make(b1, 1.0, FamilyKind::Nice, true);
  std::size_t lo = 0;
  for (std::size_t i = 1; i < out.bsn_delta.size(); ++i)
    if (out.bsn_delta[i].value < out.bsn_delta[lo].value) lo = i;
  out.N.lp = lp;
  out.N.osc = out.bsn_delta[lo].osc + out.whitney.osc;
  out.N.value = out.bsn_delta[lo].value + out.whitney.value;
  out.N.exact = out.whitney.exact && out.bsn_delta[lo].exact;
  out.N.witness = out.whitney.witness;
  return out;
}

}  // namespace mms
