#include "mms/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mms {

double average(const Field& f, const PointSet& G, const Measure& m) {
  double mass = 0.0, acc = 0.0;
  for (auto i : G) {
    mass += m.w[i];
    acc += f[i] * m.w[i];
  }
  return mass > 0.0 ? acc / mass : 0.0;
}

namespace {

double l1_dev(const Field& f, const PointSet& G, const Measure& m, double c,
              double mass) {
  double acc = 0.0;
  for (auto i : G) acc += std::abs(f[i] - c) * m.w[i];
  return acc / mass;
}

}  // namespace

BestConstant best_l1_constant(const Field& f, const PointSet& G, const Measure& m) {
  std::vector<std::size_t> idx;
  double mass = 0.0;
  for (auto i : G)
    if (m.w[i] > 0.0) {
      idx.push_back(i);
      mass += m.w[i];
    }
  if (!(mass > 0.0)) throw Error(Err::ZeroMass, "best_l1_constant on a null set");
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return f[a] != f[b] ? f[a] < f[b] : a < b;
  });
  std::size_t t = 0;
  double cum = 0.0;
  for (; t < idx.size(); ++t) {
    cum += m.w[idx[t]];
    if (2.0 * cum >= mass * (1.0 - 1e-13)) break;
  }
  if (t == idx.size()) t = idx.size() - 1;
  // rounding can land one value off the optimum; compare with neighbours
  std::vector<double> cands{f[idx[t]]};
  for (std::size_t s = t; s-- > 0;)
    if (f[idx[s]] != f[idx[t]]) { cands.push_back(f[idx[s]]); break; }
  for (std::size_t s = t + 1; s < idx.size(); ++s)
    if (f[idx[s]] != f[idx[t]]) { cands.push_back(f[idx[s]]); break; }
  std::sort(cands.begin(), cands.end());
  BestConstant best{std::numeric_limits<double>::infinity(), 0.0};
  for (double c : cands) {
    double e = l1_dev(f, G, m, c, mass);
    if (e < best.E) best = {e, c};
  }
  return best;
}

double tilde_E(const Space& space, const Field& f, std::size_t center, double r,
               const Measure& m, const PointSet& supp_test) {
  bool hit = false;
  for (auto y : supp_test)
    if (within(space.d(center, y), r)) { hit = true; break; }
  if (!hit) return 0.0;
  return best_l1_constant(f, space.ball(center, 2 * r), m).E;
}

OscillationTracker::OscillationTracker(const Field& f, const Measure& m)
    : f_(f), m_(m) {
  const std::size_t n = f.size();
  by_rank_.resize(n);
  std::iota(by_rank_.begin(), by_rank_.end(), std::size_t{0});
  std::sort(by_rank_.begin(), by_rank_.end(), [&](std::size_t a, std::size_t b) {
    return f[a] != f[b] ? f[a] < f[b] : a < b;
  });
  rank_.resize(n);
  for (std::size_t r = 0; r < n; ++r) rank_[by_rank_[r]] = r;
  tw_.assign(n + 1, 0.0);
  twf_.assign(n + 1, 0.0);
  while ((log_ << 1) <= n) log_ <<= 1;
}

void OscillationTracker::add(std::vector<double>& tree, std::size_t pos, double v) {
  for (; pos < tree.size(); pos += pos & (~pos + 1)) {
    if (&tree == &tw_ && tree[pos] == 0.0) touched_.push_back(pos);
    tree[pos] += v;
  }
}

double OscillationTracker::prefix(const std::vector<double>& tree,
                                  std::size_t pos) const {
  double s = 0.0;
  for (; pos > 0; pos -= pos & (~pos + 1)) s += tree[pos];
  return s;
}

void OscillationTracker::reset() {
  for (auto p : touched_) {
    tw_[p] = 0.0;
    twf_[p] = 0.0;
  }
  touched_.clear();
  total_w_ = total_wf_ = 0.0;
}

void OscillationTracker::insert(std::size_t i) {
  double w = m_.w[i];
  if (w == 0.0) return;
  std::size_t pos = rank_[i] + 1;
  add(tw_, pos, w);
  add(twf_, pos, w * f_[i]);
  total_w_ += w;
  total_wf_ += w * f_[i];
}

BestConstant OscillationTracker::query() const {
  if (!(total_w_ > 0.0)) throw Error(Err::ZeroMass, "oscillation of a null set");
  const double target = 0.5 * total_w_ * (1.0 - 1e-13);
  std::size_t pos = 0;
  double rem = target;
  for (std::size_t step = log_; step > 0; step >>= 1) {
    if (pos + step < tw_.size() && tw_[pos + step] < rem) {
      pos += step;
      rem -= tw_[pos];
    }
  }
  std::size_t r = std::min(pos, tw_.size() - 2);  // 0-based rank of the median
  double c = f_[by_rank_[r]];
  double wle = prefix(tw_, r + 1), sle = prefix(twf_, r + 1);
  double e = (c * wle - sle) + ((total_wf_ - sle) - c * (total_w_ - wle));
  return {std::max(0.0, e / total_w_), c};
}

namespace {

using Bits = std::vector<std::uint64_t>;

bool subset_of(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

std::size_t popcount(const Bits& a) {
  std::size_t c = 0;
  for (auto w : a) c += __builtin_popcountll(w);
  return c;
}

}  // namespace

std::vector<ContentCandidate> content_candidates(const Space& space,
                                                 const Measure& mu,
                                                 const PointSet& E, double theta,
                                                 double delta) {
  const std::size_t words = (E.size() + 63) / 64;
  std::vector<ContentCandidate> all;
  for (std::size_t ei = 0; ei < E.size(); ++ei) {
    const std::size_t x = E[ei];
    auto sd = space.sorted_dist(x);
    auto pm = prefix_mass(space, mu, x);
    std::vector<double> radii;
    double prev = 0.0;
    for (std::size_t t = 1; t < sd.size(); ++t) {
      if (sd[t] <= prev + kTol) continue;
      radii.push_back(0.5 * (prev + sd[t]));
      radii.push_back(sd[t]);
      prev = sd[t];
    }
    std::vector<std::pair<double, std::size_t>> e_dist;  // distance to E members
    for (std::size_t j = 0; j < E.size(); ++j) e_dist.push_back({space.d(x, E[j]), j});
    std::sort(e_dist.begin(), e_dist.end());
    if (E.size() == 1 && std::none_of(radii.begin(), radii.end(),
                                      [&](double r) { return r < delta; }))
      radii.push_back(0.5 * delta);
    // per distinct coverage keep the cheapest radius
    std::vector<ContentCandidate> local;
    std::size_t covered_count = 0;
    for (double r : radii) {
      if (!(r < delta) || !(r > 0.0)) continue;
      std::size_t c = 0;
      while (c < e_dist.size() && within(e_dist[c].first, r)) ++c;
      double cost = pm[space.ball_count(x, r)] / std::pow(r, theta);
      if (!local.empty() && c == covered_count) {
        if (cost < local.back().ball.cost) local.back().ball = {x, r, cost};
        continue;
      }
      ContentCandidate cand;
      cand.ball = {x, r, cost};
      cand.covers.assign(words, 0);
      for (std::size_t t = 0; t < c; ++t)
        cand.covers[e_dist[t].second / 64] |= std::uint64_t{1} << (e_dist[t].second % 64);
      local.push_back(std::move(cand));
      covered_count = c;
    }
    for (auto& c : local) all.push_back(std::move(c));
  }
  // drop dominated candidates; ties keep the earlier one
  std::vector<char> dead(all.size(), 0);
  for (std::size_t a = 0; a < all.size(); ++a) {
    if (dead[a]) continue;
    for (std::size_t b = 0; b < all.size(); ++b) {
      if (a == b || dead[b]) continue;
      if (all[b].ball.cost <= all[a].ball.cost && subset_of(all[a].covers, all[b].covers)) {
        bool equal = all[b].ball.cost == all[a].ball.cost &&
                     subset_of(all[b].covers, all[a].covers);
        if (!equal || b < a) { dead[a] = 1; break; }
      }
    }
  }
  std::vector<ContentCandidate> kept;
  for (std::size_t a = 0; a < all.size(); ++a)
    if (!dead[a]) kept.push_back(std::move(all[a]));
  return kept;
}

namespace {

ContentResult greedy_cover(const std::vector<ContentCandidate>& cands,
                           std::size_t m) {
  const std::size_t words = (m + 63) / 64;
  Bits covered(words, 0);
  std::size_t n_cov = 0;
  ContentResult res;
  std::vector<char> used(cands.size(), 0);
  while (n_cov < m) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = cands.size();
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (used[c]) continue;
      std::size_t gain = 0;
      for (std::size_t w = 0; w < words; ++w)
        gain += __builtin_popcountll(cands[c].covers[w] & ~covered[w]);
      if (gain == 0) continue;
      double density = cands[c].ball.cost / static_cast<double>(gain);
      if (density < best) { best = density; pick = c; }
    }
    if (pick == cands.size()) throw Error(Err::NoFeasibleCover, "no feasible cover");
    used[pick] = 1;
    for (std::size_t w = 0; w < words; ++w) covered[w] |= cands[pick].covers[w];
    n_cov = popcount(covered);
    res.cover.push_back(cands[pick].ball);
    res.value += cands[pick].ball.cost;
  }
  return res;
}

struct CoverSearch {
  const std::vector<ContentCandidate>& cands;
  std::size_t m;
  std::vector<std::vector<std::size_t>> by_elem;  // candidates covering element
  std::vector<double> min_cost;                    // cheapest cover per element
  double best;
  std::vector<std::size_t> best_pick, pick;

  bool has(std::size_t c, std::size_t e) const {
    return (cands[c].covers[e / 64] >> (e % 64)) & 1u;
  }

  void run(std::vector<int>& cover_count, double cost) {
    // choose the uncovered element with fewest options
    std::size_t e_best = m, opts = std::numeric_limits<std::size_t>::max();
    double bound = 0.0;
    for (std::size_t e = 0; e < m; ++e) {
      if (cover_count[e] > 0) continue;
      bound = std::max(bound, min_cost[e]);
      if (by_elem[e].size() < opts) { opts = by_elem[e].size(); e_best = e; }
    }
    if (e_best == m) {
      if (cost < best) { best = cost; best_pick = pick; }
      return;
    }
    if (cost + bound >= best) return;
    for (auto c : by_elem[e_best]) {
      pick.push_back(c);
      for (std::size_t e = 0; e < m; ++e)
        if (has(c, e)) ++cover_count[e];
      run(cover_count, cost + cands[c].ball.cost);
      for (std::size_t e = 0; e < m; ++e)
        if (has(c, e)) --cover_count[e];
      pick.pop_back();
    }
  }
};

}  // namespace

ContentResult hausdorff_content(const Space& space, const Measure& mu,
                                const PointSet& E, double theta, double delta,
                                ContentMode mode, std::size_t cap) {
  if (E.empty()) throw Error(Err::BadParams, "content of the empty set");
  if (!(delta > 0.0) || theta < 0.0) throw Error(Err::BadParams, "bad content params");
  auto cands = content_candidates(space, mu, E, theta, delta);
  const std::size_t m = E.size();
  // feasibility
  std::vector<char> seen(m, 0);
  for (auto& c : cands)
    for (std::size_t e = 0; e < m; ++e)
      if ((c.covers[e / 64] >> (e % 64)) & 1u) seen[e] = 1;
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw Error(Err::NoFeasibleCover, "delta below every usable radius");

  ContentResult greedy = greedy_cover(cands, m);
  if (mode == ContentMode::Greedy || cands.size() > cap) return greedy;

  CoverSearch s{cands, m, {}, {}, greedy.value, {}, {}};
  s.by_elem.resize(m);
  s.min_cost.assign(m, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> by_cost(cands.size());
  std::iota(by_cost.begin(), by_cost.end(), std::size_t{0});
  std::stable_sort(by_cost.begin(), by_cost.end(), [&](std::size_t a, std::size_t b) {
    return cands[a].ball.cost < cands[b].ball.cost;
  });
  for (auto c : by_cost)
    for (std::size_t e = 0; e < m; ++e)
      if (s.has(c, e)) {
        s.by_elem[e].push_back(c);
        s.min_cost[e] = std::min(s.min_cost[e], cands[c].ball.cost);
      }
  std::vector<int> cover_count(m, 0);
  s.run(cover_count, 0.0);
  ContentResult res;
  res.exact = true;
  if (s.best_pick.empty()) {
    res.value = greedy.value;
    res.cover = greedy.cover;
  } else {
    for (auto c : s.best_pick) {
      res.cover.push_back(cands[c].ball);
      res.value += cands[c].ball.cost;
    }
  }
  return res;
}

namespace {

template <class Fn>
void sweep_balls(const Space& space, const Measure& mu, const PointSet& S,
                 const std::vector<double>& r_grid, Fn&& fn) {
  if (r_grid.empty()) throw Error(Err::EmptyGrid, "empty radius grid");
  if (S.empty()) throw Error(Err::EmptyTargetSet, "S is empty");
  for (auto x : S)
    for (double r : r_grid) {
      PointSet piece = set_intersection(space.ball(x, r), S);
      double mb = ball_mass(space, mu, x, r);
      if (!(mb > 0.0)) throw Error(Err::ZeroMuBall, "mu vanishes on a ball");
      fn(piece, r, mb);
    }
}

}  // namespace

double lcr_lambda(const Space& space, const Measure& mu, const PointSet& S,
                  double theta, const std::vector<double>& r_grid) {
  double lam = std::numeric_limits<double>::infinity();
  sweep_balls(space, mu, S, r_grid, [&](const PointSet& piece, double r, double mb) {
    double h = hausdorff_content(space, mu, piece, theta, r).value;
    lam = std::min(lam, h * std::pow(r, theta) / mb);
  });
  return lam;
}

AdrConstants adr_constants(const Space& space, const Measure& mu,
                           const PointSet& S, double theta,
                           const std::vector<double>& r_grid, double delta_floor) {
  AdrConstants out{std::numeric_limits<double>::infinity(), 0.0};
  sweep_balls(space, mu, S, r_grid, [&](const PointSet& piece, double r, double mb) {
    double h = hausdorff_content(space, mu, piece, theta, delta_floor).value;
    double ratio = h * std::pow(r, theta) / mb;
    out.c1 = std::min(out.c1, ratio);
    out.c2 = std::max(out.c2, ratio);
  });
  return out;
}

}  // namespace mms
