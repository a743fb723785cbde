#include "mms/extension.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mms/measures.hpp"
#include "mms/parallel.hpp"

namespace mms {

namespace {
constexpr std::size_t kNoSlot = static_cast<std::size_t>(-1);
}

double PartitionOfUnity::sum_at(std::size_t x) const {
  double s = 0.0;
  for (const auto& [a, v] : rows[x]) s += v;
  return s;
}

double PartitionOfUnity::sum_AS_at(std::size_t x) const {
  double s = 0.0;
  for (const auto& [a, v] : rows[x])
    if (in_AS[a]) s += v;
  return s;
}

PartitionOfUnity partition_of_unity(const Space& space, const PointSet& net_k,
                                    const PointSet& S, double eps, int k) {
  if (S.empty()) throw Error(Err::EmptyTargetSet, "S is empty");
  const std::size_t n = space.size();
  const double R = 2 * std::pow(eps, k);
  PartitionOfUnity pou;
  pou.k = k;
  pou.eps = eps;
  pou.centers = net_k;
  std::vector<double> ds(n);
  for (std::size_t x = 0; x < n; ++x) ds[x] = space.dist_to_set(x, S);
  pou.in_AS.assign(net_k.size(), 0);
  for (std::size_t a = 0; a < net_k.size(); ++a) {
    auto ord = space.order(net_k[a]);
    std::size_t cnt = space.ball_count(net_k[a], R);
    for (std::size_t t = 0; t < cnt; ++t)
      if (in_neighborhood(ds[ord[t]], eps, k - 1)) { pou.in_AS[a] = 1; break; }
  }
  std::vector<std::size_t> slot(n, kNoSlot);
  for (std::size_t a = 0; a < net_k.size(); ++a) slot[net_k[a]] = a;
  pou.rows.resize(n);
  parallel_for(n, [&](std::size_t x) {
    auto ord = space.order(x);
    auto sd = space.sorted_dist(x);
    auto& row = pou.rows[x];
    double total = 0.0;
    for (std::size_t t = 0; t < n && sd[t] < R; ++t) {
      std::size_t a = slot[ord[t]];
      if (a == kNoSlot) continue;
      double b = 1.0 - sd[t] / R;
      if (b > 0.0) {
        row.emplace_back(a, b);
        total += b;
      }
    }
    if (!(total > 0.0)) return;
    std::sort(row.begin(), row.end());
    for (auto& [a, v] : row) v /= total;
  });
  for (std::size_t x = 0; x < n; ++x)
    if (pou.rows[x].empty())
      throw Error(Err::UncoveredPoint, "point outside every partition bump");
  return pou;
}

std::vector<double> cell_averages(const Field& f, const Measure& mk, const Space& space,
                                  const PartitionOfUnity& pou) {
  const double R = 6 * std::pow(pou.eps, pou.k - 1);
  std::vector<double> avg(pou.centers.size(), 0.0);
  for (std::size_t a = 0; a < pou.centers.size(); ++a) {
    if (!pou.in_AS[a]) continue;
    auto ord = space.order(pou.centers[a]);
    std::size_t cnt = space.ball_count(pou.centers[a], R);
    double w = 0.0, s = 0.0;
    for (std::size_t t = 0; t < cnt; ++t) {
      w += mk.w[ord[t]];
      s += mk.w[ord[t]] * f[ord[t]];
    }
    if (!(w > 0.0)) throw Error(Err::ZeroMass, "m_k vanishes on a cell ball");
    avg[a] = s / w;
  }
  return avg;
}

Field approximant(const PartitionOfUnity& pou, const std::vector<double>& avg) {
  Field out(pou.rows.size(), 0.0);
  for (std::size_t x = 0; x < out.size(); ++x)
    for (const auto& [a, v] : pou.rows[x])
      if (pou.in_AS[a]) out[x] += v * avg[a];
  return out;
}

Field step(const PartitionOfUnity& pou, const std::vector<double>& avg,
           const Field& prev) {
  Field out(pou.rows.size(), 0.0);
  for (std::size_t x = 0; x < out.size(); ++x)
    for (const auto& [a, v] : pou.rows[x])
      if (pou.in_AS[a]) out[x] += v * (avg[a] - prev[x]);
  return out;
}

int stabilization_level(double dist_to_s, double eps) {
  if (dist_to_s <= 0.0) return 0;
  int j = 1;
  while (in_neighborhood(dist_to_s, eps, j - 1)) ++j;
  return j;
}

Extender::Extender(const Space& space, const PointSet& S, double eps, int J)
    : space_(space), S_(S), eps_(eps), J_(J) {
  if (J < 1) throw Error(Err::BadParams, "extension depth must be at least 1");
  if (S.empty()) throw Error(Err::EmptyTargetSet, "S is empty");
  nets_ = build_nets(space, eps, 0, J);
  for (int k = 1; k <= J; ++k)
    pous_.push_back(partition_of_unity(space, nets_.level(k), S, eps, k));
  ds_.resize(space.size());
  for (std::size_t x = 0; x < space.size(); ++x) ds_[x] = space.dist_to_set(x, S);
}

ExtensionResult Extender::apply(const Field& f, const MeasureSequence& seq) const {
  if (J_ > seq.depth())
    throw Error(Err::SequenceDepthExceeded, "extension deeper than the sequence");
  if (std::abs(seq.eps - eps_) > 1e-15)
    throw Error(Err::BadParams, "sequence and nets use different eps");
  const std::size_t n = space_.size();
  ExtensionResult res;
  res.J = J_;
  Field prev(n, 0.0);  // f_0 = 0
  Field acc(n, 0.0);
  for (int i = 1; i <= J_; ++i) {
    const auto& P = pous_[i - 1];
    auto avg = cell_averages(f, seq.at(i), space_, P);
    Field st = step(P, avg, prev);
    for (std::size_t x = 0; x < n; ++x) acc[x] += st[x];
    res.steps.push_back(st);
    res.approx.push_back(acc);
    prev = approximant(P, avg);
  }
  res.values.resize(n);
  res.j_star.resize(n);
  res.stable.resize(n);
  auto inS = to_mask(S_, n);
  for (std::size_t x = 0; x < n; ++x) {
    if (inS[x]) {
      res.values[x] = f[x];
      res.j_star[x] = 0;
      res.stable[x] = 1;
      continue;
    }
    int js = stabilization_level(ds_[x], eps_);
    res.j_star[x] = js;
    res.stable[x] = js <= J_;
    res.values[x] = res.approx[std::min(js, J_) - 1][x];
  }
  return res;
}

ExtensionResult extend(const Field& f, const MeasureSequence& seq, const Space& space,
                       const PointSet& S, int J) {
  return Extender(space, S, seq.eps, J).apply(f, seq);
}

Field lip(const Space& space, const Field& g, double h) {
  const std::size_t n = space.size();
  Field out(n, 0.0);
  parallel_for(n, [&](std::size_t x) {
    auto ord = space.order(x);
    auto sd = space.sorted_dist(x);
    double best = 0.0;
    for (std::size_t t = 1; t < n && sd[t] <= h; ++t)
      if (sd[t] > 0.0) best = std::max(best, std::abs(g[x] - g[ord[t]]) / sd[t]);
    out[x] = best;
  });
  return out;
}

double cheeger_energy(const Space& space, const Measure& mu, const Field& g, double p,
                      double h) {
  Field l = lip(space, g, h);
  double s = 0.0;
  for (std::size_t x = 0; x < l.size(); ++x) s += std::pow(l[x], p) * mu.w[x];
  return s;
}

Field fractional_maximal(const Space& space, const Measure& mu, const Field& g,
                         double q, double alpha, double R) {
  if (!(q > 1.0) || alpha < 0.0 || !(R > 0.0))
    throw Error(Err::BadParams, "fractional maximal needs q > 1, alpha >= 0, R > 0");
  const std::size_t n = space.size();
  Field out(n, 0.0);
  parallel_for(n, [&](std::size_t x) {
    auto ord = space.order(x);
    auto sd = space.sorted_dist(x);
    double w = 0.0, s = 0.0, best = 0.0;
    std::size_t t = 0;
    while (t < n && sd[t] <= R + kTol) {
      // absorb every point of this piece of constant balls
      std::size_t c = space.ball_count(x, sd[t]);
      for (; t < c; ++t) {
        w += mu.w[ord[t]];
        s += mu.w[ord[t]] * std::pow(std::abs(g[ord[t]]), q);
      }
      // the ball stays fixed until the next distance, so the sup on the
      // piece is its right end
      double r = t < n ? std::min(sd[t], R) : R;
      if (w > 0.0) best = std::max(best, std::pow(r, alpha) * std::pow(s / w, 1.0 / q));
    }
    out[x] = best;
  });
  return out;
}

std::vector<ResidualRow> trace_residual(const Field& f, const ExtensionResult& ext,
                                        const Space& space, const Measure& mu,
                                        const PointSet& S, double eps, int k_lo,
                                        int k_hi) {
  std::vector<ResidualRow> rows;
  for (auto x : S)
    for (int k = k_lo; k <= k_hi; ++k) {
      auto ord = space.order(x);
      std::size_t cnt = space.ball_count(x, std::pow(eps, k));
      double w = 0.0, s = 0.0;
      for (std::size_t t = 0; t < cnt; ++t) {
        w += mu.w[ord[t]];
        s += mu.w[ord[t]] * std::abs(f[x] - ext.values[ord[t]]);
      }
      if (!(w > 0.0)) throw Error(Err::ZeroMuBall, "mu vanishes on a ball");
      rows.push_back({x, k, s / w});
    }
  return rows;
}

double nonincreasing_share(const std::vector<ResidualRow>& rows, int k_from) {
  std::map<std::size_t, std::map<int, double>> by_point;
  for (const auto& r : rows) by_point[r.point][r.k] = r.residual;
  if (by_point.empty()) return 1.0;
  std::size_t good = 0;
  for (const auto& [x, ks] : by_point) {
    bool ok = true;
    for (auto it = ks.begin(); it != ks.end(); ++it) {
      auto nx = std::next(it);
      if (nx == ks.end() || it->first < k_from) continue;
      if (nx->second > it->second + 1e-12) ok = false;
    }
    good += ok;
  }
  return static_cast<double>(good) / by_point.size();
}

double gluing(const Field& f, const Space& space, const PointSet& S1, const Measure& m1,
              const PointSet& S2, const Measure& m2, std::size_t x, double r) {
  std::vector<std::size_t> A, B;
  for (auto y : S1)
    if (within(space.d(x, y), r) && m1.w[y] > 0.0) A.push_back(y);
  for (auto z : S2)
    if (within(space.d(x, z), r) && m2.w[z] > 0.0) B.push_back(z);
  double wa = 0.0, wb = 0.0, s = 0.0;
  for (auto y : A) wa += m1.w[y];
  for (auto z : B) wb += m2.w[z];
  if (!(wa > 0.0) || !(wb > 0.0)) throw Error(Err::ZeroMass, "gluing ball misses a piece");
  for (auto y : A)
    for (auto z : B) s += m1.w[y] * m2.w[z] * std::abs(f[y] - f[z]);
  return s / (wa * wb);
}

}  // namespace mms
