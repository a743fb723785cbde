#include "mms/core.hpp"
#include "mms/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace mms {

const char* err_name(Err e) {
  switch (e) {
    case Err::AsymmetricTable: return "AsymmetricTable";
    case Err::TriangleViolation: return "TriangleViolation";
    case Err::NegativeDistance: return "NegativeDistance";
    case Err::EpsOutOfRange: return "EpsOutOfRange";
    case Err::ZeroMassEverywhere: return "ZeroMassEverywhere";
    case Err::EmptyTargetSet: return "EmptyTargetSet";
    case Err::ZeroMass: return "ZeroMass";
    case Err::NoFeasibleCover: return "NoFeasibleCover";
    case Err::EmptyGrid: return "EmptyGrid";
    case Err::OrphanPoint: return "OrphanPoint";
    case Err::SupportMismatch: return "SupportMismatch";
    case Err::ZeroDensity: return "ZeroDensity";
    case Err::ThetaOrder: return "ThetaOrder";
    case Err::GridTooCoarse: return "GridTooCoarse";
    case Err::ThetaOutOfRange: return "ThetaOutOfRange";
    case Err::EmptyCube: return "EmptyCube";
    case Err::SequenceDepthExceeded: return "SequenceDepthExceeded";
    case Err::UncoveredPoint: return "UncoveredPoint";
    case Err::ZeroMuBall: return "ZeroMuBall";
    case Err::RhsZeroWithPositiveLhs: return "RhsZeroWithPositiveLhs";
    case Err::BadParams: return "BadParams";
    case Err::BadInput: return "BadInput";
  }
  return "Unknown";
}

std::vector<char> to_mask(const PointSet& s, std::size_t n) {
  std::vector<char> m(n, 0);
  for (auto i : s) m[i] = 1;
  return m;
}

PointSet from_mask(const std::vector<char>& mask) {
  PointSet s;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) s.push_back(i);
  return s;
}

PointSet set_union(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PointSet set_intersection(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

PointSet set_difference(const PointSet& a, const PointSet& b) {
  PointSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

PointSet all_points(std::size_t n) {
  PointSet s(n);
  std::iota(s.begin(), s.end(), std::size_t{0});
  return s;
}

Space Space::from_points(const std::vector<std::vector<double>>& pts,
                         Metric metric) {
  if (pts.empty()) throw Error(Err::BadInput, "empty point list");
  Space s;
  s.n_ = pts.size();
  s.coords_ = pts;
  s.metric_ = metric;
  s.dist_.assign(s.n_ * s.n_, 0.0);
  const std::size_t dim = pts[0].size();
  for (std::size_t i = 0; i < s.n_; ++i) {
    if (pts[i].size() != dim) throw Error(Err::BadInput, "ragged coordinates");
    for (std::size_t j = i + 1; j < s.n_; ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        double t = std::abs(pts[i][c] - pts[j][c]);
        if (metric == Metric::Euclidean) acc += t * t;
        else acc = std::max(acc, t);
      }
      double dd = metric == Metric::Euclidean ? std::sqrt(acc) : acc;
      s.dist_[i * s.n_ + j] = dd;
      s.dist_[j * s.n_ + i] = dd;
    }
  }
  s.finish();
  return s;
}

Space Space::from_table(const std::vector<std::vector<double>>& table) {
  if (table.empty()) throw Error(Err::BadInput, "empty distance table");
  Space s;
  s.n_ = table.size();
  s.dist_.assign(s.n_ * s.n_, 0.0);
  for (std::size_t i = 0; i < s.n_; ++i) {
    if (table[i].size() != s.n_) throw Error(Err::BadInput, "table not square");
    for (std::size_t j = 0; j < s.n_; ++j) {
      double v = table[i][j];
      if (!(v >= 0.0)) throw Error(Err::NegativeDistance, "negative distance");
      s.dist_[i * s.n_ + j] = v;
    }
  }
  for (std::size_t i = 0; i < s.n_; ++i) {
    if (s.dist_[i * s.n_ + i] != 0.0)
      throw Error(Err::BadInput, "nonzero diagonal");
    for (std::size_t j = i + 1; j < s.n_; ++j)
      if (std::abs(s.dist_[i * s.n_ + j] - s.dist_[j * s.n_ + i]) > kTol)
        throw Error(Err::AsymmetricTable, "asymmetric table");
  }
  s.finish();
  return s;
}

void Space::finish() {
  const std::size_t n = n_;
  auto check = [&](std::size_t i, std::size_t j, std::size_t k) {
    if (d(i, k) > d(i, j) + d(j, k) + kTol) {
      std::ostringstream os;
      os << "triangle violation at (" << i << "," << j << "," << k << ")";
      throw Error(Err::TriangleViolation, os.str());
    }
  };
  if (n <= 300) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) check(i, j, k);
  } else {
    std::mt19937_64 rng(0x5eed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t trials = 10 * n * n;
    for (std::size_t t = 0; t < trials; ++t) check(pick(rng), pick(rng), pick(rng));
  }

  order_.resize(n * n);
  sdist_.resize(n * n);
  diam_ = 0.0;
  min_pos_ = std::numeric_limits<double>::infinity();
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(idx.begin(), idx.end(), 0u);
    const double* row = dist_.data() + i * n;
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (a == i || b == i) return a == i && b != i;
      if (row[a] != row[b]) return row[a] < row[b];
      return a < b;
    });
    for (std::size_t t = 0; t < n; ++t) {
      order_[i * n + t] = idx[t];
      sdist_[i * n + t] = row[idx[t]];
    }
    diam_ = std::max(diam_, sdist_[i * n + n - 1]);
    if (n > 1) min_pos_ = std::min(min_pos_, sdist_[i * n + 1]);
  }
  if (n == 1) min_pos_ = 0.0;
}

std::size_t Space::ball_count(std::size_t x, double r) const {
  auto sd = sorted_dist(x);
  return std::upper_bound(sd.begin(), sd.end(), r + kTol) - sd.begin();
}

PointSet Space::ball(std::size_t x, double r) const {
  std::size_t c = ball_count(x, r);
  auto ord = order(x);
  PointSet s(ord.begin(), ord.begin() + c);
  std::sort(s.begin(), s.end());
  return s;
}

double Space::dist_to_set(std::size_t x, const PointSet& s) const {
  double best = std::numeric_limits<double>::infinity();
  for (auto y : s) best = std::min(best, d(x, y));
  return best;
}

int k_of_r(double r, double eps) {
  if (!(r > 0.0)) throw Error(Err::BadParams, "k_of_r needs r > 0");
  const double rel = 1e-12;
  int k = static_cast<int>(std::floor(std::log(r) / std::log(eps)));
  while (r <= std::pow(eps, k + 1) * (1.0 + rel)) ++k;
  while (r > std::pow(eps, k) * (1.0 + rel)) --k;
  return k;
}

NetHierarchy build_nets(const Space& space, double eps, int k_min, int k_max,
                        const std::vector<std::size_t>& seed_order,
                        const std::optional<PointSet>& domain) {
  if (!(eps > 0.0) || eps > 0.1 + 1e-15)
    throw Error(Err::EpsOutOfRange, "eps must lie in (0, 1/10]");
  if (k_min > k_max) throw Error(Err::BadParams, "k_min > k_max");
  const std::size_t n = space.size();
  std::vector<std::size_t> order = seed_order;
  if (order.empty()) order = all_points(n);
  if (domain) {
    auto mask = to_mask(*domain, n);
    std::vector<std::size_t> filtered;
    for (auto p : order)
      if (mask[p]) filtered.push_back(p);
    order.swap(filtered);
  }
  NetHierarchy nets;
  nets.domain = domain ? *domain : all_points(n);
  nets.eps = eps;
  nets.k_min = k_min;
  nets.k_max = k_max;
  for (int k = k_min; k <= k_max; ++k) {
    const double r = std::pow(eps, k);
    PointSet z;
    for (auto p : order) {
      bool ok = true;
      for (auto q : z)
        if (space.d(p, q) <= r - kTol) { ok = false; break; }
      if (ok) z.push_back(p);
    }
    nets.levels.push_back(std::move(z));
  }
  return nets;
}

std::size_t nearest_in(const Space& space, const PointSet& net, std::size_t x) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < net.size(); ++a) {
    double dd = space.d(x, net[a]);
    if (dd < bd) { bd = dd; best = a; }
  }
  return best;
}

bool in_neighborhood(double dist_to_s, double eps, int k) {
  return dist_to_s < 5.0 * std::pow(eps, k) - kTol;
}

Layers neighborhood_and_layer(const Space& space, const PointSet& S, double eps,
                              int k) {
  if (S.empty()) throw Error(Err::EmptyTargetSet, "S is empty");
  Layers out;
  for (std::size_t x = 0; x < space.size(); ++x) {
    double ds = space.dist_to_set(x, S);
    bool in_k = in_neighborhood(ds, eps, k);
    bool in_km1 = in_neighborhood(ds, eps, k - 1);
    if (in_k) out.U.push_back(x);
    else if (in_km1) out.V.push_back(x);
  }
  return out;
}

}  // namespace mms

namespace mms {

Measure::Measure(std::vector<double> weights) : w(std::move(weights)) {
  for (double v : w)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(Err::BadInput, "measure weights must be finite and >= 0");
}

double Measure::mass(const PointSet& s) const {
  double t = 0.0;
  for (auto i : s) t += w[i];
  return t;
}

double Measure::total() const {
  double t = 0.0;
  for (double v : w) t += v;
  return t;
}

PointSet Measure::support() const {
  PointSet s;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) s.push_back(i);
  return s;
}

Measure Measure::restricted(const PointSet& s) const {
  Measure out = zero(w.size());
  for (auto i : s) out.w[i] = w[i];
  return out;
}

Measure Measure::scaled(double c) const {
  Measure out = *this;
  for (double& v : out.w) v *= c;
  return out;
}

Measure operator+(const Measure& a, const Measure& b) {
  Measure out = a;
  for (std::size_t i = 0; i < out.w.size(); ++i) out.w[i] += b.w[i];
  return out;
}

double ball_mass(const Space& space, const Measure& m, std::size_t x, double r) {
  auto ord = space.order(x);
  std::size_t c = space.ball_count(x, r);
  double t = 0.0;
  for (std::size_t i = 0; i < c; ++i) t += m.w[ord[i]];
  return t;
}

std::vector<double> prefix_mass(const Space& space, const Measure& m,
                                std::size_t x) {
  auto ord = space.order(x);
  std::vector<double> pm(space.size() + 1, 0.0);
  for (std::size_t i = 0; i < space.size(); ++i) pm[i + 1] = pm[i] + m.w[ord[i]];
  return pm;
}

double doubling_constant(const Space& space, const Measure& mu, double R) {
  if (!(mu.total() > 0.0))
    throw Error(Err::ZeroMassEverywhere, "doubling constant of the zero measure");
  double best = 1.0;
  const std::size_t n = space.size();
  std::vector<double> cand;
  for (std::size_t x = 0; x < n; ++x) {
    auto pm = prefix_mass(space, mu, x);
    auto sd = space.sorted_dist(x);
    // the ratio is piecewise constant and right-continuous in r; breakpoints
    // are the distances d and d/2
    cand.clear();
    cand.push_back(R);
    for (std::size_t t = 1; t < n; ++t) {
      if (sd[t] <= R + kTol) cand.push_back(std::min(sd[t], R));
      if (sd[t] / 2 <= R + kTol) cand.push_back(std::min(sd[t] / 2, R));
    }
    for (double r : cand) {
      double inner = pm[space.ball_count(x, r)];
      if (!(inner > 0.0)) continue;
      double outer = pm[space.ball_count(x, 2 * r)];
      best = std::max(best, outer / inner);
    }
  }
  return best;
}

double packing_bound(const Space& space, const Measure& mu, double R, double c) {
  double C = doubling_constant(space, mu, (c + 1) * R);
  return std::floor(std::pow(C, std::log2(2 * c) + 1)) + 1;
}

}  // namespace mms

namespace mms {

namespace {
unsigned g_threads = 1;
}

void set_threads(unsigned n) {
  g_threads = n == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n;
}

unsigned threads() { return g_threads; }

}  // namespace mms
