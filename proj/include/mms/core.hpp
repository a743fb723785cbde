#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mms {

// Absolute tolerance for distance comparisons.
inline constexpr double kTol = 1e-9;

enum class Err {
  AsymmetricTable,
  TriangleViolation,
  NegativeDistance,
  EpsOutOfRange,
  ZeroMassEverywhere,
  EmptyTargetSet,
  ZeroMass,
  NoFeasibleCover,
  EmptyGrid,
  OrphanPoint,
  SupportMismatch,
  ZeroDensity,
  ThetaOrder,
  GridTooCoarse,
  ThetaOutOfRange,
  EmptyCube,
  SequenceDepthExceeded,
  UncoveredPoint,
  ZeroMuBall,
  RhsZeroWithPositiveLhs,
  BadParams,
  BadInput,
};

const char* err_name(Err e);

struct Error : std::runtime_error {
  Err kind;
  Error(Err k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

// Sorted, duplicate-free list of point indices.
using PointSet = std::vector<std::size_t>;

std::vector<char> to_mask(const PointSet& s, std::size_t n);
PointSet from_mask(const std::vector<char>& mask);
PointSet set_union(const PointSet& a, const PointSet& b);
PointSet set_intersection(const PointSet& a, const PointSet& b);
PointSet set_difference(const PointSet& a, const PointSet& b);
PointSet all_points(std::size_t n);

enum class Metric { Euclidean, Chebyshev };

class Space {
 public:
  static Space from_points(const std::vector<std::vector<double>>& pts,
                           Metric metric = Metric::Euclidean);
  static Space from_table(const std::vector<std::vector<double>>& table);

  std::size_t size() const { return n_; }
  double d(std::size_t i, std::size_t j) const { return dist_[i * n_ + j]; }

  // Points sorted by (distance to i, index); entry 0 is i itself.
  std::span<const std::uint32_t> order(std::size_t i) const {
    return {order_.data() + i * n_, n_};
  }
  std::span<const double> sorted_dist(std::size_t i) const {
    return {sdist_.data() + i * n_, n_};
  }

  // |B_r(x)|, i.e. the length of the prefix of order(x) inside the ball.
  std::size_t ball_count(std::size_t x, double r) const;
  PointSet ball(std::size_t x, double r) const;

  double dist_to_set(std::size_t x, const PointSet& s) const;
  double diameter() const { return diam_; }
  double min_positive_distance() const { return min_pos_; }

  const std::vector<std::vector<double>>& coords() const { return coords_; }
  Metric metric() const { return metric_; }

 private:
  void finish();

  std::size_t n_ = 0;
  std::vector<double> dist_;
  std::vector<std::uint32_t> order_;
  std::vector<double> sdist_;
  std::vector<std::vector<double>> coords_;
  Metric metric_ = Metric::Euclidean;
  double diam_ = 0.0;
  double min_pos_ = 0.0;
};

// Closed-ball membership with tolerance.
inline bool within(double d, double r) { return d <= r + kTol; }

// k(r) = max{k : r <= eps^k}.
int k_of_r(double r, double eps);

struct NetHierarchy {
  double eps = 0.1;
  int k_min = 0;
  int k_max = 0;
  std::vector<PointSet> levels;  // levels[k - k_min], in insertion order
  PointSet domain;               // points the nets were built over

  const PointSet& level(int k) const { return levels.at(k - k_min); }
};

// Greedy maximal eps^k-separated sets. A point joins Z_k when its distance to
// every chosen point is at least eps^k (up to kTol); anything rejected is then
// strictly closer than eps^k to the net. Only points of `domain` are used.
NetHierarchy build_nets(const Space& space, double eps, int k_min, int k_max,
                        const std::vector<std::size_t>& seed_order = {},
                        const std::optional<PointSet>& domain = std::nullopt);

// Index in `net` of the nearest net point to x (ties by net index).
std::size_t nearest_in(const Space& space, const PointSet& net, std::size_t x);

struct Layers {
  PointSet U;
  PointSet V;
};

// U_k = {dist(x,S) < 5 eps^k}, V_k = U_{k-1} \ U_k.
Layers neighborhood_and_layer(const Space& space, const PointSet& S, double eps,
                              int k);
bool in_neighborhood(double dist_to_s, double eps, int k);

// Nonnegative atomic weights, one per point.
struct Measure {
  std::vector<double> w;

  Measure() = default;
  explicit Measure(std::vector<double> weights);
  static Measure zero(std::size_t n) { return Measure(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return w.size(); }
  double operator[](std::size_t i) const { return w[i]; }
  double mass(const PointSet& s) const;
  double total() const;
  PointSet support() const;
  Measure restricted(const PointSet& s) const;
  Measure scaled(double c) const;
};

Measure operator+(const Measure& a, const Measure& b);

using Field = std::vector<double>;

// Mass of B_r(x); O(|B|).
double ball_mass(const Space& space, const Measure& m, std::size_t x, double r);

// Prefix masses along space.order(x): pm[t] = m(first t points).
std::vector<double> prefix_mass(const Space& space, const Measure& m,
                                std::size_t x);

// max over x with mu(B_r(x)) > 0 and r <= R of mu(B_2r(x)) / mu(B_r(x)).
double doubling_constant(const Space& space, const Measure& mu, double R);

// floor(C_mu((c+1)R)^(log2(2c)+1)) + 1.
double packing_bound(const Space& space, const Measure& mu, double R, double c);

}  // namespace mms
