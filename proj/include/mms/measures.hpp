#pragma once

#include <cstdint>
#include <vector>

#include "mms/core.hpp"

namespace mms {

// f_{G,m}; 0 when m(G) = 0.
double average(const Field& f, const PointSet& G, const Measure& m);

struct BestConstant {
  double E = 0.0;
  double c_star = 0.0;
};

// min_c (1/m(G)) sum_G |f - c| w, attained at the smallest weighted median.
BestConstant best_l1_constant(const Field& f, const PointSet& G, const Measure& m);

// E_m(f, B_2r(center)) if B_r(center) meets supp_test, else 0.
double tilde_E(const Space& space, const Field& f, std::size_t center, double r,
               const Measure& m, const PointSet& supp_test);

// Best-L1 oscillation over balls that grow by whole points. Points are
// inserted in any order; query() returns E_m(f, inserted set).
class OscillationTracker {
 public:
  OscillationTracker(const Field& f, const Measure& m);
  void reset();
  void insert(std::size_t i);
  BestConstant query() const;
  double mass() const { return total_w_; }

 private:
  void add(std::vector<double>& tree, std::size_t pos, double v);
  double prefix(const std::vector<double>& tree, std::size_t pos) const;

  const Field& f_;
  const Measure& m_;
  std::vector<std::size_t> rank_;   // point -> rank in f order
  std::vector<std::size_t> by_rank_;
  std::vector<double> tw_, twf_;
  std::vector<std::size_t> touched_;
  double total_w_ = 0.0, total_wf_ = 0.0;
  std::size_t log_ = 1;
};

struct CoverBall {
  std::size_t center = 0;
  double r = 0.0;
  double cost = 0.0;
};

struct ContentCandidate {
  CoverBall ball;
  std::vector<std::uint64_t> covers;  // bitset over positions in E
};

struct ContentResult {
  double value = 0.0;
  std::vector<CoverBall> cover;
  bool exact = false;
};

enum class ContentMode { Exact, Greedy };

// Candidate balls for covering E: centers in E, radii at distances from the
// center and midpoints between consecutive distances, r < delta. Dominated
// candidates (subset coverage at no lower cost) are dropped.
std::vector<ContentCandidate> content_candidates(const Space& space,
                                                 const Measure& mu,
                                                 const PointSet& E, double theta,
                                                 double delta);

ContentResult hausdorff_content(const Space& space, const Measure& mu,
                                const PointSet& E, double theta, double delta,
                                ContentMode mode = ContentMode::Exact,
                                std::size_t cap = 24);

double lcr_lambda(const Space& space, const Measure& mu, const PointSet& S,
                  double theta, const std::vector<double>& r_grid);

struct AdrConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

AdrConstants adr_constants(const Space& space, const Measure& mu,
                           const PointSet& S, double theta,
                           const std::vector<double>& r_grid, double delta_floor);

}  // namespace mms
