#pragma once

#include <string>
#include <vector>

#include "mms/core.hpp"
#include "mms/regular_seq.hpp"

namespace mms {

struct Ball {
  std::size_t center = 0;
  double r = 0.0;
};

enum class FamilyKind { Nice, Whitney };

struct BallFamily {
  std::vector<Ball> balls;
  FamilyKind kind = FamilyKind::Nice;
  double c = 2.0;
  double delta = 1.0;
};

struct Violation {
  std::string cond;  // B1..B4
  std::vector<std::size_t> idx;
};

std::vector<Violation> validate_family(const BallFamily& family, const Space& space,
                                       const PointSet& S);

// Everything a trace functional reads besides f.
struct TraceSetup {
  const Space& space;
  const Measure& mu;
  const PointSet& S;
  const MeasureSequence& seq;
  double p = 2.0;
};

struct FunctionalValue {
  double value = 0.0;
  double lp = 0.0;    // ||f|L_p(m_0)||
  double osc = 0.0;   // everything else
  BallFamily witness;
  std::vector<double> per_k;  // BN: Besov sum terms by k (index k - 1)
  bool exact = true;
};

// f#(x) = sup_{0<r<=1} tilde-E_{m_k(r)}(f, B_r(x)) / r, exact over critical radii.
Field sharp_maximal(const Field& f, const TraceSetup& t);

double lp_norm(const Field& f, const Measure& m, double p);

FunctionalValue CN(const Field& f, const TraceSetup& t);

// Points x with some S-free ball B_rho(y), rho >= sigma r, inside B_r(x).
PointSet porous_points(const Space& space, const PointSet& S, double r, double sigma);

FunctionalValue BN(const Field& f, const TraceSetup& t, double sigma);

// p-th power contribution of one ball: mu(B)/r^p tilde-E(f, cB)^p.
double ball_contribution(const Field& f, const TraceSetup& t, double c, const Ball& b);
// (sum of contributions)^(1/p).
double family_value(const Field& f, const TraceSetup& t, const BallFamily& fam);

// Candidate balls shared by every ball-family functional of one f: centers
// at all points, radii at the values where the ball, the dilated ball or the
// S-test changes. Per centre only balls beating every smaller ball are kept.
struct Candidate {
  Ball ball;
  double w = 0.0;        // p-th power contribution
  std::size_t size = 0;  // |B|
  bool avoids_S = false;
};

struct CandidatePool {
  double c = 2.0;
  std::vector<Candidate> items;
};

CandidatePool build_pool(const Field& f, const TraceSetup& t, double c);

struct SearchResult {
  std::vector<std::size_t> chosen;  // indices into the pool
  double sum = 0.0;                 // sum of contributions
  bool exact = false;
};

// Max-weight disjoint subfamily among pool items with r <= delta (and
// avoiding S when whitney). Exact when at most `budget` items qualify,
// otherwise greedy plus swaps, never worse than any feasible incumbent.
SearchResult search_family(const Space& space, const CandidatePool& pool,
                           double delta, bool whitney, std::size_t budget,
                           const std::vector<std::vector<std::size_t>>& incumbents = {});

FunctionalValue BSN(const Field& f, const TraceSetup& t, double c, double delta,
                    std::size_t budget = 22);

struct NValue {
  FunctionalValue N;
  std::vector<FunctionalValue> bsn_delta;  // one per grid entry
  FunctionalValue whitney;                 // sup term over Whitney families
  FunctionalValue bsn1;                    // BSN on the same pool
};

// N = min over the delta grid of BSN^delta + Whitney sup. Every search shares
// one pool, and BSN^1 is seeded with the other witnesses.
NValue N_functional(const Field& f, const TraceSetup& t, double c,
                    const std::vector<double>& delta_grid, std::size_t budget = 22);

}  // namespace mms
