#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mms/core.hpp"
#include "mms/dyadic.hpp"

namespace mms {

struct MeasureSequence {
  double eps = 0.5;
  double theta = 0.0;
  std::vector<Measure> m;  // m_0 .. m_K
  std::string provenance;  // adr | cantor | redistribute | custom

  int depth() const { return static_cast<int>(m.size()) - 1; }
  const Measure& at(int k) const;
};

struct SequenceThresholds {
  double C1_max = std::numeric_limits<double>::infinity();
  double C2_min = 0.0;
  double C3_max = std::numeric_limits<double>::infinity();
  double m5_min = 0.0;
};

struct SequenceReport {
  double C1 = 0.0;
  double C2 = std::numeric_limits<double>::infinity();
  double C3 = 1.0;
  double m5_min_density = std::numeric_limits<double>::infinity();
  // per depth k (index k - k_lo): min / max over test points of
  // m_k(B_{eps^k}(x) cap E) / m_k(B_{eps^k}(x))
  std::vector<double> m5_min_by_k, m5_max_by_k;
  bool pass_M1 = true, pass_C1 = false, pass_C2 = false, pass_C3 = false,
       pass_M5 = false;
};

SequenceReport verify(const MeasureSequence& seq, const Space& space,
                      const Measure& mu, const PointSet& S, int k_lo, int k_hi,
                      const std::vector<PointSet>& test_sets,
                      const SequenceThresholds& th = {});

// m_k = eps^{-k(theta - theta_base)} base; at eps = 1/2 this is 2^{k(...)}.
MeasureSequence adr_sequence(const Measure& base, double theta_base, double theta,
                             double eps, int K);

// Sum over components of the single-base recipe.
MeasureSequence adr_composite(const std::vector<Measure>& bases,
                              const std::vector<double>& theta_bases, double theta,
                              double eps, int K);

// sum_{m >= M} m^{-theta}, theta > 1.
double zeta_tail(double theta, long M);
double cantor_c1(double theta);
double cantor_c2(double theta);

struct CantorConstruction {
  Space space;         // 1-d grid on [0,1] x {0}
  Measure length;      // Lebesgue length weights
  PointSet E;          // points carrying the Cantor set's own mass
  std::vector<PointSet> U;       // U[i] for i = 1..K+1 (U[0] empty)
  PointSet U_tail;               // gaps U_i with i > K+1, kept in aggregate
  std::vector<double> gap_length;  // gap_length[i] = length of one gap of U_i
  MeasureSequence seq;
  double c1 = 0.0, c2 = 0.0;
  int K = 0;
};

// Cantor-type set with gaps of length 1/(c1 2^k k^theta) removed from each
// interval of E_k; measures m_0..m_K with the explicit weights omega_k.
// h_max is the largest cell length of the grid.
CantorConstruction cantor_sequence(double theta, int K, double h_max);

// Bounds from the proof, checked on the grid. Ratios are measured / bound:
// m2 over all points, j in [k, j_res] and r = 2^-j (j_res = finest scale
// the grid resolves); m3 over points of E at r = 2^-k; m5 the per-depth max
// of m_k(B cap E)/m_k(B) on E.
struct CantorBounds {
  int j_res = 0;
  std::vector<double> m2_ratio, m3_ratio;  // index k
  double C3 = 0.0, C3_bound = 0.0;
  std::vector<double> m5, m5_bound;
};

CantorBounds cantor_bounds(const CantorConstruction& cc);

struct Redistribution {
  int j = 0, k = 0;
  // h[i - qc.k_min][beta] = mu(quasicube)/eps^{i theta}
  std::vector<std::vector<double>> h;
  // stages[t]: atoms (per level-j quasicube) of m^{j, j - t}
  std::vector<std::vector<double>> stages;
  Measure m;  // m^{j,k} as a measure on the space
  // anc[i - qc.k_min][beta]: level-i ancestor of the level-j quasicube beta
  std::vector<std::vector<std::size_t>> anc;
};

Redistribution redistribute(const Space& space, const CubeSystem& qc,
                            const Measure& mu, double theta, int j, int k);

}  // namespace mms
