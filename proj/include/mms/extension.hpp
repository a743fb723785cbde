#pragma once

#include <utility>
#include <vector>

#include "mms/core.hpp"
#include "mms/regular_seq.hpp"

namespace mms {

// Tent partition of unity at level k: phi_a = b_a / sum_b b_b with
// b_a(x) = max(0, 1 - d(x, z_a) / (2 eps^k)).
struct PartitionOfUnity {
  int k = 0;
  double eps = 0.1;
  PointSet centers;          // Z_k, in net order
  std::vector<char> in_AS;   // centre's doubled ball meets U_{k-1}(S)
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;  // per point, phi > 0

  double sum_at(std::size_t x) const;
  double sum_AS_at(std::size_t x) const;
};

PartitionOfUnity partition_of_unity(const Space& space, const PointSet& net_k,
                                    const PointSet& S, double eps, int k);

// f_{k,a}: m_k-average over B_{6 eps^(k-1)}(z_a) for a in A_k(S), else 0.
std::vector<double> cell_averages(const Field& f, const Measure& mk, const Space& space,
                                  const PartitionOfUnity& pou);

// f_k(x) = sum over A_k(S) of phi f_{k,a}.
Field approximant(const PartitionOfUnity& pou, const std::vector<double>& avg);

// St_i = sum over A_i(S) of phi_{i,a} (f_{i,a} - f_{i-1}).
Field step(const PartitionOfUnity& pou, const std::vector<double>& avg,
           const Field& prev);

struct ExtensionResult {
  Field values;                 // f on S, f^{j*} off S
  std::vector<Field> steps;     // steps[i-1] = St_i
  std::vector<Field> approx;    // approx[j-1] = f^j
  std::vector<int> j_star;      // 0 on S
  std::vector<char> stable;     // j* <= J
  int J = 0;
};

// Nets and partitions for one (space, S, eps, J); reused across functions.
class Extender {
 public:
  Extender(const Space& space, const PointSet& S, double eps, int J);
  ExtensionResult apply(const Field& f, const MeasureSequence& seq) const;
  const PartitionOfUnity& pou(int k) const { return pous_.at(k - 1); }
  const NetHierarchy& nets() const { return nets_; }
  int depth() const { return J_; }

 private:
  const Space& space_;
  PointSet S_;
  double eps_;
  int J_;
  NetHierarchy nets_;
  std::vector<PartitionOfUnity> pous_;  // levels 1..J
  std::vector<double> ds_;
};

ExtensionResult extend(const Field& f, const MeasureSequence& seq, const Space& space,
                       const PointSet& S, int J);

// min{j >= 1 : x not in U_{j-1}(S)}, 0 for x in S.
int stabilization_level(double dist_to_s, double eps);

// lip_h g(x) = max over 0 < d(x,y) <= h of |g(x) - g(y)| / d(x,y).
Field lip(const Space& space, const Field& g, double h);
double cheeger_energy(const Space& space, const Measure& mu, const Field& g, double p,
                      double h);
// sup_{0<r<=R} r^alpha (mu-average of |g|^q over B_r(x))^(1/q).
Field fractional_maximal(const Space& space, const Measure& mu, const Field& g,
                         double q, double alpha, double R);

struct ResidualRow {
  std::size_t point = 0;
  int k = 0;
  double residual = 0.0;
};

// mu-average over B_{eps^k}(x) of |f(x) - Ext f| for x in S.
std::vector<ResidualRow> trace_residual(const Field& f, const ExtensionResult& ext,
                                        const Space& space, const Measure& mu,
                                        const PointSet& S, double eps, int k_lo,
                                        int k_hi);

// Share of points whose residual does not increase from k to k+1 for all
// k >= k_from (with 1e-12 slack).
double nonincreasing_share(const std::vector<ResidualRow>& rows, int k_from);

// Double average of |f(y) - f(z)| over B_r(x) cap S1 (m1) and B_r(x) cap S2 (m2).
double gluing(const Field& f, const Space& space, const PointSet& S1, const Measure& m1,
              const PointSet& S2, const Measure& m2, std::size_t x, double r);

}  // namespace mms
