#pragma once

#include <string>
#include <vector>

#include "mms/core.hpp"
#include "mms/dyadic.hpp"

namespace mms {

struct PotentialField {
  Field values;
  double R = 0.0;
  std::string kind;  // riesz | dyadic_riesz | wolff
  double p = 0.0;
};

// Max pairwise distance; 0 for singletons and the empty set.
double set_diameter(const Space& space, const PointSet& E);

// a_m(E) = m(E) / mu(E) * diam E.
double a_coef(const Space& space, const Measure& mu, const Measure& m, const PointSet& E);

// Smallest k with eps^k <= R.
int first_level(double R, double eps);

// sum over eps^k <= R of a_m(B_{eps^k}(x)); terms vanish once the ball is a
// single point, so the sum is finite.
PotentialField riesz(const Space& space, const Measure& mu, const Measure& m, double eps,
                     double R);

// a_m(Qhat_{k, alpha(x)}) summed over the cube levels with eps^k <= R; zero
// off the domain of the cube system.
PotentialField dyadic_riesz(const Space& space, const CubeSystem& cubes,
                            const HatMap& hats, const Measure& mu, const Measure& m,
                            double R);

// integral over E of field^{p'} d mu.
double energy(const Measure& mu, const PotentialField& field, const PointSet& E, double p);

// sum over eps^k <= R of (eps^{kp} m(B)/mu(B))^{p'-1}; the singleton tail is
// summed in closed form.
PotentialField wolff(const Space& space, const Measure& mu, const Measure& m, double eps,
                     double R, double p);

struct HedbergWolff {
  double lhs = 0.0, rhs = 0.0, ratio = 0.0;
  bool undefined = false;  // 0 / 0
  double c1R = 0.0, c2R = 0.0;
};

// lhs = restricted energy of E; rhs = integral of W^{c1 R} over U_{c2 R}(E)
// against m, with c1 R = 18 eps^k, c2 R = 11 eps^k and k = k(R).
HedbergWolff hedberg_wolff_check(const Space& space, const Measure& mu, const Measure& m,
                                 const PointSet& E, double p, double eps, double R);

struct Duality {
  double primal = 0.0, dual = 0.0;
};

// Norm of g -> I^R[g nu] from L_pt(nu) to L_1(sigma): primal by applying the
// potential to the extremal g, dual as the L_pt'(nu) norm of the adjoint of 1.
Duality duality_gap(const Space& space, const Measure& mu, const Measure& nu,
                    const Measure& sigma, double p_tilde, double eps, double R);

struct ShapeCheck {
  double lhs = 0.0, rhs = 0.0;
};

// Dyadic energy of E against p' sum_k sum_alpha a(Qhat) int_{Q cap E} (Ihat^{eps^k})^{p'-1}.
ShapeCheck dyadic_energy_split(const Space& space, const CubeSystem& cubes,
                               const HatMap& hats, const Measure& mu, const Measure& m,
                               const PointSet& E, double p, double R);

// Per level-k cube: dyadic energy of the cube at scale eps^k against
// sum_{j>=k} sum_{Q_j within Q} eps^j m(Qhat) a(Qhat)^{p'-1}.
std::vector<ShapeCheck> cube_energy_bound(const Space& space, const CubeSystem& cubes,
                                          const HatMap& hats, const Measure& mu,
                                          const Measure& m, double p, int k);

}  // namespace mms
