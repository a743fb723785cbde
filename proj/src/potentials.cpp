#include "mms/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "mms/parallel.hpp"

namespace mms {

namespace {

double conj(double p) {
  if (!(p > 1.0)) throw Error(Err::BadParams, "p must exceed 1");
  return p / (p - 1.0);
}

// diam of the first t points of order(x), t = 0..cnt.
std::vector<double> prefix_diameter(const Space& space, std::size_t x, std::size_t cnt) {
  auto ord = space.order(x);
  std::vector<double> pd(cnt + 1, 0.0);
  for (std::size_t t = 1; t < cnt; ++t) {
    double d = pd[t];
    for (std::size_t s = 0; s < t; ++s) d = std::max(d, space.d(ord[s], ord[t]));
    pd[t + 1] = d;
  }
  return pd;
}

struct DyadicTable {
  int k_lo = 0;
  // a[k - k_lo][alpha], mass[k - k_lo][alpha] = m(Qhat)
  std::vector<std::vector<double>> a, mass;
};

DyadicTable dyadic_table(const Space& space, const CubeSystem& cubes, const HatMap& hats,
                         const Measure& mu, const Measure& m, int k_lo) {
  if (k_lo < cubes.k_min || k_lo > cubes.k_max)
    throw Error(Err::BadParams, "scale outside the cube levels");
  DyadicTable t;
  t.k_lo = k_lo;
  for (int k = k_lo; k <= cubes.k_max; ++k) {
    const auto& H = hats[k - cubes.k_min];
    std::vector<double> a(H.size()), ms(H.size());
    parallel_for(H.size(), [&](std::size_t al) {
      a[al] = a_coef(space, mu, m, H[al]);
      ms[al] = m.mass(H[al]);
    });
    t.a.push_back(std::move(a));
    t.mass.push_back(std::move(ms));
  }
  return t;
}

// tails[x][i] = sum over levels j >= k_lo + i of a_j(x).
std::vector<std::vector<double>> dyadic_tails(const CubeSystem& cubes,
                                              const DyadicTable& t, std::size_t n) {
  const int L = static_cast<int>(t.a.size());
  std::vector<std::vector<double>> tails(n);
  for (auto x : cubes.domain) {
    auto& tl = tails[x];
    tl.assign(L + 1, 0.0);
    for (int i = L - 1; i >= 0; --i)
      tl[i] = tl[i + 1] + t.a[i][cubes.cube_at(t.k_lo + i, x)];
  }
  return tails;
}

}  // namespace

double set_diameter(const Space& space, const PointSet& E) {
  double d = 0.0;
  for (std::size_t i = 0; i < E.size(); ++i)
    for (std::size_t j = i + 1; j < E.size(); ++j) d = std::max(d, space.d(E[i], E[j]));
  return d;
}

double a_coef(const Space& space, const Measure& mu, const Measure& m, const PointSet& E) {
  double me = m.mass(E);
  if (me == 0.0) return 0.0;
  double mue = mu.mass(E);
  if (!(mue > 0.0)) throw Error(Err::ZeroMuBall, "mu vanishes on a charged set");
  return me / mue * set_diameter(space, E);
}

int first_level(double R, double eps) {
  int k = k_of_r(R, eps);
  if (std::pow(eps, k) > R * (1 + 1e-12)) ++k;
  return k;
}

PotentialField riesz(const Space& space, const Measure& mu, const Measure& m, double eps,
                     double R) {
  const std::size_t n = space.size();
  const int ks = first_level(R, eps);
  PotentialField out{Field(n, 0.0), R, "riesz", 0.0};
  parallel_for(n, [&](std::size_t x) {
    auto sd = space.sorted_dist(x);
    auto pm = prefix_mass(space, m, x);
    auto pmu = prefix_mass(space, mu, x);
    std::size_t top = space.ball_count(x, std::pow(eps, ks));
    auto pd = prefix_diameter(space, x, top);
    double s = 0.0;
    for (int k = ks; k < ks + 400; ++k) {
      std::size_t cnt = space.ball_count(x, std::pow(eps, k));
      if (cnt <= 1 || sd[cnt - 1] == 0.0) break;
      if (!(pmu[cnt] > 0.0)) throw Error(Err::ZeroMuBall, "mu vanishes on a ball");
      s += pm[cnt] / pmu[cnt] * pd[cnt];
    }
    out.values[x] = s;
  });
  return out;
}

PotentialField dyadic_riesz(const Space& space, const CubeSystem& cubes,
                            const HatMap& hats, const Measure& mu, const Measure& m,
                            double R) {
  const std::size_t n = space.size();
  auto t = dyadic_table(space, cubes, hats, mu, m, first_level(R, cubes.eps));
  PotentialField out{Field(n, 0.0), R, "dyadic_riesz", 0.0};
  auto tails = dyadic_tails(cubes, t, n);
  for (auto x : cubes.domain) out.values[x] = tails[x][0];
  return out;
}

double energy(const Measure& mu, const PotentialField& field, const PointSet& E, double p) {
  const double q = conj(p);
  double s = 0.0;
  for (auto x : E) s += std::pow(field.values[x], q) * mu.w[x];
  return s;
}

PotentialField wolff(const Space& space, const Measure& mu, const Measure& m, double eps,
                     double R, double p) {
  const double q = conj(p);
  const std::size_t n = space.size();
  const int ks = first_level(R, eps);
  PotentialField out{Field(n, 0.0), R, "wolff", p};
  parallel_for(n, [&](std::size_t x) {
    auto sd = space.sorted_dist(x);
    auto pm = prefix_mass(space, m, x);
    auto pmu = prefix_mass(space, mu, x);
    double s = 0.0;
    int k = ks;
    for (; k < ks + 400; ++k) {
      std::size_t cnt = space.ball_count(x, std::pow(eps, k));
      if (!(pmu[cnt] > 0.0)) throw Error(Err::ZeroMuBall, "mu vanishes on a ball");
      if (cnt <= 1 || sd[cnt - 1] == 0.0) {
        // the ball is frozen from here on: geometric tail in eps^{k p'}
        double c = std::pow(pm[cnt] / pmu[cnt], q - 1.0);
        s += c * std::pow(eps, k * q) / (1.0 - std::pow(eps, q));
        break;
      }
      s += std::pow(std::pow(eps, k * p) * pm[cnt] / pmu[cnt], q - 1.0);
    }
    out.values[x] = s;
  });
  return out;
}

HedbergWolff hedberg_wolff_check(const Space& space, const Measure& mu, const Measure& m,
                                 const PointSet& E, double p, double eps, double R) {
  HedbergWolff h;
  const int k = k_of_r(R, eps);
  h.c1R = 18 * std::pow(eps, k);
  h.c2R = 11 * std::pow(eps, k);
  h.lhs = energy(mu, riesz(space, mu, m, eps, R), E, p);
  auto W = wolff(space, mu, m, eps, h.c1R, p);
  for (std::size_t y = 0; y < space.size(); ++y) {
    if (m.w[y] == 0.0) continue;
    bool near = false;
    for (auto x : E)
      if (space.d(x, y) < h.c2R) { near = true; break; }
    if (near) h.rhs += W.values[y] * m.w[y];
  }
  if (h.rhs == 0.0) {
    if (h.lhs > 0.0)
      throw Error(Err::RhsZeroWithPositiveLhs, "Wolff side vanishes with positive energy");
    h.undefined = true;
    h.ratio = 0.0;
  } else {
    h.ratio = h.lhs / h.rhs;
  }
  return h;
}

Duality duality_gap(const Space& space, const Measure& mu, const Measure& nu,
                    const Measure& sigma, double p_tilde, double eps, double R) {
  const double q = conj(p_tilde);
  const std::size_t n = space.size();
  const int ks = first_level(R, eps);
  // adjoint of 1: T*1(y) = sum_x sigma(x) K(x, y), K summing diam/mu over balls
  std::vector<double> adj(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    if (sigma.w[x] == 0.0) continue;
    for (int k = ks; k < ks + 400; ++k) {
      PointSet B = space.ball(x, std::pow(eps, k));
      double dm = set_diameter(space, B);
      if (dm == 0.0) break;
      double kern = dm / mu.mass(B);
      for (auto y : B) adj[y] += sigma.w[x] * kern;
    }
  }
  Duality d;
  double s = 0.0;
  for (std::size_t y = 0; y < n; ++y) s += nu.w[y] * std::pow(adj[y], q);
  d.dual = std::pow(s, 1.0 / q);
  // extremal g = (T*1)^{q-1}, pushed through the potential itself
  std::vector<double> gw(n, 0.0);
  double gn = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    double g = std::pow(adj[y], q - 1.0);
    gw[y] = g * nu.w[y];
    gn += nu.w[y] * std::pow(g, p_tilde);
  }
  if (gn == 0.0) return d;
  auto I = riesz(space, mu, Measure(gw), eps, R);
  double l1 = 0.0;
  for (std::size_t x = 0; x < n; ++x) l1 += sigma.w[x] * std::abs(I.values[x]);
  d.primal = l1 / std::pow(gn, 1.0 / p_tilde);
  return d;
}

ShapeCheck dyadic_energy_split(const Space& space, const CubeSystem& cubes,
                               const HatMap& hats, const Measure& mu, const Measure& m,
                               const PointSet& E, double p, double R) {
  const double q = conj(p);
  auto t = dyadic_table(space, cubes, hats, mu, m, first_level(R, cubes.eps));
  auto tails = dyadic_tails(cubes, t, space.size());
  auto dom = to_mask(cubes.domain, space.size());
  ShapeCheck sc;
  for (auto x : E) {
    if (!dom[x]) continue;
    const auto& tl = tails[x];
    sc.lhs += mu.w[x] * std::pow(tl[0], q);
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < tl.size(); ++i) {
      double a = tl[i] - tl[i + 1];
      if (a > 0.0) s += a * std::pow(tl[i], q - 1.0);
    }
    sc.rhs += q * mu.w[x] * s;
  }
  return sc;
}

std::vector<ShapeCheck> cube_energy_bound(const Space& space, const CubeSystem& cubes,
                                          const HatMap& hats, const Measure& mu,
                                          const Measure& m, double p, int k) {
  const double q = conj(p);
  auto t = dyadic_table(space, cubes, hats, mu, m, k);
  auto tails = dyadic_tails(cubes, t, space.size());
  const auto& lvl = cubes.level(k);
  std::vector<ShapeCheck> out(lvl.size());
  for (std::size_t al = 0; al < lvl.size(); ++al)
    for (auto x : lvl[al].members) out[al].lhs += mu.w[x] * std::pow(tails[x][0], q);
  for (int j = k; j <= cubes.k_max; ++j) {
    const auto& lj = cubes.level(j);
    const double ej = std::pow(cubes.eps, j);
    for (std::size_t be = 0; be < lj.size(); ++be) {
      std::size_t al = cubes.cube_at(k, lj[be].members.front());
      double a = t.a[j - k][be];
      if (a > 0.0) out[al].rhs += ej * t.mass[j - k][be] * std::pow(a, q - 1.0);
    }
  }
  return out;
}

}  // namespace mms
