#pragma once

#include <limits>
#include <string>
#include <vector>

#include "mms/core.hpp"

namespace mms {

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct PartialOrder {
  int k_min = 0;
  int k_max = 0;
  // parent[k - k_min][a]: index in Z_{k-1} of the parent of the a-th point of
  // Z_k. Empty for k = k_min.
  std::vector<std::vector<std::size_t>> parent;

  std::size_t parent_of(int k, std::size_t a) const { return parent.at(k - k_min).at(a); }
};

// Parent = nearest point of the next coarser net, ties by net index.
PartialOrder build_order(const Space& space, const NetHierarchy& nets);

// Violations of PO1-PO4; empty when admissible.
std::vector<std::string> verify_order(const Space& space, const NetHierarchy& nets,
                                      const PartialOrder& order);

struct Cube {
  std::size_t center = 0;      // point index of z_{k,alpha}
  PointSet members;
  std::size_t parent = kNone;  // cube index one level up
  std::vector<std::size_t> children;
};

struct CubeSystem {
  double eps = 0.1;
  double a = 0.125;
  int k_min = 0;
  int k_max = 0;
  PointSet domain;                               // points covered by the system
  std::vector<std::vector<Cube>> levels;         // cube alpha = net point alpha
  std::vector<std::vector<std::size_t>> cube_of; // [k - k_min][x], kNone off domain

  const std::vector<Cube>& level(int k) const { return levels.at(k - k_min); }
  std::size_t cube_at(int k, std::size_t x) const { return cube_of.at(k - k_min).at(x); }
};

// Each domain point joins the cube of its nearest finest-level net point;
// membership then propagates up the order.
CubeSystem build_cubes(const Space& space, const NetHierarchy& nets,
                       const PartialOrder& order, double a = 0.125);

// Same construction on nets built over a subset S.
CubeSystem build_quasicubes(const Space& space, const NetHierarchy& nets_on_S,
                            const PartialOrder& order_on_S);

// Violations of DQ1-DQ4 and of the exact-partition property.
std::vector<std::string> verify_cubes(const Space& space, const CubeSystem& cubes);

// hats[k - k_min][alpha] = union of same-level cubes meeting B_{5 eps^k}(z).
using HatMap = std::vector<std::vector<PointSet>>;
HatMap build_hat_cubes(const Space& space, const CubeSystem& cubes);

// Ambient points of the open quasicube: points within eps^l/8 (strictly) of
// some level-l descendant center, l from k to the finest level.
std::vector<std::vector<PointSet>> quasicube_ambient(const Space& space,
                                                     const CubeSystem& qc);

}  // namespace mms
