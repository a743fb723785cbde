#include "mms/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mms {

PartialOrder build_order(const Space& space, const NetHierarchy& nets) {
  PartialOrder po;
  po.k_min = nets.k_min;
  po.k_max = nets.k_max;
  po.parent.resize(nets.levels.size());
  for (int k = nets.k_min + 1; k <= nets.k_max; ++k) {
    const PointSet& fine = nets.level(k);
    const PointSet& coarse = nets.level(k - 1);
    if (coarse.empty()) throw Error(Err::OrphanPoint, "empty coarser net");
    auto& par = po.parent[k - nets.k_min];
    par.resize(fine.size());
    const double r = std::pow(nets.eps, k - 1);
    for (std::size_t a = 0; a < fine.size(); ++a) {
      std::size_t b = nearest_in(space, coarse, fine[a]);
      if (!(space.d(fine[a], coarse[b]) < r))
        throw Error(Err::OrphanPoint, "net point outside every coarser ball");
      par[a] = b;
    }
  }
  return po;
}

std::vector<std::string> verify_order(const Space& space, const NetHierarchy& nets,
                                      const PartialOrder& order) {
  std::vector<std::string> bad;
  auto report = [&](const char* tag, int k, std::size_t a) {
    std::ostringstream os;
    os << tag << " level " << k << " point " << a;
    bad.push_back(os.str());
  };
  for (int k = nets.k_min + 1; k <= nets.k_max; ++k) {
    const PointSet& fine = nets.level(k);
    const PointSet& coarse = nets.level(k - 1);
    const double r = std::pow(nets.eps, k - 1);
    if (order.parent.at(k - nets.k_min).size() != fine.size()) {
      report("PO2", k, 0);
      continue;
    }
    for (std::size_t a = 0; a < fine.size(); ++a) {
      std::size_t b = order.parent_of(k, a);
      if (b >= coarse.size()) { report("PO1", k, a); continue; }
      if (!(space.d(fine[a], coarse[b]) < r)) report("PO3", k, a);
      for (std::size_t c = 0; c < coarse.size(); ++c)
        // net separation is only certified up to kTol, so the strict test is too
        if (c != b && space.d(fine[a], coarse[c]) < r / 2 - kTol) report("PO4", k, a);
    }
  }
  return bad;
}

CubeSystem build_cubes(const Space& space, const NetHierarchy& nets,
                       const PartialOrder& order, double a) {
  if (!(a > 0.0) || a > 0.125) throw Error(Err::BadParams, "a must lie in (0, 1/8]");
  const std::size_t n = space.size();
  CubeSystem cs;
  cs.eps = nets.eps;
  cs.a = a;
  cs.k_min = nets.k_min;
  cs.k_max = nets.k_max;
  cs.domain = nets.domain;
  const int top = nets.k_max - nets.k_min;
  cs.levels.resize(top + 1);
  cs.cube_of.assign(top + 1, std::vector<std::size_t>(n, kNone));
  for (int li = 0; li <= top; ++li)
    for (auto z : nets.levels[li]) {
      Cube c;
      c.center = z;
      cs.levels[li].push_back(std::move(c));
    }
  const PointSet& finest = nets.levels[top];
  for (auto x : cs.domain) {
    std::size_t al = nearest_in(space, finest, x);
    for (int li = top; li >= 0; --li) {
      cs.cube_of[li][x] = al;
      cs.levels[li][al].members.push_back(x);
      if (li > 0) al = order.parent[li][al];
    }
  }
  for (int li = 1; li <= top; ++li)
    for (std::size_t al = 0; al < cs.levels[li].size(); ++al) {
      std::size_t p = order.parent[li][al];
      cs.levels[li][al].parent = p;
      cs.levels[li - 1][p].children.push_back(al);
    }
  return cs;
}

CubeSystem build_quasicubes(const Space& space, const NetHierarchy& nets_on_S,
                            const PartialOrder& order_on_S) {
  return build_cubes(space, nets_on_S, order_on_S);
}

std::vector<std::string> verify_cubes(const Space& space, const CubeSystem& cs) {
  std::vector<std::string> bad;
  auto report = [&](const char* tag, int k, std::size_t al) {
    std::ostringstream os;
    os << tag << " level " << k << " cube " << al;
    bad.push_back(os.str());
  };
  const std::size_t n = space.size();
  auto dom = to_mask(cs.domain, n);
  for (int k = cs.k_min; k <= cs.k_max; ++k) {
    const auto& lvl = cs.level(k);
    const double ek = std::pow(cs.eps, k);
    // DQ1 + exact partition
    std::vector<int> hits(n, 0);
    for (std::size_t al = 0; al < lvl.size(); ++al) {
      if (lvl[al].members.empty()) report("EMPTY", k, al);
      for (auto x : lvl[al].members) {
        ++hits[x];
        if (cs.cube_at(k, x) != al) report("INDEX", k, al);
      }
    }
    for (auto x : cs.domain)
      if (hits[x] != 1) report(hits[x] == 0 ? "DQ1" : "PARTITION", k, x);
    for (std::size_t al = 0; al < lvl.size(); ++al) {
      const Cube& q = lvl[al];
      // DQ4 outer
      for (auto x : q.members)
        if (!within(space.d(x, q.center), 2 * ek)) { report("DQ4-outer", k, al); break; }
      // DQ4 inner, on the domain
      auto ord = space.order(q.center);
      std::size_t cnt = space.ball_count(q.center, cs.a * ek);
      for (std::size_t t = 0; t < cnt; ++t) {
        std::size_t y = ord[t];
        if (dom[y] && cs.cube_at(k, y) != al) { report("DQ4-inner", k, al); break; }
      }
      // DQ2/DQ3: unique parent containing every member
      if (k > cs.k_min) {
        if (q.parent == kNone) { report("DQ3", k, al); continue; }
        for (auto x : q.members)
          if (cs.cube_at(k - 1, x) != q.parent) { report("DQ2", k, al); break; }
      }
    }
  }
  return bad;
}

HatMap build_hat_cubes(const Space& space, const CubeSystem& cs) {
  HatMap hats(cs.levels.size());
  for (int k = cs.k_min; k <= cs.k_max; ++k) {
    const auto& lvl = cs.level(k);
    const double ek = std::pow(cs.eps, k);
    auto& out = hats[k - cs.k_min];
    out.resize(lvl.size());
    for (std::size_t al = 0; al < lvl.size(); ++al) {
      auto ord = space.order(lvl[al].center);
      std::size_t cnt = space.ball_count(lvl[al].center, 5 * ek);
      std::vector<std::size_t> touched;
      for (std::size_t t = 0; t < cnt; ++t) {
        std::size_t c = cs.cube_at(k, ord[t]);
        if (c != kNone) touched.push_back(c);
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      PointSet hat;
      for (auto c : touched)
        hat.insert(hat.end(), lvl[c].members.begin(), lvl[c].members.end());
      std::sort(hat.begin(), hat.end());
      out[al] = std::move(hat);
    }
  }
  return hats;
}

std::vector<std::vector<PointSet>> quasicube_ambient(const Space& space,
                                                     const CubeSystem& qc) {
  const std::size_t n = space.size();
  const int top = qc.k_max - qc.k_min;
  std::vector<std::vector<PointSet>> out(top + 1);
  for (int li = top; li >= 0; --li) {
    const auto& lvl = qc.levels[li];
    out[li].resize(lvl.size());
    const double r = std::pow(qc.eps, qc.k_min + li) / 8;
    std::vector<char> own(n, 0);
    for (std::size_t al = 0; al < lvl.size(); ++al) {
      auto ord = space.order(lvl[al].center);
      auto sd = space.sorted_dist(lvl[al].center);
      for (std::size_t t = 0; t < n && sd[t] < r - kTol; ++t) own[ord[t]] = 1;
      if (li < top)
        for (auto ch : lvl[al].children)
          for (auto y : out[li + 1][ch]) own[y] = 1;
      out[li][al] = from_mask(own);
      std::fill(own.begin(), own.end(), 0);
    }
  }
  return out;
}

}  // namespace mms
