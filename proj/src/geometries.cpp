#include "mms/geometries.hpp"

#include <cmath>

namespace mms {

namespace {

std::vector<std::vector<double>> square_grid(std::size_t m) {
  std::vector<std::vector<double>> pts;
  const double h = 1.0 / static_cast<double>(m - 1);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) pts.push_back({j * h, i * h});
  return pts;
}

Geometry square_with(const std::string& name, std::size_t m, double theta,
                     bool (*in_S)(double, double)) {
  if (m < 2) throw Error(Err::BadParams, "grid needs at least 2 points per side");
  Geometry g;
  g.name = name;
  auto pts = square_grid(m);
  g.space = Space::from_points(pts);
  const double n = static_cast<double>(pts.size());
  g.mu = Measure(std::vector<double>(pts.size(), 1.0 / n));
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (in_S(pts[i][0], pts[i][1])) g.S.push_back(i);
  g.theta = theta;
  return g;
}

}  // namespace

Geometry make_line(std::size_t n) {
  if (n < 2) throw Error(Err::BadParams, "line needs two points");
  Geometry g;
  g.name = "line";
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({i / static_cast<double>(n - 1)});
  g.space = Space::from_points(pts);
  g.mu = Measure(std::vector<double>(n, 1.0 / n));
  for (std::size_t i = 0; i < n; ++i)
    if (pts[i][0] <= 0.5 + kTol) g.S.push_back(i);
  g.H = g.mu.restricted(g.S);
  return g;
}

Geometry make_grid2d(std::size_t m) {
  auto g = square_with("grid2d", m, 0.0, [](double x, double y) {
    return x <= 0.5 + kTol && y <= 0.5 + kTol;
  });
  g.H = g.mu.restricted(g.S);
  return g;
}

Geometry make_segment(std::size_t m) {
  auto g = square_with("segment", m, 1.0, [](double, double y) { return y <= kTol; });
  g.H = Measure::zero(g.space.size());
  for (auto i : g.S) g.H.w[i] = 1.0 / static_cast<double>(m);
  return g;
}

Geometry make_ball(std::size_t m) {
  auto g = square_with("ball", m, 0.0, [](double x, double y) {
    return std::hypot(x - 0.5, y - 0.5) <= 0.25 + kTol;
  });
  g.H = g.mu.restricted(g.S);
  return g;
}

Geometry make_composite(std::size_t m) {
  if (m < 11 || (m - 1) % 10 != 0)
    throw Error(Err::BadParams, "composite grid needs (m-1) divisible by 10");
  auto g = square_with("composite", m, 1.0, [](double x, double y) {
    bool disc = std::hypot(x - 0.3, y - 0.5) <= 0.2 + kTol;
    bool curve = std::abs(y - 0.5) <= kTol && x >= 0.5 - kTol;
    return disc || curve;
  });
  const auto& pts = g.space.coords();
  PointSet disc, curve;
  for (auto i : g.S) {
    if (std::hypot(pts[i][0] - 0.3, pts[i][1] - 0.5) <= 0.2 + kTol) disc.push_back(i);
    if (std::abs(pts[i][1] - 0.5) <= kTol && pts[i][0] >= 0.5 - kTol) {
      curve.push_back(i);
      if (std::abs(pts[i][0] - 0.5) <= kTol) g.junction = i;
    }
  }
  g.parts = {disc, curve};
  Measure hc = Measure::zero(g.space.size());
  for (auto i : curve) hc.w[i] = 1.0 / static_cast<double>(m - 1);
  g.part_H = {g.mu.restricted(disc), hc};
  g.part_theta = {0.0, 1.0};
  g.H = g.part_H[0] + g.part_H[1];
  return g;
}

Geometry make_graded_segment(std::size_t nx, const std::vector<double>& rows) {
  if (nx < 2 || rows.empty() || rows[0] != 0.0)
    throw Error(Err::BadParams, "graded grid needs nx >= 2 and a row at 0");
  Geometry g;
  g.name = "graded_segment";
  std::vector<std::vector<double>> pts;
  std::vector<double> w;
  const double hx = 1.0 / static_cast<double>(nx - 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    // row cell height: half-gaps to the neighbouring rows
    double below = r > 0 ? rows[r] - rows[r - 1] : 0.0;
    double above = r + 1 < rows.size() ? rows[r + 1] - rows[r] : 0.0;
    double dy = 0.5 * (below + above);
    for (std::size_t i = 0; i < nx; ++i) {
      double dx = (i == 0 || i + 1 == nx) ? 0.5 * hx : hx;
      pts.push_back({i * hx, rows[r]});
      w.push_back(dx * dy);
      if (r == 0) g.S.push_back(pts.size() - 1);
    }
  }
  g.space = Space::from_points(pts);
  g.mu = Measure(w);
  g.theta = 1.0;
  g.H = Measure::zero(pts.size());
  for (auto i : g.S) g.H.w[i] = (i == 0 || i + 1 == nx) ? 0.5 * hx : hx;
  return g;
}

Geometry make_geometry(const std::string& name, std::size_t size) {
  if (name == "line") return make_line(size);
  if (name == "grid2d") return make_grid2d(size);
  if (name == "segment") return make_segment(size);
  if (name == "ball") return make_ball(size);
  if (name == "composite") return make_composite(size);
  throw Error(Err::BadParams, "unknown geometry " + name);
}

}  // namespace mms
