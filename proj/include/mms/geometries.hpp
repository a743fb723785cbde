#pragma once

#include <string>
#include <vector>

#include "mms/core.hpp"

namespace mms {

// Ambient point cloud with its measure, a target set S and the natural
// codimension-theta proxy H on S. Composite sets carry their components.
struct Geometry {
  std::string name;
  Space space;
  Measure mu;
  PointSet S;
  Measure H;             // base measure on S
  double theta = 0.0;    // codimension of S
  // components (composite only)
  std::vector<PointSet> parts;
  std::vector<Measure> part_H;
  std::vector<double> part_theta;
  std::size_t junction = 0;
};

// n points on [0,1]; S = [0, 1/2].
Geometry make_line(std::size_t n);
// m x m grid on the unit square; S = lower-left quarter.
Geometry make_grid2d(std::size_t m);
// m x m grid; S = bottom edge, theta = 1.
Geometry make_segment(std::size_t m);
// m x m grid; S = disc of radius 1/4 at the centre, theta = 0.
Geometry make_ball(std::size_t m);
// m x m grid, (m-1) divisible by 10; S = disc of radius 0.2 at (0.3, 0.5)
// joined at (0.5, 0.5) to the segment [0.5, 1] x {1/2}.
Geometry make_composite(std::size_t m);
// Segment-in-square with rows refined towards S. The bottom edge carries
// `nx` points; rows sit at the heights in `rows` (first must be 0).
Geometry make_graded_segment(std::size_t nx, const std::vector<double>& rows);

Geometry make_geometry(const std::string& name, std::size_t size);

}  // namespace mms
