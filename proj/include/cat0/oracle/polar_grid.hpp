#ifndef CAT0_ORACLE_POLAR_GRID_HPP
#define CAT0_ORACLE_POLAR_GRID_HPP

namespace cat0::oracle {

/// Discretization of the cover in (log r, theta). Edges are planar chords
/// between nodes that stay outside the open unit disk, plus arcs along the
/// circle row; the stencil uses all coprime steps up to the given reach.
struct PolarGrid {
    double log_step = 0.01;
    double angle_step = 0.01;
    int reach = 5;
    double margin = 0.1;
};

/// Shortest grid path between (r1, theta1) and (r2, theta2) in the universal
/// cover of the plane minus the open unit disk.
double seaweed_grid_distance(double r1, double theta1, double r2, double theta2,
                             const PolarGrid& grid = {});

}  // namespace cat0::oracle

#endif
