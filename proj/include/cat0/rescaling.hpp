#ifndef CAT0_RESCALING_HPP
#define CAT0_RESCALING_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cat0/boundary_metrics.hpp"
#include "cat0/space_models.hpp"

namespace cat0 {

/*
 * A divergent positive sequence d_1, d_2, ... evaluated on demand (indices
 * are 1-based). An optional lower-bound certificate is checked at every
 * evaluation; a violation throws ConvergenceError carrying the index.
 */
class ScaleSequence {
public:
    using Generator = std::function<double(std::size_t)>;

    ScaleSequence(Generator generator, std::optional<Generator> certificate = std::nullopt,
                  std::string description = "custom");

    /// base * ratio^(n-1), ratio > 1.
    static ScaleSequence geometric(double base, double ratio);
    /// coefficient * n^exponent, exponent > 0.
    static ScaleSequence polynomial(double exponent, double coefficient = 1.0);
    /// Finite list; evaluation past the end throws std::out_of_range.
    static ScaleSequence from_values(std::vector<double> values);

    double operator()(std::size_t n) const;
    std::vector<double> prefix(std::size_t length) const;
    /// Number of stored values for explicit sequences.
    std::optional<std::size_t> size() const { return size_; }
    const std::string& description() const { return description_; }

private:
    Generator generator_;
    std::optional<Generator> certificate_;
    std::string description_;
    std::optional<std::size_t> size_;
};

/// A view of the space with its metric divided by the scale.
struct ScaledView {
    SpaceModel space;
    double scale = 1.0;

    ScaledView(SpaceModel space, double scale);
    double distance(const Point& p, const Point& q) const;
};

/// ray(t s): the point at rescaled distance t from the basepoint.
Point psi_eval(const SpaceModel& space, double s, double t, const GeodesicRay& ray);

/// Retraction from scale s down to scale s_lower <= s; keeps the rescaled
/// distance to the basepoint.
Point theta_map(const SpaceModel& space, double s, double s_lower, const Point& x);

/// d(a(t s), b(t' s)) / s along the schedule.
ConvergenceEstimate cone_distance_at_scale(const SpaceModel& space, const ConePoint& a,
                                           const ConePoint& b, std::span<const double> schedule,
                                           double tolerance = default_tolerance);

/// sup over the scales of the rescaled distances.
double inverse_limit_distance(const SpaceModel& space, const ConePoint& a, const ConePoint& b,
                              std::span<const double> scales);

struct CollapseOptions {
    double t_max = 10.0;
    std::size_t t_samples = 20;
    std::vector<double> lower_fractions{1.0, 0.5, 0.25, 0.1};
    double converse_t = 1.0;
};

struct CollapseReport {
    std::vector<double> visual;    // d_C(target, ray_n)
    std::vector<double> schedule;  // sqrt(1 / d_C)
    std::vector<double> gaps;      // d(ray_n(t0 d_n), target(t0 d_n)) / d_n
    bool bound_holds = true;
    double worst_bound_ratio = 0.0;  // max of rescaled gap / (C / d')
    std::size_t bound_checks = 0;
    bool converse_holds = true;
    double worst_converse_ratio = 0.0;  // max of d_C / converse bound
};

/// Builds the collapse schedule for a list of rays converging to the target and
/// checks the collapse bound and its converse on the sampled data. Throws
/// ConvergenceError with the offending index when d_C is 0 or increases.
CollapseReport collapse_schedule(const SpaceModel& space, std::span<const GeodesicRay> rays,
                                 const GeodesicRay& target, double c,
                                 const CollapseOptions& options = {});

struct LatticeBounds {
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<std::size_t> level;  // largest i with n in A_i
};

/// Upper and lower bounds of a finite family of scaling sequences on the
/// prefix 1..length (entry n-1 holds index n).
LatticeBounds scale_lattice_bounds(std::span<const ScaleSequence> sequences, std::size_t length);

struct CutPointWitness {
    bool separated = false;
    double branch_depth = 0.0;     // shared prefix length
    double rescaled_branch = 0.0;  // branch depth / s
};

/// Whether the geodesic between a(t s) and b(t s) runs through the branch
/// point of the two rays. Throws PreconditionError when t s does not exceed
/// the shared prefix (inconclusive) or the rays are equal.
CutPointWitness cut_point_witness(const SpaceModel& space, const GeodesicRay& a,
                                  const GeodesicRay& b, double t, double s);

}  // namespace cat0

#endif
