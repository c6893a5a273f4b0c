#ifndef CAT0_QUASI_ISOMETRY_HPP
#define CAT0_QUASI_ISOMETRY_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cat0/boundary_metrics.hpp"
#include "cat0/space_models.hpp"

namespace cat0 {

struct QuasiIsometryMap {
    SpaceModel domain;
    SpaceModel codomain;
    std::function<Point(const Point&)> eval;
    double lambda = 1.0;
    double c = 0.0;
    std::string name;

    Point operator()(const Point& x) const { return eval(x); }
};

QuasiIsometryMap identity_map(const SpaceModel& space);

struct QuasiIsometryCheck {
    bool holds = true;
    double worst_lower = 0.0;  // max of d(x, y)/lambda - C - d(fx, fy)
    double worst_upper = 0.0;  // max of d(fx, fy) - lambda d(x, y) - C
    std::size_t pairs = 0;
};

/// Checks the two-sided quasi-isometry inequality on all sample pairs.
QuasiIsometryCheck check_quasi_isometry(const QuasiIsometryMap& f, std::span<const Point> samples,
                                        double slack = 1e-9);

/// Radial twist profile h with derivative, h(1) = 0.
struct SpiralProfile {
    std::string name;
    std::function<double(double)> h;
    std::function<double(double)> dh;
};

/// "log", "loglog", "log_sin_loglog", "loglog_sin_logloglog" or "zero".
SpiralProfile spiral_profile(const std::string& name);
/// Piecewise-linear profile through (r, h) knots with r increasing from 1.
SpiralProfile spiral_table(std::vector<std::pair<double, double>> knots);

/// Lipschitz constant of (r, theta) -> (r, theta + h(r)) when |r h'| <= k.
double spiral_lipschitz(double k);

/// The twist on the plane (identity inside the unit disk).
QuasiIsometryMap spiral_map(const SpiralProfile& profile, double r_max = 1e300);
/// The twist lifted to the seaweed cover; rejects profiles with unbounded
/// r h'(r) on [1, r_max].
QuasiIsometryMap lift_to_seaweed(const SpiralProfile& profile, double r_max = 1e300);

/// Isometry of a tree that renames edges by the permutation (new id of each
/// edge); must preserve tails, heads and lengths.
QuasiIsometryMap tree_relabeling(const SpaceModel& space, std::vector<EdgeId> permutation);

/// Based ray through y (y must differ from the basepoint). In the seaweed
/// cover an endpoint reached along the unit circle continues along it.
GeodesicRay ray_through(const SpaceModel& space, const Point& y);

/// Which piece of the Tits boundary a ray lies in.
std::string component_label(const SpaceModel& space, const GeodesicRay& ray);

/// Boundary-level gap between two descriptors: angle between directions,
/// difference of seaweed angles, 0 or infinity for discrete pieces.
double descriptor_gap(const SpaceModel& space, const GeodesicRay& a, const GeodesicRay& b);

/// Ray through the chord [f(ray(0)), f(ray(s))], re-based at the basepoint.
GeodesicRay pushforward_at_scale(const QuasiIsometryMap& f, const GeodesicRay& ray, double s);

/// Rescaled distance at scale s_lower between the retracted image point
/// theta(f(ray(s))) and the pushforward ray at s_lower.
double relations_gap(const QuasiIsometryMap& f, const GeodesicRay& ray, double s, double s_lower);

struct SweepResult {
    std::vector<double> scales;
    std::vector<GeodesicRay> rays;
    std::vector<GeodesicRay> closure;  // representatives at the resolution
    bool stabilized = false;           // trace eventually constant
};

SweepResult limit_set_sweep(const QuasiIsometryMap& f, const GeodesicRay& ray,
                            std::span<const double> scales, double resolution);

/// Largest distance from a point of the circle to the nearest listed angle.
double circle_cover_radius(std::vector<double> angles);

struct SpiralAnalysis {
    double sup_rh = 0.0;   // sup of |r h'(r)| on [1, r_max]
    double argmax = 1.0;
    std::vector<std::pair<double, double>> distortion;  // (s, distortion)
};

SpiralAnalysis spiral_analysis(const SpiralProfile& profile, double r_max,
                               std::span<const double> scales, std::size_t pairs = 4000,
                               std::uint64_t seed = 1);

/// sup over pairs in the disk of radius s of |d(fx, fy) - d(x, y)| / s, on
/// seeded random pairs plus a radial-pair sweep.
double spiral_distortion(const SpiralProfile& profile, double s, std::size_t pairs,
                         std::uint64_t seed);

double hausdorff_distance(const SpaceModel& space, std::span<const Point> a,
                          std::span<const Point> b);

struct MorseRow {
    double size = 0.0;
    double epsilon = 0.0;
    double displacement = 0.0;
    double deviation = 0.0;
};

struct MorseProbeResult {
    enum class Verdict { bounded, growing, inconclusive };

    double l = 2.0;
    double c = 1.0;
    std::size_t probes = 0;
    double max_deviation = 0.0;
    Verdict verdict = Verdict::inconclusive;
    std::vector<MorseRow> rows;
    std::vector<double> deviation_by_size;
};

std::string to_string(MorseProbeResult::Verdict verdict);

/// 0.1, 0.2 and 0.4.
std::span<const double> default_morse_epsilons();

/// Detours from ray(0) to ray(T) through a point pushed off ray(T/2) by the
/// largest displacement up to eps T that keeps the detour (L, C)-quasi-geodesic.
MorseProbeResult morse_probe(const SpaceModel& space, const GeodesicRay& ray, double l, double c,
                             std::span<const double> sizes,
                             std::span<const double> epsilons = default_morse_epsilons());


struct RoundtripResult {
    bool bounded = false;
    double gap = 0.0;  // max sampled distance from the original ray
    std::vector<double> gaps;
};

/// g-pushforward at s_g of the f-pushforward at s_f, compared with the ray on
/// a doubling grid. Throws PreconditionError if f(g(x)) strays more than g.c
/// from x on the samples.
RoundtripResult roundtrip_check(const QuasiIsometryMap& f, const QuasiIsometryMap& g,
                                const GeodesicRay& ray, double s_f, double s_g,
                                std::span<const Point> samples);

/// Two quasi-geodesic rays in the plane for the close-rays bound.
struct CloseRaysInstance {
    double l = 1.0, c = 0.0;              // constants of the second ray
    double l_first = 1.0, c_first = 0.0;  // constants of the first ray
    double m = 0.0;                       // measured neighbourhood radius of the hypothesis
    double measured = 0.0;                // Hausdorff distance of the windows
    double bound = 0.0;
    bool quasi_geodesics_verified = false;
    std::vector<Point> first;
    std::vector<Point> second;
};

CloseRaysInstance close_rays_instance(std::uint64_t seed, std::size_t samples = 600);

}  // namespace cat0

#endif
