#ifndef CAT0_BOUNDARY_METRICS_HPP
#define CAT0_BOUNDARY_METRICS_HPP

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "cat0/space_models.hpp"

namespace cat0 {

struct GeodesicRay;

struct EuclideanRay {
    Eigen::VectorXd direction;  // unit length
};

struct TreeRay {
    EdgeWord word;  // infinite, canonical
};

/// t -> (left(a t), right(b t)) with a^2 + b^2 = 1, a, b >= 0.
struct ProductRay {
    std::shared_ptr<const GeodesicRay> left;
    std::shared_ptr<const GeodesicRay> right;
    double a = 1.0;
    double b = 0.0;
};

/*
 * Rays of the seaweed cover from its basepoint. Straight(theta) is asymptotic
 * to the planar direction theta (unwrapped); once theta leaves the directly
 * visible range the ray runs along a tangent, wraps the unit circle and
 * leaves tangentially. Spiral(+/-) wraps the circle forever.
 */
struct SeaweedRay {
    enum class Kind { straight, spiral };
    Kind kind = Kind::straight;
    double theta = 0.0;  // straight only
    int sign = 1;        // spiral only
};

struct GeodesicRay {
    std::variant<EuclideanRay, TreeRay, ProductRay, SeaweedRay> value;

    static GeodesicRay euclidean(Eigen::VectorXd direction);
    static GeodesicRay tree(EdgeWord word);
    static GeodesicRay product(GeodesicRay left, GeodesicRay right, double a, double b);
    static GeodesicRay straight(double theta);
    static GeodesicRay spiral(int sign);
};

/// Throws std::invalid_argument if the descriptor does not fit the model or
/// the ray fails the unit-speed check on sampled parameters.
void validate_ray(const SpaceModel& space, const GeodesicRay& ray);

Point ray_eval(const SpaceModel& space, const GeodesicRay& ray, double t);

/// Descriptor equality (exact for words and spirals, 1e-12 on directions and angles).
bool same_ray(const SpaceModel& space, const GeodesicRay& a, const GeodesicRay& b);

/// Largest parameter up to which the rays coincide (0 if they part at the
/// basepoint, infinity if they are equal).
double separation_time(const SpaceModel& space, const GeodesicRay& a, const GeodesicRay& b);

/// Human-readable descriptor, also used for CSV rows.
std::string describe_ray(const SpaceModel& space, const GeodesicRay& ray);

/// A point t*ray of the Euclidean cone over the boundary.
struct ConePoint {
    double t = 0.0;
    GeodesicRay ray;
};

struct ConvergenceEstimate {
    enum class Status { converged, not_converged, diverged };

    double value = 0.0;
    double last_increment = 0.0;
    Status status = Status::not_converged;
    std::vector<double> scales;
    std::vector<double> values;
};

std::string to_string(ConvergenceEstimate::Status status);

/// Builds an estimate from a trace; converged iff the last increment is at most
/// the tolerance, diverged if the final value is infinite.
ConvergenceEstimate make_estimate(std::vector<double> scales, std::vector<double> values,
                                  double tolerance);

struct VisualDistance {
    double value = 0.0;        // 1 / sup{t : d(a(t), b(t)) <= C}
    double sup_time = 0.0;
    bool beyond_horizon = false;  // value reported as 0 because the sup exceeds the horizon
};

constexpr double default_horizon = 1048576.0;  // 2^20
constexpr double default_tolerance = 1e-6;

VisualDistance visual_distance(const SpaceModel& space, const GeodesicRay& a,
                               const GeodesicRay& b, double c, double horizon = default_horizon);

/// Sine-formula angle estimate 2 asin(min(1, d(a(t), b(t)) / 2t)) along the
/// schedule, with both rays re-based at the point where they separate.
ConvergenceEstimate angle_between(const SpaceModel& space, const GeodesicRay& a,
                                  const GeodesicRay& b, std::span<const double> schedule,
                                  double tolerance = default_tolerance);

/// Chain estimate of the Tits distance over the model's interpolation family.
ConvergenceEstimate tits_distance_chain(const SpaceModel& space, const GeodesicRay& a,
                                        const GeodesicRay& b, std::size_t chain_size,
                                        std::span<const double> schedule,
                                        double tolerance = default_tolerance);

/// Euclidean cone metric with the boundary angle capped at pi.
double cone_metric(double s, double t, double boundary_angle);
double cone_metric(const ConePoint& a, const ConePoint& b, double boundary_angle);

struct FlatSectorResult {
    bool flat = false;
    double max_deviation = 0.0;
    double angle = 0.0;             // limit angle
    double basepoint_angle = 0.0;   // small-t comparison angle at the basepoint
};

FlatSectorResult flat_sector_check(const SpaceModel& space, const GeodesicRay& a,
                                   const GeodesicRay& b, std::span<const double> radii,
                                   double tolerance = 1e-9);

/// inf over parameters of d(x, ray(tau)); the function is convex in tau.
double distance_to_ray(const SpaceModel& space, const Point& x, const GeodesicRay& ray);

/// The two inclusions relating d_C balls to the visual basis sets U(a, R, eps).
struct VisualBasisCheck {
    bool small_ball_applies = false;  // d_C(a, b) < eps / (C R)
    bool small_ball_holds = true;     // then d(a(R), im b) < eps
    bool basis_applies = false;       // d(a(1/eps + C/2), im b) < C/2
    bool basis_holds = true;          // then d_C(a, b) < eps
};

VisualBasisCheck visual_basis_check(const SpaceModel& space, const GeodesicRay& a,
                                    const GeodesicRay& b, double c, double radius, double eps);

/// Geometric schedule base * 2^k up to and including the horizon.
std::vector<double> doubling_schedule(double base, double horizon);

}  // namespace cat0

#endif
