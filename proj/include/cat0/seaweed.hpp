#ifndef CAT0_SEAWEED_HPP
#define CAT0_SEAWEED_HPP

namespace cat0 {

/// Point of the universal cover of the plane minus the open unit disk:
/// radius r >= 1 and unwrapped polar angle theta.
struct SeaweedPoint {
    double r = 1.0;
    double theta = 0.0;
};

namespace seaweed {

/// Half-angle of visibility: the tangent from radius r touches the unit
/// circle arccos(1/r) away from the radial direction.
double visibility_angle(double r);

/// Length of the tangent segment from radius r to the unit circle.
double tangent_length(double r);

/// Closed-form distance in the cover. Straight chord when the angular gap is
/// at most the sum of the visibility angles, else tangent + arc + tangent.
double distance(const SeaweedPoint& p, const SeaweedPoint& q);

/// Point at arclength t along the geodesic from p to q.
SeaweedPoint geodesic(const SeaweedPoint& p, const SeaweedPoint& q, double t);

/// Throws std::invalid_argument for r < 1 or non-finite coordinates.
void validate(const SeaweedPoint& p);

}  // namespace seaweed

}  // namespace cat0

#endif
