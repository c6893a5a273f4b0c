#include "cat0/seaweed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cat0::seaweed {

namespace {

struct Planar {
    double x;
    double y;
};

// Polar angle of a planar point given in a frame rotated by `frame`; the
// local angle stays in (-pi, pi) for every use below.
SeaweedPoint to_polar(Planar p, double frame) {
    return SeaweedPoint{std::max(1.0, std::hypot(p.x, p.y)), frame + std::atan2(p.y, p.x)};
}

Planar lerp(Planar a, Planar b, double s) {
    return Planar{a.x + s * (b.x - a.x), a.y + s * (b.y - a.y)};
}

}  // namespace

void validate(const SeaweedPoint& p) {
    if (!std::isfinite(p.r) || !std::isfinite(p.theta)) {
        throw std::invalid_argument("seaweed: non-finite coordinates");
    }
    if (p.r < 1.0) {
        throw std::invalid_argument("seaweed: radius below 1 lies inside the removed disk");
    }
}

double visibility_angle(double r) {
    return std::acos(std::clamp(1.0 / r, -1.0, 1.0));
}

double tangent_length(double r) {
    const double inv = 1.0 / r;
    return r * std::sqrt(std::max(0.0, (1.0 - inv) * (1.0 + inv)));
}

double distance(const SeaweedPoint& p, const SeaweedPoint& q) {
    const double gap = std::abs(q.theta - p.theta);
    const double psi_p = visibility_angle(p.r);
    const double psi_q = visibility_angle(q.r);
    if (gap <= psi_p + psi_q) {
        // |p - q|^2 = (rp - rq)^2 + 4 rp rq sin^2(gap/2), written to avoid overflow
        return std::hypot(p.r - q.r, 2.0 * std::sqrt(p.r) * std::sqrt(q.r) * std::sin(gap / 2.0));
    }
    return tangent_length(p.r) + tangent_length(q.r) + (gap - psi_p - psi_q);
}

SeaweedPoint geodesic(const SeaweedPoint& p, const SeaweedPoint& q, double t) {
    const double total = distance(p, q);
    if (t < 0.0 || t > total * (1.0 + 1e-12) + 1e-12) {
        throw std::out_of_range("seaweed: geodesic parameter outside [0, d(p, q)]");
    }
    t = std::min(t, total);
    if (t == 0.0) {
        return p;
    }
    if (t == total) {
        return q;
    }
    const double signed_gap = q.theta - p.theta;
    const double gap = std::abs(signed_gap);
    const double sigma = signed_gap >= 0.0 ? 1.0 : -1.0;
    const double psi_p = visibility_angle(p.r);
    const double psi_q = visibility_angle(q.r);

    if (gap <= psi_p + psi_q) {
        const Planar a{p.r, 0.0};
        const Planar b{q.r * std::cos(signed_gap), q.r * std::sin(signed_gap)};
        return to_polar(lerp(a, b, t / total), p.theta);
    }

    const double lead = tangent_length(p.r);
    const double arc = gap - psi_p - psi_q;
    if (t <= lead) {
        const Planar a{p.r, 0.0};
        const Planar touch{std::cos(psi_p), sigma * std::sin(psi_p)};
        return to_polar(lerp(a, touch, t / lead), p.theta);
    }
    if (t <= lead + arc) {
        return SeaweedPoint{1.0, p.theta + sigma * (psi_p + (t - lead))};
    }
    const double trail = tangent_length(q.r);
    const Planar touch{std::cos(psi_q), -sigma * std::sin(psi_q)};
    const Planar b{q.r, 0.0};
    return to_polar(lerp(touch, b, (t - lead - arc) / trail), q.theta);
}

}  // namespace cat0::seaweed
