#include "cat0/boundary_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cat0/errors.hpp"

namespace cat0 {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

template <class T>
const T& expect(const GeodesicRay& ray, const char* model) {
    const T* value = std::get_if<T>(&ray.value);
    if (value == nullptr) {
        throw std::invalid_argument(std::string("ray descriptor does not belong to the ") + model +
                                    " model");
    }
    return *value;
}

// Seaweed ray geometry relative to the basepoint (r0, theta0): the directly
// visible directions are theta0 +- (pi/2 + psi0); past them a ray wraps.
struct SeaweedFrame {
    double r0;
    double theta0;
    double psi0;
    double lead;  // tangent length from the basepoint

    explicit SeaweedFrame(const SeaweedPoint& base)
        : r0(base.r),
          theta0(base.theta),
          psi0(seaweed::visibility_angle(base.r)),
          lead(seaweed::tangent_length(base.r)) {}

    double edge() const { return pi / 2.0 + psi0; }

    SeaweedPoint straight(double phi, double t) const {
        const double x = r0 + t * std::cos(phi);
        const double y = t * std::sin(phi);
        return SeaweedPoint{std::max(1.0, std::hypot(x, y)), theta0 + std::atan2(y, x)};
    }

    // Tangent segment, arc of the given length, then the outgoing tangent.
    SeaweedPoint wrapped(int sign, double arc, double t) const {
        if (t <= lead) {
            return straight(sign * edge(), t);
        }
        if (t <= lead + arc) {
            return SeaweedPoint{1.0, theta0 + sign * (psi0 + (t - lead))};
        }
        const double out = t - lead - arc;
        return SeaweedPoint{std::sqrt(1.0 + out * out), theta0 + sign * (psi0 + arc + std::atan(out))};
    }

    // Side (+1, -1, or 0 when directly visible) and how far the ray wraps.
    std::pair<int, double> wrap(const SeaweedRay& ray) const {
        if (ray.kind == SeaweedRay::Kind::spiral) {
            return {ray.sign, inf};
        }
        const double rel = ray.theta - theta0;
        if (rel >= edge()) {
            return {1, rel - edge()};
        }
        if (rel <= -edge()) {
            return {-1, -rel - edge()};
        }
        return {0, 0.0};
    }
};

bool close(double a, double b) {
    return std::abs(a - b) <= 1e-12;
}

}  // namespace

GeodesicRay GeodesicRay::euclidean(Eigen::VectorXd direction) {
    const double norm = direction.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("euclidean ray: direction must be a non-zero finite vector");
    }
    return GeodesicRay{EuclideanRay{direction / norm}};
}

GeodesicRay GeodesicRay::tree(EdgeWord word) {
    if (!word.is_infinite()) {
        throw std::invalid_argument("tree ray: the edge word must be infinite");
    }
    return GeodesicRay{TreeRay{word.canonical()}};
}

GeodesicRay GeodesicRay::product(GeodesicRay left, GeodesicRay right, double a, double b) {
    const double norm = std::hypot(a, b);
    if (a < 0.0 || b < 0.0 || !(norm > 0.0) || !std::isfinite(norm)) {
        throw std::invalid_argument("product ray: speeds must be non-negative and not both zero");
    }
    return GeodesicRay{ProductRay{std::make_shared<const GeodesicRay>(std::move(left)),
                                  std::make_shared<const GeodesicRay>(std::move(right)), a / norm,
                                  b / norm}};
}

GeodesicRay GeodesicRay::straight(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("seaweed ray: direction must be finite");
    }
    return GeodesicRay{SeaweedRay{SeaweedRay::Kind::straight, theta, 1}};
}

GeodesicRay GeodesicRay::spiral(int sign) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("seaweed ray: spiral sign must be +1 or -1");
    }
    return GeodesicRay{SeaweedRay{SeaweedRay::Kind::spiral, 0.0, sign}};
}

Point ray_eval(const SpaceModel& space, const GeodesicRay& ray, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("ray parameter must be finite and non-negative");
    }
    if (space.is_euclidean()) {
        const auto& r = expect<EuclideanRay>(ray, "euclidean");
        if (r.direction.size() != space.dimension()) {
            throw std::invalid_argument("euclidean ray: wrong dimension");
        }
        return Point(Eigen::VectorXd(t * r.direction));
    }
    if (space.is_tree()) {
        const auto& r = expect<TreeRay>(ray, "tree");
        return Point(tree_geometry::at_depth(space.metric_tree(), r.word, t));
    }
    if (space.is_product()) {
        const auto& r = expect<ProductRay>(ray, "product");
        return make_product_point(ray_eval(space.left(), *r.left, r.a * t),
                                  ray_eval(space.right(), *r.right, r.b * t));
    }
    const auto& r = expect<SeaweedRay>(ray, "seaweed");
    const SeaweedFrame frame(std::get<SeaweedPoint>(space.basepoint().value));
    const auto [side, arc] = frame.wrap(r);
    if (side == 0) {
        return Point(frame.straight(r.theta - frame.theta0, t));
    }
    return Point(frame.wrapped(side, arc, t));
}

void validate_ray(const SpaceModel& space, const GeodesicRay& ray) {
    if (space.is_tree()) {
        const auto& r = expect<TreeRay>(ray, "tree");
        if (!r.word.is_infinite()) {
            throw std::invalid_argument("tree ray: the edge word must be infinite");
        }
        space.metric_tree().validate_word(r.word);
    } else if (space.is_product()) {
        const auto& r = expect<ProductRay>(ray, "product");
        if (!r.left || !r.right) {
            throw std::invalid_argument("product ray: missing component");
        }
        if (r.a < 0.0 || r.b < 0.0 || std::abs(r.a * r.a + r.b * r.b - 1.0) > 1e-12) {
            throw std::invalid_argument("product ray: speeds must satisfy a^2 + b^2 = 1");
        }
        validate_ray(space.left(), *r.left);
        validate_ray(space.right(), *r.right);
        return;
    } else if (space.is_euclidean()) {
        const auto& r = expect<EuclideanRay>(ray, "euclidean");
        if (r.direction.size() != space.dimension() || std::abs(r.direction.norm() - 1.0) > 1e-12) {
            throw std::invalid_argument("euclidean ray: direction must be a unit vector of the space");
        }
    } else {
        expect<SeaweedRay>(ray, "seaweed");
    }
    if (!same_point(space, ray_eval(space, ray, 0.0), space.basepoint(), 1e-12)) {
        throw std::invalid_argument("ray does not start at the basepoint");
    }
    const double samples[] = {0.0, 0.25, 1.0, 3.5, 10.0, 42.0};
    for (double s : samples) {
        for (double t : samples) {
            const double d = distance(space, ray_eval(space, ray, s), ray_eval(space, ray, t));
            if (std::abs(d - std::abs(s - t)) > 1e-9) {
                throw std::invalid_argument("ray is not unit speed at sampled parameters");
            }
        }
    }
}

bool same_ray(const SpaceModel& space, const GeodesicRay& a, const GeodesicRay& b) {
    if (space.is_euclidean()) {
        return (expect<EuclideanRay>(a, "euclidean").direction -
                expect<EuclideanRay>(b, "euclidean").direction)
                   .lpNorm<Eigen::Infinity>() <= 1e-12;
    }
    if (space.is_tree()) {
        return expect<TreeRay>(a, "tree").word.canonical() == expect<TreeRay>(b, "tree").word.canonical();
    }
    if (space.is_product()) {
        const auto& p = expect<ProductRay>(a, "product");
        const auto& q = expect<ProductRay>(b, "product");
        if (!close(p.a, q.a) || !close(p.b, q.b)) {
            return false;
        }
        return (p.a == 0.0 || same_ray(space.left(), *p.left, *q.left)) &&
               (p.b == 0.0 || same_ray(space.right(), *p.right, *q.right));
    }
    const auto& p = expect<SeaweedRay>(a, "seaweed");
    const auto& q = expect<SeaweedRay>(b, "seaweed");
    if (p.kind != q.kind) {
        return false;
    }
    if (p.kind == SeaweedRay::Kind::spiral) {
        return p.sign == q.sign;
    }
    return std::abs(p.theta - q.theta) <= 1e-12 * std::max(1.0, std::abs(p.theta));
}

double separation_time(const SpaceModel& space, const GeodesicRay& a, const GeodesicRay& b) {
    if (same_ray(space, a, b)) {
        return inf;
    }
    if (space.is_tree()) {
        const auto& p = expect<TreeRay>(a, "tree").word;
        const auto& q = expect<TreeRay>(b, "tree").word;
        return space.metric_tree().prefix_depth(p, EdgeWord::common_prefix(p, q));
    }
    if (space.is_product()) {
        const auto& p = expect<ProductRay>(a, "product");
        const auto& q = expect<ProductRay>(b, "product");
        if (!close(p.a, q.a) || !close(p.b, q.b)) {
            return 0.0;
        }
        const double left = p.a > 0.0 ? separation_time(space.left(), *p.left, *q.left) / p.a : inf;
        const double right = p.b > 0.0 ? separation_time(space.right(), *p.right, *q.right) / p.b : inf;
        return std::min(left, right);
    }
    if (space.is_seaweed()) {
        const SeaweedFrame frame(std::get<SeaweedPoint>(space.basepoint().value));
        const auto [side_a, arc_a] = frame.wrap(expect<SeaweedRay>(a, "seaweed"));
        const auto [side_b, arc_b] = frame.wrap(expect<SeaweedRay>(b, "seaweed"));
        if (side_a != 0 && side_a == side_b) {
            return frame.lead + std::min(arc_a, arc_b);
        }
    }
    return 0.0;
}

std::string describe_ray(const SpaceModel& space, const GeodesicRay& ray) {
    std::ostringstream out;
    out.precision(17);
    if (space.is_euclidean()) {
        const auto& d = expect<EuclideanRay>(ray, "euclidean").direction;
        out << "dir(";
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            out << (i ? " " : "") << d[i];
        }
        out << ")";
    } else if (space.is_tree()) {
        const auto& w = expect<TreeRay>(ray, "tree").word;
        out << "word(";
        for (std::size_t i = 0; i < w.head().size(); ++i) {
            out << (i ? " " : "") << w.head()[i];
        }
        out << "|";
        for (std::size_t i = 0; i < w.cycle().size(); ++i) {
            out << (i ? " " : "") << w.cycle()[i];
        }
        out << ")";
    } else if (space.is_product()) {
        const auto& p = expect<ProductRay>(ray, "product");
        out << "product(" << describe_ray(space.left(), *p.left) << ","
            << describe_ray(space.right(), *p.right) << ";" << p.a << "," << p.b << ")";
    } else {
        const auto& s = expect<SeaweedRay>(ray, "seaweed");
        if (s.kind == SeaweedRay::Kind::spiral) {
            out << (s.sign > 0 ? "spiral(+)" : "spiral(-)");
        } else {
            out << "straight(" << s.theta << ")";
        }
    }
    return out.str();
}

std::string to_string(ConvergenceEstimate::Status status) {
    switch (status) {
        case ConvergenceEstimate::Status::converged:
            return "converged";
        case ConvergenceEstimate::Status::not_converged:
            return "not_converged";
        case ConvergenceEstimate::Status::diverged:
            return "diverged";
    }
    return "unknown";
}

ConvergenceEstimate make_estimate(std::vector<double> scales, std::vector<double> values,
                                  double tolerance) {
    if (values.empty() || values.size() != scales.size()) {
        throw std::invalid_argument("estimate: need one value per scale");
    }
    ConvergenceEstimate e;
    e.value = values.back();
    if (std::isinf(e.value)) {
        e.last_increment = 0.0;
        e.status = ConvergenceEstimate::Status::diverged;
    } else {
        e.last_increment = values.size() > 1 ? values.back() - values[values.size() - 2] : inf;
        e.status = std::abs(e.last_increment) <= tolerance ? ConvergenceEstimate::Status::converged
                                                           : ConvergenceEstimate::Status::not_converged;
    }
    e.scales = std::move(scales);
    e.values = std::move(values);
    return e;
}

VisualDistance visual_distance(const SpaceModel& space, const GeodesicRay& a, const GeodesicRay& b,
                               double c, double horizon) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw std::invalid_argument("visual distance: C must be positive");
    }
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("visual distance: horizon must be positive");
    }
    auto gap = [&](double t) {
        return distance(space, ray_eval(space, a, t), ray_eval(space, b, t));
    };
    if (gap(horizon) <= c) {
        return VisualDistance{0.0, horizon, true};
    }
    double lo = 0.0;
    double hi = std::min(1.0, horizon);
    while (gap(hi) <= c) {
        lo = hi;
        hi = std::min(2.0 * hi, horizon);
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) <= c ? lo : hi) = mid;
    }
    // lo is the last parameter known to keep the gap within C
    return VisualDistance{1.0 / lo, lo, false};
}

ConvergenceEstimate angle_between(const SpaceModel& space, const GeodesicRay& a,
                                  const GeodesicRay& b, std::span<const double> schedule,
                                  double tolerance) {
    if (schedule.size() < 2) {
        throw std::invalid_argument("angle estimate: schedule needs at least two scales");
    }
    const double split = separation_time(space, a, b);
    std::vector<double> values;
    values.reserve(schedule.size());
    for (double t : schedule) {
        if (!(t > 0.0)) {
            throw std::invalid_argument("angle estimate: scales must be positive");
        }
        if (t <= split) {
            values.push_back(0.0);
            continue;
        }
        // comparison angle at the point where the rays part, both sides t - split
        const double gap = distance(space, ray_eval(space, a, t), ray_eval(space, b, t));
        values.push_back(2.0 * std::asin(std::min(1.0, gap / (2.0 * (t - split)))));
    }
    return make_estimate({schedule.begin(), schedule.end()}, std::move(values), tolerance);
}

namespace {

ConvergenceEstimate chain_sum(const SpaceModel& space, const std::vector<GeodesicRay>& chain,
                              std::span<const double> schedule, double tolerance) {
    std::vector<double> totals(schedule.size(), 0.0);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        const auto step = angle_between(space, chain[i], chain[i + 1], schedule, tolerance);
        for (std::size_t j = 0; j < totals.size(); ++j) {
            totals[j] += step.values[j];
        }
    }
    return make_estimate({schedule.begin(), schedule.end()}, std::move(totals), tolerance);
}

ConvergenceEstimate infinite_estimate(std::span<const double> schedule) {
    std::vector<double> values(schedule.size(), inf);
    return make_estimate({schedule.begin(), schedule.end()}, std::move(values), 0.0);
}

std::vector<GeodesicRay> split_path(const ProductRay& from, const std::vector<double>& angles) {
    std::vector<GeodesicRay> chain;
    for (double phi : angles) {
        chain.push_back(GeodesicRay::product(*from.left, *from.right, std::cos(phi), std::sin(phi)));
    }
    return chain;
}

}  // namespace

ConvergenceEstimate tits_distance_chain(const SpaceModel& space, const GeodesicRay& a,
                                        const GeodesicRay& b, std::size_t chain_size,
                                        std::span<const double> schedule, double tolerance) {
    if (chain_size < 1) {
        throw std::invalid_argument("tits chain: chain size must be at least 1");
    }
    if (schedule.size() < 2) {
        throw std::invalid_argument("tits chain: schedule needs at least two scales");
    }
    if (same_ray(space, a, b)) {
        return make_estimate({schedule.begin(), schedule.end()},
                             std::vector<double>(schedule.size(), 0.0), tolerance);
    }
    if (space.is_euclidean()) {
        return angle_between(space, a, b, schedule, tolerance);
    }
    if (space.is_tree()) {
        const auto direct = angle_between(space, a, b, schedule, tolerance);
        if (direct.value >= pi - tolerance) {
            return infinite_estimate(schedule);
        }
        return direct;
    }
    if (space.is_seaweed()) {
        const auto& p = expect<SeaweedRay>(a, "seaweed");
        const auto& q = expect<SeaweedRay>(b, "seaweed");
        if (p.kind == SeaweedRay::Kind::spiral || q.kind == SeaweedRay::Kind::spiral) {
            // the spiral directions are isolated: every chain has a step at angle pi
            return infinite_estimate(schedule);
        }
        std::vector<GeodesicRay> chain;
        for (std::size_t i = 0; i <= chain_size; ++i) {
            const double s = static_cast<double>(i) / static_cast<double>(chain_size);
            chain.push_back(GeodesicRay::straight(p.theta + s * (q.theta - p.theta)));
        }
        return chain_sum(space, chain, schedule, tolerance);
    }

    // Products: move the speed split along a quarter circle; when only one
    // factor ray agrees the path passes through that factor's pure ray.
    const auto& p = expect<ProductRay>(a, "product");
    const auto& q = expect<ProductRay>(b, "product");
    const double phi_p = std::atan2(p.b, p.a);
    const double phi_q = std::atan2(q.b, q.a);
    const bool left_same = same_ray(space.left(), *p.left, *q.left);
    const bool right_same = same_ray(space.right(), *p.right, *q.right);
    auto lerp_angles = [](double from, double to, std::size_t steps) {
        std::vector<double> out;
        for (std::size_t i = 0; i <= steps; ++i) {
            out.push_back(from + (to - from) * static_cast<double>(i) / static_cast<double>(steps));
        }
        return out;
    };
    if (left_same && right_same) {
        return chain_sum(space, split_path(p, lerp_angles(phi_p, phi_q, chain_size)), schedule,
                         tolerance);
    }
    if (!left_same && !right_same) {
        throw UnsupportedError("tits chain: product rays differ in both factors");
    }
    const double pole = right_same ? pi / 2.0 : 0.0;
    const std::size_t first = std::max<std::size_t>(1, chain_size / 2);
    const std::size_t second = std::max<std::size_t>(1, chain_size - first);
    auto chain = split_path(p, lerp_angles(phi_p, pole, first));
    auto rest = split_path(q, lerp_angles(pole, phi_q, second));
    chain.insert(chain.end(), rest.begin() + 1, rest.end());
    return chain_sum(space, chain, schedule, tolerance);
}

double cone_metric(double s, double t, double boundary_angle) {
    if (!(s >= 0.0) || !(t >= 0.0)) {
        throw std::invalid_argument("cone metric: radii must be non-negative");
    }
    if (!(boundary_angle >= 0.0)) {
        throw std::invalid_argument("cone metric: angle must be non-negative");
    }
    if (boundary_angle >= pi) {
        return s + t;
    }
    return std::sqrt(std::max(0.0, s * s + t * t - 2.0 * s * t * std::cos(boundary_angle)));
}

double cone_metric(const ConePoint& a, const ConePoint& b, double boundary_angle) {
    return cone_metric(a.t, b.t, boundary_angle);
}

std::vector<double> doubling_schedule(double base, double horizon) {
    if (!(base > 0.0) || !(horizon >= base)) {
        throw std::invalid_argument("doubling schedule: need 0 < base <= horizon");
    }
    std::vector<double> out;
    for (double t = base; t <= horizon; t *= 2.0) {
        out.push_back(t);
    }
    return out;
}

FlatSectorResult flat_sector_check(const SpaceModel& space, const GeodesicRay& a,
                                   const GeodesicRay& b, std::span<const double> radii,
                                   double tolerance) {
    if (radii.empty()) {
        throw std::invalid_argument("flat sector: empty radius grid");
    }
    const double scale = *std::max_element(radii.begin(), radii.end());
    if (!(scale > 0.0)) {
        throw std::invalid_argument("flat sector: radii must be positive");
    }
    const auto schedule = doubling_schedule(1.0, default_horizon);
    const auto limit = angle_between(space, a, b, schedule);
    if (limit.status != ConvergenceEstimate::Status::converged || limit.value >= pi - default_tolerance) {
        throw PreconditionError("flat sector: the rays are not at a converged angle below pi");
    }
    const double small = 1e-6 * scale;
    const double at_base = comparison_angle(space, space.basepoint(), ray_eval(space, a, small),
                                            ray_eval(space, b, small));
    if (std::abs(at_base - limit.value) > default_tolerance) {
        throw PreconditionError("flat sector: the angle at the basepoint differs from the limit angle");
    }
    FlatSectorResult result;
    result.angle = limit.value;
    result.basepoint_angle = at_base;
    for (double s : radii) {
        for (double t : radii) {
            const double d = distance(space, ray_eval(space, a, s), ray_eval(space, b, t));
            result.max_deviation = std::max(result.max_deviation, std::abs(d - cone_metric(s, t, limit.value)));
        }
    }
    result.flat = result.max_deviation <= tolerance * std::max(1.0, scale);
    return result;
}

double distance_to_ray(const SpaceModel& space, const Point& x, const GeodesicRay& ray) {
    auto f = [&](double tau) { return distance(space, x, ray_eval(space, ray, tau)); };
    // d(x, ray(tau)) >= tau - d(x0, x), so the minimizer lies below 2 d(x0, x)
    double lo = 0.0;
    double hi = 2.0 * distance(space, space.basepoint(), x) + 1.0;
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double m1 = hi - golden * (hi - lo);
    double m2 = lo + golden * (hi - lo);
    double f1 = f(m1);
    double f2 = f(m2);
    for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++i) {
        if (f1 <= f2) {
            hi = m2;
            m2 = m1;
            f2 = f1;
            m1 = hi - golden * (hi - lo);
            f1 = f(m1);
        } else {
            lo = m1;
            m1 = m2;
            f1 = f2;
            m2 = lo + golden * (hi - lo);
            f2 = f(m2);
        }
    }
    return std::min({f1, f2, f(lo), f(hi), f(0.0)});
}

VisualBasisCheck visual_basis_check(const SpaceModel& space, const GeodesicRay& a,
                                    const GeodesicRay& b, double c, double radius, double eps) {
    if (!(eps > 0.0) || eps > c || !(radius > 0.0)) {
        throw std::invalid_argument("visual basis: need 0 < eps <= C and R > 0");
    }
    VisualBasisCheck check;
    const double dc = visual_distance(space, a, b, c).value;
    check.small_ball_applies = dc < eps / (c * radius);
    if (check.small_ball_applies) {
        check.small_ball_holds = distance_to_ray(space, ray_eval(space, a, radius), b) < eps;
    }
    check.basis_applies =
        distance_to_ray(space, ray_eval(space, a, 1.0 / eps + c / 2.0), b) < c / 2.0;
    if (check.basis_applies) {
        check.basis_holds = dc < eps;
    }
    return check;
}

}  // namespace cat0
