#include "cat0/quasi_isometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "cat0/errors.hpp"
#include "cat0/rescaling.hpp"

namespace cat0 {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

GeodesicRay default_ray(const SpaceModel& space) {
    if (space.is_euclidean()) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(space.dimension());
        e[0] = 1.0;
        return GeodesicRay::euclidean(e);
    }
    if (space.is_tree()) {
        return GeodesicRay::tree(space.metric_tree().extension(EdgeWord()));
    }
    if (space.is_product()) {
        return GeodesicRay::product(default_ray(space.left()), default_ray(space.right()), 1.0, 0.0);
    }
    return GeodesicRay::straight(std::get<SeaweedPoint>(space.basepoint().value).theta);
}

// Largest |r h'(r)| on a log grid over [1, r_max], refined by golden section.
std::pair<double, double> sup_rh(const SpiralProfile& profile, double r_max) {
    const double top = std::log(std::min(r_max, 1e300));
    if (!(top >= 0.0)) {
        throw std::invalid_argument("spiral: r_max must be at least 1");
    }
    auto value = [&](double u) {
        const double r = std::exp(u);
        const double d = profile.dh(r);
        if (!std::isfinite(d)) {
            throw std::domain_error("spiral: derivative evaluation failed at r = " + std::to_string(r));
        }
        return std::abs(r * d);
    };
    const int n = 4000;
    int best = 0;
    double best_value = value(0.0);
    for (int i = 1; i <= n; ++i) {
        const double v = value(top * i / n);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    double lo = top * std::max(0, best - 1) / n;
    double hi = top * std::min(n, best + 1) / n;
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 100 && hi - lo > 1e-14; ++i) {
        const double m1 = hi - golden * (hi - lo);
        const double m2 = lo + golden * (hi - lo);
        if (value(m1) >= value(m2)) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    double arg = std::exp(top * best / n);
    const double mid = 0.5 * (lo + hi);
    if (value(mid) > best_value) {
        best_value = value(mid);
        arg = std::exp(mid);
    }
    return {best_value, arg};
}

Eigen::VectorXd polar(double r, double phi) {
    Eigen::VectorXd v(2);
    v << r * std::cos(phi), r * std::sin(phi);
    return v;
}

Eigen::VectorXd twist(const SpiralProfile& profile, const Eigen::VectorXd& v) {
    const double r = v.norm();
    if (r <= 1.0) {
        return v;
    }
    return polar(r, std::atan2(v[1], v[0]) + profile.h(r));
}

// Past the midpoint the trace never rises more than 1% above where it stood.
bool bounded_trace(const std::vector<double>& values) {
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    return *std::max_element(mid, values.end()) <= (1.0 + 1e-2) * *mid + 1e-9;
}

}  // namespace

QuasiIsometryMap identity_map(const SpaceModel& space) {
    return QuasiIsometryMap{space, space, [](const Point& x) { return x; }, 1.0, 0.0, "identity"};
}

QuasiIsometryCheck check_quasi_isometry(const QuasiIsometryMap& f, std::span<const Point> samples,
                                        double slack) {
    QuasiIsometryCheck check;
    std::vector<Point> images;
    images.reserve(samples.size());
    for (const auto& x : samples) {
        images.push_back(f(x));
    }
    check.worst_lower = -inf;
    check.worst_upper = -inf;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            const double d = distance(f.domain, samples[i], samples[j]);
            const double e = distance(f.codomain, images[i], images[j]);
            check.worst_lower = std::max(check.worst_lower, d / f.lambda - f.c - e);
            check.worst_upper = std::max(check.worst_upper, e - f.lambda * d - f.c);
            ++check.pairs;
        }
    }
    check.holds = check.worst_lower <= slack && check.worst_upper <= slack;
    return check;
}

SpiralProfile spiral_profile(const std::string& name) {
    if (name == "log") {
        return {name, [](double r) { return std::log(r); }, [](double r) { return 1.0 / r; }};
    }
    if (name == "loglog") {
        return {name, [](double r) { return std::log1p(std::log(r)); },
                [](double r) { return 1.0 / (r * (1.0 + std::log(r))); }};
    }
    if (name == "log_sin_loglog") {
        return {name,
                [](double r) {
                    const double l = std::log(r);
                    return l * std::sin(std::log1p(l));
                },
                [](double r) {
                    const double l = std::log(r);
                    const double ll = std::log1p(l);
                    return (std::sin(ll) + l * std::cos(ll) / (1.0 + l)) / r;
                }};
    }
    if (name == "loglog_sin_logloglog") {
        return {name,
                [](double r) {
                    const double ll = std::log1p(std::log(r));
                    return ll * std::sin(std::log1p(ll));
                },
                [](double r) {
                    const double l = std::log(r);
                    const double ll = std::log1p(l);
                    const double inner = std::sin(std::log1p(ll)) + ll * std::cos(std::log1p(ll)) / (1.0 + ll);
                    return inner / (r * (1.0 + l));
                }};
    }
    if (name == "zero") {
        return {name, [](double) { return 0.0; }, [](double) { return 0.0; }};
    }
    throw std::invalid_argument("spiral: unknown profile '" + name + "'");
}

SpiralProfile spiral_table(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2) {
        throw std::invalid_argument("spiral table: need at least two knots");
    }
    if (knots.front().first != 1.0 || knots.front().second != 0.0) {
        throw std::invalid_argument("spiral table: the first knot must be (1, 0)");
    }
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i].first > knots[i - 1].first) || !std::isfinite(knots[i].second)) {
            throw std::invalid_argument("spiral table: radii must increase and values be finite");
        }
    }
    auto segment = [knots](double r) {
        const auto it = std::upper_bound(knots.begin(), knots.end(), r,
                                         [](double x, const auto& k) { return x < k.first; });
        return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - knots.begin(), 1,
                                                                   static_cast<std::ptrdiff_t>(knots.size()) - 1));
    };
    auto h = [knots, segment](double r) {
        if (r >= knots.back().first) {
            return knots.back().second;
        }
        const std::size_t i = segment(r);
        const auto [r0, h0] = knots[i - 1];
        const auto [r1, h1] = knots[i];
        return h0 + (h1 - h0) * (r - r0) / (r1 - r0);
    };
    auto dh = [knots, segment](double r) {
        if (r >= knots.back().first) {
            return 0.0;
        }
        const std::size_t i = segment(r);
        return (knots[i].second - knots[i - 1].second) / (knots[i].first - knots[i - 1].first);
    };
    return {"table", h, dh};
}

double spiral_lipschitz(double k) {
    return 0.5 * (k + std::sqrt(k * k + 4.0));
}

QuasiIsometryMap spiral_map(const SpiralProfile& profile, double r_max) {
    const double lambda = spiral_lipschitz(sup_rh(profile, r_max).first);
    const auto plane = SpaceModel::euclidean(2);
    return QuasiIsometryMap{plane, plane,
                            [profile](const Point& x) {
                                return Point(twist(profile, std::get<Eigen::VectorXd>(x.value)));
                            },
                            lambda, 0.0, "spiral:" + profile.name};
}

QuasiIsometryMap lift_to_seaweed(const SpiralProfile& profile, double r_max) {
    const double k = sup_rh(profile, r_max).first;
    if (!std::isfinite(k)) {
        throw std::invalid_argument("seaweed lift: r h'(r) is unbounded, not a quasi-isometry");
    }
    const auto cover = SpaceModel::seaweed();
    return QuasiIsometryMap{cover, cover,
                            [profile](const Point& x) {
                                const auto& p = std::get<SeaweedPoint>(x.value);
                                return Point(SeaweedPoint{p.r, p.theta + profile.h(p.r)});
                            },
                            spiral_lipschitz(k), 0.0, "lift:" + profile.name};
}

QuasiIsometryMap tree_relabeling(const SpaceModel& space, std::vector<EdgeId> permutation) {
    if (!space.is_tree()) {
        throw std::invalid_argument("relabeling: not a tree model");
    }
    const auto& tree = space.metric_tree();
    if (permutation.size() != tree.edge_count()) {
        throw std::invalid_argument("relabeling: permutation size differs from the edge count");
    }
    std::vector<bool> hit(permutation.size(), false);
    for (EdgeId e = 0; e < permutation.size(); ++e) {
        const EdgeId to = permutation[e];
        if (to >= permutation.size() || hit[to]) {
            throw std::invalid_argument("relabeling: not a permutation");
        }
        hit[to] = true;
        const auto& a = tree.edge(e);
        const auto& b = tree.edge(to);
        if (a.tail != b.tail || a.head != b.head || a.length != b.length) {
            throw std::invalid_argument("relabeling: edge " + std::to_string(e) +
                                        " is not interchangeable with " + std::to_string(to));
        }
    }
    auto rename = [permutation](const std::vector<EdgeId>& letters) {
        std::vector<EdgeId> out;
        out.reserve(letters.size());
        for (EdgeId e : letters) {
            out.push_back(permutation[e]);
        }
        return out;
    };
    return QuasiIsometryMap{space, space,
                            [rename](const Point& x) {
                                const auto& p = std::get<TreePoint>(x.value);
                                EdgeWord w(rename(p.word.head()), rename(p.word.cycle()), p.word.size());
                                return Point(TreePoint{std::move(w), p.offset});
                            },
                            1.0, 0.0, "relabeling"};
}

GeodesicRay ray_through(const SpaceModel& space, const Point& y) {
    validate_point(space, y);
    if (distance(space, space.basepoint(), y) == 0.0) {
        throw std::invalid_argument("ray through: the point is the basepoint");
    }
    if (space.is_euclidean()) {
        const auto& base = std::get<Eigen::VectorXd>(space.basepoint().value);
        return GeodesicRay::euclidean(std::get<Eigen::VectorXd>(y.value) - base);
    }
    if (space.is_tree()) {
        return GeodesicRay::tree(space.metric_tree().extension(std::get<TreePoint>(y.value).word));
    }
    if (space.is_product()) {
        const auto& p = std::get<ProductPoint>(y.value);
        const auto& base = std::get<ProductPoint>(space.basepoint().value);
        const double dl = distance(space.left(), *base.left, *p.left);
        const double dr = distance(space.right(), *base.right, *p.right);
        return GeodesicRay::product(dl > 0.0 ? ray_through(space.left(), *p.left) : default_ray(space.left()),
                                    dr > 0.0 ? ray_through(space.right(), *p.right) : default_ray(space.right()),
                                    dl, dr);
    }
    const auto& base = std::get<SeaweedPoint>(space.basepoint().value);
    const auto& p = std::get<SeaweedPoint>(y.value);
    const double psi0 = seaweed::visibility_angle(base.r);
    const double psi = seaweed::visibility_angle(p.r);
    const double gap = p.theta - base.theta;
    const double sigma = gap >= 0.0 ? 1.0 : -1.0;
    if (std::abs(gap) <= psi0 + psi) {
        const double edge = pi / 2.0 + psi0;
        const double phi = std::atan2(p.r * std::sin(gap), p.r * std::cos(gap) - base.r);
        return GeodesicRay::straight(base.theta + std::clamp(phi, -edge, edge));
    }
    if (p.r <= 1.0) {
        // the geodesic arrives along the unit circle and keeps wrapping
        return GeodesicRay::spiral(static_cast<int>(sigma));
    }
    return GeodesicRay::straight(p.theta - sigma * psi + sigma * pi / 2.0);
}

std::string component_label(const SpaceModel& space, const GeodesicRay& ray) {
    if (space.is_euclidean()) {
        return "sphere";
    }
    if (space.is_tree()) {
        return "ends";
    }
    if (space.is_product()) {
        return "join";
    }
    const auto& s = std::get<SeaweedRay>(ray.value);
    if (s.kind == SeaweedRay::Kind::straight) {
        return "line";
    }
    return s.sign > 0 ? "+inf" : "-inf";
}

double descriptor_gap(const SpaceModel& space, const GeodesicRay& a, const GeodesicRay& b) {
    if (same_ray(space, a, b)) {
        return 0.0;
    }
    if (space.is_euclidean()) {
        const double dot = std::get<EuclideanRay>(a.value).direction.dot(std::get<EuclideanRay>(b.value).direction);
        return std::acos(std::clamp(dot, -1.0, 1.0));
    }
    if (space.is_tree()) {
        return inf;
    }
    if (space.is_product()) {
        const auto& p = std::get<ProductRay>(a.value);
        const auto& q = std::get<ProductRay>(b.value);
        double gap = std::abs(std::atan2(p.b, p.a) - std::atan2(q.b, q.a));
        if (p.a > 0.0 && q.a > 0.0) {
            gap = std::max(gap, descriptor_gap(space.left(), *p.left, *q.left));
        }
        if (p.b > 0.0 && q.b > 0.0) {
            gap = std::max(gap, descriptor_gap(space.right(), *p.right, *q.right));
        }
        return gap;
    }
    const auto& p = std::get<SeaweedRay>(a.value);
    const auto& q = std::get<SeaweedRay>(b.value);
    if (p.kind == SeaweedRay::Kind::straight && q.kind == SeaweedRay::Kind::straight) {
        return std::abs(p.theta - q.theta);
    }
    return inf;
}

GeodesicRay pushforward_at_scale(const QuasiIsometryMap& f, const GeodesicRay& ray, double s) {
    if (!(s > 0.0)) {
        throw std::invalid_argument("pushforward: scale must be positive");
    }
    const Point start = f(f.domain.basepoint());
    const Point end = f(ray_eval(f.domain, ray, s));
    validate_point(f.codomain, start);
    validate_point(f.codomain, end);
    if (f.codomain.is_euclidean()) {
        const auto& a = std::get<Eigen::VectorXd>(start.value);
        const auto& b = std::get<Eigen::VectorXd>(end.value);
        if ((b - a).norm() == 0.0) {
            throw std::domain_error("pushforward: degenerate chord");
        }
        return GeodesicRay::euclidean(b - a);
    }
    return ray_through(f.codomain, end);
}

double relations_gap(const QuasiIsometryMap& f, const GeodesicRay& ray, double s, double s_lower) {
    const Point image = f(ray_eval(f.domain, ray, s));
    const GeodesicRay pushed = pushforward_at_scale(f, ray, s);
    const Point retracted = theta_map(f.codomain, s, s_lower, image);
    const double radius = distance(f.codomain, f.codomain.basepoint(), retracted);
    return distance(f.codomain, retracted, ray_eval(f.codomain, pushed, radius)) / s_lower;
}

SweepResult limit_set_sweep(const QuasiIsometryMap& f, const GeodesicRay& ray,
                            std::span<const double> scales, double resolution) {
    if (scales.empty()) {
        throw std::invalid_argument("sweep: empty scale grid");
    }
    if (!(resolution > 0.0)) {
        throw std::invalid_argument("sweep: resolution must be positive");
    }
    for (std::size_t i = 1; i < scales.size(); ++i) {
        if (!(scales[i] > scales[i - 1])) {
            throw std::invalid_argument("sweep: scale grid must increase");
        }
    }
    SweepResult out;
    out.scales.assign(scales.begin(), scales.end());
    for (double s : scales) {
        out.rays.push_back(pushforward_at_scale(f, ray, s));
        const auto& latest = out.rays.back();
        const bool known = std::any_of(out.closure.begin(), out.closure.end(), [&](const GeodesicRay& r) {
            return descriptor_gap(f.codomain, r, latest) <= resolution;
        });
        if (!known) {
            out.closure.push_back(latest);
        }
    }
    const std::size_t tail = std::max<std::size_t>(1, out.rays.size() / 4);
    out.stabilized = true;
    for (std::size_t i = out.rays.size() - tail; i < out.rays.size(); ++i) {
        out.stabilized = out.stabilized &&
                         descriptor_gap(f.codomain, out.rays[i], out.rays.back()) <= resolution;
    }
    return out;
}

double circle_cover_radius(std::vector<double> angles) {
    if (angles.empty()) {
        return pi;
    }
    for (double& a : angles) {
        a = std::fmod(a, 2.0 * pi);
        if (a < 0.0) {
            a += 2.0 * pi;
        }
    }
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + 2.0 * pi - angles.back();
    for (std::size_t i = 1; i < angles.size(); ++i) {
        gap = std::max(gap, angles[i] - angles[i - 1]);
    }
    return gap / 2.0;
}

double spiral_distortion(const SpiralProfile& profile, double s, std::size_t pairs, std::uint64_t seed) {
    if (!(s > 0.0)) {
        throw std::invalid_argument("distortion: scale must be positive");
    }
    auto excess = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return std::abs((twist(profile, x) - twist(profile, y)).norm() - (x - y).norm()) / s;
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        const auto x = polar(s * unit(rng), 2.0 * pi * unit(rng));
        const auto y = polar(s * unit(rng), 2.0 * pi * unit(rng));
        worst = std::max(worst, excess(x, y));
    }
    // one point on the boundary circle, the other inward at a range of angles
    for (int i = 1; i <= 40; ++i) {
        const double ratio = i / 40.0;
        for (int j = 0; j < 64; ++j) {
            worst = std::max(worst, excess(polar(s, 0.0), polar(ratio * s, 2.0 * pi * j / 64.0)));
        }
    }
    return worst;
}

SpiralAnalysis spiral_analysis(const SpiralProfile& profile, double r_max,
                               std::span<const double> scales, std::size_t pairs, std::uint64_t seed) {
    SpiralAnalysis out;
    const auto [sup, arg] = sup_rh(profile, r_max);
    out.sup_rh = sup;
    out.argmax = arg;
    for (double s : scales) {
        out.distortion.emplace_back(s, spiral_distortion(profile, s, pairs, seed));
    }
    return out;
}

double hausdorff_distance(const SpaceModel& space, std::span<const Point> a, std::span<const Point> b) {
    if (a.empty() || b.empty()) {
        throw std::invalid_argument("hausdorff: empty sample set");
    }
    auto directed = [&](std::span<const Point> from, std::span<const Point> to) {
        double sup = 0.0;
        for (const auto& p : from) {
            double best = inf;
            for (const auto& q : to) {
                best = std::min(best, distance(space, p, q));
            }
            sup = std::max(sup, best);
        }
        return sup;
    };
    return std::max(directed(a, b), directed(b, a));
}

std::string to_string(MorseProbeResult::Verdict verdict) {
    switch (verdict) {
        case MorseProbeResult::Verdict::bounded:
            return "bounded";
        case MorseProbeResult::Verdict::growing:
            return "growing";
        case MorseProbeResult::Verdict::inconclusive:
            return "inconclusive";
    }
    return "unknown";
}

std::span<const double> default_morse_epsilons() {
    static constexpr std::array<double, 3> eps{0.1, 0.2, 0.4};
    return eps;
}

namespace {

struct Detour {
    Point start;
    Point corner;
    Point end;
    double first = 0.0;
    double second = 0.0;

    double length() const { return first + second; }
};

Point detour_eval(const SpaceModel& space, const Detour& d, double u) {
    if (u <= d.first) {
        return geodesic_eval(space, d.start, d.corner, std::clamp(u, 0.0, d.first));
    }
    return geodesic_eval(space, d.corner, d.end, std::min(u - d.first, d.second));
}

std::vector<double> detour_samples(const Detour& d) {
    std::vector<double> u;
    const int uniform = 40;
    for (int i = 0; i <= uniform; ++i) {
        u.push_back(d.length() * i / uniform);
    }
    for (double off = 1.0 / 16.0; off < d.length(); off *= 2.0) {
        if (off < d.first) {
            u.push_back(d.first - off);
        }
        if (off < d.second) {
            u.push_back(d.first + off);
        }
    }
    u.push_back(d.first);
    std::sort(u.begin(), u.end());
    return u;
}

bool is_quasi_geodesic(const SpaceModel& space, const Detour& d, double l, double c) {
    const auto u = detour_samples(d);
    std::vector<Point> pts;
    pts.reserve(u.size());
    for (double x : u) {
        pts.push_back(detour_eval(space, d, x));
    }
    for (std::size_t i = 0; i < u.size(); ++i) {
        for (std::size_t j = i + 1; j < u.size(); ++j) {
            const double gap = u[j] - u[i];
            const double dist = distance(space, pts[i], pts[j]);
            if (dist < gap / l - c - 1e-12 || dist > l * gap + c + 1e-12) {
                return false;
            }
        }
    }
    return true;
}

// Point at distance delta from ray(tau), off to one side of the ray.
struct Displacer {
    const SpaceModel& space;
    const GeodesicRay& ray;
    double tau;
    // tree data: vertex depth and side word
    EdgeWord side;
    double vertex_depth = 0.0;

    Displacer(const SpaceModel& space_, const GeodesicRay& ray_, double size)
        : space(space_), ray(ray_), tau(size / 2.0) {
        if (space.is_tree()) {
            const auto& tree = space.metric_tree();
            const auto& word = std::get<TreeRay>(ray.value).word;
            // nearest vertex to the midpoint with a child off the ray
            double best = inf;
            const std::size_t reach = tree.edges_to_reach(word, size);
            for (std::size_t k = 0; k < reach; ++k) {
                const double depth = tree.prefix_depth(word, k);
                if (std::abs(depth - tau) >= best) {
                    continue;
                }
                const std::size_t type = k == 0 ? tree.root_type() : tree.edge(word[k - 1]).head;
                for (EdgeId e : tree.children(type)) {
                    if (e != word[k]) {
                        std::vector<EdgeId> letters;
                        letters.reserve(k + 1);
                        for (std::size_t i = 0; i < k; ++i) {
                            letters.push_back(word[i]);
                        }
                        letters.push_back(e);
                        side = tree.extension(EdgeWord(letters, {}, letters.size()));
                        vertex_depth = depth;
                        best = std::abs(depth - tau);
                        break;
                    }
                }
            }
            if (!std::isfinite(best)) {
                throw UnsupportedError("morse probe: no side branch along the ray");
            }
        } else if (space.is_euclidean()) {
            if (space.dimension() < 2) {
                throw UnsupportedError("morse probe: a line has no room for a detour");
            }
        } else if (space.is_product()) {
            throw UnsupportedError("morse probe: detours are not constructed in products");
        }
    }

    Point operator()(double delta) const {
        if (space.is_tree()) {
            return Point(tree_geometry::at_depth(space.metric_tree(), side, vertex_depth + delta));
        }
        if (space.is_euclidean()) {
            const auto& dir = std::get<EuclideanRay>(ray.value).direction;
            Eigen::VectorXd normal = Eigen::VectorXd::Zero(dir.size());
            normal[0] = -dir[1];
            normal[1] = dir[0];
            return Point(Eigen::VectorXd(tau * dir + delta * normal));
        }
        // seaweed: planar normal pointing away from the disk, in the frame of the midpoint
        const auto mid = std::get<SeaweedPoint>(ray_eval(space, ray, tau).value);
        const double h = 1e-6 * std::max(1.0, tau);
        const auto ahead = std::get<SeaweedPoint>(ray_eval(space, ray, tau + h).value);
        const auto behind = std::get<SeaweedPoint>(ray_eval(space, ray, std::max(0.0, tau - h)).value);
        auto planar = [&](const SeaweedPoint& p) {
            return Eigen::Vector2d(p.r * std::cos(p.theta - mid.theta), p.r * std::sin(p.theta - mid.theta));
        };
        Eigen::Vector2d tangent = planar(ahead) - planar(behind);
        tangent.normalize();
        Eigen::Vector2d normal(-tangent[1], tangent[0]);
        const Eigen::Vector2d at(mid.r, 0.0);
        if (normal.dot(at) < 0.0) {
            normal = -normal;
        }
        const Eigen::Vector2d x = at + delta * normal;
        return Point(SeaweedPoint{std::max(1.0, x.norm()), mid.theta + std::atan2(x[1], x[0])});
    }
};

}  // namespace

MorseProbeResult morse_probe(const SpaceModel& space, const GeodesicRay& ray, double l, double c,
                             std::span<const double> sizes, std::span<const double> epsilons) {
    if (!(l >= 1.0) || !(c >= 0.0)) {
        throw std::invalid_argument("morse probe: need L >= 1 and C >= 0");
    }
    if (sizes.size() < 3) {
        throw std::invalid_argument("morse probe: need at least three probe sizes");
    }
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        if (!(sizes[i] > sizes[i - 1])) {
            throw std::invalid_argument("morse probe: probe sizes must increase");
        }
    }
    if (epsilons.empty()) {
        throw std::invalid_argument("morse probe: no displacement ratios");
    }
    MorseProbeResult result;
    result.l = l;
    result.c = c;
    for (double size : sizes) {
        const Displacer push(space, ray, size);
        const Point start = ray_eval(space, ray, 0.0);
        const Point end = ray_eval(space, ray, size);
        auto detour = [&](double delta) {
            Detour d{start, push(delta), end, 0.0, 0.0};
            d.first = distance(space, d.start, d.corner);
            d.second = distance(space, d.corner, d.end);
            return d;
        };
        double worst = 0.0;
        for (double eps : epsilons) {
            double delta = eps * size;
            if (!is_quasi_geodesic(space, detour(delta), l, c)) {
                double lo = 0.0;
                double hi = delta;
                for (int i = 0; i < 25; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    (is_quasi_geodesic(space, detour(mid), l, c) ? lo : hi) = mid;
                }
                delta = lo;
            }
            const Detour d = detour(delta);
            double deviation = 0.0;
            for (double u : detour_samples(d)) {
                deviation = std::max(deviation, distance_to_ray(space, detour_eval(space, d, u), ray));
            }
            result.rows.push_back(MorseRow{size, eps, delta, deviation});
            worst = std::max(worst, deviation);
            ++result.probes;
        }
        result.deviation_by_size.push_back(worst);
        result.max_deviation = std::max(result.max_deviation, worst);
    }

    const auto& dev = result.deviation_by_size;
    bool increasing = true;
    for (std::size_t i = 1; i < dev.size(); ++i) {
        increasing = increasing && dev[i] > dev[i - 1];
    }
    const double ratio = sizes.back() / sizes.front();
    if (increasing && dev.front() > 0.0 && dev.back() / dev.front() >= 0.5 * ratio) {
        result.verdict = MorseProbeResult::Verdict::growing;
    } else if (bounded_trace(dev)) {
        result.verdict = MorseProbeResult::Verdict::bounded;
    }
    return result;
}

RoundtripResult roundtrip_check(const QuasiIsometryMap& f, const QuasiIsometryMap& g,
                                const GeodesicRay& ray, double s_f, double s_g,
                                std::span<const Point> samples) {
    for (const auto& y : samples) {
        if (distance(f.codomain, f(g(y)), y) > g.c + 1e-9) {
            throw PreconditionError("roundtrip: g is not a quasi-inverse of f on the samples");
        }
    }
    const GeodesicRay forward = pushforward_at_scale(f, ray, s_f);
    const GeodesicRay back = pushforward_at_scale(g, forward, s_g);
    RoundtripResult out;
    for (double t = 1.0; t <= 1048576.0; t *= 2.0) {
        out.gaps.push_back(distance(f.domain, ray_eval(f.domain, ray, t), ray_eval(f.domain, back, t)));
    }
    out.gap = *std::max_element(out.gaps.begin(), out.gaps.end());
    out.bounded = bounded_trace(out.gaps);
    return out;
}

CloseRaysInstance close_rays_instance(std::uint64_t seed, std::size_t samples) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CloseRaysInstance inst;
    inst.l = 1.0 + 2.0 * unit(rng);
    inst.c = 2.0 * unit(rng);
    inst.l_first = 1.0 + 2.0 * unit(rng);
    inst.c_first = 2.0 * unit(rng);
    const double offset = 3.0 * unit(rng);
    const double heading = 2.0 * pi * unit(rng);
    const double speed = 1.0 / inst.l + (inst.l - 1.0 / inst.l) * unit(rng);
    const double speed_first = 1.0 / inst.l_first + (inst.l_first - 1.0 / inst.l_first) * unit(rng);
    const double freq = 0.2 + 2.0 * unit(rng);
    const double freq_first = 0.2 + 2.0 * unit(rng);
    const double phase = 2.0 * pi * unit(rng);

    const Eigen::Vector2d along(std::cos(heading), std::sin(heading));
    const Eigen::Vector2d across(-along[1], along[0]);
    // linear motion plus a wobble of size at most C/2 keeps each ray (L, C)
    auto second = [&](double t) {
        const Eigen::Vector2d wobble = 0.5 * inst.c * Eigen::Vector2d(std::cos(freq * t), std::sin(freq * t));
        return Eigen::Vector2d(speed * t * along + wobble);
    };
    auto first = [&](double t) {
        const Eigen::Vector2d wobble = 0.5 * inst.c_first * Eigen::Vector2d(std::cos(freq_first * t + phase),
                                                                             std::sin(freq_first * t + phase));
        return Eigen::Vector2d(speed_first * t * along + offset * across + wobble);
    };
    auto verify = [&](auto&& ray, double l, double c, double top) {
        const std::size_t n = 200;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = i + 1; j <= n; ++j) {
                const double s = top * i / n;
                const double t = top * j / n;
                const double d = (ray(s) - ray(t)).norm();
                if (d < (t - s) / l - c - 1e-9 || d > l * (t - s) + c + 1e-9) {
                    return false;
                }
            }
        }
        return true;
    };

    // windows with matching extent along the common heading
    const double top_first = 100.0;
    const double top_second = speed_first * top_first / speed;
    inst.quasi_geodesics_verified = verify(first, inst.l_first, inst.c_first, top_first) &&
                                    verify(second, inst.l, inst.c, top_second);
    const SpaceModel plane = SpaceModel::euclidean(2);
    for (std::size_t i = 0; i <= samples; ++i) {
        inst.first.emplace_back(Eigen::VectorXd(first(top_first * i / samples)));
        inst.second.emplace_back(Eigen::VectorXd(second(top_second * i / samples)));
    }
    double directed = 0.0;
    for (const auto& p : inst.first) {
        double best = inf;
        for (const auto& q : inst.second) {
            best = std::min(best, distance(plane, p, q));
        }
        directed = std::max(directed, best);
    }
    inst.m = directed;
    inst.measured = hausdorff_distance(plane, inst.first, inst.second);
    inst.bound = inst.l * inst.l * (2.0 * inst.m + inst.l_first + inst.c_first + inst.c) + inst.c + inst.m;
    return inst;
}

}  // namespace cat0
