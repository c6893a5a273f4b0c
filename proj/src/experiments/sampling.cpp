#include "cat0/experiments/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace cat0::experiments {

double Sampler::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

std::size_t Sampler::index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

bool Sampler::chance(double p) {
    return uniform(0.0, 1.0) < p;
}

MetricTree random_tree(Sampler& rng, std::size_t max_vertices) {
    const std::size_t n = 2 + rng.index(std::max<std::size_t>(max_vertices, 2) - 1);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back("v" + std::to_string(i));
    }
    std::vector<TreeEdgeSpec> edges;
    for (std::size_t i = 1; i < n; ++i) {
        edges.push_back(TreeEdgeSpec{names[rng.index(i)], names[i], rng.uniform(0.5, 2.0)});
    }
    return MetricTree::from_edges(names, edges, names[0]);
}

GeodesicRay random_ray(const SpaceModel& space, Sampler& rng, double spiral_weight) {
    if (space.is_euclidean()) {
        Eigen::VectorXd v(space.dimension());
        do {
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                v[i] = rng.uniform(-1.0, 1.0);
            }
        } while (v.norm() < 1e-3 || v.norm() > 1.0);
        return GeodesicRay::euclidean(v);
    }
    if (space.is_tree()) {
        const auto& tree = space.metric_tree();
        if (!tree.hair_edges().empty()) {
            const auto rays = tree.hair_rays();
            return GeodesicRay::tree(rays[rng.index(rays.size())]);
        }
        // a single vertex type: every letter sequence is a path
        std::vector<EdgeId> head(rng.index(5));
        std::vector<EdgeId> cycle(1 + rng.index(3));
        for (auto& e : head) {
            e = rng.index(tree.edge_count());
        }
        for (auto& e : cycle) {
            e = rng.index(tree.edge_count());
        }
        return GeodesicRay::tree(EdgeWord(std::move(head), std::move(cycle)));
    }
    if (space.is_product()) {
        const double phi = rng.uniform(0.0, std::numbers::pi / 2.0);
        auto left = random_ray(space.left(), rng, spiral_weight);
        auto right = random_ray(space.right(), rng, spiral_weight);
        return GeodesicRay::product(std::move(left), std::move(right), std::cos(phi), std::sin(phi));
    }
    if (rng.chance(spiral_weight)) {
        return GeodesicRay::spiral(rng.chance(0.5) ? 1 : -1);
    }
    return GeodesicRay::straight(rng.uniform(-6.0, 6.0));
}

Point random_point(const SpaceModel& space, Sampler& rng) {
    if (space.is_euclidean()) {
        Eigen::VectorXd v(space.dimension());
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v[i] = rng.uniform(-10.0, 10.0);
        }
        return Point(v);
    }
    if (space.is_tree()) {
        const auto ray = random_ray(space, rng);
        return ray_eval(space, ray, rng.uniform(0.0, 10.0));
    }
    if (space.is_product()) {
        auto left = random_point(space.left(), rng);
        auto right = random_point(space.right(), rng);
        return make_product_point(std::move(left), std::move(right));
    }
    const double r = rng.uniform(1.0, 20.0);
    return Point(SeaweedPoint{r, rng.uniform(-10.0, 10.0)});
}

double descriptor_angle(const SpaceModel& space, const GeodesicRay& a, const GeodesicRay& b) {
    constexpr double pi = std::numbers::pi;
    if (same_ray(space, a, b)) {
        return 0.0;
    }
    if (space.is_euclidean()) {
        const double dot = std::get<EuclideanRay>(a.value).direction.dot(std::get<EuclideanRay>(b.value).direction);
        return std::acos(std::clamp(dot, -1.0, 1.0));
    }
    if (space.is_tree()) {
        return pi;
    }
    if (space.is_product()) {
        // the boundary of a product is the spherical join of the factors
        const auto& p = std::get<ProductRay>(a.value);
        const auto& q = std::get<ProductRay>(b.value);
        const double cl = std::cos(descriptor_angle(space.left(), *p.left, *q.left));
        const double cr = std::cos(descriptor_angle(space.right(), *p.right, *q.right));
        return std::acos(std::clamp(p.a * q.a * cl + p.b * q.b * cr, -1.0, 1.0));
    }
    const auto& p = std::get<SeaweedRay>(a.value);
    const auto& q = std::get<SeaweedRay>(b.value);
    if (p.kind == SeaweedRay::Kind::straight && q.kind == SeaweedRay::Kind::straight) {
        return std::min(pi, std::abs(p.theta - q.theta));
    }
    return pi;
}

}  // namespace cat0::experiments
