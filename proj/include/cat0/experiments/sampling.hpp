#ifndef CAT0_EXPERIMENTS_SAMPLING_HPP
#define CAT0_EXPERIMENTS_SAMPLING_HPP

#include <cstdint>
#include <random>

#include "cat0/boundary_metrics.hpp"
#include "cat0/space_models.hpp"

namespace cat0::experiments {

/// Seeded source of every random choice made by a scenario.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi);
    std::size_t index(std::size_t n);  // uniform in [0, n)
    bool chance(double p);
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Random finite tree on 2..max_vertices vertices, edge lengths in [0.5, 2],
/// rooted at "v0".
MetricTree random_tree(Sampler& rng, std::size_t max_vertices = 64);

/// Tree rays: a random leaf branch for finite descriptions, a random
/// eventually periodic word otherwise. Seaweed rays are Spiral with
/// probability spiral_weight, else Straight with theta in [-6, 6].
GeodesicRay random_ray(const SpaceModel& space, Sampler& rng, double spiral_weight = 0.1);

Point random_point(const SpaceModel& space, Sampler& rng);

/// Limit angle between two rays computed from their descriptors alone.
double descriptor_angle(const SpaceModel& space, const GeodesicRay& a, const GeodesicRay& b);

}  // namespace cat0::experiments

#endif
