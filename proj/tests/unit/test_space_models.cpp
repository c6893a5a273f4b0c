#include <cmath>
#include <numbers>
#include <stdexcept>

#include <doctest.h>

#include "cat0/experiments/sampling.hpp"
#include "cat0/errors.hpp"
#include "cat0/oracle/polar_grid.hpp"
#include "cat0/space_models.hpp"
#include "oracles.hpp"

using namespace cat0;
using experiments::Sampler;
using std::numbers::pi;

namespace {

Point plane(double x, double y) { return Point(Eigen::Vector2d(x, y).eval()); }

Eigen::VectorXd coords(const Point& p) { return std::get<Eigen::VectorXd>(p.value); }

// a - b - c path with unit edges, rooted at a
SpaceModel path_tree() {
    return SpaceModel::tree(MetricTree::from_edges({"a", "b", "c"}, {{"a", "b", 1.0}, {"b", "c", 1.0}}, "a"));
}

TreePoint tree_point(const MetricTree& tree, EdgeWord word, double depth) {
    return oracles::walk(tree, word, depth);
}

}  // namespace

TEST_CASE("euclidean distance and geodesics") {
    const auto e2 = SpaceModel::euclidean(2);
    CHECK(distance(e2, plane(0, 0), plane(3, 4)) == 5.0);
    const auto mid = coords(geodesic_eval(e2, plane(0, 0), plane(2, 0), 1.0));
    CHECK(mid.isApprox(Eigen::Vector2d(1, 0)));
    CHECK(comparison_angle(e2, plane(0, 0), plane(1, 0), plane(0, 1)) == doctest::Approx(pi / 2));
    CHECK(comparison_angle(e2, plane(0, 0), plane(1, 0), plane(1, 1)) == doctest::Approx(pi / 4));
    CHECK_THROWS_AS(comparison_angle(e2, plane(0, 0), plane(0, 0), plane(1, 1)), PreconditionError);
}

TEST_CASE("retraction toward the basepoint") {
    const auto e2 = SpaceModel::euclidean(2);
    CHECK(coords(retraction_xi(e2, plane(4, 0), 1.0)).isApprox(Eigen::Vector2d(1, 0)));
    CHECK(coords(retraction_xi(e2, plane(4, 0), 7.0)).isApprox(Eigen::Vector2d(4, 0)));

    const auto t2 = SpaceModel::tree(MetricTree::regular(2));
    const EdgeWord word({0, 1, 0, 1, 1}, {0});
    const Point x(TreePoint{word.truncated(5), 1.0});
    const auto r = std::get<TreePoint>(retraction_xi(t2, x, 2.0).value);
    CHECK(tree_geometry::depth(t2.metric_tree(), r) == doctest::Approx(2.0));
    CHECK(EdgeWord::common_prefix(r.word, word) == 2);
}

TEST_CASE("path tree examples") {
    const auto t = path_tree();
    const auto& tree = t.metric_tree();
    const auto ray = tree.hair_rays().at(0);
    const Point a = t.basepoint();
    const Point c(tree_point(tree, ray, 2.0));
    CHECK(distance(t, a, c) == 2.0);
    const auto mid = std::get<TreePoint>(geodesic_eval(t, a, c, 1.0).value);
    CHECK(tree_geometry::depth(tree, mid) == 1.0);
    const Point b(mid);
    CHECK(comparison_angle(t, b, a, c) == doctest::Approx(pi));
}

TEST_CASE("seaweed examples") {
    const SeaweedPoint p{1.0, 0.0}, q{1.0, pi};
    CHECK(seaweed::distance(p, q) == doctest::Approx(pi).epsilon(1e-12));
    // tangent from r = 2 covers pi/3, so the point at distance sqrt 3 is the tangency point
    const auto m = seaweed::geodesic({2.0, 0.0}, {2.0, 10.0}, std::sqrt(3.0));
    CHECK(m.r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.theta == doctest::Approx(pi / 3).epsilon(1e-12));
    CHECK(seaweed::visibility_angle(1.0) == 0.0);
    CHECK(seaweed::tangent_length(2.0) == doctest::Approx(std::sqrt(3.0)));
    CHECK_THROWS_AS(seaweed::validate({0.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(seaweed::validate({2.0, NAN}), std::invalid_argument);

    // a chord when the gap is small
    const SeaweedPoint a{3.0, 0.0}, b{3.0, 0.5};
    CHECK(seaweed::distance(a, b) == doctest::Approx(2 * 3.0 * std::sin(0.25)).epsilon(1e-12));
    // sheets differ by a full turn
    const SeaweedPoint c{3.0, 2 * pi};
    const double around = 2 * seaweed::tangent_length(3.0) + 2 * pi - 2 * seaweed::visibility_angle(3.0);
    CHECK(seaweed::distance(a, c) == doctest::Approx(around).epsilon(1e-12));
}

TEST_CASE("invalid input") {
    const auto e2 = SpaceModel::euclidean(2);
    CHECK_THROWS_AS(validate_point(e2, Point(Eigen::VectorXd::Zero(3).eval())), std::invalid_argument);
    CHECK_THROWS_AS(SpaceModel::euclidean(0), std::invalid_argument);
    CHECK_THROWS_AS(MetricTree::from_edges({"a", "b", "c"},
                                           {{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "a", 1.0}}, "a"),
                    std::invalid_argument);
    CHECK_THROWS_AS(MetricTree::from_edges({"a", "b"}, {{"a", "b", -1.0}}, "a"), std::invalid_argument);
    const auto t2 = SpaceModel::tree(MetricTree::regular(2));
    CHECK_THROWS_AS(validate_point(t2, Point(TreePoint{EdgeWord({0, 7}, {}, 2), 0.5})), std::invalid_argument);
    CHECK_THROWS_AS(validate_point(t2, Point(TreePoint{EdgeWord({0}, {}, 1), 1.5})), std::invalid_argument);
}

TEST_CASE("zero offset moves to the tail vertex") {
    const auto t2 = SpaceModel::tree(MetricTree::regular(2));
    const Point p(TreePoint{EdgeWord({0, 1}, {}, 2), 0.0});
    const auto c = std::get<TreePoint>(canonical_point(t2, p).value);
    CHECK(c.word.size() == 1);
    CHECK(c.offset == 1.0);
    CHECK(same_point(t2, p, Point(c)));
}

TEST_CASE("tree distance agrees with Dijkstra on the unfolded tree") {
    Sampler rng(101);
    for (int trial = 0; trial < 40; ++trial) {
        const auto space = SpaceModel::tree(experiments::random_tree(rng, 24));
        const auto& tree = space.metric_tree();
        const oracles::ExplicitTree unfolded(tree, 30);
        for (int k = 0; k < 10; ++k) {
            const auto p = std::get<TreePoint>(experiments::random_point(space, rng).value);
            const auto q = std::get<TreePoint>(experiments::random_point(space, rng).value);
            if (p.word.size() > 30 || q.word.size() > 30) {
                continue;
            }
            CHECK(distance(space, Point(p), Point(q)) == doctest::Approx(unfolded.distance(p, q)).epsilon(1e-12));
        }
    }
    const auto regular = SpaceModel::tree(MetricTree::regular(3, 0.7));
    const oracles::ExplicitTree unfolded(regular.metric_tree(), 7);
    for (int k = 0; k < 200; ++k) {
        std::vector<EdgeId> a, b;
        for (std::size_t i = 0; i < 1 + rng.index(7); ++i) a.push_back(rng.index(3));
        for (std::size_t i = 0; i < 1 + rng.index(7); ++i) b.push_back(rng.index(3));
        const TreePoint p{EdgeWord(a, {}, a.size()), rng.uniform(0.01, 0.7)};
        const TreePoint q{EdgeWord(b, {}, b.size()), rng.uniform(0.01, 0.7)};
        CHECK(distance(regular, Point(p), Point(q)) == doctest::Approx(unfolded.distance(p, q)).epsilon(1e-12));
    }
}

TEST_CASE("tree depth lookup agrees with a direct walk") {
    const auto tree = MetricTree::from_edges({"a", "b", "c", "d"},
                                             {{"a", "b", 0.5}, {"b", "c", 2.0}, {"b", "d", 1.25}}, "a", 0.75);
    for (const auto& ray : tree.hair_rays()) {
        for (double depth : {0.25, 0.5, 1.0, 2.5, 3.0, 7.1}) {
            const auto expected = oracles::walk(tree, ray, depth);
            const auto got = tree_geometry::at_depth(tree, ray, depth);
            CHECK(got.word.size() == expected.word.size());
            CHECK(got.offset == doctest::Approx(expected.offset).epsilon(1e-12));
        }
    }
}

TEST_CASE("seaweed distance agrees with the polar grid on a few pairs") {
    Sampler rng(5);
    for (int k = 0; k < 4; ++k) {
        const SeaweedPoint p{rng.uniform(1.0, 8.0), rng.uniform(-3.0, 3.0)};
        const SeaweedPoint q{rng.uniform(1.0, 8.0), rng.uniform(-3.0, 3.0)};
        const double grid = oracle::seaweed_grid_distance(p.r, p.theta, q.r, q.theta, {0.02, 0.02, 4, 0.1});
        CHECK(seaweed::distance(p, q) == doctest::Approx(grid).epsilon(0.01));
    }
}

TEST_CASE("metric and geodesic properties on every model") {
    Sampler rng(202);
    const std::vector<SpaceModel> models{
        SpaceModel::euclidean(2), SpaceModel::euclidean(3), SpaceModel::tree(MetricTree::regular(3)),
        SpaceModel::tree(experiments::random_tree(rng)), SpaceModel::seaweed(),
        SpaceModel::product(SpaceModel::tree(MetricTree::regular(2)), SpaceModel::euclidean(1))};
    for (const auto& space : models) {
        CAPTURE(space.name());
        for (int k = 0; k < 300; ++k) {
            const Point x = experiments::random_point(space, rng);
            const Point y = experiments::random_point(space, rng);
            const Point z = experiments::random_point(space, rng);
            const double dxy = distance(space, x, y);
            const double dyz = distance(space, y, z);
            const double dxz = distance(space, x, z);
            CHECK(distance(space, x, x) == 0.0);
            CHECK(dxy == doctest::Approx(distance(space, y, x)).epsilon(1e-12));
            CHECK(dxz <= dxy + dyz + 1e-9 * (1.0 + dxz));

            // unit speed: the geodesic point splits the distance
            const double t = rng.uniform(0.0, dxy);
            const Point g = geodesic_eval(space, x, y, t);
            CHECK(distance(space, x, g) == doctest::Approx(t).epsilon(1e-9).scale(1.0));
            CHECK(distance(space, g, y) == doctest::Approx(dxy - t).epsilon(1e-9).scale(1.0));

            // CAT(0): the distance from z to the midpoint is below the comparison median
            const Point m = geodesic_eval(space, x, y, dxy / 2);
            const double median2 = (2 * dxz * dxz + 2 * dyz * dyz - dxy * dxy) / 4;
            const double dzm = distance(space, z, m);
            CHECK(dzm * dzm <= median2 + 1e-7 * (1.0 + median2));

            // the retraction is 1-Lipschitz and lands at the requested radius
            const double r = rng.uniform(0.0, 6.0);
            const Point rx = retraction_xi(space, x, r);
            const Point ry = retraction_xi(space, y, r);
            CHECK(distance(space, rx, ry) <= dxy + 1e-9 * (1.0 + dxy));
            const double dx0 = distance(space, space.basepoint(), x);
            CHECK(distance(space, space.basepoint(), rx) == doctest::Approx(std::min(r, dx0)).epsilon(1e-9).scale(1.0));
        }
    }
}
