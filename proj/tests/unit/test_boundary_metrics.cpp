#include <cmath>
#include <limits>
#include <numbers>

#include <doctest.h>

#include "cat0/boundary_metrics.hpp"
#include "cat0/errors.hpp"
#include "cat0/experiments/sampling.hpp"
#include "oracles.hpp"

using namespace cat0;
using experiments::Sampler;
using std::numbers::pi;

namespace {

GeodesicRay planar(double angle) {
    return GeodesicRay::euclidean(Eigen::Vector2d(std::cos(angle), std::sin(angle)));
}

GeodesicRay word_ray(std::vector<EdgeId> head, std::vector<EdgeId> cycle) {
    return GeodesicRay::tree(EdgeWord(std::move(head), std::move(cycle)));
}

const std::vector<double> up_to_million{1, 10, 1e2, 1e3, 1e4, 1e5, 1e6};

}  // namespace

TEST_CASE("ray evaluation examples") {
    const auto e2 = SpaceModel::euclidean(2);
    const auto p = std::get<Eigen::VectorXd>(ray_eval(e2, planar(0), 3.0).value);
    CHECK(p.isApprox(Eigen::Vector2d(3, 0)));

    const auto t2 = SpaceModel::tree(MetricTree::regular(2));
    const auto q = std::get<TreePoint>(ray_eval(t2, word_ray({}, {0, 1}), 1.5).value);
    CHECK(q.word.size() == 2);
    CHECK(q.word[1] == 1);
    CHECK(q.offset == doctest::Approx(0.5));

    const auto sw = SpaceModel::seaweed();
    const auto s = std::get<SeaweedPoint>(ray_eval(sw, GeodesicRay::spiral(1), pi).value);
    CHECK(s.r == doctest::Approx(1.0));
    CHECK(s.theta == doctest::Approx(pi));
    CHECK_THROWS_AS(ray_eval(e2, planar(0), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(validate_ray(e2, GeodesicRay::euclidean(Eigen::Vector3d(1, 1, 0))), std::invalid_argument);
    CHECK_THROWS_AS(validate_ray(t2, word_ray({5}, {0})), std::invalid_argument);
}

TEST_CASE("rays have unit speed") {
    Sampler rng(3);
    const std::vector<SpaceModel> models{SpaceModel::euclidean(2), SpaceModel::tree(MetricTree::regular(3)),
                                         SpaceModel::tree(experiments::random_tree(rng)), SpaceModel::seaweed(),
                                         SpaceModel::product(SpaceModel::tree(MetricTree::regular(2)),
                                                             SpaceModel::euclidean(2))};
    for (const auto& space : models) {
        for (int k = 0; k < 50; ++k) {
            const auto ray = experiments::random_ray(space, rng, 0.3);
            const double s = rng.uniform(0, 30), t = rng.uniform(0, 30);
            CHECK(distance(space, ray_eval(space, ray, s), ray_eval(space, ray, t)) ==
                  doctest::Approx(std::abs(s - t)).epsilon(1e-9).scale(1.0));
            CHECK(same_point(space, ray_eval(space, ray, 0.0), space.basepoint()));
        }
    }
}

TEST_CASE("visual distance examples") {
    const auto e2 = SpaceModel::euclidean(2);
    for (double phi : {0.1, 1.0, pi / 2, 2.5, pi}) {
        CHECK(visual_distance(e2, planar(0), planar(phi), 1.0).value ==
              doctest::Approx(2 * std::sin(phi / 2)).epsilon(1e-9));
        CHECK(visual_distance(e2, planar(0), planar(phi), 2.0).value ==
              doctest::Approx(std::sin(phi / 2)).epsilon(1e-9));
    }
    const auto same = visual_distance(e2, planar(1), planar(1), 1.0);
    CHECK(same.value == 0.0);
    CHECK(same.beyond_horizon);

    const auto t3 = SpaceModel::tree(MetricTree::regular(3, 1.0));
    for (std::size_t prefix = 0; prefix < 5; ++prefix) {
        std::vector<EdgeId> head(prefix, 2);
        auto a = head, b = head;
        a.push_back(0);
        b.push_back(1);
        CHECK(visual_distance(t3, word_ray(a, {0}), word_ray(b, {1}), 1.0).value ==
              doctest::Approx(1.0 / (prefix + 0.5)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(visual_distance(e2, planar(0), planar(1), 0.0), std::invalid_argument);
}

TEST_CASE("visual distance agrees with a brute-force scan") {
    Sampler rng(44);
    const std::vector<SpaceModel> models{SpaceModel::seaweed(), SpaceModel::tree(experiments::random_tree(rng, 20)),
                                         SpaceModel::euclidean(3)};
    for (const auto& space : models) {
        for (int k = 0; k < 20; ++k) {
            const auto a = experiments::random_ray(space, rng);
            const auto b = experiments::random_ray(space, rng);
            const auto dc = visual_distance(space, a, b, 1.0, 200.0);
            const double scanned = oracles::scanned_visual_distance(space, a, b, 1.0, 1e-3, 200.0);
            if (scanned == 0.0) {
                CHECK(dc.value == 0.0);
                continue;
            }
            // the scan finds the sup up to one grid step
            CHECK(1.0 / dc.value >= 1.0 / scanned - 1e-9);
            CHECK(1.0 / dc.value <= 1.0 / scanned + 1e-3 + 1e-9);
        }
    }
}

TEST_CASE("visual distance is a metric") {
    Sampler rng(8);
    const std::vector<SpaceModel> models{SpaceModel::euclidean(2), SpaceModel::tree(experiments::random_tree(rng)),
                                         SpaceModel::seaweed(),
                                         SpaceModel::product(SpaceModel::tree(MetricTree::regular(3)),
                                                             SpaceModel::euclidean(1))};
    for (const auto& space : models) {
        for (int k = 0; k < 500; ++k) {
            const auto a = experiments::random_ray(space, rng);
            const auto b = experiments::random_ray(space, rng);
            const auto c = experiments::random_ray(space, rng);
            const double ab = visual_distance(space, a, b, 1.0).value;
            const double bc = visual_distance(space, b, c, 1.0).value;
            const double ac = visual_distance(space, a, c, 1.0).value;
            CHECK(ab == visual_distance(space, b, a, 1.0).value);
            CHECK(ac <= ab + bc + 1e-9);
            CHECK((ab == 0.0) == same_ray(space, a, b));
        }
    }
}

TEST_CASE("visual distance matches the angle in the plane") {
    Sampler rng(9);
    const auto e2 = SpaceModel::euclidean(2);
    for (int k = 0; k < 200; ++k) {
        const double x = rng.uniform(-pi, pi), y = rng.uniform(-pi, pi);
        const double c = rng.uniform(0.1, 10.0);
        double angle = std::abs(x - y);
        angle = std::min(angle, 2 * pi - angle);
        CHECK(visual_distance(e2, planar(x), planar(y), c).value ==
              doctest::Approx(2 * std::sin(angle / 2) / c).epsilon(1e-9));
    }
}

TEST_CASE("angle estimates") {
    const auto e2 = SpaceModel::euclidean(2);
    for (double phi : {0.3, 1.0, 3.0}) {
        const auto est = angle_between(e2, planar(0), planar(phi), up_to_million);
        for (double v : est.values) {
            CHECK(v == doctest::Approx(phi).epsilon(1e-12));
        }
        CHECK(est.status == ConvergenceEstimate::Status::converged);
    }

    const auto t3 = SpaceModel::tree(MetricTree::regular(3));
    const auto tree_est = angle_between(t3, word_ray({2, 2, 0}, {0}), word_ray({2, 2, 1}, {1}), up_to_million);
    CHECK(tree_est.value == pi);
    for (std::size_t i = 0; i < tree_est.scales.size(); ++i) {
        if (tree_est.scales[i] > 3.0) {
            CHECK(tree_est.values[i] == pi);
        }
    }

    const auto sw = SpaceModel::seaweed();
    const auto gap2 = angle_between(sw, GeodesicRay::straight(0), GeodesicRay::straight(2), up_to_million);
    CHECK(gap2.value == doctest::Approx(2.0).epsilon(1e-3));
    // the wrapped gap loses a constant against 2t, so the angle approaches pi like t^(-1/2)
    const auto gap4 = angle_between(sw, GeodesicRay::straight(0), GeodesicRay::straight(4), up_to_million);
    CHECK(pi - gap4.value < 2e-3);
    const std::vector<double> far{1e6, 1e7};
    CHECK(pi - angle_between(sw, GeodesicRay::straight(0), GeodesicRay::straight(4), far).value < 1e-3);
    CHECK_THROWS_AS(angle_between(e2, planar(0), planar(1), std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("angle estimates never decrease along a schedule") {
    Sampler rng(12);
    const auto schedule = doubling_schedule(1.0, 65536.0);
    const std::vector<SpaceModel> models{SpaceModel::seaweed(), SpaceModel::tree(experiments::random_tree(rng)),
                                         SpaceModel::product(SpaceModel::tree(MetricTree::regular(2)),
                                                             SpaceModel::euclidean(2))};
    for (const auto& space : models) {
        for (int k = 0; k < 40; ++k) {
            const auto est = angle_between(space, experiments::random_ray(space, rng),
                                           experiments::random_ray(space, rng), schedule);
            // compared through the chord ratio: asin amplifies round-off next to pi
            for (std::size_t i = 1; i < est.values.size(); ++i) {
                CHECK(std::sin(est.values[i] / 2) >= std::sin(est.values[i - 1] / 2) - 1e-12);
            }
        }
    }
}

TEST_CASE("Tits distance chains") {
    const auto e2 = SpaceModel::euclidean(2);
    const auto schedule = doubling_schedule(1.0, 1048576.0);
    CHECK(tits_distance_chain(e2, planar(0), planar(pi / 3), 4, schedule).value ==
          doctest::Approx(pi / 3).epsilon(1e-9));

    const auto sw = SpaceModel::seaweed();
    const auto long_schedule = doubling_schedule(1.0, 1073741824.0);
    CHECK(tits_distance_chain(sw, GeodesicRay::straight(0), GeodesicRay::straight(4), 8, long_schedule).value ==
          doctest::Approx(4.0).epsilon(1e-2 / 4));

    const auto t2 = SpaceModel::tree(MetricTree::regular(2));
    const auto tree_chain = tits_distance_chain(t2, word_ray({}, {0}), word_ray({}, {1}), 4, schedule);
    CHECK(std::isinf(tree_chain.value));
    CHECK(tree_chain.status == ConvergenceEstimate::Status::diverged);
    CHECK_THROWS_AS(tits_distance_chain(sw, GeodesicRay::straight(0), GeodesicRay::straight(1), 0, schedule),
                    std::invalid_argument);
}

TEST_CASE("cone metric") {
    CHECK(cone_metric(1, 1, pi / 2) == doctest::Approx(std::sqrt(2.0)));
    CHECK(cone_metric(2, 3, pi) == doctest::Approx(5.0));
    CHECK(cone_metric(2, 3, 7.0) == doctest::Approx(5.0));
    CHECK(cone_metric(0, 3, 1.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(cone_metric(-1, 1, 1.0), std::invalid_argument);

    // triangle inequality over points on a line of directions
    Sampler rng(6);
    for (int k = 0; k < 1000; ++k) {
        const double s = rng.uniform(0, 5), t = rng.uniform(0, 5), u = rng.uniform(0, 5);
        const double x = rng.uniform(-6, 6), y = rng.uniform(-6, 6), z = rng.uniform(-6, 6);
        const double ab = cone_metric(s, t, std::abs(x - y));
        const double bc = cone_metric(t, u, std::abs(y - z));
        const double ac = cone_metric(s, u, std::abs(x - z));
        CHECK(ac <= ab + bc + 1e-9);
        CHECK(ab == doctest::Approx(cone_metric(t, s, std::abs(y - x))));
    }
}

TEST_CASE("flat sectors") {
    const std::vector<double> radii{0.5, 1, 2, 5, 10};
    const auto e2 = SpaceModel::euclidean(2);
    const auto flat = flat_sector_check(e2, planar(0.2), planar(1.7), radii);
    CHECK(flat.flat);
    CHECK(flat.max_deviation < 1e-12);

    const auto product = SpaceModel::product(SpaceModel::tree(MetricTree::regular(2)), SpaceModel::euclidean(1));
    const auto left = word_ray({}, {0});
    const auto right = GeodesicRay::euclidean(Eigen::VectorXd::Ones(1));
    const auto strip = flat_sector_check(product, GeodesicRay::product(left, right, 0.8, 0.6),
                                         GeodesicRay::product(left, right, 0.6, 0.8), radii);
    CHECK(strip.flat);
    CHECK(strip.max_deviation <= 1e-9);
    CHECK(strip.angle == doctest::Approx(std::acos(0.96)).epsilon(1e-9));

    const auto t2 = SpaceModel::tree(MetricTree::regular(2));
    CHECK_THROWS_AS(flat_sector_check(t2, word_ray({}, {0}), word_ray({}, {1}), radii), PreconditionError);
}

TEST_CASE("visual basis inclusions on sampled witnesses") {
    Sampler rng(31);
    const std::vector<SpaceModel> models{SpaceModel::euclidean(2), SpaceModel::tree(experiments::random_tree(rng)),
                                         SpaceModel::seaweed()};
    for (const auto& space : models) {
        for (int k = 0; k < 100; ++k) {
            const auto a = experiments::random_ray(space, rng);
            const auto b = experiments::random_ray(space, rng);
            const double c = rng.uniform(0.5, 2.0);
            const auto check = visual_basis_check(space, a, b, c, rng.uniform(1.0, 20.0), rng.uniform(0.05, c));
            CHECK(check.small_ball_holds);
            CHECK(check.basis_holds);
        }
    }
}

TEST_CASE("convergence estimates") {
    const auto est = make_estimate({1, 2, 4}, {1.0, 1.5, 1.5000001}, 1e-6);
    CHECK(est.status == ConvergenceEstimate::Status::converged);
    CHECK(est.last_increment <= 1e-6);
    CHECK(make_estimate({1, 2}, {1.0, 2.0}, 1e-6).status == ConvergenceEstimate::Status::not_converged);
    CHECK(make_estimate({1, 2}, {1.0, std::numeric_limits<double>::infinity()}, 1e-6).status ==
          ConvergenceEstimate::Status::diverged);
    CHECK(to_string(ConvergenceEstimate::Status::not_converged) == "not_converged");
}
