#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <doctest.h>

#include "cat0/experiments/sampling.hpp"
#include "cat0/experiments/scenario.hpp"
#include "cat0/serialization.hpp"

using namespace cat0;
using namespace cat0::experiments;

namespace {

json small_audit() {
    auto j = template_scenario("metric-audit");
    j["params"]["triples"] = 20;
    return j;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("catalog covers every criterion") {
    std::set<int> criteria;
    std::set<std::string> names;
    for (const auto& entry : catalog()) {
        criteria.insert(entry.criterion);
        names.insert(entry.name);
        const auto scenario = parse_scenario(template_scenario(entry.name));
        CHECK(scenario.operation == entry.name);
        CHECK_FALSE(entry.description.empty());
    }
    for (int c = 1; c <= 13; ++c) {
        CHECK(criteria.count(c) == 1);
    }
    CHECK(names.size() == catalog().size());
    CHECK_THROWS_AS(template_scenario("no-such-template"), InvalidScenario);
}

TEST_CASE("shipped scenario files parse") {
    for (const auto& file : std::filesystem::directory_iterator("scenarios")) {
        CAPTURE(file.path().string());
        CHECK_NOTHROW(load_scenario(file.path()));
    }
}

TEST_CASE("malformed scenarios are rejected") {
    auto bad = small_audit();
    bad["schema"] = "cat0.scenario/9";
    CHECK_THROWS_AS(parse_scenario(bad), InvalidScenario);

    bad = small_audit();
    bad["extra"] = 1;
    CHECK_THROWS_AS(parse_scenario(bad), InvalidScenario);

    bad = small_audit();
    bad["params"]["triples_typo"] = 5;
    CHECK_THROWS_AS(parse_scenario(bad), InvalidScenario);

    bad = small_audit();
    bad["params"]["triples"] = "many";
    CHECK_THROWS_AS(parse_scenario(bad), InvalidScenario);

    bad = small_audit();
    bad["seed"] = -3;
    CHECK_THROWS_AS(parse_scenario(bad), InvalidScenario);

    bad = template_scenario("angle-between");
    bad["space"] = {{"kind", "hyperbolic"}};
    CHECK_THROWS_AS(run_scenario(parse_scenario(bad)), InvalidScenario);

    bad = template_scenario("angle-between");
    bad["rays"] = {{{"straight", 0.0}}, {{"spiral", "sideways"}}};
    CHECK_THROWS_AS(run_scenario(parse_scenario(bad)), InvalidScenario);

    CHECK_THROWS_AS(parse_scenario(json::array()), InvalidScenario);
    CHECK_THROWS_AS(load_scenario("tests/data/no-such-file.json"), InvalidScenario);
}

TEST_CASE("tolerance from the environment") {
    ::unsetenv("CAT0_TOLERANCE");
    CHECK(environment_tolerance() == default_tolerance);
    ::setenv("CAT0_TOLERANCE", "1e-3", 1);
    CHECK(environment_tolerance() == 1e-3);
    CHECK(parse_scenario(small_audit()).tolerance == 1e-3);
    auto explicit_tol = small_audit();
    explicit_tol["tolerance"] = 1e-5;
    CHECK(parse_scenario(explicit_tol).tolerance == 1e-5);
    ::setenv("CAT0_TOLERANCE", "abc", 1);
    CHECK_THROWS_AS(environment_tolerance(), InvalidScenario);
    ::unsetenv("CAT0_TOLERANCE");
}

TEST_CASE("descriptors survive a JSON round trip") {
    Sampler rng(21);
    const std::vector<SpaceModel> models{SpaceModel::euclidean(3), SpaceModel::tree(random_tree(rng)),
                                         SpaceModel::tree(MetricTree::regular(4, 0.5)), SpaceModel::seaweed({2.0, 0.5}),
                                         SpaceModel::product(SpaceModel::tree(MetricTree::regular(2)),
                                                             SpaceModel::euclidean(1))};
    for (const auto& space : models) {
        const auto copy = space_from_json(space_to_json(space));
        CHECK(space_to_json(copy) == space_to_json(space));
        for (int k = 0; k < 20; ++k) {
            const auto ray = random_ray(copy, rng);
            CHECK(same_ray(copy, ray_from_json(copy, ray_to_json(copy, ray)), ray));
            const auto p = random_point(copy, rng);
            CHECK(same_point(copy, point_from_json(copy, point_to_json(copy, p)), p));
        }
    }
    CHECK(schedule_prefix({{"kind", "geometric"}, {"base", 1}, {"ratio", 2}, {"count", 4}}) ==
          std::vector<double>{1, 2, 4, 8});
    CHECK_THROWS_AS(schedule_prefix({{"kind", "geometric"}, {"ratio", 2}}), std::invalid_argument);
}

TEST_CASE("reports are deterministic") {
    const auto scenario = parse_scenario(small_audit());
    const auto first = run_scenario(scenario);
    const auto second = run_scenario(scenario);
    CHECK(first.rows_csv() == second.rows_csv());
    CHECK(first.to_json() == second.to_json());
    CHECK(first.status() == Report::Status::pass);
    CHECK(first.exit_code() == 0);

    const auto dir = std::filesystem::temp_directory_path() / "cat0-report-test";
    std::filesystem::remove_all(dir);
    write_report(first, dir);
    const auto written = json::parse(slurp(dir / "report.json"));
    CHECK(written.at("schema") == report_schema);
    CHECK(written.at("status") == "pass");
    CHECK(written.at("row_count") == first.rows.size());
    CHECK(slurp(dir / "rows.csv") == first.rows_csv());
    std::filesystem::remove_all(dir);
}

TEST_CASE("generic operations report against an expected value") {
    auto right = template_scenario("cone-distance");
    right["params"]["expected"] = std::sqrt(2.0);
    right["params"]["match_tolerance"] = 1e-12;
    CHECK(run_scenario(parse_scenario(right)).status() == Report::Status::pass);

    auto wrong = template_scenario("visual-distance");
    wrong["params"]["expected"] = 0.5;
    const auto report = run_scenario(parse_scenario(wrong));
    CHECK(report.status() == Report::Status::fail);
    CHECK(report.exit_code() == 1);
    CHECK(report.summary().find("fail") == 0);
}

TEST_CASE("spiral sweep template passes") {
    const auto report = run_scenario(parse_scenario(template_scenario("spiral-sweep")));
    CHECK(report.status() == Report::Status::pass);
    CHECK(report.rows.size() == 201);
}
