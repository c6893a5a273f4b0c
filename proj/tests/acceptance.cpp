// One line per acceptance criterion; exits non-zero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "cat0/experiments/scenario.hpp"

using cat0::json;
using namespace cat0::experiments;

namespace {

struct Criterion {
    int number;
    const char* title;
    const char* template_name;
    json params;              // written over the template defaults
    json schedule = nullptr;  // replaces the template schedule when set
    double time_limit = 0.0;  // seconds, 0 for none
};

json doubling(double horizon) {
    return {{"kind", "geometric"}, {"base", 1.0}, {"ratio", 2.0}, {"count", static_cast<int>(std::log2(horizon)) + 1}};
}

std::vector<Criterion> criteria() {
    const double two20 = 1048576.0;
    return {
        {1, "visual metric axioms", "metric-audit",
         {{"triples", 500}, {"models", {"tree", "euclidean", "seaweed"}}, {"max_vertices", 64},
          {"triangle_tolerance", 1e-9}},
         nullptr, 30.0},
        {2, "sine formula", "sine-formula",
         {{"euclidean_tolerance", 1e-6}, {"seaweed_gaps", {2.0, 4.0}}, {"seaweed_tolerance", 1e-3}},
         {{"kind", "explicit"}, {"values", {1.0, 10.0, 1e2, 1e3, 1e4, 1e5, 1e6}}}},
        {3, "Tits line of the seaweed boundary", "seaweed-tits",
         {{"gap", 4.0}, {"chain_size", 8}, {"chain_tolerance", 1e-2}, {"spiral_tolerance", 1e-3}}},
        {4, "isometric embedding and direct limit", "cone-converge",
         {{"pairs", 200}, {"models", {"euclidean", "tree", "product", "seaweed"}}, {"match_tolerance", 1e-4}},
         doubling(two20), 120.0},
        {5, "retraction commutes and is 1-Lipschitz", "theta-commute",
         {{"samples", 1000}, {"commute_tolerance", 1e-12}, {"lipschitz_tolerance", 1e-9}}},
        {6, "collapse schedules", "collapse-schedule",
         {{"models", {"euclidean", "tree", "seaweed"}}, {"t_max", 10.0}}},
        {7, "scale lattice", "scale-lattice", {{"sequences", 10}, {"length", 10000}}},
        {8, "spiral family", "spiral-family",
         {{"sup_tolerance", 1e-9},
          {"direction_tolerance", 1e-9},
          {"sweep_log_max", 4.0 * std::numbers::pi},
          {"cover_resolution", 0.05},
          {"distortion_scale", two20},
          {"distortion_bound", 0.01}}},
        {9, "seaweed pushforwards", "seaweed-pushforward",
         {{"target_step", 0.1}, {"hit_tolerance", 0.05}}},
        {10, "Morse probing", "morse-probe",
         {{"sizes", {16, 32, 64, 128, 256, 512, 1024, 2048, 4096}},
          {"cases", {"euclidean", "tree", "straight", "spiral+", "spiral-"}}}},
        {11, "close rays Hausdorff bound", "hausdorff-bound", {{"instances", 100}}},
        {12, "cut-point witness", "cut-point", {{"trees", 50}, {"max_vertices", 64}}},
        {13, "seaweed distance oracle", "seaweed-oracle",
         {{"pairs", 100}, {"r_max", 50.0}, {"relative_tolerance", 0.01}},
         nullptr, 120.0},
    };
}

std::string held_checks(const Report& report) {
    std::size_t held = 0;
    for (const auto& c : report.checks) {
        held += c.passed ? 1 : 0;
    }
    return std::to_string(held) + "/" + std::to_string(report.checks.size()) + " checks held";
}

}  // namespace

int main() {
    int failures = 0;
    for (const auto& c : criteria()) {
        std::string detail;
        bool passed = false;
        double seconds = 0.0;
        try {
            json j = template_scenario(c.template_name);
            j["params"].update(c.params);
            if (!c.schedule.is_null()) {
                j["schedule"] = c.schedule;
            }
            const auto scenario = parse_scenario(j);
            const auto start = std::chrono::steady_clock::now();
            const auto report = run_scenario(scenario);
            seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            passed = report.status() == Report::Status::pass;
            detail = passed ? held_checks(report) : report.summary();
            if (c.time_limit > 0.0 && seconds >= c.time_limit) {
                passed = false;
                detail += "; over the " + std::to_string(static_cast<int>(c.time_limit)) + " s budget";
            }
        } catch (const std::exception& e) {
            detail = std::string("error: ") + e.what();
        }
        failures += passed ? 0 : 1;
        std::printf("[%s] %2d %s (%.2f s): %s\n", passed ? "PASS" : "FAIL", c.number, c.title, seconds,
                    detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
