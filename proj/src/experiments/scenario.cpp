#include "cat0/experiments/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include <Eigen/Core>

namespace cat0::experiments {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

const std::vector<std::string> top_level_keys{"schema", "name", "description", "operation", "seed",
                                              "tolerance", "space", "rays", "schedule", "params"};

json doubling(double horizon) {
    return json{{"kind", "geometric"}, {"base", 1.0}, {"ratio", 2.0},
                {"count", static_cast<std::size_t>(std::log2(horizon)) + 1}};
}

json make_template(const std::string& operation) {
    json t{{"schema", scenario_schema}, {"operation", operation}, {"seed", 1}};
    if (operation == "metric-audit") {
        t["seed"] = 7;
        t["params"] = {{"triples", 500}, {"c", 1.0}, {"models", {"tree", "euclidean", "seaweed"}},
                       {"max_vertices", 64}, {"repeat_every", 10}, {"triangle_tolerance", 1e-9}};
    } else if (operation == "sine-formula") {
        t["schedule"] = {{"kind", "explicit"}, {"values", {1.0, 10.0, 1e2, 1e3, 1e4, 1e5, 1e6}}};
        t["params"] = {{"euclidean_angles", {0.3, 1.0, 2.0, 3.0}}, {"euclidean_tolerance", 1e-6},
                       {"tree_prefix", 3}, {"seaweed_gaps", {2.0, 4.0}}, {"seaweed_tolerance", 1e-3}};
    } else if (operation == "seaweed-tits") {
        t["schedule"] = doubling(1073741824.0);
        t["params"] = {{"gap", 4.0}, {"chain_size", 8}, {"chain_tolerance", 1e-2},
                       {"spiral_tolerance", 1e-3}};
    } else if (operation == "cone-converge") {
        t["seed"] = 11;
        t["schedule"] = doubling(1048576.0);
        t["params"] = {{"pairs", 200}, {"models", {"euclidean", "tree", "product", "seaweed"}},
                       {"radius_min", 0.2}, {"radius_max", 2.0}, {"match_tolerance", 1e-4}};
    } else if (operation == "theta-commute") {
        t["seed"] = 5;
        t["params"] = {{"samples", 1000}, {"models", {"euclidean", "tree", "product", "seaweed"}},
                       {"scale_max", 1e4}, {"radius_max", 5.0}, {"commute_tolerance", 1e-12},
                       {"lipschitz_tolerance", 1e-9}};
    } else if (operation == "collapse-schedule") {
        t["params"] = {{"models", {"euclidean", "tree", "seaweed"}}, {"family_size", 12}, {"c", 1.0},
                       {"t_max", 10.0}, {"t_samples", 20}};
    } else if (operation == "scale-lattice") {
        t["seed"] = 3;
        t["params"] = {{"sequences", 10}, {"length", 10000}};
    } else if (operation == "spiral-family") {
        t["params"] = {{"theta0", 0.3},
                       {"sup_tolerance", 1e-9},
                       {"direction_tolerance", 1e-9},
                       {"pushforward_profiles", {"log", "loglog", "log_sin_loglog", "zero"}},
                       {"pushforward_scales", {2.0, 10.0, 1e3, 1e6, 1048576.0, 1e12}},
                       {"sweep_log_max", 2.0 * two_pi},
                       {"sweep_step", 0.01},
                       {"cover_resolution", 0.05},
                       {"distortion_scale", 1048576.0},
                       {"distortion_bound", 0.01},
                       {"distortion_pairs", 4000}};
    } else if (operation == "spiral-sweep") {
        t["params"] = {{"profile", "log"}, {"theta0", 0.0}, {"steps", 200}, {"step", 0.1},
                       {"direction_tolerance", 1e-9}};
    } else if (operation == "seaweed-pushforward") {
        t["params"] = {{"thetas", {0.0, 1.0}}, {"log_scale_max", 600.0}, {"log_scale_step", 0.02},
                       {"bounds", {10.0, 100.0, 500.0}}, {"target_range", two_pi},
                       {"target_step", 0.1}, {"hit_tolerance", 0.05}, {"row_stride", 100}};
    } else if (operation == "morse-probe") {
        t["params"] = {{"sizes", {16, 32, 64, 128, 256, 512, 1024, 2048, 4096}},
                       {"l", 2.0},
                       {"c", 1.0},
                       {"epsilons", {0.1, 0.2, 0.4}},
                       {"cases", {"euclidean", "tree", "straight", "spiral+", "spiral-"}}};
    } else if (operation == "hausdorff-bound") {
        t["seed"] = 13;
        t["params"] = {{"instances", 100}, {"samples", 600}};
    } else if (operation == "cut-point") {
        t["seed"] = 17;
        t["params"] = {{"trees", 50}, {"max_vertices", 64},
                       {"scale_factors", {0.25, 0.5, 1.0, 1.5, 2.0, 8.0, 64.0, 1024.0}}};
    } else if (operation == "seaweed-oracle") {
        t["seed"] = 19;
        t["params"] = {{"pairs", 100}, {"r_max", 50.0}, {"theta_range", 10.0},
                       {"relative_tolerance", 0.01}, {"log_step", 0.01}, {"angle_step", 0.01},
                       {"reach", 5}};
    } else if (operation == "angle-between") {
        t["space"] = {{"kind", "seaweed"}};
        t["rays"] = {{{"straight", 0.0}}, {{"straight", 2.0}}};
        t["schedule"] = doubling(1048576.0);
        t["params"] = {{"expected", nullptr}, {"match_tolerance", 1e-3}};
    } else if (operation == "tits-chain") {
        t["space"] = {{"kind", "seaweed"}};
        t["rays"] = {{{"straight", 0.0}}, {{"straight", 4.0}}};
        t["schedule"] = doubling(1073741824.0);
        t["params"] = {{"chain_size", 8}, {"expected", nullptr}, {"match_tolerance", 1e-2}};
    } else if (operation == "visual-distance") {
        t["space"] = {{"kind", "euclidean"}, {"dimension", 2}};
        t["rays"] = {{{"direction", {1.0, 0.0}}}, {{"direction", {0.0, 1.0}}}};
        t["params"] = {{"c", 1.0}, {"horizon", 1048576.0}, {"expected", nullptr},
                       {"match_tolerance", 1e-9}};
    } else if (operation == "cone-distance") {
        t["space"] = {{"kind", "euclidean"}, {"dimension", 2}};
        t["rays"] = {{{"direction", {1.0, 0.0}}}, {{"direction", {0.0, 1.0}}}};
        t["schedule"] = doubling(1048576.0);
        t["params"] = {{"t_a", 1.0}, {"t_b", 1.0}, {"expected", nullptr}, {"match_tolerance", 1e-4}};
    } else if (operation == "flat-sector") {
        t["space"] = {{"kind", "product"},
                      {"left", {{"kind", "tree"}, {"regular", 2}, {"edge_length", 1.0}}},
                      {"right", {{"kind", "euclidean"}, {"dimension", 1}}}};
        t["rays"] = {{{"product",
                       {{"left", {{"word", {{"head", json::array()}, {"cycle", {0}}}}}},
                        {"right", {{"direction", {1.0}}}},
                        {"a", 0.8},
                        {"b", 0.6}}}},
                     {{"product",
                       {{"left", {{"word", {{"head", json::array()}, {"cycle", {0}}}}}},
                        {"right", {{"direction", {1.0}}}},
                        {"a", 0.6},
                        {"b", 0.8}}}}};
        t["params"] = {{"radii", {0.5, 1.0, 2.0, 5.0, 10.0}}, {"flat_tolerance", 1e-9}};
    } else {
        throw InvalidScenario("unknown operation '" + operation + "'");
    }
    if (!t.contains("params")) {
        t["params"] = json::object();
    }
    return t;
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_cell(const json& cell) {
    if (cell.is_string()) {
        const auto s = cell.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) {
            return s;
        }
        std::string quoted = "\"";
        for (char ch : s) {
            quoted += ch;
            if (ch == '"') {
                quoted += '"';
            }
        }
        return quoted + "\"";
    }
    if (cell.is_boolean()) {
        return cell.get<bool>() ? "true" : "false";
    }
    if (cell.is_number_integer()) {
        return cell.dump();
    }
    if (cell.is_number()) {
        return format_number(cell.get<double>());
    }
    if (cell.is_null()) {
        return "";
    }
    return csv_cell(json(cell.dump()));
}

}  // namespace

double environment_tolerance() {
    const char* env = std::getenv("CAT0_TOLERANCE");
    if (env == nullptr || *env == '\0') {
        return default_tolerance;
    }
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
        throw InvalidScenario(std::string("CAT0_TOLERANCE must be a positive number, got '") + env + "'");
    }
    return v;
}

const std::vector<TemplateInfo>& catalog() {
    static const std::vector<TemplateInfo> entries{
        {"metric-audit", 1, "visual metric d_C: symmetry, triangle inequality, zero iff equal rays"},
        {"sine-formula", 2, "sine-formula angle estimates in the plane, a tree and the seaweed cover"},
        {"seaweed-tits", 3, "Tits chain along the seaweed line and angles to the spiral points"},
        {"cone-converge", 4, "rescaled distances converge monotonically to the cone metric"},
        {"theta-commute", 5, "retraction between scales commutes with ray evaluation, 1-Lipschitz"},
        {"collapse-schedule", 6, "collapse schedules for converging ray families and the converse"},
        {"scale-lattice", 7, "upper and lower bounds of a finite family of scaling sequences"},
        {"spiral-family", 8, "planar spiral maps: r h'(r), pushforward directions, sweep, distortion"},
        {"spiral-sweep", 8, "pushforward directions of the logarithmic spiral on a scale grid"},
        {"seaweed-pushforward", 9, "lifted spirals on the seaweed cover: drift, hitting, fixed spirals"},
        {"morse-probe", 10, "detour probes: growing for flat directions, bounded for Morse rays"},
        {"hausdorff-bound", 11, "close quasi-geodesic rays stay within the explicit Hausdorff bound"},
        {"cut-point", 12, "rescaled tree rays are separated by the branch point past the prefix"},
        {"seaweed-oracle", 13, "closed-form seaweed distance against a polar-grid shortest path"},
        {"angle-between", 0, "sine-formula angle between two rays along a schedule"},
        {"tits-chain", 0, "chain estimate of the Tits distance between two rays"},
        {"visual-distance", 0, "visual distance d_C between two rays"},
        {"cone-distance", 0, "rescaled distance between two cone points along a schedule"},
        {"flat-sector", 0, "compare ray distances with the flat sector of their angle"},
    };
    return entries;
}

json template_scenario(const std::string& name) {
    return make_template(name);
}

Scenario parse_scenario(const json& j) {
    if (!j.is_object()) {
        throw InvalidScenario("scenario must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (std::find(top_level_keys.begin(), top_level_keys.end(), key) == top_level_keys.end()) {
            throw InvalidScenario("unknown scenario field '" + key + "'");
        }
    }
    if (!j.contains("schema") || j.at("schema") != scenario_schema) {
        throw InvalidScenario(std::string("scenario schema must be \"") + scenario_schema + "\"");
    }
    if (!j.contains("operation") || !j.at("operation").is_string()) {
        throw InvalidScenario("scenario needs an operation name");
    }
    Scenario s;
    s.source = j;
    s.operation = j.at("operation").get<std::string>();
    const json base = make_template(s.operation);

    const json& seed = j.contains("seed") ? j.at("seed") : base.at("seed");
    if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) {
        throw InvalidScenario("seed must be a non-negative integer");
    }
    s.seed = seed.get<std::uint64_t>();

    if (j.contains("tolerance")) {
        const auto& tol = j.at("tolerance");
        if (!tol.is_number() || !(tol.get<double>() > 0.0)) {
            throw InvalidScenario("tolerance must be a positive number");
        }
        s.tolerance = tol.get<double>();
    } else {
        s.tolerance = environment_tolerance();
    }

    s.params = base.at("params");
    if (j.contains("params")) {
        if (!j.at("params").is_object()) {
            throw InvalidScenario("params must be an object");
        }
        for (const auto& [key, value] : j.at("params").items()) {
            if (!s.params.contains(key)) {
                throw InvalidScenario("operation '" + s.operation + "' has no parameter '" + key + "'");
            }
            const auto& def = s.params.at(key);
            const bool compatible = def.is_null() || value.is_null() ||
                                    (def.is_number() && value.is_number()) ||
                                    def.type() == value.type();
            if (!compatible) {
                throw InvalidScenario("parameter '" + key + "' has the wrong type");
            }
            s.params[key] = value;
        }
    }

    auto pick = [&](const char* key) {
        return j.contains(key) ? j.at(key) : base.value(key, json());
    };
    s.space = pick("space");
    s.rays = pick("rays");
    s.schedule = pick("schedule");
    try {
        if (!s.space.is_null()) {
            const auto space = space_from_json(s.space);
            if (!s.rays.is_null()) {
                if (!s.rays.is_array() || s.rays.size() != 2) {
                    throw InvalidScenario("rays must be a list of two ray descriptors");
                }
                for (const auto& r : s.rays) {
                    ray_from_json(space, r);
                }
            }
        } else if (!s.rays.is_null()) {
            throw InvalidScenario("rays need a space");
        }
        if (!s.schedule.is_null()) {
            schedule_prefix(s.schedule);
        }
    } catch (const InvalidScenario&) {
        throw;
    } catch (const std::exception& e) {
        throw InvalidScenario(e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidScenario("cannot open scenario file " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidScenario(std::string("scenario is not valid JSON: ") + e.what());
    }
    return parse_scenario(j);
}

std::string to_string(Report::Status status) {
    switch (status) {
    case Report::Status::pass: return "pass";
    case Report::Status::fail: return "fail";
    case Report::Status::not_converged: return "not_converged";
    }
    return "fail";
}

Report::Status Report::status() const {
    if (!converged) {
        return Status::not_converged;
    }
    for (const auto& c : checks) {
        if (!c.passed) {
            return Status::fail;
        }
    }
    return Status::pass;
}

int Report::exit_code() const {
    return status() == Status::pass ? 0 : 1;
}

json Report::to_json() const {
    json list = json::array();
    std::size_t passed = 0;
    for (const auto& c : checks) {
        list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        passed += c.passed ? 1 : 0;
    }
    return json{{"schema", report_schema},
                {"scenario", scenario},
                {"status", to_string(status())},
                {"summary", {{"passed", passed}, {"failed", checks.size() - passed}, {"checks", list}}},
                {"columns", columns},
                {"row_count", rows.size()},
                {"rows_file", "rows.csv"},
                {"versions",
                 {{"cat0", "0.1.0"},
                  {"report_schema", report_schema},
                  {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                "." + std::to_string(EIGEN_MINOR_VERSION)},
                  {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
}

std::string Report::rows_csv() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out << (i ? "," : "") << csv_cell(json(columns[i]));
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << csv_cell(row[i]);
        }
        out << '\n';
    }
    return out.str();
}

std::string Report::summary() const {
    std::string line = to_string(status());
    std::size_t failed = 0;
    for (const auto& c : checks) {
        if (!c.passed) {
            line += (failed++ ? "; " : ": ") + c.name + " (" + c.detail + ")";
        }
    }
    return line;
}

void write_report(const Report& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream json_out(dir / "report.json");
    json_out << report.to_json().dump(2) << '\n';
    std::ofstream csv_out(dir / "rows.csv");
    csv_out << report.rows_csv();
    if (!json_out || !csv_out) {
        throw std::runtime_error("cannot write report into " + dir.string());
    }
}

}  // namespace cat0::experiments
