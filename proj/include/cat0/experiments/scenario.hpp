#ifndef CAT0_EXPERIMENTS_SCENARIO_HPP
#define CAT0_EXPERIMENTS_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "cat0/serialization.hpp"

namespace cat0::experiments {

inline constexpr const char* scenario_schema = "cat0.scenario/1";
inline constexpr const char* report_schema = "cat0.report/1";

/// Raised for anything that does not match the scenario schema.
class InvalidScenario : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/*
 * {"schema": "cat0.scenario/1", "operation": name, "seed": n,
 *  "tolerance": x, "space": ..., "rays": [...], "schedule": ...,
 *  "params": {...}}
 * Params are merged over the operation's defaults; unknown keys are errors.
 */
struct Scenario {
    std::string operation;
    std::uint64_t seed = 0;
    double tolerance = default_tolerance;
    json space;
    json rays;
    json schedule;
    json params;
    json source;  // the file as read
};

/// Default tolerance: CAT0_TOLERANCE when set, else the library default.
double environment_tolerance();

Scenario parse_scenario(const json& j);
Scenario load_scenario(const std::filesystem::path& path);

struct Check {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct Report {
    enum class Status { pass, fail, not_converged };

    json scenario;
    std::vector<std::string> columns;
    std::vector<json> rows;  // one array per row, matching the columns
    std::vector<Check> checks;
    bool converged = true;

    Status status() const;
    int exit_code() const;
    json to_json() const;
    std::string rows_csv() const;
    /// One line: status plus the failing checks, if any.
    std::string summary() const;
};

std::string to_string(Report::Status status);

Report run_scenario(const Scenario& scenario);

/// Writes report.json and rows.csv into dir (created if missing).
void write_report(const Report& report, const std::filesystem::path& dir);

struct TemplateInfo {
    std::string name;
    int criterion = 0;  // 0 for the generic operations
    std::string description;
};

const std::vector<TemplateInfo>& catalog();

/// The built-in scenario for a catalog entry; throws InvalidScenario for
/// unknown names.
json template_scenario(const std::string& name);

}  // namespace cat0::experiments

#endif
