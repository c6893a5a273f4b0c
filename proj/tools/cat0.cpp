#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cat0/experiments/scenario.hpp"

namespace ex = cat0::experiments;

namespace {

constexpr int exit_invalid = 2;

int run(const std::string& path, const std::string& out) {
    const auto scenario = ex::load_scenario(path);
    const auto report = ex::run_scenario(scenario);
    ex::write_report(report, out);
    std::cout << scenario.operation << ": " << report.summary() << '\n';
    return report.exit_code();
}

int list() {
    for (const auto& t : ex::catalog()) {
        std::string tag = t.criterion ? "[" + std::to_string(t.criterion) + "]" : "[-]";
        std::printf("%-20s %-5s %s\n", t.name.c_str(), tag.c_str(), t.description.c_str());
    }
    return 0;
}

int validate(const std::string& path) {
    const auto scenario = ex::load_scenario(path);
    std::cout << path << ": valid " << scenario.operation << " scenario\n";
    return 0;
}

int print_template(const std::string& name) {
    std::cout << ex::template_scenario(name).dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cat0: boundary and asymptotic-cone experiments on model CAT(0) spaces"};
    app.require_subcommand(1);

    std::string path;
    std::string out = "out";
    auto* run_cmd = app.add_subcommand("run", "run a scenario and write report.json and rows.csv");
    run_cmd->add_option("scenario", path, "scenario JSON file")->required();
    run_cmd->add_option("--out", out, "output directory")->capture_default_str();

    auto* list_cmd = app.add_subcommand("list", "list the built-in scenario templates");

    std::string check_path;
    auto* validate_cmd = app.add_subcommand("validate", "check a scenario against the schema");
    validate_cmd->add_option("scenario", check_path, "scenario JSON file")->required();

    std::string name;
    auto* template_cmd = app.add_subcommand("template", "print a built-in scenario");
    template_cmd->add_option("name", name, "template name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_invalid;
    }

    try {
        if (*run_cmd) {
            return run(path, out);
        }
        if (*list_cmd) {
            return list();
        }
        if (*validate_cmd) {
            return validate(check_path);
        }
        if (*template_cmd) {
            return print_template(name);
        }
    } catch (const ex::InvalidScenario& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return exit_invalid;
}
