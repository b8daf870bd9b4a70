#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hslab/scenario.hpp"

namespace {

// --override a.b.c=value, value parsed as JSON when possible
void apply_override(nlohmann::json& cfg, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
        throw hslab::ConfigError("--override expects key=value, got '" + kv + "'");
    const std::string path = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        value = raw;  // plain string
    }
    nlohmann::json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        const auto dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (key.empty()) throw hslab::ConfigError("--override: empty key in '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hslab - batch scenario runner for the half-space Neumann laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::vector<std::string> overrides;
    bool list_tasks = false;

    CLI::App* run = app.add_subcommand("run", "execute a scenario config");
    run->add_option("config", config_path, "JSON scenario config")->required();
    run->add_option("--output-dir", output_dir, "override the scenario output directory");
    run->add_option("--override", overrides, "key=value config override (repeatable)");
    run->add_flag("--list-tasks", list_tasks, "list known tasks and exit");

    CLI11_PARSE(app, argc, argv);

    if (list_tasks) {
        for (const std::string& t : hslab::known_task_names()) std::cout << t << "\n";
        return 0;
    }

    try {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "config error: cannot open '" << config_path << "'\n";
            return 2;
        }
        nlohmann::json cfg;
        try {
            cfg = nlohmann::json::parse(is);
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        for (const std::string& kv : overrides) apply_override(cfg, kv);
        if (!output_dir.empty()) cfg["output_dir"] = output_dir;

        const hslab::Scenario sc = hslab::Scenario::from_json(cfg);
        const hslab::ScenarioResult res = hslab::run_scenario(sc);
        if (res.exit_code != 0) {
            std::cerr << "task failure: " << res.summary.value("failed_invariant", std::string("?"))
                      << ": " << res.summary.value("failure_message", std::string()) << "\n";
        }
        std::cout << "summary: " << sc.output_dir << "/summary.json\n";
        return res.exit_code;
    } catch (const hslab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
