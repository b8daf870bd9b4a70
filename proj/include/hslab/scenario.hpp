#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hslab/analysis.hpp"
#include "hslab/model.hpp"
#include "hslab/potentials.hpp"
#include "hslab/solver.hpp"

namespace hslab {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};
struct TaskError : std::runtime_error {
    std::string invariant;
    TaskError(const std::string& inv, const std::string& what)
        : std::runtime_error(what), invariant(inv) {}
};

// A batch scenario: problem + grid + data + solver config and an ordered
// task list. The JSON schema is documented in the README; to_json/from_json
// round-trip exactly (the summary echoes the canonical form).
struct Scenario {
    ProblemSpec problem;
    GridSpec grid;
    BoundaryDataFamily data;
    OperatorConfig operators;
    SolverConfig solver;
    std::string solver_expect = "converged";  // converged | diverged | any
    std::vector<std::string> tasks;
    std::string output_dir = "out";

    // task knobs (defaults match the acceptance protocol)
    double properties_symmetry_factor = 1.1;
    double properties_monotonicity_tol = 1e-12;
    double properties_homogeneity_max = 0.10;
    std::vector<double> properties_rotation_angles = {0.5, 1.1};
    std::vector<double> properties_lambdas = {2.0};
    double decay_tolerance = 0.15;
    std::vector<double> probe_R_values;
    double probe_domain_halfwidth = 0.0;  // 0 = use grid L
    int probe_quad_points = 96;
    double threshold_bracket_ratio = 1.1;
    int critical_n_lo = 2;
    int critical_n_hi = 10;
    Rational higher_p0{2, 1};

    static Scenario from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void validate() const;
};

std::vector<std::string> known_task_names();

struct ScenarioResult {
    nlohmann::json summary;
    int exit_code = 0;  // 0 ok, 1 task failure, 2 config error (set by caller)
};

// Executes the tasks in order, writes the JSON summary and CSV artifacts
// into output_dir, and returns the summary. Throws ConfigError / TaskError.
ScenarioResult run_scenario(const Scenario& sc);

// Summary serialization used for the byte-identity determinism check.
std::string summary_to_string(const nlohmann::json& summary);

}  // namespace hslab
