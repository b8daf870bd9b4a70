#include "hslab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "hslab/parallel.hpp"

namespace hslab {

using nlohmann::json;

namespace {

const char* kind_name(DataKind k) {
    switch (k) {
        case DataKind::Gaussian: return "gaussian";
        case DataKind::IndicatorBall: return "indicator-ball";
        case DataKind::PowerDecay: return "power-decay";
        case DataKind::PureHomogeneous: return "pure-homogeneous";
        case DataKind::RadialStep: return "radial-step";
        case DataKind::CustomTable: return "custom-table";
    }
    return "?";
}

DataKind kind_from_name(const std::string& s) {
    if (s == "gaussian") return DataKind::Gaussian;
    if (s == "indicator-ball") return DataKind::IndicatorBall;
    if (s == "power-decay") return DataKind::PowerDecay;
    if (s == "pure-homogeneous") return DataKind::PureHomogeneous;
    if (s == "radial-step") return DataKind::RadialStep;
    if (s == "custom-table") return DataKind::CustomTable;
    throw ConfigError("data.kind: unknown kind '" + s + "'");
}

template <class T>
T get_or(const json& j, const std::string& key, T def) {
    if (!j.contains(key)) return def;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

Rational get_rational(const json& j, const std::string& key, Rational def) {
    if (!j.contains(key)) return def;
    const json& v = j.at(key);
    try {
        if (v.is_string()) return rational_from_string(v.get<std::string>());
        if (v.is_number_integer()) return Rational(v.get<long long>(), 1);
        if (v.is_number()) return rational_from_double(v.get<double>());
    } catch (const std::exception& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
    throw ConfigError("key '" + key + "': expected a number or \"p/q\" string");
}

}  // namespace

std::vector<std::string> known_task_names() {
    return {"solve",        "norms",     "properties",       "decay",
            "energy",       "probe-testfunction", "probe-halfball", "threshold",
            "linear-bounds", "critical-curves"};
}

Scenario Scenario::from_json(const json& j) {
    Scenario sc;
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    const json problem = j.value("problem", json::object());
    sc.problem.n = get_or<int>(problem, "n", 3);
    sc.problem.m = get_rational(problem, "m", Rational(3, 1));
    sc.problem.a = get_or<double>(problem, "a", 1.0);
    sc.problem.b = get_or<double>(problem, "b", 1.0);

    const json grid = j.value("grid", json::object());
    sc.grid.n = sc.problem.n;
    sc.grid.L = get_or<double>(grid, "L", 6.0);
    sc.grid.nx = get_or<int>(grid, "nx", 16);
    sc.grid.T = get_or<double>(grid, "T", 3.0);
    sc.grid.nt = get_or<int>(grid, "nt", 8);

    const json data = j.value("data", json::object());
    sc.data.kind = kind_from_name(get_or<std::string>(data, "kind", "gaussian"));
    sc.data.amplitude = get_or<double>(data, "amplitude", 1.0);
    sc.data.width = get_or<double>(data, "width", 1.0);
    sc.data.radius = get_or<double>(data, "radius", 1.0);
    sc.data.radius2 = get_or<double>(data, "radius2", 2.0);
    sc.data.level2 = get_or<double>(data, "level2", 0.5);
    sc.data.k = get_or<double>(data, "k", 1.0);
    sc.data.offset = get_or<std::vector<double>>(data, "offset", {});
    sc.data.table_r = get_or<std::vector<double>>(data, "table_r", {});
    sc.data.table_v = get_or<std::vector<double>>(data, "table_v", {});
    // pure-homogeneous decay follows the problem exponents
    sc.data.decay_exponent = to_double(derive_exponents(sc.problem).data_decay);

    const json ops = j.value("operators", json::object());
    const std::string path = get_or<std::string>(ops, "path", "fft");
    if (path == "fft")
        sc.operators.path = OperatorPath::Fft;
    else if (path == "direct-oracle")
        sc.operators.path = OperatorPath::DirectOracle;
    else
        throw ConfigError("operators.path: expected 'fft' or 'direct-oracle'");
    sc.operators.padding = get_or<int>(ops, "padding", 2);
    sc.operators.singular_tol = get_or<double>(ops, "singular_tol", 1e-10);
    sc.operators.symmetrize = get_or<bool>(ops, "symmetrize", false);

    const json sol = j.value("solver", json::object());
    sc.solver.tol = get_or<double>(sol, "tol", 1e-6);
    sc.solver.max_iter = get_or<int>(sol, "max_iter", 100);
    sc.solver.divergence_factor = get_or<double>(sol, "divergence_factor", 1e6);
    sc.solver_expect = get_or<std::string>(sol, "expect", "converged");
    if (sc.solver_expect != "converged" && sc.solver_expect != "diverged" &&
        sc.solver_expect != "any")
        throw ConfigError("solver.expect: expected 'converged', 'diverged' or 'any'");

    sc.tasks = get_or<std::vector<std::string>>(j, "tasks", {});
    if (sc.tasks.empty()) throw ConfigError("tasks: must be a nonempty list");
    const std::vector<std::string> known = known_task_names();
    for (const std::string& t : sc.tasks)
        if (std::find(known.begin(), known.end(), t) == known.end())
            throw ConfigError("tasks: unknown task '" + t + "'");
    sc.output_dir = get_or<std::string>(j, "output_dir", "out");

    const json props = j.value("properties", json::object());
    sc.properties_symmetry_factor = get_or<double>(props, "symmetry_factor", 1.1);
    sc.properties_monotonicity_tol = get_or<double>(props, "monotonicity_tol", 1e-12);
    sc.properties_homogeneity_max = get_or<double>(props, "homogeneity_max", 0.10);
    sc.properties_rotation_angles = get_or<std::vector<double>>(props, "rotation_angles", {0.5, 1.1});
    sc.properties_lambdas = get_or<std::vector<double>>(props, "lambdas", {2.0});

    const json decay = j.value("decay", json::object());
    sc.decay_tolerance = get_or<double>(decay, "tolerance", 0.15);

    const json probe = j.value("probe", json::object());
    sc.probe_R_values = get_or<std::vector<double>>(probe, "R_values", {});
    sc.probe_domain_halfwidth = get_or<double>(probe, "domain_halfwidth", 0.0);
    sc.probe_quad_points = get_or<int>(probe, "quad_points", 96);

    const json thr = j.value("threshold", json::object());
    sc.threshold_bracket_ratio = get_or<double>(thr, "bracket_ratio", 1.1);

    const json cc = j.value("critical_curves", json::object());
    sc.critical_n_lo = get_or<int>(cc, "n_lo", 2);
    sc.critical_n_hi = get_or<int>(cc, "n_hi", 10);

    const json hi = j.value("higher_integrability", json::object());
    sc.higher_p0 = get_rational(hi, "p0", Rational(2, 1));

    sc.validate();
    return sc;
}

void Scenario::validate() const {
    try {
        problem.validate();
        grid.validate();
        data.validate(problem.n);
        operators.validate();
        solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (grid.n != problem.n) throw ConfigError("grid.n must match problem.n");
    // dependent tasks need a solve first
    const std::vector<std::string> needs_solve = {"norms", "properties", "decay", "energy",
                                                  "probe-halfball"};
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (std::find(needs_solve.begin(), needs_solve.end(), tasks[i]) == needs_solve.end())
            continue;
        bool solved_before = false;
        for (std::size_t k = 0; k < i; ++k)
            if (tasks[k] == "solve") solved_before = true;
        if (!solved_before)
            throw ConfigError("tasks: '" + tasks[i] + "' requires 'solve' earlier in the list");
    }
}

json Scenario::to_json() const {
    json j;
    j["problem"] = {{"n", problem.n},
                    {"m", rational_to_string(problem.m)},
                    {"a", problem.a},
                    {"b", problem.b}};
    j["grid"] = {{"L", grid.L}, {"nx", grid.nx}, {"T", grid.T}, {"nt", grid.nt}};
    json d;
    d["kind"] = kind_name(data.kind);
    d["amplitude"] = data.amplitude;
    d["width"] = data.width;
    d["radius"] = data.radius;
    d["radius2"] = data.radius2;
    d["level2"] = data.level2;
    d["k"] = data.k;
    d["offset"] = data.offset;
    d["table_r"] = data.table_r;
    d["table_v"] = data.table_v;
    j["data"] = d;
    j["operators"] = {{"path", operators.path == OperatorPath::Fft ? "fft" : "direct-oracle"},
                      {"padding", operators.padding},
                      {"singular_tol", operators.singular_tol},
                      {"symmetrize", operators.symmetrize}};
    j["solver"] = {{"tol", solver.tol},
                   {"max_iter", solver.max_iter},
                   {"divergence_factor", solver.divergence_factor},
                   {"expect", solver_expect}};
    j["tasks"] = tasks;
    j["output_dir"] = output_dir;
    j["properties"] = {{"symmetry_factor", properties_symmetry_factor},
                       {"monotonicity_tol", properties_monotonicity_tol},
                       {"homogeneity_max", properties_homogeneity_max},
                       {"rotation_angles", properties_rotation_angles},
                       {"lambdas", properties_lambdas}};
    j["decay"] = {{"tolerance", decay_tolerance}};
    j["probe"] = {{"R_values", probe_R_values},
                  {"domain_halfwidth", probe_domain_halfwidth},
                  {"quad_points", probe_quad_points}};
    j["threshold"] = {{"bracket_ratio", threshold_bracket_ratio}};
    j["critical_curves"] = {{"n_lo", critical_n_lo}, {"n_hi", critical_n_hi}};
    j["higher_integrability"] = {{"p0", rational_to_string(higher_p0)}};
    return j;
}

namespace {

json norm_report_json(const NormReport& r) {
    json j;
    j["weighted_sup"] = r.weighted_sup;
    j["weak_qstar"] = r.weak_qstar;
    j["grad_weak_q"] = r.grad_weak_q;
    j["x_norm"] = r.x_norm;
    j["q"] = r.q;
    j["q_star"] = r.q_star;
    return j;
}

json trace_json(const IterationTrace& t) {
    json j;
    j["verdict"] = verdict_name(t.verdict);
    j["iterations"] = t.rows.size();
    j["final_relative_diff"] = t.final_relative_diff;
    j["fitted_decay_factor"] = t.fitted_decay_factor;
    double max_ratio = 0.0;
    for (const auto& r : t.rows) max_ratio = std::max(max_ratio, r.ratio);
    j["max_contraction_ratio"] = max_ratio;
    return j;
}

void write_trace_csv(const IterationTrace& t, const std::string& path) {
    std::ofstream os(path);
    os.precision(17);
    os << "iteration,x_norm,diff_norm,ratio,secondary_norm\n";
    for (const auto& r : t.rows)
        os << r.iteration << "," << r.x_norm << "," << r.diff_norm << "," << r.ratio << ","
           << r.secondary_norm << "\n";
}

}  // namespace

std::string summary_to_string(const json& summary) { return summary.dump(2) + "\n"; }

ScenarioResult run_scenario(const Scenario& sc) {
    sc.validate();
    namespace fs = std::filesystem;
    fs::create_directories(sc.output_dir);

    const Exponents expo = derive_exponents(sc.problem);
    const KernelConstants& consts = KernelConstants::calibrated(sc.problem.n);

    json summary;
    summary["schema_version"] = 1;
    summary["scenario"] = sc.to_json();
    summary["kernel_constants"] = {{"n", consts.n},
                                   {"beta_n", consts.beta_n},
                                   {"beta_printed", consts.beta_printed},
                                   {"sigma_np1", consts.sigma_np1},
                                   {"gamma_n", consts.gamma_n},
                                   {"orientation_sign", consts.orientation_sign},
                                   {"green_sign", consts.green_sign}};
    summary["exponents"] = {{"eta", rational_to_string(expo.eta)},
                            {"q", rational_to_string(expo.q)},
                            {"q_star", rational_to_string(expo.q_star)},
                            {"p_data", rational_to_string(expo.p_data)},
                            {"m_crit", rational_to_string(expo.m_crit)},
                            {"M_crit", rational_to_string(expo.M_crit)},
                            {"decay_rate", rational_to_string(expo.decay_rate)},
                            {"data_decay", rational_to_string(expo.data_decay)},
                            {"supercritical", expo.supercritical}};

    json tasks_out = json::object();
    std::optional<SolveResult> solved;
    std::optional<HalfSpaceField> first_iterate;
    BoundaryField f = sc.data.sample(sc.grid);

    ScenarioResult res;
    try {
    for (const std::string& task : sc.tasks) {
        if (task == "critical-curves") {
            const auto rows = critical_curves(sc.critical_n_lo, sc.critical_n_hi);
            const std::string path = sc.output_dir + "/critical_curves.csv";
            std::ofstream os(path);
            os << "n,m_c,M_c\n";
            os.precision(17);
            for (const auto& r : rows)
                os << r.n << "," << to_double(r.m_c) << "," << to_double(r.M_c) << "\n";
            tasks_out["critical-curves"] = {{"rows", rows.size()}, {"csv", path}};
        } else if (task == "solve") {
            SolveResult r = picard_solve(f, sc.problem, sc.grid, consts, sc.operators, sc.solver);
            {
                PicardOperators ops(sc.grid, consts, sc.operators);
                first_iterate = ops.N.apply(f);
            }
            write_trace_csv(r.trace, sc.output_dir + "/trace.csv");
            json tj = trace_json(r.trace);
            if (r.trace.verdict == Verdict::Converged) {
                PicardOperators ops(sc.grid, consts, sc.operators);
                const ResidualReport rr = residual(r.u, f, sc.problem, ops);
                tj["relative_residual"] = rr.relative;
            }
            tasks_out["solve"] = tj;
            const std::string v = verdict_name(r.trace.verdict);
            solved = std::move(r);
            if (sc.solver_expect != "any" && v != sc.solver_expect)
                throw TaskError("solve.verdict",
                                "solve finished '" + v + "' but the scenario expects '" +
                                    sc.solver_expect + "'");
        } else if (task == "norms") {
            const HalfSpaceField& u = solved->u;
            const NormReport xr = x_norm(u, fd_gradient(u), expo.q);
            HalfSpaceField Fm = u;
            signed_power(Fm.v, to_double(sc.problem.m));
            const Rational beta_p = expo.q_star / sc.problem.m;
            const NormReport yr = y_norm(Fm, beta_p);
            json nj;
            nj["x"] = norm_report_json(xr);
            nj["y_nonlinearity"] = {{"p", yr.p},
                                    {"weighted_sup", yr.y_weighted_sup},
                                    {"weak_p", yr.y_weak_p},
                                    {"y_norm", yr.y_norm_total}};
            tasks_out["norms"] = nj;
        } else if (task == "properties") {
            const HalfSpaceField& u = solved->u;
            json pj;
            const PositivityReport pos = check_positivity(u, f, sc.problem);
            pj["positivity"] = {{"applicable", pos.applicable}, {"min_u", pos.min_u}, {"pass", pos.pass}};
            if (pos.applicable && !pos.pass)
                throw TaskError("properties.positivity", "minimum of u is not positive");

            if (sc.data.radial()) {
                std::vector<std::vector<double>> lattice;
                if (sc.problem.n >= 2) {
                    // axis swap (0 1) and a reflection
                    std::vector<double> P(static_cast<std::size_t>(sc.problem.n) * sc.problem.n, 0.0);
                    for (int i = 0; i < sc.problem.n; ++i) P[i * sc.problem.n + i] = 1.0;
                    std::swap(P[0], P[1]);
                    std::swap(P[0 * sc.problem.n + 1], P[1 * sc.problem.n + 0]);
                    lattice.push_back(plane_rotation(sc.problem.n, 0, 1, M_PI / 2.0));
                    std::vector<double> refl(static_cast<std::size_t>(sc.problem.n) * sc.problem.n, 0.0);
                    for (int i = 0; i < sc.problem.n; ++i) refl[i * sc.problem.n + i] = i == 0 ? -1.0 : 1.0;
                    lattice.push_back(refl);
                }
                std::vector<std::vector<double>> generic;
                for (double th : sc.properties_rotation_angles)
                    generic.push_back(plane_rotation(sc.problem.n, 0, 1, th));

                const double lattice_defect = check_rotational_symmetry(u, lattice);
                const double generic_defect = check_rotational_symmetry(u, generic);
                const double baseline = check_rotational_symmetry(*first_iterate, generic);
                pj["rotational_symmetry"] = {{"lattice_defect", lattice_defect},
                                             {"generic_defect", generic_defect},
                                             {"linear_baseline", baseline}};
                if (sc.operators.symmetrize && lattice_defect != 0.0)
                    throw TaskError("properties.symmetry.lattice",
                                    "lattice rotation defect is nonzero on a symmetrized run");
                if (generic_defect > sc.properties_symmetry_factor * baseline)
                    throw TaskError("properties.symmetry.generic",
                                    "rotation defect exceeds the linear baseline allowance");

                const double mono_u = check_radial_monotonicity(u);
                const double mono_base = check_radial_monotonicity(*first_iterate);
                pj["radial_monotonicity"] = {{"defect", mono_u}, {"baseline", mono_base}};
                bool mono_applicable = sc.problem.a >= 0 && sc.problem.b >= 0;
                if (sc.data.kind == DataKind::RadialStep && sc.data.level2 > 1.0)
                    mono_applicable = false;  // increasing ring: precondition unmet
                pj["radial_monotonicity"]["applicable"] = mono_applicable;
                if (mono_applicable && mono_u > mono_base + sc.properties_monotonicity_tol)
                    throw TaskError("properties.monotonicity",
                                    "shell means gained an increment above the linear baseline");
            }
            if (sc.data.kind == DataKind::PureHomogeneous) {
                const HomogeneityReport hr = check_homogeneity(u, sc.problem, sc.properties_lambdas);
                pj["homogeneity"] = {{"lambdas", hr.lambdas},
                                     {"defects", hr.defects},
                                     {"max_defect", hr.max_defect}};
                if (hr.max_defect > sc.properties_homogeneity_max)
                    throw TaskError("properties.homogeneity",
                                    "scaling defect exceeds the configured maximum");
            }
            tasks_out["properties"] = pj;
        } else if (task == "decay") {
            const DecayFit f0 = fit_decay(solved->u, sc.problem, 0);
            const DecayFit f1 = fit_decay(solved->u, sc.problem, 1);
            tasks_out["decay"] = {
                {"kappa0", {{"slope", f0.slope}, {"target", f0.target}, {"stderr", f0.stderr_slope}}},
                {"kappa1", {{"slope", f1.slope}, {"target", f1.target}, {"stderr", f1.stderr_slope}}}};
            if (std::abs(f0.slope - f0.target) > sc.decay_tolerance * std::abs(f0.target))
                throw TaskError("decay.kappa0", "fitted slope misses the target beyond tolerance");
            if (std::abs(f1.slope - f1.target) > sc.decay_tolerance * std::abs(f1.target))
                throw TaskError("decay.kappa1", "fitted slope misses the target beyond tolerance");
        } else if (task == "energy") {
            const EnergyReport er = energy_check(solved->u, f, sc.problem);
            tasks_out["energy"] = {{"variant", er.variant}, {"lhs", er.lhs},
                                   {"f_norm", er.f_norm},   {"eta_term", er.eta_term},
                                   {"m_term", er.m_term},   {"ratio", er.ratio}};
            if (!std::isfinite(er.ratio))
                throw TaskError("energy.ratio", "energy ratio is not finite");
        } else if (task == "probe-testfunction") {
            std::vector<double> Rs = sc.probe_R_values;
            const double halfwidth =
                sc.probe_domain_halfwidth > 0 ? sc.probe_domain_halfwidth : sc.grid.L;
            if (Rs.empty()) {
                const double rmax = halfwidth * halfwidth / 2.0;
                for (int i = 0; i < 8; ++i) Rs.push_back(rmax * std::pow(10.0, -(7 - i) / 7.0));
            }
            const ProbeReport pr =
                testfunction_probe(sc.data, sc.problem, halfwidth, Rs, sc.probe_quad_points);
            const std::string path = sc.output_dir + "/probe_testfunction.csv";
            std::ofstream os(path);
            os.precision(17);
            os << "R,lhs,rhs,ratio\n";
            for (const auto& r : pr.rows) os << r.R << "," << r.lhs << "," << r.rhs << "," << r.lhs / r.rhs << "\n";
            tasks_out["probe-testfunction"] = {{"fitted_exponent", pr.fitted_exponent},
                                               {"stderr", pr.fit_stderr},
                                               {"target_exponent", pr.target_exponent},
                                               {"k_effective", pr.k_effective},
                                               {"k_threshold", pr.k_threshold},
                                               {"signal", pr.signal},
                                               {"csv", path}};
        } else if (task == "probe-halfball") {
            const HalfSpaceField& u =
                (solved && solved->trace.verdict == Verdict::Converged) ? solved->u : *first_iterate;
            std::vector<double> Rs = sc.probe_R_values;
            if (Rs.empty()) {
                const double rmax = 0.95 * std::min(sc.grid.L, sc.grid.T);
                for (int i = 0; i < 6; ++i) Rs.push_back(rmax * std::pow(2.0, -(5 - i) / 2.0));
            }
            const HalfballReport hr = halfball_probe(u, sc.problem, Rs);
            const std::string path = sc.output_dir + "/probe_halfball.csv";
            std::ofstream os(path);
            os.precision(17);
            os << "R,Q,bound\n";
            for (const auto& r : hr.rows) os << r.R << "," << r.Q << "," << r.bound << "\n";
            tasks_out["probe-halfball"] = {{"fitted_exponent", hr.fitted_exponent},
                                           {"stderr", hr.fit_stderr},
                                           {"target_exponent", hr.target_exponent},
                                           {"csv", path}};
        } else if (task == "threshold") {
            const ThresholdBracket br =
                threshold_search(sc.data, sc.problem, sc.grid, consts, sc.operators, sc.solver,
                                 sc.threshold_bracket_ratio);
            tasks_out["threshold"] = {{"converged_amplitude", br.converged_amplitude},
                                      {"diverged_amplitude", br.diverged_amplitude},
                                      {"open_ended", br.open_ended}};
        } else if (task == "linear-bounds") {
            std::vector<BoundaryField> corpus;
            for (double w : {0.7, 1.0, 1.6}) {
                BoundaryDataFamily fam;
                fam.kind = DataKind::Gaussian;
                fam.amplitude = 1.0;
                fam.width = w;
                corpus.push_back(fam.sample(sc.grid));
            }
            const auto rows = verify_linear_bounds(sc.problem, sc.grid, corpus, sc.operators);
            json lb = json::object();
            for (const auto& r : rows) {
                lb[r.estimate] = r.ratio;
                if (!std::isfinite(r.ratio))
                    throw TaskError("linear-bounds." + r.estimate, "empirical constant is not finite");
            }
            tasks_out["linear-bounds"] = lb;
        }
    }

    summary["status"] = "ok";
    } catch (const TaskError& e) {
        summary["status"] = "failed";
        summary["failed_invariant"] = e.invariant;
        summary["failure_message"] = e.what();
        res.exit_code = 1;
    }

    summary["tasks"] = tasks_out;
    res.summary = summary;
    std::ofstream os(sc.output_dir + "/summary.json");
    os << summary_to_string(summary);
    return res;
}

}  // namespace hslab
