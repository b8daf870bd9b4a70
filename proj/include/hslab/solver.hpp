#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hslab/grid.hpp"
#include "hslab/lorentz.hpp"
#include "hslab/model.hpp"
#include "hslab/potentials.hpp"

namespace hslab {

struct SolverConfig {
    double tol = 1e-6;              // relative X-norm stopping tolerance
    int max_iter = 100;
    double divergence_factor = 1e6;  // diverged when ||u_j|| exceeds this times ||u_1||
    int divergence_streak = 5;       // or when the norm grows this many times in a row

    void validate() const;
};

enum class Verdict { Converged, Diverged, MaxIter };
std::string verdict_name(Verdict v);

struct IterationRecord {
    int iteration = 0;
    double x_norm = 0.0;       // ||u_j||
    double diff_norm = 0.0;    // ||w_j|| = ||u_{j+1} - u_j|| (0 for the first row)
    double ratio = 0.0;        // ||w_j|| / ||w_{j-1}||
    double secondary_norm = 0.0;  // optional X^{(n+1)p0/n} norm of w_j
};

struct IterationTrace {
    std::vector<IterationRecord> rows;
    Verdict verdict = Verdict::MaxIter;
    double final_relative_diff = 0.0;
    double fitted_decay_factor = 0.0;  // geometric factor of ||w_j|| (0 if < 2 diffs)
    bool has_secondary = false;
    double secondary_q = 0.0;
};

// Operator bundle reused across iterations (kernel transforms are cached).
struct PicardOperators {
    NeumannOperator N;
    GreenOperator G;
    PicardOperators(const GridSpec& g, const KernelConstants& c, const OperatorConfig& cfg)
        : N(g, c, cfg), G(g, c, cfg) {}
};

// One application of P u = N[b N_eta(trace u) + 0] + G[a N_m(u)] + N f,
// with N f supplied precomputed (it is the fixed first iterate).
HalfSpaceField picard_map(const HalfSpaceField& u, const HalfSpaceField& Nf,
                          const ProblemSpec& spec, const PicardOperators& ops);

struct SolveResult {
    HalfSpaceField u;
    IterationTrace trace;
};

SolveResult picard_solve(const BoundaryField& f, const ProblemSpec& spec, const GridSpec& grid,
                         const KernelConstants& consts, const OperatorConfig& opcfg,
                         const SolverConfig& scfg,
                         const std::optional<HalfSpaceField>& init = std::nullopt,
                         const std::optional<Rational>& secondary_p0 = std::nullopt);

// X-norm report of u - P u, plus the relative size.
struct ResidualReport {
    NormReport norm;
    double relative = 0.0;
};
ResidualReport residual(const HalfSpaceField& u, const BoundaryField& f, const ProblemSpec& spec,
                        const PicardOperators& ops);

struct ThresholdBracket {
    double converged_amplitude = 0.0;   // largest amplitude that converged
    double diverged_amplitude = 0.0;    // smallest amplitude that diverged (0 if none found)
    bool open_ended = false;            // no divergence below the search cap
};

// Bisection in amplitude on a unit-normalized data family.
ThresholdBracket threshold_search(const BoundaryDataFamily& shape, const ProblemSpec& spec,
                                  const GridSpec& grid, const KernelConstants& consts,
                                  const OperatorConfig& opcfg, const SolverConfig& scfg,
                                  double bracket_ratio = 1.1, double amplitude_cap = 1e6);

IterationTrace higher_integrability_trace(const BoundaryField& f, const Rational& p0,
                                          const ProblemSpec& spec, const GridSpec& grid,
                                          const KernelConstants& consts, const OperatorConfig& opcfg,
                                          const SolverConfig& scfg);

// |v|^{e-1} v applied in place.
void signed_power(std::vector<double>& v, double e);

}  // namespace hslab
