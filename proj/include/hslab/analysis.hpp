#pragma once

#include <string>
#include <vector>

#include "hslab/grid.hpp"
#include "hslab/kernels.hpp"
#include "hslab/lorentz.hpp"
#include "hslab/model.hpp"
#include "hslab/solver.hpp"

namespace hslab {

// ---------------------------------------------------------------------------
// Smooth cutoff machinery
// ---------------------------------------------------------------------------

// Quintic C^2 bridge: 1 on [0,1], 0 on [2,inf), monotone in between.
double cutoff_zeta(double s);
double cutoff_zeta_d(double s);
double cutoff_zeta_dd(double s);

// phi(x,t) = W((|x-c|^2 - ax^2)/(bx^2 - ax^2)) * W((t^2 - at^2)/(bt^2 - at^2))
// with W = (quintic bridge)^kappa: 1 inside the inner radius, 0 beyond the
// outer one. The even t-dependence makes d phi/dt(.,0) = 0 exactly. With
// kappa = 1 these are the residual test functions; with kappa = 2m/(m-1)
// and (ax, bx) = (sqrt(R), sqrt(2R)) they are the rescaled cutoffs of the
// nonexistence probe.
struct ProductCutoff {
    int n = 3;
    double ax = 1.0, bx = 2.0;  // inner/outer x radius
    double at = 1.0, bt = 2.0;  // inner/outer t extent
    double kappa = 1.0;
    std::vector<double> center;  // empty = origin

    static ProductCutoff probe_cutoff(int n, double R, double kappa);

    double value_x(const double* x) const;    // the x factor
    double value_t(double t) const;           // the t factor
    double value(const double* x, double t) const;
    double laplacian(const double* x, double t) const;  // Delta_x + d^2/dt^2
    double dt(const double* x, double t) const;
    double support_radius_x() const { return bx; }
    double support_radius_t() const { return bt; }
};

// ---------------------------------------------------------------------------
// Qualitative property checks (Theorem-style witnesses, reported as defects)
// ---------------------------------------------------------------------------

struct PositivityReport {
    bool applicable = false;  // preconditions: a,b >= 0, f >= 0, f > 0 somewhere
    double min_u = 0.0;
    bool pass = false;
};
PositivityReport check_positivity(const HalfSpaceField& u, const BoundaryField& f,
                                  const ProblemSpec& spec);

// max over rotations and t-levels of sup |u - u o R|; exact index
// permutation for signed-permutation matrices, interpolation otherwise
// (restricted to the inscribed ball).
double check_rotational_symmetry(const HalfSpaceField& u, const std::vector<std::vector<double>>& Rs);

// max positive increment of shell means, over t-levels.
double check_radial_monotonicity(const HalfSpaceField& u);

struct HomogeneityReport {
    std::vector<double> lambdas;
    std::vector<double> defects;  // relative masked X-norm of u - u_lambda
    double max_defect = 0.0;
};
HomogeneityReport check_homogeneity(const HalfSpaceField& u, const ProblemSpec& spec,
                                    const std::vector<double>& lambdas);

struct DecayFit {
    double slope = 0.0;
    double stderr_slope = 0.0;
    double target = 0.0;
    int points = 0;
};
// Least-squares slope of log sup_x |v(.,t)| against log t on [T/4, T].
// kappa = 0 fits u itself (target -2/(m-1)), kappa = 1 its gradient
// magnitude (target -2/(m-1)-1).
DecayFit fit_decay(const HalfSpaceField& u, const ProblemSpec& spec, int kappa);

struct EnergyReport {
    std::string variant;  // "weighted" (m = 1+4/n) or "dirichlet" (m = (n+3)/(n-1))
    double lhs = 0.0;
    double f_norm = 0.0;
    double eta_term = 0.0;
    double m_term = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};
EnergyReport energy_check(const HalfSpaceField& u, const BoundaryField& f, const ProblemSpec& spec);

// ---------------------------------------------------------------------------
// Distributional residual (integration-by-parts identity, measured signs)
// ---------------------------------------------------------------------------

struct DistributionalReport {
    std::vector<double> defects;  // per test function, |lhs-rhs| / scale
    double max_defect = 0.0;
};
DistributionalReport distributional_residual(const HalfSpaceField& u, const BoundaryField& f,
                                             const ProblemSpec& spec, const KernelConstants& consts,
                                             const std::vector<ProductCutoff>& test_functions);

// ---------------------------------------------------------------------------
// Nonexistence probes
// ---------------------------------------------------------------------------

struct ProbeRow {
    double R = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};
struct ProbeReport {
    std::vector<ProbeRow> rows;
    double m_prime = 0.0;
    double fitted_exponent = 0.0;  // slope of log(lhs/rhs) vs log R
    double fit_stderr = 0.0;
    double target_exponent = 0.0;  // (n-k)/2 + m' - (n+1)/2
    double k_effective = 0.0;
    double k_threshold = 0.0;      // (m+1)/(m-1)
    bool signal = false;           // fitted growth -> nonexistence witness
};
// Both integrals are quadratures of analytic integrands on a dedicated
// lattice; R must satisfy sqrt(2R) <= domain_halfwidth.
ProbeReport testfunction_probe(const BoundaryDataFamily& f, const ProblemSpec& spec,
                               double domain_halfwidth, const std::vector<double>& R_sweep,
                               int quad_points_per_axis = 96);

struct HalfballRow {
    double R = 0.0;
    double Q = 0.0;      // |B_R^+|^{2/((n+1)(m-1))-1} int_{B_R^+} u
    double bound = 0.0;  // R^{-(n-1)+2/(m-1)}
};
struct HalfballReport {
    std::vector<HalfballRow> rows;
    double fitted_exponent = 0.0;
    double fit_stderr = 0.0;
    double target_exponent = 0.0;  // -(n-1) + 2/(m-1)
};
HalfballReport halfball_probe(const HalfSpaceField& u, const ProblemSpec& spec,
                              const std::vector<double>& R_sweep);

// ---------------------------------------------------------------------------
// Discrete identity defects (consistency witnesses for the acceptance gate)
// ---------------------------------------------------------------------------

// sup |Delta_h u| over cells at distance >= margin_x from the x-faces and
// t in [margin_t, T - margin_t]; margins in physical units.
double harmonicity_defect(const HalfSpaceField& u, double margin_x, double margin_t);
// sup |Delta_h GF - sign * F| over the same region.
double green_identity_defect(const HalfSpaceField& GF, const HalfSpaceField& F, int sign,
                             double margin_x, double margin_t);

// Least-squares fit of y against x with slope standard error.
struct LineFit {
    double slope = 0.0, intercept = 0.0, stderr_slope = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Rotation of R^n in the (axis1, axis2) plane by angle theta (row-major).
std::vector<double> plane_rotation(int n, int axis1, int axis2, double theta);

}  // namespace hslab
