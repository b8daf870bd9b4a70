#pragma once

#include <cstddef>
#include <vector>

#include "hslab/grid.hpp"
#include "hslab/model.hpp"

namespace hslab {

// Decreasing rearrangement of a sampled field: |values| sorted descending,
// piecewise constant over cumulative cell measure.
struct Rearrangement {
    std::vector<double> values;  // nonincreasing
    double cell_measure = 0.0;   // every sample carries the same measure
    double total_measure() const { return cell_measure * static_cast<double>(values.size()); }
    double total_integral() const;              // int f* ds = int |f| dmu
    double f_star(double s) const;               // value at measure s
    double f_star_star(double s) const;          // running average (1/s) int_0^s f*
};

double distribution_function(const std::vector<double>& values, double cell_measure, double tau);
Rearrangement decreasing_rearrangement(const std::vector<double>& values, double cell_measure);
double maximal_rearrangement(const Rearrangement& r, double s);

// Weak norm sup_s s^{1/p} f**(s); the supremum over each constant piece of
// f* is attained at a breakpoint, so the scan over prefixes is exact.
double weak_norm(const Rearrangement& r, double p);
// Quasi-norm sup_tau tau d_f(tau)^{1/p}.
double weak_quasinorm(const Rearrangement& r, double p);
// Equivalent open-set characterization restricted to super-level sets.
double weak_norm_superlevel(const Rearrangement& r, double p);
// ||f||_{L^{p,q}}; q = infinity handled by weak_norm. p must be > 1.
double lorentz_norm(const Rearrangement& r, double p, double q);

double lebesgue_norm(const std::vector<double>& values, double cell_measure, double p);

struct NormReport {
    double weighted_sup = 0.0;  // sup_t t^{(n+1)/q-1} ||u(.,t)||_inf
    double weak_qstar = 0.0;    // ||u||_{L^{q*,inf}}
    double grad_weak_q = 0.0;   // ||grad u||_{L^{q,inf}}
    double x_norm = 0.0;        // sum of the three components
    double q = 0.0;
    double q_star = 0.0;
    // Y-norm components (when produced by y_norm)
    double y_weighted_sup = 0.0;  // sup_t t^{(n+1)/p} ||F(.,t)||_inf
    double y_weak_p = 0.0;
    double y_norm_total = 0.0;
    double p = 0.0;
};

NormReport x_norm(const HalfSpaceField& u, const std::vector<HalfSpaceField>& grad_u, const Rational& q);
NormReport y_norm(const HalfSpaceField& F, const Rational& p);

// Lebesgue-based X^q norm (plain L^{q*} and L^q integrals), used by the
// energy estimates.
NormReport x_norm_lebesgue(const HalfSpaceField& u, const std::vector<HalfSpaceField>& grad_u,
                           const Rational& q);

// ||fg|| / (||f|| ||g||) for weak norms with 1/p = 1/p1 + 1/p2.
double holder_check(const BoundaryField& f, const BoundaryField& g, double p1, double p2);
double holder_check(const HalfSpaceField& f, const HalfSpaceField& g, double p1, double p2);

// Helpers shared by solver/analysis.
double sup_abs(const std::vector<double>& v);
std::vector<double> gradient_magnitude(const std::vector<HalfSpaceField>& grad);

}  // namespace hslab
