#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hslab/fft.hpp"
#include "hslab/grid.hpp"
#include "hslab/kernels.hpp"
#include "hslab/lorentz.hpp"
#include "hslab/model.hpp"

namespace hslab {

enum class OperatorPath { Fft, DirectOracle };

struct OperatorConfig {
    OperatorPath path = OperatorPath::Fft;
    int padding = 2;                 // zero-padding factor, >= 2 (no wrap-around)
    double singular_tol = 1e-10;     // tolerance of the singular-cell average
    bool symmetrize = false;         // orbit-average outputs over lattice rotations

    void validate() const;
};

// Boundary-to-bulk operator Nf(.,t) = K_t * f, one x-convolution per t-level.
// Kernel slices are sampled at cell centers (K_t is smooth for t > 0) and
// their transforms are cached, so repeated applications inside the Picard
// loop cost one forward and nt inverse FFTs.
class NeumannOperator {
public:
    NeumannOperator(const GridSpec& grid, const KernelConstants& consts, const OperatorConfig& cfg);
    ~NeumannOperator();

    HalfSpaceField apply(const BoundaryField& f) const;
    // Components 0..n-1 are x-derivatives, n is the t-derivative.
    std::vector<HalfSpaceField> apply_gradient(const BoundaryField& f) const;
    // Single gradient component (t-derivative for delta recovery).
    HalfSpaceField apply_gradient_component(const BoundaryField& f, int component) const;

    const GridSpec& grid() const { return grid_; }
    const KernelConstants& constants() const { return consts_; }

    struct Impl;

private:
    GridSpec grid_;
    KernelConstants consts_;
    OperatorConfig cfg_;
    std::unique_ptr<Impl> impl_;
};

// Green potential GF = order-2 Riesz potential of the even t-extension,
// restricted to t > 0. One (n+1)-dimensional FFT convolution; the cell at
// the kernel singularity carries its exact average.
class GreenOperator {
public:
    GreenOperator(const GridSpec& grid, const KernelConstants& consts, const OperatorConfig& cfg);
    ~GreenOperator();

    HalfSpaceField apply(const HalfSpaceField& F) const;
    const GridSpec& grid() const { return grid_; }
    double singular_cell_average() const;

    struct Impl;

private:
    GridSpec grid_;
    KernelConstants consts_;
    OperatorConfig cfg_;
    std::unique_ptr<Impl> impl_;
};

// Gradient of GF by finite differences (centered interior, one-sided at
// faces). The direct convolution with the analytic kernel gradient lives in
// the reference oracle for cross-checks.
std::vector<HalfSpaceField> green_potential_gradient(const HalfSpaceField& GF);

struct LinearBoundRow {
    std::string estimate;  // which bound
    double ratio;          // max over corpus and t-levels of lhs / rhs(C=1)
};

// Empirical constants of the slice decay, bulk, and gradient estimates for
// the operator N on a corpus of boundary fields, at the exponents the
// contraction argument uses.
std::vector<LinearBoundRow> verify_linear_bounds(const ProblemSpec& spec, const GridSpec& grid,
                                                 const std::vector<BoundaryField>& corpus,
                                                 const OperatorConfig& cfg);

// sup-distance of orientation_sign * dN f/dt at the first t-level from f.
double delta_recovery_error(const BoundaryField& f, const KernelConstants& consts,
                            const OperatorConfig& cfg, double beta_override = 0.0);

}  // namespace hslab
