#pragma once

#include <vector>

#include "hslab/grid.hpp"
#include "hslab/kernels.hpp"
#include "hslab/potentials.hpp"

// Serial reference implementations of both potential operators: plain
// direct sums over the same sampled kernels as the FFT path. They are the
// oracle half of every FFT-vs-direct check and the baseline for the
// benchmark target. No OpenMP, no FFT, no cleverness.

namespace hslab::reference {

HalfSpaceField neumann_potential(const BoundaryField& f, const KernelConstants& consts);
std::vector<HalfSpaceField> neumann_potential_gradient(const BoundaryField& f,
                                                       const KernelConstants& consts);
HalfSpaceField green_potential(const HalfSpaceField& F, const KernelConstants& consts,
                               double singular_tol = 1e-10);
// Convolution with the analytic kernel gradient (principal value at the
// diagonal cell: only the mirror term contributes there). Coarse-grid
// cross-check for the finite-difference gradient.
std::vector<HalfSpaceField> green_potential_gradient_direct(const HalfSpaceField& F,
                                                            const KernelConstants& consts);

}  // namespace hslab::reference
