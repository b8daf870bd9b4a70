#include "hslab/reference.hpp"

#include <cmath>
#include <vector>

namespace hslab::reference {

// Direct summation over the same cell-center kernel samples as the FFT
// path; the two must agree to rounding.

HalfSpaceField neumann_potential(const BoundaryField& f, const KernelConstants& consts) {
    const GridSpec& g = f.grid;
    HalfSpaceField out(g);
    const std::size_t cells = g.boundary_cells();
    const double hx = g.hx();
    const double mu = g.cell_measure_boundary();
    std::vector<int> idx(g.n), kdx(g.n);
    for (int j = 0; j < g.nt; ++j) {
        const double t = g.t_level(j);
        double* o = out.slice(j);
        for (std::size_t i = 0; i < cells; ++i) {
            decode_boundary(g, i, idx.data());
            double acc = 0.0;
            for (std::size_t k = 0; k < cells; ++k) {
                decode_boundary(g, k, kdx.data());
                long long sq = 0;
                for (int d = 0; d < g.n; ++d) {
                    const long long dd = idx[d] - kdx[d];
                    sq += dd * dd;
                }
                const double r2 = hx * hx * static_cast<double>(sq) + t * t;
                acc += std::pow(r2, -0.5 * (g.n - 1)) * f.v[k];
            }
            o[i] = consts.beta_n * acc * mu;
        }
    }
    return out;
}

std::vector<HalfSpaceField> neumann_potential_gradient(const BoundaryField& f,
                                                       const KernelConstants& consts) {
    const GridSpec& g = f.grid;
    std::vector<HalfSpaceField> grad(g.n + 1, HalfSpaceField(g));
    const std::size_t cells = g.boundary_cells();
    const double hx = g.hx();
    const double mu = g.cell_measure_boundary();
    std::vector<int> idx(g.n), kdx(g.n);
    std::vector<double> acc(g.n + 1);
    for (int j = 0; j < g.nt; ++j) {
        const double t = g.t_level(j);
        for (std::size_t i = 0; i < cells; ++i) {
            decode_boundary(g, i, idx.data());
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t k = 0; k < cells; ++k) {
                decode_boundary(g, k, kdx.data());
                long long sq = 0;
                for (int d = 0; d < g.n; ++d) {
                    const long long dd = idx[d] - kdx[d];
                    sq += dd * dd;
                }
                const double r2 = hx * hx * static_cast<double>(sq) + t * t;
                const double fac = -(g.n - 1) * consts.beta_n * std::pow(r2, -0.5 * (g.n + 1)) * f.v[k];
                for (int d = 0; d < g.n; ++d) acc[d] += fac * (idx[d] - kdx[d]) * hx;
                acc[g.n] += fac * t;
            }
            for (int c = 0; c <= g.n; ++c) grad[c].slice(j)[i] = acc[c] * mu;
        }
    }
    return grad;
}

HalfSpaceField green_potential(const HalfSpaceField& F, const KernelConstants& consts,
                               double singular_tol) {
    const GridSpec& g = F.grid;
    const EvenExtension E = even_extension(F);
    HalfSpaceField out(g);
    const std::size_t cells = g.boundary_cells();
    const double hx = g.hx(), ht = g.ht();
    const double mu = g.cell_measure_bulk();
    const double sing = riesz_singular_cell_average(g.n, hx, ht, consts, singular_tol);
    std::vector<int> idx(g.n), kdx(g.n);
    for (int j = 0; j < g.nt; ++j) {
        double* o = out.slice(j);
        const int slot_i = g.nt + j;
        for (std::size_t i = 0; i < cells; ++i) {
            decode_boundary(g, i, idx.data());
            double acc = 0.0;
            for (int s = 0; s < 2 * g.nt; ++s) {
                const long long dt = slot_i - s;
                const double* src = E.v.data() + static_cast<std::size_t>(s) * cells;
                for (std::size_t k = 0; k < cells; ++k) {
                    decode_boundary(g, k, kdx.data());
                    long long sq = 0;
                    for (int d = 0; d < g.n; ++d) {
                        const long long dd = idx[d] - kdx[d];
                        sq += dd * dd;
                    }
                    const double r2 =
                        hx * hx * static_cast<double>(sq) + ht * ht * static_cast<double>(dt * dt);
                    const double kv =
                        (r2 == 0.0) ? sing : consts.gamma_n * std::pow(r2, -0.5 * (g.n - 1));
                    acc += kv * src[k];
                }
            }
            o[i] = acc * mu;
        }
    }
    return out;
}

std::vector<HalfSpaceField> green_potential_gradient_direct(const HalfSpaceField& F,
                                                            const KernelConstants& consts) {
    const GridSpec& g = F.grid;
    std::vector<HalfSpaceField> grad(g.n + 1, HalfSpaceField(g));
    const std::size_t cells = g.boundary_cells();
    const double mu = g.cell_measure_bulk();
    const std::vector<double> xs = g.x_coords();
    std::vector<int> idx(g.n), kdx(g.n);
    std::vector<double> X(g.n + 1), Y(g.n + 1), dG(g.n + 1), acc(g.n + 1);
    for (int j = 0; j < g.nt; ++j) {
        X[g.n] = g.t_level(j);
        for (std::size_t i = 0; i < cells; ++i) {
            decode_boundary(g, i, idx.data());
            for (int d = 0; d < g.n; ++d) X[d] = xs[idx[d]];
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int js = 0; js < g.nt; ++js) {
                Y[g.n] = g.t_level(js);
                const double* src = F.slice(js);
                for (std::size_t k = 0; k < cells; ++k) {
                    decode_boundary(g, k, kdx.data());
                    for (int d = 0; d < g.n; ++d) Y[d] = xs[kdx[d]];
                    if (js == j && k == i) {
                        // principal value: the direct term vanishes by odd
                        // symmetry over the cell, the mirror term stays
                        const double dtm = X[g.n] + Y[g.n];
                        double rm2 = dtm * dtm;
                        const double fm =
                            -(g.n - 1) * consts.gamma_n * std::pow(rm2, -0.5 * (g.n + 1));
                        acc[g.n] += fm * dtm * src[k];
                        continue;
                    }
                    green_kernel_gradient_x(X.data(), Y.data(), g.n, consts, dG.data());
                    for (int c = 0; c <= g.n; ++c) acc[c] += dG[c] * src[k];
                }
            }
            for (int c = 0; c <= g.n; ++c) grad[c].slice(j)[i] = acc[c] * mu;
        }
    }
    return grad;
}

}  // namespace hslab::reference
