#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace hslab {

// Dimensional constants of the half-space kernels. beta_n uses the
// delta-recovery normalization beta(n) = Gamma((n-1)/2) / (2 pi^{(n+1)/2}),
// which is the unique choice for which d/dt of the boundary kernel
// integrates to -1 as t -> 0 (measured by the calibration below). The
// printed constant pi^{(n+1)/2} Gamma((n-1)/2) fails that test by orders of
// magnitude; kernels keep it around as `beta_printed` for the documented
// discrepancy check.
struct KernelConstants {
    int n = 3;
    double beta_n = 0.0;
    double beta_printed = 0.0;
    double sigma_np1 = 0.0;  // surface area of the unit sphere in R^{n+1}
    double gamma_n = 0.0;    // 1 / ((n-1) sigma_{n+1})
    int orientation_sign = 0;  // sign s with s * d/dt Nf -> f at the boundary
    int green_sign = 0;        // sign s with discrete Laplacian of GF = s * F

    static KernelConstants base(int n);  // analytic fields only, signs unset
    // Measures both signs on a small internal grid; cached per n.
    static const KernelConstants& calibrated(int n);
};

double neumann_kernel(const double* x, int n, double t, const KernelConstants& c);
// Gradient in (x, t); out must hold n+1 entries.
void neumann_kernel_gradient(const double* x, int n, double t, const KernelConstants& c, double* out);

// Reflection across {t = 0}; last coordinate is t.
template <std::size_t N>
std::array<double, N> reflect(const std::array<double, N>& Y) {
    std::array<double, N> r = Y;
    r[N - 1] = -r[N - 1];
    return r;
}
std::vector<double> reflect(std::vector<double> Y);

// G(X,Y) = gamma_n [ |X-Y|^{1-n} + |X-Y*|^{1-n} ], points given as (x..., t).
double green_kernel(const double* X, const double* Y, int n, const KernelConstants& c);
void green_kernel_gradient_x(const double* X, const double* Y, int n, const KernelConstants& c,
                             double* out);  // n+1 entries

// Order-2 Riesz kernel on R^{n+1} normalized so that
// riesz(X-Y) + riesz(X-Y*) reproduces green_kernel exactly.
double riesz_kernel(const double* Z, int n, const KernelConstants& c);

// Exact cell average of the Riesz kernel over the box
// [-hx/2,hx/2]^n x [-ht/2,ht/2] centered at the singularity, by adaptive
// subdivision to the requested tolerance.
double riesz_singular_cell_average(int n, double hx, double ht, const KernelConstants& c,
                                   double tol = 1e-10);

}  // namespace hslab
