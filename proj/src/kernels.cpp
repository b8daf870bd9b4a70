#include "hslab/kernels.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hslab {

KernelConstants KernelConstants::base(int n) {
    if (n < 2) throw std::invalid_argument("kernels: n must be >= 2");
    KernelConstants c;
    c.n = n;
    const double pi_pow = std::pow(M_PI, 0.5 * (n + 1));
    c.beta_n = std::tgamma(0.5 * (n - 1)) / (2.0 * pi_pow);
    c.beta_printed = pi_pow * std::tgamma(0.5 * (n - 1));
    c.sigma_np1 = 2.0 * pi_pow / std::tgamma(0.5 * (n + 1));
    c.gamma_n = 1.0 / ((n - 1) * c.sigma_np1);
    return c;
}

double neumann_kernel(const double* x, int n, double t, const KernelConstants& c) {
    if (!(t > 0)) throw std::invalid_argument("neumann_kernel: t must be positive");
    double r2 = t * t;
    for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
    return c.beta_n * std::pow(r2, -0.5 * (n - 1));
}

void neumann_kernel_gradient(const double* x, int n, double t, const KernelConstants& c, double* out) {
    if (!(t > 0)) throw std::invalid_argument("neumann_kernel_gradient: t must be positive");
    double r2 = t * t;
    for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
    const double f = -(n - 1) * c.beta_n * std::pow(r2, -0.5 * (n + 1));
    for (int d = 0; d < n; ++d) out[d] = f * x[d];
    out[n] = f * t;
}

std::vector<double> reflect(std::vector<double> Y) {
    Y.back() = -Y.back();
    return Y;
}

namespace {

double dist2(const double* A, const double* B, int len) {
    double s = 0.0;
    for (int d = 0; d < len; ++d) {
        const double c = A[d] - B[d];
        s += c * c;
    }
    return s;
}

}  // namespace

double green_kernel(const double* X, const double* Y, int n, const KernelConstants& c) {
    double d2 = dist2(X, Y, n);
    double dt = X[n] - Y[n];
    const double direct = d2 + dt * dt;
    dt = X[n] + Y[n];
    const double mirror = d2 + dt * dt;
    if (direct == 0.0) throw std::invalid_argument("green_kernel: X == Y");
    const double e = -0.5 * (n - 1);
    return c.gamma_n * (std::pow(direct, e) + std::pow(mirror, e));
}

void green_kernel_gradient_x(const double* X, const double* Y, int n, const KernelConstants& c,
                             double* out) {
    const double d2 = dist2(X, Y, n);
    const double dtd = X[n] - Y[n];
    const double dtm = X[n] + Y[n];
    const double rd2 = d2 + dtd * dtd;
    const double rm2 = d2 + dtm * dtm;
    if (rd2 == 0.0) throw std::invalid_argument("green_kernel_gradient_x: X == Y");
    const double fd = -(n - 1) * c.gamma_n * std::pow(rd2, -0.5 * (n + 1));
    const double fm = -(n - 1) * c.gamma_n * std::pow(rm2, -0.5 * (n + 1));
    for (int d = 0; d < n; ++d) out[d] = (fd + fm) * (X[d] - Y[d]);
    out[n] = fd * dtd + fm * dtm;
}

double riesz_kernel(const double* Z, int n, const KernelConstants& c) {
    double r2 = 0.0;
    for (int d = 0; d <= n; ++d) r2 += Z[d] * Z[d];
    if (r2 == 0.0) throw std::invalid_argument("riesz_kernel: Z == 0");
    return c.gamma_n * std::pow(r2, -0.5 * (n - 1));
}

namespace {

// int over the orthant box [0,a_1] x ... x [0,a_d] of |Z|^{1-n}, d = n+1.
// Duffy decomposition into d pyramids (split by which z_j/a_j is largest)
// makes the radial factor integrate in closed form and leaves a smooth
// integrand on the unit cube, handled by tensor Gauss-Legendre.
double riesz_orthant_integral(int n, const std::vector<double>& a, int pts) {
    const int d = n + 1;
    std::vector<double> gx(pts), gw(pts);
    // Gauss-Legendre nodes on [0,1] by Newton iteration on Legendre P_pts
    for (int i = 0; i < pts; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (pts + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= pts; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = pts * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= pts; ++k) {
            const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = pts * (x * p1 - p0) / (x * x - 1.0);
        gx[i] = 0.5 * (x + 1.0);
        gw[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }

    double vol = 1.0;
    for (int j = 0; j < d; ++j) vol *= a[j];

    double total = 0.0;
    std::vector<int> iu(d - 1, 0);
    for (int k = 0; k < d; ++k) {
        // pyramid where z_k = a_k sigma dominates; u_j in [0,1] for j != k
        double acc = 0.0;
        std::fill(iu.begin(), iu.end(), 0);
        while (true) {
            double w = 1.0, s = a[k] * a[k];
            int uj = 0;
            for (int j = 0; j < d; ++j) {
                if (j == k) continue;
                const double u = gx[iu[uj]];
                w *= gw[iu[uj]];
                s += a[j] * a[j] * u * u;
                ++uj;
            }
            acc += w * std::pow(s, 0.5 * (1 - n));
            int carry = 0;
            while (carry < d - 1 && ++iu[carry] == pts) {
                iu[carry] = 0;
                ++carry;
            }
            if (carry == d - 1) break;
        }
        total += 0.5 * vol * acc;  // int_0^1 sigma dsigma = 1/2
    }
    return total;
}

}  // namespace

double riesz_singular_cell_average(int n, double hx, double ht, const KernelConstants& c, double tol) {
    std::vector<double> a(n + 1, 0.5 * hx);
    a[n] = 0.5 * ht;
    // 16-point tensor Gauss is far below 1e-10 already; bump if asked for more
    const int pts = tol < 1e-12 ? 24 : 16;
    const double integral = (1 << (n + 1)) * riesz_orthant_integral(n, a, pts);
    double vol = hx;
    for (int d = 1; d < n; ++d) vol *= hx;
    vol *= ht;
    return c.gamma_n * integral / vol;
}

// The sign calibration needs the potential operators; it lives in
// potentials.cpp and fills this cache.
namespace detail {
std::map<int, KernelConstants>& constants_cache() {
    static std::map<int, KernelConstants> cache;
    return cache;
}
std::mutex& constants_mutex() {
    static std::mutex m;
    return m;
}
KernelConstants measure_signs(int n);  // defined in potentials.cpp
}  // namespace detail

const KernelConstants& KernelConstants::calibrated(int n) {
    std::lock_guard<std::mutex> lock(detail::constants_mutex());
    auto& cache = detail::constants_cache();
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::measure_signs(n)).first;
    return it->second;
}

}  // namespace hslab
