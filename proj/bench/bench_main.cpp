// Timing comparison of the OpenMP/FFT production paths against the serial
// direct-sum reference on a small grid.

#include <omp.h>

#include <chrono>
#include <cstdio>

#include "hslab/potentials.hpp"
#include "hslab/reference.hpp"

using namespace hslab;
using clock_type = std::chrono::steady_clock;

static double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

int main() {
    GridSpec g;
    g.n = 3;
    g.L = 4.0;
    g.nx = 12;
    g.T = 2.0;
    g.nt = 6;
    const KernelConstants& consts = KernelConstants::calibrated(3);
    OperatorConfig cfg;

    BoundaryDataFamily fam;
    fam.kind = DataKind::Gaussian;
    fam.width = 1.0;
    BoundaryField f = fam.sample(g);

    std::printf("grid %d^%d x %d, %d OpenMP threads\n", g.nx, g.n, g.nt, omp_get_max_threads());

    auto t0 = clock_type::now();
    NeumannOperator N(g, consts, cfg);
    HalfSpaceField u_fft = N.apply(f);
    const double t_fft = seconds_since(t0);

    t0 = clock_type::now();
    HalfSpaceField u_ref = reference::neumann_potential(f, consts);
    const double t_ref = seconds_since(t0);

    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < u_fft.v.size(); ++i) {
        err = std::max(err, std::abs(u_fft.v[i] - u_ref.v[i]));
        scale = std::max(scale, std::abs(u_ref.v[i]));
    }
    std::printf("neumann: fft+omp %.4fs (incl. kernel transforms), serial direct %.4fs, "
                "rel agreement %.2e\n",
                t_fft, t_ref, err / scale);

    t0 = clock_type::now();
    GreenOperator G(g, consts, cfg);
    HalfSpaceField gf_fft = G.apply(u_fft);
    const double tg_fft = seconds_since(t0);

    t0 = clock_type::now();
    HalfSpaceField gf_ref = reference::green_potential(u_fft, consts);
    const double tg_ref = seconds_since(t0);

    err = scale = 0.0;
    for (std::size_t i = 0; i < gf_fft.v.size(); ++i) {
        err = std::max(err, std::abs(gf_fft.v[i] - gf_ref.v[i]));
        scale = std::max(scale, std::abs(gf_ref.v[i]));
    }
    std::printf("green:   fft+omp %.4fs (incl. kernel transform),  serial direct %.4fs, "
                "rel agreement %.2e\n",
                tg_fft, tg_ref, err / scale);
    return 0;
}
