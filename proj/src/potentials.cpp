#include "hslab/potentials.hpp"

#include <omp.h>

#include <algorithm>
#include <complex>
#include <cstring>
#include <cmath>
#include <stdexcept>

#include "hslab/parallel.hpp"
#include "hslab/reference.hpp"

namespace hslab {

void OperatorConfig::validate() const {
    if (padding < 2) throw std::invalid_argument("operators: padding factor must be >= 2");
    if (!(singular_tol > 0)) throw std::invalid_argument("operators: singular_tol must be positive");
}

namespace {

// Padded lattice bookkeeping. Index a in [0,P) encodes the offset
// delta = a for a < P/2 and delta = a - P otherwise.
inline long long offset_of(int a, int P) { return a < P / 2 ? a : a - P; }

struct PaddedLattice {
    int rank = 0;                  // number of axes, slowest first
    std::vector<int> dims;         // FFTW order (slowest..fastest)
    std::vector<std::size_t> stride;  // stride per axis, same order
    std::size_t total = 1;

    explicit PaddedLattice(std::vector<int> d) : rank(static_cast<int>(d.size())), dims(std::move(d)) {
        stride.assign(rank, 1);
        for (int i = rank - 2; i >= 0; --i)
            stride[i] = stride[i + 1] * static_cast<std::size_t>(dims[i + 1]);
        for (int i = 0; i < rank; ++i) total *= static_cast<std::size_t>(dims[i]);
    }
};

void complex_multiply(const fftw_complex* a, const std::complex<double>* b, fftw_complex* out,
                      std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const double re = a[i][0] * b[i].real() - a[i][1] * b[i].imag();
        const double im = a[i][0] * b[i].imag() + a[i][1] * b[i].real();
        out[i][0] = re;
        out[i][1] = im;
    }
}

std::vector<std::complex<double>> copy_complex(const fftw_complex* src, std::size_t n) {
    std::vector<std::complex<double>> out(n);
    std::memcpy(out.data(), src, n * sizeof(fftw_complex));
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Neumann operator
// ---------------------------------------------------------------------------

struct NeumannOperator::Impl {
    PaddedLattice lat;           // rank n, dims 2nx each
    Transform tf;
    std::vector<std::vector<std::complex<double>>> khat;  // per t-level kernel transform
    // gradient kernels, built on first use; [component][level]
    mutable std::vector<std::vector<std::vector<std::complex<double>>>> ghat;
    mutable std::vector<bool> ghat_ready;
    std::vector<FftBuffers> scratch;  // one per OpenMP thread

    Impl(std::vector<int> dims)
        : lat(dims), tf(dims) {}
};

namespace {

// copy a boundary-lattice array into the corner of the padded lattice
void pad_boundary(const GridSpec& g, const double* src, const PaddedLattice& lat, double* dst) {
    std::fill(dst, dst + lat.total, 0.0);
    const std::size_t cells = g.boundary_cells();
#pragma omp parallel for schedule(static)
    for (long long fl = 0; fl < static_cast<long long>(cells); ++fl) {
        int idx[8];
        decode_boundary(g, static_cast<std::size_t>(fl), idx);
        // field axis d is FFTW axis rank-1-d (x0 fastest = last)
        std::size_t p = 0;
        for (int d = 0; d < g.n; ++d) p += static_cast<std::size_t>(idx[d]) * lat.stride[g.n - 1 - d];
        dst[p] = src[fl];
    }
}

void extract_boundary(const GridSpec& g, const double* src, const PaddedLattice& lat, double* dst,
                      double scale) {
    const std::size_t cells = g.boundary_cells();
#pragma omp parallel for schedule(static)
    for (long long fl = 0; fl < static_cast<long long>(cells); ++fl) {
        int idx[8];
        decode_boundary(g, static_cast<std::size_t>(fl), idx);
        std::size_t p = 0;
        for (int d = 0; d < g.n; ++d) p += static_cast<std::size_t>(idx[d]) * lat.stride[g.n - 1 - d];
        dst[fl] = src[p] * scale;
    }
}

}  // namespace

NeumannOperator::NeumannOperator(const GridSpec& grid, const KernelConstants& consts,
                                 const OperatorConfig& cfg)
    : grid_(grid), consts_(consts), cfg_(cfg) {
    grid_.validate();
    cfg_.validate();
    if (consts_.n != grid_.n) throw std::invalid_argument("neumann: constants/grid dimension mismatch");
    std::vector<int> dims(grid_.n, cfg_.padding * grid_.nx);
    impl_ = std::make_unique<Impl>(dims);
    const int nthreads = std::max(1, omp_get_max_threads());
    for (int i = 0; i < nthreads; ++i) impl_->scratch.emplace_back(impl_->tf.make_buffers());
    impl_->ghat.resize(grid_.n + 1);
    impl_->ghat_ready.assign(grid_.n + 1, false);

    // kernel slice transforms
    const double hx = grid_.hx();
    impl_->khat.resize(grid_.nt);
    FftBuffers work = impl_->tf.make_buffers();
    for (int j = 0; j < grid_.nt; ++j) {
        const double t = grid_.t_level(j);
        const PaddedLattice& lat = impl_->lat;
#pragma omp parallel for schedule(static)
        for (long long p = 0; p < static_cast<long long>(lat.total); ++p) {
            std::size_t rem = static_cast<std::size_t>(p);
            long long sq = 0;
            for (int ax = 0; ax < lat.rank; ++ax) {
                const int a = static_cast<int>(rem / lat.stride[ax]);
                rem %= lat.stride[ax];
                const long long d = offset_of(a, lat.dims[ax]);
                sq += d * d;
            }
            const double r2 = hx * hx * static_cast<double>(sq) + t * t;
            work.real[p] = consts_.beta_n * std::pow(r2, -0.5 * (grid_.n - 1));
        }
        impl_->tf.forward(work);
        impl_->khat[j] = copy_complex(work.cplx, impl_->tf.cplx_size());
    }
}

NeumannOperator::~NeumannOperator() = default;

namespace {

// shared apply loop: convolve fhat with per-level kernels
void neumann_convolve(const NeumannOperator& op, const GridSpec& g, NeumannOperator::Impl& impl,
                      const std::vector<std::complex<double>>& fhat,
                      const std::vector<std::vector<std::complex<double>>>& kernels,
                      HalfSpaceField& out, bool symmetrize) {
    const double scale = g.cell_measure_boundary() / static_cast<double>(impl.lat.total);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.nt; ++j) {
        FftBuffers& sb = impl.scratch[omp_get_thread_num()];
        const std::size_t cs = impl.tf.cplx_size();
        const std::complex<double>* kh = kernels[j].data();
        for (std::size_t i = 0; i < cs; ++i) {
            const std::complex<double> v = fhat[i] * kh[i];
            sb.cplx[i][0] = v.real();
            sb.cplx[i][1] = v.imag();
        }
        impl.tf.backward(sb);
        extract_boundary(g, sb.real, impl.lat, out.slice(j), scale);
    }
    if (symmetrize) symmetrize_lattice(out);
    (void)op;
}

}  // namespace

HalfSpaceField NeumannOperator::apply(const BoundaryField& f) const {
    if (!(f.grid == grid_)) throw std::invalid_argument("neumann: field grid mismatch");
    FftBuffers& b0 = impl_->scratch[0];
    pad_boundary(grid_, f.v.data(), impl_->lat, b0.real);
    impl_->tf.forward(b0);
    const std::vector<std::complex<double>> fhat = copy_complex(b0.cplx, impl_->tf.cplx_size());
    HalfSpaceField out(grid_);
    neumann_convolve(*this, grid_, *impl_, fhat, impl_->khat, out, cfg_.symmetrize);
    return out;
}

namespace {

void build_gradient_kernels(const GridSpec& g, const KernelConstants& consts,
                            NeumannOperator::Impl& impl, int comp) {
    const double hx = g.hx();
    impl.ghat[comp].resize(g.nt);
    FftBuffers work = impl.tf.make_buffers();
    for (int j = 0; j < g.nt; ++j) {
        const double t = g.t_level(j);
        const PaddedLattice& lat = impl.lat;
#pragma omp parallel for schedule(static)
        for (long long p = 0; p < static_cast<long long>(lat.total); ++p) {
            std::size_t rem = static_cast<std::size_t>(p);
            long long sq = 0;
            long long dcomp = 0;
            for (int ax = 0; ax < lat.rank; ++ax) {
                const int a = static_cast<int>(rem / lat.stride[ax]);
                rem %= lat.stride[ax];
                const long long d = offset_of(a, lat.dims[ax]);
                sq += d * d;
                // field axis of FFTW axis ax is rank-1-ax
                if (lat.rank - 1 - ax == comp) dcomp = d;
            }
            const double r2 = hx * hx * static_cast<double>(sq) + t * t;
            const double fac = -(g.n - 1) * consts.beta_n * std::pow(r2, -0.5 * (g.n + 1));
            const double coord = comp < g.n ? static_cast<double>(dcomp) * hx : t;
            work.real[p] = fac * coord;
        }
        impl.tf.forward(work);
        impl.ghat[comp][j] = copy_complex(work.cplx, impl.tf.cplx_size());
    }
    impl.ghat_ready[comp] = true;
}

}  // namespace

HalfSpaceField NeumannOperator::apply_gradient_component(const BoundaryField& f, int comp) const {
    if (comp < 0 || comp > grid_.n) throw std::invalid_argument("neumann: bad gradient component");
    if (!impl_->ghat_ready[comp]) build_gradient_kernels(grid_, consts_, *impl_, comp);
    FftBuffers& b0 = impl_->scratch[0];
    pad_boundary(grid_, f.v.data(), impl_->lat, b0.real);
    impl_->tf.forward(b0);
    const std::vector<std::complex<double>> fhat = copy_complex(b0.cplx, impl_->tf.cplx_size());
    HalfSpaceField out(grid_);
    neumann_convolve(*this, grid_, *impl_, fhat, impl_->ghat[comp], out, cfg_.symmetrize);
    return out;
}

std::vector<HalfSpaceField> NeumannOperator::apply_gradient(const BoundaryField& f) const {
    std::vector<HalfSpaceField> grad;
    grad.reserve(grid_.n + 1);
    for (int c = 0; c <= grid_.n; ++c) grad.push_back(apply_gradient_component(f, c));
    return grad;
}

// ---------------------------------------------------------------------------
// Green operator
// ---------------------------------------------------------------------------

struct GreenOperator::Impl {
    PaddedLattice lat;  // rank n+1: [t, x_{n-1}, .., x_0]
    Transform tf;
    std::vector<std::complex<double>> khat;
    FftBuffers work;
    double singular_avg = 0.0;

    Impl(std::vector<int> dims) : lat(dims), tf(dims), work(tf.make_buffers()) {}
};

GreenOperator::GreenOperator(const GridSpec& grid, const KernelConstants& consts,
                             const OperatorConfig& cfg)
    : grid_(grid), consts_(consts), cfg_(cfg) {
    grid_.validate();
    cfg_.validate();
    if (consts_.n != grid_.n) throw std::invalid_argument("green: constants/grid dimension mismatch");
    std::vector<int> dims(grid_.n + 1, cfg_.padding * grid_.nx);
    dims[0] = cfg_.padding * 2 * grid_.nt;  // even extension doubles the t-range
    impl_ = std::make_unique<Impl>(dims);

    const double hx = grid_.hx(), ht = grid_.ht();
    impl_->singular_avg = riesz_singular_cell_average(grid_.n, hx, ht, consts_, cfg_.singular_tol);
    const PaddedLattice& lat = impl_->lat;
    FftBuffers& work = impl_->work;
#pragma omp parallel for schedule(static)
    for (long long p = 0; p < static_cast<long long>(lat.total); ++p) {
        std::size_t rem = static_cast<std::size_t>(p);
        long long sq = 0, dt = 0;
        for (int ax = 0; ax < lat.rank; ++ax) {
            const int a = static_cast<int>(rem / lat.stride[ax]);
            rem %= lat.stride[ax];
            const long long d = offset_of(a, lat.dims[ax]);
            if (ax == 0)
                dt = d;
            else
                sq += d * d;
        }
        const double r2 = hx * hx * static_cast<double>(sq) + ht * ht * static_cast<double>(dt * dt);
        work.real[p] = (r2 == 0.0) ? impl_->singular_avg
                                   : consts_.gamma_n * std::pow(r2, -0.5 * (grid_.n - 1));
    }
    impl_->tf.forward(work);
    impl_->khat = copy_complex(work.cplx, impl_->tf.cplx_size());
}

GreenOperator::~GreenOperator() = default;

double GreenOperator::singular_cell_average() const { return impl_->singular_avg; }

HalfSpaceField GreenOperator::apply(const HalfSpaceField& F) const {
    if (!(F.grid == grid_)) throw std::invalid_argument("green: field grid mismatch");
    const GridSpec& g = grid_;
    const PaddedLattice& lat = impl_->lat;
    FftBuffers& work = impl_->work;
    std::fill(work.real, work.real + lat.total, 0.0);

    const std::size_t ss = F.slice_size();
    // even extension occupies t-slots 0 .. 2nt-1 (slot nt + j holds +t_j)
    for (int j = 0; j < g.nt; ++j) {
        const double* src = F.slice(j);
        double* up = work.real;  // base
        const std::size_t slot_pos = static_cast<std::size_t>(g.nt + j) * lat.stride[0];
        const std::size_t slot_neg = static_cast<std::size_t>(g.nt - 1 - j) * lat.stride[0];
#pragma omp parallel for schedule(static)
        for (long long fl = 0; fl < static_cast<long long>(ss); ++fl) {
            int idx[8];
            decode_boundary(g, static_cast<std::size_t>(fl), idx);
            std::size_t p = 0;
            for (int d = 0; d < g.n; ++d) p += static_cast<std::size_t>(idx[d]) * lat.stride[g.n - d];
            up[slot_pos + p] = src[fl];
            up[slot_neg + p] = src[fl];
        }
    }
    impl_->tf.forward(work);
    complex_multiply(work.cplx, impl_->khat.data(), work.cplx, impl_->tf.cplx_size());
    impl_->tf.backward(work);

    HalfSpaceField out(g);
    const double scale = g.cell_measure_bulk() / static_cast<double>(lat.total);
    for (int j = 0; j < g.nt; ++j) {
        double* dst = out.slice(j);
        const std::size_t slot = static_cast<std::size_t>(g.nt + j) * lat.stride[0];
#pragma omp parallel for schedule(static)
        for (long long fl = 0; fl < static_cast<long long>(ss); ++fl) {
            int idx[8];
            decode_boundary(g, static_cast<std::size_t>(fl), idx);
            std::size_t p = 0;
            for (int d = 0; d < g.n; ++d) p += static_cast<std::size_t>(idx[d]) * lat.stride[g.n - d];
            dst[fl] = work.real[slot + p] * scale;
        }
    }
    if (cfg_.symmetrize) symmetrize_lattice(out);
    return out;
}

std::vector<HalfSpaceField> green_potential_gradient(const HalfSpaceField& GF) {
    return fd_gradient(GF);
}

// ---------------------------------------------------------------------------
// Linear estimate table
// ---------------------------------------------------------------------------

std::vector<LinearBoundRow> verify_linear_bounds(const ProblemSpec& spec, const GridSpec& grid,
                                                 const std::vector<BoundaryField>& corpus,
                                                 const OperatorConfig& cfg) {
    if (corpus.empty()) throw std::invalid_argument("verify_linear_bounds: corpus is empty");
    const Exponents e = derive_exponents(spec);
    const KernelConstants& consts = KernelConstants::calibrated(grid.n);
    NeumannOperator N(grid, consts, cfg);

    const double p = to_double(e.p_data);
    const double q = to_double(e.q);
    const double qs = to_double(e.q_star);
    const double mu_b = grid.cell_measure_boundary();
    const double mu = grid.cell_measure_bulk();
    const int n = grid.n;

    double slice0 = 0.0, slice1 = 0.0, bulk = 0.0, gradb = 0.0;
    for (const BoundaryField& f : corpus) {
        const double fp = weak_norm(decreasing_rearrangement(f.v, mu_b), p);
        if (fp == 0.0) continue;
        HalfSpaceField u = N.apply(f);
        std::vector<HalfSpaceField> gu = N.apply_gradient(f);
        const std::size_t ss = u.slice_size();
        for (int j = 0; j < grid.nt; ++j) {
            const double t = grid.t_level(j);
            const double* s = u.slice(j);
            const double sup_u = block_max(ss, [&](std::size_t i) { return std::abs(s[i]); });
            slice0 = std::max(slice0, sup_u / (std::pow(t, 1.0 - n / p) * fp));
            double supg = 0.0;
            for (int c = 0; c <= n; ++c) {
                const double* gs = gu[c].slice(j);
                supg = std::max(supg, block_max(ss, [&](std::size_t i) { return std::abs(gs[i]); }));
            }
            slice1 = std::max(slice1, supg / (std::pow(t, -n / p) * fp));
        }
        bulk = std::max(bulk, weak_norm(decreasing_rearrangement(u.v, mu), qs) / fp);
        gradb = std::max(gradb,
                         weak_norm(decreasing_rearrangement(gradient_magnitude(gu), mu), q) / fp);
    }
    return {{"slice_decay_sup_k0", slice0},
            {"slice_decay_sup_k1", slice1},
            {"bulk_weak_qstar", bulk},
            {"gradient_weak_q", gradb}};
}

double delta_recovery_error(const BoundaryField& f, const KernelConstants& consts,
                            const OperatorConfig& cfg, double beta_override) {
    NeumannOperator N(f.grid, consts, cfg);
    HalfSpaceField dt = N.apply_gradient_component(f, f.grid.n);
    const double rescale = beta_override > 0.0 ? beta_override / consts.beta_n : 1.0;
    const double s = consts.orientation_sign != 0 ? consts.orientation_sign : -1;
    const double* slice = dt.slice(0);
    return block_max(f.grid.boundary_cells(), [&](std::size_t i) {
        return std::abs(s * rescale * slice[i] - f.v[i]);
    });
}

// ---------------------------------------------------------------------------
// Sign calibration (declared in kernels.cpp)
// ---------------------------------------------------------------------------

namespace detail {

KernelConstants measure_signs(int n) {
    KernelConstants c = KernelConstants::base(n);
    GridSpec g;
    g.n = n;
    g.L = 3.0;
    g.nx = n >= 3 ? 12 : 24;
    g.T = 2.0;
    g.nt = 8;
    OperatorConfig cfg;

    BoundaryDataFamily fam;
    fam.kind = DataKind::Gaussian;
    fam.amplitude = 1.0;
    fam.width = 1.0;
    BoundaryField f = fam.sample(g);

    NeumannOperator N(g, c, cfg);
    HalfSpaceField dt = N.apply_gradient_component(f, n);
    double dot = block_sum(g.boundary_cells(), [&](std::size_t i) { return dt.slice(0)[i] * f.v[i]; });
    c.orientation_sign = dot >= 0 ? 1 : -1;

    // bump in the bulk, discrete Laplacian of the Green potential against it
    HalfSpaceField F(g);
    const std::vector<double> xs = g.x_coords();
    for (int j = 0; j < g.nt; ++j) {
        const double t = g.t_level(j);
        double* s = F.slice(j);
        for (std::size_t fl = 0; fl < F.slice_size(); ++fl) {
            int idx[8];
            decode_boundary(g, fl, idx);
            double r2 = (t - 1.0) * (t - 1.0);
            for (int d = 0; d < n; ++d) r2 += xs[idx[d]] * xs[idx[d]];
            s[fl] = std::exp(-2.0 * r2);
        }
    }
    GreenOperator G(g, c, cfg);
    HalfSpaceField GF = G.apply(F);
    HalfSpaceField lap = fd_laplacian(GF);
    dot = block_sum(F.v.size(), [&](std::size_t i) { return lap.v[i] * F.v[i]; });
    c.green_sign = dot >= 0 ? 1 : -1;
    return c;
}

}  // namespace detail

}  // namespace hslab
