#include "hslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "hslab/parallel.hpp"
#include "json.hpp"

namespace hslab {

double GridSpec::cell_measure_boundary() const {
    double m = 1.0;
    for (int d = 0; d < n; ++d) m *= hx();
    return m;
}

double GridSpec::cell_measure_bulk() const { return cell_measure_boundary() * ht(); }

std::size_t GridSpec::boundary_cells() const {
    std::size_t c = 1;
    for (int d = 0; d < n; ++d) c *= static_cast<std::size_t>(nx);
    return c;
}

std::size_t GridSpec::bulk_cells() const { return boundary_cells() * static_cast<std::size_t>(nt); }

std::vector<double> GridSpec::x_coords() const {
    std::vector<double> x(nx);
    const double h = hx();
    for (int i = 0; i < nx / 2; ++i) {
        x[i] = (i + 0.5) * h - L;
        x[nx - 1 - i] = -x[i];
    }
    return x;
}

void GridSpec::validate() const {
    if (n < 2) throw std::invalid_argument("grid: n must be >= 2");
    if (L <= 0 || T <= 0) throw std::invalid_argument("grid: L and T must be positive");
    if (nx < 2 || nx % 2 != 0) throw std::invalid_argument("grid: nx must be even and >= 2");
    if (nt < 1) throw std::invalid_argument("grid: nt must be >= 1");
}

BoundaryField::BoundaryField(const GridSpec& g) : grid(g), v(g.boundary_cells(), 0.0) {}
HalfSpaceField::HalfSpaceField(const GridSpec& g) : grid(g), v(g.bulk_cells(), 0.0) {}

EvenExtension even_extension(const HalfSpaceField& F) {
    EvenExtension E;
    E.grid = F.grid;
    const std::size_t ss = F.slice_size();
    const int nt = F.grid.nt;
    E.v.assign(ss * 2 * nt, 0.0);
    for (int j = 0; j < nt; ++j) {
        const double* src = F.slice(j);
        std::copy(src, src + ss, E.v.data() + ss * (nt + j));       // t = +t_j
        std::copy(src, src + ss, E.v.data() + ss * (nt - 1 - j));   // t = -t_j
    }
    return E;
}

HalfSpaceField restrict_positive(const EvenExtension& E) {
    HalfSpaceField F(E.grid);
    const std::size_t ss = F.slice_size();
    for (int j = 0; j < E.grid.nt; ++j)
        std::copy(E.v.data() + ss * (E.grid.nt + j), E.v.data() + ss * (E.grid.nt + j + 1), F.slice(j));
    return F;
}

void decode_boundary(const GridSpec& g, std::size_t flat, int* idx) {
    for (int d = 0; d < g.n; ++d) {
        idx[d] = static_cast<int>(flat % g.nx);
        flat /= g.nx;
    }
}

std::size_t encode_boundary(const GridSpec& g, const int* idx) {
    std::size_t flat = 0;
    for (int d = g.n - 1; d >= 0; --d) flat = flat * g.nx + static_cast<std::size_t>(idx[d]);
    return flat;
}

namespace {

// Per-axis interpolation weights on the cell-center lattice. Coordinates in
// the outer half-cell margin clamp to the face cell.
struct AxisW {
    int i0;
    double w1;  // weight of i0+1
    bool outside;
};

AxisW axis_weight(double coord, double lo, double h, int count) {
    AxisW a{0, 0.0, false};
    const double s = (coord - lo) / h - 0.5;
    if (s < -0.5 || s > count - 0.5) {
        a.outside = true;
        return a;
    }
    double sc = std::clamp(s, 0.0, static_cast<double>(count - 1));
    a.i0 = static_cast<int>(std::floor(sc));
    if (a.i0 > count - 2) a.i0 = count - 2;
    if (count == 1) { a.i0 = 0; a.w1 = 0.0; return a; }
    a.w1 = sc - a.i0;
    return a;
}

}  // namespace

InterpResult interpolate(const BoundaryField& f, const std::vector<double>& x) {
    const GridSpec& g = f.grid;
    InterpResult r;
    std::vector<AxisW> w(g.n);
    for (int d = 0; d < g.n; ++d) {
        w[d] = axis_weight(x[d], -g.L, g.hx(), g.nx);
        if (w[d].outside) {
            r.clipped = true;
            return r;
        }
    }
    const int corners = 1 << g.n;
    double acc = 0.0;
    std::vector<int> idx(g.n);
    for (int c = 0; c < corners; ++c) {
        double wt = 1.0;
        for (int d = 0; d < g.n; ++d) {
            const bool hi = (c >> d) & 1;
            idx[d] = w[d].i0 + (hi ? 1 : 0);
            wt *= hi ? w[d].w1 : (1.0 - w[d].w1);
        }
        if (wt != 0.0) acc += wt * f.v[encode_boundary(g, idx.data())];
    }
    r.value = acc;
    return r;
}

InterpResult interpolate(const HalfSpaceField& u, const std::vector<double>& x, double t) {
    const GridSpec& g = u.grid;
    InterpResult r;
    if (t <= 0.0 || t > g.T) {
        r.clipped = true;
        return r;
    }
    std::vector<AxisW> w(g.n);
    for (int d = 0; d < g.n; ++d) {
        w[d] = axis_weight(x[d], -g.L, g.hx(), g.nx);
        if (w[d].outside) {
            r.clipped = true;
            return r;
        }
    }
    AxisW wt_ax = axis_weight(t, 0.0, g.ht(), g.nt);
    if (wt_ax.outside) {
        r.clipped = true;
        return r;
    }
    const std::size_t ss = u.slice_size();
    std::vector<int> idx(g.n);
    double acc = 0.0;
    const int corners = 1 << g.n;
    for (int jt = 0; jt <= 1; ++jt) {
        const double tw = jt ? wt_ax.w1 : (1.0 - wt_ax.w1);
        if (tw == 0.0) continue;
        const double* sl = u.v.data() + ss * (wt_ax.i0 + jt);
        for (int c = 0; c < corners; ++c) {
            double wgt = tw;
            for (int d = 0; d < g.n; ++d) {
                const bool hi = (c >> d) & 1;
                idx[d] = w[d].i0 + (hi ? 1 : 0);
                wgt *= hi ? w[d].w1 : (1.0 - w[d].w1);
            }
            if (wgt != 0.0) acc += wgt * sl[encode_boundary(g, idx.data())];
        }
    }
    r.value = acc;
    return r;
}

bool is_signed_permutation(const std::vector<double>& R, int n) {
    for (int i = 0; i < n; ++i) {
        int nonzero = 0;
        for (int j = 0; j < n; ++j) {
            const double a = std::abs(R[i * n + j]);
            if (a > 1e-15 && std::abs(a - 1.0) > 1e-15) return false;
            if (a > 0.5) ++nonzero;
        }
        if (nonzero != 1) return false;
    }
    return true;
}

namespace {

void check_orthogonal(const std::vector<double>& R, int n) {
    if (R.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("rotate_field: R must be n x n");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double dot = 0.0;
            for (int k = 0; k < n; ++k) dot += R[i * n + k] * R[j * n + k];
            const double target = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot - target) > 1e-12)
                throw std::invalid_argument("rotate_field: R is not orthogonal within 1e-12");
        }
}

// out[flat] = f[signed-permuted flat]; exact on the symmetric lattice.
template <class Fn>
void apply_signed_perm(const GridSpec& g, const std::vector<double>& R, Fn&& assign) {
    const int n = g.n;
    std::vector<int> perm(n), sign(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(R[i * n + j]) > 0.5) {
                perm[i] = j;
                sign[i] = R[i * n + j] > 0 ? 1 : -1;
            }
    const std::size_t cells = g.boundary_cells();
#pragma omp parallel for schedule(static)
    for (long long fl = 0; fl < static_cast<long long>(cells); ++fl) {
        int idx[8], src[8];
        decode_boundary(g, static_cast<std::size_t>(fl), idx);
        // (Rx)_i = sign_i * x_{perm_i}; sample f at Rx by index mapping
        for (int i = 0; i < n; ++i) {
            int s = idx[perm[i]];
            // note x-index reflection i -> nx-1-i realizes x -> -x exactly
            src[i] = s;
        }
        // Solve f(Rx): coordinate d of the source point is (Rx)_d.
        int mapped[8];
        for (int d = 0; d < n; ++d) {
            int s = idx[perm[d]];
            mapped[d] = (sign[d] > 0) ? s : (g.nx - 1 - s);
        }
        assign(static_cast<std::size_t>(fl), encode_boundary(g, mapped));
    }
}

}  // namespace

BoundaryField rotate_field(const BoundaryField& f, const std::vector<double>& R) {
    const GridSpec& g = f.grid;
    check_orthogonal(R, g.n);
    BoundaryField out(g);
    if (is_signed_permutation(R, g.n)) {
        apply_signed_perm(g, R, [&](std::size_t dst, std::size_t src) { out.v[dst] = f.v[src]; });
        return out;
    }
    const std::vector<double> xs = g.x_coords();
    const std::size_t cells = g.boundary_cells();
#pragma omp parallel for schedule(static)
    for (long long fl = 0; fl < static_cast<long long>(cells); ++fl) {
        int idx[8];
        decode_boundary(g, static_cast<std::size_t>(fl), idx);
        std::vector<double> rx(g.n, 0.0);
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) rx[i] += R[i * g.n + j] * xs[idx[j]];
        out.v[static_cast<std::size_t>(fl)] = interpolate(f, rx).value;
    }
    return out;
}

HalfSpaceField rotate_field(const HalfSpaceField& u, const std::vector<double>& R) {
    const GridSpec& g = u.grid;
    check_orthogonal(R, g.n);
    HalfSpaceField out(g);
    const std::size_t ss = u.slice_size();
    for (int j = 0; j < g.nt; ++j) {
        BoundaryField sl;
        sl.grid = g;
        sl.v.assign(u.slice(j), u.slice(j) + ss);
        BoundaryField rs = rotate_field(sl, R);
        std::copy(rs.v.begin(), rs.v.end(), out.slice(j));
    }
    return out;
}

namespace {

std::vector<RadialShell> profile_of(const GridSpec& g, const double* vals) {
    const std::vector<double> xs = g.x_coords();
    const double h = g.hx();
    const int nshell = static_cast<int>(std::ceil(g.L * std::sqrt(static_cast<double>(g.n)) / h)) + 1;
    std::vector<RadialShell> shells(nshell);
    for (int k = 0; k < nshell; ++k) {
        shells[k].r_lo = k * h;
        shells[k].r_hi = (k + 1) * h;
        shells[k].min = 0;
        shells[k].max = 0;
    }
    std::vector<double> sum(nshell, 0.0);
    const std::size_t cells = g.boundary_cells();
    int idx[8];
    for (std::size_t fl = 0; fl < cells; ++fl) {
        decode_boundary(g, fl, idx);
        double r2 = 0.0;
        for (int d = 0; d < g.n; ++d) r2 += xs[idx[d]] * xs[idx[d]];
        const int k = static_cast<int>(std::sqrt(r2) / h);
        if (k >= nshell) continue;
        RadialShell& s = shells[k];
        const double val = vals[fl];
        if (s.count == 0) {
            s.min = s.max = val;
        } else {
            s.min = std::min(s.min, val);
            s.max = std::max(s.max, val);
        }
        sum[k] += val;
        ++s.count;
    }
    for (int k = 0; k < nshell; ++k)
        if (shells[k].count > 0) shells[k].mean = sum[k] / static_cast<double>(shells[k].count);
    return shells;
}

}  // namespace

std::vector<RadialShell> radial_profile(const BoundaryField& f) { return profile_of(f.grid, f.v.data()); }

std::vector<RadialShell> radial_profile_slice(const HalfSpaceField& u, int j) {
    return profile_of(u.grid, u.slice(j));
}

BoundaryField boundary_trace(const HalfSpaceField& u) {
    const GridSpec& g = u.grid;
    BoundaryField tr(g);
    const std::size_t ss = u.slice_size();
    if (g.nt >= 3) {
        const double* s1 = u.slice(0);
        const double* s2 = u.slice(1);
        const double* s3 = u.slice(2);
        // quadratic through t = ht/2, 3ht/2, 5ht/2 evaluated at t = 0
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(ss); ++i)
            tr.v[i] = (15.0 * s1[i] - 10.0 * s2[i] + 3.0 * s3[i]) / 8.0;
    } else if (g.nt == 2) {
        const double* s1 = u.slice(0);
        const double* s2 = u.slice(1);
        for (std::size_t i = 0; i < ss; ++i) tr.v[i] = 1.5 * s1[i] - 0.5 * s2[i];
    } else {
        std::copy(u.slice(0), u.slice(0) + ss, tr.v.begin());
    }
    return tr;
}

namespace {

// Orbit of a lattice cell under signed permutations of the axes: all
// permutations of the per-axis indices combined with the reflections
// i -> nx-1-i. Orbits are processed once, from their lexicographically
// smallest member, so the pass is deterministic under any schedule.
void symmetrize_slice(const GridSpec& g, double* vals) {
    const int n = g.n;
    const std::size_t cells = g.boundary_cells();
    std::vector<int> permutations;  // flattened list of all n! permutations
    {
        std::vector<int> p(n);
        std::iota(p.begin(), p.end(), 0);
        do {
            for (int d = 0; d < n; ++d) permutations.push_back(p[d]);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    const int nperm = static_cast<int>(permutations.size()) / n;
    const int nrefl = 1 << n;

#pragma omp parallel for schedule(static)
    for (long long fl = 0; fl < static_cast<long long>(cells); ++fl) {
        int idx[8];
        decode_boundary(g, static_cast<std::size_t>(fl), idx);
        // enumerate the orbit
        std::size_t members[48 * 16];
        int count = 0;
        int im[8];
        for (int pi = 0; pi < nperm; ++pi) {
            for (int r = 0; r < nrefl; ++r) {
                for (int d = 0; d < n; ++d) {
                    int s = idx[permutations[pi * n + d]];
                    im[d] = ((r >> d) & 1) ? (g.nx - 1 - s) : s;
                }
                members[count++] = encode_boundary(g, im);
            }
        }
        std::sort(members, members + count);
        count = static_cast<int>(std::unique(members, members + count) - members);
        if (members[0] != static_cast<std::size_t>(fl)) continue;  // not the orbit leader
        double s = 0.0;
        for (int k = 0; k < count; ++k) s += vals[members[k]];
        const double avg = s / count;
        for (int k = 0; k < count; ++k) vals[members[k]] = avg;
    }
}

}  // namespace

void symmetrize_lattice(BoundaryField& f) { symmetrize_slice(f.grid, f.v.data()); }

void symmetrize_lattice(HalfSpaceField& u) {
    for (int j = 0; j < u.grid.nt; ++j) symmetrize_slice(u.grid, u.slice(j));
}

std::vector<HalfSpaceField> fd_gradient(const HalfSpaceField& u) {
    const GridSpec& g = u.grid;
    std::vector<HalfSpaceField> grad(g.n + 1, HalfSpaceField(g));
    const std::size_t ss = u.slice_size();
    const double hx = g.hx(), ht = g.ht();
    std::vector<std::size_t> stride(g.n);
    stride[0] = 1;
    for (int d = 1; d < g.n; ++d) stride[d] = stride[d - 1] * g.nx;

    for (int j = 0; j < g.nt; ++j) {
        const double* s = u.slice(j);
#pragma omp parallel for schedule(static)
        for (long long fl = 0; fl < static_cast<long long>(ss); ++fl) {
            int idx[8];
            decode_boundary(g, static_cast<std::size_t>(fl), idx);
            for (int d = 0; d < g.n; ++d) {
                const std::size_t st = stride[d];
                double dv;
                if (idx[d] == 0)
                    dv = (s[fl + st] - s[fl]) / hx;
                else if (idx[d] == g.nx - 1)
                    dv = (s[fl] - s[fl - st]) / hx;
                else
                    dv = (s[fl + st] - s[fl - st]) / (2.0 * hx);
                grad[d].slice(j)[fl] = dv;
            }
        }
    }
    // t-component
    const double* base = u.v.data();
#pragma omp parallel for schedule(static)
    for (long long fl = 0; fl < static_cast<long long>(ss); ++fl) {
        for (int j = 0; j < g.nt; ++j) {
            double dv;
            if (g.nt == 1)
                dv = 0.0;
            else if (j == 0)
                dv = (base[ss + fl] - base[fl]) / ht;
            else if (j == g.nt - 1)
                dv = (base[ss * j + fl] - base[ss * (j - 1) + fl]) / ht;
            else
                dv = (base[ss * (j + 1) + fl] - base[ss * (j - 1) + fl]) / (2.0 * ht);
            grad[g.n].slice(j)[fl] = dv;
        }
    }
    return grad;
}

HalfSpaceField fd_laplacian(const HalfSpaceField& u) {
    const GridSpec& g = u.grid;
    HalfSpaceField out(g);
    const std::size_t ss = u.slice_size();
    const double ihx2 = 1.0 / (g.hx() * g.hx());
    const double iht2 = 1.0 / (g.ht() * g.ht());
    std::vector<std::size_t> stride(g.n);
    stride[0] = 1;
    for (int d = 1; d < g.n; ++d) stride[d] = stride[d - 1] * g.nx;

    for (int j = 1; j + 1 < g.nt; ++j) {
        const double* sm = u.slice(j - 1);
        const double* s0 = u.slice(j);
        const double* sp = u.slice(j + 1);
        double* o = out.slice(j);
#pragma omp parallel for schedule(static)
        for (long long fl = 0; fl < static_cast<long long>(ss); ++fl) {
            int idx[8];
            decode_boundary(g, static_cast<std::size_t>(fl), idx);
            bool interior = true;
            for (int d = 0; d < g.n; ++d)
                if (idx[d] == 0 || idx[d] == g.nx - 1) interior = false;
            if (!interior) continue;
            double acc = (sp[fl] - 2.0 * s0[fl] + sm[fl]) * iht2;
            for (int d = 0; d < g.n; ++d) {
                const std::size_t st = stride[d];
                acc += (s0[fl + st] - 2.0 * s0[fl] + s0[fl - st]) * ihx2;
            }
            o[fl] = acc;
        }
    }
    return out;
}

namespace {

void write_header(const GridSpec& g, std::size_t count, const std::string& path) {
    nlohmann::json h;
    h["n"] = g.n;
    h["L"] = g.L;
    h["nx"] = g.nx;
    h["T"] = g.T;
    h["nt"] = g.nt;
    h["count"] = count;
    h["ordering"] = "row-major, x fastest, t slowest";
    std::ofstream os(path);
    os << h.dump(2) << "\n";
}

void write_values(const std::vector<double>& v, const std::string& path) {
    std::ofstream os(path);
    os << "index,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << i << "," << v[i] << "\n";
}

}  // namespace

void write_field_csv(const HalfSpaceField& u, const std::string& prefix) {
    write_header(u.grid, u.v.size(), prefix + ".json");
    write_values(u.v, prefix + ".csv");
}

void write_field_csv(const BoundaryField& f, const std::string& prefix) {
    write_header(f.grid, f.v.size(), prefix + ".json");
    write_values(f.v, prefix + ".csv");
}

}  // namespace hslab
