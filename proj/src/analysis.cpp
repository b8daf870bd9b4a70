#include "hslab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hslab/parallel.hpp"

namespace hslab {

// ---------------------------------------------------------------------------
// Cutoffs
// ---------------------------------------------------------------------------

double cutoff_zeta(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    const double u = s - 1.0;
    return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double cutoff_zeta_d(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    const double u = s - 1.0;
    return -30.0 * u * u * (1.0 - u) * (1.0 - u);
}

double cutoff_zeta_dd(double s) {
    if (s <= 1.0 || s >= 2.0) return 0.0;
    const double u = s - 1.0;
    return -60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

namespace {

struct WEval {
    double w = 0.0, w1 = 0.0, w2 = 0.0;  // W, W', W'' at sigma (sigma in [0,1] bridge units)
};

// bridge profile on sigma: 1 at sigma <= 0, 0 at sigma >= 1
double bridge(double sigma) { return cutoff_zeta(sigma + 1.0); }
double bridge_d(double sigma) { return cutoff_zeta_d(sigma + 1.0); }
double bridge_dd(double sigma) { return cutoff_zeta_dd(sigma + 1.0); }

// W = bridge^kappa and derivatives; kappa >= 1 keeps all powers nonnegative.
WEval eval_w(double sigma, double kappa) {
    WEval e;
    const double z = bridge(sigma);
    if (z <= 0.0) return e;
    const double zd = bridge_d(sigma);
    const double zdd = bridge_dd(sigma);
    if (kappa == 1.0) {
        e.w = z;
        e.w1 = zd;
        e.w2 = zdd;
        return e;
    }
    const double zk2 = std::pow(z, kappa - 2.0);
    const double zk1 = zk2 * z;
    e.w = zk1 * z;
    e.w1 = kappa * zk1 * zd;
    e.w2 = kappa * (kappa - 1.0) * zk2 * zd * zd + kappa * zk1 * zdd;
    return e;
}

}  // namespace

ProductCutoff ProductCutoff::probe_cutoff(int n, double R, double kappa) {
    // zeta(|x|^2 / R) has its bridge on |x|^2 in [R, 2R]
    ProductCutoff pc;
    pc.n = n;
    pc.ax = std::sqrt(R);
    pc.bx = std::sqrt(2.0 * R);
    pc.at = pc.ax;
    pc.bt = pc.bx;
    pc.kappa = kappa;
    return pc;
}

double ProductCutoff::value_x(const double* x) const {
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) {
        const double c = center.empty() ? x[d] : x[d] - center[d];
        r2 += c * c;
    }
    const double z = bridge((r2 - ax * ax) / (bx * bx - ax * ax));
    return z <= 0.0 ? 0.0 : std::pow(z, kappa);
}

double ProductCutoff::value_t(double t) const {
    const double z = bridge((t * t - at * at) / (bt * bt - at * at));
    return z <= 0.0 ? 0.0 : std::pow(z, kappa);
}

double ProductCutoff::value(const double* x, double t) const { return value_x(x) * value_t(t); }

double ProductCutoff::laplacian(const double* x, double t) const {
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) {
        const double c = center.empty() ? x[d] : x[d] - center[d];
        r2 += c * c;
    }
    const double dx = bx * bx - ax * ax;
    const double dt2 = bt * bt - at * at;
    const WEval wx = eval_w((r2 - ax * ax) / dx, kappa);
    const WEval wt = eval_w((t * t - at * at) / dt2, kappa);
    const double lap_x = wx.w2 * 4.0 * r2 / (dx * dx) + wx.w1 * 2.0 * n / dx;
    const double lap_t = wt.w2 * 4.0 * t * t / (dt2 * dt2) + wt.w1 * 2.0 / dt2;
    return lap_x * wt.w + wx.w * lap_t;
}

double ProductCutoff::dt(const double* x, double t) const {
    const double dt2 = bt * bt - at * at;
    const WEval wt = eval_w((t * t - at * at) / dt2, kappa);
    return value_x(x) * wt.w1 * 2.0 * t / dt2;
}

// ---------------------------------------------------------------------------
// Property checks
// ---------------------------------------------------------------------------

PositivityReport check_positivity(const HalfSpaceField& u, const BoundaryField& f,
                                  const ProblemSpec& spec) {
    PositivityReport rep;
    double fmin = f.v.empty() ? 0.0 : f.v[0];
    double fmax = 0.0;
    for (double x : f.v) {
        fmin = std::min(fmin, x);
        fmax = std::max(fmax, x);
    }
    rep.applicable = spec.a >= 0 && spec.b >= 0 && fmin >= 0.0 && fmax > 0.0;
    if (!rep.applicable) return rep;
    double mn = u.v[0];
    for (double x : u.v) mn = std::min(mn, x);
    rep.min_u = mn;
    rep.pass = mn > 0.0;
    return rep;
}

double check_rotational_symmetry(const HalfSpaceField& u, const std::vector<std::vector<double>>& Rs) {
    const GridSpec& g = u.grid;
    const std::vector<double> xs = g.x_coords();
    double defect = 0.0;
    for (const auto& R : Rs) {
        HalfSpaceField ur = rotate_field(u, R);
        const bool exact = is_signed_permutation(R, g.n);
        const double rmax = 0.98 * g.L;
        const std::size_t ss = u.slice_size();
        for (int j = 0; j < g.nt; ++j) {
            const double* a = u.slice(j);
            const double* b = ur.slice(j);
            const double d = block_max(ss, [&](std::size_t fl) {
                if (!exact) {
                    int idx[8];
                    decode_boundary(g, fl, idx);
                    double r2 = 0.0;
                    for (int dd = 0; dd < g.n; ++dd) r2 += xs[idx[dd]] * xs[idx[dd]];
                    if (r2 > rmax * rmax) return 0.0;
                }
                return std::abs(a[fl] - b[fl]);
            });
            defect = std::max(defect, d);
        }
    }
    return defect;
}

double check_radial_monotonicity(const HalfSpaceField& u) {
    const GridSpec& g = u.grid;
    double defect = 0.0;
    for (int j = 0; j < g.nt; ++j) {
        const std::vector<RadialShell> prof = radial_profile_slice(u, j);
        double prev = 0.0;
        bool have_prev = false;
        for (const RadialShell& s : prof) {
            if (s.count == 0 || s.r_hi > g.L) continue;
            if (have_prev) defect = std::max(defect, s.mean - prev);
            prev = s.mean;
            have_prev = true;
        }
    }
    return defect;
}

HomogeneityReport check_homogeneity(const HalfSpaceField& u, const ProblemSpec& spec,
                                    const std::vector<double>& lambdas) {
    const GridSpec& g = u.grid;
    HomogeneityReport rep;
    const Exponents e = derive_exponents(spec);
    const std::vector<double> xs = g.x_coords();
    const std::vector<HalfSpaceField> grad_u = fd_gradient(u);

    for (double lam : lambdas) {
        ScaledHalfSpaceField us = scale_solution(u, lam, spec);
        std::vector<HalfSpaceField> grad_s = fd_gradient(us.field);

        // annulus where both fields are grid-resolved
        const double r_in = 3.0 * g.hx();
        const double r_out = 0.9 * g.L / std::max(1.0, lam);
        const double t_in = std::max(g.ht(), 0.5 * g.ht() / std::min(1.0, lam)) * 1.01;
        const double t_out = 0.9 * g.T / std::max(1.0, lam);

        auto mask_field = [&](const HalfSpaceField& src) {
            HalfSpaceField out(g);
            const std::size_t ss = g.boundary_cells();
            for (int j = 0; j < g.nt; ++j) {
                const double t = g.t_level(j);
                if (t < t_in || t > t_out) continue;
                const double* sv = src.slice(j);
                double* ov = out.slice(j);
                for (std::size_t fl = 0; fl < ss; ++fl) {
                    int idx[8];
                    decode_boundary(g, fl, idx);
                    double r2 = 0.0;
                    for (int d = 0; d < g.n; ++d) r2 += xs[idx[d]] * xs[idx[d]];
                    const double r = std::sqrt(r2);
                    if (r >= r_in && r <= r_out) ov[fl] = sv[fl];
                }
            }
            return out;
        };

        HalfSpaceField diff = u;
        for (std::size_t i = 0; i < diff.v.size(); ++i) diff.v[i] -= us.field.v[i];
        HalfSpaceField diff_m = mask_field(diff);
        HalfSpaceField u_m = mask_field(u);
        std::vector<HalfSpaceField> gd(g.n + 1, HalfSpaceField(g)), gu(g.n + 1, HalfSpaceField(g));
        for (int c = 0; c <= g.n; ++c) {
            HalfSpaceField tmp = grad_u[c];
            for (std::size_t i = 0; i < tmp.v.size(); ++i) tmp.v[i] -= grad_s[c].v[i];
            gd[c] = mask_field(tmp);
            gu[c] = mask_field(grad_u[c]);
        }
        const double dn = x_norm(diff_m, gd, e.q).x_norm;
        const double un = x_norm(u_m, gu, e.q).x_norm;
        const double defect = un > 0 ? dn / un : 0.0;
        rep.lambdas.push_back(lam);
        rep.defects.push_back(defect);
        rep.max_defect = std::max(rep.max_defect, defect);
    }
    return rep;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    const double denom = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    if (x.size() > 2) {
        double ss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - f.intercept - f.slope * x[i];
            ss += r * r;
        }
        f.stderr_slope = std::sqrt(ss / (n - 2.0) / (sxx - sx * sx / n));
    }
    return f;
}

DecayFit fit_decay(const HalfSpaceField& u, const ProblemSpec& spec, int kappa) {
    const GridSpec& g = u.grid;
    const Exponents e = derive_exponents(spec);
    std::vector<double> lt, lv;
    if (kappa == 0) {
        for (int j = 0; j < g.nt; ++j) {
            const double t = g.t_level(j);
            if (t < g.T / 4.0) continue;
            const double* s = u.slice(j);
            const double m = block_max(u.slice_size(), [&](std::size_t i) { return std::abs(s[i]); });
            if (m > 0) {
                lt.push_back(std::log(t));
                lv.push_back(std::log(m));
            }
        }
    } else if (kappa == 1) {
        const std::vector<double> mag = gradient_magnitude(fd_gradient(u));
        const std::size_t ss = u.slice_size();
        for (int j = 0; j < g.nt; ++j) {
            const double t = g.t_level(j);
            if (t < g.T / 4.0) continue;
            const double* s = mag.data() + ss * j;
            const double m = block_max(ss, [&](std::size_t i) { return std::abs(s[i]); });
            if (m > 0) {
                lt.push_back(std::log(t));
                lv.push_back(std::log(m));
            }
        }
    } else {
        throw std::invalid_argument("fit_decay: kappa must be 0 or 1");
    }
    if (lt.size() < 4) throw std::runtime_error("fit_decay: tail window has fewer than 4 t-levels");
    const LineFit lf = fit_line(lt, lv);
    DecayFit d;
    d.slope = lf.slope;
    d.stderr_slope = lf.stderr_slope;
    d.target = -to_double(e.decay_rate) - kappa;
    d.points = static_cast<int>(lt.size());
    return d;
}

EnergyReport energy_check(const HalfSpaceField& u, const BoundaryField& f, const ProblemSpec& spec) {
    const GridSpec& g = u.grid;
    const Exponents e = derive_exponents(spec);
    const Rational m_weighted = Rational(1) + Rational(4, g.n);
    const Rational m_dirichlet(g.n + 3, g.n - 1);
    EnergyReport rep;
    if (spec.m == m_weighted)
        rep.variant = "weighted";
    else if (spec.m == m_dirichlet)
        rep.variant = "dirichlet";
    else
        throw std::invalid_argument("energy_check: admissible m are " +
                                    rational_to_string(m_weighted) + " (weighted) and " +
                                    rational_to_string(m_dirichlet) + " (dirichlet)");

    const std::vector<HalfSpaceField> grad = fd_gradient(u);
    const std::vector<double> mag = gradient_magnitude(grad);
    const double mu = g.cell_measure_bulk();
    const std::size_t ss = u.slice_size();

    if (rep.variant == "weighted") {
        double acc = 0.0;
        for (int j = 0; j < g.nt; ++j) {
            const double t = g.t_level(j);
            const double* s = mag.data() + ss * j;
            acc += t * block_sum(ss, [&](std::size_t i) { return s[i] * s[i]; });
        }
        rep.lhs = std::sqrt(acc * mu);
        rep.f_norm = lebesgue_norm(f.v, g.cell_measure_boundary(), 2.0 * g.n / (g.n + 2.0));
    } else {
        rep.lhs = lebesgue_norm(mag, mu, 2.0);
        rep.f_norm = lebesgue_norm(f.v, g.cell_measure_boundary(), 2.0 * g.n / (g.n + 1.0));
    }
    const NormReport xr = x_norm_lebesgue(u, grad, e.q);
    rep.eta_term = std::pow(xr.x_norm, to_double(e.eta));
    rep.m_term = std::pow(xr.x_norm, to_double(spec.m));
    rep.rhs = rep.f_norm + rep.eta_term + rep.m_term;
    rep.ratio = rep.rhs > 0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Distributional residual
// ---------------------------------------------------------------------------

DistributionalReport distributional_residual(const HalfSpaceField& u, const BoundaryField& f,
                                             const ProblemSpec& spec, const KernelConstants& consts,
                                             const std::vector<ProductCutoff>& phis) {
    const GridSpec& g = u.grid;
    const Exponents e = derive_exponents(spec);
    const double eta = to_double(e.eta);
    const double m = to_double(spec.m);
    const double sN = consts.orientation_sign;
    const double sG = consts.green_sign;
    if (consts.orientation_sign == 0 || consts.green_sign == 0)
        throw std::invalid_argument("distributional_residual: constants are not calibrated");

    const std::vector<double> xs = g.x_coords();
    const double mu = g.cell_measure_bulk();
    const double mu_b = g.cell_measure_boundary();
    const BoundaryField tr = boundary_trace(u);
    const std::size_t ss = u.slice_size();

    DistributionalReport rep;
    for (const ProductCutoff& phi : phis) {
        if (phi.support_radius_t() > g.T)
            throw std::invalid_argument("distributional_residual: test function exceeds the box in t");
        double cmax = 0.0;
        if (!phi.center.empty())
            for (double c : phi.center) cmax = std::max(cmax, std::abs(c));
        if (phi.support_radius_x() + cmax > g.L)
            throw std::invalid_argument("distributional_residual: test function exceeds the box in x");
        // the construction has an even t-profile; verify anyway
        std::vector<double> zero(g.n, 0.0);
        if (std::abs(phi.dt(zero.data(), 0.0)) > 1e-12)
            throw std::invalid_argument("distributional_residual: test function has dphi/dt != 0 at t=0");

        // T1 = int u Delta phi
        double T1 = 0.0;
        for (int j = 0; j < g.nt; ++j) {
            const double t = g.t_level(j);
            const double* s = u.slice(j);
            T1 += block_sum(ss, [&](std::size_t fl) {
                int idx[8];
                decode_boundary(g, fl, idx);
                double x[8];
                for (int d = 0; d < g.n; ++d) x[d] = xs[idx[d]];
                return s[fl] * phi.laplacian(x, t);
            });
        }
        T1 *= mu;

        // T2 = int (b |u|^{eta-1} u + f) phi(.,0)
        const double T2 = mu_b * block_sum(g.boundary_cells(), [&](std::size_t fl) {
            int idx[8];
            decode_boundary(g, fl, idx);
            double x[8];
            for (int d = 0; d < g.n; ++d) x[d] = xs[idx[d]];
            const double v = tr.v[fl];
            const double nl = v == 0.0 ? 0.0 : std::pow(std::abs(v), eta - 1.0) * v;
            return (spec.b * nl + f.v[fl]) * phi.value_x(x);
        });

        // T3 = a int |u|^{m-1} u phi
        double T3 = 0.0;
        for (int j = 0; j < g.nt; ++j) {
            const double t = g.t_level(j);
            const double tf = phi.value_t(t);
            if (tf == 0.0) continue;
            const double* s = u.slice(j);
            T3 += tf * block_sum(ss, [&](std::size_t fl) {
                int idx[8];
                decode_boundary(g, fl, idx);
                double x[8];
                for (int d = 0; d < g.n; ++d) x[d] = xs[idx[d]];
                const double v = s[fl];
                const double nl = v == 0.0 ? 0.0 : std::pow(std::abs(v), m - 1.0) * v;
                return nl * phi.value_x(x);
            });
        }
        T3 *= spec.a * mu;

        const double lhs = T1 - sN * T2 - sG * T3;
        const double scale = std::abs(T1) + std::abs(T2) + std::abs(T3);
        rep.defects.push_back(scale > 0 ? std::abs(lhs) / scale : 0.0);
        rep.max_defect = std::max(rep.max_defect, rep.defects.back());
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Nonexistence probes
// ---------------------------------------------------------------------------

ProbeReport testfunction_probe(const BoundaryDataFamily& fam, const ProblemSpec& spec,
                               double domain_halfwidth, const std::vector<double>& R_sweep,
                               int quad_points) {
    spec.validate();
    fam.validate(spec.n);
    const int n = spec.n;
    const double m = to_double(spec.m);
    const double mprime = m / (m - 1.0);
    const double kappa = 2.0 * m / (m - 1.0);
    const double inv_m1 = 1.0 / (m - 1.0);

    ProbeReport rep;
    rep.m_prime = mprime;
    rep.k_threshold = (m + 1.0) / (m - 1.0);
    switch (fam.kind) {
        case DataKind::PowerDecay: rep.k_effective = fam.k; break;
        case DataKind::PureHomogeneous: rep.k_effective = fam.decay_exponent; break;
        default: rep.k_effective = static_cast<double>(n); break;  // compact support
    }
    rep.target_exponent = 0.5 * (n - rep.k_effective) + mprime - 0.5 * (n + 1);

    for (double R : R_sweep) {
        const double srad = std::sqrt(2.0 * R);
        if (srad > domain_halfwidth)
            throw std::invalid_argument("testfunction_probe: R exceeds the quadrature box");
        const ProductCutoff zeta1 = ProductCutoff::probe_cutoff(n, R, kappa);

        // lhs: int f zeta^1_R over R^n
        const double hq = 2.0 * srad / quad_points;
        std::size_t cells = 1;
        double volq = 1.0;
        for (int d = 0; d < n; ++d) {
            cells *= static_cast<std::size_t>(quad_points);
            volq *= hq;
        }
        const double lhs = volq *
                           block_sum(cells, [&](std::size_t fl) {
                               double x[8];
                               std::size_t rem = fl;
                               for (int d = 0; d < n; ++d) {
                                   const int i = static_cast<int>(rem % quad_points);
                                   rem /= quad_points;
                                   x[d] = -srad + (i + 0.5) * hq;
                               }
                               const double w = zeta1.value_x(x);
                               return w == 0.0 ? 0.0 : fam.evaluate(x, n) * w;
                           });

        // rhs: int zeta_R^{-1/(m-1)} |Delta zeta_R|^{m'} over the half-space
        const int qt = std::max(quad_points / 2, 24);
        const double hqt = srad / qt;
        std::size_t cells_t = cells * static_cast<std::size_t>(qt);
        const double rhs = volq * hqt *
                           block_sum(cells_t, [&](std::size_t fl) {
                               double x[8];
                               std::size_t rem = fl;
                               for (int d = 0; d < n; ++d) {
                                   const int i = static_cast<int>(rem % quad_points);
                                   rem /= quad_points;
                                   x[d] = -srad + (i + 0.5) * hq;
                               }
                               const double t = (static_cast<int>(rem) + 0.5) * hqt;
                               const double zx = zeta1.value_x(x);
                               const double zt = zeta1.value_t(t);
                               const double z = zx * zt;
                               if (z <= 0.0) return 0.0;
                               const double lap = zeta1.laplacian(x, t);
                               if (lap == 0.0) return 0.0;
                               // |Delta|^{m'} z^{-1/(m-1)} in log space
                               return std::exp(mprime * std::log(std::abs(lap)) - inv_m1 * std::log(z));
                           });
        rep.rows.push_back({R, lhs, rhs});
    }

    std::vector<double> lx, ly;
    for (const ProbeRow& r : rep.rows)
        if (r.lhs > 0 && r.rhs > 0) {
            lx.push_back(std::log(r.R));
            ly.push_back(std::log(r.lhs / r.rhs));
        }
    if (lx.size() >= 2) {
        const LineFit lf = fit_line(lx, ly);
        rep.fitted_exponent = lf.slope;
        rep.fit_stderr = lf.stderr_slope;
        rep.signal = lf.slope > 0.0;
    }
    return rep;
}

HalfballReport halfball_probe(const HalfSpaceField& u, const ProblemSpec& spec,
                              const std::vector<double>& R_sweep) {
    const GridSpec& g = u.grid;
    const Exponents e = derive_exponents(spec);
    const double m = to_double(spec.m);
    const int n = g.n;
    const double alpha = 2.0 / ((n + 1) * (m - 1.0)) - 1.0;
    const double target = -(n - 1) + 2.0 / (m - 1.0);
    const double mu = g.cell_measure_bulk();
    const std::vector<double> xs = g.x_coords();
    const std::size_t ss = u.slice_size();
    // half of the (n+1)-ball volume
    const double vol_unit = 0.5 * std::pow(M_PI, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 3));

    HalfballReport rep;
    rep.target_exponent = target;
    for (double R : R_sweep) {
        if (R > std::min(g.L, g.T))
            throw std::invalid_argument("halfball_probe: R exceeds the truncation box");
        double integral = 0.0;
        for (int j = 0; j < g.nt; ++j) {
            const double t = g.t_level(j);
            if (t > R) break;
            const double* s = u.slice(j);
            integral += block_sum(ss, [&](std::size_t fl) {
                int idx[8];
                decode_boundary(g, fl, idx);
                double r2 = t * t;
                for (int d = 0; d < n; ++d) r2 += xs[idx[d]] * xs[idx[d]];
                return r2 <= R * R ? s[fl] : 0.0;
            });
        }
        integral *= mu;
        const double vol = vol_unit * std::pow(R, n + 1);
        rep.rows.push_back({R, std::pow(vol, alpha) * integral, std::pow(R, target)});
    }
    std::vector<double> lx, ly;
    for (const HalfballRow& r : rep.rows)
        if (r.Q > 0) {
            lx.push_back(std::log(r.R));
            ly.push_back(std::log(r.Q));
        }
    if (lx.size() >= 2) {
        const LineFit lf = fit_line(lx, ly);
        rep.fitted_exponent = lf.slope;
        rep.fit_stderr = lf.stderr_slope;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Discrete identity defects
// ---------------------------------------------------------------------------

namespace {

// L2 norm of the pointwise identity defect over a fixed physical region;
// the integral norm is stable against the sampling points shifting between
// refinement levels, unlike the sup.
double defect_over_region(const HalfSpaceField& lap, const HalfSpaceField* F, int sign,
                          double margin_x, double margin_t) {
    const GridSpec& g = lap.grid;
    const std::vector<double> xs = g.x_coords();
    const std::size_t ss = lap.slice_size();
    double acc = 0.0;
    for (int j = 1; j + 1 < g.nt; ++j) {
        const double t = g.t_level(j);
        if (t < margin_t || t > g.T - margin_t) continue;
        const double* s = lap.slice(j);
        const double* fv = F ? F->slice(j) : nullptr;
        acc += block_sum(ss, [&](std::size_t fl) {
            int idx[8];
            decode_boundary(g, fl, idx);
            for (int dd = 0; dd < g.n; ++dd) {
                const double x = xs[idx[dd]];
                if (idx[dd] == 0 || idx[dd] == g.nx - 1) return 0.0;
                if (std::abs(x) > g.L - margin_x) return 0.0;
            }
            const double want = fv ? sign * fv[fl] : 0.0;
            const double d = s[fl] - want;
            return d * d;
        });
    }
    return std::sqrt(acc * g.cell_measure_bulk());
}

}  // namespace

double harmonicity_defect(const HalfSpaceField& u, double margin_x, double margin_t) {
    const HalfSpaceField lap = fd_laplacian(u);
    return defect_over_region(lap, nullptr, 0, margin_x, margin_t);
}

double green_identity_defect(const HalfSpaceField& GF, const HalfSpaceField& F, int sign,
                             double margin_x, double margin_t) {
    const HalfSpaceField lap = fd_laplacian(GF);
    return defect_over_region(lap, &F, sign, margin_x, margin_t);
}

std::vector<double> plane_rotation(int n, int a1, int a2, double theta) {
    std::vector<double> R(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) R[i * n + i] = 1.0;
    R[a1 * n + a1] = std::cos(theta);
    R[a2 * n + a2] = std::cos(theta);
    R[a1 * n + a2] = -std::sin(theta);
    R[a2 * n + a1] = std::sin(theta);
    return R;
}

}  // namespace hslab
