#include "hslab/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "hslab/parallel.hpp"

namespace hslab {

void SolverConfig::validate() const {
    if (!(tol > 0)) throw std::invalid_argument("solver: tol must be positive");
    if (max_iter < 2) throw std::invalid_argument("solver: max_iter must be >= 2");
    if (!(divergence_factor > 1)) throw std::invalid_argument("solver: divergence_factor must be > 1");
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "converged";
        case Verdict::Diverged: return "diverged";
        case Verdict::MaxIter: return "max_iter";
    }
    return "unknown";
}

void signed_power(std::vector<double>& v, double e) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(v.size()); ++i) {
        const double a = std::abs(v[i]);
        v[i] = a == 0.0 ? 0.0 : std::pow(a, e - 1.0) * v[i];
    }
}

namespace {

bool all_finite(const std::vector<double>& v) {
    bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
    for (long long i = 0; i < static_cast<long long>(v.size()); ++i) ok = ok && std::isfinite(v[i]);
    return ok;
}

NormReport x_norm_of(const HalfSpaceField& u, const Rational& q) {
    return x_norm(u, fd_gradient(u), q);
}

}  // namespace

HalfSpaceField picard_map(const HalfSpaceField& u, const HalfSpaceField& Nf,
                          const ProblemSpec& spec, const PicardOperators& ops) {
    const Exponents e = derive_exponents(spec);
    const double eta = to_double(e.eta);
    const double m = to_double(spec.m);

    // boundary nonlinearity on the extrapolated trace
    BoundaryField tr = boundary_trace(u);
    signed_power(tr.v, eta);
    for (double& x : tr.v) x *= spec.b;
    HalfSpaceField out = ops.N.apply(tr);

    // bulk nonlinearity
    HalfSpaceField Fm = u;
    signed_power(Fm.v, m);
    for (double& x : Fm.v) x *= spec.a;
    HalfSpaceField GFm = ops.G.apply(Fm);

#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(out.v.size()); ++i)
        out.v[i] += GFm.v[i] + Nf.v[i];

    if (!all_finite(out.v))
        throw std::runtime_error("picard_map: non-finite values in the iterate");
    return out;
}

SolveResult picard_solve(const BoundaryField& f, const ProblemSpec& spec, const GridSpec& grid,
                         const KernelConstants& consts, const OperatorConfig& opcfg,
                         const SolverConfig& scfg, const std::optional<HalfSpaceField>& init,
                         const std::optional<Rational>& secondary_p0) {
    scfg.validate();
    const Exponents e = derive_exponents(spec);
    PicardOperators ops(grid, consts, opcfg);
    const HalfSpaceField Nf = ops.N.apply(f);

    std::optional<Rational> q2;
    if (secondary_p0) {
        if (!(*secondary_p0 > Rational(1) && *secondary_p0 < Rational(grid.n)))
            throw std::invalid_argument("higher integrability: need 1 < p0 < n");
        q2 = Rational(grid.n + 1) * (*secondary_p0) / Rational(grid.n);
    }

    SolveResult res;
    res.trace.has_secondary = q2.has_value();
    if (q2) res.trace.secondary_q = to_double(*q2);

    HalfSpaceField u = init ? *init : Nf;
    double norm_u = x_norm_of(u, e.q).x_norm;
    const double norm_first = norm_u;
    res.trace.rows.push_back({1, norm_u, 0.0, 0.0, 0.0});

    double prev_diff = 0.0;
    int grow_streak = 0;
    double prev_norm = norm_u;
    res.trace.verdict = Verdict::MaxIter;

    for (int it = 2; it <= scfg.max_iter; ++it) {
        HalfSpaceField next = picard_map(u, Nf, spec, ops);
        HalfSpaceField w = next;
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(w.v.size()); ++i) w.v[i] -= u.v[i];

        const double diff = x_norm_of(w, e.q).x_norm;
        const double norm_next = x_norm_of(next, e.q).x_norm;
        IterationRecord rec;
        rec.iteration = it;
        rec.x_norm = norm_next;
        rec.diff_norm = diff;
        rec.ratio = prev_diff > 0.0 ? diff / prev_diff : 0.0;
        if (q2) rec.secondary_norm = x_norm_of(w, *q2).x_norm;
        res.trace.rows.push_back(rec);

        u = std::move(next);
        const double rel = diff / std::max(norm_next, 1e-300);
        res.trace.final_relative_diff = rel;

        if (norm_next > prev_norm) ++grow_streak; else grow_streak = 0;
        prev_norm = norm_next;
        prev_diff = diff;

        if (rel < scfg.tol) {
            res.trace.verdict = Verdict::Converged;
            break;
        }
        if (norm_next > scfg.divergence_factor * std::max(norm_first, 1e-300) ||
            grow_streak >= scfg.divergence_streak) {
            res.trace.verdict = Verdict::Diverged;
            break;
        }
    }

    // fitted geometric factor of the successive differences
    std::vector<double> ratios;
    for (const auto& r : res.trace.rows)
        if (r.ratio > 0.0) ratios.push_back(std::log(r.ratio));
    if (!ratios.empty()) {
        double s = 0.0;
        for (double r : ratios) s += r;
        res.trace.fitted_decay_factor = std::exp(s / static_cast<double>(ratios.size()));
    }
    res.u = std::move(u);
    return res;
}

ResidualReport residual(const HalfSpaceField& u, const BoundaryField& f, const ProblemSpec& spec,
                        const PicardOperators& ops) {
    const Exponents e = derive_exponents(spec);
    const HalfSpaceField Nf = ops.N.apply(f);
    HalfSpaceField Pu = picard_map(u, Nf, spec, ops);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(Pu.v.size()); ++i) Pu.v[i] = u.v[i] - Pu.v[i];
    ResidualReport rep;
    rep.norm = x_norm(Pu, fd_gradient(Pu), e.q);
    const double nu = x_norm(u, fd_gradient(u), e.q).x_norm;
    rep.relative = rep.norm.x_norm / std::max(nu, 1e-300);
    return rep;
}

ThresholdBracket threshold_search(const BoundaryDataFamily& shape, const ProblemSpec& spec,
                                  const GridSpec& grid, const KernelConstants& consts,
                                  const OperatorConfig& opcfg, const SolverConfig& scfg,
                                  double bracket_ratio, double amplitude_cap) {
    const Exponents e = derive_exponents(spec);
    // unit-normalize the shape in the data norm L^{nq/(n+1),inf}
    BoundaryField probe = shape.sample(grid);
    const double shape_norm =
        weak_norm(decreasing_rearrangement(probe.v, grid.cell_measure_boundary()), to_double(e.p_data));
    if (!(shape_norm > 0)) throw std::invalid_argument("threshold_search: zero data shape");

    auto converges = [&](double amplitude) {
        BoundaryDataFamily fam = shape;
        fam.amplitude *= amplitude / shape_norm;
        BoundaryField f = fam.sample(grid);
        try {
            SolveResult r = picard_solve(f, spec, grid, consts, opcfg, scfg);
            return r.trace.verdict == Verdict::Converged;
        } catch (const std::runtime_error&) {
            return false;  // overflowed iterate counts as divergence
        }
    };

    ThresholdBracket br;
    double lo = 0.0, hi = 0.0;
    double amp = 1e-2;
    if (!converges(amp)) {
        hi = amp;
        while (amp > 1e-12) {
            amp *= 0.5;
            if (converges(amp)) {
                lo = amp;
                break;
            }
            hi = amp;
        }
        if (lo == 0.0) throw std::runtime_error("threshold_search: no convergent amplitude found");
    } else {
        lo = amp;
        while (amp < amplitude_cap) {
            amp *= 2.0;
            if (!converges(amp)) {
                hi = amp;
                break;
            }
            lo = amp;
        }
        if (hi == 0.0) {
            br.converged_amplitude = lo;
            br.open_ended = true;
            return br;
        }
    }
    while (hi / lo > bracket_ratio) {
        const double mid = std::sqrt(lo * hi);
        if (converges(mid)) lo = mid; else hi = mid;
    }
    br.converged_amplitude = lo;
    br.diverged_amplitude = hi;
    return br;
}

IterationTrace higher_integrability_trace(const BoundaryField& f, const Rational& p0,
                                          const ProblemSpec& spec, const GridSpec& grid,
                                          const KernelConstants& consts, const OperatorConfig& opcfg,
                                          const SolverConfig& scfg) {
    SolveResult r = picard_solve(f, spec, grid, consts, opcfg, scfg, std::nullopt, p0);
    return r.trace;
}

}  // namespace hslab
