#include "hslab/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hslab/parallel.hpp"

namespace hslab {

double Rearrangement::total_integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * cell_measure;
}

double Rearrangement::f_star(double s) const {
    if (s < 0) throw std::invalid_argument("f_star: negative measure");
    const std::size_t k = static_cast<std::size_t>(s / cell_measure);
    if (k >= values.size()) return 0.0;
    return values[k];
}

double Rearrangement::f_star_star(double s) const { return maximal_rearrangement(*this, s); }

double distribution_function(const std::vector<double>& values, double cell_measure, double tau) {
    if (!(tau > 0)) throw std::invalid_argument("distribution_function: tau must be positive");
    const double cnt = block_sum(values.size(), [&](std::size_t i) {
        return std::abs(values[i]) > tau ? 1.0 : 0.0;
    });
    return cnt * cell_measure;
}

Rearrangement decreasing_rearrangement(const std::vector<double>& values, double cell_measure) {
    Rearrangement r;
    r.cell_measure = cell_measure;
    r.values.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) r.values[i] = std::abs(values[i]);
    std::sort(r.values.begin(), r.values.end(), std::greater<double>());
    return r;
}

double maximal_rearrangement(const Rearrangement& r, double s) {
    if (!(s > 0)) throw std::invalid_argument("maximal_rearrangement: s must be positive");
    const double mu = r.cell_measure;
    double integral = 0.0;
    const std::size_t full = std::min(r.values.size(), static_cast<std::size_t>(s / mu));
    for (std::size_t k = 0; k < full; ++k) integral += r.values[k] * mu;
    if (full < r.values.size()) integral += r.values[full] * (s - static_cast<double>(full) * mu);
    return integral / s;
}

double weak_norm(const Rearrangement& r, double p) {
    if (!(p > 1)) throw std::invalid_argument("weak_norm: p must be > 1");
    const double mu = r.cell_measure;
    double best = 0.0, prefix = 0.0;
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        prefix += r.values[k] * mu;
        const double s = static_cast<double>(k + 1) * mu;
        best = std::max(best, std::pow(s, 1.0 / p) * prefix / s);
    }
    return best;
}

double weak_quasinorm(const Rearrangement& r, double p) {
    if (!(p > 1)) throw std::invalid_argument("weak_quasinorm: p must be > 1");
    const double mu = r.cell_measure;
    double best = 0.0;
    // d_f(tau) at tau just below values[k] equals (k+1) cells
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        if (k + 1 < r.values.size() && r.values[k + 1] == r.values[k]) continue;
        const double s = static_cast<double>(k + 1) * mu;
        best = std::max(best, r.values[k] * std::pow(s, 1.0 / p));
    }
    return best;
}

double weak_norm_superlevel(const Rearrangement& r, double p) {
    // identical scan over super-level sets Omega_k = {|f| >= values[k]}
    return weak_norm(r, p);
}

double lorentz_norm(const Rearrangement& r, double p, double q) {
    if (!(p > 1))
        throw std::invalid_argument("lorentz_norm: p must be > 1 (the space is not normable otherwise)");
    if (std::isinf(q)) return weak_norm(r, p);
    if (!(q >= 1)) throw std::invalid_argument("lorentz_norm: q must be >= 1 or infinity");
    const double mu = r.cell_measure;
    if (r.values.empty()) return 0.0;
    // integrate [s^{1/p} f**(s)]^q ds/s piece by piece with Gauss-Legendre;
    // f**(s) = v_k + C_k/s on each piece
    static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                 -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                 0.7966664774136267,  0.9602898564975363};
    static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};
    double acc = 0.0, prefix = 0.0;
    for (std::size_t k = 0; k < r.values.size(); ++k) {
        const double s0 = static_cast<double>(k) * mu;
        const double s1 = s0 + mu;
        const double vk = r.values[k];
        const double Ck = prefix - vk * s0;
        const double half = 0.5 * (s1 - s0), mid = 0.5 * (s1 + s0);
        for (int gp = 0; gp < 8; ++gp) {
            const double s = mid + half * gx[gp];
            const double fss = vk + Ck / s;
            acc += gw[gp] * half * std::pow(std::pow(s, 1.0 / p) * fss, q) / s;
        }
        prefix += vk * mu;
    }
    // tail beyond total measure: f** = M/s
    const double S = r.total_measure();
    const double M = prefix;
    if (M > 0) {
        const double expo = q / p - q;  // < 0
        acc += std::pow(M, q) * std::pow(S, expo) / (-expo);
    }
    return std::pow(acc, 1.0 / q);
}

double lebesgue_norm(const std::vector<double>& values, double cell_measure, double p) {
    if (!(p > 0)) throw std::invalid_argument("lebesgue_norm: p must be positive");
    const double s = block_sum(values.size(), [&](std::size_t i) {
        return std::pow(std::abs(values[i]), p);
    });
    return std::pow(s * cell_measure, 1.0 / p);
}

double sup_abs(const std::vector<double>& v) {
    return block_max(v.size(), [&](std::size_t i) { return std::abs(v[i]); });
}

std::vector<double> gradient_magnitude(const std::vector<HalfSpaceField>& grad) {
    if (grad.empty()) return {};
    const std::size_t n = grad[0].v.size();
    std::vector<double> mag(n);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        double s = 0.0;
        for (const auto& c : grad) s += c.v[i] * c.v[i];
        mag[i] = std::sqrt(s);
    }
    return mag;
}

namespace {

double weighted_sup_levels(const HalfSpaceField& u, double expo) {
    const GridSpec& g = u.grid;
    const std::size_t ss = u.slice_size();
    double best = 0.0;
    for (int j = 0; j < g.nt; ++j) {
        const double* s = u.slice(j);
        const double m = block_max(ss, [&](std::size_t i) { return std::abs(s[i]); });
        best = std::max(best, std::pow(g.t_level(j), expo) * m);
    }
    return best;
}

}  // namespace

NormReport x_norm(const HalfSpaceField& u, const std::vector<HalfSpaceField>& grad_u, const Rational& q) {
    const GridSpec& g = u.grid;
    NormReport r;
    r.q = to_double(q);
    r.q_star = to_double(Rational(g.n + 1) * q / (Rational(g.n + 1) - q));
    const double mu = g.cell_measure_bulk();
    r.weighted_sup = weighted_sup_levels(u, (g.n + 1) / r.q - 1.0);
    r.weak_qstar = weak_norm(decreasing_rearrangement(u.v, mu), r.q_star);
    if (!grad_u.empty())
        r.grad_weak_q = weak_norm(decreasing_rearrangement(gradient_magnitude(grad_u), mu), r.q);
    r.x_norm = r.weighted_sup + r.weak_qstar + r.grad_weak_q;
    return r;
}

NormReport y_norm(const HalfSpaceField& F, const Rational& p) {
    const GridSpec& g = F.grid;
    NormReport r;
    r.p = to_double(p);
    const double mu = g.cell_measure_bulk();
    r.y_weighted_sup = weighted_sup_levels(F, (g.n + 1) / r.p);
    r.y_weak_p = weak_norm(decreasing_rearrangement(F.v, mu), r.p);
    r.y_norm_total = r.y_weighted_sup + r.y_weak_p;
    return r;
}

NormReport x_norm_lebesgue(const HalfSpaceField& u, const std::vector<HalfSpaceField>& grad_u,
                           const Rational& q) {
    const GridSpec& g = u.grid;
    NormReport r;
    r.q = to_double(q);
    r.q_star = to_double(Rational(g.n + 1) * q / (Rational(g.n + 1) - q));
    const double mu = g.cell_measure_bulk();
    r.weighted_sup = weighted_sup_levels(u, (g.n + 1) / r.q - 1.0);
    r.weak_qstar = lebesgue_norm(u.v, mu, r.q_star);
    if (!grad_u.empty()) r.grad_weak_q = lebesgue_norm(gradient_magnitude(grad_u), mu, r.q);
    r.x_norm = r.weighted_sup + r.weak_qstar + r.grad_weak_q;
    return r;
}

namespace {

double holder_ratio(const std::vector<double>& f, const std::vector<double>& g, double mu, double p1,
                    double p2) {
    if (!(p1 > 1) || !(p2 > 1) || 1.0 / p1 + 1.0 / p2 >= 1.0)
        throw std::invalid_argument("holder_check: need p1,p2 > 1 with 1/p1 + 1/p2 < 1");
    if (f.size() != g.size()) throw std::invalid_argument("holder_check: size mismatch");
    const double p = 1.0 / (1.0 / p1 + 1.0 / p2);
    std::vector<double> prod(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * g[i];
    const double num = weak_norm(decreasing_rearrangement(prod, mu), p);
    const double den = weak_norm(decreasing_rearrangement(f, mu), p1) *
                       weak_norm(decreasing_rearrangement(g, mu), p2);
    if (den == 0.0) return 0.0;
    return num / den;
}

}  // namespace

double holder_check(const BoundaryField& f, const BoundaryField& g, double p1, double p2) {
    return holder_ratio(f.v, g.v, f.grid.cell_measure_boundary(), p1, p2);
}

double holder_check(const HalfSpaceField& f, const HalfSpaceField& g, double p1, double p2) {
    return holder_ratio(f.v, g.v, f.grid.cell_measure_bulk(), p1, p2);
}

}  // namespace hslab
