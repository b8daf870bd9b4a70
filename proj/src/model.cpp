#include "hslab/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hslab {

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("rational: non-finite value");
    // continued-fraction expansion, accepted only if it reproduces x closely
    const long long max_den = 1000000;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double v = x;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(v);
        if (fl > 4e18 || fl < -4e18) break;
        const long long a = static_cast<long long>(fl);
        const long long p2 = a * p1 + p0;
        const long long q2 = a * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        const double rem = v - fl;
        if (rem < 1e-13) break;
        v = 1.0 / rem;
    }
    if (q1 == 0) throw std::invalid_argument("rational: cannot represent value");
    Rational r(p1, q1);
    if (std::abs(to_double(r) - x) > 1e-9 * std::max(1.0, std::abs(x)))
        throw std::invalid_argument("rational: value is not a small rational; pass it as \"p/q\"");
    return r;
}

Rational rational_from_string(const std::string& s) {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        const long long p = std::stoll(s.substr(0, slash));
        const long long q = std::stoll(s.substr(slash + 1));
        if (q == 0) throw std::invalid_argument("rational: zero denominator");
        return Rational(p, q);
    }
    if (s.find('.') != std::string::npos || s.find('e') != std::string::npos ||
        s.find('E') != std::string::npos)
        return rational_from_double(std::stod(s));
    return Rational(std::stoll(s), 1);
}

std::string rational_to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

void ProblemSpec::validate() const {
    if (n < 2) throw std::invalid_argument("problem: n must be >= 2");
    if (m <= Rational(1)) throw std::invalid_argument("problem: m must be > 1");
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("problem: coefficients must be finite");
}

Exponents derive_exponents(const ProblemSpec& spec) {
    spec.validate();
    Exponents e;
    const Rational one(1), two(2);
    const Rational np1(spec.n + 1);
    e.eta = (spec.m + one) / two;
    e.q = np1 * (spec.m - one) / (spec.m + one);
    e.q_star = np1 * e.q / (np1 - e.q);
    e.p_data = Rational(spec.n) * e.q / np1;
    e.m_crit = Rational(spec.n + 1, spec.n - 1);
    e.M_crit = Rational(spec.n + 3, spec.n - 1);
    e.decay_rate = two / (spec.m - one);
    e.data_decay = (spec.m + one) / (spec.m - one);
    e.supercritical = spec.m > e.m_crit;
    return e;
}

bool validate_supercritical(const ProblemSpec& spec) {
    spec.validate();
    return spec.m > Rational(spec.n + 1, spec.n - 1);
}

std::vector<CriticalCurveRow> critical_curves(int n_lo, int n_hi) {
    if (n_lo < 2 || n_hi < n_lo) throw std::invalid_argument("critical_curves: need 2 <= n_lo <= n_hi");
    std::vector<CriticalCurveRow> rows;
    for (int n = n_lo; n <= n_hi; ++n)
        rows.push_back({n, Rational(n + 1, n - 1), Rational(n + 3, n - 1)});
    return rows;
}

bool BoundaryDataFamily::offset_is_zero() const {
    for (double o : offset)
        if (o != 0.0) return false;
    return true;
}

void BoundaryDataFamily::validate(int n) const {
    if (!std::isfinite(amplitude)) throw std::invalid_argument("data: amplitude must be finite");
    if (!offset.empty() && static_cast<int>(offset.size()) != n)
        throw std::invalid_argument("data: offset dimension mismatch");
    switch (kind) {
        case DataKind::Gaussian:
            if (width <= 0) throw std::invalid_argument("data: gaussian width must be positive");
            break;
        case DataKind::IndicatorBall:
            if (radius <= 0) throw std::invalid_argument("data: indicator radius must be positive");
            break;
        case DataKind::PowerDecay:
            if (k < 0) throw std::invalid_argument("data: power-decay requires k >= 0");
            break;
        case DataKind::PureHomogeneous:
            if (decay_exponent <= 0) throw std::invalid_argument("data: decay exponent must be positive");
            break;
        case DataKind::RadialStep:
            if (radius <= 0 || radius2 < radius)
                throw std::invalid_argument("data: radial-step needs 0 < radius <= radius2");
            break;
        case DataKind::CustomTable:
            if (table_r.size() != table_v.size() || table_r.empty())
                throw std::invalid_argument("data: custom-table needs matching radii/values");
            if (!std::is_sorted(table_r.begin(), table_r.end()))
                throw std::invalid_argument("data: custom-table radii must be increasing");
            break;
    }
}

double BoundaryDataFamily::evaluate(const double* x, int n) const {
    double sq[8];
    for (int d = 0; d < n; ++d) {
        const double c = offset.empty() ? x[d] : x[d] - offset[d];
        sq[d] = c * c;
    }
    std::sort(sq, sq + n);
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) r2 += sq[d];
    const double r = std::sqrt(r2);
    switch (kind) {
        case DataKind::Gaussian:
            return amplitude * std::exp(-r2 / (width * width));
        case DataKind::IndicatorBall:
            return r <= radius ? amplitude : 0.0;
        case DataKind::PowerDecay:
            return amplitude / (1.0 + std::pow(r, k));
        case DataKind::PureHomogeneous:
            return amplitude * std::pow(std::max(r, 1e-12), -decay_exponent);
        case DataKind::RadialStep:
            if (r <= radius) return amplitude;
            if (r <= radius2) return amplitude * level2;
            return 0.0;
        case DataKind::CustomTable: {
            if (r <= table_r.front()) return amplitude * table_v.front();
            if (r >= table_r.back()) return 0.0;
            const auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
            const std::size_t i = static_cast<std::size_t>(it - table_r.begin());
            const double w = (r - table_r[i - 1]) / (table_r[i] - table_r[i - 1]);
            return amplitude * ((1.0 - w) * table_v[i - 1] + w * table_v[i]);
        }
    }
    return 0.0;
}

BoundaryField BoundaryDataFamily::sample(const GridSpec& g) const {
    validate(g.n);
    BoundaryField f(g);
    const std::vector<double> xs = g.x_coords();
    const std::size_t cells = g.boundary_cells();
#pragma omp parallel for schedule(static)
    for (long long fl = 0; fl < static_cast<long long>(cells); ++fl) {
        int idx[8];
        decode_boundary(g, static_cast<std::size_t>(fl), idx);
        double x[8];
        for (int d = 0; d < g.n; ++d) x[d] = xs[idx[d]];
        f.v[static_cast<std::size_t>(fl)] = evaluate(x, g.n);
    }
    return f;
}

ScaledField scale_boundary_data(const BoundaryField& f, double lambda, const ProblemSpec& spec) {
    if (!(lambda > 0)) throw std::invalid_argument("scale_boundary_data: lambda must be positive");
    const Exponents e = derive_exponents(spec);
    const double pref = std::pow(lambda, to_double(e.data_decay));
    const GridSpec& g = f.grid;
    ScaledField out;
    out.field = BoundaryField(g);
    const std::vector<double> xs = g.x_coords();
    const std::size_t cells = g.boundary_cells();
    bool clipped = false;
#pragma omp parallel for schedule(static) reduction(|| : clipped)
    for (long long fl = 0; fl < static_cast<long long>(cells); ++fl) {
        int idx[8];
        decode_boundary(g, static_cast<std::size_t>(fl), idx);
        std::vector<double> lx(g.n);
        for (int d = 0; d < g.n; ++d) lx[d] = lambda * xs[idx[d]];
        const InterpResult r = interpolate(f, lx);
        clipped = clipped || r.clipped;
        out.field.v[static_cast<std::size_t>(fl)] = pref * r.value;
    }
    out.clipped = clipped;
    return out;
}

ScaledHalfSpaceField scale_solution(const HalfSpaceField& u, double lambda, const ProblemSpec& spec) {
    if (!(lambda > 0)) throw std::invalid_argument("scale_solution: lambda must be positive");
    const Exponents e = derive_exponents(spec);
    const double pref = std::pow(lambda, to_double(e.decay_rate));
    const GridSpec& g = u.grid;
    ScaledHalfSpaceField out;
    out.field = HalfSpaceField(g);
    const std::vector<double> xs = g.x_coords();
    const std::size_t ss = u.slice_size();
    bool clipped = false;
    for (int j = 0; j < g.nt; ++j) {
        const double lt = lambda * g.t_level(j);
        double* o = out.field.slice(j);
        bool slice_clip = false;
#pragma omp parallel for schedule(static) reduction(|| : slice_clip)
        for (long long fl = 0; fl < static_cast<long long>(ss); ++fl) {
            int idx[8];
            decode_boundary(g, static_cast<std::size_t>(fl), idx);
            std::vector<double> lx(g.n);
            for (int d = 0; d < g.n; ++d) lx[d] = lambda * xs[idx[d]];
            const InterpResult r = interpolate(u, lx, lt);
            slice_clip = slice_clip || r.clipped;
            o[fl] = pref * r.value;
        }
        clipped = clipped || slice_clip;
    }
    out.clipped = clipped;
    return out;
}

}  // namespace hslab
