#pragma once

#include <boost/rational.hpp>
#include <optional>
#include <string>
#include <vector>

#include "hslab/grid.hpp"

namespace hslab {

// Exponent arithmetic is exact-rational so identities like
// q_star*(n+1-q) == (n+1)*q can be asserted without tolerance.
using Rational = boost::rational<long long>;

double to_double(const Rational& r);
Rational rational_from_string(const std::string& s);   // "7/3" or "3" or "1.5"
Rational rational_from_double(double x);                // small-denominator match
std::string rational_to_string(const Rational& r);

struct ProblemSpec {
    int n = 3;           // boundary dimension, >= 2
    Rational m{3, 1};    // interior nonlinearity exponent, > 1
    double a = 1.0;      // interior coefficient
    double b = 1.0;      // boundary coefficient

    void validate() const;  // throws std::invalid_argument
};

struct Exponents {
    Rational eta;         // (m+1)/2
    Rational q;           // (n+1)(m-1)/(m+1)
    Rational q_star;      // (n+1)q/(n+1-q)
    Rational p_data;      // nq/(n+1)
    Rational m_crit;      // (n+1)/(n-1)
    Rational M_crit;      // (n+3)/(n-1)
    Rational decay_rate;  // 2/(m-1)
    Rational data_decay;  // (m+1)/(m-1)
    bool supercritical = false;  // m > m_crit
};

Exponents derive_exponents(const ProblemSpec& spec);
bool validate_supercritical(const ProblemSpec& spec);

struct CriticalCurveRow {
    int n;
    Rational m_c;
    Rational M_c;
};
std::vector<CriticalCurveRow> critical_curves(int n_lo, int n_hi);

enum class DataKind {
    Gaussian,        // A exp(-|x-o|^2 / w^2)
    IndicatorBall,   // A on |x-o| <= r0
    PowerDecay,      // A / (1 + |x-o|^k), k >= 0
    PureHomogeneous, // A |x-o|^{-d}, d = (m+1)/(m-1)
    RadialStep,      // A on r<=r0, A*level2 on r0<r<=r1, 0 beyond
    CustomTable,     // radial lookup table with linear interpolation
};

struct BoundaryDataFamily {
    DataKind kind = DataKind::Gaussian;
    double amplitude = 1.0;
    double width = 1.0;           // gaussian
    double radius = 1.0;          // indicator / radial-step inner radius
    double radius2 = 2.0;         // radial-step outer radius
    double level2 = 0.5;          // radial-step second plateau factor
    double k = 1.0;               // power-decay exponent
    double decay_exponent = 2.0;  // pure-homogeneous exponent d
    std::vector<double> offset;   // center x0, defaults to the origin
    std::vector<double> table_r;  // custom-table radii (increasing)
    std::vector<double> table_v;  // custom-table values

    void validate(int n) const;
    // Radius is computed from sorted squared components so sampled fields
    // are bitwise invariant under lattice rotations when offset = 0.
    double evaluate(const double* x, int n) const;
    BoundaryField sample(const GridSpec& g) const;
    bool radial() const { return offset_is_zero(); }
    bool offset_is_zero() const;
};

struct ScaledField {
    BoundaryField field;
    bool clipped = false;  // resampling left the truncation domain somewhere
};
struct ScaledHalfSpaceField {
    HalfSpaceField field;
    bool clipped = false;
};

// f_lambda(x) = lambda^{(m+1)/(m-1)} f(lambda x), resampled on f's grid.
ScaledField scale_boundary_data(const BoundaryField& f, double lambda, const ProblemSpec& spec);
// u_lambda(x,t) = lambda^{2/(m-1)} u(lambda x, lambda t).
ScaledHalfSpaceField scale_solution(const HalfSpaceField& u, double lambda, const ProblemSpec& spec);

}  // namespace hslab
