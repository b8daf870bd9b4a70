#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hslab {

// Cell-centered discretization of the truncated half-space [-L,L]^n x (0,T]
// and of its boundary [-L,L]^n. No sample sits on {t=0}; the x-grid is
// exactly symmetric under reflection (upper-half coordinates are defined as
// negations of the lower half).
struct GridSpec {
    int n = 3;       // boundary dimension
    double L = 1.0;  // half-width of the x-box
    int nx = 8;      // cells per x-axis (even)
    double T = 1.0;  // t-extent
    int nt = 4;      // t-levels

    double hx() const { return 2.0 * L / nx; }
    double ht() const { return T / nt; }
    double t_level(int j) const { return (j + 0.5) * ht(); }  // j = 0..nt-1
    double cell_measure_boundary() const;                     // hx^n
    double cell_measure_bulk() const;                         // hx^n * ht

    std::size_t boundary_cells() const;  // nx^n
    std::size_t bulk_cells() const;      // nx^n * nt

    // Exact-reflection x coordinates, x[i] == -x[nx-1-i] bitwise.
    std::vector<double> x_coords() const;

    void validate() const;  // throws std::invalid_argument
    bool operator==(const GridSpec&) const = default;
};

struct BoundaryField {
    GridSpec grid;
    std::vector<double> v;  // nx^n values, row-major, axis 0 fastest

    BoundaryField() = default;
    explicit BoundaryField(const GridSpec& g);
    double& at(std::size_t flat) { return v[flat]; }
    double at(std::size_t flat) const { return v[flat]; }
};

struct HalfSpaceField {
    GridSpec grid;
    std::vector<double> v;  // nx^n * nt values; x fastest, t slowest

    HalfSpaceField() = default;
    explicit HalfSpaceField(const GridSpec& g);
    std::size_t slice_size() const { return grid.boundary_cells(); }
    const double* slice(int j) const { return v.data() + slice_size() * j; }
    double* slice(int j) { return v.data() + slice_size() * j; }
};

// Even extension across {t=0}: 2*nt levels, level s holds t = (s - nt + 1/2)*ht.
struct EvenExtension {
    GridSpec grid;
    std::vector<double> v;
    double t_level(int s) const { return (s - grid.nt + 0.5) * grid.ht(); }
};

EvenExtension even_extension(const HalfSpaceField& F);
HalfSpaceField restrict_positive(const EvenExtension& E);

// Multi-index helpers for the boundary lattice.
void decode_boundary(const GridSpec& g, std::size_t flat, int* idx);
std::size_t encode_boundary(const GridSpec& g, const int* idx);

struct InterpResult {
    double value = 0.0;
    bool clipped = false;  // point outside the truncation box -> value 0
};

// Multilinear interpolation; exact on multilinear functions in the interior
// hull of cell centers, constant extension in the outer half-cell margin,
// zero with `clipped` outside the box.
InterpResult interpolate(const BoundaryField& f, const std::vector<double>& x);
InterpResult interpolate(const HalfSpaceField& u, const std::vector<double>& x, double t);

// f(Rx) by interpolation; exact index permutation when R is a signed
// permutation matrix. R is row-major n x n and must satisfy R R^T = I
// within 1e-12.
BoundaryField rotate_field(const BoundaryField& f, const std::vector<double>& R);
// Rotations of the half-space that leave the vertical axis fixed act on x only.
HalfSpaceField rotate_field(const HalfSpaceField& u, const std::vector<double>& R);

bool is_signed_permutation(const std::vector<double>& R, int n);

struct RadialShell {
    double r_lo = 0, r_hi = 0;
    double min = 0, max = 0, mean = 0;
    std::size_t count = 0;
};
std::vector<RadialShell> radial_profile(const BoundaryField& f);
// Shell statistics of one t-slice.
std::vector<RadialShell> radial_profile_slice(const HalfSpaceField& u, int j);

// Boundary trace by quadratic extrapolation from the three smallest t-levels.
BoundaryField boundary_trace(const HalfSpaceField& u);

// Orbit-average over the signed-permutation group of the x-axes. Makes a
// field bitwise invariant under lattice rotations/reflections; values move
// by at most a few ulps for data that is already symmetric.
void symmetrize_lattice(BoundaryField& f);
void symmetrize_lattice(HalfSpaceField& u);

// Finite-difference gradient: centered in the interior, one-sided at the
// box faces and at the first/last t-level. Components 0..n-1 are x, n is t.
std::vector<HalfSpaceField> fd_gradient(const HalfSpaceField& u);

// (n+1)-Laplacian with centered stencils; defined on cells with all
// neighbors present (x interior, 1 <= j <= nt-2).
HalfSpaceField fd_laplacian(const HalfSpaceField& u);

// Field serialization: CSV of (index, value) next to a JSON header file.
void write_field_csv(const HalfSpaceField& u, const std::string& path_prefix);
void write_field_csv(const BoundaryField& f, const std::string& path_prefix);

}  // namespace hslab
