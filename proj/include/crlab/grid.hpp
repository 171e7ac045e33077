#pragma once

// Periodic grid functions on [0, L_0) x ... x [0, L_{d-1}), their coordinate
// derivatives, a small exterior calculus relative to a background frame, and
// quadrature.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crlab/errors.hpp"

namespace crlab::grid {

using Complex = std::complex<double>;

enum class Scheme { spectral, fd4 };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Shape of a periodic grid. Axis 0 is the slowest-varying index.
struct GridSpec {
    std::vector<int> dims;
    std::vector<double> periods;
    Scheme scheme = Scheme::spectral;

    /// `rank` axes of `points` points each, unit periods.
    static GridSpec uniform(int rank, int points, Scheme scheme = Scheme::spectral);

    int rank() const { return static_cast<int>(dims.size()); }
    std::size_t size() const;
    std::size_t stride(int axis) const;
    double spacing(int axis) const { return periods[axis] / dims[axis]; }
    double cell_volume() const;
    double volume() const;

    /// Throws InvalidGrid unless every axis has at least 8 points and a
    /// positive period.
    void validate() const;

    GridSpec with_scheme(Scheme s) const;
    GridSpec refined(int factor) const;

    bool operator==(const GridSpec& other) const = default;
};

/// Complex samples of a function on a GridSpec. Real data carries a zero
/// imaginary part.
class GridScalar {
public:
    GridScalar() = default;
    explicit GridScalar(GridSpec spec, Complex fill = 0.0);
    GridScalar(GridSpec spec, Eigen::ArrayXcd values);

    /// The coordinate function x_axis, sampled at k * spacing.
    static GridScalar coordinate(const GridSpec& spec, int axis);
    static GridScalar sample(const GridSpec& spec,
                             const std::function<Complex(std::span<const double>)>& f);

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
    Eigen::ArrayXcd& values() { return values_; }
    const Eigen::ArrayXcd& values() const { return values_; }
    Complex operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
    Complex& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

    GridScalar& operator+=(const GridScalar& o);
    GridScalar& operator-=(const GridScalar& o);
    GridScalar& operator*=(const GridScalar& o);
    GridScalar& operator/=(const GridScalar& o);
    GridScalar& operator+=(Complex c);
    GridScalar& operator*=(Complex c);

    GridScalar operator-() const;
    GridScalar conj() const;
    GridScalar real() const;
    GridScalar imag() const;

    double max_abs() const;
    /// Discrete L2 norm sqrt(sum |f|^2 dV).
    double l2_norm() const;
    bool all_finite() const;

private:
    void check_compatible(const GridScalar& o) const;

    GridSpec spec_;
    Eigen::ArrayXcd values_;
};

GridScalar operator+(GridScalar a, const GridScalar& b);
GridScalar operator-(GridScalar a, const GridScalar& b);
GridScalar operator*(GridScalar a, const GridScalar& b);
GridScalar operator/(GridScalar a, const GridScalar& b);
GridScalar operator*(Complex c, GridScalar a);
GridScalar operator*(GridScalar a, Complex c);
GridScalar operator+(GridScalar a, Complex c);
GridScalar exp(const GridScalar& f);

/// d f / d x_axis with the scheme of f's GridSpec. Spectral differentiation
/// drops the Nyquist mode, so the discrete operator is exactly skew-adjoint.
GridScalar derivative(const GridScalar& f, int axis);

/// Multiplies the Fourier coefficients of f by symbol(k), k the integer wave
/// numbers per axis (Nyquist reported as 0).
GridScalar fourier_multiplier(const GridScalar& f, const std::function<double(std::span<const int>)>& symbol);

/// Trapezoidal (periodic) quadrature of f * density over the grid.
Complex integrate(const GridScalar& f, const GridScalar& density);
Complex integrate(const GridScalar& f);

/// Components of a 1-form or a vector field relative to some frame; the
/// frame fixes the interpretation.
struct OneForm {
    std::vector<GridScalar> c;
    int rank() const { return static_cast<int>(c.size()); }
};
using VectorField = OneForm;
using CoordOneForm = OneForm;
using CoordVectorField = OneForm;

/// Antisymmetric 2-form storing the components (i, j), i < j, in
/// lexicographic order.
class TwoForm {
public:
    TwoForm() = default;
    TwoForm(const GridSpec& spec, int rank);

    int rank() const { return rank_; }
    static std::size_t pair_index(int rank, int i, int j);
    /// Signed access: (j, i) returns the negated (i, j) component.
    GridScalar component(int i, int j) const;
    GridScalar& at(int i, int j);
    const std::vector<GridScalar>& components() const { return c_; }
    std::vector<GridScalar>& components() { return c_; }
    double max_abs() const;

private:
    int rank_ = 0;
    std::vector<GridScalar> c_;
};
using CoordTwoForm = TwoForm;

/// alpha(X) = sum_a alpha_a X^a (pointwise, complex bilinear).
GridScalar contract(const OneForm& alpha, const VectorField& x);
/// omega(X, Y).
GridScalar contract(const TwoForm& omega, const VectorField& x, const VectorField& y);
TwoForm wedge(const OneForm& a, const OneForm& b);
TwoForm operator-(const TwoForm& a, const TwoForm& b);

/// Coordinate-basis exterior derivative: (d w)_ij = d_i w_j - d_j w_i.
TwoForm exterior_derivative(const OneForm& omega);

/// One coordinate term of a frame vector: scale * multiplier * d/dx_axis.
struct FrameTerm {
    int axis = 0;
    double scale = 1.0;
    std::optional<GridScalar> multiplier;
};

/// A global frame E_0 .. E_{d-1} on the grid with constant structure
/// constants [E_b, E_c] = c^a_{bc} E_a. Frame coefficients act pointwise and
/// are never differentiated, so they need not be periodic.
class Frame {
public:
    /// d/dx_0, ..., d/dx_{d-1}.
    static Frame coordinate(const GridSpec& spec);
    /// Left-invariant Heisenberg frame on axes (x_1..x_n, y_1..y_n, t):
    /// E_{x_a} = d_{x_a} + y_a d_t, E_{y_a} = d_{y_a}, E_t = d_t, so that
    /// [E_{x_a}, E_{y_a}] = -E_t. Dual coframe dx_a, dy_a, dt - sum y_a dx_a.
    static Frame heisenberg(const GridSpec& spec, int n);

    const GridSpec& spec() const { return spec_; }
    int rank() const { return static_cast<int>(vectors_.size()); }
    const std::vector<FrameTerm>& terms(int a) const { return vectors_[a]; }

    /// c^a_{bc}.
    double structure_constant(int a, int b, int c) const;

    /// E_a f.
    GridScalar apply(int a, const GridScalar& f) const;
    /// (E_0 f, ..., E_{d-1} f), sharing the coordinate derivatives.
    std::vector<GridScalar> gradient(const GridScalar& f) const;
    /// V f for V given in frame components.
    GridScalar apply(const VectorField& v, const GridScalar& f) const;
    /// V f when the frame derivatives of f are already known.
    static GridScalar apply(const VectorField& v, const std::vector<GridScalar>& grad);

    /// Pointwise coefficient of d/dx_axis in E_a.
    GridScalar coordinate_component(int a, int axis) const;

    /// d alpha in frame components:
    /// (d alpha)_{bc} = E_b alpha_c - E_c alpha_b - c^a_{bc} alpha_a.
    TwoForm exterior_derivative(const OneForm& alpha) const;
    /// Exterior derivative of a function: (E_0 f, ..., E_{d-1} f).
    OneForm differential(const GridScalar& f) const;

    /// Density of dx_0 ^ ... ^ dx_{d-1} evaluated on (E_0, ..., E_{d-1}).
    GridScalar volume_density() const;

private:
    GridSpec spec_;
    std::vector<std::vector<FrameTerm>> vectors_;
    std::vector<double> structure_;
};

/// Pointwise dense matrices and vectors of size k stored as k*k (row-major)
/// and k grid scalars.
struct MatrixField {
    int k = 0;
    std::vector<GridScalar> entries;
    const GridScalar& operator()(int i, int j) const { return entries[static_cast<std::size_t>(i * k + j)]; }
    GridScalar& operator()(int i, int j) { return entries[static_cast<std::size_t>(i * k + j)]; }
};

/// Solves A x = b at every grid point. Throws SingularFrame when the
/// condition number exceeds 1e12 anywhere.
std::vector<GridScalar> pointwise_solve(const MatrixField& a, const std::vector<GridScalar>& b);
/// Pointwise inverse, same failure rule.
MatrixField pointwise_inverse(const MatrixField& a);

/// Number of worker threads for pointwise kernels, from CRLAB_THREADS.
int thread_limit();
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace crlab::grid
