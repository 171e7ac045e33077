#pragma once

// Riemannian targets (N, h), maps M -> N sampled on a grid, and sections of
// the pullback bundle phi^*TN.
//
// Sections are stored in a target frame: coordinate components for flat
// tori, charts and the embedded sphere (ambient R^3 components, tangential),
// and the orthonormal left-invariant frame (e_x, e_y, e_t) for the Heisenberg
// Webster metric. Connection coefficients are given in the same frame:
// gamma[k*m*m + i*m + j] = e^k(nabla_{e_i} e_j). Every complex quantity
// extends h and R^h complex-bilinearly.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "crlab/grid.hpp"

namespace crlab::target {

using grid::Complex;
using grid::GridScalar;
using grid::GridSpec;

enum class Kind { flat_torus, sphere, chart, webster };

/// Chart callbacks: metric g_ij(p) (m x m) and, optionally, Christoffel
/// symbols Gamma^k_ij(p) in the layout above.
using MetricFn = std::function<Eigen::MatrixXd(std::span<const double>)>;
using ChristoffelFn = std::function<std::vector<double>(std::span<const double>)>;

struct TangentVectorAt {
    std::vector<double> base;
    std::vector<Complex> vector;
};

class TargetMetric {
public:
    /// R^m / (period Z)^m. Periods default to 1.
    static TargetMetric flat_torus(int m, std::vector<double> periods = {});
    /// Unit sphere in R^3.
    static TargetMetric embedded_sphere_2();
    /// Coordinate chart on an open set of R^m. Without a Christoffel
    /// callback the symbols are central differences of the metric, step 1e-4.
    static TargetMetric chart(int m, MetricFn metric, ChristoffelFn christoffel = {});
    /// Heisenberg group with g = (dt - y dx)^2 + dx^2 + dy^2.
    static TargetMetric webster_heisenberg();

    Kind kind() const { return kind_; }
    /// Number of section components (3 for the sphere).
    int dim() const { return dim_; }
    const std::vector<double>& periods() const { return periods_; }
    std::string name() const;

    /// Metric in the section frame at p.
    Eigen::MatrixXd metric(std::span<const double> p) const;
    /// Connection coefficients in the section frame at p (zero for the
    /// flat torus; unused for the sphere).
    std::vector<double> christoffel(std::span<const double> p) const;
    /// e^a(dp) for a coordinate velocity dp: the section components of a
    /// map differential. Identity except for the Webster frame.
    void coframe(std::span<const double> p, std::span<const Complex> dp, std::span<Complex> out) const;

    Complex pair(std::span<const double> p, std::span<const Complex> a, std::span<const Complex> b) const;
    /// R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
    void curvature(std::span<const double> p, std::span<const Complex> x, std::span<const Complex> y,
                   std::span<const Complex> z, std::span<Complex> out) const;
    /// Geodesic exponential (flat and sphere exact, RK4 otherwise). Throws
    /// StepTooLarge at the sphere's injectivity radius.
    std::vector<double> exp_map(std::span<const double> p, std::span<const double> v) const;

    /// Point-based forms of the above.
    TangentVectorAt curvature(const TangentVectorAt& x, const TangentVectorAt& y, const TangentVectorAt& z) const;

private:
    Kind kind_ = Kind::flat_torus;
    int dim_ = 0;
    std::vector<double> periods_;
    MetricFn metric_fn_;
    ChristoffelFn christoffel_fn_;
};

/// Coordinate Christoffels Gamma^k_ij from a metric by central differences.
std::vector<double> fd_christoffel(const MetricFn& metric, std::span<const double> p, double step = 1e-4);

/// Section of phi^*TN: dim() complex grid components in the target frame.
struct PullbackSection {
    std::vector<GridScalar> c;

    static PullbackSection zero(const GridSpec& spec, int m);
    int dim() const { return static_cast<int>(c.size()); }
    const GridSpec& spec() const { return c.front().spec(); }
    PullbackSection conj() const;
    PullbackSection real() const;
    /// (Z - conj Z) / 2i.
    PullbackSection im() const;
    double max_abs() const;
    /// sqrt(sum_k ||c_k||^2), the Euclidean L2 norm of the components.
    double l2_norm() const;

    PullbackSection& operator+=(const PullbackSection& o);
    PullbackSection& operator-=(const PullbackSection& o);
    PullbackSection& operator*=(const GridScalar& f);
    PullbackSection& operator*=(Complex f);
};

PullbackSection operator+(PullbackSection a, const PullbackSection& b);
PullbackSection operator-(PullbackSection a, const PullbackSection& b);
PullbackSection operator*(const GridScalar& f, PullbackSection a);
PullbackSection operator*(Complex f, PullbackSection a);
PullbackSection operator-(PullbackSection a);

/// A map phi: M -> N. Each target coordinate is lifted as
/// phi^i = periodic[i] + sum_j slope(i, j) x_j, which covers windings around
/// a flat torus and the identity of the Heisenberg nilmanifold.
struct MapField {
    std::shared_ptr<const TargetMetric> target;
    std::vector<GridScalar> periodic;
    Eigen::MatrixXd slope;

    static MapField from_components(std::shared_ptr<const TargetMetric> target, std::vector<GridScalar> comps);
    static MapField constant(std::shared_ptr<const TargetMetric> target, const GridSpec& spec,
                             std::vector<double> point);
    /// (x_1..x_n, y_1..y_n, t) -> (x_1..x_n, y_1..y_n) into a flat 2n-torus.
    static MapField projection(std::shared_ptr<const TargetMetric> target, const GridSpec& spec);
    /// Identity onto the Heisenberg Webster target.
    static MapField identity(std::shared_ptr<const TargetMetric> target, const GridSpec& spec);

    const GridSpec& spec() const { return periodic.front().spec(); }
    int dim() const { return static_cast<int>(periodic.size()); }
    /// Lifted coordinate values.
    std::vector<GridScalar> values() const;
    /// Max deviation from unit norm (sphere targets), 0 otherwise.
    double sphere_defect() const;
};

/// E_a phi for every background frame vector, as sections.
std::vector<PullbackSection> differential(const grid::Frame& frame, const MapField& phi);
/// V phi = sum_a V^a E_a phi.
PullbackSection frame_apply(const std::vector<PullbackSection>& dphi, const grid::VectorField& v);

/// nabla_V s with the pullback connection, given V phi.
PullbackSection pullback_derivative(const MapField& phi, const grid::Frame& frame, const grid::VectorField& v,
                                    const PullbackSection& v_phi, const PullbackSection& s);
PullbackSection pullback_derivative(const MapField& phi, const grid::Frame& frame, const grid::VectorField& v,
                                    const PullbackSection& s);

/// h(a, b) pointwise, complex-bilinear.
GridScalar pair(const MapField& phi, const PullbackSection& a, const PullbackSection& b);
/// R^h(X, Y) Z pointwise.
PullbackSection curvature(const MapField& phi, const PullbackSection& x, const PullbackSection& y,
                          const PullbackSection& z);
/// Tangential projection (sphere), identity otherwise.
PullbackSection project(const MapField& phi, const PullbackSection& s);
/// Max |<s, phi>| over the grid for sphere targets (real and imaginary parts).
double normal_defect(const MapField& phi, const PullbackSection& s);
/// exp_phi(v) pointwise for a real section v.
MapField exp_map(const MapField& phi, const PullbackSection& v);

} // namespace crlab::target
