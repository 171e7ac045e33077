#pragma once

// Pseudohermitian model structures. A contact coframe (theta, theta^alpha) is
// given in components of a background frame; the Tanaka-Webster data
// (Reeb field, adapted frame, connection form, torsion, Webster curvature) is
// recovered from the structure equations pointwise.

#include <memory>
#include <vector>

#include "crlab/grid.hpp"

namespace crlab::structure {

using grid::GridScalar;
using grid::GridSpec;
using grid::OneForm;
using grid::VectorField;

struct ContactCoframe {
    std::shared_ptr<const grid::Frame> frame;
    int n = 1;
    OneForm theta;                   ///< real
    std::vector<OneForm> theta_h;    ///< theta^1 .. theta^n, complex

    const GridSpec& spec() const { return frame->spec(); }
    int rank() const { return 2 * n + 1; }
    OneForm theta_bar(int alpha) const;
};

/// Tanaka-Webster data of a Levi-normalized coframe. For n = 1 the
/// connection is the single form omega = omega_1^1 with
///   d theta^1 = theta^1 ^ omega + torsion * theta ^ theta^1bar,
///   omega + conj(omega) = 0.
/// `torsion` is A^1_1bar (the theta ^ theta^1bar coefficient of d theta^1);
/// the torsion tensor component tau_1^1bar = tau(T_1)(theta^1bar) is its
/// complex conjugate, see tau().
/// `scal_w` = 2 * (d omega)(T_1, T_1bar): the trace over H of the Webster
/// Ricci form, real for a unitary coframe.
/// For n >= 2 only the flat Heisenberg model is supported and the
/// connection data is identically zero.
struct PseudohermitianData {
    ContactCoframe coframe;
    std::vector<VectorField> T;   ///< T_1 .. T_n
    VectorField reeb;
    OneForm omega;
    GridScalar omega_T;           ///< omega(T_1)
    GridScalar omega_Tbar;        ///< omega(T_1bar)
    GridScalar torsion;
    GridScalar scal_w;
    GridScalar vol_density;       ///< theta ^ (d theta)^n against dx_1 .. dt
    double structure_residual = 0.0;
    double levi_residual = 0.0;
    bool flat = false;

    int n() const { return coframe.n; }
    const GridSpec& spec() const { return coframe.spec(); }
    const grid::Frame& frame() const { return *coframe.frame; }
    VectorField T_bar(int alpha) const;
    GridScalar tau() const { return torsion.conj(); }
    double volume() const;
};

/// theta = dt - sum y_a dx_a, theta^a = (dx_a + i dy_a) / sqrt(2) on the
/// Heisenberg frame. Throws DimensionMismatch unless the grid has 2n+1 axes.
ContactCoframe heisenberg(int n, const GridSpec& grid);

/// The Reeb field: theta(R) = 1, i_R d theta = 0, solved pointwise in least
/// squares form. Throws SingularFrame when the system degenerates.
VectorField reeb_field(const ContactCoframe& cf);

/// ||d theta - i sum theta^a ^ theta^abar||_inf.
double levi_residual(const ContactCoframe& cf);

/// Solve the structure equations of an n = 1 coframe. Throws
/// StructureResidual when the anti-Hermitian connection reproduces
/// d theta^1 only up to more than the scheme tolerance, and
/// NormalizationFailure when the coframe is not Levi-normalized.
PseudohermitianData solve_structure(const ContactCoframe& cf);

/// Flat Heisenberg data for any n (zero connection and torsion).
PseudohermitianData flat_heisenberg(int n, const GridSpec& grid);

/// theta' = e^{2u} theta, theta'^1 = e^u (theta^1 + 2 i (T_1bar u) theta).
/// n = 1 only; u must be real.
ContactCoframe conformal_rescale(const ContactCoframe& cf, const GridScalar& u);

/// Residual tolerance for identities that hold exactly in the continuum:
/// 1e-8 on spectral grids, a 4th-order bound on fd4 grids.
double scheme_tolerance(const GridSpec& grid);

} // namespace crlab::structure
