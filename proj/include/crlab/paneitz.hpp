#pragma once

// The dimension-3 CR-harmonic obstruction P_1 and renormalized energy F_1,
// and the covariance, invariance and gradient identities relating them.

#include <string>

#include "crlab/mapcalc.hpp"

namespace crlab::paneitz {

using mapcalc::MapContext;
using structure::ContactCoframe;
using structure::PseudohermitianData;
using target::MapField;
using target::PullbackSection;

/// P_1(phi) = -delta_b nabla (delta_b T phi) - nabla_R R phi
///            + 4 Im(nabla_{T_1bar}(tau T_1bar phi)) + S_b(delta_b T phi),
/// where tau T_1bar phi stands for T phi(tau(T_1)) = tau_1^1bar T_1bar phi and
/// S_b uses R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]. On functions over a
/// torsion-free structure this is -Delta_b^2 - R^2 with Delta_b = delta_b d.
/// Requires an n = 1 structure.
PullbackSection p1(const MapContext& ctx);
PullbackSection p1(const MapField& phi, const PseudohermitianData& s);

/// The three integrands of F_1 at every point: ||delta_b T phi||^2,
/// ||R phi||^2 (bilinear h on real sections) and
/// Im(tau_1^1bar h(T_1bar phi, T_1bar phi)).
struct EnergyDensity {
    grid::GridScalar tension_sq;
    grid::GridScalar reeb_sq;
    grid::GridScalar torsion_im;
};
EnergyDensity energy_density(const MapContext& ctx);

/// F_1(phi) = -1/2 int (||R phi||^2 - ||delta_b T phi||^2
///                      - 4 Im(tau_1^1bar h(T_1bar phi, T_1bar phi))) theta ^ d theta.
/// Its first variation is dF_1(v) = -int <v, P_1(phi)> theta ^ d theta.
double f1(const MapContext& ctx);
double f1(const MapField& phi, const PseudohermitianData& s);

/// int <a, b>_h theta ^ d theta, real part.
double l2_pair(const MapField& phi, const PullbackSection& a, const PullbackSection& b,
               const PseudohermitianData& s);

struct CovarianceReport {
    double rel_error = 0.0;
    grid::GridSpec grid_spec;
    std::string u_description;
    /// Power of e^{f_0} with f_0 = 2u, i.e. hat P = e^{-2 f_0} P.
    int expected_exponent = -2;
    /// True when P_1(phi) vanished and rel_error holds the absolute error.
    bool absolute = false;
};

/// Compares P_1 of phi over solve_structure(conformal_rescale(cf, u)) with
/// e^{-4u} P_1 over solve_structure(cf). When P_1(phi) == 0 the absolute
/// error is reported and flagged, or ZeroDenominator is thrown if
/// allow_absolute is false.
CovarianceReport covariance_check(const MapField& phi, const ContactCoframe& cf, const grid::GridScalar& u,
                                  const std::string& u_description = "", bool allow_absolute = true);

/// |F_1 after rescaling - F_1| / (1 + |F_1|).
double invariance_check(const MapField& phi, const ContactCoframe& cf, const grid::GridScalar& u);

struct GradientReport {
    double fd_derivative = 0.0;  ///< d/de F_1(exp_phi(e v)) at e = 0
    double pairing = 0.0;        ///< int <v, P_1(phi)> theta ^ d theta
    /// |fd_derivative - c * pairing|.
    double mismatch(double c) const;
};

/// Fourth-order central difference in e with e in {+-h, +-2h}, h = 1e-3.
GradientReport gradient_report(const MapField& phi, const PullbackSection& v, const PseudohermitianData& s,
                               double h = 1e-3);

/// |D_e F_1(exp_phi(e v))|_0 - 1/2 int <v, P_1(phi)> theta ^ d theta|.
double gradient_check(const MapField& phi, const PullbackSection& v, const PseudohermitianData& s);

/// ||delta_b T phi - n J(R phi)||_inf for a flat torus target of even
/// dimension with J e_{2k} = e_{2k+1}. Throws NoComplexStructure otherwise.
double holomorphic_identity_check(const MapField& phi, const PseudohermitianData& s);

} // namespace crlab::paneitz
