#pragma once

// Formal harmonic extension of a map from flat Heisenberg H^n into the exact
// Einstein filling (lambda = 0), with flat targets: the jet coefficients
// phi_1..phi_n of U = phi + sum phi_k r^k / k! + P_n r^{n+1} log r / (n+1)!
// and the log coefficient P_n.

#include <vector>

#include "crlab/mapcalc.hpp"

namespace crlab::extension {

using structure::PseudohermitianData;
using target::MapField;
using target::PullbackSection;

struct DivergenceCoeffs {
    double a_dr = 0.0;  ///< coefficient of w(d_r)
    double a_rr = 0.0;  ///< of nabla_{d_r} w(d_r)
    double a_RR = 0.0;  ///< of nabla_R w(R)
    double a_b = 0.0;   ///< of the boundary divergence delta_b w
};

/// Divergence of the Einstein model metric with parameter lambda at radius
/// r in dimension 2n+1:
///   a_dr = (n(1+l^2r^2)/(1-l^2r^2) + (1+lr)/(1-lr) - 1) r, a_rr = -r^2,
///   a_RR = -r^2/(1-l^2r^2)^2, a_b = r/(1-lr)^2.
/// Throws PoleReached when |lambda r| >= 1.
DivergenceCoeffs einstein_divergence_coeffs(double lambda, double r, int n);

struct JetExpansion {
    int n = 1;
    std::vector<PullbackSection> coeffs;  ///< phi_1 .. phi_n
    PullbackSection log_coeff;            ///< P_n(phi)
    double lambda = 0.0;
};

/// Delta_b = delta_b d on sections along a map into a flat target.
PullbackSection sublaplacian(const mapcalc::MapContext& ctx, const PullbackSection& s);
/// nabla_R nabla_R on sections along a map into a flat target.
PullbackSection reeb_square(const mapcalc::MapContext& ctx, const PullbackSection& s);

/// n phi_1 = -Delta_b phi; (n-k+1) phi_k = -Delta_b phi_{k-1} + (k-1) R^2 phi_{k-2};
/// P_n = Delta_b phi_n - n R^2 phi_{n-1}. Throws NotFlatModel unless the
/// structure is flat Heisenberg of dimension 2n+1 and the target a flat torus.
JetExpansion solve_jet(const MapField& phi, const PseudohermitianData& s, int n);

/// max over r of ||delta dU||_inf / r^{n+2} for the truncated extension U,
/// with the lambda = 0 model divergence
///   delta dU = n r U_r - r^2 U_rr - r^2 R^2 U + r Delta_b U.
double residual_check(const JetExpansion& jet, const MapField& phi, const PseudohermitianData& s,
                      const std::vector<double>& r_samples);

/// The individual ratios of residual_check, one per sample.
std::vector<double> residual_ratios(const JetExpansion& jet, const MapField& phi, const PseudohermitianData& s,
                                    const std::vector<double>& r_samples);

} // namespace crlab::extension
