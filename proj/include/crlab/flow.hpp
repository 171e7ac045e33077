#pragma once

// Retraction-based descent for F_1 and a tension-driven (subharmonic) flow.

#include <vector>

#include "crlab/paneitz.hpp"

namespace crlab::flow {

using structure::PseudohermitianData;
using target::MapField;

struct FlowConfig {
    double step = 1.0;
    int max_steps = 500;
    bool backtracking = true;     ///< Armijo, factor 0.5, slope factor 1e-4
    double stop_tol = 1e-8;       ///< on the L2 norm of the gradient
    /// Diagonal Fourier preconditioner (1 + |k_H|^4)^{-1} for the F_1 flow,
    /// (1 + |k_H|^2)^{-1} for the subharmonic flow, k_H the horizontal
    /// wave vector times 2 pi.
    bool preconditioner = false;

    void validate() const;
};

struct FlowRecord {
    int iter = 0;
    double f1 = 0.0;
    double p1_norm = 0.0;
    double tension_norm = 0.0;
    double reeb_norm = 0.0;  ///< ||nabla_R R phi||_2
    double step = 0.0;       ///< accepted step, 0 for the initial record
};

struct FlowTrace {
    std::vector<FlowRecord> records;
    /// True when the run ended because the gradient dropped below stop_tol.
    bool converged = false;
};

struct FlowResult {
    MapField map;
    FlowTrace trace;
};

/// ||s||_2 = (int h(s, s) theta ^ d theta)^{1/2} for a real section.
double section_norm(const MapField& phi, const target::PullbackSection& s, const PseudohermitianData& st);

/// Descent on F_1: phi <- exp_phi(eta M^{-1} P_1(phi)), the negative L2
/// gradient since dF_1(v) = -<v, P_1>. Stops when ||P_1||_2 <= stop_tol.
/// Throws StepCollapse when backtracking shrinks the step below 1e-12.
FlowResult gradient_flow(const MapField& phi0, const PseudohermitianData& s, const FlowConfig& cfg);

/// phi <- exp_phi(-eta M^{-1} delta_b T phi), backtracking on the horizontal
/// energy 1/2 int h(T_1 phi, T_1bar phi) + h(T_1bar phi, T_1 phi). Stops when
/// ||delta_b T phi||_2 <= stop_tol; the trace carries ||nabla_R R phi||_2 so
/// the limit can be checked against the subharmonic vanishing criterion.
FlowResult subharmonic_flow(const MapField& phi0, const PseudohermitianData& s, const FlowConfig& cfg);

} // namespace crlab::flow
