#pragma once

// Calculus of maps phi: M -> N over a pseudohermitian structure: the
// horizontal divergence delta_b, tension, Reeb second derivative and the
// curvature term S_b.

#include <vector>

#include "crlab/structure.hpp"
#include "crlab/target.hpp"

namespace crlab::mapcalc {

using structure::PseudohermitianData;
using target::MapField;
using target::PullbackSection;

/// A phi^*TN-valued horizontal 1-form by its values on the adapted frame:
/// on_T[a] = w(T_a), on_Tbar[a] = w(T_abar).
struct FrameForm {
    std::vector<PullbackSection> on_T;
    std::vector<PullbackSection> on_Tbar;
};

/// Map together with its differential along the background frame, reused by
/// every operator below.
class MapContext {
public:
    MapContext(const MapField& phi, const PseudohermitianData& s);

    const MapField& map() const { return phi_; }
    const PseudohermitianData& structure() const { return s_; }
    PullbackSection apply(const grid::VectorField& v) const;
    /// (T_a phi, T_abar phi).
    const FrameForm& tangent() const { return tangent_; }
    const PullbackSection& reeb() const { return reeb_; }
    /// nabla_V s, V one of the structure's frame fields.
    PullbackSection nabla(const grid::VectorField& v, const PullbackSection& s) const;
    /// (nabla_{T_a} s, nabla_{T_abar} s).
    FrameForm nabla(const PullbackSection& s) const;

private:
    MapField phi_;
    const PseudohermitianData& s_;
    std::vector<PullbackSection> dphi_;
    FrameForm tangent_;
    PullbackSection reeb_;
};

/// V phi.
PullbackSection frame_apply(const MapField& phi, const grid::VectorField& v, const PseudohermitianData& s);

/// delta_b w = -sum_a (nabla_{T_a} w)(T_abar) + (nabla_{T_abar} w)(T_a), the
/// frame index differentiated with the Tanaka-Webster connection. Throws
/// FrameMismatch when w does not carry n frame slots of the map's dimension.
PullbackSection divergence_b(const FrameForm& w, const MapContext& ctx);
PullbackSection divergence_b(const FrameForm& w, const MapField& phi, const PseudohermitianData& s);

/// delta_b T phi.
PullbackSection tension_b(const MapContext& ctx);
PullbackSection tension_b(const MapField& phi, const PseudohermitianData& s);

/// nabla_R (R phi).
PullbackSection reeb_second(const MapContext& ctx);
PullbackSection reeb_second(const MapField& phi, const PseudohermitianData& s);

/// S_b(X) = R^h(X, T_1 phi) T_1bar phi + R^h(X, T_1bar phi) T_1 phi, summed
/// over frame indices.
PullbackSection s_b(const PullbackSection& x, const MapContext& ctx);
PullbackSection s_b(const PullbackSection& x, const MapField& phi, const PseudohermitianData& s);

/// Sum over frame indices of h(a(T), b(Tbar)) + h(a(Tbar), b(T)), the
/// pairing of horizontal forms under which delta_b is adjoint to nabla.
grid::GridScalar pair_forms(const FrameForm& a, const FrameForm& b, const MapField& phi);

} // namespace crlab::mapcalc
