#include "crlab/mapcalc.hpp"

namespace crlab::mapcalc {

using target::Kind;

MapContext::MapContext(const MapField& phi, const PseudohermitianData& s) : phi_(phi), s_(s) {
    if (phi.spec().dims != s.spec().dims) throw DimensionMismatch("map and structure live on different grids");
    dphi_ = target::differential(s.frame(), phi_);
    for (int a = 0; a < s.n(); ++a) {
        tangent_.on_T.push_back(target::frame_apply(dphi_, s.T[a]));
        tangent_.on_Tbar.push_back(target::frame_apply(dphi_, s.T_bar(a)));
    }
    reeb_ = target::frame_apply(dphi_, s.reeb);
}

PullbackSection MapContext::apply(const grid::VectorField& v) const { return target::frame_apply(dphi_, v); }

PullbackSection MapContext::nabla(const grid::VectorField& v, const PullbackSection& s) const {
    const Kind k = phi_.target->kind();
    if (k == Kind::flat_torus || k == Kind::sphere) return target::pullback_derivative(phi_, s_.frame(), v, s, s);
    return target::pullback_derivative(phi_, s_.frame(), v, apply(v), s);
}

FrameForm MapContext::nabla(const PullbackSection& s) const {
    FrameForm out;
    for (int a = 0; a < s_.n(); ++a) {
        out.on_T.push_back(nabla(s_.T[a], s));
        out.on_Tbar.push_back(nabla(s_.T_bar(a), s));
    }
    return out;
}

PullbackSection frame_apply(const MapField& phi, const grid::VectorField& v, const PseudohermitianData& s) {
    return target::frame_apply(target::differential(s.frame(), phi), v);
}

PullbackSection divergence_b(const FrameForm& w, const MapContext& ctx) {
    const PseudohermitianData& s = ctx.structure();
    const int n = s.n();
    const int m = ctx.map().dim();
    if (static_cast<int>(w.on_T.size()) != n || static_cast<int>(w.on_Tbar.size()) != n)
        throw FrameMismatch("form has " + std::to_string(w.on_T.size()) + " frame slots, structure has n = " +
                            std::to_string(n));
    for (int a = 0; a < n; ++a)
        if (w.on_T[a].dim() != m || w.on_Tbar[a].dim() != m)
            throw FrameMismatch("form values do not match the target dimension");

    PullbackSection out = PullbackSection::zero(s.spec(), m);
    for (int a = 0; a < n; ++a) {
        out -= ctx.nabla(s.T[a], w.on_Tbar[a]);
        out -= ctx.nabla(s.T_bar(a), w.on_T[a]);
    }
    if (n == 1 && !s.flat) {
        // nabla_{T_1} T_1bar = -omega(T_1) T_1bar, nabla_{T_1bar} T_1 = omega(T_1bar) T_1.
        out -= s.omega_T * w.on_Tbar[0];
        out += s.omega_Tbar * w.on_T[0];
    }
    return target::project(ctx.map(), out);
}

PullbackSection divergence_b(const FrameForm& w, const MapField& phi, const PseudohermitianData& s) {
    return divergence_b(w, MapContext(phi, s));
}

PullbackSection tension_b(const MapContext& ctx) { return divergence_b(ctx.tangent(), ctx); }

PullbackSection tension_b(const MapField& phi, const PseudohermitianData& s) { return tension_b(MapContext(phi, s)); }

PullbackSection reeb_second(const MapContext& ctx) { return ctx.nabla(ctx.structure().reeb, ctx.reeb()); }

PullbackSection reeb_second(const MapField& phi, const PseudohermitianData& s) {
    return reeb_second(MapContext(phi, s));
}

PullbackSection s_b(const PullbackSection& x, const MapContext& ctx) {
    const MapField& phi = ctx.map();
    PullbackSection out = PullbackSection::zero(phi.spec(), phi.dim());
    if (phi.target->kind() == Kind::flat_torus) return out;
    const FrameForm& t = ctx.tangent();
    for (std::size_t a = 0; a < t.on_T.size(); ++a) {
        out += target::curvature(phi, x, t.on_T[a], t.on_Tbar[a]);
        out += target::curvature(phi, x, t.on_Tbar[a], t.on_T[a]);
    }
    return target::project(phi, out);
}

PullbackSection s_b(const PullbackSection& x, const MapField& phi, const PseudohermitianData& s) {
    return s_b(x, MapContext(phi, s));
}

grid::GridScalar pair_forms(const FrameForm& a, const FrameForm& b, const MapField& phi) {
    grid::GridScalar out(phi.spec());
    for (std::size_t k = 0; k < a.on_T.size(); ++k) {
        out += target::pair(phi, a.on_T[k], b.on_Tbar[k]);
        out += target::pair(phi, a.on_Tbar[k], b.on_T[k]);
    }
    return out;
}

} // namespace crlab::mapcalc
