#include "crlab/paneitz.hpp"

#include <cmath>

namespace crlab::paneitz {

using grid::GridScalar;
using target::Kind;

namespace {

void require_dim3(const PseudohermitianData& s) {
    if (s.n() != 1) throw DimensionMismatch("P_1 and F_1 need a 3-dimensional structure");
}

GridScalar volume(const PseudohermitianData& s) { return s.vol_density; }

} // namespace

PullbackSection p1(const MapContext& ctx) {
    const PseudohermitianData& s = ctx.structure();
    require_dim3(s);
    const MapField& phi = ctx.map();

    const PullbackSection tension = mapcalc::tension_b(ctx);
    PullbackSection out = -mapcalc::divergence_b(ctx.nabla(tension), ctx);
    out -= mapcalc::reeb_second(ctx);
    if (!s.flat) {
        const PullbackSection beta = s.tau() * ctx.tangent().on_Tbar[0];
        PullbackSection q = ctx.nabla(s.T_bar(0), beta);
        q -= s.omega_Tbar * beta;
        out += 4.0 * q.im();
    }
    if (phi.target->kind() != Kind::flat_torus) out += mapcalc::s_b(tension, ctx);
    return target::project(phi, out).real();
}

PullbackSection p1(const MapField& phi, const PseudohermitianData& s) { return p1(MapContext(phi, s)); }

EnergyDensity energy_density(const MapContext& ctx) {
    const PseudohermitianData& s = ctx.structure();
    require_dim3(s);
    const MapField& phi = ctx.map();
    const PullbackSection tension = mapcalc::tension_b(ctx).real();
    const PullbackSection reeb = ctx.reeb().real();
    const PullbackSection& tbar = ctx.tangent().on_Tbar[0];
    EnergyDensity e;
    e.tension_sq = target::pair(phi, tension, tension);
    e.reeb_sq = target::pair(phi, reeb, reeb);
    e.torsion_im = s.flat ? GridScalar(phi.spec()) : (s.tau() * target::pair(phi, tbar, tbar)).imag();
    return e;
}

double f1(const MapContext& ctx) {
    const EnergyDensity e = energy_density(ctx);
    const GridScalar integrand = e.reeb_sq - e.tension_sq - 4.0 * e.torsion_im;
    return -0.5 * grid::integrate(integrand, volume(ctx.structure())).real();
}

double f1(const MapField& phi, const PseudohermitianData& s) { return f1(MapContext(phi, s)); }

double l2_pair(const MapField& phi, const PullbackSection& a, const PullbackSection& b,
               const PseudohermitianData& s) {
    return grid::integrate(target::pair(phi, a, b), volume(s)).real();
}

CovarianceReport covariance_check(const MapField& phi, const ContactCoframe& cf, const GridScalar& u,
                                  const std::string& u_description, bool allow_absolute) {
    const PseudohermitianData base = structure::solve_structure(cf);
    const PseudohermitianData hat = structure::solve_structure(structure::conformal_rescale(cf, u));
    const PullbackSection p = p1(phi, base);
    const PullbackSection phat = p1(phi, hat);
    const GridScalar weight = grid::exp(-4.0 * u.real());

    CovarianceReport r;
    r.grid_spec = cf.spec();
    r.u_description = u_description;
    const double err = (phat - weight * p).l2_norm();
    const double denom = p.l2_norm();
    if (denom == 0.0) {
        if (!allow_absolute) throw ZeroDenominator("P_1(phi) vanishes identically; relative error undefined");
        r.absolute = true;
        r.rel_error = err;
    } else {
        r.rel_error = err / denom;
    }
    return r;
}

double invariance_check(const MapField& phi, const ContactCoframe& cf, const GridScalar& u) {
    const double f = f1(phi, structure::solve_structure(cf));
    const double fhat = f1(phi, structure::solve_structure(structure::conformal_rescale(cf, u)));
    return std::abs(fhat - f) / (1.0 + std::abs(f));
}

double GradientReport::mismatch(double c) const { return std::abs(fd_derivative - c * pairing); }

GradientReport gradient_report(const MapField& phi, const PullbackSection& v, const PseudohermitianData& s,
                               double h) {
    require_dim3(s);
    const PullbackSection step = target::project(phi, v).real();
    auto energy = [&](double e) { return f1(target::exp_map(phi, e * step), s); };
    GradientReport r;
    r.fd_derivative = (-energy(2.0 * h) + 8.0 * energy(h) - 8.0 * energy(-h) + energy(-2.0 * h)) / (12.0 * h);
    r.pairing = l2_pair(phi, step, p1(phi, s), s);
    return r;
}

double gradient_check(const MapField& phi, const PullbackSection& v, const PseudohermitianData& s) {
    return gradient_report(phi, v, s).mismatch(0.5);
}

double holomorphic_identity_check(const MapField& phi, const PseudohermitianData& s) {
    const int m = phi.dim();
    if (phi.target->kind() != Kind::flat_torus || m % 2 != 0)
        throw NoComplexStructure("target " + phi.target->name() + " of dimension " + std::to_string(m) +
                                 " carries no standard complex structure");
    const MapContext ctx(phi, s);
    const PullbackSection tension = mapcalc::tension_b(ctx);
    const PullbackSection& reeb = ctx.reeb();
    PullbackSection j = PullbackSection::zero(phi.spec(), m);
    for (int k = 0; k < m; k += 2) {
        j.c[k + 1] = reeb.c[k];
        j.c[k] = -reeb.c[k + 1];
    }
    return (tension - static_cast<double>(s.n()) * j).max_abs();
}

} // namespace crlab::paneitz
