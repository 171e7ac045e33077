#include "crlab/suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "crlab/extension.hpp"
#include "crlab/fields.hpp"
#include "crlab/flow.hpp"

namespace crlab::suite {

using grid::GridScalar;
using grid::GridSpec;
using target::MapField;
using target::TargetMetric;

namespace {

std::string fmt(const char* format, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, format, a);
    return buf;
}

std::shared_ptr<const TargetMetric> flat(int m) {
    return std::make_shared<const TargetMetric>(TargetMetric::flat_torus(m));
}

std::shared_ptr<const TargetMetric> sphere() {
    return std::make_shared<const TargetMetric>(TargetMetric::embedded_sphere_2());
}

MapField scalar_map(const GridScalar& f) { return MapField::from_components(flat(1), {f}); }

GridScalar sin_sin(const GridSpec& g, double amp) {
    return GridScalar::sample(g, [amp](std::span<const double> x) {
        return grid::Complex(amp * std::sin(2.0 * std::numbers::pi * x[0]) * std::sin(2.0 * std::numbers::pi * x[1]), 0.0);
    });
}

// Delta_b = -sum_a E_a E_a over the horizontal frame vectors, and R^2 = E_t E_t.
GridScalar oracle_sublaplacian(const grid::Frame& frame, const GridScalar& f) {
    GridScalar out(f.spec());
    for (int a = 0; a < frame.rank() - 1; ++a) out -= frame.apply(a, frame.apply(a, f));
    return out;
}

GridScalar oracle_reeb_square(const grid::Frame& frame, const GridScalar& f) {
    const int t = frame.rank() - 1;
    return frame.apply(t, frame.apply(t, f));
}

Criterion make(int id, std::string name, double measured, double tol) {
    Criterion c;
    c.id = id;
    c.name = std::move(name);
    c.measured = measured;
    c.tolerance = tol;
    c.pass = std::isfinite(measured) && measured <= tol;
    return c;
}

double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

Criterion identity_energy() {
    const GridSpec g = GridSpec::uniform(3, 32);
    const auto s = structure::flat_heisenberg(1, g);
    const auto webster = std::make_shared<const TargetMetric>(TargetMetric::webster_heisenberg());
    const double f = paneitz::f1(MapField::identity(webster, g), s);
    const double expected = -0.5 * s.volume();
    Criterion c = make(1, "F1(identity) = -Vol/2", std::abs(f - expected), 1e-8);
    c.detail = "F1 = " + fmt("%.15g", f) + ", Vol = " + fmt("%.15g", s.volume());
    c.values = {{"f1", f}, {"volume", s.volume()}};
    return c;
}

Criterion projection_harmonic() {
    const GridSpec g = GridSpec::uniform(3, 32);
    const auto s = structure::flat_heisenberg(1, g);
    const double p = paneitz::p1(MapField::projection(flat(2), g), s).max_abs();
    Criterion c = make(2, "P1(projection) = 0", p, 1e-10);
    c.detail = "sup |P1(pi)| on 32^3 spectral";
    return c;
}

Criterion identity_harmonic() {
    const GridSpec g = GridSpec::uniform(3, 32);
    const auto s = structure::flat_heisenberg(1, g);
    const auto webster = std::make_shared<const TargetMetric>(TargetMetric::webster_heisenberg());
    const double p = paneitz::p1(MapField::identity(webster, g), s).max_abs();
    Criterion c = make(3, "P1(identity) = 0, torsion-free", p, 1e-8);
    c.detail = "sup |P1(id)| into the Webster metric, analytic connection";
    return c;
}

MapField covariance_map(const GridSpec& g, std::uint64_t seed) {
    fields::Rng rng(seed);
    return fields::random_map(flat(2), g, rng, 0.5);
}

Criterion covariance(const Options& o) {
    const std::uint64_t seed = o.seed + 4000;
    // Constant factor: exact scaling.
    const GridSpec g32 = GridSpec::uniform(3, 32);
    double worst_const = 0.0;
    for (double u0 : {0.1, 0.2, 0.3}) {
        const auto r = paneitz::covariance_check(covariance_map(g32, seed), structure::heisenberg(1, g32),
                                                 GridScalar(g32, u0), "constant", false);
        worst_const = std::max(worst_const, r.rel_error);
    }
    const GridSpec g64 = GridSpec::uniform(3, 64);
    const double spectral =
        paneitz::covariance_check(covariance_map(g64, seed), structure::heisenberg(1, g64), sin_sin(g64, 0.1),
                                  "0.1 sin sin", false)
            .rel_error;
    std::vector<double> fd;
    for (int n : {16, 32, 64}) {
        const GridSpec g = GridSpec::uniform(3, n, grid::Scheme::fd4);
        fd.push_back(paneitz::covariance_check(covariance_map(g, seed), structure::heisenberg(1, g), sin_sin(g, 0.1),
                                               "0.1 sin sin", false)
                         .rel_error);
    }
    const double order = std::min(observed_order(fd[0], fd[1]), observed_order(fd[1], fd[2]));
    Criterion c = make(4, "conformal covariance of P1", spectral, 1e-6);
    c.pass = c.pass && worst_const <= 1e-10 && order >= 3.5;
    c.detail = "constant u rel err " + fmt("%.3e", worst_const) + " (tol 1e-10); 64^3 spectral rel err " +
               fmt("%.3e", spectral) + " (tol 1e-6); fd4 order " + fmt("%.3f", order) + " (min 3.5)";
    c.values = {{"constant_rel_error", worst_const}, {"spectral64_rel_error", spectral},
                {"fd4_16", fd[0]},  {"fd4_32", fd[1]}, {"fd4_64", fd[2]}, {"fd4_order", order}};
    return c;
}

Criterion invariance(const Options& o) {
    const std::uint64_t seed = o.seed + 4000;
    const GridSpec g32 = GridSpec::uniform(3, 32);
    double worst_const = 0.0;
    for (double u0 : {0.1, 0.2, 0.3})
        worst_const = std::max(worst_const, paneitz::invariance_check(covariance_map(g32, seed),
                                                                      structure::heisenberg(1, g32), GridScalar(g32, u0)));
    const GridSpec g64 = GridSpec::uniform(3, 64);
    const double spectral =
        paneitz::invariance_check(covariance_map(g64, seed), structure::heisenberg(1, g64), sin_sin(g64, 0.1));
    std::vector<double> fd;
    for (int n : {16, 32, 64}) {
        const GridSpec g = GridSpec::uniform(3, n, grid::Scheme::fd4);
        fd.push_back(paneitz::invariance_check(covariance_map(g, seed), structure::heisenberg(1, g), sin_sin(g, 0.1)));
    }
    const double order = std::min(observed_order(fd[0], fd[1]), observed_order(fd[1], fd[2]));
    const double measured = std::max(worst_const, spectral);
    Criterion c = make(5, "conformal invariance of F1", measured, 1e-6);
    c.pass = c.pass && order >= 3.5;
    c.detail = "constant u " + fmt("%.3e", worst_const) + ", 64^3 spectral " + fmt("%.3e", spectral) +
               " (tol 1e-6 relative); fd4 order " + fmt("%.3f", order) + " (min 3.5)";
    c.values = {{"constant", worst_const}, {"spectral64", spectral}, {"fd4_16", fd[0]},
                {"fd4_32", fd[1]},         {"fd4_64", fd[2]},        {"fd4_order", order}};
    return c;
}

Criterion gradient(const Options& o) {
    const GridSpec g = GridSpec::uniform(3, 32);
    // A torsionful structure exercises every term of P1 and F1.
    const auto s = structure::solve_structure(structure::conformal_rescale(structure::heisenberg(1, g), sin_sin(g, 0.1)));
    double flat_half = 0.0, sphere_half = 0.0, flat_neg = 0.0, sphere_neg = 0.0;
    double min_pairing = INFINITY;
    for (int k = 0; k < 3; ++k) {
        fields::Rng rng(o.seed + 6000 + static_cast<std::uint64_t>(k));
        {
            const MapField phi = fields::random_map(flat(2), g, rng, 0.5);
            // Adding phi itself keeps v from being orthogonal to P1 by
            // disjoint Fourier support.
            const auto v = fields::random_section(phi, rng, 1.0) + target::PullbackSection{phi.periodic};
            const auto r = paneitz::gradient_report(phi, v, s);
            min_pairing = std::min(min_pairing, std::abs(r.pairing));
            flat_half = std::max(flat_half, r.mismatch(0.5));
            flat_neg = std::max(flat_neg, r.mismatch(-1.0));
        }
        {
            // Angles of amplitude 0.2 keep the sphere map resolved at 32^3.
            const MapField phi = fields::random_map(sphere(), g, rng, 0.2);
            const auto v = fields::random_section(phi, rng, 0.2);
            const auto r = paneitz::gradient_report(phi, v, s);
            min_pairing = std::min(min_pairing, std::abs(r.pairing));
            sphere_half = std::max(sphere_half, r.mismatch(0.5));
            sphere_neg = std::max(sphere_neg, r.mismatch(-1.0));
        }
    }
    Criterion c = make(6, "gradient identity dF1(v) = 1/2 <v, P1>", flat_half, 1e-6);
    c.pass = c.pass && sphere_half <= 1e-5;
    c.detail = "mismatch with constant 1/2: flat " + fmt("%.3e", flat_half) + " (tol 1e-6), sphere " +
               fmt("%.3e", sphere_half) + " (tol 1e-5); with constant -1: flat " + fmt("%.3e", flat_neg) +
               ", sphere " + fmt("%.3e", sphere_neg) + "; smallest |<v, P1>| " + fmt("%.3e", min_pairing);
    c.values = {{"flat_half", flat_half}, {"sphere_half", sphere_half}, {"flat_minus_one", flat_neg},
                {"sphere_minus_one", sphere_neg}, {"min_pairing", min_pairing}};
    return c;
}

Criterion scalar_reduction(const Options& o) {
    const GridSpec g = GridSpec::uniform(3, 32);
    const auto s = structure::flat_heisenberg(1, g);
    const grid::Frame& frame = s.frame();
    double worst = 0.0, worst_rel = 0.0;
    for (int k = 0; k < 5; ++k) {
        fields::Rng rng(o.seed + 7000 + static_cast<std::uint64_t>(k));
        const GridScalar f = fields::random_trig(g, rng, 2, 4, 1.0, true);
        const GridScalar lap = oracle_sublaplacian(frame, f);
        const GridScalar oracle = -oracle_sublaplacian(frame, lap) - oracle_reeb_square(frame, f);
        const GridScalar p = paneitz::p1(scalar_map(f), s).c[0];
        const double diff = (p - oracle).max_abs();
        worst = std::max(worst, diff);
        worst_rel = std::max(worst_rel, diff / oracle.max_abs());
    }
    Criterion c = make(7, "scalar reduction P1 = -Delta_b^2 - R^2", worst, 1e-10);
    c.detail = "5 seeded unit-amplitude scalars with |k| <= 2 in every axis; relative to sup |oracle| " +
               fmt("%.3e", worst_rel);
    c.values = {{"absolute", worst}, {"relative", worst_rel}};
    return c;
}

Criterion jet_consistency(const Options& o) {
    const GridSpec g = GridSpec::uniform(3, 32);
    const auto s = structure::flat_heisenberg(1, g);
    fields::Rng rng(o.seed + 8000);
    const MapField phi = fields::random_map(flat(2), g, rng, 0.5, true);
    const auto jet = extension::solve_jet(phi, s, 1);
    const double diff = (jet.log_coeff - paneitz::p1(phi, s)).max_abs();
    const auto ratios = extension::residual_ratios(jet, phi, s, {1e-1, 1e-2, 1e-3});
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    const double spread = *hi / *lo;
    Criterion c = make(8, "jet log coefficient vs P1", diff, 1e-12);
    c.pass = c.pass && std::isfinite(spread) && spread <= 10.0;
    c.detail = "sup |P_jet - P1| " + fmt("%.3e", diff) + "; residual/r^3 ratios " + fmt("%.3e", ratios[0]) + ", " +
               fmt("%.3e", ratios[1]) + ", " + fmt("%.3e", ratios[2]) + " (max/min " + fmt("%.3f", spread) +
               ", limit 10)";
    c.values = {{"sup_difference", diff}, {"ratio_r1e-1", ratios[0]}, {"ratio_r1e-2", ratios[1]},
                {"ratio_r1e-3", ratios[2]}, {"ratio_spread", spread}};
    return c;
}

double asymmetry(int n, const GridSpec& g, std::uint64_t seed) {
    const auto s = structure::flat_heisenberg(n, g);
    fields::Rng rng(seed);
    const GridScalar f = fields::random_trig(g, rng, 2, 4, 1.0, true);
    const GridScalar h = fields::random_trig(g, rng, 2, 4, 1.0, true);
    auto op = [&](const GridScalar& x) {
        if (n == 1) return paneitz::p1(scalar_map(x), s).c[0];
        return extension::solve_jet(scalar_map(x), s, n).log_coeff.c[0];
    };
    const double a = grid::integrate(f * op(h)).real();
    const double b = grid::integrate(h * op(f)).real();
    return std::abs(a - b) / (f.l2_norm() * h.l2_norm());
}

Criterion self_adjoint(const Options& o) {
    const double a1 = asymmetry(1, GridSpec::uniform(3, 32), o.seed + 9000);
    const double a2 = asymmetry(2, GridSpec::uniform(5, 10), o.seed + 9001);
    Criterion c = make(9, "self-adjointness of P_n on scalars", std::max(a1, a2), 1e-8);
    c.detail = "|<f, P g> - <g, P f>| / (|f| |g|): n = 1 " + fmt("%.3e", a1) + ", n = 2 " + fmt("%.3e", a2);
    c.values = {{"n1", a1}, {"n2", a2}};
    return c;
}

double jet_sup(const extension::JetExpansion& jet) {
    double m = jet.log_coeff.max_abs();
    for (const auto& c : jet.coeffs) m = std::max(m, c.max_abs());
    return m;
}

Criterion subharmonic_vanishing() {
    const GridSpec g3 = GridSpec::uniform(3, 32);
    const GridSpec g5 = GridSpec::uniform(5, 10);
    const double j1 = jet_sup(extension::solve_jet(MapField::projection(flat(2), g3), structure::flat_heisenberg(1, g3), 1));
    const double j2 = jet_sup(extension::solve_jet(MapField::projection(flat(4), g5), structure::flat_heisenberg(2, g5), 2));
    Criterion c = make(10, "jet of the projection vanishes", std::max(j1, j2), 1e-12);
    c.detail = "sup over jet coefficients: n = 1 " + fmt("%.3e", j1) + ", n = 2 " + fmt("%.3e", j2);
    c.values = {{"n1", j1}, {"n2", j2}};
    return c;
}

Criterion flow_descent(const Options& o) {
    const GridSpec g = GridSpec::uniform(3, 32);
    const auto s = structure::flat_heisenberg(1, g);
    MapField phi = MapField::projection(flat(2), g);
    fields::Rng rng(o.seed + 11000);
    for (auto& comp : phi.periodic) comp += fields::random_trig(g, rng, 2, 4, 0.05);
    flow::FlowConfig cfg;
    cfg.backtracking = true;
    cfg.preconditioner = true;
    cfg.max_steps = 500;
    cfg.stop_tol = 1e-9;
    const auto rec = flow::gradient_flow(phi, s, cfg).trace.records;
    bool monotone = true;
    for (std::size_t k = 1; k < rec.size(); ++k)
        if (rec[k].f1 > rec[k - 1].f1) monotone = false;
    const double reduction = rec.front().p1_norm / rec.back().p1_norm;
    Criterion c = make(11, "flow descent", 1.0 / reduction, 0.1);
    c.pass = c.pass && monotone;
    c.detail = "|P1| " + fmt("%.3e", rec.front().p1_norm) + " -> " + fmt("%.3e", rec.back().p1_norm) + " in " +
               std::to_string(rec.size() - 1) + " steps; F1 " + fmt("%.9g", rec.front().f1) + " -> " +
               fmt("%.9g", rec.back().f1) + (monotone ? ", non-increasing" : ", INCREASED");
    c.values = {{"p1_initial", rec.front().p1_norm}, {"p1_final", rec.back().p1_norm},
                {"steps", static_cast<double>(rec.size() - 1)}, {"monotone", monotone ? 1.0 : 0.0}};
    return c;
}

// max over b of |d theta(R, E_b)| and |theta(R) - 1|.
double reeb_defect(const structure::ContactCoframe& cf, const grid::VectorField& reeb) {
    const grid::TwoForm dtheta = cf.frame->exterior_derivative(cf.theta);
    double m = (grid::contract(cf.theta, reeb) + grid::Complex(-1.0)).max_abs();
    for (int b = 0; b < cf.rank(); ++b) {
        grid::VectorField e;
        for (int a = 0; a < cf.rank(); ++a) e.c.emplace_back(cf.spec(), a == b ? 1.0 : 0.0);
        m = std::max(m, grid::contract(dtheta, reeb, e).max_abs());
    }
    return m;
}

double field_distance(const grid::VectorField& a, const grid::VectorField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.c.size(); ++k) m = std::max(m, (a.c[k] - b.c[k]).max_abs());
    return m;
}

Criterion infrastructure(const Options& o) {
    struct Model {
        std::string name;
        structure::PseudohermitianData data;
    };
    std::vector<Model> models;
    for (auto scheme : {grid::Scheme::spectral, grid::Scheme::fd4}) {
        const GridSpec g = GridSpec::uniform(3, 32, scheme);
        const std::string tag = grid::to_string(scheme);
        models.push_back({"heisenberg/" + tag, structure::solve_structure(structure::heisenberg(1, g))});
        models.push_back({"heisenberg_rescaled/" + tag,
                          structure::solve_structure(structure::conformal_rescale(structure::heisenberg(1, g),
                                                                                  sin_sin(g, 0.1)))});
    }
    models.push_back({"heisenberg n=2", structure::flat_heisenberg(2, GridSpec::uniform(5, 10))});

    double worst = 0.0;  // measured / tolerance
    std::string detail;
    auto record = [&](const std::string& what, double value, double tol) {
        worst = std::max(worst, value / tol);
        if (!detail.empty()) detail += "; ";
        detail += what + " " + fmt("%.2e", value);
    };
    fields::Rng rng(o.seed + 12000);
    for (const auto& m : models) {
        const GridSpec& g = m.data.spec();
        const double tol = structure::scheme_tolerance(g);
        // d^2 = 0 in the background frame and in coordinates.
        const GridScalar f = fields::random_trig(g, rng, 2, 4, 1.0);
        record(m.name + " frame d^2", m.data.frame().exterior_derivative(m.data.frame().differential(f)).max_abs(), tol);
        const GridScalar ft = fields::random_trig(g, rng, 2, 4, 1.0, true);
        grid::OneForm df;
        for (int a = 0; a < g.rank(); ++a) df.c.push_back(grid::derivative(ft, a));
        record(m.name + " coordinate d^2", grid::exterior_derivative(df).max_abs(), tol);
        record(m.name + " structure", m.data.structure_residual, tol);
        record(m.name + " levi", m.data.levi_residual, tol);
        // The solver's R is dual to the adapted coframe; it agrees with the
        // Reeb field of the defining system up to the Levi residual.
        const grid::VectorField reeb = structure::reeb_field(m.data.coframe);
        record(m.name + " reeb", reeb_defect(m.data.coframe, reeb), 1e-10);
        record(m.name + " dual R", field_distance(reeb, m.data.reeb), tol);
    }
    // Sphere tangentiality of P1 and of the exponential map.
    const GridSpec g = GridSpec::uniform(3, 32);
    const auto s = structure::solve_structure(structure::conformal_rescale(structure::heisenberg(1, g), sin_sin(g, 0.1)));
    const MapField phi = fields::random_map(sphere(), g, rng, 0.5);
    record("sphere P1 normal", target::normal_defect(phi, paneitz::p1(phi, s)), 1e-10);
    const MapField moved = target::exp_map(phi, fields::random_section(phi, rng, 0.1));
    record("sphere exp defect", moved.sphere_defect(), 1e-12);

    Criterion c = make(12, "infrastructure residuals", worst, 1.0);
    c.detail = "worst measured/tolerance " + fmt("%.3e", worst) + ": " + detail;
    c.values = {{"worst_ratio", worst}};
    return c;
}

} // namespace

Criterion run_criterion(int id, const Options& options) {
    switch (id) {
    case 1: return identity_energy();
    case 2: return projection_harmonic();
    case 3: return identity_harmonic();
    case 4: return covariance(options);
    case 5: return invariance(options);
    case 6: return gradient(options);
    case 7: return scalar_reduction(options);
    case 8: return jet_consistency(options);
    case 9: return self_adjoint(options);
    case 10: return subharmonic_vanishing();
    case 11: return flow_descent(options);
    case 12: return infrastructure(options);
    default: throw Error("no criterion " + std::to_string(id));
    }
}

std::vector<Criterion> run_all(const Options& options) {
    std::vector<Criterion> out;
    for (int id = 1; id <= criterion_count; ++id) out.push_back(run_criterion(id, options));
    return out;
}

} // namespace crlab::suite
