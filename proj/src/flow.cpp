#include "crlab/flow.hpp"

#include <cmath>
#include <optional>
#include <numbers>

namespace crlab::flow {

using mapcalc::MapContext;
using target::PullbackSection;

namespace {

constexpr double kArmijoFactor = 0.5;
constexpr double kArmijoSlope = 1e-4;
constexpr double kMinStep = 1e-12;

// Horizontal axes are every axis but the last (t).
PullbackSection precondition(const PullbackSection& g, int power) {
    PullbackSection out = g;
    for (auto& c : out.c)
        c = grid::fourier_multiplier(c, [power](std::span<const int> k) {
            double k2 = 0.0;
            for (std::size_t a = 0; a + 1 < k.size(); ++a) {
                const double w = 2.0 * std::numbers::pi * k[a];
                k2 += w * w;
            }
            return 1.0 / (1.0 + std::pow(k2, power));
        });
    return out;
}

struct Evaluation {
    double energy = 0.0;
    PullbackSection gradient;  // L2 gradient of the monitored energy
    FlowRecord record;
};

using Evaluator = Evaluation (*)(const MapField&, const PseudohermitianData&);

Evaluation evaluate_f1(const MapField& phi, const PseudohermitianData& s) {
    const MapContext ctx(phi, s);
    Evaluation e;
    const PullbackSection p = paneitz::p1(ctx);
    e.energy = paneitz::f1(ctx);
    e.gradient = -p;
    e.record.f1 = e.energy;
    e.record.p1_norm = section_norm(phi, p, s);
    e.record.tension_norm = section_norm(phi, mapcalc::tension_b(ctx).real(), s);
    e.record.reeb_norm = section_norm(phi, mapcalc::reeb_second(ctx).real(), s);
    return e;
}

Evaluation evaluate_horizontal(const MapField& phi, const PseudohermitianData& s) {
    const MapContext ctx(phi, s);
    Evaluation e;
    const auto& t = ctx.tangent();
    grid::GridScalar density(phi.spec());
    for (std::size_t a = 0; a < t.on_T.size(); ++a) density += target::pair(phi, t.on_T[a], t.on_Tbar[a]);
    e.energy = grid::integrate(density, s.vol_density).real();
    const PullbackSection tension = mapcalc::tension_b(ctx).real();
    e.gradient = tension;
    e.record.f1 = paneitz::f1(ctx);
    e.record.p1_norm = section_norm(phi, paneitz::p1(ctx), s);
    e.record.tension_norm = section_norm(phi, tension, s);
    e.record.reeb_norm = section_norm(phi, mapcalc::reeb_second(ctx).real(), s);
    return e;
}

FlowResult run(const MapField& phi0, const PseudohermitianData& s, const FlowConfig& cfg, Evaluator eval,
               int precond_power, double FlowRecord::*stop_norm) {
    cfg.validate();
    FlowResult out{phi0, {}};
    Evaluation cur = eval(out.map, s);
    cur.record.iter = 0;
    out.trace.records.push_back(cur.record);

    for (int it = 1; it <= cfg.max_steps; ++it) {
        if (cur.record.*stop_norm <= cfg.stop_tol) {
            out.trace.converged = true;
            break;
        }
        PullbackSection dir = -cur.gradient;
        if (cfg.preconditioner) dir = precondition(dir, precond_power);
        dir = target::project(out.map, dir).real();
        // Directional derivative of the energy along dir.
        const double slope = paneitz::l2_pair(out.map, cur.gradient, dir, s);

        double eta = cfg.step;
        for (;;) {
            std::optional<MapField> trial;
            try {
                trial = target::exp_map(out.map, eta * dir);
            } catch (const StepTooLarge&) {
                // Past the injectivity radius: treated as a rejected step.
                if (!cfg.backtracking) throw;
            }
            if (trial && trial->sphere_defect() > 1e-12) throw StepCollapse("sphere step left the unit sphere");
            std::optional<Evaluation> next;
            if (trial) next = eval(*trial, s);
            if (next && (!cfg.backtracking || next->energy <= cur.energy + kArmijoSlope * eta * slope)) {
                out.map = std::move(*trial);
                cur = std::move(*next);
                cur.record.iter = it;
                cur.record.step = eta;
                out.trace.records.push_back(cur.record);
                break;
            }
            eta *= kArmijoFactor;
            if (eta < kMinStep)
                throw StepCollapse("backtracking shrank the step below 1e-12 at iteration " + std::to_string(it));
        }
    }
    if (cur.record.*stop_norm <= cfg.stop_tol) out.trace.converged = true;
    return out;
}

} // namespace

void FlowConfig::validate() const {
    if (!(step > 0.0)) throw ConfigError("flow step must be positive");
    if (!(stop_tol > 0.0)) throw ConfigError("flow stop_tol must be positive");
    if (max_steps < 0) throw ConfigError("flow max_steps must be non-negative");
}

double section_norm(const MapField& phi, const PullbackSection& s, const PseudohermitianData& st) {
    return std::sqrt(std::abs(paneitz::l2_pair(phi, s, s, st)));
}

FlowResult gradient_flow(const MapField& phi0, const PseudohermitianData& s, const FlowConfig& cfg) {
    if (s.n() != 1) throw DimensionMismatch("F_1 flow needs a 3-dimensional structure");
    return run(phi0, s, cfg, evaluate_f1, 2, &FlowRecord::p1_norm);
}

FlowResult subharmonic_flow(const MapField& phi0, const PseudohermitianData& s, const FlowConfig& cfg) {
    if (s.n() != 1) throw DimensionMismatch("subharmonic flow needs a 3-dimensional structure");
    return run(phi0, s, cfg, evaluate_horizontal, 1, &FlowRecord::tension_norm);
}

} // namespace crlab::flow
