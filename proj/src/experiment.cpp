#include "crlab/experiment.hpp"

#include <cmath>

#include "crlab/expr.hpp"
#include "crlab/fields.hpp"

namespace crlab::experiment {

using grid::GridScalar;

namespace {

GridScalar eval_key(const std::string& text, const grid::GridSpec& grid, const std::string& where) {
    try {
        return expr::eval(expr::parse(text), grid);
    } catch (const expr::ParseError& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const UnknownVariable& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

std::shared_ptr<const target::TargetMetric> build_target(const config::Config& cfg) {
    const std::string variant = cfg.get_string("target", "variant");
    if (variant == "flat_torus") {
        const int m = static_cast<int>(cfg.get_int("target", "dim"));
        if (m < 1) throw ConfigError("[target] dim must be positive");
        return std::make_shared<const target::TargetMetric>(
            target::TargetMetric::flat_torus(m, cfg.get_doubles("target", "periods", std::vector<double>{})));
    }
    if (variant == "sphere") return std::make_shared<const target::TargetMetric>(target::TargetMetric::embedded_sphere_2());
    if (variant == "webster")
        return std::make_shared<const target::TargetMetric>(target::TargetMetric::webster_heisenberg());
    if (variant == "chart") {
        const int m = static_cast<int>(cfg.get_int("target", "dim"));
        const auto entries = cfg.get_strings("target", "metric");
        if (m < 1 || m > 3 || static_cast<int>(entries.size()) != m * m)
            throw ConfigError("[target] metric needs dim*dim expressions, dim in 1..3");
        std::vector<expr::Ast> asts;
        for (const auto& e : entries) {
            try {
                asts.push_back(expr::parse(e));
            } catch (const expr::ParseError& err) {
                throw ConfigError(std::string("[target] metric: ") + err.what());
            }
            // Variables are the chart coordinates x, y, t.
            std::vector<double> probe(static_cast<std::size_t>(m), 0.0);
            try {
                expr::eval_at(asts.back(), probe);
            } catch (const UnknownVariable& err) {
                throw ConfigError(std::string("[target] metric: ") + err.what());
            } catch (const DivisionByZero&) {
            }
        }
        auto metric = [asts, m](std::span<const double> p) {
            Eigen::MatrixXd g(m, m);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) g(i, j) = expr::eval_at(asts[static_cast<std::size_t>(i * m + j)], p);
            return g;
        };
        return std::make_shared<const target::TargetMetric>(target::TargetMetric::chart(m, metric));
    }
    throw ConfigError("[target] variant '" + variant + "' is not one of flat_torus, sphere, chart, webster");
}

} // namespace

target::MapField builtin_map(const std::string& name, std::shared_ptr<const target::TargetMetric> target,
                             const grid::GridSpec& grid, const std::vector<double>& point) {
    if (name == "projection") {
        if (target->kind() != target::Kind::flat_torus || target->dim() != grid.rank() - 1)
            throw ConfigError("[map] projection needs a flat torus of dimension " + std::to_string(grid.rank() - 1) +
                              ", target is " + target->name() + " of dimension " + std::to_string(target->dim()));
        return target::MapField::projection(target, grid);
    }
    if (name == "identity") {
        if (target->kind() != target::Kind::webster || grid.rank() != 3)
            throw ConfigError("[map] identity needs the webster target over a 3-dimensional model");
        return target::MapField::identity(target, grid);
    }
    if (name == "constant") {
        std::vector<double> p = point;
        if (p.empty()) {
            p.assign(static_cast<std::size_t>(target->dim()), 0.0);
            if (target->kind() == target::Kind::sphere) p = {0.0, 0.0, 1.0};
        }
        if (static_cast<int>(p.size()) != target->dim())
            throw ConfigError("[map] point has " + std::to_string(p.size()) + " entries, target dimension is " +
                              std::to_string(target->dim()));
        return target::MapField::constant(target, grid, p);
    }
    throw ConfigError("[map] builtin '" + name + "' is not one of projection, identity, constant");
}

Experiment build(const config::Config& cfg, const Overrides& overrides) {
    Experiment ex;
    ex.cfg = cfg;
    ex.seed = overrides.seed ? *overrides.seed : static_cast<std::uint64_t>(cfg.get_int("run", "seed", 1));

    const std::string kind = cfg.get_string("model", "kind", std::string("heisenberg"));
    if (kind != "heisenberg" && kind != "heisenberg_rescaled")
        throw ConfigError("[model] kind '" + kind + "' is not heisenberg or heisenberg_rescaled");
    ex.n = static_cast<int>(cfg.get_int("model", "n", 1));
    if (ex.n < 1 || ex.n > 2) throw ConfigError("[model] n must be 1 or 2");
    const int rank = 2 * ex.n + 1;

    std::vector<long> dims;
    if (cfg.has("model", "dims"))
        dims = cfg.get_ints("model", "dims");
    else
        dims.assign(static_cast<std::size_t>(rank), cfg.get_int("model", "points", ex.n == 1 ? 32 : 10));
    if (static_cast<int>(dims.size()) != rank)
        throw ConfigError("[model] dims has " + std::to_string(dims.size()) + " entries; n = " +
                          std::to_string(ex.n) + " needs " + std::to_string(rank));
    ex.grid.scheme = grid::scheme_from_string(cfg.get_string("model", "scheme", std::string("spectral")));
    if (overrides.scheme) ex.grid.scheme = *overrides.scheme;
    for (long d : dims) {
        ex.grid.dims.push_back(static_cast<int>(d * overrides.refine));
        ex.grid.periods.push_back(1.0);
    }
    try {
        ex.grid.validate();
    } catch (const InvalidGrid& e) {
        throw ConfigError(std::string("[model] ") + e.what());
    }
    ex.base = structure::heisenberg(ex.n, ex.grid);

    if (cfg.has("model", "conformal_factor")) {
        if (ex.n != 1) throw ConfigError("[model] conformal_factor is only defined for n = 1");
        ex.u_text = cfg.get_string("model", "conformal_factor");
        ex.u = eval_key(ex.u_text, ex.grid, "[model] conformal_factor");
    } else if (kind == "heisenberg_rescaled") {
        throw ConfigError("[model] heisenberg_rescaled needs conformal_factor");
    }

    ex.target = build_target(cfg);

    const std::string builtin = cfg.get_string("map", "builtin", std::string(""));
    std::vector<GridScalar> values;
    if (cfg.has("map", "components")) {
        const auto comps = cfg.get_strings("map", "components");
        if (static_cast<int>(comps.size()) != ex.target->dim())
            throw ConfigError("[map] has " + std::to_string(comps.size()) + " components, target dimension is " +
                              std::to_string(ex.target->dim()));
        for (std::size_t k = 0; k < comps.size(); ++k)
            values.push_back(eval_key(comps[k], ex.grid, "[map] components[" + std::to_string(k) + "]"));
    }
    if (!builtin.empty()) {
        ex.map = builtin_map(builtin, ex.target, ex.grid, cfg.get_doubles("map", "point", std::vector<double>{}));
        // Components on top of a builtin are periodic offsets.
        if (!values.empty()) {
            if (ex.target->kind() == target::Kind::sphere || ex.target->kind() == target::Kind::webster)
                throw ConfigError("[map] offsets on a builtin are supported for flat and chart targets only");
            for (std::size_t k = 0; k < values.size(); ++k) ex.map.periodic[k] += values[k];
        }
    } else if (!values.empty()) {
        if (ex.target->kind() == target::Kind::sphere) {
            // Normalized pointwise onto the sphere.
            Eigen::ArrayXd norm = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(ex.grid.size()));
            for (const auto& v : values) norm += v.values().real().square();
            norm = norm.sqrt();
            if ((norm < 1e-12).any()) throw ConfigError("[map] sphere components vanish somewhere");
            for (auto& v : values) v.values() /= norm.cast<grid::Complex>();
        }
        ex.map = target::MapField::from_components(ex.target, std::move(values));
    } else if (cfg.get_bool("map", "random", false)) {
        fields::Rng rng(ex.seed);
        ex.map = fields::random_map(ex.target, ex.grid, rng, cfg.get_double("map", "amplitude", 0.5));
    } else {
        throw ConfigError("[map] needs builtin, components or random = true");
    }

    const double perturb = cfg.get_double("map", "perturb", 0.0);
    if (perturb != 0.0) {
        if (ex.target->kind() == target::Kind::sphere || ex.target->kind() == target::Kind::webster)
            throw ConfigError("[map] perturb is supported for flat and chart targets only");
        fields::Rng rng(ex.seed);
        for (auto& c : ex.map.periodic) c += fields::random_trig(ex.grid, rng, 2, 4, perturb);
    }
    return ex;
}

structure::ContactCoframe Experiment::coframe() const {
    return u ? structure::conformal_rescale(base, *u) : base;
}

structure::PseudohermitianData Experiment::structure() const {
    if (n == 1) return structure::solve_structure(coframe());
    return structure::flat_heisenberg(n, grid);
}

target::PullbackSection Experiment::velocity() const {
    if (cfg.has("check", "velocity")) {
        const auto comps = cfg.get_strings("check", "velocity");
        if (static_cast<int>(comps.size()) != map.dim())
            throw ConfigError("[check] velocity has " + std::to_string(comps.size()) + " components, map has " +
                              std::to_string(map.dim()));
        target::PullbackSection s;
        for (std::size_t k = 0; k < comps.size(); ++k)
            s.c.push_back(eval_key(comps[k], grid, "[check] velocity[" + std::to_string(k) + "]"));
        return target::project(map, s).real();
    }
    fields::Rng rng(seed + 1);
    return fields::random_section(map, rng, cfg.get_double("check", "velocity_amplitude", 1.0));
}

flow::FlowConfig Experiment::flow_config() const {
    flow::FlowConfig f;
    f.step = cfg.get_double("flow", "step", 1.0);
    f.max_steps = static_cast<int>(cfg.get_int("flow", "max_steps", 500));
    f.backtracking = cfg.get_bool("flow", "backtracking", true);
    f.stop_tol = cfg.get_double("flow", "stop_tol", 1e-8);
    f.preconditioner = cfg.get_bool("flow", "preconditioner", false);
    f.validate();
    return f;
}

} // namespace crlab::experiment
