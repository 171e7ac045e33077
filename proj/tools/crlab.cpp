// Experiment runner.
//
//   crlab COMMAND --config FILE [--out DIR] [--seed N] [--scheme NAME] [--refine K]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical check failed,
// 3 internal error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "crlab/experiment.hpp"
#include "crlab/extension.hpp"
#include "crlab/suite.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace crlab;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_check = 2;
constexpr int exit_internal = 3;

/// A numerical check that did not meet its tolerance.
class CheckFailed : public Error {
public:
    using Error::Error;
};

struct Options {
    std::string command;
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scheme;
    int refine = 1;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> axis_names(int rank) {
    if (rank == 3) return {"x", "y", "t"};
    if (rank == 5) return {"x1", "x2", "y1", "y2", "t"};
    std::vector<std::string> out;
    for (int a = 0; a < rank; ++a) out.push_back("x" + std::to_string(a));
    return out;
}

json grid_json(const grid::GridSpec& g) {
    return {{"dims", g.dims}, {"periods", g.periods}, {"scheme", grid::to_string(g.scheme)}};
}

class Runner {
public:
    explicit Runner(Options o) : opt_(std::move(o)) {}

    int run() {
        if (opt_.command == "suite") return suite();
        if (opt_.config_path.empty()) throw ConfigError("--config is required for " + opt_.command);
        cfg_ = config::Config::load(opt_.config_path);
        if (opt_.refine < 1) throw ConfigError("--refine must be at least 1");
        const bool study = opt_.command == "structure" || opt_.command == "covariance" ||
                           opt_.command == "invariance" || opt_.command == "gradcheck";
        if (opt_.refine > 1 && !study)
            throw ConfigError("--refine applies to structure, covariance, invariance and gradcheck");
        fs::create_directories(opt_.out_dir);

        if (study) return refinement_study();
        const experiment::Experiment ex = build(1);
        if (opt_.command == "p1") return p1(ex);
        if (opt_.command == "f1") return f1(ex);
        if (opt_.command == "jet") return jet(ex);
        if (opt_.command == "flow") return flow(ex);
        throw ConfigError("unknown command " + opt_.command);
    }

private:
    experiment::Experiment build(int factor) const {
        experiment::Overrides ov;
        ov.refine = factor;
        ov.seed = opt_.seed;
        if (opt_.scheme) {
            try {
                ov.scheme = grid::scheme_from_string(*opt_.scheme);
            } catch (const Error& e) {
                throw ConfigError(std::string("--scheme: ") + e.what());
            }
        }
        return experiment::build(cfg_, ov);
    }

    json envelope(const experiment::Experiment& ex) const {
        json j;
        j["schema"] = 1;
        j["command"] = opt_.command;
        j["config"] = opt_.config_path;
        j["seed"] = ex.seed;
        j["grid"] = grid_json(ex.grid);
        j["target"] = ex.target->name();
        if (ex.u) j["conformal_factor"] = ex.u_text;
        return j;
    }

    void write_json(const std::string& name, const json& j) const {
        std::ofstream f(fs::path(opt_.out_dir) / name);
        f << j.dump(2) << "\n";
        if (!f) throw Error("cannot write " + (fs::path(opt_.out_dir) / name).string());
    }

    // Per-point CSV: grid coordinates followed by the named columns.
    void write_fields(const std::string& name, const grid::GridSpec& g, const std::vector<std::string>& columns,
                      const std::vector<grid::GridScalar>& values) const {
        std::ofstream f(fs::path(opt_.out_dir) / name);
        const auto axes = axis_names(g.rank());
        for (const auto& a : axes) f << a << ",";
        for (std::size_t k = 0; k < columns.size(); ++k) f << columns[k] << (k + 1 < columns.size() ? "," : "\n");
        std::vector<int> idx(static_cast<std::size_t>(g.rank()), 0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            for (int a = 0; a < g.rank(); ++a) f << num(idx[a] * g.spacing(a)) << ",";
            for (std::size_t k = 0; k < values.size(); ++k)
                f << num(values[k][i].real()) << (k + 1 < values.size() ? "," : "\n");
            for (int a = g.rank() - 1; a >= 0; --a) {
                if (++idx[a] < g.dims[a]) break;
                idx[a] = 0;
            }
        }
        if (!f) throw Error("cannot write " + name);
    }

    // One measurement of a refinement study.
    struct Level {
        double error = 0.0;
        double tolerance = 0.0;
        json extra;
    };

    Level measure(const experiment::Experiment& ex, bool write_artifacts) const {
        const std::string& c = opt_.command;
        Level l;
        if (c == "structure") {
            const auto s = ex.structure();
            const double tol = structure::scheme_tolerance(ex.grid);
            l.error = std::max(s.structure_residual, s.levi_residual);
            l.tolerance = tol;
            l.extra = {{"structure_residual", s.structure_residual},
                       {"levi_residual", s.levi_residual},
                       {"torsion_max", s.torsion.max_abs()},
                       {"scal_w_max", s.scal_w.max_abs()},
                       {"volume", s.volume()}};
            if (write_artifacts)
                write_fields("structure.csv", ex.grid, {"torsion_re", "torsion_im", "scal_w", "vol_density"},
                             {s.torsion, s.torsion.imag(), s.scal_w, s.vol_density});
        } else if (c == "covariance") {
            if (!ex.u) throw ConfigError("covariance needs [model] conformal_factor");
            const auto r = paneitz::covariance_check(ex.map, ex.base, *ex.u, ex.u_text);
            l.error = r.rel_error;
            l.tolerance = cfg_.get_double("check", "covariance_tol", 1e-6);
            l.extra = {{"expected_exponent", r.expected_exponent}, {"absolute", r.absolute}};
        } else if (c == "invariance") {
            if (!ex.u) throw ConfigError("invariance needs [model] conformal_factor");
            l.error = paneitz::invariance_check(ex.map, ex.base, *ex.u);
            l.tolerance = cfg_.get_double("check", "invariance_tol", 1e-6);
        } else {
            const auto s = ex.structure();
            const double constant = cfg_.get_double("check", "gradient_constant", 0.5);
            const bool on_sphere = ex.target->kind() == target::Kind::sphere;
            const auto r = paneitz::gradient_report(ex.map, ex.velocity(), s, cfg_.get_double("check", "epsilon", 1e-3));
            l.error = r.mismatch(constant);
            l.tolerance = cfg_.get_double("check", "gradient_tol", on_sphere ? 1e-5 : 1e-6);
            l.extra = {{"fd_derivative", r.fd_derivative},
                       {"pairing", r.pairing},
                       {"constant", constant},
                       {"mismatch_minus_one", r.mismatch(-1.0)}};
        }
        return l;
    }

    int refinement_study() {
        json levels = json::array();
        std::vector<double> errors;
        json head;
        bool pass = true;
        double last_tol = 0.0;
        for (int k = 0; k < opt_.refine; ++k) {
            const experiment::Experiment ex = build(1 << k);
            if (k == 0) head = envelope(ex);
            const Level l = measure(ex, k == opt_.refine - 1);
            json entry = {{"grid", grid_json(ex.grid)}, {"error", l.error}, {"tolerance", l.tolerance}};
            if (!l.extra.is_null()) entry["values"] = l.extra;
            levels.push_back(entry);
            errors.push_back(l.error);
            last_tol = l.tolerance;
            std::printf("%s %s: error %s (tolerance %s)\n", opt_.command.c_str(), grid_label(ex.grid).c_str(),
                        num(l.error).c_str(), num(l.tolerance).c_str());
        }
        // The finest level decides the check.
        pass = errors.back() <= last_tol;
        head["levels"] = levels;
        if (errors.size() > 1) {
            json orders = json::array();
            for (std::size_t k = 1; k < errors.size(); ++k) {
                const double order = std::log2(errors[k - 1] / errors[k]);
                orders.push_back(std::isfinite(order) ? json(order) : json(nullptr));
                std::printf("observed order %zu->%zu: %s\n", k - 1, k, num(order).c_str());
            }
            head["observed_orders"] = orders;
        }
        head["pass"] = pass;
        write_json(opt_.command + ".json", head);
        if (!pass)
            throw CheckFailed(opt_.command + ": measured " + num(errors.back()) + " exceeds tolerance " + num(last_tol));
        return exit_ok;
    }

    static std::string grid_label(const grid::GridSpec& g) {
        std::string s;
        for (std::size_t a = 0; a < g.dims.size(); ++a) s += (a ? "x" : "") + std::to_string(g.dims[a]);
        return s + " " + grid::to_string(g.scheme);
    }

    int p1(const experiment::Experiment& ex) const {
        const auto s = ex.structure();
        const auto p = paneitz::p1(ex.map, s);
        json j = envelope(ex);
        j["p1_sup"] = p.max_abs();
        j["p1_l2"] = flow::section_norm(ex.map, p, s);
        write_json("p1.json", j);
        std::vector<std::string> cols;
        for (int k = 0; k < p.dim(); ++k) cols.push_back("p1_" + std::to_string(k));
        write_fields("p1.csv", ex.grid, cols, p.c);
        std::printf("sup |P1| = %s\nL2 |P1| = %s\n", num(p.max_abs()).c_str(), num(j["p1_l2"].get<double>()).c_str());
        return exit_ok;
    }

    int f1(const experiment::Experiment& ex) const {
        const auto s = ex.structure();
        const double f = paneitz::f1(ex.map, s);
        json j = envelope(ex);
        j["f1"] = f;
        j["volume"] = s.volume();
        write_json("f1.json", j);
        std::printf("%s\n", num(f).c_str());
        return exit_ok;
    }

    int jet(const experiment::Experiment& ex) const {
        const int order = static_cast<int>(cfg_.get_int("jet", "order", ex.n));
        if (order != ex.n) throw ConfigError("[jet] order must equal [model] n");
        const auto s = ex.structure();
        const auto jet = extension::solve_jet(ex.map, s, order);
        const auto r_samples = cfg_.get_doubles("jet", "r", std::vector<double>{1e-1, 1e-2, 1e-3});
        const auto ratios = extension::residual_ratios(jet, ex.map, s, r_samples);
        json j = envelope(ex);
        json coeffs = json::array();
        for (const auto& c : jet.coeffs) coeffs.push_back(c.max_abs());
        j["coefficient_sup"] = coeffs;
        j["log_coefficient_sup"] = jet.log_coeff.max_abs();
        j["r"] = r_samples;
        j["residual_ratios"] = ratios;
        double lo = INFINITY, hi = 0.0;
        for (double r : ratios) {
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        // All-zero residuals (a vanishing jet) are bounded trivially.
        const double spread = hi == 0.0 ? 1.0 : hi / lo;
        j["ratio_spread"] = spread;
        const bool pass = std::isfinite(spread) && spread <= 10.0;
        j["pass"] = pass;
        write_json("jet.json", j);
        std::vector<std::string> cols;
        for (int k = 0; k < jet.log_coeff.dim(); ++k) cols.push_back("log_coeff_" + std::to_string(k));
        write_fields("jet.csv", ex.grid, cols, jet.log_coeff.c);
        std::printf("sup |P_%d| = %s\nresidual ratio spread = %s\n", order, num(jet.log_coeff.max_abs()).c_str(),
                    num(spread).c_str());
        if (!pass) throw CheckFailed("jet: residual ratio spread " + num(spread) + " exceeds 10");
        return exit_ok;
    }

    int flow(const experiment::Experiment& ex) const {
        const auto s = ex.structure();
        const auto fc = ex.flow_config();
        const std::string kind = cfg_.get_string("flow", "kind", std::string("f1"));
        flow::FlowResult r;
        if (kind == "f1")
            r = flow::gradient_flow(ex.map, s, fc);
        else if (kind == "subharmonic")
            r = flow::subharmonic_flow(ex.map, s, fc);
        else
            throw ConfigError("[flow] kind '" + kind + "' is not f1 or subharmonic");

        std::ofstream csv(fs::path(opt_.out_dir) / "flow.csv");
        csv << "iter,f1,p1_norm,tension_norm,step\n";
        for (const auto& rec : r.trace.records)
            csv << rec.iter << "," << num(rec.f1) << "," << num(rec.p1_norm) << "," << num(rec.tension_norm) << ","
                << num(rec.step) << "\n";
        std::ofstream gp(fs::path(opt_.out_dir) / "flow.gp");
        gp << "set datafile separator ','\n"
              "set key autotitle columnhead\n"
              "set xlabel 'iteration'\n"
              "set logscale y\n"
              "set multiplot layout 2,1\n"
              "plot 'flow.csv' using 1:3 with linespoints, '' using 1:4 with linespoints\n"
              "unset logscale y\n"
              "plot 'flow.csv' using 1:2 with linespoints\n"
              "unset multiplot\n";

        json j = envelope(ex);
        j["kind"] = kind;
        j["steps"] = r.trace.records.size() - 1;
        j["converged"] = r.trace.converged;
        const auto& first = r.trace.records.front();
        const auto& last = r.trace.records.back();
        j["initial"] = {{"f1", first.f1}, {"p1_norm", first.p1_norm}, {"tension_norm", first.tension_norm}};
        j["final"] = {{"f1", last.f1},
                      {"p1_norm", last.p1_norm},
                      {"tension_norm", last.tension_norm},
                      {"reeb_norm", last.reeb_norm}};
        write_json("flow.json", j);
        std::printf("%zu steps, %s %s -> %s%s\n", r.trace.records.size() - 1,
                    kind == "f1" ? "|P1|" : "|tension|",
                    num(kind == "f1" ? first.p1_norm : first.tension_norm).c_str(),
                    num(kind == "f1" ? last.p1_norm : last.tension_norm).c_str(),
                    r.trace.converged ? " (converged)" : "");
        return exit_ok;
    }

    int suite() {
        suite::Options so;
        if (!opt_.config_path.empty()) {
            cfg_ = config::Config::load(opt_.config_path);
            so.seed = static_cast<std::uint64_t>(cfg_.get_int("run", "seed", static_cast<long>(so.seed)));
        }
        if (opt_.seed) so.seed = *opt_.seed;
        fs::create_directories(opt_.out_dir);
        json j;
        j["schema"] = 1;
        j["command"] = "suite";
        j["seed"] = so.seed;
        json list = json::array();
        std::vector<std::string> failed;
        for (int id = 1; id <= suite::criterion_count; ++id) {
            const suite::Criterion c = suite::run_criterion(id, so);
            json values = json::object();
            for (const auto& [k, v] : c.values) values[k] = v;
            list.push_back({{"id", c.id},
                            {"name", c.name},
                            {"measured", c.measured},
                            {"tolerance", c.tolerance},
                            {"pass", c.pass},
                            {"detail", c.detail},
                            {"values", values}});
            std::printf("%s %2d %s: measured %.6e, tolerance %.1e\n", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                        c.measured, c.tolerance);
            std::fflush(stdout);
            if (!c.pass) failed.push_back(std::to_string(c.id));
        }
        j["criteria"] = list;
        j["passed"] = suite::criterion_count - static_cast<int>(failed.size());
        j["failed"] = failed.size();
        write_json("suite.json", j);
        if (!failed.empty()) {
            std::string ids;
            for (const auto& f : failed) ids += (ids.empty() ? "" : ", ") + f;
            throw CheckFailed("suite: criteria " + ids + " failed, see suite.json");
        }
        return exit_ok;
    }

    Options opt_;
    config::Config cfg_;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"CR-harmonic map experiments"};
    app.require_subcommand(1, 1);
    Options opt;
    long long seed = -1;
    std::string scheme;
    const char* commands[][2] = {
        {"structure", "solve the structure equations, write torsion and curvature fields"},
        {"p1", "evaluate P1 on the configured map"},
        {"f1", "evaluate the renormalized energy F1"},
        {"covariance", "conformal covariance of P1 under the configured factor"},
        {"invariance", "conformal invariance of F1 under the configured factor"},
        {"gradcheck", "finite-difference check of the first variation of F1"},
        {"jet", "formal harmonic extension and its log coefficient"},
        {"flow", "run the F1 descent or the subharmonic flow"},
        {"suite", "run every acceptance criterion"},
    };
    for (auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", opt.config_path, "configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "seed override")->check(CLI::NonNegativeNumber);
        sub->add_option("--scheme", scheme, "derivative scheme override")->check(CLI::IsMember({"spectral", "fd4"}));
        sub->add_option("--refine", opt.refine, "number of grid doublings for a convergence study")
            ->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }
    opt.command = app.get_subcommands().front()->get_name();
    if (seed >= 0) opt.seed = static_cast<std::uint64_t>(seed);
    if (!scheme.empty()) opt.scheme = scheme;

    try {
        return Runner(opt).run();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const CheckFailed& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return exit_check;
    } catch (const StructureResidual& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return exit_check;
    } catch (const NormalizationFailure& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return exit_check;
    } catch (const StepCollapse& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return exit_check;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
}
