#include "crlab/fields.hpp"

#include <cmath>
#include <numbers>

namespace crlab::fields {

using grid::GridScalar;

GridScalar random_trig(const grid::GridSpec& spec, Rng& rng, int max_mode, int terms, double amplitude,
                       bool t_dependent) {
    const int d = spec.rank();
    std::uniform_int_distribution<int> mode(-max_mode, max_mode);
    std::uniform_real_distribution<double> coef(-amplitude, amplitude);
    std::vector<std::vector<int>> ks;
    std::vector<std::pair<double, double>> ab;
    for (int n = 0; n < terms; ++n) {
        std::vector<int> k(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) k[a] = (a == d - 1 && !t_dependent) ? 0 : mode(rng);
        ks.push_back(std::move(k));
        const double a = coef(rng);
        const double b = coef(rng);
        ab.emplace_back(a, b);
    }
    return GridScalar::sample(spec, [&](std::span<const double> x) {
        double v = 0.0;
        for (std::size_t n = 0; n < ks.size(); ++n) {
            double phase = 0.0;
            for (int a = 0; a < d; ++a) phase += ks[n][a] * x[a];
            phase *= 2.0 * std::numbers::pi;
            v += ab[n].first * std::cos(phase) + ab[n].second * std::sin(phase);
        }
        return grid::Complex(v, 0.0);
    });
}

std::vector<GridScalar> sphere_from_angles(const GridScalar& a, const GridScalar& b) {
    const Eigen::ArrayXd ar = a.values().real();
    const Eigen::ArrayXd br = b.values().real();
    std::vector<GridScalar> out;
    out.emplace_back(a.spec(), (br.cos() * ar.cos()).cast<grid::Complex>().eval());
    out.emplace_back(a.spec(), (br.cos() * ar.sin()).cast<grid::Complex>().eval());
    out.emplace_back(a.spec(), br.sin().cast<grid::Complex>().eval());
    return out;
}

target::MapField random_map(std::shared_ptr<const target::TargetMetric> target, const grid::GridSpec& spec, Rng& rng,
                            double amplitude, bool t_dependent) {
    if (target->kind() == target::Kind::sphere) {
        const GridScalar a = random_trig(spec, rng, 2, 4, amplitude, t_dependent);
        const GridScalar b = random_trig(spec, rng, 2, 4, amplitude, t_dependent);
        return target::MapField::from_components(target, sphere_from_angles(a, b));
    }
    std::vector<GridScalar> comps;
    for (int k = 0; k < target->dim(); ++k) comps.push_back(random_trig(spec, rng, 2, 4, amplitude, t_dependent));
    return target::MapField::from_components(target, std::move(comps));
}

target::PullbackSection random_section(const target::MapField& phi, Rng& rng, double amplitude, bool t_dependent) {
    target::PullbackSection s;
    for (int k = 0; k < phi.dim(); ++k) s.c.push_back(random_trig(phi.spec(), rng, 2, 4, amplitude, t_dependent));
    return target::project(phi, s).real();
}

} // namespace crlab::fields
