#include "crlab/extension.hpp"

#include <cmath>

namespace crlab::extension {

using mapcalc::MapContext;

DivergenceCoeffs einstein_divergence_coeffs(double lambda, double r, int n) {
    const double lr = lambda * r;
    if (std::abs(lr) >= 1.0) throw PoleReached("|lambda r| = " + std::to_string(std::abs(lr)) + " reaches the pole");
    const double l2r2 = lr * lr;
    DivergenceCoeffs c;
    c.a_dr = (n * (1.0 + l2r2) / (1.0 - l2r2) + (1.0 + lr) / (1.0 - lr) - 1.0) * r;
    c.a_rr = -r * r;
    c.a_RR = -r * r / ((1.0 - l2r2) * (1.0 - l2r2));
    c.a_b = r / ((1.0 - lr) * (1.0 - lr));
    return c;
}

namespace {

void require_flat(const MapField& phi, const PseudohermitianData& s, int n) {
    if (!s.flat || s.n() != n)
        throw NotFlatModel("jet recursion needs the flat Heisenberg model of dimension " + std::to_string(2 * n + 1));
    if (phi.target->kind() != target::Kind::flat_torus)
        throw NotFlatModel("jet recursion needs a flat target, got " + phi.target->name());
}

double factorial(int k) {
    double f = 1.0;
    for (int j = 2; j <= k; ++j) f *= j;
    return f;
}

} // namespace

PullbackSection sublaplacian(const MapContext& ctx, const PullbackSection& s) {
    return mapcalc::divergence_b(ctx.nabla(s), ctx);
}

PullbackSection reeb_square(const MapContext& ctx, const PullbackSection& s) {
    const auto& r = ctx.structure().reeb;
    return ctx.nabla(r, ctx.nabla(r, s));
}

JetExpansion solve_jet(const MapField& phi, const PseudohermitianData& s, int n) {
    if (n < 1) throw DimensionMismatch("jet order must be positive");
    require_flat(phi, s, n);
    const MapContext ctx(phi, s);

    // Delta_b phi_k and R^2 phi_k, k = 0 .. n.
    std::vector<PullbackSection> lap{mapcalc::tension_b(ctx)};
    std::vector<PullbackSection> rr{mapcalc::reeb_second(ctx)};

    JetExpansion jet;
    jet.n = n;
    for (int k = 1; k <= n; ++k) {
        PullbackSection next = -lap[k - 1];
        if (k >= 2) next += static_cast<double>(k - 1) * rr[k - 2];
        next *= 1.0 / (n - k + 1);
        lap.push_back(sublaplacian(ctx, next));
        rr.push_back(reeb_square(ctx, next));
        jet.coeffs.push_back(std::move(next));
    }
    jet.log_coeff = lap[n] - static_cast<double>(n) * rr[n - 1];
    return jet;
}

std::vector<double> residual_ratios(const JetExpansion& jet, const MapField& phi, const PseudohermitianData& s,
                                    const std::vector<double>& r_samples) {
    const int n = jet.n;
    require_flat(phi, s, n);
    if (static_cast<int>(jet.coeffs.size()) != n) throw DimensionMismatch("jet has the wrong number of coefficients");
    const MapContext ctx(phi, s);

    // Terms of U: phi_j r^j / j! for j = 0..n, then L r^{n+1} log r / (n+1)!.
    std::vector<PullbackSection> lap{mapcalc::tension_b(ctx)};
    std::vector<PullbackSection> rr{mapcalc::reeb_second(ctx)};
    for (const auto& c : jet.coeffs) {
        lap.push_back(sublaplacian(ctx, c));
        rr.push_back(reeb_square(ctx, c));
    }
    const PullbackSection& L = jet.log_coeff;
    const PullbackSection lapL = sublaplacian(ctx, L);
    const PullbackSection rrL = reeb_square(ctx, L);
    const double fn1 = factorial(n + 1);

    std::vector<double> out;
    for (double r : r_samples) {
        if (!(r > 0.0)) throw DimensionMismatch("residual samples must be positive radii");
        const double lg = std::log(r);
        PullbackSection res = PullbackSection::zero(phi.spec(), phi.dim());
        for (int j = 0; j <= n; ++j) {
            const double pj = std::pow(r, j) / factorial(j);
            // n r U_r - r^2 U_rr from phi_j r^j / j!: (n j - j (j - 1)) r^j / j!
            if (j >= 1) res += (static_cast<double>(n * j - j * (j - 1)) * pj) * jet.coeffs[j - 1];
            res += (-r * r * pj) * rr[j];
            res += (r * pj) * lap[j];
        }
        // Log term: n r d_r - r^2 d_rr of r^{n+1} log r equals
        // (n (n+1) - (n+1) n) r^{n+1} log r + (n - (2n+1)) r^{n+1}.
        const double rn1 = std::pow(r, n + 1);
        res += (-(n + 1.0) * rn1 / fn1) * L;
        const double logterm = rn1 * lg / fn1;
        res += (-r * r * logterm) * rrL;
        res += (r * logterm) * lapL;
        out.push_back(res.max_abs() / std::pow(r, n + 2));
    }
    return out;
}

double residual_check(const JetExpansion& jet, const MapField& phi, const PseudohermitianData& s,
                      const std::vector<double>& r_samples) {
    double worst = 0.0;
    for (double q : residual_ratios(jet, phi, s, r_samples)) worst = std::max(worst, q);
    return worst;
}

} // namespace crlab::extension
