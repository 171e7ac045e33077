#include "crlab/structure.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace crlab::structure {

using grid::Complex;
using grid::MatrixField;
using grid::TwoForm;

namespace {

constexpr Complex kI{0.0, 1.0};

OneForm scaled(const OneForm& f, const GridScalar& s) {
    OneForm out = f;
    for (auto& c : out.c) c *= s;
    return out;
}

OneForm add(OneForm a, const OneForm& b) {
    for (std::size_t i = 0; i < a.c.size(); ++i) a.c[i] += b.c[i];
    return a;
}

OneForm conj(const OneForm& f) {
    OneForm out = f;
    for (auto& c : out.c) c = c.conj();
    return out;
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

/// Rows theta, theta^1..theta^n, theta^1bar..theta^nbar.
MatrixField coframe_matrix(const ContactCoframe& cf) {
    const int d = cf.rank();
    MatrixField a{d, {}};
    a.entries.reserve(static_cast<std::size_t>(d * d));
    std::vector<const OneForm*> rows;
    std::vector<OneForm> bars;
    for (int al = 0; al < cf.n; ++al) bars.push_back(cf.theta_bar(al));
    rows.push_back(&cf.theta);
    for (int al = 0; al < cf.n; ++al) rows.push_back(&cf.theta_h[al]);
    for (int al = 0; al < cf.n; ++al) rows.push_back(&bars[al]);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a.entries.push_back(rows[r]->c[c]);
    return a;
}

VectorField column(const MatrixField& m, int j) {
    VectorField v;
    for (int a = 0; a < m.k; ++a) v.c.push_back(m(a, j));
    return v;
}

GridScalar volume_density(const ContactCoframe& cf, const MatrixField& a) {
    const GridSpec& spec = cf.spec();
    GridScalar out(spec);
    const GridScalar bg = cf.frame->volume_density();
    const double nfact = factorial(cf.n);
    Eigen::MatrixXcd local(a.k, a.k);
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (int r = 0; r < a.k; ++r)
            for (int c = 0; c < a.k; ++c) local(r, c) = a(r, c)[i];
        out[i] = nfact * std::abs(local.determinant()) / std::abs(bg[i]);
    }
    return out;
}

void check_cf(const ContactCoframe& cf) {
    if (!cf.frame) throw DimensionMismatch("coframe has no background frame");
    if (cf.frame->rank() != cf.rank() || cf.theta.rank() != cf.rank() ||
        static_cast<int>(cf.theta_h.size()) != cf.n)
        throw DimensionMismatch("coframe components do not match 2n+1 axes");
}

} // namespace

OneForm ContactCoframe::theta_bar(int alpha) const { return conj(theta_h[alpha]); }

VectorField PseudohermitianData::T_bar(int alpha) const {
    VectorField v = T[alpha];
    for (auto& c : v.c) c = c.conj();
    return v;
}

double PseudohermitianData::volume() const { return grid::integrate(vol_density).real(); }

double scheme_tolerance(const GridSpec& grid) {
    if (grid.scheme == grid::Scheme::spectral) return 1e-8;
    double h = 0.0;
    for (int a = 0; a < grid.rank(); ++a) h = std::max(h, grid.spacing(a));
    return 1e4 * std::pow(h, 4);
}

ContactCoframe heisenberg(int n, const GridSpec& grid) {
    if (n < 1 || grid.rank() != 2 * n + 1)
        throw DimensionMismatch("heisenberg(" + std::to_string(n) + ") needs a grid with " +
                                std::to_string(2 * n + 1) + " axes, got " + std::to_string(grid.rank()));
    ContactCoframe cf;
    cf.frame = std::make_shared<const grid::Frame>(grid::Frame::heisenberg(grid, n));
    cf.n = n;
    const int d = 2 * n + 1;
    cf.theta.c.assign(static_cast<std::size_t>(d), GridScalar(grid));
    cf.theta.c[2 * n] = GridScalar(grid, 1.0);
    const double s = 1.0 / std::numbers::sqrt2;
    for (int a = 0; a < n; ++a) {
        OneForm th;
        th.c.assign(static_cast<std::size_t>(d), GridScalar(grid));
        th.c[a] = GridScalar(grid, s);
        th.c[n + a] = GridScalar(grid, Complex(0.0, s));
        cf.theta_h.push_back(std::move(th));
    }
    return cf;
}

double levi_residual(const ContactCoframe& cf) {
    check_cf(cf);
    TwoForm dtheta = cf.frame->exterior_derivative(cf.theta);
    TwoForm levi(cf.spec(), cf.rank());
    for (int a = 0; a < cf.n; ++a) {
        TwoForm w = grid::wedge(cf.theta_h[a], cf.theta_bar(a));
        for (std::size_t k = 0; k < w.components().size(); ++k) levi.components()[k] += kI * w.components()[k];
    }
    return (dtheta - levi).max_abs();
}

VectorField reeb_field(const ContactCoframe& cf) {
    check_cf(cf);
    const int d = cf.rank();
    TwoForm dtheta = cf.frame->exterior_derivative(cf.theta);
    // Rows: theta_a, then (i_R d theta)(E_b) = sum_a R^a dtheta(E_a, E_b).
    // Normal equations M^H M R = M^H e_0.
    std::vector<std::vector<GridScalar>> m;
    m.push_back(cf.theta.c);
    for (int b = 0; b < d; ++b) {
        std::vector<GridScalar> row;
        for (int a = 0; a < d; ++a) row.push_back(dtheta.component(a, b));
        m.push_back(std::move(row));
    }
    MatrixField normal{d, {}};
    std::vector<GridScalar> rhs;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            GridScalar s(cf.spec());
            for (const auto& row : m) s += row[i].conj() * row[j];
            normal.entries.push_back(std::move(s));
        }
        rhs.push_back(m[0][i].conj());
    }
    VectorField r{grid::pointwise_solve(normal, rhs)};
    for (auto& c : r.c) c = c.real();
    return r;
}

PseudohermitianData flat_heisenberg(int n, const GridSpec& grid) {
    if (n == 1) return solve_structure(heisenberg(1, grid));
    PseudohermitianData s;
    s.coframe = heisenberg(n, grid);
    const int d = 2 * n + 1;
    MatrixField a = coframe_matrix(s.coframe);
    MatrixField inv = grid::pointwise_inverse(a);
    s.reeb = column(inv, 0);
    for (auto& c : s.reeb.c) c = c.real();
    for (int al = 0; al < n; ++al) s.T.push_back(column(inv, 1 + al));
    s.omega.c.assign(static_cast<std::size_t>(d), GridScalar(grid));
    s.omega_T = GridScalar(grid);
    s.omega_Tbar = GridScalar(grid);
    s.torsion = GridScalar(grid);
    s.scal_w = GridScalar(grid);
    s.vol_density = volume_density(s.coframe, a);
    s.levi_residual = levi_residual(s.coframe);
    for (int al = 0; al < n; ++al)
        s.structure_residual =
            std::max(s.structure_residual, s.coframe.frame->exterior_derivative(s.coframe.theta_h[al]).max_abs());
    s.flat = true;
    return s;
}

PseudohermitianData solve_structure(const ContactCoframe& cf) {
    check_cf(cf);
    if (cf.n != 1) throw DimensionMismatch("solve_structure supports n = 1 coframes only");
    const GridSpec& spec = cf.spec();
    const double tol = scheme_tolerance(spec);

    PseudohermitianData s;
    s.coframe = cf;
    s.levi_residual = levi_residual(cf);
    if (s.levi_residual > tol)
        throw NormalizationFailure("coframe is not Levi-normalized: residual " + std::to_string(s.levi_residual));

    MatrixField a = coframe_matrix(cf);
    MatrixField inv = grid::pointwise_inverse(a);
    s.reeb = column(inv, 0);
    for (auto& c : s.reeb.c) c = c.real();
    s.T.push_back(column(inv, 1));
    const VectorField t1 = s.T[0];
    const VectorField t1bar = s.T_bar(0);

    const OneForm& theta = cf.theta;
    const OneForm& theta1 = cf.theta_h[0];
    const OneForm theta1bar = cf.theta_bar(0);

    TwoForm dtheta1 = cf.frame->exterior_derivative(theta1);
    const GridScalar ca = grid::contract(dtheta1, s.reeb, t1);
    const GridScalar cb = grid::contract(dtheta1, s.reeb, t1bar);
    const GridScalar cc = grid::contract(dtheta1, t1, t1bar);

    // omega = -i Im(a) theta - conj(c) theta^1 + c theta^1bar; Re(a) vanishes
    // in the continuum and is left in the residual.
    s.omega = add(add(scaled(theta, -kI * ca.imag()), scaled(theta1, -cc.conj())), scaled(theta1bar, cc));
    s.omega_T = grid::contract(s.omega, t1);
    s.omega_Tbar = grid::contract(s.omega, t1bar);
    s.torsion = cb;

    TwoForm residual = dtheta1 - grid::wedge(theta1, s.omega);
    TwoForm tt = grid::wedge(theta, theta1bar);
    for (std::size_t k = 0; k < residual.components().size(); ++k)
        residual.components()[k] -= cb * tt.components()[k];
    s.structure_residual = residual.max_abs();
    if (s.structure_residual > tol)
        throw StructureResidual("structure equations missed by " + std::to_string(s.structure_residual));

    TwoForm domega = cf.frame->exterior_derivative(s.omega);
    s.scal_w = 2.0 * grid::contract(domega, t1, t1bar);
    s.vol_density = volume_density(cf, a);
    s.flat = s.torsion.max_abs() == 0.0 && s.omega.c[0].max_abs() == 0.0 && s.omega.c[1].max_abs() == 0.0 &&
             s.omega.c[2].max_abs() == 0.0;
    return s;
}

ContactCoframe conformal_rescale(const ContactCoframe& cf, const GridScalar& u) {
    check_cf(cf);
    if (cf.n != 1) throw DimensionMismatch("conformal_rescale is defined for n = 1 only");
    if (u.imag().max_abs() > 0.0) throw NormalizationFailure("conformal factor must be real");

    MatrixField inv = grid::pointwise_inverse(coframe_matrix(cf));
    VectorField t1bar = column(inv, 2);
    const GridScalar u1bar = cf.frame->apply(t1bar, u);

    ContactCoframe out;
    out.frame = cf.frame;
    out.n = 1;
    out.theta = scaled(cf.theta, grid::exp(2.0 * u));
    OneForm th1 = add(cf.theta_h[0], scaled(cf.theta, 2.0 * kI * u1bar));
    out.theta_h.push_back(scaled(th1, grid::exp(u)));
    for (auto& c : out.theta.c) c = c.real();

    const double residual = levi_residual(out);
    if (residual > scheme_tolerance(cf.spec()))
        throw NormalizationFailure("rescaled coframe misses Levi normalization by " + std::to_string(residual));
    return out;
}

} // namespace crlab::structure
