#include "crlab/target.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

namespace crlab::target {

namespace {

// Levi-Civita connection of g = (dt - y dx)^2 + dx^2 + dy^2 in the frame
// e_x = d_x + y d_t, e_y = d_y, e_t = d_t, where [e_x, e_y] = -e_t.
std::vector<double> webster_gamma() {
    std::vector<double> g(27, 0.0);
    auto at = [&](int k, int i, int j) -> double& { return g[static_cast<std::size_t>(k * 9 + i * 3 + j)]; };
    at(2, 0, 1) = -0.5;
    at(2, 1, 0) = 0.5;
    at(1, 0, 2) = 0.5;
    at(1, 2, 0) = 0.5;
    at(0, 1, 2) = -0.5;
    at(0, 2, 1) = -0.5;
    return g;
}

const std::vector<double>& webster_table() {
    static const std::vector<double> table = webster_gamma();
    return table;
}

// Frame vector fields as coordinate velocities: webster e_x = d_x + y d_t.
std::vector<double> frame_to_coords(Kind kind, std::span<const double> p, std::span<const double> w) {
    std::vector<double> out(w.begin(), w.end());
    if (kind == Kind::webster) out[2] += p[1] * w[0];
    return out;
}

// Geodesic ODE in the section frame: p' = E(p) w, w'^k = -Gamma^k_ij w^i w^j.
std::vector<double> rk4_geodesic(const TargetMetric& h, std::span<const double> p0, std::span<const double> v,
                                 int steps) {
    const int m = h.dim();
    using State = std::vector<double>;
    auto rhs = [&](const State& s) {
        State ds(static_cast<std::size_t>(2 * m), 0.0);
        std::span<const double> p(s.data(), static_cast<std::size_t>(m));
        std::span<const double> w(s.data() + m, static_cast<std::size_t>(m));
        const auto pv = frame_to_coords(h.kind(), p, w);
        for (int k = 0; k < m; ++k) ds[k] = pv[k];
        const auto gamma = h.christoffel(p);
        for (int k = 0; k < m; ++k) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) acc += gamma[static_cast<std::size_t>(k * m * m + i * m + j)] * w[i] * w[j];
            ds[m + k] = -acc;
        }
        return ds;
    };
    State s(static_cast<std::size_t>(2 * m));
    for (int k = 0; k < m; ++k) {
        s[k] = p0[k];
        s[m + k] = v[k];
    }
    const double dt = 1.0 / steps;
    auto axpy = [](const State& a, double c, const State& b) {
        State r = a;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += c * b[i];
        return r;
    };
    for (int n = 0; n < steps; ++n) {
        const State k1 = rhs(s);
        const State k2 = rhs(axpy(s, 0.5 * dt, k1));
        const State k3 = rhs(axpy(s, 0.5 * dt, k2));
        const State k4 = rhs(axpy(s, dt, k3));
        for (std::size_t i = 0; i < s.size(); ++i) s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return {s.begin(), s.begin() + m};
}

constexpr int kGeodesicSteps = 100;
constexpr double kFdStep = 1e-4;

} // namespace

// ---------------------------------------------------------------------------
// TargetMetric

TargetMetric TargetMetric::flat_torus(int m, std::vector<double> periods) {
    if (m < 1) throw DimensionMismatch("flat torus needs a positive dimension");
    if (periods.empty()) periods.assign(static_cast<std::size_t>(m), 1.0);
    if (static_cast<int>(periods.size()) != m) throw DimensionMismatch("flat torus periods do not match dimension");
    TargetMetric h;
    h.kind_ = Kind::flat_torus;
    h.dim_ = m;
    h.periods_ = std::move(periods);
    return h;
}

TargetMetric TargetMetric::embedded_sphere_2() {
    TargetMetric h;
    h.kind_ = Kind::sphere;
    h.dim_ = 3;
    return h;
}

TargetMetric TargetMetric::chart(int m, MetricFn metric, ChristoffelFn christoffel) {
    if (m < 1 || !metric) throw DimensionMismatch("chart target needs a dimension and a metric");
    TargetMetric h;
    h.kind_ = Kind::chart;
    h.dim_ = m;
    h.metric_fn_ = std::move(metric);
    h.christoffel_fn_ = std::move(christoffel);
    return h;
}

TargetMetric TargetMetric::webster_heisenberg() {
    TargetMetric h;
    h.kind_ = Kind::webster;
    h.dim_ = 3;
    return h;
}

std::string TargetMetric::name() const {
    switch (kind_) {
    case Kind::flat_torus: return "flat_torus";
    case Kind::sphere: return "sphere";
    case Kind::chart: return "chart";
    case Kind::webster: return "webster";
    }
    return "?";
}

Eigen::MatrixXd TargetMetric::metric(std::span<const double> p) const {
    if (kind_ == Kind::chart) return metric_fn_(p);
    return Eigen::MatrixXd::Identity(dim_, dim_);
}

std::vector<double> TargetMetric::christoffel(std::span<const double> p) const {
    switch (kind_) {
    case Kind::webster: return webster_table();
    case Kind::chart: return christoffel_fn_ ? christoffel_fn_(p) : fd_christoffel(metric_fn_, p, kFdStep);
    default: return std::vector<double>(static_cast<std::size_t>(dim_ * dim_ * dim_), 0.0);
    }
}

void TargetMetric::coframe(std::span<const double> p, std::span<const Complex> dp, std::span<Complex> out) const {
    for (int k = 0; k < dim_; ++k) out[k] = dp[k];
    if (kind_ == Kind::webster) out[2] = dp[2] - p[1] * dp[0];
}

Complex TargetMetric::pair(std::span<const double> p, std::span<const Complex> a, std::span<const Complex> b) const {
    Complex s = 0.0;
    if (kind_ != Kind::chart) {
        for (int k = 0; k < dim_; ++k) s += a[k] * b[k];
        return s;
    }
    const Eigen::MatrixXd g = metric(p);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) s += g(i, j) * a[i] * b[j];
    return s;
}

void TargetMetric::curvature(std::span<const double> p, std::span<const Complex> x, std::span<const Complex> y,
                             std::span<const Complex> z, std::span<Complex> out) const {
    const int m = dim_;
    for (int k = 0; k < m; ++k) out[k] = 0.0;
    if (kind_ == Kind::flat_torus) return;
    if (kind_ == Kind::sphere) {
        Complex yz = 0.0, xz = 0.0;
        for (int k = 0; k < 3; ++k) {
            yz += y[k] * z[k];
            xz += x[k] * z[k];
        }
        for (int k = 0; k < 3; ++k) out[k] = yz * x[k] - xz * y[k];
        return;
    }
    const auto g = christoffel(p);
    auto G = [&](const std::vector<double>& t, int k, int i, int j) {
        return t[static_cast<std::size_t>(k * m * m + i * m + j)];
    };
    // e_i(Gamma) for chart coordinates; the Webster table is constant.
    std::vector<std::vector<double>> dg;
    if (kind_ == Kind::chart) {
        std::vector<double> q(p.begin(), p.end());
        for (int i = 0; i < m; ++i) {
            q[i] = p[i] + kFdStep;
            const auto plus = christoffel(q);
            q[i] = p[i] - kFdStep;
            const auto minus = christoffel(q);
            q[i] = p[i];
            std::vector<double> d(plus.size());
            for (std::size_t a = 0; a < d.size(); ++a) d[a] = (plus[a] - minus[a]) / (2.0 * kFdStep);
            dg.push_back(std::move(d));
        }
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const Complex xy = x[i] * y[j];
            if (xy == 0.0) continue;
            for (int k = 0; k < m; ++k) {
                const Complex w = xy * z[k];
                if (w == 0.0) continue;
                for (int q = 0; q < m; ++q) {
                    double r = 0.0;
                    if (!dg.empty()) r += G(dg[i], q, j, k) - G(dg[j], q, i, k);
                    for (int l = 0; l < m; ++l) {
                        r += G(g, l, j, k) * G(g, q, i, l) - G(g, l, i, k) * G(g, q, j, l);
                        const double c = G(g, l, i, j) - G(g, l, j, i);
                        r -= c * G(g, q, l, k);
                    }
                    out[q] += w * r;
                }
            }
        }
}

TangentVectorAt TargetMetric::curvature(const TangentVectorAt& x, const TangentVectorAt& y,
                                        const TangentVectorAt& z) const {
    if (x.base != y.base || x.base != z.base) throw DimensionMismatch("curvature arguments at different points");
    TangentVectorAt out{x.base, std::vector<Complex>(static_cast<std::size_t>(dim_))};
    curvature(x.base, x.vector, y.vector, z.vector, out.vector);
    return out;
}

std::vector<double> TargetMetric::exp_map(std::span<const double> p, std::span<const double> v) const {
    if (static_cast<int>(p.size()) != dim_ || static_cast<int>(v.size()) != dim_)
        throw DimensionMismatch("exp_map point/vector dimension mismatch");
    switch (kind_) {
    case Kind::flat_torus: {
        std::vector<double> out(p.begin(), p.end());
        for (int k = 0; k < dim_; ++k) out[k] += v[k];
        return out;
    }
    case Kind::sphere: {
        const double nv = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        if (nv >= std::numbers::pi) throw StepTooLarge("sphere step reaches the injectivity radius");
        if (nv == 0.0) return {p.begin(), p.end()};
        const double c = std::cos(nv), s = std::sin(nv) / nv;
        std::vector<double> out(3);
        for (int k = 0; k < 3; ++k) out[k] = c * p[k] + s * v[k];
        const double norm = std::sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2]);
        for (double& o : out) o /= norm;
        return out;
    }
    default: {
        bool zero = true;
        for (double x : v) zero = zero && x == 0.0;
        if (zero) return {p.begin(), p.end()};
        return rk4_geodesic(*this, p, v, kGeodesicSteps);
    }
    }
}

std::vector<double> fd_christoffel(const MetricFn& metric, std::span<const double> p, double step) {
    const auto m = static_cast<int>(p.size());
    std::vector<Eigen::MatrixXd> dg;
    std::vector<double> q(p.begin(), p.end());
    for (int l = 0; l < m; ++l) {
        q[l] = p[l] + step;
        const Eigen::MatrixXd plus = metric(q);
        q[l] = p[l] - step;
        const Eigen::MatrixXd minus = metric(q);
        q[l] = p[l];
        dg.push_back((plus - minus) / (2.0 * step));
    }
    const Eigen::MatrixXd ginv = metric(p).inverse();
    std::vector<double> out(static_cast<std::size_t>(m * m * m), 0.0);
    for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int l = 0; l < m; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                out[static_cast<std::size_t>(k * m * m + i * m + j)] = 0.5 * s;
            }
    return out;
}

// ---------------------------------------------------------------------------
// PullbackSection

PullbackSection PullbackSection::zero(const GridSpec& spec, int m) {
    return PullbackSection{std::vector<GridScalar>(static_cast<std::size_t>(m), GridScalar(spec))};
}

PullbackSection PullbackSection::conj() const {
    PullbackSection out = *this;
    for (auto& g : out.c) g = g.conj();
    return out;
}

PullbackSection PullbackSection::real() const {
    PullbackSection out = *this;
    for (auto& g : out.c) g = g.real();
    return out;
}

PullbackSection PullbackSection::im() const {
    PullbackSection out = *this;
    for (auto& g : out.c) g = g.imag();
    return out;
}

double PullbackSection::max_abs() const {
    double m = 0.0;
    for (const auto& g : c) m = std::max(m, g.max_abs());
    return m;
}

double PullbackSection::l2_norm() const {
    double s = 0.0;
    for (const auto& g : c) s += g.l2_norm() * g.l2_norm();
    return std::sqrt(s);
}

PullbackSection& PullbackSection::operator+=(const PullbackSection& o) {
    if (o.dim() != dim()) throw DimensionMismatch("section dimension mismatch");
    for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c[k];
    return *this;
}

PullbackSection& PullbackSection::operator-=(const PullbackSection& o) {
    if (o.dim() != dim()) throw DimensionMismatch("section dimension mismatch");
    for (std::size_t k = 0; k < c.size(); ++k) c[k] -= o.c[k];
    return *this;
}

PullbackSection& PullbackSection::operator*=(const GridScalar& f) {
    for (auto& g : c) g *= f;
    return *this;
}

PullbackSection& PullbackSection::operator*=(Complex f) {
    for (auto& g : c) g *= f;
    return *this;
}

PullbackSection operator+(PullbackSection a, const PullbackSection& b) { return a += b; }
PullbackSection operator-(PullbackSection a, const PullbackSection& b) { return a -= b; }
PullbackSection operator*(const GridScalar& f, PullbackSection a) { return a *= f; }
PullbackSection operator*(Complex f, PullbackSection a) { return a *= f; }
PullbackSection operator-(PullbackSection a) { return a *= Complex(-1.0); }

// ---------------------------------------------------------------------------
// MapField

MapField MapField::from_components(std::shared_ptr<const TargetMetric> target, std::vector<GridScalar> comps) {
    if (!target) throw DimensionMismatch("map has no target");
    if (static_cast<int>(comps.size()) != target->dim())
        throw DimensionMismatch("map has " + std::to_string(comps.size()) + " components, target dimension is " +
                                std::to_string(target->dim()));
    MapField phi;
    const int d = comps.front().spec().rank();
    phi.target = std::move(target);
    for (auto& g : comps) g = g.real();
    phi.periodic = std::move(comps);
    phi.slope = Eigen::MatrixXd::Zero(phi.dim(), d);
    return phi;
}

MapField MapField::constant(std::shared_ptr<const TargetMetric> target, const GridSpec& spec,
                            std::vector<double> point) {
    std::vector<GridScalar> comps;
    for (double v : point) comps.emplace_back(spec, v);
    return from_components(std::move(target), std::move(comps));
}

MapField MapField::projection(std::shared_ptr<const TargetMetric> target, const GridSpec& spec) {
    const int d = spec.rank();
    if (!target || target->kind() != Kind::flat_torus || target->dim() != d - 1)
        throw DimensionMismatch("projection needs a flat torus of dimension " + std::to_string(d - 1));
    MapField phi = constant(target, spec, std::vector<double>(static_cast<std::size_t>(d - 1), 0.0));
    for (int k = 0; k < d - 1; ++k) phi.slope(k, k) = 1.0;
    return phi;
}

MapField MapField::identity(std::shared_ptr<const TargetMetric> target, const GridSpec& spec) {
    if (!target || target->kind() != Kind::webster || spec.rank() != 3)
        throw DimensionMismatch("identity map needs the Webster target on a 3-axis grid");
    MapField phi = constant(target, spec, {0.0, 0.0, 0.0});
    phi.slope = Eigen::MatrixXd::Identity(3, 3);
    return phi;
}

std::vector<GridScalar> MapField::values() const {
    std::vector<GridScalar> out = periodic;
    for (int j = 0; j < slope.cols(); ++j) {
        bool used = false;
        for (int i = 0; i < dim(); ++i) used = used || slope(i, j) != 0.0;
        if (!used) continue;
        const GridScalar x = GridScalar::coordinate(spec(), j);
        for (int i = 0; i < dim(); ++i)
            if (slope(i, j) != 0.0) out[i] += slope(i, j) * x;
    }
    return out;
}

double MapField::sphere_defect() const {
    if (target->kind() != Kind::sphere) return 0.0;
    Eigen::ArrayXd n2 = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(periodic.front().size()));
    for (const auto& g : periodic) n2 += g.values().real().square();
    return (n2.sqrt() - 1.0).abs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Grid-level operations

namespace {

// Evaluates fn(point, index) at every grid point, in parallel.
template <class Fn>
void for_points(const std::vector<GridScalar>& values, Fn fn) {
    const auto m = values.size();
    grid::parallel_for(values.front().size(), [&](std::size_t begin, std::size_t end) {
        std::vector<double> p(m);
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t k = 0; k < m; ++k) p[k] = values[k][i].real();
            fn(std::span<const double>(p), i);
        }
    });
}

PullbackSection connection_term(const MapField& phi, const PullbackSection& v_phi, const PullbackSection& s) {
    const TargetMetric& h = *phi.target;
    const int m = h.dim();
    PullbackSection out = PullbackSection::zero(phi.spec(), m);
    if (h.kind() == Kind::webster) {
        const auto& g = webster_table();
        for (int k = 0; k < m; ++k)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    const double c = g[static_cast<std::size_t>(k * 9 + i * 3 + j)];
                    if (c != 0.0) out.c[k].values() += c * v_phi.c[i].values() * s.c[j].values();
                }
        return out;
    }
    const auto vals = phi.values();
    for_points(vals, [&](std::span<const double> p, std::size_t idx) {
        const auto g = h.christoffel(p);
        for (int k = 0; k < m; ++k) {
            Complex acc = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    acc += g[static_cast<std::size_t>(k * m * m + i * m + j)] * v_phi.c[i][idx] * s.c[j][idx];
            out.c[k][idx] = acc;
        }
    });
    return out;
}

} // namespace

std::vector<PullbackSection> differential(const grid::Frame& frame, const MapField& phi) {
    const int d = frame.rank();
    const int m = phi.dim();
    if (phi.spec().dims != frame.spec().dims) throw DimensionMismatch("map and frame live on different grids");
    std::vector<PullbackSection> out(static_cast<std::size_t>(d), PullbackSection::zero(phi.spec(), m));
    for (int i = 0; i < m; ++i) {
        const auto grad = frame.gradient(phi.periodic[i]);
        for (int a = 0; a < d; ++a) {
            out[a].c[i] = grad[a];
            for (int j = 0; j < phi.slope.cols(); ++j)
                if (phi.slope(i, j) != 0.0) out[a].c[i] += phi.slope(i, j) * frame.coordinate_component(a, j);
        }
    }
    const TargetMetric& h = *phi.target;
    if (h.kind() == Kind::webster) {
        // e^t = dt - y dx at the image point.
        const GridScalar y = phi.values()[1];
        for (auto& s : out) s.c[2] -= y * s.c[0];
    }
    if (h.kind() == Kind::sphere)
        for (auto& s : out) s = project(phi, s);
    return out;
}

PullbackSection frame_apply(const std::vector<PullbackSection>& dphi, const grid::VectorField& v) {
    if (static_cast<int>(dphi.size()) != v.rank()) throw DimensionMismatch("vector field rank mismatch");
    PullbackSection out = PullbackSection::zero(dphi.front().spec(), dphi.front().dim());
    for (int a = 0; a < v.rank(); ++a)
        for (int k = 0; k < out.dim(); ++k) out.c[k].values() += v.c[a].values() * dphi[a].c[k].values();
    return out;
}

PullbackSection pullback_derivative(const MapField& phi, const grid::Frame& frame, const grid::VectorField& v,
                                    const PullbackSection& v_phi, const PullbackSection& s) {
    const TargetMetric& h = *phi.target;
    PullbackSection out = s;
    for (auto& g : out.c) g = frame.apply(v, g);
    if (h.kind() == Kind::flat_torus) return out;
    if (h.kind() == Kind::sphere) return project(phi, out);
    return out + connection_term(phi, v_phi, s);
}

PullbackSection pullback_derivative(const MapField& phi, const grid::Frame& frame, const grid::VectorField& v,
                                    const PullbackSection& s) {
    if (phi.target->kind() == Kind::flat_torus || phi.target->kind() == Kind::sphere)
        return pullback_derivative(phi, frame, v, s, s);
    return pullback_derivative(phi, frame, v, frame_apply(differential(frame, phi), v), s);
}

GridScalar pair(const MapField& phi, const PullbackSection& a, const PullbackSection& b) {
    const TargetMetric& h = *phi.target;
    if (a.dim() != h.dim() || b.dim() != h.dim()) throw DimensionMismatch("section dimension mismatch");
    GridScalar out(phi.spec());
    if (h.kind() != Kind::chart) {
        for (int k = 0; k < h.dim(); ++k) out.values() += a.c[k].values() * b.c[k].values();
        return out;
    }
    const int m = h.dim();
    for_points(phi.values(), [&](std::span<const double> p, std::size_t idx) {
        const Eigen::MatrixXd g = h.metric(p);
        Complex s = 0.0;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) s += g(i, j) * a.c[i][idx] * b.c[j][idx];
        out[idx] = s;
    });
    return out;
}

PullbackSection curvature(const MapField& phi, const PullbackSection& x, const PullbackSection& y,
                          const PullbackSection& z) {
    const TargetMetric& h = *phi.target;
    const int m = h.dim();
    PullbackSection out = PullbackSection::zero(phi.spec(), m);
    if (h.kind() == Kind::flat_torus) return out;
    if (h.kind() == Kind::sphere) {
        GridScalar yz = pair(phi, y, z);
        GridScalar xz = pair(phi, x, z);
        for (int k = 0; k < 3; ++k) out.c[k] = yz * x.c[k] - xz * y.c[k];
        return out;
    }
    for_points(phi.values(), [&](std::span<const double> p, std::size_t idx) {
        std::vector<Complex> xv(m), yv(m), zv(m), r(m);
        for (int k = 0; k < m; ++k) {
            xv[k] = x.c[k][idx];
            yv[k] = y.c[k][idx];
            zv[k] = z.c[k][idx];
        }
        h.curvature(p, xv, yv, zv, r);
        for (int k = 0; k < m; ++k) out.c[k][idx] = r[k];
    });
    return out;
}

PullbackSection project(const MapField& phi, const PullbackSection& s) {
    if (phi.target->kind() != Kind::sphere) return s;
    GridScalar dot(phi.spec());
    for (int k = 0; k < 3; ++k) dot.values() += s.c[k].values() * phi.periodic[k].values();
    PullbackSection out = s;
    for (int k = 0; k < 3; ++k) out.c[k] -= dot * phi.periodic[k];
    return out;
}

double normal_defect(const MapField& phi, const PullbackSection& s) {
    if (phi.target->kind() != Kind::sphere) return 0.0;
    GridScalar dot(phi.spec());
    for (int k = 0; k < 3; ++k) dot.values() += s.c[k].values() * phi.periodic[k].values();
    return std::max(dot.real().max_abs(), dot.imag().max_abs());
}

MapField exp_map(const MapField& phi, const PullbackSection& v) {
    const TargetMetric& h = *phi.target;
    const int m = h.dim();
    if (v.dim() != m) throw DimensionMismatch("step section dimension mismatch");
    MapField out = phi;
    if (h.kind() == Kind::flat_torus) {
        for (int k = 0; k < m; ++k) out.periodic[k] += v.c[k].real();
        return out;
    }
    const auto vals = phi.values();
    std::vector<GridScalar> next(static_cast<std::size_t>(m), GridScalar(phi.spec()));
    for_points(vals, [&](std::span<const double> p, std::size_t idx) {
        std::vector<double> w(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) w[k] = v.c[k][idx].real();
        const auto q = h.exp_map(p, w);
        for (int k = 0; k < m; ++k) next[k][idx] = q[k] - (vals[k][idx].real() - phi.periodic[k][idx].real());
    });
    out.periodic = std::move(next);
    return out;
}

} // namespace crlab::target
