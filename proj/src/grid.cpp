#include "crlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>
#include <tuple>

#include <Eigen/Dense>
#include <fftw3.h>

namespace crlab::grid {

std::string to_string(Scheme scheme) {
    return scheme == Scheme::spectral ? "spectral" : "fd4";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "spectral") return Scheme::spectral;
    if (name == "fd4") return Scheme::fd4;
    throw InvalidGrid("unknown derivative scheme '" + name + "'");
}

// ---------------------------------------------------------------------------
// GridSpec

GridSpec GridSpec::uniform(int rank, int points, Scheme scheme) {
    GridSpec s;
    s.dims.assign(static_cast<std::size_t>(rank), points);
    s.periods.assign(static_cast<std::size_t>(rank), 1.0);
    s.scheme = scheme;
    return s;
}

std::size_t GridSpec::size() const {
    std::size_t n = 1;
    for (int d : dims) n *= static_cast<std::size_t>(d);
    return n;
}

std::size_t GridSpec::stride(int axis) const {
    std::size_t s = 1;
    for (int a = rank() - 1; a > axis; --a) s *= static_cast<std::size_t>(dims[a]);
    return s;
}

double GridSpec::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < rank(); ++a) v *= spacing(a);
    return v;
}

double GridSpec::volume() const {
    double v = 1.0;
    for (double p : periods) v *= p;
    return v;
}

void GridSpec::validate() const {
    if (dims.empty()) throw InvalidGrid("grid has no axes");
    if (periods.size() != dims.size()) throw InvalidGrid("periods and dims differ in length");
    for (std::size_t a = 0; a < dims.size(); ++a) {
        if (dims[a] < 8)
            throw InvalidGrid("axis " + std::to_string(a) + " has " + std::to_string(dims[a]) +
                              " points; at least 8 required");
        if (!(periods[a] > 0.0)) throw InvalidGrid("non-positive period on axis " + std::to_string(a));
    }
}

GridSpec GridSpec::with_scheme(Scheme s) const {
    GridSpec out = *this;
    out.scheme = s;
    return out;
}

GridSpec GridSpec::refined(int factor) const {
    GridSpec out = *this;
    for (int& d : out.dims) d *= factor;
    return out;
}

// ---------------------------------------------------------------------------
// GridScalar

GridScalar::GridScalar(GridSpec spec, Complex fill)
    : spec_(std::move(spec)), values_(Eigen::ArrayXcd::Constant(static_cast<Eigen::Index>(spec_.size()), fill)) {}

GridScalar::GridScalar(GridSpec spec, Eigen::ArrayXcd values) : spec_(std::move(spec)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != spec_.size())
        throw DimensionMismatch("value count does not match grid size");
}

GridScalar GridScalar::coordinate(const GridSpec& spec, int axis) {
    GridScalar out(spec);
    const std::size_t stride = spec.stride(axis);
    const int n = spec.dims[axis];
    const double h = spec.spacing(axis);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto k = static_cast<int>((i / stride) % static_cast<std::size_t>(n));
        out[i] = h * k;
    }
    return out;
}

GridScalar GridScalar::sample(const GridSpec& spec, const std::function<Complex(std::span<const double>)>& f) {
    GridScalar out(spec);
    std::vector<double> x(static_cast<std::size_t>(spec.rank()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t rem = i;
        for (int a = spec.rank() - 1; a >= 0; --a) {
            const auto n = static_cast<std::size_t>(spec.dims[a]);
            x[static_cast<std::size_t>(a)] = spec.spacing(a) * static_cast<double>(rem % n);
            rem /= n;
        }
        out[i] = f(x);
    }
    return out;
}

void GridScalar::check_compatible(const GridScalar& o) const {
    if (spec_.dims != o.spec_.dims) throw DimensionMismatch("grid scalars live on different grids");
}

GridScalar& GridScalar::operator+=(const GridScalar& o) {
    check_compatible(o);
    values_ += o.values_;
    return *this;
}
GridScalar& GridScalar::operator-=(const GridScalar& o) {
    check_compatible(o);
    values_ -= o.values_;
    return *this;
}
GridScalar& GridScalar::operator*=(const GridScalar& o) {
    check_compatible(o);
    values_ *= o.values_;
    return *this;
}
GridScalar& GridScalar::operator/=(const GridScalar& o) {
    check_compatible(o);
    values_ /= o.values_;
    return *this;
}
GridScalar& GridScalar::operator+=(Complex c) {
    values_ += c;
    return *this;
}
GridScalar& GridScalar::operator*=(Complex c) {
    values_ *= c;
    return *this;
}

GridScalar GridScalar::operator-() const { return GridScalar(spec_, -values_); }
GridScalar GridScalar::conj() const { return GridScalar(spec_, values_.conjugate()); }
GridScalar GridScalar::real() const { return GridScalar(spec_, values_.real().cast<Complex>()); }
GridScalar GridScalar::imag() const { return GridScalar(spec_, values_.imag().cast<Complex>()); }

double GridScalar::max_abs() const { return values_.size() == 0 ? 0.0 : values_.abs().maxCoeff(); }

double GridScalar::l2_norm() const { return std::sqrt(values_.abs2().sum() * spec_.cell_volume()); }

bool GridScalar::all_finite() const { return values_.isFinite().all(); }

GridScalar operator+(GridScalar a, const GridScalar& b) { return a += b; }
GridScalar operator-(GridScalar a, const GridScalar& b) { return a -= b; }
GridScalar operator*(GridScalar a, const GridScalar& b) { return a *= b; }
GridScalar operator/(GridScalar a, const GridScalar& b) { return a /= b; }
GridScalar operator*(Complex c, GridScalar a) { return a *= c; }
GridScalar operator*(GridScalar a, Complex c) { return a *= c; }
GridScalar operator+(GridScalar a, Complex c) { return a += c; }

GridScalar exp(const GridScalar& f) { return GridScalar(f.spec(), f.values().exp()); }

// ---------------------------------------------------------------------------
// Derivatives

namespace {

struct FftPlans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
    static std::mutex mutex;
    return mutex;
}

const FftPlans& plans_for(const std::vector<int>& dims, int axis) {
    static std::map<std::pair<std::vector<int>, int>, FftPlans> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto key = std::make_pair(dims, axis);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const int rank = static_cast<int>(dims.size());
    std::vector<int> strides(static_cast<std::size_t>(rank), 1);
    for (int a = rank - 2; a >= 0; --a) strides[a] = strides[a + 1] * dims[a + 1];

    fftw_iodim line{dims[axis], strides[axis], strides[axis]};
    std::vector<fftw_iodim> many;
    for (int a = 0; a < rank; ++a)
        if (a != axis) many.push_back({dims[a], strides[a], strides[a]});

    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    auto* scratch = fftw_alloc_complex(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    FftPlans p;
    p.forward = fftw_plan_guru_dft(1, &line, static_cast<int>(many.size()), many.data(), scratch, scratch,
                                   FFTW_FORWARD, flags);
    p.backward = fftw_plan_guru_dft(1, &line, static_cast<int>(many.size()), many.data(), scratch, scratch,
                                    FFTW_BACKWARD, flags);
    fftw_free(scratch);
    return cache.emplace(key, p).first->second;
}

GridScalar spectral_derivative(const GridScalar& f, int axis) {
    const GridSpec& spec = f.spec();
    const int n = spec.dims[axis];
    const std::size_t stride = spec.stride(axis);
    const FftPlans& p = plans_for(spec.dims, axis);

    Eigen::ArrayXcd work = f.values();
    auto* data = reinterpret_cast<fftw_complex*>(work.data());
    fftw_execute_dft(p.forward, data, data);

    // i k (2 pi / L) / n, Nyquist dropped.
    std::vector<Complex> mult(static_cast<std::size_t>(n));
    const double base = 2.0 * std::numbers::pi / spec.periods[axis];
    for (int k = 0; k < n; ++k) {
        int wave = k <= n / 2 ? k : k - n;
        if (n % 2 == 0 && k == n / 2) wave = 0;
        mult[static_cast<std::size_t>(k)] = Complex(0.0, base * wave / n);
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(work.size()); ++i) {
        const auto k = (i / stride) % static_cast<std::size_t>(n);
        work[static_cast<Eigen::Index>(i)] *= mult[k];
    }
    fftw_execute_dft(p.backward, data, data);
    return GridScalar(spec, std::move(work));
}

GridScalar fd4_derivative(const GridScalar& f, int axis) {
    const GridSpec& spec = f.spec();
    const auto n = static_cast<std::size_t>(spec.dims[axis]);
    const std::size_t stride = spec.stride(axis);
    const double inv = 1.0 / (12.0 * spec.spacing(axis));
    GridScalar out(spec);
    const auto& v = f.values();
    auto& o = out.values();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const std::size_t k = (i / stride) % n;
        const std::size_t base = i - k * stride;
        auto at = [&](std::size_t kk) { return v[static_cast<Eigen::Index>(base + (kk % n) * stride)]; };
        o[static_cast<Eigen::Index>(i)] =
            (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k + n - 1) + at(k + n - 2)) * inv;
    }
    return out;
}

} // namespace

GridScalar derivative(const GridScalar& f, int axis) {
    if (axis < 0 || axis >= f.spec().rank()) throw DimensionMismatch("derivative axis out of range");
    return f.spec().scheme == Scheme::spectral ? spectral_derivative(f, axis) : fd4_derivative(f, axis);
}

GridScalar fourier_multiplier(const GridScalar& f, const std::function<double(std::span<const int>)>& symbol) {
    const GridSpec& spec = f.spec();
    const int rank = spec.rank();
    Eigen::ArrayXcd work = f.values();
    auto* data = reinterpret_cast<fftw_complex*>(work.data());
    fftw_plan forward, backward;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward = fftw_plan_dft(rank, spec.dims.data(), data, data, FFTW_FORWARD, flags);
        backward = fftw_plan_dft(rank, spec.dims.data(), data, data, FFTW_BACKWARD, flags);
    }
    fftw_execute(forward);
    std::vector<int> k(static_cast<std::size_t>(rank));
    const double scale = 1.0 / static_cast<double>(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
        std::size_t rem = i;
        for (int a = rank - 1; a >= 0; --a) {
            const int n = spec.dims[a];
            const int idx = static_cast<int>(rem % static_cast<std::size_t>(n));
            rem /= static_cast<std::size_t>(n);
            int wave = idx <= n / 2 ? idx : idx - n;
            if (n % 2 == 0 && idx == n / 2) wave = 0;
            k[a] = wave;
        }
        work[static_cast<Eigen::Index>(i)] *= symbol(k) * scale;
    }
    fftw_execute(backward);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
    }
    return GridScalar(spec, std::move(work));
}

Complex integrate(const GridScalar& f, const GridScalar& density) {
    if (f.spec().dims != density.spec().dims) throw DimensionMismatch("integrand and density grids differ");
    return (f.values() * density.values()).sum() * f.spec().cell_volume();
}

Complex integrate(const GridScalar& f) { return f.values().sum() * f.spec().cell_volume(); }

// ---------------------------------------------------------------------------
// Forms

TwoForm::TwoForm(const GridSpec& spec, int rank)
    : rank_(rank), c_(static_cast<std::size_t>(rank * (rank - 1) / 2), GridScalar(spec)) {}

std::size_t TwoForm::pair_index(int rank, int i, int j) {
    // Pairs (0,1), (0,2), ..., (0,d-1), (1,2), ...
    return static_cast<std::size_t>(i * rank - i * (i + 1) / 2 + (j - i - 1));
}

GridScalar TwoForm::component(int i, int j) const {
    if (i == j) return GridScalar(c_.front().spec());
    if (i < j) return c_[pair_index(rank_, i, j)];
    return -c_[pair_index(rank_, j, i)];
}

GridScalar& TwoForm::at(int i, int j) {
    if (i >= j) throw DimensionMismatch("TwoForm::at requires i < j");
    return c_[pair_index(rank_, i, j)];
}

double TwoForm::max_abs() const {
    double m = 0.0;
    for (const auto& g : c_) m = std::max(m, g.max_abs());
    return m;
}

GridScalar contract(const OneForm& alpha, const VectorField& x) {
    if (alpha.rank() != x.rank()) throw DimensionMismatch("form/vector rank mismatch");
    GridScalar out(alpha.c.front().spec());
    for (int a = 0; a < alpha.rank(); ++a) out.values() += alpha.c[a].values() * x.c[a].values();
    return out;
}

GridScalar contract(const TwoForm& omega, const VectorField& x, const VectorField& y) {
    const int d = omega.rank();
    if (x.rank() != d || y.rank() != d) throw DimensionMismatch("form/vector rank mismatch");
    GridScalar out(x.c.front().spec());
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const auto& w = omega.components()[TwoForm::pair_index(d, i, j)].values();
            out.values() += w * (x.c[i].values() * y.c[j].values() - x.c[j].values() * y.c[i].values());
        }
    return out;
}

TwoForm wedge(const OneForm& a, const OneForm& b) {
    const int d = a.rank();
    if (b.rank() != d) throw DimensionMismatch("wedge of forms of different rank");
    TwoForm out(a.c.front().spec(), d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) out.at(i, j) = a.c[i] * b.c[j] - a.c[j] * b.c[i];
    return out;
}

TwoForm operator-(const TwoForm& a, const TwoForm& b) {
    TwoForm out = a;
    for (std::size_t i = 0; i < out.components().size(); ++i) out.components()[i] -= b.components()[i];
    return out;
}

TwoForm exterior_derivative(const OneForm& omega) {
    const int d = omega.rank();
    TwoForm out(omega.c.front().spec(), d);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) out.at(i, j) = derivative(omega.c[j], i) - derivative(omega.c[i], j);
    return out;
}

// ---------------------------------------------------------------------------
// Frame

Frame Frame::coordinate(const GridSpec& spec) {
    spec.validate();
    Frame f;
    f.spec_ = spec;
    const int d = spec.rank();
    f.vectors_.resize(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) f.vectors_[a].push_back(FrameTerm{a, 1.0, std::nullopt});
    f.structure_.assign(static_cast<std::size_t>(d * d * d), 0.0);
    return f;
}

Frame Frame::heisenberg(const GridSpec& spec, int n) {
    spec.validate();
    if (n < 1 || spec.rank() != 2 * n + 1)
        throw DimensionMismatch("Heisenberg frame of order " + std::to_string(n) + " needs " +
                                std::to_string(2 * n + 1) + " axes");
    Frame f;
    f.spec_ = spec;
    const int d = spec.rank();
    const int t = 2 * n;
    f.vectors_.resize(static_cast<std::size_t>(d));
    for (int a = 0; a < n; ++a) {
        f.vectors_[a].push_back(FrameTerm{a, 1.0, std::nullopt});
        f.vectors_[a].push_back(FrameTerm{t, 1.0, GridScalar::coordinate(spec, n + a)});
        f.vectors_[n + a].push_back(FrameTerm{n + a, 1.0, std::nullopt});
    }
    f.vectors_[t].push_back(FrameTerm{t, 1.0, std::nullopt});
    f.structure_.assign(static_cast<std::size_t>(d * d * d), 0.0);
    for (int a = 0; a < n; ++a) {
        // [E_x, E_y] = -E_t
        f.structure_[static_cast<std::size_t>(t * d * d + a * d + (n + a))] = -1.0;
        f.structure_[static_cast<std::size_t>(t * d * d + (n + a) * d + a)] = 1.0;
    }
    return f;
}

double Frame::structure_constant(int a, int b, int c) const {
    const int d = rank();
    return structure_[static_cast<std::size_t>(a * d * d + b * d + c)];
}

namespace {

GridScalar combine_terms(const std::vector<FrameTerm>& terms, const std::vector<std::optional<GridScalar>>& dcoord,
                         const GridSpec& spec) {
    GridScalar out(spec);
    for (const auto& term : terms) {
        const GridScalar& d = *dcoord[static_cast<std::size_t>(term.axis)];
        if (term.multiplier)
            out.values() += term.scale * term.multiplier->values() * d.values();
        else
            out.values() += term.scale * d.values();
    }
    return out;
}

} // namespace

GridScalar Frame::apply(int a, const GridScalar& f) const {
    std::vector<std::optional<GridScalar>> dcoord(static_cast<std::size_t>(spec_.rank()));
    for (const auto& term : vectors_[a])
        if (!dcoord[term.axis]) dcoord[term.axis] = derivative(f, term.axis);
    return combine_terms(vectors_[a], dcoord, f.spec());
}

std::vector<GridScalar> Frame::gradient(const GridScalar& f) const {
    std::vector<std::optional<GridScalar>> dcoord(static_cast<std::size_t>(spec_.rank()));
    for (int j = 0; j < spec_.rank(); ++j) dcoord[j] = derivative(f, j);
    std::vector<GridScalar> out;
    out.reserve(static_cast<std::size_t>(rank()));
    for (int a = 0; a < rank(); ++a) out.push_back(combine_terms(vectors_[a], dcoord, f.spec()));
    return out;
}

GridScalar Frame::apply(const VectorField& v, const GridScalar& f) const { return apply(v, gradient(f)); }

GridScalar Frame::apply(const VectorField& v, const std::vector<GridScalar>& grad) {
    if (v.rank() != static_cast<int>(grad.size())) throw DimensionMismatch("vector/gradient rank mismatch");
    GridScalar out(grad.front().spec());
    for (int a = 0; a < v.rank(); ++a) out.values() += v.c[a].values() * grad[a].values();
    return out;
}

GridScalar Frame::coordinate_component(int a, int axis) const {
    GridScalar out(spec_);
    for (const auto& term : vectors_[a]) {
        if (term.axis != axis) continue;
        if (term.multiplier)
            out.values() += term.scale * term.multiplier->values();
        else
            out.values() += term.scale;
    }
    return out;
}

TwoForm Frame::exterior_derivative(const OneForm& alpha) const {
    const int d = rank();
    if (alpha.rank() != d) throw DimensionMismatch("form rank does not match frame");
    std::vector<std::vector<GridScalar>> grads;
    grads.reserve(static_cast<std::size_t>(d));
    for (int c = 0; c < d; ++c) grads.push_back(gradient(alpha.c[c]));
    TwoForm out(spec_, d);
    for (int b = 0; b < d; ++b)
        for (int c = b + 1; c < d; ++c) {
            GridScalar w = grads[c][b] - grads[b][c];
            for (int a = 0; a < d; ++a) {
                const double k = structure_constant(a, b, c);
                if (k != 0.0) w -= k * alpha.c[a];
            }
            out.at(b, c) = std::move(w);
        }
    return out;
}

OneForm Frame::differential(const GridScalar& f) const { return OneForm{gradient(f)}; }

GridScalar Frame::volume_density() const {
    const int d = rank();
    MatrixField m{d, {}};
    for (int a = 0; a < d; ++a)
        for (int j = 0; j < d; ++j) m.entries.push_back(coordinate_component(a, j));
    GridScalar out(spec_);
    Eigen::MatrixXcd local(d, d);
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (int a = 0; a < d; ++a)
            for (int j = 0; j < d; ++j) local(a, j) = m(a, j)[i];
        out[i] = local.determinant();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pointwise linear algebra

namespace {

constexpr double kMaxCondition = 1e12;

template <class Body>
void solve_points(const MatrixField& a, Body body) {
    const int k = a.k;
    const std::size_t n = a.entries.front().size();
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        Eigen::MatrixXcd local(k, k);
        for (std::size_t i = begin; i < end; ++i) {
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c) local(r, c) = a(r, c)[i];
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(local);
            const auto& s = svd.singularValues();
            const double smax = s(0);
            const double smin = s(k - 1);
            if (!(smin > 0.0) || smax / smin > kMaxCondition)
                throw SingularFrame("pointwise system is singular at grid index " + std::to_string(i));
            body(i, local);
        }
    });
}

} // namespace

std::vector<GridScalar> pointwise_solve(const MatrixField& a, const std::vector<GridScalar>& b) {
    if (static_cast<int>(b.size()) != a.k) throw DimensionMismatch("right-hand side size mismatch");
    const GridSpec& spec = a.entries.front().spec();
    std::vector<GridScalar> x(static_cast<std::size_t>(a.k), GridScalar(spec));
    solve_points(a, [&](std::size_t i, const Eigen::MatrixXcd& local) {
        Eigen::VectorXcd rhs(a.k);
        for (int r = 0; r < a.k; ++r) rhs(r) = b[r][i];
        Eigen::VectorXcd sol = local.partialPivLu().solve(rhs);
        for (int r = 0; r < a.k; ++r) x[r][i] = sol(r);
    });
    return x;
}

MatrixField pointwise_inverse(const MatrixField& a) {
    const GridSpec& spec = a.entries.front().spec();
    MatrixField inv{a.k, std::vector<GridScalar>(static_cast<std::size_t>(a.k * a.k), GridScalar(spec))};
    solve_points(a, [&](std::size_t i, const Eigen::MatrixXcd& local) {
        Eigen::MatrixXcd li = local.inverse();
        for (int r = 0; r < a.k; ++r)
            for (int c = 0; c < a.k; ++c) inv(r, c)[i] = li(r, c);
    });
    return inv;
}

// ---------------------------------------------------------------------------
// Threads

int thread_limit() {
    static const int limit = [] {
        int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        if (const char* env = std::getenv("CRLAB_THREADS")) {
            const int requested = std::atoi(env);
            if (requested > 0) return std::min(requested, hw);
        }
        return hw;
    }();
    return limit;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
    const int threads = thread_limit();
    if (threads <= 1 || count < 4096) {
        body(0, count);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    const std::size_t chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, t, begin, end] {
            try {
                body(begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace crlab::grid
