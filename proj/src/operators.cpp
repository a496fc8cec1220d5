#include "sparse_harmonics/operators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "sparse_harmonics/orlicz.hpp"
#include "sparse_harmonics/weights.hpp"

namespace sh {

std::string KernelOperator::name() const {
    switch (kind) {
        case OperatorKind::Hilbert: return "hilbert";
        case OperatorKind::Calderon: return "calderon" + std::to_string(m);
        case OperatorKind::Stein: return "stein";
    }
    return "unknown";
}

double hilbert_cell_kernel(long long d) {
    if (d == 0) return 0.0;
    const double ad = static_cast<double>(d < 0 ? -d : d);
    const double v = std::log1p(1.0 / (ad - 0.5)) / std::numbers::pi;
    return d > 0 ? v : -v;
}

namespace {

void require_same_domain(const std::vector<GridFunction>& f) {
    for (const auto& g : f)
        if (!(g.domain() == f.front().domain())) throw InputError("operator inputs live on different domains");
}

std::vector<double> hilbert_kernel_table(std::size_t N, int pv_cutoff) {
    std::vector<double> K(2 * N - 1);
    for (std::size_t k = 0; k < K.size(); ++k) {
        const long long d = static_cast<long long>(k) - static_cast<long long>(N - 1);
        K[k] = (d < pv_cutoff && d > -pv_cutoff) ? 0.0 : hilbert_cell_kernel(d);
    }
    return K;
}

double binom(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// -sum_{c != i} int_cell prod_j (G_j(y) - G_j(x)) f_last(c) / (y - x)^{m+1} dy with x the centre of cell i.
// edges[j] holds the antiderivative of slot j at the N+1 cell edges, cells[j] its cell values.
double calderon_at(std::size_t i, const std::vector<std::vector<double>>& edges, const std::vector<std::vector<double>>& cells,
                   const std::vector<double>& last, double h) {
    const std::size_t m = edges.size();
    const std::size_t N = last.size();
    std::vector<double> Gx(m);
    for (std::size_t j = 0; j < m; ++j) Gx[j] = edges[j][i] + 0.5 * h * cells[j][i];
    std::vector<double> poly(m + 1);
    long double acc = 0;
    for (std::size_t c = 0; c < N; ++c) {
        if (c == i || last[c] == 0) continue;
        const double u0 = (static_cast<double>(c) - static_cast<double>(i) - 0.5) * h;
        const double u1 = u0 + h;
        std::fill(poly.begin(), poly.end(), 0.0);
        poly[0] = 1.0;
        bool zero = false;
        for (std::size_t j = 0; j < m; ++j) {
            const double slope = cells[j][c];
            const double off = edges[j][c] - Gx[j] - slope * u0;
            if (slope == 0 && off == 0) {
                zero = true;
                break;
            }
            for (std::size_t k = j + 1; k-- > 0;) {
                poly[k + 1] += slope * poly[k];
                poly[k] *= off;
            }
        }
        if (zero) continue;
        double integral = 0;
        for (std::size_t k = 0; k <= m; ++k) {
            const int e = static_cast<int>(k) - static_cast<int>(m) - 1;
            double term;
            if (e == -1) {
                term = std::log1p(h / u0);
            } else {
                const int q = e + 1;  // negative
                term = (std::pow(u1, q) - std::pow(u0, q)) / q;
            }
            integral += poly[k] * term;
        }
        acc += last[c] * integral;
    }
    return -static_cast<double>(acc);
}

void edge_antiderivative(const std::vector<double>& v, double h, std::vector<double>& out) {
    out.assign(v.size() + 1, 0.0);
    long double run = 0;
    for (std::size_t c = 0; c < v.size(); ++c) {
        run += static_cast<long double>(v[c]) * h;
        out[c + 1] = static_cast<double>(run);
    }
}

void calderon_guard(int m, const Domain& d) {
    if (m < 1) throw ParameterError("Calderon commutator needs m >= 1");
    if (m + 1 > 3 && d.L > 10) throw ParameterError("Calderon operator with m+1 > 3 refused at L > 10 (cost guard)");
}

// per-x multiplier prod_s (b_s(x) - b_s(y))^{p_s} for symbols of one slot
double symbol_factor(const std::vector<const Symbol*>& syms, std::size_t x, std::size_t y) {
    double v = 1.0;
    for (const Symbol* s : syms) v *= std::pow(s->b[x] - s->b[y], s->power);
    return v;
}

std::mutex& fftw_mutex() {
    static std::mutex mu;
    return mu;
}

// K_t * f for every t in the grid; calls sink(k, slice) with the real-space slice
template <class Sink>
void stein_slices(const GridFunction& f, double alpha, const std::vector<double>& ts, Sink&& sink) {
    const Domain& d = f.domain();
    const std::size_t N = d.N();
    const std::size_t K = N / 2 + 1;
    double* in = fftw_alloc_real(N);
    fftw_complex* spec = fftw_alloc_complex(K);
    fftw_complex* work = fftw_alloc_complex(K);
    double* out = fftw_alloc_real(N);
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(N), in, spec, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(static_cast<int>(N), work, out, FFTW_ESTIMATE);
    }
    std::copy(f.values().begin(), f.values().end(), in);
    fftw_execute(fwd);
    std::vector<double> slice(N);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double t = ts[k];
        for (std::size_t q = 0; q < K; ++q) {
            const double xi = static_cast<double>(q) / d.length;
            const double s2 = (xi * xi) / (t * t);
            const double mult = s2 < 1.0 ? s2 * std::pow(1.0 - s2, alpha - 1.0) : 0.0;
            work[q][0] = spec[q][0] * mult / static_cast<double>(N);
            work[q][1] = spec[q][1] * mult / static_cast<double>(N);
        }
        fftw_execute(bwd);
        std::copy(out, out + N, slice.begin());
        sink(k, slice);
    }
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    fftw_free(in);
    fftw_free(spec);
    fftw_free(work);
    fftw_free(out);
}

struct TGrid {
    std::vector<double> t, weight;
};

TGrid stein_t_grid(const Domain& d, int n) {
    if (n < 2) throw ParameterError("Stein square function needs at least two t points");
    const double lo = 1.0 / d.length, hi = static_cast<double>(d.N()) / (2.0 * d.length);
    TGrid g;
    g.t = log_grid(lo, hi, static_cast<std::size_t>(n));
    const double du = std::log(hi / lo) / (n - 1);
    g.weight.assign(static_cast<std::size_t>(n), du);
    g.weight.front() *= 0.5;
    g.weight.back() *= 0.5;
    return g;
}

void stein_alpha_guard(double alpha) {
    if (!(alpha > 0.5)) throw ParameterError("Stein square function needs alpha > 1/2");
}

}  // namespace

GridFunction hilbert_transform(const GridFunction& f, int pv_cutoff) {
    if (pv_cutoff < 1) throw ParameterError("pv_cutoff must be >= 1");
    const std::size_t N = f.size();
    const auto K = hilbert_kernel_table(N, pv_cutoff);
    GridFunction out(f.domain(), 0.0);
    const double* fv = f.values().data();
    for (std::size_t i = 0; i < N; ++i) {
        const double* k = K.data() + (N - 1 + i);  // k[-j] = K(i - j)
        double acc = 0;
        for (std::size_t j = 0; j < N; ++j) acc += *(k - j) * fv[j];
        out[i] = acc;
    }
    return out;
}

double calderon_kernel(double x, const std::vector<double>& y) {
    if (y.size() < 2) throw ParameterError("Calderon kernel needs m+1 >= 2 points");
    const std::size_t m = y.size() - 1;
    const double z = y.back();
    if (x == z) throw ParameterError("Calderon kernel evaluated at its singular point x = y_{m+1}");
    const double lo = std::min(x, z), hi = std::max(x, z);
    for (std::size_t j = 0; j < m; ++j)
        if (!(y[j] > lo && y[j] < hi)) return 0.0;
    const double sign = (z - x > 0 && m % 2 == 1) ? -1.0 : 1.0;
    return sign / std::pow(x - z, static_cast<double>(m + 1));
}

GridFunction calderon_apply(const std::vector<GridFunction>& f) {
    return iterated_commutator(KernelOperator::calderon(static_cast<int>(f.size()) - 1), {}, f);
}

GridFunction stein_square_function(const GridFunction& f, double alpha, int t_points) {
    stein_alpha_guard(alpha);
    const TGrid g = stein_t_grid(f.domain(), t_points);
    std::vector<double> acc(f.size(), 0.0);
    stein_slices(f, alpha, g.t, [&](std::size_t k, const std::vector<double>& s) {
        for (std::size_t i = 0; i < s.size(); ++i) acc[i] += g.weight[k] * s[i] * s[i];
    });
    GridFunction out(f.domain(), 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) out[i] = std::sqrt(acc[i]);
    return out;
}

GridFunction apply_operator(const KernelOperator& T, const std::vector<GridFunction>& f) {
    if (static_cast<int>(f.size()) != T.arity()) throw ParameterError(T.name() + " expects " + std::to_string(T.arity()) + " functions");
    switch (T.kind) {
        case OperatorKind::Hilbert: return hilbert_transform(f[0], T.pv_cutoff);
        case OperatorKind::Calderon: return iterated_commutator(T, {}, f);
        case OperatorKind::Stein: return stein_square_function(f[0], T.alpha);
    }
    throw ParameterError("unknown operator");
}

GridFunction iterated_commutator(const KernelOperator& T, const std::vector<Symbol>& syms, const std::vector<GridFunction>& f) {
    if (static_cast<int>(f.size()) != T.arity()) throw ParameterError(T.name() + " expects " + std::to_string(T.arity()) + " functions");
    require_same_domain(f);
    for (const auto& s : syms) {
        if (s.slot < 0 || s.slot >= T.arity()) throw ParameterError("symbol slot out of range");
        if (s.power < 1) throw ParameterError("symbol power must be >= 1");
        if (!(s.b.domain() == f[0].domain())) throw InputError("symbol and functions live on different domains");
    }
    const Domain& d = f[0].domain();
    const std::size_t N = d.N();
    GridFunction out(d, 0.0);

    if (T.kind == OperatorKind::Hilbert) {
        const auto K = hilbert_kernel_table(N, T.pv_cutoff);
        std::vector<const Symbol*> ss;
        for (const auto& s : syms) ss.push_back(&s);
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0;
            for (std::size_t j = 0; j < N; ++j) {
                const double k = K[N - 1 + i - j];
                if (k == 0 || f[0][j] == 0) continue;
                acc += symbol_factor(ss, i, j) * k * f[0][j];
            }
            out[i] = acc;
        }
        return out;
    }

    if (T.kind == OperatorKind::Stein) {
        stein_alpha_guard(T.alpha);
        if (syms.empty()) return stein_square_function(f[0], T.alpha);
        if (syms.size() != 1) throw ParameterError("Stein commutators support a single symbol (any power)");
        const Symbol& s = syms[0];
        const int p = s.power;
        // (b(x) - b(y))^p = sum_r C(p,r) b(x)^{p-r} (-b(y))^r
        std::vector<GridFunction> parts;
        for (int r = 0; r <= p; ++r) parts.push_back(f[0] * s.b.map([r](double v) { return std::pow(v, r); }));
        const TGrid g = stein_t_grid(d, 128);
        std::vector<std::vector<double>> slices(static_cast<std::size_t>(p + 1), std::vector<double>(g.t.size() * N));
        for (int r = 0; r <= p; ++r)
            stein_slices(parts[static_cast<std::size_t>(r)], T.alpha, g.t, [&](std::size_t k, const std::vector<double>& sl) {
                std::copy(sl.begin(), sl.end(), slices[static_cast<std::size_t>(r)].begin() + static_cast<std::ptrdiff_t>(k * N));
            });
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0;
            for (std::size_t k = 0; k < g.t.size(); ++k) {
                double v = 0;
                for (int r = 0; r <= p; ++r)
                    v += binom(p, r) * std::pow(s.b[i], p - r) * (r % 2 ? -1.0 : 1.0) * slices[static_cast<std::size_t>(r)][k * N + i];
                acc += g.weight[k] * v * v;
            }
            out[i] = std::sqrt(acc);
        }
        return out;
    }

    // Calderon
    calderon_guard(T.m, d);
    const std::size_t m = static_cast<std::size_t>(T.m);
    const double h = d.h();
    std::vector<std::vector<const Symbol*>> by_slot(m + 1);
    for (const auto& s : syms) by_slot[static_cast<std::size_t>(s.slot)].push_back(&s);
    std::vector<std::vector<double>> cells(m), edges(m);
    std::vector<double> last(N);
    auto fill = [&](std::size_t i) {
        for (std::size_t j = 0; j <= m; ++j) {
            const bool symbolic = !by_slot[j].empty();
            std::vector<double>& dst = j < m ? cells[j] : last;
            dst.resize(N);
            for (std::size_t c = 0; c < N; ++c) dst[c] = symbolic ? f[j][c] * symbol_factor(by_slot[j], i, c) : f[j][c];
            if (j < m) edge_antiderivative(cells[j], h, edges[j]);
        }
    };
    if (syms.empty()) fill(0);
    for (std::size_t i = 0; i < N; ++i) {
        if (!syms.empty()) fill(i);
        out[i] = calderon_at(i, edges, cells, last, h);
    }
    return out;
}

GridFunction commutator_algebraic(const KernelOperator& T, const GridFunction& b, int slot, const std::vector<GridFunction>& f) {
    if (slot < 0 || slot >= T.arity()) throw ParameterError("symbol slot out of range");
    if (T.kind == OperatorKind::Stein) throw ParameterError("the Stein square function is not linear; use the kernel form");
    GridFunction out = b * apply_operator(T, f);
    std::vector<GridFunction> g = f;
    g[static_cast<std::size_t>(slot)] = b * f[static_cast<std::size_t>(slot)];
    return out - apply_operator(T, g);
}

double bmo_norm(const GridFunction& b) {
    PrefixSum pb(b.values());
    double best = 0;
    for (const CellCube& Q : weight_family(b.domain())) {
        const long double mean = pb.cells(Q.start, Q.end()) / Q.len;
        long double acc = 0;
        for (long long i = Q.start; i < Q.end(); ++i) acc += std::fabs(b[static_cast<std::size_t>(i)] - mean);
        best = std::max(best, static_cast<double>(acc / Q.len));
    }
    return best;
}

double weighted_bmo_norm(const GridFunction& b, const GridFunction& w, double p) {
    if (!(p >= 1.0)) throw ParameterError("weighted BMO needs p >= 1");
    for (double x : w.values())
        if (!(x > 0)) throw InputError("weighted BMO needs w > 0");
    PrefixSum pb(b.values()), pw(w.values());
    double best = 0;
    for (const CellCube& Q : weight_family(b.domain())) {
        const long double mean = pb.cells(Q.start, Q.end()) / Q.len;
        long double acc = 0;
        for (long long i = Q.start; i < Q.end(); ++i) {
            const auto k = static_cast<std::size_t>(i);
            acc += std::pow(std::fabs(b[k] - mean), static_cast<long double>(p)) * w[k];
        }
        best = std::max(best, static_cast<double>(std::pow(acc / pw.cells(Q.start, Q.end()), 1.0L / p)));
    }
    return best;
}

double log_dini_norm(const std::function<double(double)>& omega, double a, int m) {
    if (!(a > 0)) throw ParameterError("log-Dini needs a > 0");
    if (m < 0) throw ParameterError("log-Dini needs m >= 0");
    // t = e^{-u}: int_0^inf omega(e^{-u})^a (1+u)^m du
    auto g = [&](double u) {
        const double t = std::exp(-u);
        const double w = omega(t);
        if (w <= 0) return 0.0;
        return std::pow(w, a) * std::pow(1.0 + u, m);
    };
    // divergence: integrand not decaying on the representable range of t
    const double g1 = g(350.0), g2 = g(700.0);
    if (!std::isfinite(g2) || (g2 > 0 && (g2 >= g1 || 700.0 * g2 > 1e-2))) return std::numeric_limits<double>::infinity();
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0;
    double v;
    try {
        v = integrator.integrate(g, 1e-12, &err);
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    return v;
}

double john_nirenberg_ratio(const GridFunction& b, const GridFunction& w) {
    const double bmo = bmo_norm(b);
    if (bmo == 0) return 0.0;
    const double ainf = ainfty_constants(w).fujii_wilson;
    const YoungFunction expl = expl_young(1.0);
    const double inv1 = expl.inverse(1.0);
    PrefixSum pb(b.values());
    std::vector<double> vals, mass;
    double best = 0;
    for (const CellCube& Q : cube_family(b.domain(), CubeScope::Dyadic, true)) {
        const double mean = static_cast<double>(pb.cells(Q.start, Q.end()) / Q.len);
        vals.clear();
        mass.clear();
        for (long long i = Q.start; i < Q.end(); ++i) {
            vals.push_back(std::fabs(b[static_cast<std::size_t>(i)] - mean));
            mass.push_back(w[static_cast<std::size_t>(i)]);
        }
        best = std::max(best, luxemburg_values(vals.data(), mass.data(), vals.size(), expl, inv1));
    }
    return best / (ainf * bmo);
}

}  // namespace sh
