#include "sparse_harmonics/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sh {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t k = 0; k < n; ++k) g[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    return g;
}

double numeric_inverse(const std::function<double(double)>& phi, double y) {
    if (y <= 0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (!(phi(hi) >= y)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return std::numeric_limits<double>::infinity();
    }
    for (int it = 0; it < 2000 && hi - lo > 1e-16 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(mid) >= y)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double numeric_complementary(const std::function<double(double)>& phi, double t) {
    if (t <= 0) return 0.0;
    static const std::vector<double> grid = log_grid(1e-12, 1e12, 4096);
    auto g = [&](double s) {
        double v = s * t - phi(s);
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    };
    std::size_t best = 0;
    double bv = g(grid[0]);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        double v = g(grid[k]);
        if (v > bv) {
            bv = v;
            best = k;
        }
    }
    double a, b;
    if (best + 1 == grid.size()) {
        // sup lies beyond the grid: march outward
        double s = grid.back();
        double prev = s, cur = g(s);
        while (s < 1e300) {
            double nxt = g(2 * s);
            if (!(nxt > cur)) break;
            prev = s;
            s *= 2;
            cur = nxt;
        }
        a = prev;
        b = 2 * s;
    } else {
        a = best == 0 ? 0.0 : grid[best - 1];
        b = grid[best + 1];
    }
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = g(x1);
        }
    }
    return std::max({0.0, bv, f1, f2});
}

YoungFunction power_young(double p, double c) {
    if (!(p >= 1.0) || !(c > 0)) throw ParameterError("power Young function needs p >= 1 and c > 0");
    YoungFunction y;
    std::ostringstream nm;
    nm << (c == 1.0 ? "" : std::to_string(c) + "*") << "t^" << p;
    y.name = nm.str();
    y.phi = [p, c](double t) { return c * std::pow(t, p); };
    y.inverse = [p, c](double v) { return std::pow(v / c, 1.0 / p); };
    if (p > 1.0) {
        y.complementary = [p, c](double t) { return (p - 1.0) * c * std::pow(t / (c * p), p / (p - 1.0)); };
    } else {
        y.complementary = [c](double t) { return t <= c ? 0.0 : std::numeric_limits<double>::infinity(); };
    }
    y.complementary_closed = true;
    y.i_lower = y.I_upper = p;
    y.indices_closed = true;
    y.delta2_C1 = p;
    y.submultiplicative = c >= 1.0;
    y.n_function = p > 1.0;
    return y;
}

YoungFunction llogl_young(double alpha, double p) {
    if (!(alpha > 0) || !(p >= 1.0)) throw ParameterError("L log L Young function needs alpha > 0 and p >= 1");
    YoungFunction y;
    std::ostringstream nm;
    nm << (p == 1.0 ? std::string("t") : "t^" + std::to_string(p)) << "*log(e+t)^" << alpha;
    y.name = nm.str();
    y.phi = [alpha, p](double t) { return std::pow(t, p) * std::pow(std::log(M_E + t), alpha); };
    auto phi = y.phi;
    y.inverse = [phi](double v) { return numeric_inverse(phi, v); };
    y.complementary = [phi](double t) { return numeric_complementary(phi, t); };
    y.i_lower = y.I_upper = p;
    y.indices_closed = true;
    y.submultiplicative = true;
    y.n_function = p > 1.0;
    y.delta2_C1 = delta2_constant_numeric(y);
    return y;
}

YoungFunction expl_young(double s) {
    if (!(s > 0)) throw ParameterError("exp L^s needs s > 0");
    YoungFunction y;
    y.name = "exp(t^" + std::to_string(s) + ")-1";
    y.phi = [s](double t) { return std::expm1(std::pow(t, s)); };
    y.inverse = [s](double v) { return std::pow(std::log1p(v), 1.0 / s); };
    auto phi = y.phi;
    y.complementary = [phi](double t) { return numeric_complementary(phi, t); };
    y.i_lower = s;
    y.I_upper = std::numeric_limits<double>::infinity();
    y.indices_closed = true;
    y.delta2_C1 = std::numeric_limits<double>::infinity();
    y.submultiplicative = false;
    y.n_function = s > 1.0;
    return y;
}

YoungFunction power_of(const YoungFunction& f, int m) {
    if (m < 1) throw ParameterError("power_of needs m >= 1");
    YoungFunction y;
    y.name = "(" + f.name + ")^" + std::to_string(m);
    auto phi = f.phi;
    auto inv = f.inverse;
    y.phi = [phi, m](double t) { return std::pow(phi(t), m); };
    y.inverse = [inv, m](double v) { return inv(std::pow(v, 1.0 / m)); };
    auto self = y.phi;
    y.complementary = [self](double t) { return numeric_complementary(self, t); };
    y.i_lower = f.i_lower * m;
    y.I_upper = f.I_upper * m;
    y.indices_closed = f.indices_closed;
    y.delta2_C1 = f.delta2_C1 * m;
    y.submultiplicative = f.submultiplicative;
    y.n_function = f.n_function;
    return y;
}

YoungFunction numeric_complement_of(const YoungFunction& f) {
    YoungFunction y;
    y.name = "conj(" + f.name + ")";
    y.phi = f.complementary;
    auto c = f.complementary;
    y.inverse = [c](double v) { return numeric_inverse(c, v); };
    auto phi = f.phi;
    y.complementary = [phi](double t) { return phi(t); };
    y.complementary_closed = true;
    y.n_function = f.n_function;
    return y;
}

Measure Measure::weighted(const GridFunction& w) {
    for (double x : w.values())
        if (!(x > 0)) throw InputError("weighted measure requires w > 0");
    return Measure{&w};
}

double luxemburg_values(const double* a, const double* m, std::size_t n, const YoungFunction& f, double inv_one) {
    double A = 0, M = 0, S = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(a[i])) throw InputError("non-finite sample in Luxemburg norm");
        A = std::max(A, a[i]);
        M += m[i];
    }
    if (A == 0 || M == 0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) S += m[i] * (a[i] / A);
    const double mean = S / M;
    auto G = [&](double mu) {
        const double lam = std::exp(mu);
        long double acc = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (m[i] > 0 && a[i] > 0) acc += m[i] * f.phi((a[i] / A) / lam);
        return static_cast<double>(acc / M) - 1.0;
    };
    double lo = std::log(mean / inv_one), hi = std::log(1.0 / inv_one);
    if (hi - lo < 1e-15) return A / inv_one;
    double flo = G(lo), fhi = G(hi);
    while (flo < 0) {
        hi = lo;
        fhi = flo;
        lo -= 1.0;
        flo = G(lo);
    }
    while (fhi > 0) {
        lo = hi;
        flo = fhi;
        hi += 1.0;
        fhi = G(hi);
    }
    // Illinois false position in log(lambda)
    int side = 0;
    double c = 0.5 * (lo + hi);
    for (int it = 0; it < 300; ++it) {
        if (std::isfinite(flo) && std::isfinite(fhi) && fhi != flo)
            c = (lo * fhi - hi * flo) / (fhi - flo);
        else
            c = 0.5 * (lo + hi);
        if (!(c > lo && c < hi)) c = 0.5 * (lo + hi);
        double fc = G(c);
        if (fc == 0) break;
        if (fc > 0) {
            lo = c;
            flo = fc;
            if (side == 1) fhi *= 0.5;
            side = 1;
        } else {
            hi = c;
            fhi = fc;
            if (side == -1) flo *= 0.5;
            side = -1;
        }
        if (hi - lo < 1e-15 * std::max(1.0, std::fabs(c))) break;
    }
    return A * std::exp(c);
}

double measure_of(const Interval& Q, const Domain& d, const Measure& mu) {
    if (!mu.w) {
        if (d.boundary == Boundary::ZeroExtend) return Q.length();
        return std::max(0.0, std::min(Q.b, d.right()) - std::max(Q.a, d.left));
    }
    return mu.w->integral(Q);
}

double average(const GridFunction& f, const Interval& Q, double r) {
    const Domain& d = f.domain();
    const double inside = std::max(0.0, std::min(Q.b, d.right()) - std::max(Q.a, d.left));
    if (!(inside > 0)) throw InputError("average over a cube disjoint from the domain");
    GridFunction p = f.map([r](double x) { return std::pow(std::fabs(x), r); });
    const double denom = d.boundary == Boundary::ZeroExtend ? Q.length() : inside;
    return std::pow(p.integral(Q) / denom, 1.0 / r);
}

double luxemburg_norm(const GridFunction& f, const YoungFunction& phi, const Interval& Q, const Measure& mu) {
    const Domain& d = f.domain();
    const double h = d.h();
    const double a = std::max(Q.a, d.left), b = std::min(Q.b, d.right());
    if (!(b > a)) throw InputError("Luxemburg norm over a cube disjoint from the domain");
    std::vector<double> vals, mass;
    auto i0 = static_cast<long long>(std::floor((a - d.left) / h));
    auto i1 = static_cast<long long>(std::ceil((b - d.left) / h));
    i1 = std::min<long long>(i1, static_cast<long long>(d.N()));
    for (long long i = std::max(0LL, i0); i < i1; ++i) {
        double lo = std::max(a, d.left + static_cast<double>(i) * h), hi = std::min(b, d.left + static_cast<double>(i + 1) * h);
        if (hi <= lo) continue;
        vals.push_back(std::fabs(f[static_cast<std::size_t>(i)]));
        mass.push_back((hi - lo) * (mu.w ? (*mu.w)[static_cast<std::size_t>(i)] : 1.0));
    }
    if (!mu.w && d.boundary == Boundary::ZeroExtend && Q.length() > b - a) {
        vals.push_back(0.0);
        mass.push_back(Q.length() - (b - a));
    }
    return luxemburg_values(vals.data(), mass.data(), vals.size(), phi, phi.inverse(1.0));
}

HolderResult generalized_holder(const std::vector<GridFunction>& fs, const GridFunction& g, const Interval& Q,
                                const GridFunction& w, const std::vector<double>& s) {
    if (fs.size() != s.size() || fs.empty()) throw ParameterError("generalized Holder needs one exponent per f");
    double inv_s = 0;
    for (double si : s) {
        if (!(si >= 1.0)) throw ParameterError("generalized Holder exponents must be >= 1");
        inv_s += 1.0 / si;
    }
    HolderResult r;
    GridFunction prod = g.abs() * w;
    for (const auto& f : fs) prod = prod * f.abs();
    const Measure mu = Measure::weighted(w);
    r.lhs = prod.integral(Q) / w.integral(Q);
    r.constant = std::pow(2.0, inv_s) * std::pow(1.0 + inv_s, inv_s);
    double rhs = r.constant;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        double nf = luxemburg_norm(fs[i], expl_young(s[i]), Q, mu);
        r.f_norms.push_back(nf);
        rhs *= nf;
    }
    r.g_norm = luxemburg_norm(g, llogl_young(inv_s), Q, mu);
    r.rhs = rhs * r.g_norm;
    r.ratio = r.rhs > 0 ? r.lhs / r.rhs : 0.0;
    return r;
}

YoungPairReport young_pair_checks(const YoungFunction& phi, const std::vector<double>& t_grid, double slack) {
    YoungPairReport rep;
    auto comp_inv = [&](double t) { return numeric_inverse(phi.complementary, t); };
    for (double t : t_grid) {
        const double prod = phi.inverse(t) * comp_inv(t);
        ++rep.checks;
        if (!(t <= prod * (1 + slack))) rep.violations.push_back({"t <= phi^-1(t) phibar^-1(t)", 0, t, t, prod});
        ++rep.checks;
        if (!(prod <= 2 * t * (1 + slack))) rep.violations.push_back({"phi^-1(t) phibar^-1(t) <= 2t", 0, t, prod, 2 * t});
        const double pt = phi(t);
        const double lhs = phi.complementary(pt / t);
        ++rep.checks;
        if (!(lhs <= pt * (1 + slack))) rep.violations.push_back({"phibar(phi(t)/t) <= phi(t)", 0, t, lhs, pt});
    }
    for (double s : t_grid) {
        const double ps = phi(s);
        for (double t : t_grid) {
            const double rhs = ps + phi.complementary(t);
            ++rep.checks;
            if (!(s * t <= rhs + slack * s * t)) rep.violations.push_back({"st <= phi(s) + phibar(t)", s, t, s * t, rhs});
        }
    }
    return rep;
}

double dilation_function(const YoungFunction& phi, double t) {
    static const std::vector<double> sg = log_grid(1e-8, 1e8, 1601);
    double best = 0;
    for (double s : sg) {
        const double den = phi(s);
        if (!(den > 0) || !std::isfinite(den)) continue;
        const double num = phi(s * t);
        if (!std::isfinite(num)) return std::numeric_limits<double>::infinity();
        best = std::max(best, num / den);
    }
    return best;
}

DilationIndices dilation_indices(const YoungFunction& phi, bool force_numeric) {
    if (phi.indices_closed && !force_numeric) return {phi.i_lower, phi.I_upper};
    const double t0 = 1e-6, t1 = 1e6;
    return {std::log(dilation_function(phi, t0)) / std::log(t0), std::log(dilation_function(phi, t1)) / std::log(t1)};
}

double delta2_constant_numeric(const YoungFunction& phi) {
    double c = 0;
    for (double lam : log_grid(2.0, 1e6, 121)) {
        const double hv = dilation_function(phi, lam);
        if (!std::isfinite(hv)) return std::numeric_limits<double>::infinity();
        c = std::max(c, std::log(hv) / std::log(2 * lam));
    }
    return c;
}

double quasi_convex_exponent(const YoungFunction& phi) {
    const std::vector<double> tg = log_grid(1e-3, 1e3, 121);
    std::vector<double> pb(tg.size());
    for (std::size_t k = 0; k < tg.size(); ++k) pb[k] = phi.complementary(tg[k]);
    for (int ia = 1; ia <= 100; ++ia) {
        const double alpha = ia / 100.0;
        bool ok = true;
        for (std::size_t k = 0; k + 1 < tg.size() && ok; ++k) {
            const double a = std::pow(pb[k], alpha) / tg[k], b = std::pow(pb[k + 1], alpha) / tg[k + 1];
            if (std::isfinite(a) && b < a * (1 - 1e-9)) ok = false;
        }
        if (ok) return alpha;
    }
    return 1.0;
}

}  // namespace sh
