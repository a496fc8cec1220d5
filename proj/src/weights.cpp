#include "sparse_harmonics/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "sparse_harmonics/maximal.hpp"

namespace sh {

double safe_pow(double x, double e) {
    if (x <= 0) throw InputError("safe_pow needs a positive base");
    const double l = std::clamp(e * std::log(x), -690.7755278982137, 690.7755278982137);  // ln 1e300
    return std::exp(l);
}

std::vector<CellCube> weight_family(const Domain& d) { return cube_family(d, CubeScope::DyadicShifted, true); }

namespace {

void require_positive(const GridFunction& w) {
    for (double x : w.values())
        if (!(x > 0) || !std::isfinite(x)) throw InputError("weights must be finite and strictly positive");
}

// sparse-table range minimum
class RangeMin {
public:
    explicit RangeMin(const std::vector<double>& v) {
        const std::size_t n = v.size();
        t_.push_back(v);
        for (std::size_t k = 1; (std::size_t{1} << k) <= n; ++k) {
            const auto& prev = t_.back();
            std::vector<double> cur(n - (std::size_t{1} << k) + 1);
            for (std::size_t i = 0; i < cur.size(); ++i) cur[i] = std::min(prev[i], prev[i + (std::size_t{1} << (k - 1))]);
            t_.push_back(std::move(cur));
        }
    }
    double operator()(std::size_t i0, std::size_t i1) const {
        std::size_t k = 0;
        while ((std::size_t{2} << k) <= i1 - i0) ++k;
        return std::min(t_[k][i0], t_[k][i1 - (std::size_t{1} << k)]);
    }

private:
    std::vector<std::vector<double>> t_;
};

std::vector<double> powered(const GridFunction& w, double e) {
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = safe_pow(w[i], e);
    return out;
}

}  // namespace

double a1_constant(const GridFunction& w) { return ap_constant(w, 1.0); }

double ap_constant(const GridFunction& w, double p) {
    if (!(p >= 1.0)) throw ParameterError("A_p needs p >= 1");
    require_positive(w);
    PrefixSum pw(w.values());
    double best = 0;
    if (p == 1.0) {
        RangeMin mn(w.values());
        for (const CellCube& Q : weight_family(w.domain())) {
            const auto i0 = static_cast<std::size_t>(Q.start), i1 = static_cast<std::size_t>(Q.end());
            const long double avg = pw.cells(Q.start, Q.end()) / Q.len;
            best = std::max(best, static_cast<double>(avg / mn(i0, i1)));
        }
        return best;
    }
    const double pp = p / (p - 1.0);
    PrefixSum ps(powered(w, 1.0 - pp));
    for (const CellCube& Q : weight_family(w.domain())) {
        const long double a = pw.cells(Q.start, Q.end()) / Q.len;
        const long double s = ps.cells(Q.start, Q.end()) / Q.len;
        best = std::max(best, static_cast<double>(a * std::pow(s, static_cast<long double>(p - 1.0))));
    }
    return best;
}

GridFunction nu_weight(const std::vector<GridFunction>& ws, const std::vector<double>& ps) {
    if (ws.empty() || ws.size() != ps.size()) throw ParameterError("multi-weight needs matching weights and exponents");
    double inv = 0;
    for (double q : ps) {
        if (!(q >= 1.0)) throw ParameterError("multi-weight exponents must be >= 1");
        inv += 1.0 / q;
    }
    const double p = 1.0 / inv;
    GridFunction nu(ws[0].domain(), 0.0);
    for (std::size_t i = 0; i < nu.size(); ++i) {
        double l = 0;
        for (std::size_t j = 0; j < ws.size(); ++j) l += (p / ps[j]) * std::log(ws[j][i]);
        nu[i] = std::exp(std::clamp(l, -690.0, 690.0));
    }
    return nu;
}

double multi_ap_constant(const std::vector<GridFunction>& ws, const std::vector<double>& ps) {
    for (const auto& w : ws) require_positive(w);
    const GridFunction nu = nu_weight(ws, ps);
    double inv = 0;
    for (double q : ps) inv += 1.0 / q;
    const double p = 1.0 / inv;
    const std::size_t m = ws.size();
    PrefixSum pnu(nu.values());
    std::vector<PrefixSum> sig(m);
    std::vector<RangeMin> mins;
    std::vector<int> min_slot(m, -1);
    for (std::size_t j = 0; j < m; ++j) {
        if (ps[j] == 1.0) {
            min_slot[j] = static_cast<int>(mins.size());
            mins.emplace_back(ws[j].values());
        } else {
            sig[j] = PrefixSum(powered(ws[j], 1.0 - ps[j] / (ps[j] - 1.0)));
        }
    }
    double best = 0;
    for (const CellCube& Q : weight_family(ws[0].domain())) {
        long double v = pnu.cells(Q.start, Q.end()) / Q.len;
        for (std::size_t j = 0; j < m; ++j) {
            if (min_slot[j] >= 0) {
                const double mn = mins[static_cast<std::size_t>(min_slot[j])](static_cast<std::size_t>(Q.start), static_cast<std::size_t>(Q.end()));
                v *= std::pow(static_cast<long double>(mn), static_cast<long double>(-p));
            } else {
                const double ppj = ps[j] / (ps[j] - 1.0);
                v *= std::pow(sig[j].cells(Q.start, Q.end()) / Q.len, static_cast<long double>(p / ppj));
            }
        }
        best = std::max(best, static_cast<double>(v));
    }
    return best;
}

AInfty ainfty_constants(const GridFunction& w) {
    require_positive(w);
    const Domain& d = w.domain();
    const auto N = static_cast<long long>(d.N());
    PrefixSum pw(w.values());
    const auto fam = weight_family(d);
    // group by (lattice, level); members of a group are disjoint and sorted by start
    std::vector<std::vector<CellCube>> groups;
    {
        std::vector<CellCube> sorted = fam;
        std::sort(sorted.begin(), sorted.end(), [](const CellCube& a, const CellCube& b) {
            return std::tie(a.lattice, a.level, a.start) < std::tie(b.lattice, b.level, b.start);
        });
        for (const auto& c : sorted) {
            if (groups.empty() || groups.back().front().lattice != c.lattice || groups.back().front().level != c.level) groups.emplace_back();
            groups.back().push_back(c);
        }
    }
    AInfty out;
    std::vector<long double> M;
    for (const CellCube& Q : fam) {
        const long long a = Q.start, b = Q.end();
        M.assign(static_cast<std::size_t>(Q.len), 0.0L);
        for (const auto& g : groups) {
            auto it = std::lower_bound(g.begin(), g.end(), a, [](const CellCube& c, long long x) { return c.end() <= x; });
            for (; it != g.end() && it->start < b; ++it) {
                const long long i0 = std::max(a, it->start), i1 = std::min(b, it->end());
                const long double v = pw.cells(i0, i1) / it->len;
                for (long long i = i0; i < i1; ++i) {
                    auto& slot = M[static_cast<std::size_t>(i - a)];
                    if (v > slot) slot = v;
                }
            }
        }
        long double integral = 0;
        for (long double x : M) integral += x;
        const long double wQ = pw.cells(a, b);
        out.fujii_wilson = std::max(out.fujii_wilson, static_cast<double>(integral / wQ));
        const double half = 0.5 * static_cast<double>(Q.len);
        const double lo = static_cast<double>(a) - half, hi = static_cast<double>(b) + half;
        if (lo >= 0 && hi <= static_cast<double>(N)) {
            out.weak = std::max(out.weak, static_cast<double>(integral / pw.frac(lo, hi)));
        }
    }
    return out;
}

Weight::Weight(GridFunction w) : w_(std::move(w)) { require_positive(w_); }

double Weight::a1() const {
    if (!a1_) a1_ = a1_constant(w_);
    return *a1_;
}

double Weight::ap(double p) const {
    auto it = ap_.find(p);
    if (it != ap_.end()) return it->second;
    return ap_[p] = ap_constant(w_, p);
}

AInfty Weight::ainfty() const {
    if (!ainf_) ainf_ = ainfty_constants(w_);
    return *ainf_;
}

ReverseHolderReport reverse_holder_check(const GridFunction& w, const DimensionalConstants& dc) {
    ReverseHolderReport rep;
    rep.weak = ainfty_constants(w).weak;
    rep.r = 1.0 + 1.0 / (dc.tau_n * rep.weak);
    const Domain& d = w.domain();
    const double N = static_cast<double>(d.N());
    PrefixSum pw(w.values());
    PrefixSum pr(powered(w, rep.r));
    for (const CellCube& Q : weight_family(d)) {
        const double half = 0.5 * static_cast<double>(Q.len);
        const double lo = static_cast<double>(Q.start) - half, hi = static_cast<double>(Q.end()) + half;
        if (lo < 0 || hi > N) continue;
        ++rep.cubes;
        const long double lhs = std::pow(pr.cells(Q.start, Q.end()) / Q.len, 1.0L / rep.r);
        const long double rhs = 2.0L * pw.frac(lo, hi) / (2.0L * Q.len);
        const double ratio = static_cast<double>(lhs / rhs);
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst = Q;
        }
        if (ratio > 1.0 + 1e-12) ++rep.violations;
    }
    return rep;
}

GridFunction s_u(const GridFunction& f, const GridFunction& u) {
    require_positive(u);
    GridFunction m = maximal(f * u, MaximalVariant::hl());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] /= u[i];
    return m;
}

RubioResult rubio_de_francia(const GridFunction& h, const GridFunction& u, double K0, int J_max, double tail_tol) {
    if (!(K0 > 0)) throw ParameterError("Rubio de Francia needs K0 > 0");
    for (double x : h.values())
        if (x < 0) throw InputError("Rubio de Francia needs h >= 0");
    RubioResult r;
    r.Rh = h;
    if (h.max_abs() == 0) return r;
    GridFunction term = h;
    double prev_norm = term.max_abs();
    int growing = 0;
    for (int j = 1; j <= J_max; ++j) {
        term = s_u(term, u);
        term *= 1.0 / (2.0 * K0);
        r.Rh += term;
        r.terms = j;
        double tail = 0;
        for (std::size_t i = 0; i < term.size(); ++i) tail = std::max(tail, term[i] / r.Rh[i]);
        r.tail = tail;
        if (tail < tail_tol) return r;
        const double nrm = term.max_abs();
        growing = nrm >= prev_norm ? growing + 1 : 0;
        if (growing >= 8)
            throw ParameterError("Rubio de Francia iteration not decaying: effective operator norm >= " +
                                 std::to_string(2.0 * K0 * nrm / prev_norm));
        prev_norm = nrm;
    }
    throw ParameterError("Rubio de Francia iteration did not reach the tail tolerance in " + std::to_string(J_max) + " terms");
}

K0P0 k0_p0(double t, double a1_u, double at_v, int m, const DimensionalConstants& dc) {
    if (!(t > 1.0)) throw ParameterError("k0_p0 needs t > 1");
    if (!(a1_u >= 1.0) || !(at_v >= 1.0)) throw ParameterError("k0_p0 needs weight constants >= 1");
    if (m < 1) throw ParameterError("k0_p0 needs m >= 1");
    K0P0 r;
    r.p0 = std::ldexp(1.0, dc.n + 3) * (t - 1.0) * a1_u + 1.0;
    r.p0_prime = r.p0 / (r.p0 - 1.0);
    r.K0 = 4.0 * dc.C_n * r.p0 * r.p0_prime *
               (a1_u + std::pow(2.0, r.p0 - 1.0) * std::pow(dc.C_n, t) * at_v * at_v * std::pow(a1_u, r.p0 - 1.0)) +
           1.0;
    return r;
}

K0P0 k0_p0_tilde(double p, double a1_u, double ap_v, int m, const DimensionalConstants& dc) {
    if (!(p > 1.0)) throw ParameterError("k0_p0_tilde needs p > 1");
    if (m < 1) throw ParameterError("k0_p0_tilde needs m >= 1");
    K0P0 r;
    r.p0 = std::ldexp(1.0, dc.n + 3) * (p - 1.0) * a1_u + 1.0;
    r.p0_prime = r.p0 / (r.p0 - 1.0);
    r.K0 = dc.C_n * r.p0 * r.p0_prime * std::pow(2.0, r.p0 - 1.0) * (ap_v * ap_v * std::pow(a1_u, r.p0));
    return r;
}

double unit_v_weak_constant(double a1_u, int m, const DimensionalConstants& dc) {
    return std::pow(2.0 * a1_u, std::ldexp(1.0, dc.n + 7) * m * a1_u);
}

PerturbedApReport perturbed_ap_check(const GridFunction& u, const GridFunction& v, double p, double eps, const DimensionalConstants& dc) {
    PerturbedApReport r;
    const double a1u = a1_constant(u);
    r.eps_cap = 1.0 / (std::ldexp(1.0, dc.n + 2) * a1u);
    if (!(eps > 0) || !(eps < r.eps_cap)) throw ParameterError("perturbed_ap_check: eps outside (0, 1/(2^{n+2}[u]_A1))");
    GridFunction uv(u.domain(), 0.0);
    for (std::size_t i = 0; i < uv.size(); ++i) uv[i] = u[i] * safe_pow(v[i], eps);
    r.lhs = ap_constant(uv, p);
    r.rhs = 2.0 * a1u * std::pow(ap_constant(v, p), eps);
    r.holds = r.lhs <= r.rhs * (1 + 1e-12);
    return r;
}

GridFunction power_weight(const Domain& d, double x0, double a) {
    GridFunction w(d, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = safe_pow(std::fabs(d.center(i) - x0), a);
    return w;
}

GridFunction exp_weight(const Domain& d, double c) {
    // exact cell averages of e^{cx}
    if (c == 0) return GridFunction(d, 1.0);
    return GridFunction::from_antiderivative(d, [c](double x) { return std::exp(c * x) / c; });
}

GridFunction step_weight(const Domain& d, const std::vector<double>& values) {
    if (values.empty()) throw ParameterError("step weight needs values");
    GridFunction w(d, 0.0);
    const std::size_t N = d.N();
    for (std::size_t i = 0; i < N; ++i) w[i] = values[i * values.size() / N];
    require_positive(w);
    return w;
}

GridFunction random_step_weight(const Domain& d, int pieces, std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(std::log(lo), std::log(hi));
    std::vector<double> v(static_cast<std::size_t>(pieces));
    for (auto& x : v) x = std::exp(U(rng));
    return step_weight(d, v);
}

GridFunction spike_weight(const Domain& d, std::size_t cell, double height) {
    GridFunction w(d, 1.0);
    w[cell] += height;
    return w;
}

}  // namespace sh
