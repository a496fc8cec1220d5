#include "sparse_harmonics/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/math/tools/minima.hpp>

#include "sparse_harmonics/maximal.hpp"

namespace sh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// a three-parameter fit of a shifted stretched exponential on a finite window underestimates
// the exponent by up to ~0.13 even on exact data
constexpr double kExponentMargin = 0.15;

std::vector<double> masses(const GridFunction& f, const Measure& mu) {
    const double h = f.domain().h();
    std::vector<double> m(f.size(), h);
    if (mu.w) {
        if (mu.w->size() != f.size()) throw InputError("measure and function live on different grids");
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = h * (*mu.w)[i];
    }
    return m;
}

// (value, mass) sorted by value descending, ties merged, zero values dropped
std::vector<std::pair<double, double>> level_masses(const GridFunction& f, const Measure& mu) {
    const auto m = masses(f, mu);
    std::vector<std::pair<double, double>> vm;
    vm.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double a = std::fabs(f[i]);
        if (a > 0) vm.emplace_back(a, m[i]);
    }
    std::sort(vm.begin(), vm.end(), [](auto& x, auto& y) { return x.first > y.first; });
    std::vector<std::pair<double, double>> out;
    for (auto& [v, ms] : vm) {
        if (!out.empty() && out.back().first == v)
            out.back().second += ms;
        else
            out.emplace_back(v, ms);
    }
    return out;
}

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

nlohmann::json env_json(const Domain& d, const KernelOperator* T, const HarnessOptions& o) {
    nlohmann::json e;
    e["L"] = d.L;
    e["left"] = d.left;
    e["length"] = d.length;
    e["boundary"] = d.boundary == Boundary::ZeroExtend ? "zero-extend" : "clip";
    if (T) e["pv_cutoff"] = T->pv_cutoff;
    e["n"] = o.dc.n;
    e["tau_n"] = o.dc.tau_n;
    e["C_n"] = o.dc.C_n;
    e["c_n"] = o.dc.c_n;
    e["seed"] = o.seed;
    e["slack"] = o.slack;
    return e;
}

nlohmann::json spec_params(const CommutatorSpec& spec, std::size_t m) {
    nlohmann::json p;
    p["operator"] = spec.T.name();
    p["m"] = m;
    p["l"] = spec.l();
    return p;
}

void check_inputs(const CommutatorSpec& spec, const std::vector<GridFunction>& f) {
    if (f.empty()) throw InputError("no input functions");
    if (static_cast<int>(f.size()) != spec.T.arity())
        throw InputError(spec.T.name() + " takes " + std::to_string(spec.T.arity()) + " functions, got " + std::to_string(f.size()));
    if (spec.l() > static_cast<int>(f.size())) throw InputError("more symbols than input slots");
    for (const auto& g : f)
        if (!(g.domain() == f[0].domain())) throw InputError("input functions on different grids");
    for (const auto& b : spec.b)
        if (!(b.domain() == f[0].domain())) throw InputError("symbol on a different grid");
}

double integral_pow(const GridFunction& g, double p, const GridFunction* w) {
    long double acc = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = std::fabs(g[i]);
        if (a == 0) continue;
        acc += std::pow(a, p) * (w ? (*w)[i] : 1.0);
    }
    return static_cast<double>(acc) * g.domain().h();
}

double lower_envelope(const DecayCurve& c) {
    double c0 = 0;
    for (std::size_t k = 0; k < c.t.size(); ++k)
        if (c.measure[k] > 0 && c.measure[k] < 1 && c.t[k] > 0) {
            const double l = std::log(1.0 / c.measure[k]);
            c0 = std::max(c0, l * l / c.t[k]);
        }
    return c0;
}

nlohmann::json fit_json(const ExponentFit& f) {
    return {{"c", f.c}, {"alpha", f.alpha}, {"p", f.p}, {"r2", f.r2}, {"points", f.points}, {"degenerate", f.degenerate}};
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> parts;
    boost::split(parts, s, boost::is_any_of(":"));
    for (auto& p : parts) boost::trim(p);
    return parts;
}

double num(const std::vector<std::string>& parts, std::size_t i, const std::string& spec) {
    if (i >= parts.size()) throw InputError("missing parameter " + std::to_string(i) + " in '" + spec + "'");
    try {
        std::size_t used = 0;
        const double v = std::stod(parts[i], &used);
        if (used != parts[i].size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw InputError("bad number '" + parts[i] + "' in '" + spec + "'");
    }
}

double num_or(const std::vector<std::string>& parts, std::size_t i, double def, const std::string& spec) {
    return i < parts.size() ? num(parts, i, spec) : def;
}

void expect_arity(const std::vector<std::string>& parts, std::size_t lo, std::size_t hi, const std::string& spec) {
    if (parts.size() < lo || parts.size() > hi) throw InputError("wrong number of parameters in '" + spec + "'");
}

double smooth_bump(double x, double c, double r) {
    const double u = (x - c) / r;
    return std::fabs(u) < 1 ? std::exp(1.0 - 1.0 / (1.0 - u * u)) : 0.0;
}

}  // namespace

// ---- Lorentz ----

double lorentz_weak(const GridFunction& f, double p, const Measure& mu) {
    if (!(p > 0)) throw ParameterError("Lorentz exponent must be positive");
    double best = 0, M = 0;
    for (auto& [v, ms] : level_masses(f, mu)) {
        M += ms;
        best = std::max(best, v * std::pow(M, 1.0 / p));
    }
    return best;
}

double lorentz_one(const GridFunction& f, double p, const Measure& mu) {
    if (!(p > 0)) throw ParameterError("Lorentz exponent must be positive");
    const auto lv = level_masses(f, mu);
    long double acc = 0;
    double M = 0;
    for (std::size_t k = 0; k < lv.size(); ++k) {
        M += lv[k].second;
        const double next = k + 1 < lv.size() ? lv[k + 1].first : 0.0;
        acc += static_cast<long double>(lv[k].first - next) * std::pow(M, 1.0 / p);
    }
    return p * static_cast<double>(acc);
}

double log_lorentz_weak(const std::vector<double>& abs_values, const std::vector<double>& log_mass, double p) {
    if (abs_values.size() != log_mass.size()) throw InputError("value and mass arrays differ in length");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < abs_values.size(); ++i)
        if (abs_values[i] > 0) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return abs_values[a] > abs_values[b]; });
    double best = -kInf, lm = -kInf;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        lm = log_add(lm, log_mass[idx[k]]);
        if (k + 1 < idx.size() && abs_values[idx[k + 1]] == abs_values[idx[k]]) continue;
        best = std::max(best, std::log(abs_values[idx[k]]) + lm / p);
    }
    return best;
}

// ---- fits ----

ExponentFit fit_exponent(const std::vector<double>& t, const std::vector<double>& phi, double lo, double hi) {
    if (t.size() != phi.size()) throw InputError("t and measure arrays differ in length");
    std::vector<double> lt, y;
    for (std::size_t k = 0; k < t.size(); ++k)
        if (t[k] > 0 && phi[k] >= lo && phi[k] <= hi) {
            lt.push_back(std::log(t[k]));
            y.push_back(std::log(phi[k]));
        }
    ExponentFit r;
    r.points = y.size();
    if (y.size() < 5) return r;

    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double syy = 0;
    for (double v : y) syy += (v - ym) * (v - ym);

    // for fixed p the model is linear in (ln c, alpha)
    auto solve = [&](double p, double& a, double& alpha) {
        const std::size_t n = y.size();
        double sx = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = std::exp(p * lt[k]);
            sx += x;
            sxx += x * x;
            sxy += x * y[k];
        }
        const double xm = sx / n, vxx = sxx - n * xm * xm, vxy = sxy - n * xm * ym;
        const double slope = vxx > 0 ? vxy / vxx : 0.0;
        a = ym - slope * xm;
        alpha = -slope;
        double sse = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double e = y[k] - (a + slope * std::exp(p * lt[k]));
            sse += e * e;
        }
        return sse;
    };
    auto sse_of = [&](double p) {
        double a, al;
        return solve(p, a, al);
    };

    double best_p = 0.05, best = kInf;
    for (int k = 0; k <= 295; ++k) {
        const double p = 0.05 + 0.01 * k;
        const double s = sse_of(p);
        if (s < best) {
            best = s;
            best_p = p;
        }
    }
    const auto res =
        boost::math::tools::brent_find_minima(sse_of, std::max(0.05, best_p - 0.01), std::min(3.0, best_p + 0.01), 40);
    double p = res.second <= best ? res.first : best_p;
    double a, alpha;
    const double sse = solve(p, a, alpha);
    r.p = p;
    r.alpha = alpha;
    r.c = std::exp(a);
    r.r2 = syy > 0 ? 1.0 - sse / syy : (sse == 0 ? 1.0 : 0.0);
    r.degenerate = !(alpha > 0) || !std::isfinite(r.c);
    return r;
}

double DecayCurve::model(double tt) const {
    if (fit.degenerate) return std::numeric_limits<double>::quiet_NaN();
    return std::min(1.0, fit.c * std::exp(-fit.alpha * std::pow(tt, fit.p)));
}

void write_curve_csv(const DecayCurve& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "t,measure,model\n";
    char buf[128];
    for (std::size_t k = 0; k < c.t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", c.t[k], c.measure[k], c.model(c.t[k]));
        out << buf;
    }
}

// ---- reports ----

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::HoldsWithMargin: return "holds-with-margin";
        case Verdict::Violated: return "violated";
        case Verdict::Degenerate: return "degenerate";
    }
    return "degenerate";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "holds") return Verdict::Holds;
    if (s == "holds-with-margin") return Verdict::HoldsWithMargin;
    if (s == "violated") return Verdict::Violated;
    if (s == "degenerate") return Verdict::Degenerate;
    throw InputError("unknown verdict '" + s + "'");
}

Verdict ratio_verdict(double lhs, double rhs, double ratio, double slack) {
    if (std::isnan(ratio) || std::isnan(lhs) || std::isnan(rhs)) return Verdict::Degenerate;
    if (lhs > 0 && rhs == 0) return Verdict::Degenerate;
    if (ratio <= 1.0) return Verdict::HoldsWithMargin;
    if (ratio <= slack) return Verdict::Holds;
    return Verdict::Violated;
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json j;
    j["id"] = id;
    j["params"] = params;
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["constants"] = constants;
    j["ratio"] = ratio;
    if (fit)
        j["fit"] = fit_json(*fit);
    else
        j["fit"] = nullptr;
    j["verdict"] = to_string(verdict);
    j["env"] = env;
    return j;
}

// ---- commutators ----

GridFunction evaluate(const CommutatorSpec& spec, const std::vector<GridFunction>& f) {
    check_inputs(spec, f);
    if (spec.l() == 0) return apply_operator(spec.T, f);
    // a constant symbol kills the commutator identically; skip the cancellation noise
    for (const auto& b : spec.b)
        if (bmo_norm(b) == 0) return GridFunction(f[0].domain(), 0.0);
    if (spec.l() == 1 && spec.T.kind == OperatorKind::Hilbert) return commutator_algebraic(spec.T, spec.b[0], 0, f);
    std::vector<Symbol> syms;
    for (int s = 0; s < spec.l(); ++s) syms.push_back({spec.b[s], s, 1});
    return iterated_commutator(spec.T, syms, f);
}

double bmo_product(const CommutatorSpec& spec) {
    double p = 1.0;
    for (const auto& b : spec.b) p *= bmo_norm(b);
    return p;
}

// ---- local decay ----

SparseFamily principal_cubes(const GridFunction& g, const CellCube& Q0, double factor) {
    const Domain& d = g.domain();
    if (Q0.lattice != 0 || Q0.start < 0 || Q0.end() > static_cast<long long>(d.N()))
        throw InputError("principal cubes need a base-lattice cube inside the domain");
    std::vector<double> a(g.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::fabs(g[i]);
    const PrefixSum ps(a);
    auto avg = [&](const CellCube& Q) { return static_cast<double>(ps.cells(Q.start, Q.end())) / Q.len; };

    SparseFamily S;
    std::vector<CellCube> todo{Q0};
    while (!todo.empty()) {
        const CellCube P = todo.back();
        todo.pop_back();
        S.cubes.push_back(P);
        const double aP = avg(P);
        std::vector<CellCube> walk;
        if (P.len > 1) walk = {{0, P.level + 1, P.start, P.len / 2}, {0, P.level + 1, P.start + P.len / 2, P.len / 2}};
        while (!walk.empty()) {
            const CellCube R = walk.back();
            walk.pop_back();
            if (avg(R) > factor * aP) {
                todo.push_back(R);
            } else if (R.len > 1) {
                walk.push_back({0, R.level + 1, R.start, R.len / 2});
                walk.push_back({0, R.level + 1, R.start + R.len / 2, R.len / 2});
            }
        }
    }
    return normalized(S);
}

GridFunction tripled_sparse_average(const SparseFamily& S, const GridFunction& f) {
    const Domain& d = f.domain();
    const long long N = static_cast<long long>(d.N());
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::fabs(f[i]);
    const PrefixSum ps(a);
    std::vector<double> diff(f.size() + 1, 0.0);
    for (const auto& R : S.cubes) {
        const long long i0 = R.start - R.len, i1 = R.end() + R.len;
        const long long c0 = std::max(0LL, i0), c1 = std::min(N, i1);
        if (c1 <= c0) continue;
        const double denom = d.boundary == Boundary::ZeroExtend ? static_cast<double>(i1 - i0) : static_cast<double>(c1 - c0);
        const double v = static_cast<double>(ps.cells(c0, c1)) / denom;
        diff[c0] += v;
        diff[c1] -= v;
    }
    GridFunction out(d);
    double run = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        run += diff[i];
        out[i] = run;
    }
    return out;
}

namespace {

DecayCurve measure_curve(const GridFunction& Tb, const GridFunction& comp, const CellCube& Q0, const std::vector<double>& t_grid,
                         const GridFunction* w) {
    const Domain& d = Tb.domain();
    double norm;
    if (w) {
        const double x0 = d.left + Q0.start * d.h(), side = Q0.len * d.h();
        norm = w->integral(Interval{x0 - side / 2, x0 + side * 1.5});
    } else {
        norm = Q0.len * d.h();
    }
    // |Tb| / comp per cell; measure(t) = mass of cells with ratio > t
    std::vector<std::pair<double, double>> rm;
    for (long long i = Q0.start; i < Q0.end(); ++i) {
        const double c = comp[i], v = std::fabs(Tb[i]);
        const double ratio = c > 0 ? v / c : (v > 0 ? kInf : 0.0);
        rm.emplace_back(ratio, d.h() * (w ? (*w)[i] : 1.0));
    }
    std::sort(rm.begin(), rm.end(), [](auto& a, auto& b) { return a.first > b.first; });
    DecayCurve c;
    c.t = t_grid;
    c.measure.resize(t_grid.size());
    std::vector<double> cum(rm.size() + 1, 0.0);
    {
        long double acc = 0;
        for (std::size_t k = 0; k < rm.size(); ++k) {
            acc += rm[k].second;
            cum[k + 1] = static_cast<double>(acc);
        }
    }
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        // count of ratios strictly above t
        const auto it = std::partition_point(rm.begin(), rm.end(), [&](auto& x) { return x.first > t_grid[k]; });
        c.measure[k] = std::min(1.0, cum[static_cast<std::size_t>(it - rm.begin())] / norm);
    }
    for (std::size_t k = 1; k < c.measure.size(); ++k) c.measure[k] = std::min(c.measure[k], c.measure[k - 1]);
    c.fit = fit_exponent(c.t, c.measure);
    return c;
}

}  // namespace

DecayResult local_decay_experiment(const CommutatorSpec& spec, const std::vector<GridFunction>& f, const CellCube& Q0,
                                   const DecayOptions& o) {
    check_inputs(spec, f);
    const Domain& d = f[0].domain();
    const int l = spec.l();
    const std::size_t m = f.size();
    if (Q0.start < 0 || Q0.end() > static_cast<long long>(d.N())) throw InputError("Q0 must lie inside the domain");
    for (const auto& g : f)
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g[i] != 0 && (static_cast<long long>(i) < Q0.start || static_cast<long long>(i) >= Q0.end()))
                throw InputError("input functions must be supported in Q0");

    const GridFunction Tb = evaluate(spec, f);
    const double bprod = bmo_product(spec);
    std::vector<double> t_grid = o.t_grid;
    if (t_grid.empty()) t_grid = log_grid(0.5 * (bprod > 0 ? bprod : 1.0), 50 * (bprod > 0 ? bprod : 1.0), 24);

    DecayResult res;
    auto& rep = res.report;
    rep.params = spec_params(spec, m);
    rep.params["Q0"] = {{"level", Q0.level}, {"start", Q0.start}, {"len", Q0.len}};
    rep.env = env_json(d, &spec.T, o.opt);
    rep.constants["bmo_product"] = bprod;

    GridFunction comp;
    bool degenerate = false;
    switch (o.comparator) {
        case Comparator::Iterated:
            if (m != 1) throw ParameterError("the iterated maximal comparator needs m = 1");
            comp = maximal(f[0], MaximalVariant::iterated(l + 1));
            rep.id = "local-decay-iterated";
            break;
        case Comparator::LLogL:
            comp = multilinear_maximal(f, MultiFlavor::LLogL);
            rep.id = o.w ? "weighted-decay-llogl" : "local-decay-llogl";
            break;
        case Comparator::MixedMin: {
            rep.id = "local-decay-mixed-min";
            const GridFunction g = apply_operator(spec.T, f);
            SparseFamily F = principal_cubes(g, Q0, 2.0);
            const GridFunction form = commutator_sparse_form_all(F, spec.b, f, SparseFormVariant::Local3Q);
            double C = 0;
            for (long long i = Q0.start; i < Q0.end(); ++i) {
                const double v = std::fabs(Tb[i]);
                if (v == 0) continue;
                C = std::max(C, form[i] > 0 ? v / form[i] : kInf);
            }
            rep.constants["principal_cubes"] = F.cubes.size();
            rep.constants["domination_constant"] = C;
            if (!std::isfinite(C)) degenerate = true;
            SparseFamily St = F;
            std::size_t added = 0;
            bool cert = true;
            for (const auto& b : spec.b) {
                const auto osc = oscillation_sparse(b, St);
                added += osc.added;
                cert = cert && osc.certificate;
                St = osc.family;
            }
            rep.constants["oscillation_added"] = added;
            rep.constants["oscillation_certificate"] = cert;
            rep.constants["sparse_eta"] = verify_sparse(St).best_eta;
            std::vector<GridFunction> f0 = f;
            for (int s = 0; s < l; ++s) f0[s] = tripled_sparse_average(St, f[s]);
            const GridFunction mixed = multilinear_maximal(f, MultiFlavor::Mixed, 1.0, l);
            const GridFunction plain = multilinear_maximal(f0, MultiFlavor::Plain);
            comp = GridFunction(d);
            std::size_t first = 0;
            for (std::size_t i = 0; i < comp.size(); ++i) {
                comp[i] = std::min(mixed[i], plain[i]);
                if (static_cast<long long>(i) >= Q0.start && static_cast<long long>(i) < Q0.end() && mixed[i] <= plain[i]) ++first;
            }
            rep.constants["llogl_branch_fraction"] = static_cast<double>(first) / Q0.len;
            break;
        }
    }
    for (long long i = Q0.start; i < Q0.end(); ++i)
        if (!(comp[i] > 0)) degenerate = true;
    if (o.w) rep.constants["weak_ainfty"] = ainfty_constants(*o.w).weak;

    res.curve = measure_curve(Tb, comp, Q0, t_grid, o.w);
    if (o.t_grid.empty() && res.curve.fit.points < 5 && !degenerate) {
        // default grid missed the ratio range; span median..max of |Tb|/comp instead
        std::vector<double> r;
        for (long long i = Q0.start; i < Q0.end(); ++i)
            if (comp[i] > 0 && Tb[i] != 0) r.push_back(std::fabs(Tb[i]) / comp[i]);
        if (r.size() >= 2) {
            std::sort(r.begin(), r.end());
            const double lo = r[r.size() / 2], hi = r.back();
            if (hi > lo && lo > 0) {
                res.curve = measure_curve(Tb, comp, Q0, log_grid(lo, hi, 24), o.w);
                rep.constants["t_grid_rescaled"] = true;
            }
        }
    }
    const auto& fit = res.curve.fit;
    rep.fit = fit;
    rep.constants["lower_envelope_c0"] = lower_envelope(res.curve);
    const double target = 1.0 / (l + 1);
    rep.constants["target_exponent"] = target;
    rep.constants["exponent_margin"] = kExponentMargin;
    rep.lhs = fit.p;
    rep.rhs = target;
    rep.ratio = fit.p > 0 ? target / fit.p : kInf;
    if (degenerate || fit.degenerate)
        rep.verdict = Verdict::Degenerate;
    else if (rep.ratio <= 1.0)
        rep.verdict = Verdict::HoldsWithMargin;
    else if (fit.p >= target - kExponentMargin)
        rep.verdict = Verdict::Holds;
    else
        rep.verdict = Verdict::Violated;
    return res;
}

DecayResult sharpness_experiment(const SharpnessOptions& o) {
    const Domain d = Domain::make(0.0, 1.0, o.L);
    CommutatorSpec spec{KernelOperator::hilbert(), {}};
    if (o.symbol == "log")
        spec.b.push_back(GridFunction::from_antiderivative(d, [](double x) { return x > 0 ? x * std::log(x) - x : 0.0; }));
    else if (o.symbol == "sin")
        spec.b.push_back(GridFunction::from_antiderivative(d, [](double x) { return -std::cos(2 * M_PI * x) / (2 * M_PI); }));
    else
        throw InputError("sharpness symbol must be log or sin");
    const std::vector<GridFunction> f{GridFunction(d, 1.0)};
    DecayOptions dopt;
    dopt.comparator = Comparator::Iterated;
    dopt.opt = o.opt;
    dopt.t_grid = o.t_grid;
    if (dopt.t_grid.empty() && o.symbol == "sin") {
        // a bounded symbol keeps |T_b f| bounded: spread the grid up to its maximum
        const double top = evaluate(spec, f).max_abs();
        dopt.t_grid = log_grid(0.05 * top, top, 24);
    }
    const CellCube Q0{0, 0, 0, static_cast<long long>(d.N())};
    DecayResult r = local_decay_experiment(spec, f, Q0, dopt);
    auto& rep = r.report;
    rep.id = o.symbol == "log" ? "sharpness" : "sharpness-bounded-symbol";
    rep.params["symbol"] = o.symbol;
    const auto& fit = r.curve.fit;
    // slope of ln(-ln phi) against ln t on the tail phi <= 1e-2: the local decay exponent
    {
        std::vector<double> x, y;
        for (std::size_t k = 0; k < r.curve.t.size(); ++k)
            if (r.curve.measure[k] >= 1e-4 && r.curve.measure[k] <= 1e-2) {
                x.push_back(std::log(r.curve.t[k]));
                y.push_back(std::log(-std::log(r.curve.measure[k])));
            }
        if (x.size() >= 2) {
            const double xm = std::accumulate(x.begin(), x.end(), 0.0) / x.size(), ym = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
            double sxy = 0, sxx = 0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                sxy += (x[k] - xm) * (y[k] - ym);
                sxx += (x[k] - xm) * (x[k] - xm);
            }
            rep.constants["tail_local_exponent"] = sxy / sxx;
        }
    }
    if (fit.degenerate) {
        rep.verdict = Verdict::Degenerate;
    } else if (o.symbol == "log") {
        // sharpness claim: the decay is no faster than exp(-c t^{1/2}) up to the fit margin
        rep.constants["p_upper"] = 0.65;
        rep.verdict = (fit.p <= 0.65 && fit.r2 >= 0.9) ? Verdict::Holds : Verdict::Violated;
    } else {
        rep.constants["window"] = {0.8, nullptr};
        rep.verdict = (fit.p >= 0.8 && fit.r2 >= 0.9) ? Verdict::Holds : Verdict::Violated;
    }
    return r;
}

// ---- Coifman-Fefferman ----

VerificationReport coifman_fefferman_experiment(const CommutatorSpec& spec, const std::vector<GridFunction>& f, double p,
                                                const Weight& w, const HarnessOptions& o) {
    if (!(p > 0)) throw ParameterError("p must be positive");
    check_inputs(spec, f);
    const GridFunction Tb = evaluate(spec, f);
    const GridFunction Mf = multilinear_maximal(f, MultiFlavor::LLogL);
    const int l = spec.l();
    const double bprod = bmo_product(spec);
    const AInfty ai = w.ainfty();

    VerificationReport r;
    r.id = "coifman-fefferman";
    r.params = spec_params(spec, f.size());
    r.params["p"] = p;
    r.env = env_json(f[0].domain(), &spec.T, o);
    r.lhs = integral_pow(Tb, p, &w.w());
    const double maxint = integral_pow(Mf, p, &w.w());
    const double wfac = std::pow(ai.fujii_wilson, p * l) * std::pow(ai.fujii_wilson, std::max(2.0, p));
    r.rhs = std::pow(bprod, p) * wfac * maxint;
    r.ratio = r.lhs == 0 ? 0.0 : r.lhs / r.rhs;
    r.constants = {{"bmo_product", bprod},
                   {"fujii_wilson", ai.fujii_wilson},
                   {"weight_factor", wfac},
                   {"maximal_integral", maxint}};
    r.verdict = ratio_verdict(r.lhs, r.rhs, r.ratio, o.slack);
    return r;
}

// ---- mixed weak type ----

MixedWeakResult mixed_weak_experiment(const CommutatorSpec& spec, const std::vector<GridFunction>& f,
                                      const std::vector<GridFunction>& ws, const GridFunction& v, double t,
                                      const HarnessOptions& o) {
    check_inputs(spec, f);
    const std::size_t m = f.size();
    if (ws.size() != m) throw InputError("mixed weak type needs one A1 weight per input");
    if (!(t > 1)) throw ParameterError("t must exceed 1");
    const Domain& d = f[0].domain();
    const int l = spec.l();
    const double inv_m = 1.0 / static_cast<double>(m);

    std::vector<double> ln_u(d.N(), 0.0), ln_v(d.N()), log_mass(d.N());
    for (const auto& w : ws)
        for (std::size_t i = 0; i < d.N(); ++i) {
            if (!(w[i] > 0)) throw InputError("weights must be positive");
            ln_u[i] += inv_m * std::log(w[i]);
        }
    for (std::size_t i = 0; i < d.N(); ++i) {
        if (!(v[i] > 0)) throw InputError("v must be positive");
        ln_v[i] = std::log(v[i]);
        log_mass[i] = std::log(d.h()) + ln_u[i] + inv_m * ln_v[i];
    }
    GridFunction u(d), v_root(d);
    for (std::size_t i = 0; i < d.N(); ++i) {
        u[i] = std::exp(ln_u[i]);
        v_root[i] = std::exp(inv_m * ln_v[i]);
    }

    const GridFunction Tb = evaluate(spec, f);
    const GridFunction Mf = multilinear_maximal(f, MultiFlavor::LLogL);
    std::vector<double> g(d.N()), gm(d.N());
    for (std::size_t i = 0; i < d.N(); ++i) {
        g[i] = std::exp(std::log(std::fabs(Tb[i])) - ln_v[i]);
        gm[i] = std::exp(std::log(std::fabs(Mf[i])) - ln_v[i]);
    }
    const double log_lhs = log_lorentz_weak(g, log_mass, inv_m);
    const double log_inner = log_lorentz_weak(gm, log_mass, inv_m);

    const double a1_u = a1_constant(u);
    const double at_v = ap_constant(v_root, t);
    const K0P0 K = k0_p0(t, a1_u, at_v, static_cast<int>(m), o.dc);
    const double bprod = bmo_product(spec);
    const double ln_K0 = std::log(K.K0);
    const double log_rhs = (2.0 * l + 6.0 * m) * ln_K0 + (2.0 * l + 4.0 * m) * std::log(at_v) + std::log(bprod) + log_inner;

    auto finish = [&](VerificationReport& r, double llhs, double lrhs) {
        r.lhs = std::exp(llhs);
        r.rhs = std::exp(lrhs);
        r.ratio = llhs == -kInf ? 0.0 : std::exp(llhs - lrhs);
        r.constants["log10_lhs"] = llhs / std::log(10.0);
        r.constants["log10_rhs"] = lrhs / std::log(10.0);
        r.constants["log10_ratio"] = llhs == -kInf ? -kInf : (llhs - lrhs) / std::log(10.0);
        if (std::isnan(r.ratio))
            r.verdict = Verdict::Degenerate;
        else if (r.ratio <= 1.0)
            r.verdict = Verdict::HoldsWithMargin;
        else if (r.ratio <= 1.0 + o.slack)
            r.verdict = Verdict::Holds;
        else
            r.verdict = Verdict::Violated;
    };

    MixedWeakResult res;
    auto& r = res.general;
    r.id = "mixed-weak";
    r.params = spec_params(spec, m);
    r.params["t"] = t;
    r.env = env_json(d, &spec.T, o);
    r.constants = {{"a1_u", a1_u},     {"at_v_root", at_v}, {"p0", K.p0},          {"p0_prime", K.p0_prime},
                   {"K0", K.K0},       {"log10_K0", ln_K0 / std::log(10.0)},       {"bmo_product", bprod},
                   {"K0_power", 2 * l + 6 * static_cast<int>(m)},                 {"at_power", 2 * l + 4 * static_cast<int>(m)}};
    const K0P0 Kt = k0_p0_tilde(t, a1_u, at_v, static_cast<int>(m), o.dc);
    const double log_rhs_tilde =
        (2.0 * l + 6.0 * m) * std::log(Kt.K0) + (2.0 * l + 4.0 * m) * std::log(at_v) + std::log(bprod) + log_inner;
    r.constants["K0_tilde"] = Kt.K0;
    r.constants["log10_ratio_tilde"] = log_lhs == -kInf ? -kInf : (log_lhs - log_rhs_tilde) / std::log(10.0);
    finish(r, log_lhs, log_rhs);

    bool v_is_one = true;
    for (std::size_t i = 0; i < d.N() && v_is_one; ++i) v_is_one = v[i] == 1.0;
    if (v_is_one) {
        VerificationReport c;
        c.id = "mixed-weak-unit-v";
        c.params = r.params;
        c.env = r.env;
        const double log_C = std::ldexp(1.0, o.dc.n + 7) * static_cast<double>(m) * a1_u * std::log(2.0 * a1_u);
        c.constants = {{"a1_u", a1_u}, {"log10_constant", log_C / std::log(10.0)}, {"bmo_product", bprod}};
        finish(c, log_lhs, log_C + std::log(bprod) + log_inner);
        res.unweighted_v = c;
    }
    return res;
}

// ---- Fefferman-Stein ----

VerificationReport fefferman_stein_experiment(const CommutatorSpec& spec, const std::vector<GridFunction>& f,
                                              const std::vector<double>& ps, const std::vector<GridFunction>& ws,
                                              const HarnessOptions& o) {
    check_inputs(spec, f);
    const std::size_t m = f.size();
    if (ps.size() != m || ws.size() != m) throw InputError("one exponent and one weight per input");
    double inv_p = 0;
    for (double q : ps) {
        if (!(q > 0)) throw ParameterError("exponents must be positive");
        inv_p += 1.0 / q;
    }
    const double p = 1.0 / inv_p;
    if (!(p <= 1.0 + 1e-12)) throw ParameterError("the Fefferman-Stein suite needs 0 < p <= 1");
    const int l = spec.l();

    const GridFunction nu = nu_weight(ws, ps);
    const GridFunction Tb = evaluate(spec, f);

    VerificationReport r;
    r.id = "fefferman-stein";
    r.params = spec_params(spec, m);
    r.params["p_s"] = ps;
    r.params["p"] = p;
    r.env = env_json(f[0].domain(), &spec.T, o);
    r.lhs = std::pow(integral_pow(Tb, p, &nu), 1.0 / p);

    double fnorms = 1.0;
    for (std::size_t s = 0; s < m; ++s) {
        const GridFunction Mw = maximal(ws[s], MaximalVariant::hl());
        fnorms *= std::pow(integral_pow(f[s], ps[s], &Mw), 1.0 / ps[s]);
    }
    std::vector<double> wbmo(l), bmo(l), fw(l), weak(l);
    for (int s = 0; s < l; ++s) {
        wbmo[s] = weighted_bmo_norm(spec.b[s], ws[s], ps[s]);
        bmo[s] = bmo_norm(spec.b[s]);
        const AInfty ai = ainfty_constants(ws[s]);
        fw[s] = ai.fujii_wilson;
        weak[s] = ai.weak;
    }
    double bstar = l == 0 ? 1.0 : 0.0, weak_sum = l == 0 ? 1.0 : 0.0, fw_prod = 1.0, bprod = 1.0;
    for (int s = 0; s < l; ++s) {
        fw_prod *= fw[s];
        bprod *= bmo[s];
    }
    for (unsigned mask = 0; l > 0 && mask < (1u << l); ++mask) {
        double term = 1.0, wterm = 1.0;
        for (int s = 0; s < l; ++s) {
            const bool g1 = !(mask >> s & 1u);
            term *= g1 ? wbmo[s] : bmo[s];
            if (g1) wterm *= weak[s];
        }
        bstar = std::max(bstar, term);
        weak_sum += wterm;
    }
    r.rhs = bstar * fnorms;
    r.ratio = r.lhs == 0 ? 0.0 : r.lhs / r.rhs;
    r.constants = {{"b_star", bstar}, {"f_norms", fnorms}, {"weighted_bmo", wbmo}, {"bmo", bmo}, {"fujii_wilson", fw}, {"weak", weak}};
    // the A_inf and weak A_inf variants of the same bound
    const double rhs_fw = fw_prod * bprod * fnorms, rhs_weak = weak_sum * bprod * fnorms;
    r.constants["ratio_ainfty_variant"] = r.lhs == 0 ? 0.0 : r.lhs / rhs_fw;
    r.constants["ratio_weak_variant"] = r.lhs == 0 ? 0.0 : r.lhs / rhs_weak;
    r.verdict = ratio_verdict(r.lhs, r.rhs, r.ratio, o.slack);
    return r;
}

// ---- modular ----

VerificationReport modular_experiment(const CommutatorSpec& spec, const std::vector<GridFunction>& f, const YoungFunction& phi,
                                      double q, double r, const Weight& w, const HarnessOptions& o) {
    check_inputs(spec, f);
    if (!phi.n_function || !phi.submultiplicative)
        throw ParameterError(phi.name + " is not a sub-multiplicative N-function");
    if (!(r > 1)) throw ParameterError("r must exceed 1");
    const DilationIndices ix = dilation_indices(phi);
    const double i_phi = ix.i_lower;
    int branch = 0;
    if (r < i_phi && std::isfinite(i_phi)) {
        if (!(q > 1 && q < i_phi / r))
            throw ParameterError("q must lie in (1, i_phi/r) with i_phi = " + std::to_string(i_phi));
        branch = 1;
    } else if (i_phi > 1 && i_phi <= r) {
        if (!(q > 1 && q < i_phi)) throw ParameterError("q must lie in (1, i_phi) with i_phi = " + std::to_string(i_phi));
        branch = 2;
    } else {
        throw ParameterError("no branch applies for i_phi = " + std::to_string(i_phi) + " and r = " + std::to_string(r));
    }
    const std::size_t m = f.size();
    const int l = spec.l();
    const double C1 = phi.delta2_C1;
    if (!std::isfinite(C1)) throw ParameterError(phi.name + " has no finite Delta_2 constant");
    const double alpha = quasi_convex_exponent(phi);
    const double aq = w.ap(q);
    const double fw = w.ainfty().fujii_wilson;
    const double bprod = bmo_product(spec);

    const GridFunction Tb = evaluate(spec, f);
    long double lhs = 0;
    for (std::size_t i = 0; i < Tb.size(); ++i) lhs += phi(std::fabs(Tb[i])) * w.w()[i];
    lhs *= Tb.domain().h();

    const double scale = branch == 1 ? std::pow(aq, 1.0 / (q * r)) : std::pow(aq, 2.0 / q);
    double log_prod = 0;
    bool zero = false;
    for (const auto& fi : f) {
        long double acc = 0;
        for (std::size_t i = 0; i < fi.size(); ++i) acc += std::pow(phi(scale * std::fabs(fi[i])), static_cast<double>(m)) * w.w()[i];
        acc *= fi.domain().h();
        if (acc == 0) zero = true;
        else log_prod += std::log(static_cast<double>(acc));
    }
    const double inner = zero ? 0.0 : std::exp(log_prod / m);
    double expo = (l + 1) * (alpha * C1 + 1);
    if (branch == 2) expo += 1 + m * C1;

    VerificationReport rep;
    rep.id = "modular";
    rep.params = spec_params(spec, m);
    rep.params["phi"] = phi.name;
    rep.params["q"] = q;
    rep.params["r"] = r;
    rep.env = env_json(f[0].domain(), &spec.T, o);
    rep.lhs = static_cast<double>(lhs);
    rep.rhs = std::pow(fw, expo) * std::pow(bprod, 1 + alpha * C1) * inner;
    rep.ratio = rep.lhs == 0 ? 0.0 : rep.lhs / rep.rhs;
    rep.constants = {{"branch", branch}, {"i_phi", i_phi},     {"C1", C1},          {"alpha", alpha},
                     {"a_q", aq},        {"fujii_wilson", fw}, {"ainfty_power", expo}, {"scale", scale},
                     {"bmo_product", bprod}};
    rep.verdict = ratio_verdict(rep.lhs, rep.rhs, rep.ratio, o.slack);
    return rep;
}

// ---- generators ----

GridFunction make_weight(const std::string& spec, const Domain& d) {
    const auto p = split(spec);
    const std::string& k = p[0];
    if (k == "one") {
        expect_arity(p, 1, 1, spec);
        return GridFunction(d, 1.0);
    }
    if (k == "power") {
        expect_arity(p, 3, 3, spec);
        return power_weight(d, num(p, 1, spec), num(p, 2, spec));
    }
    if (k == "exp") {
        expect_arity(p, 1, 2, spec);
        return exp_weight(d, num_or(p, 1, 1.0, spec));
    }
    if (k == "step") {
        if (p.size() < 2) throw InputError("step weight needs values: " + spec);
        std::vector<double> v;
        for (std::size_t i = 1; i < p.size(); ++i) v.push_back(num(p, i, spec));
        return step_weight(d, v);
    }
    if (k == "random_step") {
        expect_arity(p, 3, 3, spec);
        return random_step_weight(d, static_cast<int>(num(p, 1, spec)), static_cast<std::uint64_t>(num(p, 2, spec)));
    }
    if (k == "spike") {
        expect_arity(p, 3, 3, spec);
        return spike_weight(d, static_cast<std::size_t>(num(p, 1, spec)), num(p, 2, spec));
    }
    throw InputError("unknown weight generator '" + spec + "'");
}

GridFunction make_function(const std::string& spec, const Domain& d) {
    const auto p = split(spec);
    const std::string& k = p[0];
    if (k == "zero") return GridFunction(d);
    if (k == "indicator") {
        expect_arity(p, 3, 3, spec);
        const double a = num(p, 1, spec), b = num(p, 2, spec);
        return GridFunction::from_antiderivative(d, [a, b](double x) { return std::clamp(x, a, b) - a; });
    }
    if (k == "bump") {
        expect_arity(p, 3, 3, spec);
        const double c = num(p, 1, spec), r = num(p, 2, spec);
        return GridFunction::sample(d, [c, r](double x) { return smooth_bump(x, c, r); });
    }
    if (k == "steps") {
        expect_arity(p, 3, 3, spec);
        const int pieces = static_cast<int>(num(p, 1, spec));
        if (pieces < 1 || static_cast<std::size_t>(pieces) > d.N()) throw InputError("bad piece count in " + spec);
        std::mt19937_64 rng(static_cast<std::uint64_t>(num(p, 2, spec)));
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> v(pieces);
        for (auto& x : v) x = U(rng);
        GridFunction g(d);
        for (std::size_t i = 0; i < d.N(); ++i) g[i] = v[i * pieces / d.N()];
        return g;
    }
    if (k == "wave") {
        expect_arity(p, 2, 2, spec);
        const double fr = num(p, 1, spec);
        return GridFunction::sample(d, [&](double x) { return std::cos(2 * M_PI * fr * (x - d.left) / d.length); });
    }
    if (k == "bumps") {
        expect_arity(p, 2, 4, spec);
        std::mt19937_64 rng(static_cast<std::uint64_t>(num(p, 1, spec)));
        const double a = num_or(p, 2, d.left + 0.25 * d.length, spec), b = num_or(p, 3, d.left + 0.75 * d.length, spec);
        if (!(b > a)) throw InputError("empty bump range in " + spec);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        GridFunction g(d);
        for (int j = 0; j < 3; ++j) {
            const double r = (0.1 + 0.3 * U(rng)) * (b - a) / 2;
            const double c = a + r + U(rng) * (b - a - 2 * r);
            const double hgt = 0.5 + U(rng);
            for (std::size_t i = 0; i < d.N(); ++i) g[i] += hgt * smooth_bump(d.center(i), c, r);
        }
        return g;
    }
    throw InputError("unknown function generator '" + spec + "'");
}

GridFunction make_symbol(const std::string& spec, const Domain& d) {
    const auto p = split(spec);
    const std::string& k = p[0];
    if (k == "log") {
        expect_arity(p, 1, 2, spec);
        const double x0 = num_or(p, 1, 0.0, spec);
        return GridFunction::sample(d, [x0](double x) { return std::log(std::fabs(x - x0)); });
    }
    if (k == "sin") {
        expect_arity(p, 1, 2, spec);
        const double fr = num_or(p, 1, 1.0, spec);
        return GridFunction::sample(d, [&](double x) { return std::sin(2 * M_PI * fr * (x - d.left) / d.length); });
    }
    if (k == "abs") {
        expect_arity(p, 1, 2, spec);
        const double x0 = num_or(p, 1, 0.0, spec);
        return GridFunction::sample(d, [x0](double x) { return std::fabs(x - x0); });
    }
    if (k == "const") {
        expect_arity(p, 1, 2, spec);
        return GridFunction(d, num_or(p, 1, 1.0, spec));
    }
    if (k == "steps") return make_function(spec, d);
    throw InputError("unknown symbol generator '" + spec + "'");
}

KernelOperator make_operator(const std::string& spec) {
    const auto p = split(spec);
    const std::string& k = p[0];
    if (k == "hilbert") {
        expect_arity(p, 1, 2, spec);
        const int pv = static_cast<int>(num_or(p, 1, 1.0, spec));
        if (pv < 1) throw ParameterError("pv cutoff must be at least 1");
        return KernelOperator::hilbert(pv);
    }
    if (k == "calderon") {
        expect_arity(p, 2, 2, spec);
        const int m = static_cast<int>(num(p, 1, spec));
        if (m < 1) throw ParameterError("Calderon order must be at least 1");
        return KernelOperator::calderon(m);
    }
    if (k == "stein") {
        expect_arity(p, 2, 2, spec);
        const double a = num(p, 1, spec);
        if (!(a > 0.5)) throw ParameterError("Stein square function needs alpha > 1/2, got " + p[1]);
        return KernelOperator::stein(a);
    }
    throw InputError("unknown operator '" + spec + "'");
}

YoungFunction make_young(const std::string& spec) {
    const auto p = split(spec);
    const std::string& k = p[0];
    if (k == "power") {
        expect_arity(p, 2, 3, spec);
        return power_young(num(p, 1, spec), num_or(p, 2, 1.0, spec));
    }
    if (k == "llogl") {
        expect_arity(p, 1, 3, spec);
        return llogl_young(num_or(p, 1, 1.0, spec), num_or(p, 2, 1.0, spec));
    }
    if (k == "expl") {
        expect_arity(p, 2, 2, spec);
        return expl_young(num(p, 1, spec));
    }
    throw InputError("unknown Young function '" + spec + "'");
}

std::vector<ConstantsRow> constants_table(const std::vector<std::string>& bank, const Domain& d, const std::vector<double>& ps) {
    std::vector<ConstantsRow> rows;
    for (const auto& spec : bank) {
        const Weight w(make_weight(spec, d));
        const AInfty ai = w.ainfty();
        for (double p : ps) rows.push_back({spec, p, w.ap(p), w.a1(), ai.fujii_wilson, ai.weak});
    }
    return rows;
}

std::string constants_csv(const std::vector<ConstantsRow>& rows) {
    std::ostringstream out;
    out << "weight,p,ap,a1,ainfty_fw,ainfty_weak\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, ",%.12g,%.12g,%.12g,%.12g,%.12g\n", r.p, r.ap, r.a1, r.fujii_wilson, r.weak);
        out << r.weight << buf;
    }
    return out.str();
}

void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& job) {
    const std::size_t nt = std::max<std::size_t>(1, std::min<std::size_t>(count, jobs > 0 ? jobs : 1));
    if (nt == 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < count;) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace sh
