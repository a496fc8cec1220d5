#include "sparse_harmonics/maximal.hpp"

#include <algorithm>
#include <cmath>

namespace sh {

CubeSpan cube_span(const CellCube& Q, const Domain& d) {
    const auto N = static_cast<long long>(d.N());
    CubeSpan s;
    s.i0 = std::max(0LL, Q.start);
    s.i1 = std::min(N, Q.end());
    const double inside = static_cast<double>(std::max(0LL, s.i1 - s.i0));
    if (d.boundary == Boundary::ZeroExtend) {
        s.denom = static_cast<double>(Q.len);
        s.outside = s.denom - inside;
    } else {
        s.denom = inside;
    }
    return s;
}

namespace {

template <class Fn>
GridFunction sup_over_cubes(const Domain& d, CubeScope scope, Fn&& value) {
    GridFunction out(d, 0.0);
    auto& o = out.values();
    for (const CellCube& Q : cube_family(d, scope, false)) {
        const CubeSpan s = cube_span(Q, d);
        if (s.i1 <= s.i0) continue;
        const double v = value(Q, s);
        for (long long i = s.i0; i < s.i1; ++i) o[static_cast<std::size_t>(i)] = std::max(o[static_cast<std::size_t>(i)], v);
    }
    return out;
}

struct LuxScratch {
    std::vector<double> vals, mass;
};

double cube_luxemburg(const std::vector<double>& absf, const CubeSpan& s, const YoungFunction& phi, double inv1, LuxScratch& sc) {
    const auto n = static_cast<std::size_t>(s.i1 - s.i0);
    sc.vals.assign(absf.begin() + s.i0, absf.begin() + s.i1);
    sc.mass.assign(n, 1.0);
    if (s.outside > 0) {
        sc.vals.push_back(0.0);
        sc.mass.push_back(s.outside);
    }
    return luxemburg_values(sc.vals.data(), sc.mass.data(), sc.vals.size(), phi, inv1);
}

std::vector<double> abs_values(const GridFunction& f) {
    std::vector<double> a(f.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::fabs(f[i]);
    return a;
}

}  // namespace

GridFunction maximal(const GridFunction& f, const MaximalVariant& v) {
    const Domain& d = f.domain();
    switch (v.kind) {
        case MaximalVariant::Kind::HL: {
            PrefixSum ps(abs_values(f));
            return sup_over_cubes(d, v.scope, [&](const CellCube&, const CubeSpan& s) {
                return static_cast<double>(ps.cells(s.i0, s.i1) / s.denom);
            });
        }
        case MaximalVariant::Kind::Power: {
            if (!(v.r >= 1.0)) throw ParameterError("power maximal needs r >= 1");
            std::vector<double> p(f.size());
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::pow(std::fabs(f[i]), v.r);
            PrefixSum ps(p);
            const double r = v.r;
            return sup_over_cubes(d, v.scope, [&](const CellCube&, const CubeSpan& s) {
                return std::pow(static_cast<double>(ps.cells(s.i0, s.i1) / s.denom), 1.0 / r);
            });
        }
        case MaximalVariant::Kind::Iterated: {
            if (v.k < 1) throw ParameterError("iterated maximal needs k >= 1");
            GridFunction g = f;
            for (int j = 0; j < v.k; ++j) g = maximal(g, MaximalVariant::hl(v.scope));
            return g;
        }
        case MaximalVariant::Kind::Orlicz: {
            const auto a = abs_values(f);
            const double inv1 = v.phi.inverse(1.0);
            LuxScratch sc;
            return sup_over_cubes(d, v.scope, [&](const CellCube&, const CubeSpan& s) { return cube_luxemburg(a, s, v.phi, inv1, sc); });
        }
        case MaximalVariant::Kind::WeightedDyadic: {
            if (!v.w) throw ParameterError("weighted dyadic maximal needs a weight");
            const GridFunction& w = *v.w;
            std::vector<double> fw(f.size());
            for (std::size_t i = 0; i < fw.size(); ++i) fw[i] = std::fabs(f[i]) * w[i];
            PrefixSum pf(fw), pw(w.values());
            return sup_over_cubes(d, CubeScope::Dyadic, [&](const CellCube&, const CubeSpan& s) {
                return static_cast<double>(pf.cells(s.i0, s.i1) / pw.cells(s.i0, s.i1));
            });
        }
    }
    throw ParameterError("unknown maximal variant");
}

GridFunction multilinear_maximal(const std::vector<GridFunction>& fs, MultiFlavor flavor, double r, int l, CubeScope scope) {
    if (fs.empty()) throw ParameterError("multilinear maximal needs at least one function");
    const Domain& d = fs[0].domain();
    const std::size_t m = fs.size();
    if (flavor == MultiFlavor::Mixed && (l < 1 || l > static_cast<int>(m))) throw ParameterError("mixed flavor needs 1 <= l <= m");
    if (flavor == MultiFlavor::Power && !(r >= 1.0)) throw ParameterError("power flavor needs r >= 1");
    std::vector<std::vector<double>> absf;
    std::vector<PrefixSum> ps;
    for (const auto& f : fs) {
        absf.push_back(abs_values(f));
        if (flavor == MultiFlavor::Power) {
            std::vector<double> p(f.size());
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::pow(absf.back()[i], r);
            ps.emplace_back(p);
        } else {
            ps.emplace_back(absf.back());
        }
    }
    const YoungFunction llogl = llogl_young(1.0);
    const double inv1 = llogl.inverse(1.0);
    LuxScratch sc;
    return sup_over_cubes(d, scope, [&](const CellCube&, const CubeSpan& s) {
        double prod = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            double v;
            const double avg = static_cast<double>(ps[j].cells(s.i0, s.i1) / s.denom);
            switch (flavor) {
                case MultiFlavor::Plain: v = avg; break;
                case MultiFlavor::Power: v = std::pow(avg, 1.0 / r); break;
                case MultiFlavor::LLogL: v = cube_luxemburg(absf[j], s, llogl, inv1, sc); break;
                case MultiFlavor::Mixed:
                default: v = static_cast<int>(j) < l ? cube_luxemburg(absf[j], s, llogl, inv1, sc) : avg; break;
            }
            prod *= v;
            if (prod == 0) break;
        }
        return prod;
    });
}

}  // namespace sh
