#include "sparse_harmonics/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "sparse_harmonics/maximal.hpp"

namespace sh {

bool contains(const CellCube& A, const CellCube& B) { return A.start <= B.start && B.end() <= A.end(); }

namespace {

bool cube_order(const CellCube& a, const CellCube& b) {
    return std::tie(a.start, b.len) < std::tie(b.start, a.len);  // start asc, len desc
}

// parent index in the sorted laminar list, -1 for roots
std::vector<int> laminar_parents(const std::vector<CellCube>& c) {
    std::vector<int> parent(c.size(), -1), stack;
    for (std::size_t i = 0; i < c.size(); ++i) {
        while (!stack.empty() && c[static_cast<std::size_t>(stack.back())].end() <= c[i].start) stack.pop_back();
        if (!stack.empty()) parent[i] = stack.back();
        stack.push_back(static_cast<int>(i));
    }
    return parent;
}

CellCube child_at(const CellCube& Q, int depth, long long j) {
    const long long len = Q.len >> depth;
    return {Q.lattice, Q.level + depth, Q.start + j * len, len};
}

}  // namespace

SparseFamily normalized(SparseFamily S) {
    if (!S.cubes.empty()) {
        const int lat = S.cubes.front().lattice;
        for (const auto& q : S.cubes)
            if (q.lattice != lat) throw InputError("sparse family mixes cubes from different lattices");
    }
    std::sort(S.cubes.begin(), S.cubes.end(), cube_order);
    S.cubes.erase(std::unique(S.cubes.begin(), S.cubes.end(),
                              [](const CellCube& a, const CellCube& b) { return a.start == b.start && a.len == b.len; }),
                  S.cubes.end());
    return S;
}

SparseCheck verify_sparse(const SparseFamily& S0) {
    const SparseFamily S = normalized(S0);
    SparseCheck r;
    if (S.cubes.empty()) {
        r.is_sparse = true;
        return r;
    }
    const auto& c = S.cubes;
    const auto parent = laminar_parents(c);
    std::vector<long long> child_mass(c.size(), 0), subtree(c.size(), 0);
    for (std::size_t i = c.size(); i-- > 0;) {
        subtree[i] += c[i].len;
        if (parent[i] >= 0) {
            child_mass[static_cast<std::size_t>(parent[i])] += c[i].len;
            subtree[static_cast<std::size_t>(parent[i])] += subtree[i];
        }
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double e = static_cast<double>(c[i].len - child_mass[i]) / static_cast<double>(c[i].len);
        if (e < r.best_eta) {
            r.best_eta = e;
            r.worst = c[i];
        }
        r.carleson = std::max(r.carleson, static_cast<double>(subtree[i]) / static_cast<double>(c[i].len));
    }
    r.carleson_eta = 1.0 / r.carleson;
    r.is_sparse = r.best_eta >= S.eta - 1e-12;
    return r;
}

OwnedSets carleson_owned_sets(const SparseFamily& S0, double eta) {
    const SparseFamily S = normalized(S0);
    OwnedSets out;
    out.eta = eta;
    out.pieces.resize(S.cubes.size());
    if (S.cubes.empty()) return out;
    long long lo = S.cubes.front().start, hi = lo;
    for (const auto& q : S.cubes) hi = std::max(hi, q.end());
    std::vector<double> free(static_cast<std::size_t>(hi - lo), 1.0);
    // descendants come after their ancestors in sorted order
    for (std::size_t i = S.cubes.size(); i-- > 0;) {
        const auto& q = S.cubes[i];
        double need = eta * static_cast<double>(q.len);
        for (long long x = q.start; x < q.end() && need > 1e-15; ++x) {
            double& f = free[static_cast<std::size_t>(x - lo)];
            if (f <= 0) continue;
            const double take = std::min(f, need);
            f -= take;
            need -= take;
            out.pieces[i].emplace_back(x, take);
        }
        if (need > 1e-9) throw InputError("family is not 1/eta-Carleson: owned sets cannot be assigned");
    }
    return out;
}

GridFunction sparse_operator(const SparseFamily& S, double r, const GridFunction& f, double dilation) {
    if (!(r >= 1.0)) throw ParameterError("sparse operator needs r >= 1");
    if (dilation != 1.0 && dilation != 3.0) throw ParameterError("sparse operator dilation must be 1 or 3");
    const Domain& d = f.domain();
    const auto N = static_cast<long long>(d.N());
    std::vector<double> p(f.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = r == 1.0 ? std::fabs(f[i]) : std::pow(std::fabs(f[i]), r);
    PrefixSum ps(p);
    std::vector<long double> diff(static_cast<std::size_t>(N) + 1, 0.0L);
    for (const auto& Q : S.cubes) {
        CellCube A = Q;
        if (dilation == 3.0) {
            A.start -= Q.len;
            A.len *= 3;
        }
        const CubeSpan s = cube_span(A, d);
        if (s.denom <= 0) continue;
        long double v = ps.cells(s.i0, s.i1) / s.denom;
        if (r != 1.0) v = std::pow(v, 1.0L / r);
        const long long i0 = std::max(0LL, Q.start), i1 = std::min(N, Q.end());
        if (i1 <= i0) continue;
        diff[static_cast<std::size_t>(i0)] += v;
        diff[static_cast<std::size_t>(i1)] -= v;
    }
    GridFunction out(d, 0.0);
    long double run = 0;
    for (long long i = 0; i < N; ++i) {
        run += diff[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = static_cast<double>(run);
    }
    return out;
}

GridFunction commutator_sparse_form(const SparseFamily& S, const std::vector<GridFunction>& b, const std::vector<GridFunction>& f,
                                    const std::vector<int>& gamma, SparseFormVariant variant) {
    const std::size_t l = b.size(), m = f.size();
    if (m == 0) throw ParameterError("commutator sparse form needs at least one function");
    if (l > m) throw ParameterError("commutator sparse form needs l <= m");
    if (gamma.size() != l) throw ParameterError("gamma must have one entry per symbol");
    for (int g : gamma)
        if (g != 1 && g != 2) throw ParameterError("gamma entries must be 1 or 2");
    const Domain& d = f[0].domain();
    const auto N = static_cast<long long>(d.N());
    GridFunction out(d, 0.0);
    std::vector<PrefixSum> pf, pb;
    for (const auto& fs : f) pf.emplace_back(fs.abs().values());
    for (const auto& bs : b) pb.emplace_back(bs.values());
    std::vector<double> bavg(l), fixed(l);
    for (const auto& Q : S.cubes) {
        CellCube A = Q;
        if (variant == SparseFormVariant::Local3Q) {
            A.start -= Q.len;
            A.len *= 3;
        }
        const CubeSpan s = cube_span(A, d);
        if (s.denom <= 0) continue;
        double rest = 1.0;
        for (std::size_t j = l; j < m; ++j) rest *= static_cast<double>(pf[j].cells(s.i0, s.i1) / s.denom);
        if (rest == 0) continue;
        for (std::size_t j = 0; j < l; ++j) {
            bavg[j] = static_cast<double>(pb[j].cells(s.i0, s.i1) / s.denom);
            if (gamma[j] == 1) {
                fixed[j] = static_cast<double>(pf[j].cells(s.i0, s.i1) / s.denom);
            } else {
                long double acc = 0;
                for (long long i = s.i0; i < s.i1; ++i) {
                    const auto k = static_cast<std::size_t>(i);
                    acc += std::fabs((b[j][k] - bavg[j]) * f[j][k]);
                }
                fixed[j] = static_cast<double>(acc / s.denom);
            }
        }
        const long long i0 = std::max(0LL, Q.start), i1 = std::min(N, Q.end());
        for (long long i = i0; i < i1; ++i) {
            const auto k = static_cast<std::size_t>(i);
            double v = rest;
            for (std::size_t j = 0; j < l; ++j) v *= gamma[j] == 1 ? std::fabs(b[j][k] - bavg[j]) * fixed[j] : fixed[j];
            out[k] += v;
        }
    }
    return out;
}

GridFunction commutator_sparse_form_all(const SparseFamily& S, const std::vector<GridFunction>& b, const std::vector<GridFunction>& f,
                                        SparseFormVariant variant) {
    const std::size_t l = b.size();
    GridFunction out(f.at(0).domain(), 0.0);
    for (std::size_t mask = 0; mask < (std::size_t{1} << l); ++mask) {
        std::vector<int> g(l);
        for (std::size_t j = 0; j < l; ++j) g[j] = (mask >> j & 1) ? 2 : 1;
        out += commutator_sparse_form(S, b, f, g, variant);
    }
    return out;
}

OscillationResult oscillation_sparse(const GridFunction& b, const SparseFamily& S0) {
    const SparseFamily S = normalized(S0);
    const Domain& d = b.domain();
    const auto N = static_cast<long long>(d.N());
    for (const auto& q : S.cubes)
        if (q.start < 0 || q.end() > N) throw InputError("oscillation_sparse needs cubes inside the domain");
    OscillationResult res;
    constexpr double kStop = 4.0;  // 2^{n+1}
    res.constant = 8.0;            // 2^{n+2}

    auto key = [](const CellCube& c) { return std::make_pair(c.start, c.len); };
    std::set<std::pair<long long, long long>> in_S, in_tilde;
    for (const auto& q : S.cubes) in_S.insert(key(q));
    in_tilde = in_S;
    std::vector<CellCube> tilde = S.cubes;
    std::vector<CellCube> queue = S.cubes;
    PrefixSum pb(b.values());
    std::vector<double> g;
    std::vector<long double> pg;
    while (!queue.empty()) {
        const CellCube Q = queue.back();
        queue.pop_back();
        const long double bQ = pb.cells(Q.start, Q.end()) / Q.len;
        g.resize(static_cast<std::size_t>(Q.len));
        pg.assign(static_cast<std::size_t>(Q.len) + 1, 0.0L);
        for (long long i = 0; i < Q.len; ++i) {
            g[static_cast<std::size_t>(i)] = static_cast<double>(std::fabs(b[static_cast<std::size_t>(Q.start + i)] - bQ));
            pg[static_cast<std::size_t>(i) + 1] = pg[static_cast<std::size_t>(i)] + g[static_cast<std::size_t>(i)];
        }
        const long double omega = pg.back() / Q.len;
        if (omega == 0) continue;
        const long double thr = kStop * omega;
        // depth-first over proper subcubes in index order; stop at S-cubes and at large local oscillation
        std::vector<CellCube> stack;
        if (Q.len > 1) {
            stack.push_back(child_at(Q, 1, 1));
            stack.push_back(child_at(Q, 1, 0));
        }
        while (!stack.empty()) {
            const CellCube R = stack.back();
            stack.pop_back();
            if (in_S.count(key(R))) continue;
            const long double avg = (pg[static_cast<std::size_t>(R.end() - Q.start)] - pg[static_cast<std::size_t>(R.start - Q.start)]) / R.len;
            if (avg > thr) {
                if (in_tilde.insert(key(R)).second) {
                    tilde.push_back(R);
                    queue.push_back(R);
                    ++res.added;
                }
                continue;
            }
            if (R.len > 1) {
                stack.push_back(child_at(R, 1, 1));
                stack.push_back(child_at(R, 1, 0));
            }
        }
    }
    res.family.cubes = tilde;
    res.family.eta = S.eta / (2.0 * (1.0 + S.eta));
    res.family = normalized(res.family);

    // certificate: |b(x)-<b>_Q| <= 8 sum_{R in S~, x in R subset Q} <|b-<b>_R|>_R at every cell of every Q
    const auto& c = res.family.cubes;
    std::vector<double> bavg(c.size()), osc(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const long double bQ = pb.cells(c[i].start, c[i].end()) / c[i].len;
        long double acc = 0;
        for (long long x = c[i].start; x < c[i].end(); ++x) acc += std::fabs(b[static_cast<std::size_t>(x)] - bQ);
        bavg[i] = static_cast<double>(bQ);
        osc[i] = static_cast<double>(acc / c[i].len);
    }
    std::vector<std::vector<int>> chain(static_cast<std::size_t>(N));
    for (std::size_t i = 0; i < c.size(); ++i)
        for (long long x = c[i].start; x < c[i].end(); ++x) chain[static_cast<std::size_t>(x)].push_back(static_cast<int>(i));
    const double scale = std::max(1.0, b.max_abs());
    for (long long x = 0; x < N; ++x) {
        const auto& ch = chain[static_cast<std::size_t>(x)];
        double suffix = 0;
        for (std::size_t k = ch.size(); k-- > 0;) {
            const auto i = static_cast<std::size_t>(ch[k]);
            suffix += osc[i];
            const double lhs = std::fabs(b[static_cast<std::size_t>(x)] - bavg[i]);
            const double rhs = res.constant * suffix;
            if (lhs > rhs + 1e-12 * scale) ++res.violations;
            if (lhs > 0) res.worst_ratio = std::max(res.worst_ratio, rhs > 0 ? lhs / rhs : INFINITY);
        }
    }
    res.certificate = res.violations == 0;
    return res;
}

std::vector<int> counting_function(const SparseFamily& S, const CellCube& Q0, const Domain& d) {
    const auto N = static_cast<long long>(d.N());
    std::vector<long long> diff(static_cast<std::size_t>(Q0.len) + 1, 0);
    for (const auto& q : S.cubes) {
        if (!contains(Q0, q)) continue;
        diff[static_cast<std::size_t>(q.start - Q0.start)] += 1;
        diff[static_cast<std::size_t>(q.end() - Q0.start)] -= 1;
    }
    std::vector<int> out(static_cast<std::size_t>(Q0.len));
    long long run = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        run += diff[i];
        out[i] = static_cast<int>(run);
    }
    (void)N;
    return out;
}

CountingDecay counting_decay(const SparseFamily& S, const CellCube& Q0, const Domain& d, const std::vector<double>& t_grid) {
    const auto cnt = counting_function(S, Q0, d);
    const int mx = cnt.empty() ? 0 : *std::max_element(cnt.begin(), cnt.end());
    CountingDecay out;
    if (t_grid.empty()) {
        for (int t = 0; t <= mx; ++t) out.t.push_back(t);
    } else {
        out.t = t_grid;
    }
    for (double t : out.t) {
        long long n = 0;
        for (int v : cnt) n += v > t ? 1 : 0;
        out.measure.push_back(static_cast<double>(n) / static_cast<double>(Q0.len));
    }
    // linear fit of ln measure against t on points with positive measure
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < out.t.size(); ++i)
        if (out.measure[i] > 0) {
            xs.push_back(out.t[i]);
            ys.push_back(std::log(out.measure[i]));
        }
    out.fit.points = xs.size();
    if (xs.size() < 3) {
        out.fit.degenerate = true;
        return out;
    }
    const double n = static_cast<double>(xs.size());
    const double mxv = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double myv = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mxv) * (xs[i] - mxv);
        sxy += (xs[i] - mxv) * (ys[i] - myv);
        syy += (ys[i] - myv) * (ys[i] - myv);
    }
    if (sxx == 0 || syy == 0) {
        out.fit.degenerate = true;
        return out;
    }
    const double slope = sxy / sxx;
    out.fit.alpha = -slope;
    out.fit.c = std::exp(myv - slope * mxv);
    out.fit.r2 = sxy * sxy / (sxx * syy);
    return out;
}

SparseFamily random_sparse_family(const CellCube& Q0, int L, std::uint64_t seed, int max_depth_levels) {
    (void)L;
    std::mt19937_64 rng(seed);
    SparseFamily S;
    S.eta = 0.5;
    std::vector<CellCube> todo{Q0};
    const int floor_level = max_depth_levels < 0 ? std::numeric_limits<int>::max() : Q0.level + max_depth_levels;
    while (!todo.empty()) {
        const CellCube P = todo.back();
        todo.pop_back();
        S.cubes.push_back(P);
        int maxd = 0;
        while ((P.len >> (maxd + 1)) >= 1 && maxd < 3 && P.level + maxd + 1 <= floor_level) ++maxd;
        if (maxd == 0) continue;
        const int depth = std::uniform_int_distribution<int>(1, maxd)(rng);
        const long long slots = 1LL << depth;
        const long long count = std::uniform_int_distribution<long long>(1, slots / 2)(rng);
        std::vector<long long> idx(static_cast<std::size_t>(slots));
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(static_cast<std::size_t>(count));
        std::sort(idx.begin(), idx.end());
        for (auto it = idx.rbegin(); it != idx.rend(); ++it) todo.push_back(child_at(P, depth, *it));
    }
    return normalized(S);
}

SparseFamily nested_chain(const CellCube& Q0, int depth) {
    SparseFamily S;
    S.eta = 0.5;
    CellCube q = Q0;
    for (int k = 0; k <= depth && q.len >= 1; ++k) {
        S.cubes.push_back(q);
        if (q.len == 1) break;
        q = child_at(q, 1, 0);
    }
    return normalized(S);
}

SparseFamily top_levels(const Domain& d, int levels) {
    SparseFamily S;
    const auto N = static_cast<long long>(d.N());
    for (int k = 0; k < levels && k <= d.L; ++k) {
        const long long len = N >> k;
        for (long long q = 0; q < (1LL << k); ++q) S.cubes.push_back({0, k, q * len, len});
    }
    return normalized(S);
}

void write_family_csv(const SparseFamily& S, int L, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InputError("cannot write " + path);
    os << "lattice_id,level,index\n";
    for (const auto& c : S.cubes) {
        const DyadicCube q = from_cells(c, L);
        os << q.lattice_id << ',' << q.level << ',' << q.index.at(0) << '\n';
    }
}

SparseFamily read_family_csv(const std::string& path, int L) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot read " + path);
    std::string line;
    std::getline(is, line);
    if (line != "lattice_id,level,index") throw InputError("bad family CSV header in " + path);
    SparseFamily S;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        DyadicCube q;
        char c1 = 0, c2 = 0;
        long long idx = 0;
        if (!(ss >> q.lattice_id >> c1 >> q.level >> c2 >> idx) || c1 != ',' || c2 != ',') throw InputError("bad family CSV row: " + line);
        q.index = {idx};
        S.cubes.push_back(to_cells(q, L));
    }
    return normalized(S);
}

}  // namespace sh
