#include "sparse_harmonics/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sh {

Domain Domain::make(double left, double length, int L, Boundary b) {
    if (!(length > 0.0) || !std::isfinite(left) || !std::isfinite(length))
        throw InputError("domain length must be positive and finite");
    if (L < 1 || L > 24) throw InputError("resolution_log2 must lie in [1, 24]");
    return Domain{left, length, L, b};
}

GridFunction::GridFunction(const Domain& d, double fill) : dom_(d), v_(d.N(), fill) {}

GridFunction::GridFunction(const Domain& d, std::vector<double> samples) : dom_(d), v_(std::move(samples)) {
    if (v_.size() != d.N()) throw InputError("sample count does not match grid size");
    for (double x : v_)
        if (!std::isfinite(x)) throw InputError("non-finite sample");
}

GridFunction GridFunction::sample(const Domain& d, const std::function<double(double)>& f) {
    GridFunction g(d);
    for (std::size_t i = 0; i < d.N(); ++i) g.v_[i] = f(d.center(i));
    return g;
}

GridFunction GridFunction::from_antiderivative(const Domain& d, const std::function<double(double)>& F) {
    GridFunction g(d);
    const double h = d.h();
    for (std::size_t i = 0; i < d.N(); ++i) {
        double a = d.left + static_cast<double>(i) * h;
        g.v_[i] = (F(a + h) - F(a)) / h;
    }
    return g;
}

double GridFunction::integral() const {
    long double s = 0;
    for (double x : v_) s += x;
    return static_cast<double>(s) * dom_.h();
}

double GridFunction::integral(const Interval& I) const {
    const double h = dom_.h();
    double a = (I.a - dom_.left) / h, b = (I.b - dom_.left) / h;
    a = std::max(a, 0.0);
    b = std::min(b, static_cast<double>(v_.size()));
    if (b <= a) return 0.0;
    long double s = 0;
    auto i0 = static_cast<long long>(std::floor(a));
    auto i1 = static_cast<long long>(std::ceil(b));
    for (long long i = i0; i < i1; ++i) {
        double lo = std::max(a, static_cast<double>(i)), hi = std::min(b, static_cast<double>(i + 1));
        if (hi > lo) s += static_cast<long double>(v_[static_cast<std::size_t>(i)]) * (hi - lo);
    }
    return static_cast<double>(s) * h;
}

double GridFunction::max_abs() const {
    double m = 0;
    for (double x : v_) m = std::max(m, std::fabs(x));
    return m;
}

GridFunction GridFunction::abs() const {
    return map([](double x) { return std::fabs(x); });
}

GridFunction GridFunction::map(const std::function<double(double)>& g) const {
    GridFunction r(dom_);
    for (std::size_t i = 0; i < v_.size(); ++i) r.v_[i] = g(v_[i]);
    return r;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
    if (!(o.dom_ == dom_)) throw InputError("domain mismatch");
    for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    GridFunction r = a;
    if (!(a.domain() == b.domain())) throw InputError("domain mismatch");
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

GridFunction operator*(const GridFunction& a, const GridFunction& b) {
    if (!(a.domain() == b.domain())) throw InputError("domain mismatch");
    GridFunction r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] *= b[i];
    return r;
}

GridFunction operator*(double c, GridFunction a) { return a *= c; }

PrefixSum::PrefixSum(const std::vector<double>& v) : v_(v), p_(v.size() + 1, 0.0L) {
    for (std::size_t i = 0; i < v.size(); ++i) p_[i + 1] = p_[i] + static_cast<long double>(v[i]);
}

long double PrefixSum::cells(long long i0, long long i1) const {
    const auto n = static_cast<long long>(v_.size());
    i0 = std::clamp(i0, 0LL, n);
    i1 = std::clamp(i1, 0LL, n);
    if (i1 <= i0) return 0.0L;
    return p_[static_cast<std::size_t>(i1)] - p_[static_cast<std::size_t>(i0)];
}

long double PrefixSum::frac(double a, double b) const {
    const double n = static_cast<double>(v_.size());
    a = std::max(a, 0.0);
    b = std::min(b, n);
    if (b <= a) return 0.0L;
    auto ia = static_cast<long long>(std::ceil(a));
    auto ib = static_cast<long long>(std::floor(b));
    if (ib < ia) {  // inside one cell
        auto c = static_cast<std::size_t>(std::floor(a));
        return static_cast<long double>(v_[c]) * (b - a);
    }
    long double s = cells(ia, ib);
    if (static_cast<double>(ia) > a) s += static_cast<long double>(v_[static_cast<std::size_t>(ia - 1)]) * (ia - a);
    if (static_cast<double>(ib) < b) s += static_cast<long double>(v_[static_cast<std::size_t>(ib)]) * (b - ib);
    return s;
}

// ---- dyadic geometry ----

bool DyadicCube::operator<(const DyadicCube& o) const {
    if (lattice_id != o.lattice_id) return lattice_id < o.lattice_id;
    if (level != o.level) return level < o.level;
    return index < o.index;
}

static long long ipow3(int n) {
    long long r = 1;
    for (int i = 0; i < n; ++i) r *= 3;
    return r;
}

static std::vector<int> shift_digits(int lattice_id, int n) {
    std::vector<int> s(static_cast<std::size_t>(n), 0);
    int j = lattice_id - 1;
    for (int c = 0; c < n; ++c) {
        s[static_cast<std::size_t>(c)] = j % 3;
        j /= 3;
    }
    return s;
}

long long side_cells(int lattice_id, int level, int L) {
    long long base = 1LL << (L - level);
    return lattice_id == 0 ? base : 3 * base;
}

long long corner_cells(const DyadicCube& Q, int c, int L) {
    const long long side = side_cells(Q.lattice_id, Q.level, L);
    long long off = 0;
    if (Q.lattice_id != 0) off = static_cast<long long>(shift_digits(Q.lattice_id, Q.n)[static_cast<std::size_t>(c)]) << L;
    return off + side * Q.index[static_cast<std::size_t>(c)];
}

Box cube_box(const DyadicCube& Q, const Domain& d) {
    Box b;
    const double h = d.h();
    const long long side = side_cells(Q.lattice_id, Q.level, d.L);
    for (int c = 0; c < Q.n; ++c) {
        double lo = d.left + static_cast<double>(corner_cells(Q, c, d.L)) * h;
        b.lo.push_back(lo);
        b.hi.push_back(lo + static_cast<double>(side) * h);
    }
    return b;
}

Interval cube_interval(const DyadicCube& Q, const Domain& d) {
    if (Q.n != 1) throw InputError("cube_interval requires n = 1");
    Box b = cube_box(Q, d);
    return {b.lo[0], b.hi[0]};
}

std::vector<DyadicCube> children(const DyadicCube& Q, const Domain& d) {
    if (Q.level >= d.L) throw ResolutionError("cube at level " + std::to_string(Q.level) + " has no children on a 2^" + std::to_string(d.L) + " grid");
    std::vector<DyadicCube> out;
    const long long count = 1LL << Q.n;
    for (long long m = 0; m < count; ++m) {
        DyadicCube c{Q.lattice_id, Q.level + 1, Q.index, Q.n};
        for (int k = 0; k < Q.n; ++k) c.index[static_cast<std::size_t>(k)] = 2 * Q.index[static_cast<std::size_t>(k)] + ((m >> k) & 1);
        out.push_back(std::move(c));
    }
    return out;
}

Box dilate_box(const DyadicCube& Q, double r, const Domain& d) {
    if (!(r > 0)) throw ParameterError("dilation factor must be positive");
    Box b = cube_box(Q, d);
    for (std::size_t c = 0; c < b.lo.size(); ++c) {
        double mid = 0.5 * (b.lo[c] + b.hi[c]);
        double half = 0.5 * r * (b.hi[c] - b.lo[c]);
        b.lo[c] = mid - half;
        b.hi[c] = mid + half;
        if (d.boundary == Boundary::Clip) {
            b.lo[c] = std::max(b.lo[c], d.left);
            b.hi[c] = std::min(b.hi[c], d.right());
        }
    }
    return b;
}

Interval dilate(const DyadicCube& Q, double r, const Domain& d) {
    if (Q.n != 1) throw InputError("dilate requires n = 1; use dilate_box");
    Box b = dilate_box(Q, r, d);
    return {b.lo[0], b.hi[0]};
}

DyadicLattice base_lattice(int n) { return DyadicLattice{0, std::vector<int>(static_cast<std::size_t>(n), 0), 0, n}; }

std::vector<DyadicLattice> shifted_lattices(int n) {
    if (n < 1) throw InputError("dimension must be >= 1");
    std::vector<DyadicLattice> out;
    const long long count = ipow3(n);
    for (long long j = 1; j <= count; ++j) out.push_back({static_cast<int>(j), shift_digits(static_cast<int>(j), n), 0, n});
    return out;
}

static long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}
static long long pos_mod(long long a, long long m) {
    long long r = a % m;
    return r < 0 ? r + m : r;
}

DyadicCube triple_of(const DyadicCube& Q, int L) {
    if (Q.lattice_id != 0) throw InputError("triple_of expects a base-lattice cube");
    const long long pk = 1LL << Q.level;
    int id_minus1 = 0, mult = 1;
    std::vector<long long> idx(static_cast<std::size_t>(Q.n));
    for (int c = 0; c < Q.n; ++c) {
        long long i = Q.index[static_cast<std::size_t>(c)];
        // s * 2^k == (i-1) (mod 3)  and 2^k is its own inverse mod 3
        long long s = pos_mod((i - 1) * pos_mod(pk, 3), 3);
        id_minus1 += static_cast<int>(s) * mult;
        mult *= 3;
        long long num = (i - 1) - s * pk;
        idx[static_cast<std::size_t>(c)] = floor_div(num, 3);
    }
    (void)L;
    return DyadicCube{id_minus1 + 1, Q.level, idx, Q.n};
}

bool lattice_has_box(int lattice_id, const std::vector<long long>& corner, long long side, int L, int n) {
    for (int k = 0; k <= L; ++k) {
        if (side_cells(lattice_id, k, L) != side) continue;
        for (int c = 0; c < n; ++c) {
            long long off = 0;
            if (lattice_id != 0) off = static_cast<long long>(shift_digits(lattice_id, n)[static_cast<std::size_t>(c)]) << L;
            if (pos_mod(corner[static_cast<std::size_t>(c)] - off, side) != 0) return false;
        }
        return true;
    }
    return false;
}

Nesting nesting(const DyadicCube& A, const DyadicCube& B, int L) {
    if (A.lattice_id != B.lattice_id) throw InputError("nesting requires cubes of one lattice");
    const long long sa = side_cells(A.lattice_id, A.level, L), sb = side_cells(B.lattice_id, B.level, L);
    bool a_in_b = true, b_in_a = true, disjoint = false;
    for (int c = 0; c < A.n; ++c) {
        long long a0 = corner_cells(A, c, L), b0 = corner_cells(B, c, L);
        long long a1 = a0 + sa, b1 = b0 + sb;
        if (a1 <= b0 || b1 <= a0) disjoint = true;
        if (!(b0 <= a0 && a1 <= b1)) a_in_b = false;
        if (!(a0 <= b0 && b1 <= a1)) b_in_a = false;
    }
    if (disjoint) return Nesting::Disjoint;
    if (a_in_b && b_in_a) return Nesting::Equal;
    if (a_in_b) return Nesting::Inside;
    if (b_in_a) return Nesting::Contains;
    throw std::logic_error("cubes of one lattice overlap without nesting");
}

CellCube to_cells(const DyadicCube& Q, int L) {
    if (Q.n != 1) throw InputError("to_cells requires n = 1");
    return CellCube{Q.lattice_id, Q.level, corner_cells(Q, 0, L), side_cells(Q.lattice_id, Q.level, L)};
}

DyadicCube from_cells(const CellCube& c, int L) {
    long long off = c.lattice == 0 ? 0 : static_cast<long long>(c.lattice - 1) << L;
    return DyadicCube{c.lattice, c.level, {floor_div(c.start - off, c.len)}, 1};
}

std::vector<CellCube> cube_family(const Domain& d, CubeScope scope, bool inside_only) {
    std::vector<CellCube> out;
    const auto N = static_cast<long long>(d.N());
    for (int k = 0; k <= d.L; ++k) {
        long long side = 1LL << (d.L - k);
        for (long long q = 0; q * side < N; ++q) out.push_back({0, k, q * side, side});
    }
    if (scope == CubeScope::Dyadic) return out;
    for (int j = 1; j <= 3; ++j) {
        const long long off = static_cast<long long>(j - 1) * N;
        for (int k = 0; k <= d.L; ++k) {
            long long side = 3 * (1LL << (d.L - k));
            long long qmin = floor_div(-side + 1 - off, side), qmax = floor_div(N - 1 - off, side);
            for (long long q = qmin; q <= qmax; ++q) {
                long long s = off + q * side;
                if (s + side <= 0 || s >= N) continue;
                if (inside_only && (s < 0 || s + side > N)) continue;
                out.push_back({j, k, s, side});
            }
        }
    }
    return out;
}

void write_grid_csv(const GridFunction& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw InputError("cannot write " + path);
    os << "x,value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < f.size(); ++i) os << f.domain().center(i) << ',' << f[i] << '\n';
}

GridFunction read_grid_csv(const std::string& path, const Domain& d) {
    std::ifstream is(path);
    if (!is) throw InputError("cannot read " + path);
    std::string line;
    std::getline(is, line);
    if (line != "x,value") throw InputError("bad grid CSV header in " + path);
    std::vector<double> v;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw InputError("bad grid CSV row in " + path);
        v.push_back(std::stod(line.substr(comma + 1)));
    }
    return GridFunction(d, std::move(v));
}

}  // namespace sh
