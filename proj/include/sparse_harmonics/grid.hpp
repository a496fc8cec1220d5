#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sh {

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Boundary { ZeroExtend, Clip };

struct Domain {
    double left = 0.0;
    double length = 1.0;
    int L = 10;
    Boundary boundary = Boundary::ZeroExtend;

    static Domain make(double left, double length, int L, Boundary b = Boundary::ZeroExtend);

    std::size_t N() const { return std::size_t{1} << L; }
    double h() const { return length / static_cast<double>(N()); }
    double right() const { return left + length; }
    double center(std::size_t i) const { return left + (static_cast<double>(i) + 0.5) * h(); }
    bool operator==(const Domain& o) const {
        return left == o.left && length == o.length && L == o.L && boundary == o.boundary;
    }
};

struct Interval {
    double a = 0.0;
    double b = 0.0;
    double length() const { return b - a; }
    bool contains(double x) const { return a <= x && x < b; }
};

// Piecewise-constant function on the cells of a Domain; samples are cell averages.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(const Domain& d, double fill = 0.0);
    GridFunction(const Domain& d, std::vector<double> samples);

    static GridFunction sample(const Domain& d, const std::function<double(double)>& f);
    // exact cell averages of f via its antiderivative F
    static GridFunction from_antiderivative(const Domain& d, const std::function<double(double)>& F);

    const Domain& domain() const { return dom_; }
    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }
    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double integral() const;
    // integral over an arbitrary interval; zero outside the domain
    double integral(const Interval& I) const;
    double max_abs() const;

    GridFunction abs() const;
    GridFunction map(const std::function<double(double)>& g) const;
    GridFunction& operator+=(const GridFunction& o);
    GridFunction& operator*=(double c);

private:
    Domain dom_;
    std::vector<double> v_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double c, GridFunction a);

// Long-double prefix sums for exact-ish interval integrals of cell data.
class PrefixSum {
public:
    PrefixSum() = default;
    explicit PrefixSum(const std::vector<double>& v);
    // sum of cells [i0, i1) clipped to the array
    long double cells(long long i0, long long i1) const;
    // integral in cell units over the real cell-coordinate interval [a, b)
    long double frac(double a, double b) const;
    std::size_t size() const { return v_.size(); }

private:
    std::vector<double> v_;
    std::vector<long double> p_;
};

// ---- dyadic geometry ----
//
// Lattice 0 is the base dyadic lattice rooted at the domain.  Lattices 1..3^n are the
// tripled lattices: lattice j has shift vector s (base-3 digits of j-1) and level-k cubes
// of side 3*len*2^-k with corners left + s*len + 3*len*2^-k*q.

struct DyadicCube {
    int lattice_id = 0;
    int level = 0;
    std::vector<long long> index;
    int n = 1;

    bool operator==(const DyadicCube& o) const {
        return lattice_id == o.lattice_id && level == o.level && index == o.index;
    }
    bool operator<(const DyadicCube& o) const;
};

struct DyadicLattice {
    int id = 0;
    std::vector<int> shift;
    int base_level = 0;
    int n = 1;
};

struct Box {
    std::vector<double> lo, hi;
};

// side length in cell units of a level-k cube of the given lattice
long long side_cells(int lattice_id, int level, int L);
// corner (cell units) of a cube along coordinate c
long long corner_cells(const DyadicCube& Q, int c, int L);
Box cube_box(const DyadicCube& Q, const Domain& d);
Interval cube_interval(const DyadicCube& Q, const Domain& d);

std::vector<DyadicCube> children(const DyadicCube& Q, const Domain& d);
Interval dilate(const DyadicCube& Q, double r, const Domain& d);
Box dilate_box(const DyadicCube& Q, double r, const Domain& d);

DyadicLattice base_lattice(int n);
std::vector<DyadicLattice> shifted_lattices(int n);

// the unique tripled lattice containing 3Q for a base cube Q, with the cube itself
DyadicCube triple_of(const DyadicCube& Q, int L);
// true if the box (in cell units) is a cube of the given lattice at some level 0..L
bool lattice_has_box(int lattice_id, const std::vector<long long>& corner, long long side, int L, int n);

// relationship between two cubes of one lattice
enum class Nesting { Disjoint, Inside, Contains, Equal };
Nesting nesting(const DyadicCube& A, const DyadicCube& B, int L);

// 1D cube as a cell range
struct CellCube {
    int lattice = 0;
    int level = 0;
    long long start = 0;  // first cell (may be negative)
    long long len = 1;    // number of cells
    long long end() const { return start + len; }
};

CellCube to_cells(const DyadicCube& Q, int L);
DyadicCube from_cells(const CellCube& c, int L);

enum class CubeScope { Dyadic, DyadicShifted };

// All cubes of the scope at levels 0..L. inside_only keeps cubes contained in the domain,
// otherwise cubes that intersect it.
std::vector<CellCube> cube_family(const Domain& d, CubeScope scope, bool inside_only);

// CSV helpers
void write_grid_csv(const GridFunction& f, const std::string& path);
GridFunction read_grid_csv(const std::string& path, const Domain& d);

}  // namespace sh
