#pragma once

#include <vector>

#include "sparse_harmonics/grid.hpp"
#include "sparse_harmonics/orlicz.hpp"

namespace sh {

struct MaximalVariant {
    enum class Kind { HL, Power, Iterated, Orlicz, WeightedDyadic };
    Kind kind = Kind::HL;
    double r = 1.0;
    int k = 1;
    YoungFunction phi;
    const GridFunction* w = nullptr;
    CubeScope scope = CubeScope::DyadicShifted;

    static MaximalVariant hl(CubeScope s = CubeScope::DyadicShifted) { return {Kind::HL, 1.0, 1, {}, nullptr, s}; }
    static MaximalVariant power(double r, CubeScope s = CubeScope::DyadicShifted) { return {Kind::Power, r, 1, {}, nullptr, s}; }
    static MaximalVariant iterated(int k, CubeScope s = CubeScope::DyadicShifted) { return {Kind::Iterated, 1.0, k, {}, nullptr, s}; }
    static MaximalVariant orlicz(YoungFunction phi, CubeScope s = CubeScope::DyadicShifted) {
        return {Kind::Orlicz, 1.0, 1, std::move(phi), nullptr, s};
    }
    static MaximalVariant weighted_dyadic(const GridFunction& w) { return {Kind::WeightedDyadic, 1.0, 1, {}, &w, CubeScope::Dyadic}; }
};

GridFunction maximal(const GridFunction& f, const MaximalVariant& v);

enum class MultiFlavor { Plain, Power, LLogL, Mixed };
// Mixed(l): the first l slots use the L log L norm, the rest plain averages.
GridFunction multilinear_maximal(const std::vector<GridFunction>& fs, MultiFlavor flavor, double r = 1.0, int l = 0,
                                 CubeScope scope = CubeScope::DyadicShifted);

// cell range [i0, i1) of a cube clipped to the grid, and the divisor its averages use
struct CubeSpan {
    long long i0 = 0, i1 = 0;
    double denom = 0;   // in cell units
    double outside = 0; // zero-extended mass outside the domain, in cell units
};
CubeSpan cube_span(const CellCube& Q, const Domain& d);

}  // namespace sh
