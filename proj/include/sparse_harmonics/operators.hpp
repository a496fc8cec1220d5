#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sparse_harmonics/grid.hpp"

namespace sh {

enum class OperatorKind { Hilbert, Calderon, Stein };

struct KernelOperator {
    OperatorKind kind = OperatorKind::Hilbert;
    int m = 1;            // Calderon order: the operator takes m+1 functions
    int pv_cutoff = 1;    // cells skipped around the diagonal (|i-j| < pv_cutoff)
    double alpha = 2.0;   // Stein only

    static KernelOperator hilbert(int pv_cutoff = 1) { return {OperatorKind::Hilbert, 1, pv_cutoff, 2.0}; }
    static KernelOperator calderon(int m) { return {OperatorKind::Calderon, m, 1, 2.0}; }
    static KernelOperator stein(double alpha) { return {OperatorKind::Stein, 1, 1, alpha}; }
    int arity() const { return kind == OperatorKind::Calderon ? m + 1 : 1; }
    std::string name() const;
};

// (1/pi) p.v. integral against 1/(x-y), evaluated at cell centres with the kernel integrated
// exactly over each source cell
GridFunction hilbert_transform(const GridFunction& f, int pv_cutoff = 1);
// kernel weights k(d) for source offset d = i - j
double hilbert_cell_kernel(long long d);

double calderon_kernel(double x, const std::vector<double>& y);
GridFunction calderon_apply(const std::vector<GridFunction>& f);

GridFunction stein_square_function(const GridFunction& f, double alpha, int t_points = 128);

GridFunction apply_operator(const KernelOperator& T, const std::vector<GridFunction>& f);

// symbol b attached to input slot `slot` (0-based) with multiplicity `power`
struct Symbol {
    GridFunction b;
    int slot = 0;
    int power = 1;
};

// kernel form: the integral with prod_s (b_s(x) - b_s(y_slot))^power inside
GridFunction iterated_commutator(const KernelOperator& T, const std::vector<Symbol>& syms, const std::vector<GridFunction>& f);
// first-order algebraic form b(x) T(f)(x) - T(.., b f_slot, ..)(x)
GridFunction commutator_algebraic(const KernelOperator& T, const GridFunction& b, int slot, const std::vector<GridFunction>& f);

double bmo_norm(const GridFunction& b);
double weighted_bmo_norm(const GridFunction& b, const GridFunction& w, double p);

// int_0^1 omega(t)^a / t * (1 + log(1/t))^m dt; +inf when the integrand is not integrable at 0
double log_dini_norm(const std::function<double(double)>& omega, double a, int m);

// sup over dyadic cubes of ||b - <b>_Q||_{exp L(w), Q} / ([w]_{A_inf} ||b||_BMO)
double john_nirenberg_ratio(const GridFunction& b, const GridFunction& w);

}  // namespace sh
