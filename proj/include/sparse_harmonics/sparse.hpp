#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparse_harmonics/grid.hpp"

namespace sh {

struct SparseFamily {
    std::vector<CellCube> cubes;  // one lattice per family
    double eta = 0.5;
};

struct SparseCheck {
    bool is_sparse = false;
    double best_eta = 1.0;      // min |E(Q)|/|Q| with E(Q) = Q minus the union of proper subcubes
    double carleson = 0.0;      // sup_Q (1/|Q|) sum_{P subset Q} |P|
    double carleson_eta = 1.0;  // 1/carleson: the largest eta admitting disjoint owned sets of mass eta|Q|
    CellCube worst{};
};

// sorts, removes duplicates; throws InputError on mixed lattices
SparseFamily normalized(SparseFamily S);
SparseCheck verify_sparse(const SparseFamily& S);

// Fractional owned sets for a Carleson family: share[i] is, for each cube, a list of
// (cell, mass) pieces with total eta|Q| and each cell used at most once overall.
struct OwnedSets {
    double eta = 0;
    std::vector<std::vector<std::pair<long long, double>>> pieces;
};
OwnedSets carleson_owned_sets(const SparseFamily& S, double eta);

// sum_Q <|f|^r>_{dil Q}^{1/r} chi_Q
GridFunction sparse_operator(const SparseFamily& S, double r, const GridFunction& f, double dilation = 1.0);

enum class SparseFormVariant { Global, Local3Q };
// sum_Q prod_{s<l} U(b_s,f_s,Q,gamma_s) prod_{s>=l} <|f_s|> chi_Q; b.size() = l <= f.size() = m
GridFunction commutator_sparse_form(const SparseFamily& S, const std::vector<GridFunction>& b, const std::vector<GridFunction>& f,
                                    const std::vector<int>& gamma, SparseFormVariant variant);
// the same summed over all gamma in {1,2}^l
GridFunction commutator_sparse_form_all(const SparseFamily& S, const std::vector<GridFunction>& b, const std::vector<GridFunction>& f,
                                        SparseFormVariant variant);

struct OscillationResult {
    SparseFamily family;
    std::size_t added = 0;
    double constant = 8.0;        // 2^{n+2}
    double worst_ratio = 0.0;     // max over (Q, x) of |b(x)-<b>_Q| / (constant * sum ...)
    std::size_t violations = 0;
    bool certificate = false;
};
OscillationResult oscillation_sparse(const GridFunction& b, const SparseFamily& S);

struct LinearDecayFit {
    double c = 0, alpha = 0, r2 = 0;
    std::size_t points = 0;
    bool degenerate = false;
};
struct CountingDecay {
    std::vector<double> t, measure;  // measure normalized by |Q0|
    LinearDecayFit fit;
};
std::vector<int> counting_function(const SparseFamily& S, const CellCube& Q0, const Domain& d);
CountingDecay counting_decay(const SparseFamily& S, const CellCube& Q0, const Domain& d, const std::vector<double>& t_grid = {});

// Random 1/2-sparse family below Q0: each selected cube picks a depth in {1,2,3} and between 1 and
// 2^{depth-1} descendants at that depth, recursively down to the cell level.
SparseFamily random_sparse_family(const CellCube& Q0, int L, std::uint64_t seed, int max_depth_levels = -1);
SparseFamily nested_chain(const CellCube& Q0, int depth);
SparseFamily top_levels(const Domain& d, int levels);

void write_family_csv(const SparseFamily& S, int L, const std::string& path);
SparseFamily read_family_csv(const std::string& path, int L);

bool contains(const CellCube& A, const CellCube& B);  // B inside A

}  // namespace sh
