#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparse_harmonics/grid.hpp"
#include "sparse_harmonics/operators.hpp"
#include "sparse_harmonics/orlicz.hpp"
#include "sparse_harmonics/sparse.hpp"
#include "sparse_harmonics/weights.hpp"

namespace sh {

// ---- Lorentz quasinorms ----

// sup_lambda lambda * mu(|f| > lambda)^{1/p}, exact over the sample values
double lorentz_weak(const GridFunction& f, double p, const Measure& mu = {});
// p * int_0^inf mu(|f| > lambda)^{1/p} d lambda
double lorentz_one(const GridFunction& f, double p, const Measure& mu = {});
// log of the weak quasinorm from |values| and log cell masses; zero values are ignored
double log_lorentz_weak(const std::vector<double>& abs_values, const std::vector<double>& log_mass, double p);

// ---- decay fits ----

struct ExponentFit {
    double c = 0, alpha = 0, p = 0, r2 = 0;
    std::size_t points = 0;
    bool degenerate = true;
};
// least squares for ln phi = ln c - alpha t^p over points with phi in [lo, hi]
ExponentFit fit_exponent(const std::vector<double>& t, const std::vector<double>& phi, double lo = 1e-4, double hi = 0.5);

struct DecayCurve {
    std::vector<double> t, measure;
    ExponentFit fit;
    double model(double tt) const;
};
void write_curve_csv(const DecayCurve& c, const std::string& path);

// ---- reports ----

enum class Verdict { Holds, HoldsWithMargin, Violated, Degenerate };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);
// ratio <= 1: holds-with-margin; <= slack: holds; non-finite or rhs = 0 < lhs: degenerate
Verdict ratio_verdict(double lhs, double rhs, double ratio, double slack);

struct HarnessOptions {
    double slack = 10.0;
    std::uint64_t seed = 0;
    DimensionalConstants dc{};
};

struct VerificationReport {
    std::string id;
    nlohmann::json params = nlohmann::json::object();
    double lhs = 0, rhs = 0, ratio = 0;
    nlohmann::json constants = nlohmann::json::object();
    std::optional<ExponentFit> fit;
    Verdict verdict = Verdict::Degenerate;
    nlohmann::json env = nlohmann::json::object();

    nlohmann::json to_json() const;
};

// ---- commutator specification ----

// T with symbol b[s] in input slot s, s < l = b.size()
struct CommutatorSpec {
    KernelOperator T;
    std::vector<GridFunction> b;
    int l() const { return static_cast<int>(b.size()); }
};
GridFunction evaluate(const CommutatorSpec& spec, const std::vector<GridFunction>& f);
double bmo_product(const CommutatorSpec& spec);

// ---- local decay ----

enum class Comparator { MixedMin, LLogL, Iterated };

struct DecayOptions {
    std::vector<double> t_grid;  // empty: 24 log points in [0.5, 50] * prod ||b_s||
    Comparator comparator = Comparator::MixedMin;
    const GridFunction* w = nullptr;
    HarnessOptions opt{};
};

struct DecayResult {
    DecayCurve curve;
    VerificationReport report;
};

// principal cubes of the base lattice below Q0: a descendant R of a selected P is selected when
// <|g|>_R > factor <|g|>_P
SparseFamily principal_cubes(const GridFunction& g, const CellCube& Q0, double factor = 2.0);
// sum_{R in S} <|f|>_{3R} chi_{3R}
GridFunction tripled_sparse_average(const SparseFamily& S, const GridFunction& f);

DecayResult local_decay_experiment(const CommutatorSpec& spec, const std::vector<GridFunction>& f, const CellCube& Q0,
                                   const DecayOptions& o);

struct SharpnessOptions {
    int L = 14;
    std::string symbol = "log";  // log | sin
    std::vector<double> t_grid;  // empty: default grid (log) or a grid reaching max|T_b f| (sin)
    HarnessOptions opt{};
};
DecayResult sharpness_experiment(const SharpnessOptions& o = {});

// ---- norm inequalities ----

VerificationReport coifman_fefferman_experiment(const CommutatorSpec& spec, const std::vector<GridFunction>& f, double p,
                                                const Weight& w, const HarnessOptions& o = {});

struct MixedWeakResult {
    VerificationReport general;
    std::optional<VerificationReport> unweighted_v;  // v = 1 specialization
};
MixedWeakResult mixed_weak_experiment(const CommutatorSpec& spec, const std::vector<GridFunction>& f,
                                      const std::vector<GridFunction>& ws, const GridFunction& v, double t,
                                      const HarnessOptions& o = {});

VerificationReport fefferman_stein_experiment(const CommutatorSpec& spec, const std::vector<GridFunction>& f,
                                              const std::vector<double>& ps, const std::vector<GridFunction>& ws,
                                              const HarnessOptions& o = {});

VerificationReport modular_experiment(const CommutatorSpec& spec, const std::vector<GridFunction>& f, const YoungFunction& phi,
                                      double q, double r, const Weight& w, const HarnessOptions& o = {});

// ---- named generators ----

// one | power:x0:a | exp:c | step:v1:v2:... | random_step:pieces:seed | spike:cell:height
GridFunction make_weight(const std::string& spec, const Domain& d);
// indicator:a:b | bump:c:r | steps:pieces:seed | wave:k | bumps:seed[:a:b] | zero
GridFunction make_function(const std::string& spec, const Domain& d);
// log:x0 | sin:k | abs:x0 | const:c | steps:pieces:seed
GridFunction make_symbol(const std::string& spec, const Domain& d);
// hilbert[:pv] | calderon:m | stein:alpha
KernelOperator make_operator(const std::string& spec);
// power:p[:c] | llogl:alpha[:p] | expl:s
YoungFunction make_young(const std::string& spec);

// weight -> constants table, one row per (weight, p)
struct ConstantsRow {
    std::string weight;
    double p = 0, ap = 0, a1 = 0, fujii_wilson = 0, weak = 0;
};
std::vector<ConstantsRow> constants_table(const std::vector<std::string>& bank, const Domain& d, const std::vector<double>& ps);
std::string constants_csv(const std::vector<ConstantsRow>& rows);

// runs jobs on up to `jobs` threads; results land in submission order
void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& job);

}  // namespace sh
