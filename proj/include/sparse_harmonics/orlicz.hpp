#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sparse_harmonics/grid.hpp"

namespace sh {

struct YoungFunction {
    std::string name;
    std::function<double(double)> phi;
    std::function<double(double)> inverse;
    std::function<double(double)> complementary;
    bool complementary_closed = false;
    double i_lower = std::numeric_limits<double>::quiet_NaN();
    double I_upper = std::numeric_limits<double>::quiet_NaN();
    bool indices_closed = false;
    double delta2_C1 = std::numeric_limits<double>::infinity();
    bool submultiplicative = false;
    bool n_function = false;

    double operator()(double t) const { return phi(t); }
};

// c * t^p
YoungFunction power_young(double p, double c = 1.0);
// t^p * log(e + t)^alpha
YoungFunction llogl_young(double alpha = 1.0, double p = 1.0);
// exp(t^s) - 1
YoungFunction expl_young(double s);
// t -> phi(t)^m
YoungFunction power_of(const YoungFunction& f, int m);

double numeric_inverse(const std::function<double(double)>& phi, double y);
// sup_s (s t - phi(s)): 4096 log-spaced s, then golden-section refinement of the best bracket
double numeric_complementary(const std::function<double(double)>& phi, double t);
YoungFunction numeric_complement_of(const YoungFunction& f);

struct Measure {
    const GridFunction* w = nullptr;  // null: Lebesgue
    static Measure lebesgue() { return {}; }
    static Measure weighted(const GridFunction& w);
};

// Luxemburg gauge of values a_i >= 0 with nonnegative masses m_i.
double luxemburg_values(const double* a, const double* m, std::size_t n, const YoungFunction& f, double inv_one);

double average(const GridFunction& f, const Interval& Q, double r = 1.0);
double measure_of(const Interval& Q, const Domain& d, const Measure& mu);
double luxemburg_norm(const GridFunction& f, const YoungFunction& phi, const Interval& Q, const Measure& mu = {});

struct HolderResult {
    double lhs = 0, rhs = 0, ratio = 0, constant = 0;
    std::vector<double> f_norms;
    double g_norm = 0;
};
HolderResult generalized_holder(const std::vector<GridFunction>& fs, const GridFunction& g, const Interval& Q,
                                const GridFunction& w, const std::vector<double>& s);

struct YoungPairViolation {
    std::string inequality;
    double s = 0, t = 0, lhs = 0, rhs = 0;
};
struct YoungPairReport {
    std::size_t checks = 0;
    std::vector<YoungPairViolation> violations;
    bool ok() const { return violations.empty(); }
};
YoungPairReport young_pair_checks(const YoungFunction& phi, const std::vector<double>& t_grid, double slack = 1e-9);

// h_phi(t) = sup_s phi(st)/phi(s) over a log-spaced s grid
double dilation_function(const YoungFunction& phi, double t);
struct DilationIndices {
    double i_lower = 0, I_upper = 0;
};
// closed forms for built-ins; numeric probes at t0 = 1e-6 and 1e6 otherwise
DilationIndices dilation_indices(const YoungFunction& phi, bool force_numeric = false);
double delta2_constant_numeric(const YoungFunction& phi);
// smallest alpha in (0,1] (grid step 0.01) with phibar^alpha(t)/t nondecreasing on a log grid
double quasi_convex_exponent(const YoungFunction& phi);

std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace sh
