#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparse_harmonics/grid.hpp"

namespace sh {

struct DimensionalConstants {
    int n = 1;
    double tau_n = 2.0;  // 2^n
    double C_n = 1.0;
    double c_n = 1.0;
};

// The cube family for every weight supremum: base and tripled lattices, cubes inside the domain.
std::vector<CellCube> weight_family(const Domain& d);

double a1_constant(const GridFunction& w);
double ap_constant(const GridFunction& w, double p);
double multi_ap_constant(const std::vector<GridFunction>& ws, const std::vector<double>& ps);
GridFunction nu_weight(const std::vector<GridFunction>& ws, const std::vector<double>& ps);

struct AInfty {
    double fujii_wilson = 0;
    double weak = 0;
};
AInfty ainfty_constants(const GridFunction& w);

class Weight {
public:
    explicit Weight(GridFunction w);
    const GridFunction& w() const { return w_; }
    double a1() const;
    double ap(double p) const;
    AInfty ainfty() const;

private:
    GridFunction w_;
    mutable std::optional<double> a1_;
    mutable std::map<double, double> ap_;
    mutable std::optional<AInfty> ainf_;
};

struct ReverseHolderReport {
    double r = 1;
    double weak = 0;
    double worst_ratio = 0;
    std::size_t cubes = 0;
    std::size_t violations = 0;
    CellCube worst{};
};
ReverseHolderReport reverse_holder_check(const GridFunction& w, const DimensionalConstants& dc = {});

GridFunction s_u(const GridFunction& f, const GridFunction& u);

struct RubioResult {
    GridFunction Rh;
    int terms = 0;
    double tail = 0;  // max_x of the last kept term over Rh
};
RubioResult rubio_de_francia(const GridFunction& h, const GridFunction& u, double K0, int J_max = 400, double tail_tol = 1e-8);

struct K0P0 {
    double p0 = 0, p0_prime = 0, K0 = 0;
};
K0P0 k0_p0(double t, double a1_u, double at_v, int m, const DimensionalConstants& dc = {});
// variant for v^(1/m) in A_p
K0P0 k0_p0_tilde(double p, double a1_u, double ap_v, int m, const DimensionalConstants& dc = {});
double unit_v_weak_constant(double a1_u, int m, const DimensionalConstants& dc = {});

struct PerturbedApReport {
    double lhs = 0, rhs = 0, eps_cap = 0;
    bool holds = false;
};
PerturbedApReport perturbed_ap_check(const GridFunction& u, const GridFunction& v, double p, double eps, const DimensionalConstants& dc = {});

// generators; singular weights are sampled at cell centres so they never hit the singular point
GridFunction power_weight(const Domain& d, double x0, double a);
GridFunction exp_weight(const Domain& d, double c = 1.0);
GridFunction step_weight(const Domain& d, const std::vector<double>& values);
GridFunction random_step_weight(const Domain& d, int pieces, std::uint64_t seed, double lo = 0.5, double hi = 4.0);
GridFunction spike_weight(const Domain& d, std::size_t cell, double height);

// log-space power with clamping to [1e-300, 1e300]
double safe_pow(double x, double e);

}  // namespace sh
