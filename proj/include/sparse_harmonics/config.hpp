#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparse_harmonics/harness.hpp"

namespace sh {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One experiment per file, INI sections:
//   [experiment] kind seed slack
//   [grid]       left length L boundary
//   [operator]   spec symbols
//   [inputs]     functions weight weights v bank
//   [params]     p t p_s phi q r comparator q0 symbol t_grid ps
//   [dimension]  n tau_n C_n c_n
// "{seed}" inside a generator spec is replaced by the resolved seed.
struct ExperimentConfig {
    std::string kind = "cf";  // decay | cf | mixed | fs | modular | constants | sharpness
    std::uint64_t seed = 0;
    double slack = 10.0;

    double left = 0.0, length = 1.0;
    int L = 10;
    std::string boundary = "zero-extend";

    std::string op = "hilbert";
    std::vector<std::string> symbols;

    std::vector<std::string> functions;
    std::string weight;  // cf, modular, weighted decay
    std::vector<std::string> weights;
    std::string v = "one";
    std::vector<std::string> bank;

    double p = 1.0, t = 2.0, q = 1.2, r = 1.5;
    std::vector<double> p_s;
    std::string phi = "power:2";
    std::string comparator = "mixed-min";
    std::string q0 = "0:0";  // level:index of a base dyadic cube
    std::string symbol = "log";
    std::vector<double> t_grid;
    std::vector<double> ps{1.5, 2.0, 3.0};

    DimensionalConstants dc{};

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string to_ini() const;
    nlohmann::json to_json() const;
    bool operator==(const ExperimentConfig& o) const { return to_ini() == o.to_ini(); }

    Domain domain() const;
    std::string resolve(const std::string& spec) const;  // substitutes {seed}
};

struct RunOutcome {
    std::vector<VerificationReport> reports;
    std::vector<DecayCurve> curves;
    std::string constants_csv;
    int exit_code = 0;
};

// 0 when every verdict is holds / holds-with-margin, 4 if any is violated, else 3 if any is degenerate
int exit_code_for(const std::vector<VerificationReport>& reports);

RunOutcome run_experiment(const ExperimentConfig& cfg);
// writes report.json, plus curves.csv and plot.svg (decay kinds) or constants.csv (constants)
void write_artifacts(const ExperimentConfig& cfg, const RunOutcome& out, const std::string& dir);

std::string decay_svg(const std::vector<DecayCurve>& curves, const std::vector<std::string>& labels);
std::string ratio_svg(const std::vector<VerificationReport>& reports);

}  // namespace sh
