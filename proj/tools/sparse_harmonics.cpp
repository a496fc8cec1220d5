#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparse_harmonics/config.hpp"

namespace fs = std::filesystem;
using namespace sh;

namespace {

constexpr double kTol = 1e-9;

void apply_seed_override(ExperimentConfig& cfg) {
    if (const char* s = std::getenv("SPARSE_HARMONICS_SEED")) {
        try {
            cfg.seed = std::stoull(s);
        } catch (const std::exception&) {
            throw ConfigError(std::string("SPARSE_HARMONICS_SEED is not an integer: ") + s);
        }
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool close(double a, double b) {
    if (a == b) return true;
    if (std::isnan(a) && std::isnan(b)) return true;
    return std::fabs(a - b) <= kTol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

void diff_json(const nlohmann::json& a, const nlohmann::json& b, const std::string& path, std::vector<std::string>& out) {
    if (a.is_number() && b.is_number()) {
        if (!close(a.get<double>(), b.get<double>()))
            out.push_back(path + ": " + a.dump() + " vs " + b.dump());
        return;
    }
    if (a.type() != b.type()) {
        out.push_back(path + ": type differs");
        return;
    }
    if (a.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key()))
                out.push_back(path + "/" + it.key() + ": missing in current run");
            else
                diff_json(it.value(), b[it.key()], path + "/" + it.key(), out);
        }
        for (auto it = b.begin(); it != b.end(); ++it)
            if (!a.contains(it.key())) out.push_back(path + "/" + it.key() + ": not in golden");
    } else if (a.is_array()) {
        if (a.size() != b.size()) {
            out.push_back(path + ": length " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
            return;
        }
        for (std::size_t i = 0; i < a.size(); ++i) diff_json(a[i], b[i], path + "/" + std::to_string(i), out);
    } else if (a != b) {
        out.push_back(path + ": " + a.dump() + " vs " + b.dump());
    }
}

bool parse_num(const std::string& s, double& v) {
    try {
        std::size_t used = 0;
        v = std::stod(s, &used);
        return used == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

void diff_csv(const std::string& a, const std::string& b, const std::string& name, std::vector<std::string>& out) {
    std::istringstream sa(a), sb(b);
    std::string la, lb;
    int line = 0;
    while (true) {
        const bool ga = static_cast<bool>(std::getline(sa, la)), gb = static_cast<bool>(std::getline(sb, lb));
        ++line;
        if (!ga && !gb) break;
        if (ga != gb) {
            out.push_back(name + ": row count differs");
            return;
        }
        std::vector<std::string> ca, cb;
        std::stringstream xa(la), xb(lb);
        for (std::string c; std::getline(xa, c, ',');) ca.push_back(c);
        for (std::string c; std::getline(xb, c, ',');) cb.push_back(c);
        if (ca.size() != cb.size()) {
            out.push_back(name + ":" + std::to_string(line) + ": column count differs");
            continue;
        }
        for (std::size_t i = 0; i < ca.size(); ++i) {
            double va, vb;
            const bool na = parse_num(ca[i], va), nb = parse_num(cb[i], vb);
            if (na && nb ? !close(va, vb) : ca[i] != cb[i])
                out.push_back(name + ":" + std::to_string(line) + ":" + std::to_string(i + 1) + ": " + ca[i] + " vs " + cb[i]);
        }
    }
}

struct Fixture {
    std::string name;
    fs::path dir;
};

std::vector<Fixture> find_fixtures(const fs::path& root) {
    if (!fs::is_directory(root)) throw ConfigError("fixture directory not found: " + root.string());
    std::vector<Fixture> out;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory() && fs::exists(e.path() / "config.ini")) out.push_back({e.path().filename().string(), e.path()});
    std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.name < b.name; });
    return out;
}

std::vector<std::string> golden_files(const ExperimentConfig& cfg) {
    std::vector<std::string> g{"report.json"};
    if (cfg.kind == "decay" || cfg.kind == "sharpness") g.push_back("curves.csv");
    if (cfg.kind == "constants") g.push_back("constants.csv");
    return g;
}

int report_error(const std::exception& e) {
    if (dynamic_cast<const ParameterError*>(&e)) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    }
    if (dynamic_cast<const ConfigError*>(&e)) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const ResolutionError*>(&e)) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
}

int cmd_run(const std::string& config, const std::string& out_dir) {
    ExperimentConfig cfg = ExperimentConfig::load(config);
    apply_seed_override(cfg);
    const RunOutcome out = run_experiment(cfg);
    write_artifacts(cfg, out, out_dir);
    for (const auto& r : out.reports) {
        std::cout << r.id << ": " << to_string(r.verdict) << "  ratio=" << r.ratio;
        if (r.fit) std::cout << "  p_fit=" << r.fit->p << "  r2=" << r.fit->r2;
        std::cout << "\n";
    }
    if (cfg.kind == "constants") std::cout << "constants written to " << (fs::path(out_dir) / "constants.csv").string() << "\n";
    return out.exit_code;
}

int cmd_constants(const std::string& bank_file, int L, const std::vector<double>& ps, const std::string& out_file) {
    std::ifstream in(bank_file);
    if (!in) throw ConfigError("cannot read weight bank " + bank_file);
    std::vector<std::string> bank;
    for (std::string line; std::getline(in, line);) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (!line.empty()) bank.push_back(line);
    }
    if (bank.empty()) throw ConfigError("weight bank is empty");
    const std::string csv = constants_csv(constants_table(bank, Domain::make(0.0, 1.0, L), ps));
    if (out_file.empty()) {
        std::cout << csv;
    } else {
        std::ofstream o(out_file, std::ios::binary);
        if (!o) throw ConfigError("cannot write " + out_file);
        o << csv;
    }
    return 0;
}

int cmd_list(const std::string& root) {
    int missing = 0;
    for (const auto& f : find_fixtures(root)) {
        ExperimentConfig cfg = ExperimentConfig::load((f.dir / "config.ini").string());
        std::cout << f.name << "  [" << cfg.kind << "]";
        for (const auto& g : golden_files(cfg)) {
            const bool ok = fs::exists(f.dir / "golden" / g);
            if (!ok) ++missing;
            std::cout << "  " << g << (ok ? "" : " (MISSING)");
        }
        std::cout << "\n";
    }
    if (missing) {
        std::cerr << missing << " golden file(s) missing\n";
        return 2;
    }
    return 0;
}

int cmd_diff(const std::string& root, const std::string& work, bool update, int jobs) {
    const auto fixtures = find_fixtures(root);
    std::vector<std::vector<std::string>> diffs(fixtures.size());
    std::vector<int> status(fixtures.size(), 0);
    std::mutex io;
    run_parallel(fixtures.size(), jobs, [&](std::size_t i) {
        const auto& f = fixtures[i];
        ExperimentConfig cfg = ExperimentConfig::load((f.dir / "config.ini").string());
        apply_seed_override(cfg);
        const fs::path out_dir = update ? f.dir / "golden" : fs::path(work) / f.name;
        RunOutcome out;
        try {
            out = run_experiment(cfg);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> g(io);
            diffs[i].push_back(std::string("run failed: ") + e.what());
            status[i] = 2;
            return;
        }
        write_artifacts(cfg, out, out_dir.string());
        if (update) return;
        for (const auto& g : golden_files(cfg)) {
            const fs::path gp = f.dir / "golden" / g, cp = out_dir / g;
            if (!fs::exists(gp)) {
                diffs[i].push_back(g + ": golden file missing");
                status[i] = 2;
                continue;
            }
            if (g == "report.json") {
                nlohmann::json a, b;
                try {
                    a = nlohmann::json::parse(slurp(gp));
                    b = nlohmann::json::parse(slurp(cp));
                } catch (const std::exception& e) {
                    diffs[i].push_back(g + ": unreadable: " + e.what());
                    continue;
                }
                diff_json(a, b, g, diffs[i]);
            } else {
                diff_csv(slurp(gp), slurp(cp), g, diffs[i]);
            }
        }
    });
    std::size_t total = 0;
    int code = 0;
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        if (update) {
            std::cout << fixtures[i].name << ": golden updated\n";
            continue;
        }
        std::cout << fixtures[i].name << ": " << diffs[i].size() << " diff(s)\n";
        for (const auto& d : diffs[i]) std::cout << "    " << d << "\n";
        total += diffs[i].size();
        code = std::max(code, status[i]);
    }
    if (!update) std::cout << "total: " << total << " diff(s) across " << fixtures.size() << " fixture(s)\n";
    if (code) return code;
    return total ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse-harmonics: numerical checks of sparse-domination estimates for iterated commutators"};
    app.require_subcommand(1);
    int jobs = 1;
    app.add_option("--jobs,-j", jobs, "worker threads")->check(CLI::PositiveNumber);

    auto* run = app.add_subcommand("run", "run one experiment config");
    std::string config, out_dir = "sh-out";
    run->add_option("config", config, "experiment config (INI)")->required();
    run->add_option("--out,-o", out_dir, "output directory");

    auto* cons = app.add_subcommand("constants", "weight constants table for a weight bank file");
    std::string bank;
    int L = 10;
    std::vector<double> ps{1.5, 2.0, 3.0};
    std::string cons_out;
    cons->add_option("bank", bank, "file with one weight generator per line")->required();
    cons->add_option("--L", L, "grid resolution (log2 of cells)");
    cons->add_option("--ps", ps, "A_p exponents")->delimiter(',');
    cons->add_option("--out,-o", cons_out, "CSV output file (default stdout)");

    auto* list = app.add_subcommand("list-fixtures", "list shipped fixtures and their golden files");
    std::string fixtures = "fixtures";
    list->add_option("--fixtures", fixtures, "fixture root");

    auto* diff = app.add_subcommand("diff-fixtures", "rerun fixtures and compare against golden outputs");
    std::string diff_root = "fixtures";
    std::string work = (fs::temp_directory_path() / "sparse-harmonics-fixtures").string();
    bool update = false;
    diff->add_option("dir", diff_root, "fixture root");
    diff->add_option("--work", work, "scratch directory for the rerun");
    diff->add_flag("--update", update, "overwrite the golden files with the current outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(config, out_dir);
        if (*cons) return cmd_constants(bank, L, ps, cons_out);
        if (*list) return cmd_list(fixtures);
        if (*diff) return cmd_diff(diff_root, work, update, jobs);
    } catch (const std::exception& e) {
        return report_error(e);
    }
    return 0;
}
