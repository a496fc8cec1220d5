#include "sparse_harmonics/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace sh {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"experiment", {"kind", "seed", "slack"}},
        {"grid", {"left", "length", "L", "boundary"}},
        {"operator", {"spec", "symbols"}},
        {"inputs", {"functions", "weight", "weights", "v", "bank"}},
        {"params", {"p", "t", "p_s", "phi", "q", "r", "comparator", "q0", "symbol", "t_grid", "ps"}},
        {"dimension", {"n", "tau_n", "C_n", "c_n"}},
    };
    return s;
}

const std::set<std::string> kKinds{"decay", "cf", "mixed", "fs", "modular", "constants", "sharpness"};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    if (boost::trim_copy(s).empty()) return out;
    boost::split(out, s, boost::is_any_of(","));
    for (auto& x : out) boost::trim(x);
    return out;
}

std::string join(const std::vector<std::string>& v) { return boost::join(v, ", "); }

std::string join(const std::vector<double>& v) {
    std::vector<std::string> s;
    for (double x : v) s.push_back(fmt(x));
    return join(s);
}

double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + s + "'");
    }
}

std::vector<double> to_doubles(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const auto& x : split_list(s)) out.push_back(to_double(key, x));
    return out;
}

long long to_int(const std::string& key, const std::string& s) {
    const double v = to_double(key, s);
    if (v != std::floor(v)) throw ConfigError("key '" + key + "': not an integer: '" + s + "'");
    return static_cast<long long>(v);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    ExperimentConfig c;
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) {
            if (body.empty()) throw ConfigError("key outside any section: '" + section + "'");
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, node] : body) {
            if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
            const std::string val = boost::trim_copy(node.get_value<std::string>());
            const std::string name = section + "." + key;
            if (section == "experiment") {
                if (key == "kind") c.kind = val;
                if (key == "seed") {
                    const long long s = to_int(name, val);
                    if (s < 0) throw ConfigError("seed must be nonnegative");
                    c.seed = static_cast<std::uint64_t>(s);
                }
                if (key == "slack") c.slack = to_double(name, val);
            } else if (section == "grid") {
                if (key == "left") c.left = to_double(name, val);
                if (key == "length") c.length = to_double(name, val);
                if (key == "L") c.L = static_cast<int>(to_int(name, val));
                if (key == "boundary") c.boundary = val;
            } else if (section == "operator") {
                if (key == "spec") c.op = val;
                if (key == "symbols") c.symbols = split_list(val);
            } else if (section == "inputs") {
                if (key == "functions") c.functions = split_list(val);
                if (key == "weight") c.weight = val;
                if (key == "weights") c.weights = split_list(val);
                if (key == "v") c.v = val;
                if (key == "bank") c.bank = split_list(val);
            } else if (section == "params") {
                if (key == "p") c.p = to_double(name, val);
                if (key == "t") c.t = to_double(name, val);
                if (key == "p_s") c.p_s = to_doubles(name, val);
                if (key == "phi") c.phi = val;
                if (key == "q") c.q = to_double(name, val);
                if (key == "r") c.r = to_double(name, val);
                if (key == "comparator") c.comparator = val;
                if (key == "q0") c.q0 = val;
                if (key == "symbol") c.symbol = val;
                if (key == "t_grid") c.t_grid = to_doubles(name, val);
                if (key == "ps") c.ps = to_doubles(name, val);
            } else if (section == "dimension") {
                if (key == "n") c.dc.n = static_cast<int>(to_int(name, val));
                if (key == "tau_n") c.dc.tau_n = to_double(name, val);
                if (key == "C_n") c.dc.C_n = to_double(name, val);
                if (key == "c_n") c.dc.c_n = to_double(name, val);
            }
        }
    }
    if (!kKinds.count(c.kind)) throw ConfigError("unknown experiment kind '" + c.kind + "'");
    if (c.boundary != "zero-extend" && c.boundary != "clip") throw ConfigError("boundary must be zero-extend or clip");
    if (c.L < 1 || c.L > 20) throw ConfigError("L must lie in [1, 20]");
    if (!(c.length > 0)) throw ConfigError("grid length must be positive");
    if (c.comparator != "mixed-min" && c.comparator != "llogl") throw ConfigError("comparator must be mixed-min or llogl");
    if (c.dc.n != 1) throw ConfigError("only n = 1 is supported");
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ExperimentConfig::to_ini() const {
    std::ostringstream o;
    o << "[experiment]\nkind = " << kind << "\nseed = " << seed << "\nslack = " << fmt(slack) << "\n\n";
    o << "[grid]\nleft = " << fmt(left) << "\nlength = " << fmt(length) << "\nL = " << L << "\nboundary = " << boundary << "\n\n";
    o << "[operator]\nspec = " << op << "\nsymbols = " << join(symbols) << "\n\n";
    o << "[inputs]\nfunctions = " << join(functions) << "\nweight = " << weight << "\nweights = " << join(weights)
      << "\nv = " << v << "\nbank = " << join(bank) << "\n\n";
    o << "[params]\np = " << fmt(p) << "\nt = " << fmt(t) << "\np_s = " << join(p_s) << "\nphi = " << phi << "\nq = " << fmt(q)
      << "\nr = " << fmt(r) << "\ncomparator = " << comparator << "\nq0 = " << q0 << "\nsymbol = " << symbol
      << "\nt_grid = " << join(t_grid) << "\nps = " << join(ps) << "\n\n";
    o << "[dimension]\nn = " << dc.n << "\ntau_n = " << fmt(dc.tau_n) << "\nC_n = " << fmt(dc.C_n) << "\nc_n = " << fmt(dc.c_n) << "\n";
    return o.str();
}

nlohmann::json ExperimentConfig::to_json() const {
    return {{"kind", kind},       {"seed", seed},         {"slack", slack},   {"left", left},         {"length", length},
            {"L", L},             {"boundary", boundary}, {"operator", op},   {"symbols", symbols},   {"functions", functions},
            {"weight", weight},   {"weights", weights},   {"v", v},           {"bank", bank},         {"p", p},
            {"t", t},             {"p_s", p_s},           {"phi", phi},       {"q", q},               {"r", r},
            {"comparator", comparator}, {"q0", q0},       {"symbol", symbol}, {"t_grid", t_grid},     {"ps", ps},
            {"dimension", {{"n", dc.n}, {"tau_n", dc.tau_n}, {"C_n", dc.C_n}, {"c_n", dc.c_n}}}};
}

Domain ExperimentConfig::domain() const {
    return Domain::make(left, length, L, boundary == "clip" ? Boundary::Clip : Boundary::ZeroExtend);
}

std::string ExperimentConfig::resolve(const std::string& spec) const {
    return boost::replace_all_copy(spec, "{seed}", std::to_string(seed));
}

int exit_code_for(const std::vector<VerificationReport>& reports) {
    bool violated = false, degenerate = false;
    for (const auto& r : reports) {
        violated = violated || r.verdict == Verdict::Violated;
        degenerate = degenerate || r.verdict == Verdict::Degenerate;
    }
    return violated ? 4 : degenerate ? 3 : 0;
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
    RunOutcome out;
    HarnessOptions opt;
    opt.slack = cfg.slack;
    opt.seed = cfg.seed;
    opt.dc = cfg.dc;

    if (cfg.kind == "sharpness") {
        SharpnessOptions so;
        so.L = cfg.L;
        so.symbol = cfg.symbol;
        so.t_grid = cfg.t_grid;
        so.opt = opt;
        auto r = sharpness_experiment(so);
        out.reports.push_back(r.report);
        out.curves.push_back(r.curve);
        out.exit_code = exit_code_for(out.reports);
        return out;
    }

    const Domain d = cfg.domain();
    if (cfg.kind == "constants") {
        if (cfg.bank.empty()) throw ConfigError("constants run needs inputs.bank");
        std::vector<std::string> bank;
        for (const auto& b : cfg.bank) bank.push_back(cfg.resolve(b));
        out.constants_csv = constants_csv(constants_table(bank, d, cfg.ps));
        return out;
    }

    CommutatorSpec spec{make_operator(cfg.op), {}};
    for (const auto& s : cfg.symbols) spec.b.push_back(make_symbol(cfg.resolve(s), d));
    std::vector<GridFunction> f;
    for (const auto& s : cfg.functions) f.push_back(make_function(cfg.resolve(s), d));
    auto weight_or_one = [&](const std::string& s) { return make_weight(s.empty() ? "one" : cfg.resolve(s), d); };
    std::vector<GridFunction> ws;
    for (const auto& s : cfg.weights) ws.push_back(make_weight(cfg.resolve(s), d));

    if (cfg.kind == "decay") {
        const auto parts = split_list(boost::replace_all_copy(cfg.q0, ":", ","));
        if (parts.size() != 2) throw ConfigError("q0 must be level:index");
        const long long level = to_int("params.q0", parts[0]), index = to_int("params.q0", parts[1]);
        if (level < 0 || level > cfg.L || index < 0 || index >= (1LL << level)) throw ConfigError("q0 outside the base lattice");
        const long long len = static_cast<long long>(d.N()) >> level;
        const CellCube Q0{0, static_cast<int>(level), index * len, len};
        DecayOptions o;
        o.t_grid = cfg.t_grid;
        o.comparator = cfg.comparator == "llogl" ? Comparator::LLogL : Comparator::MixedMin;
        o.opt = opt;
        GridFunction w;
        if (!cfg.weight.empty()) {
            w = make_weight(cfg.resolve(cfg.weight), d);
            o.w = &w;
        }
        auto r = local_decay_experiment(spec, f, Q0, o);
        out.reports.push_back(r.report);
        out.curves.push_back(r.curve);
    } else if (cfg.kind == "cf") {
        out.reports.push_back(coifman_fefferman_experiment(spec, f, cfg.p, Weight(weight_or_one(cfg.weight)), opt));
    } else if (cfg.kind == "mixed") {
        auto r = mixed_weak_experiment(spec, f, ws, weight_or_one(cfg.v), cfg.t, opt);
        out.reports.push_back(r.general);
        if (r.unweighted_v) out.reports.push_back(*r.unweighted_v);
    } else if (cfg.kind == "fs") {
        out.reports.push_back(fefferman_stein_experiment(spec, f, cfg.p_s, ws, opt));
    } else if (cfg.kind == "modular") {
        out.reports.push_back(modular_experiment(spec, f, make_young(cfg.phi), cfg.q, cfg.r, Weight(weight_or_one(cfg.weight)), opt));
    }
    out.exit_code = exit_code_for(out.reports);
    return out;
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream o(p, std::ios::binary);
    if (!o) throw ConfigError("cannot write " + p.string());
    o << text;
}

const char* verdict_colour(Verdict v) {
    switch (v) {
        case Verdict::HoldsWithMargin: return "#2b8a3e";
        case Verdict::Holds: return "#5c940d";
        case Verdict::Violated: return "#c92a2a";
        case Verdict::Degenerate: return "#868e96";
    }
    return "#868e96";
}

}  // namespace

void write_artifacts(const ExperimentConfig& cfg, const RunOutcome& out, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    nlohmann::json j;
    j["config"] = cfg.to_json();
    j["config_ini"] = cfg.to_ini();
    j["reports"] = nlohmann::json::array();
    for (const auto& r : out.reports) j["reports"].push_back(r.to_json());
    j["exit_code"] = out.exit_code;
    write_text(fs::path(dir) / "report.json", j.dump(2) + "\n");
    if (!out.curves.empty()) {
        write_curve_csv(out.curves.front(), (fs::path(dir) / "curves.csv").string());
        std::vector<std::string> labels;
        for (const auto& r : out.reports) labels.push_back(r.id);
        write_text(fs::path(dir) / "plot.svg", decay_svg(out.curves, labels));
    } else if (!out.reports.empty()) {
        write_text(fs::path(dir) / "plot.svg", ratio_svg(out.reports));
    }
    if (cfg.kind == "constants") write_text(fs::path(dir) / "constants.csv", out.constants_csv);
}

std::string decay_svg(const std::vector<DecayCurve>& curves, const std::vector<std::string>& labels) {
    const double W = 640, H = 400, ml = 60, mr = 20, mt = 30, mb = 45;
    double tmax = 0, ymin = 0;
    for (const auto& c : curves)
        for (std::size_t k = 0; k < c.t.size(); ++k) {
            tmax = std::max(tmax, c.t[k]);
            if (c.measure[k] > 0) ymin = std::min(ymin, std::floor(std::log10(c.measure[k])));
        }
    if (tmax <= 0) tmax = 1;
    if (ymin > -1) ymin = -1;
    auto X = [&](double t) { return ml + (W - ml - mr) * t / tmax; };
    auto Y = [&](double ly) { return mt + (H - mt - mb) * (ly / ymin); };
    std::ostringstream s;
    char b[256];
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(b, sizeof b, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", ml, H - mb, W - mr, H - mb);
    s << b;
    std::snprintf(b, sizeof b, "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n", ml, mt, ml, H - mb);
    s << b;
    for (int e = 0; e >= static_cast<int>(ymin); --e) {
        std::snprintf(b, sizeof b, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">1e%d</text>\n", ml - 4, Y(e) + 4, e);
        s << b;
    }
    for (int k = 0; k <= 4; ++k) {
        std::snprintf(b, sizeof b, "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">%.3g</text>\n", X(tmax * k / 4), H - mb + 16, tmax * k / 4);
        s << b;
    }
    s << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 8) << "\" text-anchor=\"middle\">t</text>\n";
    const char* colours[] = {"#1c7ed6", "#e8590c", "#2b8a3e", "#862e9c"};
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const auto& c = curves[i];
        const char* col = colours[i % 4];
        for (std::size_t k = 0; k < c.t.size(); ++k)
            if (c.measure[k] > 0) {
                std::snprintf(b, sizeof b, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", X(c.t[k]), Y(std::log10(c.measure[k])), col);
                s << b;
            }
        if (!c.fit.degenerate) {
            s << "<polyline fill=\"none\" stroke=\"" << col << "\" points=\"";
            for (int k = 0; k <= 200; ++k) {
                const double t = tmax * k / 200.0, m = c.model(t);
                if (!(m > 0)) continue;
                const double ly = std::max(ymin, std::log10(m));
                std::snprintf(b, sizeof b, "%.2f,%.2f ", X(t), Y(ly));
                s << b;
            }
            s << "\"/>\n";
        }
        const std::string label = i < labels.size() ? labels[i] : "";
        std::snprintf(b, sizeof b, "<text x=\"%g\" y=\"%g\" fill=\"%s\">%s  p=%.3f  R2=%.4f</text>\n", W - mr - 260, mt + 14.0 * (i + 1), col,
                      label.c_str(), c.fit.p, c.fit.r2);
        s << b;
    }
    s << "</svg>\n";
    return s.str();
}

std::string ratio_svg(const std::vector<VerificationReport>& reports) {
    const double W = 640, row = 26, ml = 170, mt = 30;
    const double H = mt + row * reports.size() + 40;
    double lo = -1, hi = 1.5;
    std::vector<double> lr;
    for (const auto& r : reports) {
        double v = r.ratio > 0 ? std::log10(r.ratio) : -300;
        if (r.constants.contains("log10_ratio") && r.constants["log10_ratio"].is_number()) v = r.constants["log10_ratio"].get<double>();
        lr.push_back(v);
        lo = std::min(lo, std::floor(v));
    }
    lo = std::max(lo, -400.0);
    auto X = [&](double v) { return ml + (W - ml - 20) * (std::max(v, lo) - lo) / (hi - lo); };
    std::ostringstream s;
    char b[320];
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << ml << "\" y=\"18\">log10(lhs/rhs)</text>\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const double y = mt + row * i;
        std::snprintf(b, sizeof b, "<text x=\"%g\" y=\"%g\" text-anchor=\"end\">%s</text>\n", ml - 6, y + 15, reports[i].id.c_str());
        s << b;
        const double x0 = X(std::min(0.0, lr[i])), x1 = X(std::max(0.0, lr[i]));
        std::snprintf(b, sizeof b, "<rect x=\"%.2f\" y=\"%g\" width=\"%.2f\" height=\"18\" fill=\"%s\"/>\n", x0, y + 2, std::max(1.0, x1 - x0),
                      verdict_colour(reports[i].verdict));
        s << b;
        std::snprintf(b, sizeof b, "<text x=\"%.2f\" y=\"%g\">%.3g (%s)</text>\n", std::max(x1, X(0.0)) + 4, y + 15, lr[i],
                      to_string(reports[i].verdict).c_str());
        s << b;
    }
    const double ya = mt + row * reports.size() + 10;
    std::snprintf(b, sizeof b, "<line x1=\"%.2f\" y1=\"%g\" x2=\"%.2f\" y2=\"%g\" stroke=\"black\"/>\n", X(0.0), mt, X(0.0), ya);
    s << b;
    std::snprintf(b, sizeof b, "<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">0</text><text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">%g</text>\n",
                  X(0.0), ya + 14, X(lo), ya + 14, lo);
    s << b;
    s << "</svg>\n";
    return s.str();
}

}  // namespace sh
