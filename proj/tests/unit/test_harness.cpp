#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sparse_harmonics/harness.hpp"
#include "sparse_harmonics/maximal.hpp"

using namespace sh;

TEST_CASE("weak Lorentz quasinorm") {
    const Domain d = Domain::make(0, 1, 8);
    const GridFunction chi = GridFunction::sample(d, [](double x) { return x < 0.375 ? 1.0 : 0.0; });
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
        CHECK(lorentz_weak(chi, p) == doctest::Approx(std::pow(0.375, 1 / p)).epsilon(1e-12));
        CHECK(lorentz_one(chi, p) == doctest::Approx(p * std::pow(0.375, 1 / p)).epsilon(1e-12));
        CHECK(lorentz_weak(GridFunction(d, 2.5), p) == doctest::Approx(2.5).epsilon(1e-12));
    }
    const GridFunction w = oracle::random_steps(d, 4, 2u);
    const double wE = w.integral(Interval{0, 0.375});
    CHECK(lorentz_weak(chi, 2.0, Measure::weighted(w)) == doctest::Approx(std::sqrt(wE)).epsilon(1e-12));
    // log-space variant on the same data
    std::vector<double> a, lm;
    for (std::size_t i = 0; i < chi.size(); ++i) {
        a.push_back(std::fabs(chi[i]));
        lm.push_back(std::log(d.h()));
    }
    CHECK(std::exp(log_lorentz_weak(a, lm, 2.0)) == doctest::Approx(std::sqrt(0.375)).epsilon(1e-12));
}

TEST_CASE("Lorentz duality sandwich") {
    const Domain d = Domain::make(0, 1, 8);
    const double p = 2.0, pp = 2.0;
    for (unsigned s = 0; s < 10; ++s) {
        const GridFunction f = oracle::random_steps(d, 16, s, 0.0, 5.0);
        const double nf = lorentz_weak(f, p);
        // bank of g: level-set indicators and random positive functions
        double sup = 0;
        std::vector<GridFunction> bank;
        for (double lam : f.values()) bank.push_back(f.map([lam](double x) { return std::fabs(x) > lam ? 1.0 : 0.0; }));
        for (unsigned k = 0; k < 20; ++k) bank.push_back(oracle::random_steps(d, 8, 1000 * s + k, 0.0, 1.0));
        for (const auto& g : bank) {
            const double ng = lorentz_one(g, pp);
            if (ng <= 0) continue;
            sup = std::max(sup, (f * g).abs().integral() / ng);
        }
        CHECK(sup <= nf * (1 + 1e-12));
        CHECK(nf <= pp * sup * (1 + 1e-12));
    }
}

TEST_CASE("exponent fit on exact models") {
    const auto t = log_grid(0.01, 200, 80);
    std::vector<double> a, b;
    for (double x : t) {
        a.push_back(std::exp(-2 * std::sqrt(x)));
        b.push_back(std::exp(-x));
    }
    const ExponentFit fa = fit_exponent(t, a);
    CHECK(!fa.degenerate);
    CHECK(fa.p == doctest::Approx(0.5).epsilon(0.01));
    CHECK(fa.alpha == doctest::Approx(2.0).epsilon(0.01));
    CHECK(fa.r2 > 0.999);
    const ExponentFit fb = fit_exponent(t, b);
    CHECK(fb.p == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("exponent fit with multiplicative noise") {
    const auto t = log_grid(0.05, 100, 40);
    int good = 0;
    for (unsigned s = 0; s < 20; ++s) {
        std::mt19937 rng(s);
        std::normal_distribution<double> N(0, 0.05);
        std::vector<double> y;
        for (double x : t) y.push_back(std::exp(-2 * std::sqrt(x)) * (1 + N(rng)));
        const ExponentFit f = fit_exponent(t, y);
        if (!f.degenerate && std::fabs(f.p - 0.5) <= 0.1) ++good;
    }
    MESSAGE(good << "/20 noisy fits within 0.1");
    CHECK(good >= 18);
}

TEST_CASE("degenerate fits") {
    CHECK(fit_exponent({1, 2, 3}, {0.3, 0.2, 0.1}).degenerate);
    CHECK(fit_exponent({1, 2, 3, 4, 5, 6}, {0, 0, 0, 0, 0, 0}).degenerate);
    // increasing data cannot give a positive decay rate
    CHECK(fit_exponent({1, 2, 3, 4, 5, 6}, {0.01, 0.02, 0.05, 0.1, 0.2, 0.4}).degenerate);
}

TEST_CASE("verdict rules") {
    CHECK(ratio_verdict(1, 2, 0.5, 10) == Verdict::HoldsWithMargin);
    CHECK(ratio_verdict(5, 1, 5, 10) == Verdict::Holds);
    CHECK(ratio_verdict(50, 1, 50, 10) == Verdict::Violated);
    CHECK(ratio_verdict(1, 0, INFINITY, 10) == Verdict::Degenerate);
    CHECK(ratio_verdict(NAN, 1, NAN, 10) == Verdict::Degenerate);
    CHECK(ratio_verdict(0, 0, 0, 10) == Verdict::HoldsWithMargin);
    for (auto v : {Verdict::Holds, Verdict::HoldsWithMargin, Verdict::Violated, Verdict::Degenerate}) CHECK(verdict_from_string(to_string(v)) == v);
}

TEST_CASE("generators") {
    const Domain d = Domain::make(0, 1, 8);
    CHECK(make_weight("one", d).integral() == doctest::Approx(1.0));
    CHECK(make_weight("spike:3:1000", d)[3] == 1001.0);
    CHECK(make_function("indicator:0.25:0.5", d).integral() == doctest::Approx(0.25));
    CHECK(make_function("zero", d).max_abs() == 0.0);
    const GridFunction bumps = make_function("bumps:4", d);
    for (std::size_t i = 0; i < bumps.size(); ++i)
        if (d.center(i) < 0.25 || d.center(i) > 0.75) CHECK(bumps[i] == 0.0);
    CHECK(make_function("bumps:4", d).values() == bumps.values());
    CHECK(make_symbol("const:2", d).max_abs() == 2.0);
    CHECK(make_operator("calderon:2").arity() == 3);
    CHECK_THROWS_AS(make_operator("stein:0.3"), ParameterError);
    CHECK_THROWS(make_weight("nonsense", d));
    CHECK_THROWS(make_function("indicator:0.5", d));
    CHECK(make_young("power:2").n_function);
}

TEST_CASE("commutator evaluation paths") {
    const Domain d = Domain::make(0, 1, 9);
    const GridFunction b = make_symbol("log:0.3", d), f = make_function("bumps:1", d);
    const CommutatorSpec h{KernelOperator::hilbert(), {b}};
    const GridFunction alg = evaluate(h, {f});
    const GridFunction ker = iterated_commutator(KernelOperator::hilbert(), {Symbol{b, 0, 1}}, {f});
    for (std::size_t i = 0; i < alg.size(); ++i) CHECK(std::fabs(alg[i] - ker[i]) <= 1e-10 * (1 + std::fabs(ker[i])));
    CHECK(bmo_product(h) == doctest::Approx(bmo_norm(b)));
    CHECK(bmo_product(CommutatorSpec{KernelOperator::hilbert(), {}}) == 1.0);
}

TEST_CASE("principal cubes are sparse and nested below Q0") {
    const Domain d = Domain::make(0, 1, 10);
    const GridFunction g = hilbert_transform(make_function("bumps:2", d));
    const CellCube Q0{0, 0, 0, 1024};
    const SparseFamily F = principal_cubes(g, Q0);
    CHECK(F.cubes.front().len == 1024);
    CHECK(verify_sparse(F).best_eta >= 0.5);
    for (const auto& c : F.cubes) CHECK(contains(Q0, c));
}

TEST_CASE("constant symbols give a vanishing commutator and a degenerate decay") {
    const Domain d = Domain::make(0, 1, 8);
    const CommutatorSpec spec{KernelOperator::hilbert(), {GridFunction(d, 1.0)}};
    const GridFunction f = make_function("bumps:3:0.25:0.5", d);
    CHECK(evaluate(spec, {f}).max_abs() == 0.0);
    DecayOptions o;
    o.comparator = Comparator::LLogL;
    const DecayResult r = local_decay_experiment(spec, {f}, CellCube{0, 1, 0, 128}, o);
    for (double m : r.curve.measure) CHECK(m == 0.0);
    CHECK(r.report.verdict == Verdict::Degenerate);
}

TEST_CASE("inputs outside Q0 are rejected") {
    const Domain d = Domain::make(0, 1, 8);
    const CommutatorSpec spec{KernelOperator::hilbert(), {make_symbol("log:0.3", d)}};
    CHECK_THROWS_AS(local_decay_experiment(spec, {make_function("indicator:0.1:0.9", d)}, CellCube{0, 1, 0, 128}, {}), InputError);
}

TEST_CASE("zero input gives zero left-hand sides") {
    const Domain d = Domain::make(0, 1, 8);
    const GridFunction z(d, 0.0), one(d, 1.0), f = make_function("bumps:1", d);
    const CommutatorSpec h{KernelOperator::hilbert(), {make_symbol("log:0.3", d)}};
    const auto cf = coifman_fefferman_experiment(h, {z}, 1.0, Weight(one));
    CHECK(cf.lhs == 0.0);
    const auto mw = mixed_weak_experiment(h, {z}, {one}, one, 2.0);
    CHECK(mw.general.lhs == 0.0);
    const auto fs = fefferman_stein_experiment(h, {z}, {1.0}, {one});
    CHECK(fs.lhs == 0.0);
    const auto md = modular_experiment(h, {z}, power_young(2.0), 1.2, 1.5, Weight(one));
    CHECK(md.lhs == 0.0);
    const CommutatorSpec flat{KernelOperator::hilbert(), {GridFunction(d, 3.0)}};
    CHECK(coifman_fefferman_experiment(flat, {f}, 1.0, Weight(one)).lhs == 0.0);
}

TEST_CASE("Coifman-Fefferman ratio is invariant under scaling") {
    const Domain d = Domain::make(0, 1, 9);
    const GridFunction b = make_symbol("log:0.3", d), f = make_function("bumps:5", d);
    const Weight w(make_weight("power:0.5:0.3333333333333333", d));
    const auto base = coifman_fefferman_experiment(CommutatorSpec{KernelOperator::hilbert(), {b}}, {f}, 2.0, w);
    const auto fs = coifman_fefferman_experiment(CommutatorSpec{KernelOperator::hilbert(), {b}}, {7.0 * f}, 2.0, w);
    const auto bs = coifman_fefferman_experiment(CommutatorSpec{KernelOperator::hilbert(), {0.2 * b}}, {f}, 2.0, w);
    CHECK(fs.ratio == doctest::Approx(base.ratio).epsilon(1e-9));
    CHECK(bs.ratio == doctest::Approx(base.ratio).epsilon(1e-9));
    CHECK(base.verdict != Verdict::Violated);
}

TEST_CASE("modular branch gating") {
    const Domain d = Domain::make(0, 1, 8);
    const GridFunction f = make_function("bumps:1", d);
    const CommutatorSpec h{KernelOperator::hilbert(), {make_symbol("log:0.3", d)}};
    const Weight one(GridFunction(d, 1.0));
    const auto b1 = modular_experiment(h, {f}, power_young(2.0), 1.2, 1.5, one);
    CHECK(b1.constants["branch"] == 1);
    const auto b2 = modular_experiment(h, {f}, power_young(1.2), 1.1, 2.0, Weight(make_weight("power:0.5:0.05", d)));
    CHECK(b2.constants["branch"] == 2);
    CHECK_THROWS_AS(modular_experiment(h, {f}, power_young(2.0), 1.5, 1.5, one), ParameterError);
}

TEST_CASE("reports serialize their fields") {
    VerificationReport r;
    r.id = "demo";
    r.lhs = 1;
    r.rhs = 2;
    r.ratio = 0.5;
    r.verdict = Verdict::HoldsWithMargin;
    const auto j = r.to_json();
    CHECK(j["id"] == "demo");
    CHECK(j["verdict"] == "holds-with-margin");
    CHECK(j["fit"].is_null());
}

TEST_CASE("parallel runner preserves order and rethrows") {
    std::vector<int> out(100, -1);
    run_parallel(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
    CHECK_THROWS(run_parallel(10, 3, [](std::size_t i) {
        if (i == 7) throw std::runtime_error("boom");
    }));
}
