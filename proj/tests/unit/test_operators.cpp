#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "sparse_harmonics/harness.hpp"
#include "sparse_harmonics/operators.hpp"

using namespace sh;

namespace {

GridFunction smooth(const Domain& d, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0, 1);
    const double a = U(rng), b = U(rng), c = 1 + 3 * U(rng);
    return GridFunction::sample(d, [=](double x) { return std::sin(2 * M_PI * (c * x + a)) + b * std::cos(6 * x); });
}

double l2(const GridFunction& f) {
    long double s = 0;
    for (double x : f.values()) s += static_cast<long double>(x) * x;
    return std::sqrt(static_cast<double>(s) * f.domain().h());
}

}  // namespace

TEST_CASE("Hilbert transform of an indicator matches the closed form") {
    const Domain d = Domain::make(-1, 3, 12);
    const GridFunction chi = GridFunction::sample(d, [](double x) { return x > 0 && x < 1 ? 1.0 : 0.0; });
    const GridFunction H = hilbert_transform(chi);
    double worst = 0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        const double x = d.center(i);
        if (std::fabs(x) < 8 * d.h() || std::fabs(x - 1) < 8 * d.h()) continue;
        const double exact = std::log(std::fabs(x / (x - 1))) / M_PI;
        if (std::fabs(exact) < 1e-3) continue;
        worst = std::max(worst, std::fabs(H[i] - exact) / std::fabs(exact));
    }
    MESSAGE("worst relative error " << worst);
    CHECK(worst <= 0.02);
}

TEST_CASE("Hilbert transform symmetry and linearity") {
    const Domain d = Domain::make(0, 1, 9);
    // even about the centre -> odd transform
    const GridFunction e = GridFunction::sample(d, [](double x) { return std::exp(-40 * (x - 0.5) * (x - 0.5)); });
    const GridFunction He = hilbert_transform(e);
    const std::size_t N = d.N();
    for (std::size_t i = 0; i < N / 2; ++i) CHECK(He[i] == doctest::Approx(-He[N - 1 - i]).epsilon(1e-12).scale(1e-12));
    const GridFunction f = smooth(d, 1), g = smooth(d, 2);
    const GridFunction lhs = hilbert_transform(2.0 * f + g);
    const GridFunction rhs = 2.0 * hilbert_transform(f) + hilbert_transform(g);
    for (std::size_t i = 0; i < N; ++i) CHECK(std::fabs(lhs[i] - rhs[i]) <= 1e-12 * (1 + std::fabs(rhs[i])));
    CHECK_THROWS_AS(hilbert_transform(f, 0), ParameterError);
}

TEST_CASE("Calderon kernel values") {
    CHECK(calderon_kernel(0.0, {0.5, 1.0}) == -1.0);
    CHECK(calderon_kernel(1.0, {0.5, 0.0}) == 1.0);
    CHECK(calderon_kernel(0.0, {1.5, 1.0}) == 0.0);
    CHECK(calderon_kernel(0.0, {0.25, 0.5, 1.0}) == -1.0);
    CHECK(calderon_kernel(0.0, {0.25, 0.4, 0.5}) == -8.0);
    CHECK(calderon_kernel(0.0, {0.25, 0.5, 0.5}) == 0.0);
    CHECK_THROWS_AS(calderon_kernel(0.3, {0.1, 0.3}), ParameterError);
}

TEST_CASE("Calderon commutator with a unit symbol reduces to the Hilbert kernel") {
    const Domain d = Domain::make(0, 1, 10);
    const GridFunction one(d, 1.0);
    const GridFunction f = GridFunction::sample(d, [](double x) { return std::exp(-60 * (x - 0.4) * (x - 0.4)); });
    const GridFunction C = calderon_apply({one, f});
    const GridFunction H = M_PI * hilbert_transform(f);
    const double rel = l2(C - H) / l2(H);
    MESSAGE("relative L2 difference " << rel);
    CHECK(rel <= 0.03);
}

TEST_CASE("Calderon operator is multilinear and vanishes on zero input") {
    const Domain d = Domain::make(0, 1, 8);
    const GridFunction a = smooth(d, 3), b = smooth(d, 4), f = smooth(d, 5);
    CHECK(calderon_apply({a, GridFunction(d, 0.0)}).max_abs() == 0.0);
    const GridFunction lhs = calderon_apply({2.0 * a + b, f});
    const GridFunction rhs = 2.0 * calderon_apply({a, f}) + calderon_apply({b, f});
    for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(std::fabs(lhs[i] - rhs[i]) <= 1e-12 * (1 + std::fabs(rhs[i])));
    const GridFunction l2s = calderon_apply({a, f + 3.0 * b});
    const GridFunction r2s = calderon_apply({a, f}) + 3.0 * calderon_apply({a, b});
    for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(std::fabs(l2s[i] - r2s[i]) <= 1e-12 * (1 + std::fabs(r2s[i])));
}

TEST_CASE("Stein square function on pure waves") {
    const Domain d = Domain::make(0, 1, 10);
    const double alpha = 2.0;
    // int_0^1 (s^2 (1-s^2)^(alpha-1))^2 ds/s = B(2, 2 alpha - 1) / 2
    const double C = std::sqrt(0.5 * boost::math::beta(2.0, 2 * alpha - 1));
    std::vector<double> ratios;
    for (int k : {4, 16}) {
        const GridFunction w = GridFunction::sample(d, [k](double x) { return std::cos(2 * M_PI * k * x); });
        const GridFunction G = stein_square_function(w, alpha);
        ratios.push_back(l2(G) / l2(w));
        // profile |cos| times a constant
        for (std::size_t i = 0; i < w.size(); i += 37) CHECK(G[i] == doctest::Approx(C * std::fabs(w[i])).epsilon(0.02).scale(0.02));
    }
    MESSAGE("G/f L2 ratios " << ratios[0] << " " << ratios[1] << " oracle " << C);
    CHECK(std::fabs(ratios[0] / ratios[1] - 1) <= 0.01);
    CHECK(std::fabs(ratios[0] / C - 1) <= 0.01);
    CHECK(stein_square_function(GridFunction(d, 0.0), alpha).max_abs() == 0.0);
    CHECK_THROWS_AS(stein_square_function(GridFunction(d, 1.0), 0.3), ParameterError);
}

TEST_CASE("Stein square function is subadditive") {
    const Domain d = Domain::make(0, 1, 9);
    const GridFunction f = smooth(d, 6), g = smooth(d, 7);
    const GridFunction a = stein_square_function(f + g, 1.5), b = stein_square_function(f, 1.5), c = stein_square_function(g, 1.5);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] <= b[i] + c[i] + 1e-12);
}

TEST_CASE("kernel and algebraic commutators agree") {
    const Domain d = Domain::make(0, 1, 10);
    const auto H = KernelOperator::hilbert();
    for (unsigned s = 0; s < 5; ++s) {
        const GridFunction b = smooth(d, 10 + s), f = smooth(d, 20 + s);
        const GridFunction k = iterated_commutator(H, {Symbol{b, 0, 1}}, {f});
        const GridFunction a = commutator_algebraic(H, b, 0, {f});
        for (std::size_t i = 0; i < k.size(); ++i) CHECK(std::fabs(k[i] - a[i]) <= 1e-10 * (1 + std::fabs(a[i])));
        // second order kernel equals the twice iterated first-order commutator
        const GridFunction k2 = iterated_commutator(H, {Symbol{b, 0, 2}}, {f});
        const GridFunction a2 = b * commutator_algebraic(H, b, 0, {f}) - commutator_algebraic(H, b, 0, {b * f});
        for (std::size_t i = 0; i < k2.size(); ++i) CHECK(std::fabs(k2[i] - a2[i]) <= 1e-10 * (1 + std::fabs(a2[i])));
    }
    const GridFunction f = smooth(d, 1);
    CHECK(iterated_commutator(H, {Symbol{GridFunction(d, 4.0), 0, 1}}, {f}).max_abs() == 0.0);
}

TEST_CASE("BMO norms") {
    CHECK(bmo_norm(GridFunction(Domain::make(0, 1, 8), 3.0)) == 0.0);
    const Domain d = Domain::make(0, 1, 10);
    CHECK(bmo_norm(GridFunction::sample(d, [](double x) { return x; })) == doctest::Approx(0.25).epsilon(1e-12));
    std::vector<double> norms, sups;
    for (int L : {10, 12, 14}) {
        const GridFunction b = GridFunction::sample(Domain::make(0, 1, L), [](double x) { return std::log(std::fabs(x - 0.5)); });
        norms.push_back(bmo_norm(b));
        sups.push_back(b.max_abs());
    }
    for (double n : norms) CHECK(n == doctest::Approx(norms.back()).epsilon(0.1));
    CHECK(sups[2] - sups[0] == doctest::Approx(4 * std::log(2.0)).epsilon(0.01));
    const GridFunction one(d, 1.0);
    const GridFunction b = make_symbol("log:0.3", d);
    CHECK(weighted_bmo_norm(b, one, 1.0) == doctest::Approx(bmo_norm(b)).epsilon(1e-12));
}

TEST_CASE("log-Dini norms") {
    CHECK(log_dini_norm([](double) { return 0.0; }, 1.0, 0) == 0.0);
    CHECK(log_dini_norm([](double t) { return t; }, 1.0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(log_dini_norm([](double t) { return std::sqrt(t); }, 1.0, 1) == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(std::isinf(log_dini_norm([](double) { return 1.0; }, 1.0, 0)));
    CHECK_THROWS_AS(log_dini_norm([](double t) { return t; }, 0.0, 0), ParameterError);
}

TEST_CASE("weighted John-Nirenberg ratio is finite") {
    const Domain d = Domain::make(0, 1, 8);
    const GridFunction b = make_symbol("log:0.5", d);
    for (const char* w : {"one", "power:0.5:0.3333333333333333", "exp:2"}) {
        const double r = john_nirenberg_ratio(b, make_weight(w, d));
        CHECK(std::isfinite(r));
        CHECK(r > 0);
    }
}
