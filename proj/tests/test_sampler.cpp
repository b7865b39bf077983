#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "mcut/riemann.hpp"
#include "mcut/sampler.hpp"

using namespace mcut;

namespace {

struct TwoCut {
    PotentialSpec V;
    EquilibriumData eq;
    SurfaceData surf;
};

const TwoCut& pi2() {
    static TwoCut c = [] {
        auto V = make_pi_potential({-1.0, 1.0}, 2.0);
        auto eq = solve_equilibrium(V, 2);
        return TwoCut{V, eq, build_surface(eq)};
    }();
    return c;
}

}  // namespace

TEST_CASE("log-density is exchangeable") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0, 0.7);
    auto V = make_pi_potential({-1.0, 0.4}, 6.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> x(7);
        for (auto& v : x) v = g(rng);
        double d = gas_log_density(V, 7, x);
        std::shuffle(x.begin(), x.end(), rng);
        CHECK(gas_log_density(V, 7, x) == doctest::Approx(d).epsilon(1e-14));
        std::reverse(x.begin(), x.end());
        CHECK(gas_log_density(V, 7, x) == doctest::Approx(d).epsilon(1e-14));
    }
}

TEST_CASE("forced moves on three particles") {
    auto V = make_gaussian(1.0);
    const int N = 3;
    std::vector<std::vector<double>> states{{-0.5, 0.1, 0.7}, {-1.2, 0.0, 0.3}, {-0.05, 0.05, 0.9}};
    for (const auto& x : states)
        for (int i = 0; i < 3; ++i)
            for (double y : {-0.8, 0.2, 1.4}) {
                auto z = x;
                z[i] = y;
                double d = gas_log_density(V, N, z) - gas_log_density(V, N, x);
                CHECK(gas_log_ratio(V, N, x, i, y) == doctest::Approx(d).epsilon(1e-13));
                CHECK(acceptance_probability(V, N, x, i, y) == doctest::Approx(std::min(1.0, std::exp(d))).epsilon(1e-13));
                // the reverse move satisfies detailed balance
                double fwd = std::exp(gas_log_density(V, N, x)) * acceptance_probability(V, N, x, i, y);
                double rev = std::exp(gas_log_density(V, N, z)) * acceptance_probability(V, N, z, i, x[i]);
                CHECK(fwd == doctest::Approx(rev).epsilon(1e-12));
            }
    // landing on another particle is rejected
    CHECK(acceptance_probability(V, N, states[0], 0, 0.1) == 0.0);
}

TEST_CASE("identical seeds give identical archives") {
    auto V = make_gaussian(1.0);
    auto a = mcmc_run(V, 10, 60, 20, 42), b = mcmc_run(V, 10, 60, 20, 42), c = mcmc_run(V, 10, 60, 20, 43);
    CHECK(a.states == b.states);
    CHECK(a.states != c.states);
    CHECK(a.states.size() == 40);
    MCMCOptions o;
    o.thin = 3;
    CHECK(mcmc_run(V, 10, 62, 20, 1, o).states.size() == 14);
}

TEST_CASE("invalid runs are rejected") {
    auto V = make_gaussian(1.0);
    CHECK_THROWS_AS(mcmc_run(V, 1, 10, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(mcmc_run(V, 5, 10, 10, 0), std::invalid_argument);
    MCMCOptions o;
    o.jump_probability = 0.1;
    CHECK_THROWS_AS(mcmc_run(V, 5, 10, 2, 0, o), std::invalid_argument);
}

TEST_CASE("Gaussian ensemble follows the semicircle") {
    auto V = make_gaussian(1.0);
    auto eq = solve_equilibrium(V, 1);
    auto a = mcmc_run(V, 100, 2500, 500, 9);
    CHECK(a.acceptance >= 0.2);
    CHECK(a.acceptance <= 0.6);
    std::vector<double> all;
    for (const auto& s : a.states) all.insert(all.end(), s.begin(), s.end());
    std::sort(all.begin(), all.end());
    double ks = 0;
    for (size_t i = 0; i < all.size(); i += 5) {
        double F = eq.cdf(all[i]);
        ks = std::max({ks, std::abs(double(i) / all.size() - F), std::abs(double(i + 1) / all.size() - F)});
    }
    CHECK(ks <= 0.03);
}

TEST_CASE("equilibrium proposal table") {
    const auto& c = pi2();
    EquilibriumSampler es(c.eq);
    CHECK(es.quantile(0.0) == doctest::Approx(c.eq.support.a[0]));
    CHECK(es.quantile(1.0) == doctest::Approx(c.eq.support.b[1]));
    for (double u : {0.1, 0.3, 0.6, 0.9}) CHECK(c.eq.cdf(es.quantile(u)) == doctest::Approx(u).epsilon(1e-5));
    CHECK(es.density(0.0) == 0.0);
    // density of the draws integrates to one
    double s = 0;
    const int M = 200000;
    const double lo = -1.5, hi = 1.5;
    for (int i = 0; i < M; ++i) s += es.density(lo + (hi - lo) * (i + 0.5) / M);
    CHECK(s * (hi - lo) / M == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(c.eq.cdf(c.eq.support.b[1]) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("band counts of the two-cut gas") {
    const auto& c = pi2();
    MCMCOptions o;
    o.measure = c.eq;
    o.jump_probability = 0.05;
    const int N = 40;
    auto a = mcmc_run(c.V, N, 6000, 500, 5, o);
    auto st = counting_statistics(a, c.eq);
    CHECK(st.epsilon == doctest::Approx(c.eq.support.min_gap() / 4));
    long bad = 0;
    for (size_t i = 0; i < st.counts.size(); ++i)
        if (st.counts[i][0] + st.counts[i][1] + st.unassigned[i] != N) ++bad;
    CHECK(bad == 0);
    long full = std::count(st.unassigned.begin(), st.unassigned.end(), 0);
    CHECK(full == static_cast<long>(st.counts.size()));
    // mode at N/2 per band
    auto it = std::max_element(st.mass.begin(), st.mass.end());
    CHECK(st.points[it - st.mass.begin()][0] + static_cast<int>(std::floor(N * c.eq.band_mass[1])) == N / 2);
    CHECK(total_variation(st, counting_law(c.eq, c.surf, N)) <= 0.05);
    CHECK_THROWS_AS(counting_statistics(a, c.eq, c.eq.support.min_gap()), std::invalid_argument);
}

TEST_CASE("total variation of a law with itself") {
    const auto& c = pi2();
    auto law = counting_law(c.eq, c.surf, 30);
    CountingStatistics st;
    st.N = 30;
    st.points = law.points;
    st.mass = law.mass;
    CHECK(total_variation(st, law) < 1e-15);
    st.mass.assign(st.mass.size(), 0.0);
    st.mass[0] = 1.0;
    CHECK(total_variation(st, law) == doctest::Approx(1 - law.mass[0]));
}

TEST_CASE("centred counting function") {
    auto eq = solve_equilibrium(make_gaussian(1.0), 1);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> x(25);
        for (auto& v : x) v = u(rng);
        std::sort(x.begin(), x.end());
        for (double v : x) {
            // jump of exactly one across each eigenvalue
            double jump = centred_count(x, eq, v + 1e-12) - centred_count(x, eq, v - 1e-12);
            CHECK(jump == doctest::Approx(1.0).epsilon(1e-8));
        }
        CHECK(centred_count(x, eq, 2.0) == doctest::Approx(0.0).epsilon(1e-8));
    }
}

TEST_CASE("rigidity statistics") {
    auto V = make_gaussian(1.0);
    auto eq = solve_equilibrium(V, 1);
    auto a = mcmc_run(V, 60, 900, 300, 4);
    auto r = rigidity_statistics(a, eq, 0.1);
    CHECK(r.grid.size() == 1000);
    CHECK(r.grid.front() == doctest::Approx(-0.9));
    CHECK(r.grid.back() == doctest::Approx(0.9));
    CHECK(r.sup_abs.size() == a.states.size());
    // grid supremum agrees with a brute-force evaluation
    auto s0 = a.states[0];
    std::sort(s0.begin(), s0.end());
    double sup = 0;
    for (double g : r.grid) sup = std::max(sup, std::abs(centred_count(s0, eq, g)));
    CHECK(r.sup_abs[0] == doctest::Approx(sup).epsilon(1e-9));
    CHECK(r.fraction_below(1e9) == 1.0);
    CHECK(r.fraction_below(-1) == 0.0);
    CHECK_THROWS_AS(rigidity_statistics(a, eq, 1.5), std::invalid_argument);
}

TEST_CASE("linear statistic has no drift in N") {
    auto V = make_gaussian(1.0);
    auto eq = solve_equilibrium(V, 1);
    const double m2 = eq.integral([](double x) { return x * x; });
    for (int N : {50, 100, 200}) {
        auto a = mcmc_run(V, N, 900, 300, 17 + N);
        double mean = 0;
        for (const auto& s : a.states) {
            double t = 0;
            for (double v : s) t += v * v;
            mean += t - N * m2;
        }
        mean /= a.states.size();
        CHECK(std::abs(mean) < 0.5);
    }
}
