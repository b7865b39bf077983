#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <random>

#include "mcut/equilibrium.hpp"

using namespace mcut;

namespace {

void check_endpoints(const EquilibriumData& eq, const std::vector<double>& ref, double tol) {
    auto ep = eq.support.endpoints();
    REQUIRE(ep.size() == ref.size());
    for (size_t i = 0; i < ep.size(); ++i) CHECK(std::abs(ep[i] - ref[i]) < tol);
}

// I_V by brute-force double quadrature, both variables mapped to angles on their bands
double energy_double_integral(const EquilibriumData& eq, const PotentialSpec& V) {
    namespace bq = boost::math::quadrature;
    const auto& s = eq.support;
    auto band_x = [&](int l, double th) { return s.a[l] + 0.5 * (s.b[l] - s.a[l]) * (1 - std::cos(th)); };
    auto band_jac = [&](int l, double th) { return 0.5 * (s.b[l] - s.a[l]) * std::sin(th); };
    double logpart = 0, vpart = 0;
    for (int j = 0; j < s.k(); ++j) {
        auto outer = [&](double tx) {
            double x = band_x(j, tx), inner = 0;
            for (int l = 0; l < s.k(); ++l) {
                auto f = [&](double ty) {
                    double y = band_x(l, ty);
                    if (y == x) return 0.0;
                    return -std::log(std::abs(x - y)) * eq.psi(y) * band_jac(l, ty);
                };
                if (l == j) {
                    // t = tx -+ d e^{-u} turns the log singularity into linear growth in u
                    auto side = [&](double d, int sg) {
                        auto g = [&](double u) { return f(tx + sg * d * std::exp(-u)) * d * std::exp(-u); };
                        return bq::gauss_kronrod<double, 61>::integrate(g, 0.0, std::numeric_limits<double>::infinity(),
                                                                        15, 1e-14);
                    };
                    inner += side(tx, -1) + side(M_PI - tx, +1);
                }
                else
                    inner += bq::gauss_kronrod<double, 61>::integrate(f, 0.0, M_PI, 15, 1e-14);
            }
            return inner * eq.psi(x) * band_jac(j, tx);
        };
        logpart += bq::gauss_kronrod<double, 61>::integrate(outer, 0.0, M_PI, 15, 1e-13);
        vpart += bq::gauss_kronrod<double, 61>::integrate(
            [&](double th) { return V.V(band_x(j, th)) * eq.psi(band_x(j, th)) * band_jac(j, th); }, 0.0, M_PI, 15,
            1e-14);
    }
    return logpart + vpart;
}

}  // namespace

TEST_CASE("support data") {
    SupportData s({-1, 0.5}, {0, 1});
    CHECK(s.k() == 2);
    CHECK(s.min_gap() == 0.5);
    CHECK(s.band_of(0.7) == 1);
    CHECK(s.band_of(0.2) == -1);
    CHECK_THROWS(SupportData({-1, -0.5}, {0, 1}));
    CHECK_THROWS(SupportData({1}, {0}));
}

TEST_CASE("R^{1/2} branch conventions") {
    SupportData s({-1, 0.5}, {0, 1});
    // ~ z^k at infinity
    cplx z(1e4, 3e3);
    CHECK(std::abs(sqrtR(s, z) / (z * z) - 1.0) < 1e-3);
    // boundary values agree with limits from the half planes
    for (double x : {-2.0, -0.5, 0.2, 0.75, 3.0}) {
        cplx up = sqrtR(s, cplx(x, 1e-12)), dn = sqrtR(s, cplx(x, -1e-12));
        CHECK(std::abs(up - sqrtR_boundary(s, x, +1)) < 1e-5);
        CHECK(std::abs(dn - sqrtR_boundary(s, x, -1)) < 1e-5);
    }
    // band j: R_+ = i (-1)^{k-j} |R|^{1/2}
    CHECK(sqrtR_boundary(s, 0.75, 1).imag() > 0);
    CHECK(sqrtR_boundary(s, -0.5, 1).imag() < 0);
    // Laurent series of R^{1/2}/z^k against direct evaluation
    auto e = endpoint_series(s, 0.5, 30);
    cplx w = 1.0 / cplx(4.0, 1.0), acc = 0, wp = 1;
    for (double c : e) acc += c * wp, wp *= w;
    CHECK(std::abs(acc - sqrtR(s, 1.0 / w) * w * w) < 1e-12);
}

TEST_CASE("Chebyshev k=2 sigma=4 endpoints") {
    auto V = make_chebyshev_potential(2, 4.0);
    auto eq = solve_equilibrium(V, 2);
    check_endpoints(eq, {-std::sqrt(3.0) / 2, -0.5, 0.5, std::sqrt(3.0) / 2}, 1e-12);
}

TEST_CASE("Gaussian V=2x^2 gives the semicircle on [-1,1]") {
    auto V = make_gaussian(1.0);
    auto eq = solve_equilibrium(V, 1);
    check_endpoints(eq, {-1, 1}, 1e-14);
    for (int i = 1; i < 50; ++i) {
        double x = -1 + 2.0 * i / 50;
        CHECK(eq.psi(x) == doctest::Approx(2 / M_PI * std::sqrt(1 - x * x)).epsilon(1e-13));
        // EL equality residual on J
        CHECK(std::abs(2 * eq.log_potential(x) - V.V(x) + eq.ell) < 1e-12);
    }
    CHECK(eq.edge_constants[1] == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-13));
    CHECK(eq.omega.empty());
}

TEST_CASE("polynomial-square Pi_2 endpoints and closed forms") {
    auto V = make_pi_potential({-1.0, 1.0}, 2.0);
    auto eq = solve_equilibrium(V, 2);
    double r = 1 / std::sqrt(2.0);
    check_endpoints(eq, {-std::sqrt(1 + r), -std::sqrt(1 - r), std::sqrt(1 - r), std::sqrt(1 + r)}, 1e-12);
    CHECK(eq.omega[0] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("polynomial-square potentials: Omega, edge constants, energy, density") {
    struct Case {
        std::vector<double> roots;
        double nu;
    };
    for (const auto& c : {Case{{-1.0, 1.0}, 2.0}, Case{{-1.0, 0.2, 1.1}, 30.0}, Case{{-1.5, -0.3, 0.4, 1.6}, 40.0},
                          Case{{0.3}, 0.8}}) {
        auto V = make_pi_potential(c.roots, c.nu);
        const int k = static_cast<int>(c.roots.size());
        auto eq = solve_equilibrium(V, k);
        for (int j = 1; j < k; ++j) CHECK(eq.omega[j - 1] == doctest::Approx(double(k - j) / k).epsilon(1e-12));
        Polynomial pi = Polynomial::from_roots(c.roots), dpi = pi.derivative();
        auto ep = eq.support.endpoints();
        for (size_t i = 0; i < ep.size(); ++i) {
            double ref = std::pow(2.0, 1.5) * std::pow(c.nu, 0.75) / k * std::pow(std::abs(dpi(ep[i])), 1.5);
            CHECK(eq.edge_constants[i] == doctest::Approx(ref).epsilon(1e-11));
        }
        double Iref = (1.5 + std::log(c.nu) + 2 * std::log(2.0)) / (2 * k);
        CHECK(eq.energy == doctest::Approx(Iref).epsilon(1e-12));
        for (int j = 0; j < k; ++j)
            for (int i = 1; i < 20; ++i) {
                double x = eq.support.a[j] + (eq.support.b[j] - eq.support.a[j]) * i / 20.0;
                double p = pi(x);
                double ref = 2 * c.nu / (M_PI * k) * std::abs(dpi(x)) * std::sqrt(std::max(0.0, 1 / c.nu - p * p));
                CHECK(eq.psi(x) == doctest::Approx(ref).epsilon(1e-10));
            }
    }
}

TEST_CASE("Gaussian energy in the sigma convention") {
    for (double sigma : {0.25, 0.5, 2.0}) {
        auto eq = solve_equilibrium(make_gaussian(sigma), 1);
        CHECK(eq.energy == doctest::Approx(0.75 - 0.5 * std::log(1 / (4 * sigma))).epsilon(1e-13));
    }
}

TEST_CASE("energy agrees with the brute-force double integral") {
    for (auto V : {make_chebyshev_potential(2, 4.0), make_polynomial_potential({0, 0.1, -8, 0, 8})}) {
        auto eq = solve_equilibrium(V, 2);
        CHECK(std::abs(eq.energy - energy_double_integral(eq, V)) < 1e-8);
    }
}

TEST_CASE("h_V: polynomial part route equals the contour integral") {
    auto V = make_polynomial_potential({0, 0.1, -8, 0, 8});
    auto eq = solve_equilibrium(V, 2);
    for (double x : {-0.9, -0.5, 0.0, 0.45, 0.9})
        CHECK(eq.h(x) == doctest::Approx(h_contour(V, eq.support, x)).epsilon(1e-12));
    auto V3 = make_chebyshev_potential(3, 2.0);
    auto eq3 = solve_equilibrium(V3, 3);
    for (double x : {-0.8, 0.0, 0.6}) CHECK(eq3.h(x) == doctest::Approx(h_contour(V3, eq3.support, x)).epsilon(1e-12));
}

TEST_CASE("equilibrium invariants: normalization, gap integrals, EL equality and strict inequality") {
    std::vector<std::pair<PotentialSpec, int>> cases{{make_chebyshev_potential(2, 4.0), 2},
                                                     {make_chebyshev_potential(3, 2.0), 3},
                                                     {make_polynomial_potential({0, 0.1, -8, 0, 8}), 2},
                                                     {make_pi_potential({-1.0, 0.2, 1.1}, 30.0), 3}};
    for (auto& [V, k] : cases) {
        auto eq = solve_equilibrium(V, k);
        double total = 0;
        for (double m : eq.band_mass) total += m;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
        auto res = endpoint_residuals(V, eq.support);
        for (double r : res) CHECK(std::abs(r) < 1e-11);
        const auto& s = eq.support;
        for (int j = 0; j < k; ++j)
            for (int i = 1; i < 10; ++i) {
                double x = s.a[j] + (s.b[j] - s.a[j]) * i / 10.0;
                CHECK(std::abs(2 * eq.log_potential(x) - V.V(x) + eq.ell) < 1e-11);
            }
        // EL function off J from the derivative formula vs direct log potential
        for (int j = 0; j + 1 < k; ++j)
            for (int i = 1; i < 6; ++i) {
                double x = s.b[j] + (s.a[j + 1] - s.b[j]) * i / 6.0;
                double direct = 2 * eq.log_potential(x) - V.V(x) + eq.ell;
                CHECK(std::abs(direct - eq.el_function(x)) < 1e-11);
                CHECK(eq.el_function(x) < -1e-6);
            }
        for (double x : {s.a.front() - 0.3, s.b.back() + 0.2}) {
            double direct = 2 * eq.log_potential(x) - V.V(x) + eq.ell;
            CHECK(std::abs(direct - eq.el_function(x)) < 1e-11);
            CHECK(eq.el_function(x) < -1e-6);
        }
        CHECK(eq.cdf(s.b.back()) == doctest::Approx(1.0).epsilon(1e-13));
        if (k > 1) {
            for (int j = 0; j + 2 < k; ++j) CHECK(eq.omega[j] > eq.omega[j + 1]);
            CHECK(eq.omega.front() < 1);
            CHECK(eq.omega.back() > 0);
        }
        for (double c : eq.edge_constants) CHECK(c > 0);
    }
}

TEST_CASE("even potentials have symmetric data") {
    auto V = make_chebyshev_potential(2, 3.0);
    auto eq = solve_equilibrium(V, 2);
    CHECK(filling_fractions(eq)[0] == doctest::Approx(0.5).epsilon(1e-13));
    auto ec = edge_constants(eq);
    CHECK(ec.front() == doctest::Approx(ec.back()).epsilon(1e-12));
}

TEST_CASE("non-regular requests are diagnosed") {
    CHECK_THROWS_AS(solve_equilibrium(make_gaussian(1.0), 2), NotRegular);
    CHECK_THROWS_AS(solve_equilibrium(make_pi_potential({-1.0, 1.0}, 2.0), 1, SolveOptions{SupportData({-1.4}, {1.4})}),
                    NotRegular);
}

TEST_CASE("potential_from_support") {
    auto r1 = potential_from_support(SupportData({-1}, {1}), 2.0);
    auto c = r1.V.poly.coeffs();
    REQUIRE(c.size() == 3);
    CHECK(std::abs(c[0]) < 1e-13);
    CHECK(std::abs(c[1]) < 1e-13);
    CHECK(c[2] == doctest::Approx(2.0).epsilon(1e-13));
    auto back = solve_equilibrium(r1.V, 1);
    check_endpoints(back, {-1, 1}, 1e-12);

    auto r2 = potential_from_support(SupportData({-1, 0.4}, {-0.4, 1}), 1.0);
    CHECK(std::abs(r2.q.coeff(0)) < 1e-13);

    // Pi_k case: q = Pi'/k and c_J = pi/(2 nu)
    auto V = make_pi_potential({-1.0, 0.2, 1.1}, 30.0);
    auto eq = solve_equilibrium(V, 3);
    auto inv = potential_from_support(eq.support, V.V(1.0));
    CHECK(inv.c_J == doctest::Approx(M_PI / 60).epsilon(1e-10));
    Polynomial dq = (1.0 / 3) * Polynomial::from_roots({-1.0, 0.2, 1.1}).derivative();
    for (int i = 0; i < 3; ++i) CHECK(std::abs(inv.q.coeff(i) - dq.coeff(i)) < 1e-10);
    for (int i = 0; i <= 6; ++i) CHECK(std::abs(inv.V.poly.coeff(i) - V.poly.coeff(i)) < 1e-8 * (1 + std::abs(V.poly.coeff(i))));
}

TEST_CASE("forward-inverse roundtrip on random supports") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.3, 1.0);
    for (int k = 1; k <= 3; ++k)
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<double> ep;
            double x = -1.5;
            for (int i = 0; i < 2 * k; ++i) {
                x += u(rng);
                ep.push_back(x);
            }
            auto J = SupportData::from_endpoints(ep);
            auto inv = potential_from_support(J, 1.0);
            auto eq = solve_equilibrium(inv.V, k);
            check_endpoints(eq, ep, 1e-8);
            CHECK(std::abs(eq.energy - inv.eq.energy) < 1e-10);
        }
}

TEST_CASE("asymmetric three-cut support from the default initialization") {
    std::vector<double> ep{-1.7, -0.9, -0.4, 0.5, 1.1, 1.6};
    auto inv = potential_from_support(SupportData::from_endpoints(ep), 1.0);
    auto init = fekete_support(inv.V, 3);
    for (size_t i = 0; i < ep.size(); ++i) CHECK(std::abs(init.endpoints()[i] - ep[i]) < 0.1);
    check_endpoints(solve_equilibrium(inv.V, 3), ep, 1e-8);
}
