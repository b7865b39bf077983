// End-to-end acceptance criteria A1-A11, one PASS/FAIL line each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mcut/asymptotics.hpp"
#include "mcut/oracle.hpp"
#include "mcut/sampler.hpp"

using namespace mcut;

namespace {

const cplx I(0, 1);

struct Outcome {
    bool ok;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

WeightSpec pi2(int N, std::vector<double> f = {}, FHConfig fh = {}) {
    return {make_pi_potential({-1.0, 1.0}, 2.0), TestFunction::from_coeffs(std::move(f)), std::move(fh), double(N)};
}

struct Pi2 {
    PotentialSpec V;
    EquilibriumData eq;
    SurfaceData surf;
};
const Pi2& pi2_data() {
    static Pi2 d = [] {
        auto V = make_pi_potential({-1.0, 1.0}, 2.0);
        auto eq = solve_equilibrium(V, 2);
        return Pi2{V, eq, build_surface(eq)};
    }();
    return d;
}

cplx dlog(cplx a, cplx b) { return std::log(a / b); }

Outcome a1() {
    double worst = 0;
    for (int N : {10, 20, 40}) {
        double r = std::abs(gaussian_reference(0.5, N, N) - log_partition_gaussian(0.5, N).total) * N;
        worst = std::max(worst, r);
    }
    return {worst <= 0.5, "max residual*N " + fmt("%.3e", worst)};
}

Outcome a2() {
    std::vector<double> r;
    for (int N : {8, 16, 32}) {
        double h = hankel_logdet(pi2(N), N).logdet;
        r.push_back(std::abs(h - log_partition_asym_poly({-1.0, 1.0}, 2.0, N).total));
    }
    return {r[2] < r[0] && r[2] <= 0.05, "r(8) " + fmt("%.3e", r[0]) + " r(16) " + fmt("%.3e", r[1]) + " r(32) " +
                                             fmt("%.3e", r[2])};
}

Outcome a3() {
    const auto& d = pi2_data();
    auto f = TestFunction::from_coeffs({0, 0, 0.1});
    double spread = 0, worst = 0;
    for (int N : {10, 20, 40}) {
        double v1 = log_ratio_smooth(d.eq, d.surf, f, N, 1).total;
        double v2 = log_ratio_smooth(d.eq, d.surf, f, N, 2).total;
        double v3 = log_ratio_smooth(d.eq, d.surf, f, N, 3).total;
        spread = std::max({spread, std::abs(v1 - v2), std::abs(v1 - v3), std::abs(v2 - v3)});
        double r = ratio_oracle(pi2(N, {0, 0, 0.1}), pi2(N), N);
        worst = std::max(worst, std::abs(r - v1) * N);
    }
    return {spread <= 1e-8 && worst <= 1.0, "form spread " + fmt("%.3e", spread) + " max residual*N " + fmt("%.3e", worst)};
}

Outcome a4() {
    const auto& d = pi2_data();
    const double t = 0.5 * (d.eq.support.a[1] + d.eq.support.b[1]);
    FHConfig fh{{t, 1.0, 0.0}};
    std::vector<double> r;
    double scaled = 0;
    for (int N : {8, 16, 32}) {
        double o = ratio_oracle(pi2(N, {}, fh), pi2(N), N);
        r.push_back(std::abs(o - moment_abs_charpoly(d.eq, d.surf, fh, N)));
        scaled = std::max(scaled, r.back() * N);
    }
    bool dec = r[1] < r[0] && r[2] < r[1];
    return {dec && r[2] <= 0.1, "t " + fmt("%.6f", t) + " r(8) " + fmt("%.3e", r[0]) + " r(16) " + fmt("%.3e", r[1]) +
                                    " r(32) " + fmt("%.3e", r[2]) + " max r*N " + fmt("%.3f", scaled)};
}

// random symmetric tau with positive definite imaginary part
CMat random_tau(std::mt19937_64& rng, int g) {
    std::uniform_real_distribution<double> u(-1, 1);
    RMat A(g, g), X(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) A(i, j) = 0.5 * u(rng);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j <= i; ++j) X(i, j) = X(j, i) = 0.5 * u(rng);
    RMat Y = A * A.transpose() + 0.6 * RMat::Identity(g, g);
    return X.cast<cplx>() + I * Y.cast<cplx>();
}

Outcome a5() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1, 1);
    double jt = 0, qp = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int g = 1 + trial % 3;
        CMat tau = random_tau(rng, g);
        CVec xi(g);
        for (int j = 0; j < g; ++j) xi(j) = cplx(u(rng), 0.3 * u(rng));
        jt = std::max(jt, jacobi_transform_check(xi.real().cast<cplx>(), tau));
        for (const auto& ch : {Characteristic::zero(g), Characteristic::odd(g)}) {
            cplx t0 = theta(xi, tau, ch);
            if (std::abs(t0) < 1e-8) continue;
            for (int j = 0; j < g; ++j) {
                CVec e = CVec::Zero(g);
                e(j) = 1;
                double sa = std::cos(2 * M_PI * ch.alpha(j)), sb = std::cos(2 * M_PI * ch.beta(j));
                qp = std::max(qp, std::abs(theta(CVec(xi + e), tau, ch) - sa * t0) / std::abs(t0));
                cplx pred = sb * std::exp(-M_PI * I * tau(j, j) - 2 * M_PI * I * xi(j)) * t0;
                qp = std::max(qp, std::abs(theta(CVec(xi + tau.col(j)), tau, ch) - pred) / std::abs(pred));
            }
        }
    }
    // W(z, l) against mixed second differences of log Theta at 10 random points
    std::vector<SurfaceData> surfs{build_surface(SupportData::from_endpoints({-2.0, -0.7, 0.1, 1.3})),
                                   build_surface(SupportData::from_endpoints({-1.7, -0.9, -0.4, 0.5, 1.1, 1.6})),
                                   build_surface(SupportData::from_endpoints({-2.2, -1.6, -1.0, -0.3, 0.2, 0.9, 1.4, 2.0}))};
    std::uniform_real_distribution<double> v(-2.5, 2.5);
    double wr = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto& S = surfs[trial % 3];
        cplx z(v(rng), 0.3 + std::abs(v(rng))), l(v(rng), -0.3 - std::abs(v(rng)));
        cplx W = W_kernel(S, z, l);
        const double h = 1e-3;
        auto lt = [&](cplx a, cplx b) { return prime_ratio_theta(S, a, b); };
        auto mixed = [&](double e) {
            return (dlog(lt(z + e, l + e), lt(z + e, l - e)) - dlog(lt(z - e, l + e), lt(z - e, l - e))) / (4 * e * e);
        };
        cplx rich = (4.0 * mixed(0.5 * h) - mixed(h)) / 3.0;
        wr = std::max(wr, std::abs(rich - W) / std::max(1.0, std::abs(W)));
    }
    return {jt <= 1e-12 && qp <= 1e-12 && wr <= 1e-6,
            "jacobi " + fmt("%.3e", jt) + " quasi " + fmt("%.3e", qp) + " W " + fmt("%.3e", wr)};
}

Outcome a6() {
    auto eq = solve_equilibrium(make_chebyshev_potential(2, 4.0), 2);
    auto S = build_surface(eq);
    const auto& s = S.support;
    double a1 = s.a[0], b1 = s.b[0], a2 = s.a[1], b2 = s.b[1];
    double m = std::sqrt((a2 - b1) * (b2 - a1) / ((b2 - b1) * (a2 - a1)));
    double ratio = elliptic_K(std::sqrt(1 - m * m)) / elliptic_K(m);
    double et = std::abs(S.tau(0, 0) - I * ratio);
    double th0 = theta(CVec::Zero(1), S.tau).real();
    double e0 = std::abs(th0 * th0 - 2 * elliptic_K(m) / M_PI);
    return {et <= 1e-10 && e0 <= 1e-8, "tau " + fmt("%.3e", et) + " theta(0)^2 " + fmt("%.3e", e0)};
}

Outcome a7() {
    std::vector<std::vector<double>> sups{{-1.0, 1.0}, {-1.3, -0.5, 0.2, 1.1}, {-1.7, -0.9, -0.4, 0.5, 1.1, 1.6}};
    double worst = 0;
    for (const auto& ep : sups) {
        auto J = SupportData::from_endpoints(ep);
        const int k = static_cast<int>(ep.size() / 2);
        auto inv = potential_from_support(J, 1.0);
        auto eq = solve_equilibrium(inv.V, k);
        for (int j = 0; j < k; ++j)
            worst = std::max({worst, std::abs(eq.support.a[j] - ep[2 * j]), std::abs(eq.support.b[j] - ep[2 * j + 1])});
    }
    return {worst <= 1e-8, "max endpoint error " + fmt("%.3e", worst)};
}

Outcome a8() {
    ChebyshevWeight w1;
    double worst = 0;
    for (int k = 1; k <= 4; ++k)
        for (int n = 0; n <= 6; ++n)
            for (int r = 0; r < k; ++r) {
                auto c = chebyshev_identity_check(w1, k, n, r, 50);
                worst = std::max({worst, c.hankel_residual / std::max(1.0, std::abs(c.log_hankel_wk)), c.kappa_residual});
            }
    return {worst <= 1e-20, "max relative residual " + fmt("%.3e", worst)};
}

Outcome a9() {
    auto S1 = build_surface(SupportData::from_endpoints({-1, 1}));
    double eb = 0;
    for (double t : {-0.5, 0.0, 0.7}) eb = std::max(eb, std::abs(edge_bracket(S1, t) - I * std::asin(t)));
    double cs = std::abs(c_surface(S1) - std::log(2.0));
    return {eb <= 1e-10 && cs <= 1e-10, "edge " + fmt("%.3e", eb) + " C_S " + fmt("%.3e", cs)};
}

Outcome a10() {
    const auto& d = pi2_data();
    const int N = 100;
    MCMCOptions o;
    o.measure = d.eq;
    o.jump_probability = 0.05;
    auto a = mcmc_run(d.V, N, 100000 + 2000, 2000, 31, o);
    auto st = counting_statistics(a, d.eq);
    double tv = total_variation(st, counting_law(d.eq, d.surf, N));
    return {a.states.size() == 100000 && tv <= 0.05,
            "states " + std::to_string(a.states.size()) + " TV " + fmt("%.4f", tv)};
}

Outcome a11() {
    auto V = make_gaussian(1.0);
    auto eq = solve_equilibrium(V, 1);
    const int N = 200;
    MCMCOptions o;
    o.thin = 5;
    auto a = mcmc_run(V, N, 1000 + 5 * 2000, 1000, 77, o);
    auto rs = rigidity_statistics(a, eq, 0.1);
    const double bound = 1.5 / M_PI * std::log(double(N));
    double frac = rs.fraction_below(bound);
    return {frac >= 0.95, "states " + std::to_string(a.states.size()) + " fraction " + fmt("%.4f", frac) + " bound " +
                              fmt("%.4f", bound)};
}

}  // namespace

// optional arguments select criteria by name
int main(int argc, char** argv) {
    std::vector<std::string> only(argv + 1, argv + argc);
    std::vector<std::pair<const char*, std::function<Outcome()>>> all{
        {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4},   {"A5", a5},   {"A6", a6},
        {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}, {"A11", a11},
    };
    int failed = 0;
    int run = 0;
    for (const auto& [name, fn] : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
        ++run;
        auto t0 = std::chrono::steady_clock::now();
        Outcome r;
        try {
            r = fn();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!r.ok) ++failed;
        std::printf("%-4s %s  %s  (%.1f s)\n", name, r.ok ? "PASS" : "FAIL", r.detail.c_str(), sec);
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", run - failed, run);
    return failed == 0 ? 0 : 1;
}
