#include "mcut/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mcut {

namespace {

constexpr double kPi = M_PI;
const cplx I(0, 1);

double log_theta_ratio(const SurfaceData& surf, const RVec& shift, const RVec& base) {
    if (surf.g == 0) return 0;
    cplx num = theta(CVec((base + shift).cast<cplx>()), surf.tau, surf.theta_tol);
    cplx den = theta(CVec(base.cast<cplx>()), surf.tau, surf.theta_tol);
    return std::log(std::abs(num / den));
}

// (1/8)(sum_{l<j} [log(a_j-a_l) + log(b_j-b_l)] - sum_{l,j} log|b_j - a_l|)
double endpoint_term(const SupportData& s) {
    const int k = s.k();
    double acc = 0;
    for (int j = 0; j < k; ++j)
        for (int l = 0; l < j; ++l) acc += std::log(s.a[j] - s.a[l]) + std::log(s.b[j] - s.b[l]);
    for (int j = 0; j < k; ++j)
        for (int l = 0; l < k; ++l) acc -= std::log(std::abs(s.b[j] - s.a[l]));
    return acc / 8;
}

void require_N(int N) {
    if (N < 1) throw std::invalid_argument("asymptotics: N must be positive");
}

struct Node {
    cplx z, w;  // w = dz / (2 pi i)
    int band;
};

double contour_scale(const SupportData& s) {
    return s.k() >= 2 ? s.min_gap() : s.b[0] - s.a[0];
}

// confocal ellipse around band j reaching delta beyond the band ends
std::vector<Node> ellipse_nodes(const SupportData& s, double reach, int M) {
    std::vector<Node> out;
    const double d = reach * contour_scale(s);
    for (int j = 0; j < s.k(); ++j) {
        double c = 0.5 * (s.a[j] + s.b[j]), hw = 0.5 * (s.b[j] - s.a[j]);
        double eta = std::acosh(1 + d / hw);
        for (int m = 0; m < M; ++m) {
            double th = 2 * kPi * (m + 0.5) / M;
            cplx zeta(eta, th);
            out.push_back({c + hw * std::cosh(zeta), hw * std::sinh(zeta) / double(M), j});
        }
    }
    return out;
}

double fh_beta_sq(const FHSingularity& p) { return -p.beta_im * p.beta_im; }

// piecewise PV part: R_+(t) int_J (f(l) - f(t)) / (R_+(l)(l - t)) dl
cplx divided_difference_integral(const SurfaceData& surf, double t, const TestFunction& f) {
    const auto& c = f.p.coeffs();
    const int n = static_cast<int>(c.size());
    std::vector<double> d(std::max(n - 1, 0), 0.0);
    // (l^m - t^m)/(l - t) = sum_{i<m} l^i t^{m-1-i}
    for (int m = 1; m < n; ++m) {
        double tp = 1;
        for (int i = m - 1; i >= 0; --i) {
            d[i] += c[m] * tp;
            tp *= t;
        }
    }
    if (d.empty()) return 0;
    Polynomial dd(d);
    cplx acc = 0;
    for (int j = 0; j < surf.k(); ++j) acc += band_integral_R(surf.support, j, [&](double x) { return cplx(dd(x)); });
    return acc;
}

// polynomial part of R^{1/2}(z) p(z) at infinity, R^{1/2} ~ z^k
Polynomial polynomial_part_Rf(const SupportData& s, const Polynomial& p) {
    const int k = s.k(), d = p.degree();
    if (p.is_zero()) return Polynomial::constant(0);
    const int n = k + d;
    std::vector<double> q(n + 1, 0.0), sq(n + 1, 0.0);
    q[0] = 1;
    for (double e : s.endpoints())
        for (int i = n; i >= 1; --i) q[i] -= e * q[i - 1];
    sq[0] = 1;
    for (int i = 1; i <= n; ++i) {
        double acc = q[i];
        for (int m = 1; m < i; ++m) acc -= sq[m] * sq[i - m];
        sq[i] = acc / 2;
    }
    std::vector<double> out(n + 1, 0.0);
    for (int c = 0; c <= d; ++c)
        for (int m = 0; m <= k + c; ++m) out[k + c - m] += p.coeff(c) * sq[m];
    return Polynomial(out);
}

double edge_group(const SurfaceData& surf, const FHConfig& fh, double A) {
    double acc = 0;
    for (const auto& p : fh) {
        double bsq = fh_beta_sq(p);
        if (bsq != 0) acc += bsq * std::log(std::abs(theta_tilde_diag(surf, SurfacePoint::above(p.t))));
        if (A != 0 && p.beta_im != 0) acc += (A * I * p.beta_im * edge_bracket(surf, p.t)).real();
    }
    return acc;
}

cplx theta_tilde_pair(const SurfaceData& surf, double tl, double tj) {
    return prime_ratio_theta(surf, SurfacePoint::above(tl), SurfacePoint::above(tj)) / (tj - tl);
}

void validate_points(const SupportData& s, const FHConfig& fh) {
    validate_fh(fh, s.endpoints());
}

}  // namespace

double AsymptoticReport::term(const std::string& label) const {
    for (const auto& [l, v] : terms)
        if (l == label) return v;
    throw std::out_of_range("AsymptoticReport: no term " + label);
}

double AsymptoticReport::sum_of_terms() const {
    double s = 0;
    for (const auto& t : terms) s += t.second;
    return s;
}

// ---------------------------------------------------------------- partition function

AsymptoticReport log_partition_asym(const EquilibriumData& eq, const SurfaceData& surf, int N) {
    require_N(N);
    const auto& s = eq.support;
    const int k = s.k();
    AsymptoticReport r;
    r.n = N;
    r.k = k;
    r.kind = "partition";
    r.add("-N^2 I_V", -double(N) * N * eq.energy);
    r.add("N log 2pi", N * std::log(2 * kPi));
    r.add("-(k/12) log N", -k / 12.0 * std::log(double(N)));
    RVec om = N * surf.omega;
    r.add("log theta(N Omega)/theta(0)", log_theta_ratio(surf, om, RVec::Zero(surf.g)));
    r.add("(k/4) log 2", k / 4.0 * std::log(2.0));
    r.add("k zeta'(-1)", k * zeta_prime_minus_one<double>());
    double lp = 0;
    for (double v : eq.edge_constants) lp += std::log(v);
    r.add("-(1/24) sum log psi~", -lp / 24);
    r.add("endpoint products", endpoint_term(s));
    return r;
}

AsymptoticReport log_partition_asym_poly(const std::vector<double>& roots, double nu, int N) {
    require_N(N);
    const int k = static_cast<int>(roots.size());
    if (!(nu > nu_star(roots))) throw std::invalid_argument("log_partition_asym_poly: nu must exceed nu*");
    auto V = make_pi_potential(roots, nu);
    auto sup = closed_form_support(V);
    if (!sup) throw NumericalFailure("log_partition_asym_poly: no closed-form support", 0);
    const auto& s = *sup;
    AsymptoticReport r;
    r.n = N;
    r.k = k;
    r.kind = "partition-poly";
    r.add("-(N^2/2k)(3/2 + log nu + 2 log 2)", -double(N) * N / (2.0 * k) * (1.5 + std::log(nu) + 2 * std::log(2.0)));
    r.add("N log 2pi", N * std::log(2 * kPi));
    r.add("-(k/12) log N", -k / 12.0 * std::log(double(N)));
    if (k >= 2) {
        SurfaceData surf = build_surface(s);
        RVec om(k - 1);
        const int rr = N % k;
        for (int j = 0; j < k - 1; ++j) om(j) = rr * double(k - 1 - j) / k;
        r.add("log theta(r Omega)/theta(0)", log_theta_ratio(surf, om, RVec::Zero(k - 1)));
    } else {
        r.add("log theta(r Omega)/theta(0)", 0.0);
    }
    r.add("(k/8) log 2", k / 8.0 * std::log(2.0));
    r.add("-(k/16) log nu", -k / 16.0 * std::log(nu));
    r.add("(k/12) log k", k / 12.0 * std::log(double(k)));
    r.add("k zeta'(-1)", k * zeta_prime_minus_one<double>());
    Polynomial dp = Polynomial::from_roots(roots).derivative();
    double acc = 0;
    for (double q : s.endpoints()) acc += std::log(std::abs(dp(q)));
    r.add("-(1/16) sum log|Pi'(q)|", -acc / 16);
    r.add("endpoint products", endpoint_term(s));
    return r;
}

AsymptoticReport log_partition_two_cut_elliptic(const EquilibriumData& eq, const SurfaceData& surf, int N) {
    require_N(N);
    const auto& s = eq.support;
    if (s.k() != 2) throw std::invalid_argument("log_partition_two_cut_elliptic: needs k = 2");
    double a1 = s.a[0], b1 = s.b[0], a2 = s.a[1], b2 = s.b[1];
    double m = std::sqrt((a2 - b1) * (b2 - a1) / ((b2 - b1) * (a2 - a1)));
    AsymptoticReport r;
    r.n = N;
    r.k = 2;
    r.kind = "partition-two-cut-elliptic";
    r.add("-N^2 I_V", -double(N) * N * eq.energy);
    r.add("N log 2pi", N * std::log(2 * kPi));
    r.add("-(1/6) log N", -std::log(double(N)) / 6);
    RVec om = N * surf.omega;
    r.add("log theta(N Omega)", std::log(std::abs(theta(CVec(om.cast<cplx>()), surf.tau))));
    r.add("2 zeta'(-1)", 2 * zeta_prime_minus_one<double>());
    r.add("-(1/2) log(K/pi)", -0.5 * std::log(elliptic_K(m) / kPi));
    double lp = 0;
    for (double v : eq.edge_constants) lp += std::log(v);
    r.add("-(1/24) sum log psi~", -lp / 24);
    r.add("(1/8) log (b2-b1)(a2-a1)", std::log((b2 - b1) * (a2 - a1)) / 8);
    double acc = 0;
    for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) acc += std::log(std::abs(s.b[j] - s.a[l]));
    r.add("-(1/8) sum log|b_j - a_l|", -acc / 8);
    return r;
}

AsymptoticReport log_partition_gaussian(double sigma, int N) {
    require_N(N);
    if (!(sigma > 0)) throw std::invalid_argument("log_partition_gaussian: sigma must be positive");
    AsymptoticReport r;
    r.n = N;
    r.k = 1;
    r.kind = "partition-gaussian";
    r.add("-N^2 (3/4 - (1/2) log(1/4 sigma))", -double(N) * N * (0.75 - 0.5 * std::log(1 / (4 * sigma))));
    r.add("N log 2pi", N * std::log(2 * kPi));
    r.add("-(1/12) log N", -std::log(double(N)) / 12);
    r.add("zeta'(-1)", zeta_prime_minus_one<double>());
    return r;
}

// ---------------------------------------------------------------- smooth ratio

void validate_contours(const ContourOptions& c) {
    if (!(c.outer > 0 && c.inner > 0 && c.outer < 1 && c.inner < 1))
        throw std::invalid_argument("contours: reach fractions must lie in (0,1)");
    if (c.outer == c.inner) throw std::invalid_argument("contours: Gamma and Gamma~ coincide");
    if (c.outer + c.inner >= 1) throw std::invalid_argument("contours: Gamma and Gamma~ of adjacent bands intersect");
    if (c.min_nodes < 4 || c.max_nodes < c.min_nodes) throw std::invalid_argument("contours: bad node counts");
}

double double_contour_W(const SurfaceData& surf, const TestFunction& f, const ContourOptions& c) {
    validate_contours(c);
    if (f.p.degree() <= 0) return 0;
    const auto& s = surf.support;
    const int g = surf.g;
    double rz = c.swap ? c.inner : c.outer, rl = c.swap ? c.outer : c.inner;
    struct Pre {
        cplx z, fw, g2;
        CVec du;
    };
    auto prep = [&](double reach, int M) {
        std::vector<Pre> v;
        for (const auto& nd : ellipse_nodes(s, reach, M)) {
            Pre p;
            p.z = nd.z;
            p.fw = f(nd.z) * nd.w;
            cplx gm = gamma_fn(surf, nd.z);
            p.g2 = gm * gm;
            p.du = g > 0 ? abel_derivative(surf, SurfacePoint::at(nd.z)) : CVec(0);
            v.push_back(p);
        }
        return v;
    };
    auto eval = [&](int M) {
        auto Z = prep(rz, M), L = prep(rl, M);
        cplx s1 = 0;
        for (const auto& a : Z) {
            cplx inner = 0;
            for (const auto& b : L) {
                cplx d = a.z - b.z;
                cplx q = a.g2 / b.g2;
                inner += (q + 1.0 / q) / (d * d) * b.fw;
            }
            s1 += 0.5 * inner * a.fw;
        }
        cplx s2 = 0;
        if (g > 0) {
            CVec vz = CVec::Zero(g), vl = CVec::Zero(g);
            for (const auto& a : Z) vz += a.du * a.fw;
            for (const auto& b : L) vl += b.du * b.fw;
            s2 = -2.0 * (vz.transpose() * surf.hess_log_theta0 * vl)(0, 0);
        }
        return (s1 + s2) / 4.0;
    };
    cplx prev = eval(c.min_nodes);
    for (int M = 2 * c.min_nodes; M <= c.max_nodes; M *= 2) {
        cplx cur = eval(M);
        if (std::abs(cur - prev) <= c.tol * std::max(1.0, std::abs(cur))) {
            if (std::abs(cur.imag()) > 1e-8 * std::max(1.0, std::abs(cur)))
                throw NumericalFailure("double_contour_W: imaginary part", std::abs(cur.imag()));
            return cur.real();
        }
        prev = cur;
    }
    throw NumericalFailure("double_contour_W: no convergence", std::abs(prev));
}

double single_contour_term(const SurfaceData& surf, const TestFunction& f, const ContourOptions& c) {
    validate_contours(c);
    if (f.p.degree() <= 0) return 0;
    const auto& s = surf.support;
    Polynomial fp = f.p.derivative();
    auto eval = [&](int M) {
        cplx acc = 0;
        for (const auto& nd : ellipse_nodes(s, c.outer, M)) {
            cplx C = 0;
            for (int j = 0; j < s.k(); ++j)
                C += band_integral_R(s, j, [&](double x) { return cplx(f(x)) / (x - nd.z); });
            acc += sqrtR(s, nd.z) / (2 * kPi * I) * C * fp(nd.z) * nd.w;
        }
        return 0.5 * acc;
    };
    cplx prev = eval(c.min_nodes);
    for (int M = 2 * c.min_nodes; M <= c.max_nodes; M *= 2) {
        cplx cur = eval(M);
        if (std::abs(cur - prev) <= c.tol * std::max(1.0, std::abs(cur))) return cur.real();
        prev = cur;
    }
    throw NumericalFailure("single_contour_term: no convergence", std::abs(prev));
}

AsymptoticReport log_ratio_smooth(const EquilibriumData& eq, const SurfaceData& surf, const TestFunction& f, int N,
                                  int form, const ContourOptions& c) {
    require_N(N);
    if (form < 1 || form > 3) throw std::invalid_argument("log_ratio_smooth: form must be 1, 2 or 3");
    const auto& s = eq.support;
    const int g = surf.g;
    AsymptoticReport r;
    r.n = N;
    r.k = s.k();
    r.kind = "ratio-form" + std::to_string(form);
    r.add("N int f dmu", N * eq.integral([&](double x) { return f(x); }));
    RVec ups = upsilon(surf, f);
    if (form == 3) {
        r.basis = "hat";
        r.add("(1/2) L(f)", 0.5 * quadratic_form_L(surf, f));
        if (g > 0) {
            CVec uh = upsilon_hat(surf, ups);
            Characteristic ch{-N * surf.omega_hat, RVec::Zero(g)};
            cplx num = theta(uh, surf.tau_hat, ch, surf.theta_tol);
            cplx den = theta(CVec::Zero(g), surf.tau_hat, ch, surf.theta_tol);
            r.add("log theta^ ratio", std::log(std::abs(num / den)));
        } else {
            r.add("log theta^ ratio", 0.0);
        }
        return r;
    }
    r.add("log theta(N Omega + Upsilon)/theta(N Omega)", g > 0 ? log_theta_ratio(surf, ups, N * surf.omega) : 0.0);
    if (form == 1) {
        r.add("(1/4) double contour W", double_contour_W(surf, f, c));
        return r;
    }
    r.add("single contour", single_contour_term(surf, f, c));
    double t2 = 0, t3 = 0;
    if (g > 0) {
        // int_J R_+ f'(z) dz / (x - z) = -pi i (R f' - [R f']_+)(x) off J, [.]_+ the polynomial part at infinity
        Polynomial fp = f.p.derivative();
        Polynomial pp = polynomial_part_Rf(s, fp);
        for (int j = 0; j < g; ++j) {
            double gi = gap_integral_R(s, j, [&](double x) { return cplx(pp(x)); }).real();
            t2 += -0.5 * ups(j) * (f(s.a[j + 1]) - f(s.b[j]) - gi);
            t3 += 0.5 * (f(s.a[j + 1]) - f(s.b[j])) * ups(j);
        }
    }
    r.add("band integral with gap Cauchy transforms", t2);
    r.add("(1/2) sum (f(a_{j+1}) - f(b_j)) Upsilon_j", t3);
    return r;
}

// ---------------------------------------------------------------- counting law

double CountingLaw::mass_at(const std::vector<int>& x) const {
    for (size_t i = 0; i < points.size(); ++i)
        if (points[i] == x) return mass[i];
    return 0;
}

double CountingLaw::laplace(const RVec& s) const {
    double acc = 0;
    for (size_t i = 0; i < points.size(); ++i) {
        double e = 0;
        for (size_t j = 0; j < points[i].size(); ++j) e += s(j) * (floor(j) + points[i][j]);
        acc += mass[i] * std::exp(e);
    }
    return acc;
}

CountingLaw counting_law(const EquilibriumData& eq, const SurfaceData& surf, int N) {
    require_N(N);
    const int g = surf.g;
    if (g < 1) throw std::invalid_argument("counting_law: needs k >= 2");
    (void)eq;
    CountingLaw law;
    law.N = N;
    RVec nw = N * surf.omega_hat;
    law.floor = nw.array().floor();
    law.frac = nw - law.floor;
    RMat Y = surf.tau_hat.imag();
    Eigen::SelfAdjointEigenSolver<RMat> es(Y);
    double lmin = es.eigenvalues().minCoeff();
    // exp(-pi d^T Y d) < 1e-16 beyond this radius
    double rad = std::sqrt(std::log(1e16) / (kPi * lmin)) + 1;
    int M = static_cast<int>(std::ceil(rad)) + 1;
    std::vector<int> x(g, -M);
    std::vector<std::pair<std::vector<int>, double>> raw;
    double best = -1e300;
    while (true) {
        RVec d(g);
        for (int j = 0; j < g; ++j) d(j) = x[j] - law.frac(j);
        double e = -kPi * d.dot(Y * d);
        raw.emplace_back(x, e);
        best = std::max(best, e);
        int j = 0;
        while (j < g && x[j] == M + 1) x[j++] = -M;
        if (j == g) break;
        ++x[j];
    }
    double tot = 0;
    for (auto& [p, e] : raw)
        if (e - best >= std::log(1e-16)) {
            law.points.push_back(p);
            law.mass.push_back(std::exp(e - best));
            tot += law.mass.back();
        }
    for (auto& m : law.mass) m /= tot;
    return law;
}

double counting_laplace_theta(const SurfaceData& surf, const RVec& omega_hat, int N, const RVec& s) {
    const int g = surf.g;
    Characteristic ch{-N * omega_hat, RVec::Zero(g)};
    CVec xi = s.cast<cplx>() / (2 * kPi * I);
    cplx r = theta(xi, surf.tau_hat, ch, surf.theta_tol) / theta(CVec::Zero(g), surf.tau_hat, ch, surf.theta_tol);
    return std::exp(N * s.dot(omega_hat)) * r.real();
}

// ---------------------------------------------------------------- Fisher-Hartwig

RVec upsilon_fh(const SurfaceData& surf, const TestFunction& f, const FHConfig& fh) {
    const int g = surf.g;
    if (g == 0) return RVec(0);
    RVec u = RVec::Zero(g);
    if (!f.is_zero()) u += upsilon(surf, f);
    for (const auto& p : fh) {
        if (p.alpha != 0) u += p.alpha * upsilon_log(surf, p.t);
        // log omega_beta = pi i beta - 2 pi i beta 1{x >= t}, with beta = i beta_im
        if (p.beta_im != 0) u += 2 * kPi * p.beta_im * upsilon_indicator(surf, p.t);
    }
    return u;
}

double integral_log_omega(const EquilibriumData& eq, const FHConfig& fh) {
    double acc = 0;
    for (const auto& p : fh) {
        if (p.alpha != 0) acc += p.alpha * eq.log_potential(p.t);
        if (p.beta_im != 0) {
            double F = eq.cdf(p.t);
            acc += -kPi * p.beta_im * (F - (1 - F));
        }
    }
    return acc;
}

cplx pv_w_integral(const SurfaceData& surf, double t, const TestFunction& f) {
    const auto& s = surf.support;
    if (s.band_of(t) < 0) throw std::domain_error("pv_w_integral: t must lie inside a band");
    cplx rt = sqrtR_boundary(s, t, +1);
    cplx v = rt * divided_difference_integral(surf, t, f);
    if (surf.g > 0) {
        RVec ups = upsilon(surf, f);
        CVec gc = gap_cauchy(surf, t);
        v -= 2 * kPi * I * rt * (gc.transpose() * ups.cast<cplx>())(0, 0);
    }
    return v;
}

AsymptoticReport log_ratio_fh(const EquilibriumData& eq, const SurfaceData& surf, const TestFunction& f,
                              const FHConfig& fh, int N, const ContourOptions& c) {
    require_N(N);
    const auto& s = eq.support;
    validate_points(s, fh);
    const int g = surf.g;
    const double lN = std::log(double(N));
    double A = 0;
    for (const auto& p : fh) A += p.alpha;
    AsymptoticReport r;
    r.n = N;
    r.k = s.k();
    r.kind = "fisher-hartwig";
    r.add("N int (f + log omega) dmu", N * (eq.integral([&](double x) { return f(x); }) + integral_log_omega(eq, fh)));
    r.add("log theta(N Omega + Upsilon(f + log omega))/theta(N Omega)",
          g > 0 ? log_theta_ratio(surf, upsilon_fh(surf, f, fh), N * surf.omega) : 0.0);
    double pw = 0;
    for (const auto& p : fh) pw += (p.alpha * p.alpha / 4 - fh_beta_sq(p)) * lN;
    r.add("sum (alpha^2/4 - beta^2) log N", pw);
    r.add("(1/4) double contour W", f.p.degree() > 0 ? double_contour_W(surf, f, c) : 0.0);
    double aq = 0;
    if (A != 0 && !f.is_zero()) {
        Polynomial qt = tilde_Q(surf);
        cplx acc = 0;
        for (int j = 0; j < s.k(); ++j) acc += band_integral_R(s, j, [&](double x) { return cplx(f(x) * qt(x)); });
        aq = (-A * acc / (2 * kPi * I)).real();
    }
    r.add("-A int f Q~ / R_+ dx/(2 pi i)", aq);
    r.add("-A^2 C_S / 4", A != 0 ? -A * A / 4 * c_surface(surf) : 0.0);
    double sing = 0;
    for (const auto& p : fh) {
        sing += -p.alpha / 2 * f(p.t);
        if (p.beta_im != 0 && !f.is_zero()) sing += (p.beta_im / kPi * pv_w_integral(surf, p.t, f)).real();
    }
    r.add("sum -alpha f(t)/2 + (beta/pi i) PV int w f", sing);
    double bg = 0, dens = 0;
    for (const auto& p : fh) {
        bg += log_barnes_pair(p.alpha, p.beta_im) - log_barnes_g<double>(1 + p.alpha);
        dens += (p.alpha * p.alpha / 4 - fh_beta_sq(p)) * std::log(2 * kPi * eq.psi(p.t));
    }
    r.add("Barnes G factors", bg);
    r.add("sum (alpha^2/4 - beta^2) log 2 pi psi(t)", dens);
    r.add("|Theta~(t+,t+)|^{beta^2} and edge brackets", edge_group(surf, fh, A));
    // pairs are ordered by position, t_j < t_l
    FHConfig ord = fh;
    std::sort(ord.begin(), ord.end(), [](const FHSingularity& a, const FHSingularity& b) { return a.t < b.t; });
    double pair = 0;
    for (size_t j = 0; j < ord.size(); ++j)
        for (size_t l = j + 1; l < ord.size(); ++l) {
            const auto &pj = ord[j], &pl = ord[l];
            double bb = -pj.beta_im * pl.beta_im;  // beta_j beta_l
            pair += -kPi / 2 * (pl.alpha * pj.beta_im - pj.alpha * pl.beta_im);
            pair += (2 * bb - pj.alpha * pl.alpha / 2) * std::log(std::abs(pj.t - pl.t));
            if (bb != 0) pair += 2 * bb * std::log(std::abs(theta_tilde_pair(surf, pl.t, pj.t)));
        }
    r.add("pairwise factors", pair);
    return r;
}

AsymptoticReport moment_abs_charpoly_report(const EquilibriumData& eq, const SurfaceData& surf, const FHConfig& fh,
                                            int N) {
    require_N(N);
    const auto& s = eq.support;
    validate_points(s, fh);
    for (const auto& p : fh)
        if (p.beta_im != 0) throw std::invalid_argument("moment_abs_charpoly: all beta must vanish");
    const int g = surf.g;
    double A = 0;
    for (const auto& p : fh) A += p.alpha;
    AsymptoticReport r;
    r.n = N;
    r.k = s.k();
    r.kind = "abs-charpoly-moment";
    r.add("N int log omega_alpha dmu", N * integral_log_omega(eq, fh));
    RVec ups = RVec::Zero(g);
    for (const auto& p : fh)
        if (g > 0 && p.alpha != 0) ups += p.alpha * upsilon_log(surf, p.t);
    r.add("log theta ratio", g > 0 ? log_theta_ratio(surf, ups, N * surf.omega) : 0.0);
    r.add("-A^2 C_S / 4", A != 0 ? -A * A / 4 * c_surface(surf) : 0.0);
    double pw = 0, bg = 0, dens = 0;
    for (const auto& p : fh) {
        pw += p.alpha * p.alpha / 4 * std::log(double(N));
        bg += 2 * log_barnes_g<double>(1 + p.alpha / 2) - log_barnes_g<double>(1 + p.alpha);
        dens += p.alpha * p.alpha / 4 * std::log(2 * kPi * eq.psi(p.t));
    }
    r.add("sum (alpha^2/4) log N", pw);
    r.add("Barnes G factors", bg);
    r.add("sum (alpha^2/4) log 2 pi psi(t)", dens);
    double pair = 0;
    for (size_t j = 0; j < fh.size(); ++j)
        for (size_t l = j + 1; l < fh.size(); ++l)
            pair += -fh[j].alpha * fh[l].alpha / 2 * std::log(std::abs(fh[j].t - fh[l].t));
    r.add("pairwise |t_j - t_l|^{-alpha_j alpha_l/2}", pair);
    return r;
}

double moment_abs_charpoly(const EquilibriumData& eq, const SurfaceData& surf, const FHConfig& fh, int N) {
    return moment_abs_charpoly_report(eq, surf, fh, N).total;
}

AsymptoticReport counting_mgf_report(const EquilibriumData& eq, const SurfaceData& surf,
                                     const std::vector<CountingPoint>& pts, int N, int indicator_sign) {
    require_N(N);
    const auto& s = eq.support;
    if (indicator_sign != 1 && indicator_sign != -1) throw std::invalid_argument("counting_mgf: sign must be +-1");
    FHConfig fh;
    for (const auto& p : pts) fh.push_back({p.t, 0.0, -p.v});
    validate_points(s, fh);
    const int g = surf.g;
    AsymptoticReport r;
    r.n = N;
    r.k = s.k();
    r.kind = "counting-mgf";
    double pw = 0, bg = 0, dens = 0, tt = 0;
    for (const auto& p : pts) {
        double v2 = p.v * p.v;
        pw += v2 * std::log(double(N));
        bg += log_barnes_pair(0.0, p.v);
        dens += v2 * std::log(2 * kPi * eq.psi(p.t));
        if (v2 != 0) tt += -v2 * std::log(std::abs(theta_tilde_diag(surf, SurfacePoint::above(p.t))));
    }
    r.add("sum v^2 log N", pw);
    r.add("Barnes G(1+iv)G(1-iv)", bg);
    r.add("sum v^2 log 2 pi psi(t)", dens);
    r.add("|Theta~(t+,t+)|^{-v^2}", tt);
    RVec shift = RVec::Zero(g);
    for (const auto& p : pts)
        if (g > 0 && p.v != 0) shift += indicator_sign * 2 * kPi * p.v * upsilon_indicator(surf, p.t);
    r.add("log theta ratio", g > 0 ? log_theta_ratio(surf, shift, N * surf.omega) : 0.0);
    double pair = 0;
    for (size_t j = 0; j < pts.size(); ++j)
        for (size_t l = j + 1; l < pts.size(); ++l) {
            double vv = pts[j].v * pts[l].v;
            if (vv == 0) continue;
            pair += -2 * vv * std::log(std::abs(pts[j].t - pts[l].t));
            pair += -2 * vv * std::log(std::abs(theta_tilde_pair(surf, pts[l].t, pts[j].t)));
        }
    r.add("pairwise factors", pair);
    return r;
}

double counting_mgf_fh(const EquilibriumData& eq, const SurfaceData& surf, const std::vector<CountingPoint>& pts, int N,
                       int indicator_sign) {
    return counting_mgf_report(eq, surf, pts, N, indicator_sign).total;
}

}  // namespace mcut
