#include "mcut/equilibrium.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mcut {

// ---------------------------------------------------------------- support

SupportData::SupportData(std::vector<double> a_, std::vector<double> b_) : a(std::move(a_)), b(std::move(b_)) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("support: need k >= 1 bands");
    for (int j = 0; j < k(); ++j) {
        if (!(a[j] < b[j])) throw std::invalid_argument("support: a_j < b_j violated");
        if (j > 0 && !(b[j - 1] < a[j])) throw std::invalid_argument("support: bands must interleave");
    }
}

SupportData SupportData::from_endpoints(const std::vector<double>& ep) {
    if (ep.size() % 2 != 0 || ep.empty()) throw std::invalid_argument("support: need 2k endpoints");
    std::vector<double> a, b;
    for (size_t i = 0; i < ep.size(); i += 2) {
        a.push_back(ep[i]);
        b.push_back(ep[i + 1]);
    }
    return SupportData(a, b);
}

std::vector<double> SupportData::endpoints() const {
    std::vector<double> ep;
    for (int j = 0; j < k(); ++j) {
        ep.push_back(a[j]);
        ep.push_back(b[j]);
    }
    return ep;
}

double SupportData::min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (int j = 0; j + 1 < k(); ++j) g = std::min(g, a[j + 1] - b[j]);
    return g;
}

double SupportData::min_band_width() const {
    double w = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k(); ++j) w = std::min(w, b[j] - a[j]);
    return w;
}

int SupportData::band_of(double x) const {
    for (int j = 0; j < k(); ++j)
        if (x > a[j] && x < b[j]) return j;
    return -1;
}

cplx sqrtR(const SupportData& s, cplx z) {
    cplx r = 1;
    for (int j = 0; j < s.k(); ++j) r *= std::sqrt(z - s.a[j]) * std::sqrt(z - s.b[j]);
    return r;
}

cplx sqrtR_boundary(const SupportData& s, double x, int side) {
    double mag = 1;
    int ipow = 0;
    for (double c : s.endpoints()) {
        mag *= std::sqrt(std::abs(x - c));
        if (x < c) ++ipow;
    }
    // each factor below its endpoint contributes +-i
    static const cplx pw[4] = {1, cplx(0, 1), -1, cplx(0, -1)};
    int idx = ((side > 0 ? ipow : -ipow) % 4 + 4) % 4;
    return mag * pw[idx];
}

double sqrtR_regular(const SupportData& s, double q) {
    double r = 1;
    for (double c : s.endpoints())
        if (c != q) r *= std::sqrt(std::abs(q - c));
    return r;
}

std::vector<double> endpoint_series(const SupportData& s, double p, int n) {
    std::vector<double> out(n + 1, 0.0);
    out[0] = 1;
    for (double c : s.endpoints()) {
        // (1 - c w)^p = sum binom(p, m) (-c)^m w^m
        std::vector<double> f(n + 1, 0.0);
        f[0] = 1;
        for (int m = 1; m <= n; ++m) f[m] = f[m - 1] * (p - (m - 1)) / m * (-c);
        std::vector<double> prod(n + 1, 0.0);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j) prod[i + j] += out[i] * f[j];
        out = prod;
    }
    return out;
}

// ---------------------------------------------------------------- endpoint system

Polynomial h_from_potential(const PotentialSpec& V, const SupportData& s) {
    const Polynomial& dv = V.dV_poly();
    const int k = s.k(), d = dv.degree();
    if (d - k < 0) return {};
    auto dn = endpoint_series(s, -0.5, d + 1);
    // V'/R^{1/2} = sum_i v_i z^{i-k} sum_n d_n z^{-n}; keep powers m >= 0
    std::vector<double> c(d - k + 1, 0.0);
    for (int m = 0; m <= d - k; ++m)
        for (int i = 0; i <= d; ++i) {
            int n = i - k - m;
            if (n >= 0) c[m] += dv.coeff(i) * dn[n];
        }
    return 0.5 * Polynomial(c);
}

double h_contour(const PotentialSpec& V, const SupportData& s, double x) {
    double lo = std::min(s.a.front(), x), hi = std::max(s.b.back(), x);
    double r = 0.5 * (hi - lo) + 0.5 * (s.b.back() - s.a.front()) + 1.0;
    auto f = [&](cplx z) { return V.dV(z) / ((z - x) * sqrtR(s, z)); };
    cplx v = integrate_contour(f, ContourSpec::circle(0.5 * (lo + hi), r), Precision(16, 1e-14));
    return (v / cplx(0, 4 * M_PI)).real();
}

namespace {

// gap integral of R^{1/2} g with the sqrt edges absorbed into the Jacobi weight
double gap_integral(const SupportData& s, int j, const std::function<double(double)>& g) {
    const double lo = s.b[j], hi = s.a[j + 1];
    auto f = [&](double x) {
        double rest = 1;
        for (double c : s.endpoints())
            if (c != lo && c != hi) rest *= std::sqrt(std::abs(x - c));
        return rest * g(x);
    };
    // sign of the real boundary value of R^{1/2} on gap j (0-based): (-1)^{k-1-j}
    double sign = ((s.k() - 1 - j) % 2 == 0) ? 1.0 : -1.0;
    return sign * integrate_singular(f, lo, hi, 0.5, 0.5, Precision(16, 1e-15));
}

}  // namespace

std::vector<double> endpoint_residuals(const PotentialSpec& V, const SupportData& s) {
    const Polynomial& dv = V.dV_poly();
    const int k = s.k(), d = dv.degree();
    auto dn = endpoint_series(s, -0.5, d + k + 2);
    std::vector<double> res;
    for (int j = 0; j <= k; ++j) {
        // coefficient of z^{-1} in V'(z) z^j / R^{1/2}(z)
        double m = 0;
        for (int i = 0; i <= d; ++i) {
            int n = i + j - k + 1;
            if (n >= 0) m += dv.coeff(i) * dn[n];
        }
        res.push_back(m - (j == k ? 2.0 : 0.0));
    }
    Polynomial h = h_from_potential(V, s);
    for (int j = 0; j + 1 < k; ++j) res.push_back(gap_integral(s, j, [&](double x) { return h(x); }));
    return res;
}

// ---------------------------------------------------------------- equilibrium data

namespace {

// int over band j of g(y) * |R(y)|^{1/2} * sign * h(y) / pi dy on [a_j, lim], in theta variables
double band_piece(const SupportData& s, const Polynomial& h, int j, double theta_hi,
                  const std::function<double(double)>& g) {
    const double a = s.a[j], b = s.b[j], half = 0.5 * (b - a);
    const double sign = ((s.k() - 1 - j) % 2 == 0) ? 1.0 : -1.0;
    auto f = [&](double th) {
        double y = a + half * (1 - std::cos(th));
        double rest = 1;
        for (int l = 0; l < s.k(); ++l)
            if (l != j) rest *= std::sqrt(std::abs((y - s.a[l]) * (y - s.b[l])));
        double st = std::sin(th);
        return g(y) * sign * h(y) * rest * half * half * st * st / M_PI;
    };
    int n = 32;
    double prev = gl_panels(f, 0.0, theta_hi, 1, n);
    while (true) {
        n *= 2;
        double cur = gl_panels(f, 0.0, theta_hi, 1, n);
        double err = std::abs(cur - prev);
        if (err <= 1e-15 * std::max(1.0, std::abs(cur))) return cur;
        if (n >= 4096) throw NumericalFailure("band integral: no convergence", err);
        prev = cur;
    }
}

}  // namespace

double EquilibriumData::psi(double x) const {
    int j = support.band_of(x);
    if (j < 0) return 0.0;
    const double sign = ((k() - 1 - j) % 2 == 0) ? 1.0 : -1.0;
    return sign * std::abs(sqrtR_boundary(support, x)) * h(x) / M_PI;
}

double EquilibriumData::band_integral(int j, const std::function<double(double)>& g) const {
    return band_piece(support, h, j, M_PI, g);
}

double EquilibriumData::integral(const std::function<double(double)>& g) const {
    double s = 0;
    for (int j = 0; j < k(); ++j) s += band_integral(j, g);
    return s;
}

double EquilibriumData::cdf(double x) const {
    double s = 0;
    for (int j = 0; j < k(); ++j) {
        if (x >= support.b[j]) {
            s += band_mass[j];
        } else if (x > support.a[j]) {
            double t = 1 - 2 * (x - support.a[j]) / (support.b[j] - support.a[j]);
            double th = std::acos(std::clamp(t, -1.0, 1.0));
            s += band_piece(support, h, j, th, [](double) { return 1.0; });
        }
    }
    return s;
}

double EquilibriumData::log_potential(double x) const {
    boost::math::quadrature::tanh_sinh<double> ts;
    double total = 0;
    for (int j = 0; j < k(); ++j) {
        const double a = support.a[j], b = support.b[j], half = 0.5 * (b - a);
        const double sign = ((k() - 1 - j) % 2 == 0) ? 1.0 : -1.0;
        const bool on_band = x >= a && x <= b;
        const double thx = on_band ? std::acos(std::clamp(1 - 2 * (x - a) / half / 2, -1.0, 1.0)) : 0.0;
        auto dens = [&](double th) {
            double y = a + half * (1 - std::cos(th));
            double rest = 1;
            for (int l = 0; l < k(); ++l)
                if (l != j) rest *= std::sqrt(std::abs((y - support.a[l]) * (y - support.b[l])));
            double st = std::sin(th);
            return sign * h(y) * rest * half * half * st * st / M_PI;
        };
        // integrand on [lo, hi]; x - y(theta) = -2 half sin((theta+thx)/2) sin((theta-thx)/2)
        auto piece = [&](double lo, double hi) {
            auto f = [&, lo, hi](double th, double thc) {
                double d = th - thx;
                if (thx == lo && thc < 0) d = -thc;
                if (thx == hi && thc > 0) d = -thc;
                double dist = std::abs(2 * half * std::sin(0.5 * (th + thx)) * std::sin(0.5 * d));
                return std::log(dist) * dens(th);
            };
            return ts.integrate(f, lo, hi, 1e-15);
        };
        if (on_band) {
            if (thx > 0) total += piece(0.0, thx);
            if (thx < M_PI) total += piece(thx, M_PI);
        } else {
            auto f = [&](double th) { return std::log(std::abs(x - (a + half * (1 - std::cos(th))))) * dens(th); };
            total += ts.integrate(f, 0.0, M_PI, 1e-15);
        }
    }
    return total;
}

double EquilibriumData::el_function(double x) const {
    const auto ep = support.endpoints();
    if (support.band_of(x) >= 0) return 0.0;
    for (double c : ep)
        if (x == c) return 0.0;
    // nearest support endpoint
    double q = ep.front();
    for (double c : ep)
        if (std::abs(c - x) < std::abs(q - x)) q = c;
    auto f = [&](double u) {
        double s = q + (x - q) * u * u;
        return sqrtR_boundary(support, s).real() * h(s) * 2 * (x - q) * u;
    };
    return -2 * integrate_adaptive(f, 0.0, 1.0, 1e-15);
}

EquilibriumData assemble_equilibrium(const PotentialSpec& V, const SupportData& s, const Polynomial& h) {
    EquilibriumData eq;
    eq.support = s;
    eq.h = h;
    for (int j = 0; j < s.k(); ++j) eq.band_mass.push_back(eq.band_integral(j, [](double) { return 1.0; }));
    eq.omega = filling_fractions(eq);
    eq.edge_constants = edge_constants(eq);
    eq.int_V = eq.integral([&](double x) { return V.V(x); });
    eq.ell = V.V(s.b[0]) - 2 * eq.log_potential(s.b[0]);
    eq.energy = energy(eq, V);
    return eq;
}

std::vector<double> filling_fractions(const EquilibriumData& eq) {
    std::vector<double> om;
    for (int j = 0; j + 1 < eq.k(); ++j) {
        double s = 0;
        for (int l = j + 1; l < eq.k(); ++l) s += eq.band_mass[l];
        om.push_back(s);
    }
    return om;
}

std::vector<double> edge_constants(const EquilibriumData& eq) {
    std::vector<double> out;
    for (double q : eq.support.endpoints()) out.push_back(std::abs(eq.h(q)) * sqrtR_regular(eq.support, q));
    return out;
}

double energy(const EquilibriumData& eq, const PotentialSpec&) { return eq.ell / 2 + eq.int_V / 2; }

void check_regular(const EquilibriumData& eq, const PotentialSpec& V, double margin) {
    const auto& s = eq.support;
    const int k = s.k();
    double hmax = 0;
    for (int j = 0; j < k; ++j)
        for (int i = 0; i <= 200; ++i) hmax = std::max(hmax, std::abs(eq.h(s.a[j] + (s.b[j] - s.a[j]) * i / 200.0)));
    for (int j = 0; j < k; ++j) {
        const double sign = ((k - 1 - j) % 2 == 0) ? 1.0 : -1.0;
        for (int i = 0; i <= 200; ++i) {
            double x = s.a[j] + (s.b[j] - s.a[j]) * i / 200.0;
            if (!(sign * eq.h(x) > margin * hmax)) {
                std::ostringstream os;
                os << "not " << k << "-cut regular: h_V vanishes or has the wrong sign on band " << j + 1
                   << " near x = " << x;
                throw NotRegular(os.str());
            }
        }
    }
    auto check = [&](double x) {
        double e = eq.el_function(x);
        if (!(e < -margin)) {
            std::ostringstream os;
            os << "not " << k << "-cut regular: Euler-Lagrange inequality fails at x = " << x << " (value " << e
               << ")";
            throw NotRegular(os.str());
        }
    };
    for (int j = 0; j + 1 < k; ++j) {
        double lo = s.b[j], hi = s.a[j + 1], w = hi - lo;
        for (int i = 0; i <= 100; ++i) check(lo + w * (0.01 + 0.98 * i / 100.0));
    }
    // tails out to the radius where the crude bound 2 log(|x|+M) - V(x) + ell < -margin takes over
    const double M = std::max(std::abs(s.a.front()), std::abs(s.b.back()));
    const double w = s.b.back() - s.a.front();
    for (int side : {+1, -1}) {
        double edge = side > 0 ? s.b.back() : s.a.front();
        double step = 0.01 * w;
        double x = edge + side * step;
        for (int i = 0; i < 100000; ++i) {
            check(x);
            if (2 * std::log(std::abs(x) + M) - V.V(x) + eq.ell < -margin) break;
            step *= 1.05;
            x += side * step;
        }
    }
}

// ---------------------------------------------------------------- initial supports

std::vector<double> real_roots(const Polynomial& p) {
    const int d = p.degree();
    std::vector<double> out;
    if (d < 1) return out;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) C(i, i - 1) = 1;
    for (int i = 0; i < d; ++i) C(i, d - 1) = -p.coeff(i) / p.leading();
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    Polynomial dp = p.derivative();
    double scale = 1;
    for (int i = 0; i < d; ++i) scale = std::max(scale, std::abs(p.coeff(i) / p.leading()));
    for (int i = 0; i < d; ++i) {
        std::complex<double> z = es.eigenvalues()(i);
        if (std::abs(z.imag()) > 1e-6 * scale) continue;
        double x = z.real();
        for (int it = 0; it < 50; ++it) {
            double dx = p(x) / dp(x);
            if (!std::isfinite(dx)) break;
            x -= dx;
            if (std::abs(dx) < 1e-16 * (1 + std::abs(x))) break;
        }
        out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<SupportData> closed_form_support(const PotentialSpec& V) {
    switch (V.kind) {
        case PotentialKind::gaussian: {
            double r = 1 / std::sqrt(V.sigma);
            return SupportData({-r}, {r});
        }
        case PotentialKind::chebyshev: {
            // sigma T_k(x)^2 = 1: k theta = +-arccos(c) + 2 pi m with c = +-1/sqrt(sigma)
            std::vector<double> ep;
            const int k = V.k;
            for (double c : {1 / std::sqrt(V.sigma), -1 / std::sqrt(V.sigma)}) {
                double ac = std::acos(c);
                for (int m = 0; m <= k; ++m)
                    for (double th : {(ac + 2 * M_PI * m) / k, (2 * M_PI * m - ac) / k})
                        if (th >= 0 && th <= M_PI) ep.push_back(std::cos(th));
            }
            std::sort(ep.begin(), ep.end());
            ep.erase(std::unique(ep.begin(), ep.end(), [](double x, double y) { return std::abs(x - y) < 1e-14; }),
                     ep.end());
            if (static_cast<int>(ep.size()) != 2 * k) return std::nullopt;
            return SupportData::from_endpoints(ep);
        }
        case PotentialKind::polynomial_square: {
            Polynomial pi = Polynomial::from_roots(V.roots);
            double c = 1 / std::sqrt(V.nu);
            auto r1 = real_roots(pi - Polynomial::constant(c));
            auto r2 = real_roots(pi + Polynomial::constant(c));
            std::vector<double> ep = r1;
            ep.insert(ep.end(), r2.begin(), r2.end());
            std::sort(ep.begin(), ep.end());
            if (static_cast<int>(ep.size()) != 2 * V.k) return std::nullopt;
            return SupportData::from_endpoints(ep);
        }
        case PotentialKind::polynomial: return std::nullopt;
    }
    return std::nullopt;
}

SupportData fekete_support(const PotentialSpec& V, int k, int M) {
    // window where V stays within a few units of its minimum
    Polynomial d2 = V.dV_poly().derivative();
    double R = V.growth_radius();
    double vmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i) vmin = std::min(vmin, V.V(-R + 2 * R * i / 4000.0));
    double lo = R, hi = -R;
    for (int i = 0; i <= 4000; ++i) {
        double x = -R + 2 * R * i / 4000.0;
        if (V.V(x) <= vmin + 4) lo = std::min(lo, x), hi = std::max(hi, x);
    }
    Eigen::VectorXd x(M);
    for (int i = 0; i < M; ++i) x(i) = lo + (hi - lo) * (i + 0.5) / M;
    auto energy_of = [&](const Eigen::VectorXd& y) {
        double e = 0;
        for (int i = 0; i < M; ++i) {
            e += V.V(y(i)) / M;
            for (int j = i + 1; j < M; ++j) e -= 2.0 / (double(M) * M) * std::log(std::abs(y(i) - y(j)));
        }
        return e;
    };
    auto relax = [&](Eigen::VectorXd& x, double& e) {
        double mu = 1e-3;
        for (int it = 0; it < 400; ++it) {
            Eigen::VectorXd g(M);
            Eigen::MatrixXd H = Eigen::MatrixXd::Zero(M, M);
            for (int i = 0; i < M; ++i) {
                double gi = V.dV(x(i)), hii = d2(x(i));
                for (int j = 0; j < M; ++j) {
                    if (j == i) continue;
                    double dx = x(i) - x(j);
                    gi -= 2.0 / M / dx;
                    hii += 2.0 / M / (dx * dx);
                    H(i, j) = -2.0 / M / (dx * dx);
                }
                g(i) = gi;
                H(i, i) = hii;
            }
            if (g.lpNorm<Eigen::Infinity>() < 1e-10) break;
            bool accepted = false;
            for (int tries = 0; tries < 30 && !accepted; ++tries) {
                Eigen::MatrixXd Hs = H + mu * Eigen::MatrixXd::Identity(M, M);
                Eigen::LLT<Eigen::MatrixXd> llt(Hs);
                if (llt.info() != Eigen::Success) {
                    mu *= 10;
                    continue;
                }
                Eigen::VectorXd xn = x - llt.solve(g);
                bool ordered = true;
                for (int i = 0; i + 1 < M; ++i) ordered = ordered && xn(i) < xn(i + 1);
                double en = ordered ? energy_of(xn) : std::numeric_limits<double>::infinity();
                if (en < e) {
                    x = xn;
                    e = en;
                    mu = std::max(mu / 10, 1e-12);
                    accepted = true;
                } else {
                    mu *= 10;
                }
            }
            if (!accepted) break;
        }
    };
    auto cuts_of = [&](const Eigen::VectorXd& y) {
        std::vector<std::pair<double, int>> gaps;
        for (int i = 0; i + 1 < M; ++i) gaps.push_back({y(i + 1) - y(i), i});
        std::sort(gaps.begin(), gaps.end(), std::greater<>());
        std::vector<int> cuts;
        for (int j = 0; j + 1 < k; ++j) cuts.push_back(gaps[j].second);
        std::sort(cuts.begin(), cuts.end());
        return cuts;
    };
    double e = energy_of(x);
    relax(x, e);
    // particles cannot cross a gap during relaxation; move edge particles across gaps while it lowers the energy
    for (int round = 0; round < M && k > 1; ++round) {
        bool moved = false;
        auto cuts = cuts_of(x);
        for (size_t ci = 0; ci < cuts.size(); ++ci) {
            const int c = cuts[ci];
            // sizes of the bands left and right of this gap; a donor keeps at least two particles
            const int left = c + 1 - (ci > 0 ? cuts[ci - 1] + 1 : 0);
            const int right = (ci + 1 < cuts.size() ? cuts[ci + 1] : M - 1) - c;
            for (int dir : {+1, -1}) {
                if ((dir > 0 ? left : right) <= 2) continue;
                Eigen::VectorXd y = x;
                if (dir > 0) {
                    if (c + 2 >= M) continue;
                    y(c) = x(c + 1) - 0.5 * (x(c + 2) - x(c + 1));
                } else {
                    if (c < 1) continue;
                    y(c + 1) = x(c) + 0.5 * (x(c) - x(c - 1));
                }
                std::sort(y.data(), y.data() + M);
                double ey = energy_of(y);
                relax(y, ey);
                if (ey < e - 1e-14) {
                    x = y;
                    e = ey;
                    moved = true;
                    break;
                }
            }
            if (moved) break;
        }
        if (!moved) break;
    }
    std::vector<int> cuts = cuts_of(x);
    std::vector<double> ep;
    int start = 0;
    for (int j = 0; j < k; ++j) {
        int end = j + 1 < k ? cuts[j] : M - 1;
        double sl = end > start ? x(start + 1) - x(start) : 0.01;
        double sr = end > start ? x(end) - x(end - 1) : 0.01;
        ep.push_back(x(start) - 0.5 * sl);
        ep.push_back(x(end) + 0.5 * sr);
        start = end + 1;
    }
    return SupportData::from_endpoints(ep);
}

// ---------------------------------------------------------------- forward solver

EquilibriumData solve_equilibrium(const PotentialSpec& V, int k, const SolveOptions& opt) {
    if (k < 1) throw std::invalid_argument("solve_equilibrium: k must be positive");
    if (V.poly.degree() < 2 * k) throw NotRegular("not k-cut regular: degree of V too small for k bands");
    SupportData init;
    if (opt.init) {
        init = *opt.init;
    } else if (auto cf = closed_form_support(V); cf && cf->k() == k) {
        init = *cf;
    } else {
        init = fekete_support(V, k);
    }
    if (init.k() != k) throw std::invalid_argument("solve_equilibrium: initial support has wrong band count");
    std::function<Vec<double>(const Vec<double>&)> F = [&](const Vec<double>& x) {
        std::vector<double> ep(x.data(), x.data() + x.size());
        auto r = endpoint_residuals(V, SupportData::from_endpoints(ep));
        return Vec<double>(Eigen::Map<Vec<double>>(r.data(), r.size()));
    };
    auto ep0 = init.endpoints();
    Vec<double> x0 = Eigen::Map<Vec<double>>(ep0.data(), ep0.size());
    Vec<double> x;
    try {
        NewtonOptions no;
        no.residual_tol = 1e-12;
        x = solve_newton<double>(F, x0, opt.prec, no);
    } catch (const std::exception& e) {
        throw NotRegular(std::string("not k-cut regular: endpoint Newton failed: ") + e.what());
    }
    std::vector<double> ep(x.data(), x.data() + x.size());
    SupportData s = SupportData::from_endpoints(ep);
    EquilibriumData eq = assemble_equilibrium(V, s, h_from_potential(V, s));
    check_regular(eq, V, opt.el_margin);
    return eq;
}

// ---------------------------------------------------------------- inverse construction

InverseResult potential_from_support(const SupportData& J, double vhat) {
    const int k = J.k();
    std::vector<double> qc(k, 0.0);
    qc[k - 1] = 1;
    if (k > 1) {
        Mat<double> B(k - 1, k - 1);
        Vec<double> rhs(k - 1);
        for (int j = 0; j + 1 < k; ++j) {
            for (int l = 0; l + 1 < k; ++l) B(j, l) = gap_integral(J, j, [l](double x) { return std::pow(x, l); });
            rhs(j) = -gap_integral(J, j, [k](double x) { return std::pow(x, k - 1); });
        }
        Vec<double> sol = solve_linear<double>(B, rhs).x;
        for (int l = 0; l + 1 < k; ++l) qc[l] = sol(l);
    }
    Polynomial q(qc);
    auto e = endpoint_series(J, 0.5, 2 * k + 2);
    // q R^{1/2} = sum_i q_i z^{i+k} sum_n e_n z^{-n}
    double cm1 = 0;
    for (int i = 0; i < k; ++i) cm1 += qc[i] * e[i + k + 1];
    const double cJ = -M_PI * cm1;
    if (!(cJ > 0)) throw std::invalid_argument("potential_from_support: degenerate support");
    std::vector<double> P(2 * k, 0.0);
    for (int m = 0; m < 2 * k; ++m)
        for (int i = 0; i < k; ++i) {
            int n = i + k - m;
            if (n >= 0) P[m] += qc[i] * e[n];
        }
    Polynomial dV = (2 * M_PI / cJ) * Polynomial(P);
    Polynomial Vp = dV.integral();
    Vp = Vp + Polynomial::constant(vhat - Vp(1.0));
    InverseResult out{make_polynomial_potential(Vp.coeffs()), {}, q, cJ};
    out.eq = assemble_equilibrium(out.V, J, (M_PI / cJ) * q);
    return out;
}

}  // namespace mcut
