#include "mcut/riemann.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <sstream>

namespace mcut {

namespace {

constexpr double kPi = M_PI;
const cplx I(0, 1);

// composite Gauss-Legendre on [lo,hi] with node doubling; f returns a CVec of size dim
template <class F>
CVec gl_vec(F&& f, double lo, double hi, int dim, double tol = 1e-15, int nmax = 4096) {
    auto rule = [&](int n, double& l1) {
        const auto& r = gauss_legendre<double>(n);
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        CVec s = CVec::Zero(dim);
        l1 = 0;
        for (int i = 0; i < n; ++i) {
            CVec v = f(mid + half * r.x[i]);
            s += r.w[i] * v;
            l1 += r.w[i] * v.norm();
        }
        l1 *= std::abs(half);
        return CVec(s * half);
    };
    double l1 = 0;
    CVec prev = rule(16, l1);
    double err = 0;
    for (int n = 32; n <= nmax; n *= 2) {
        CVec cur = rule(n, l1);
        err = (cur - prev).norm();
        if (err <= tol * std::max(cur.norm(), 1e-2 * l1) || err <= 64 * 2.2e-16 * l1) return cur;
        prev = cur;
    }
    throw NumericalFailure("riemann: quadrature did not converge", err);
}

// segments 0..2k-2: even index 2j is band j, odd index 2j+1 is gap j
struct Segment {
    double lo, hi;
    bool band;
    cplx phase;  // R^{1/2}_+ = phase * sqrt((y-lo)(hi-y)) * regular(y)
};

Segment segment(const SupportData& s, int i) {
    Segment sg;
    sg.band = (i % 2 == 0);
    const int j = i / 2;
    sg.lo = sg.band ? s.a[j] : s.b[j];
    sg.hi = sg.band ? s.b[j] : s.a[j + 1];
    cplx r = sqrtR_boundary(s, 0.5 * (sg.lo + sg.hi), +1);
    sg.phase = r / std::abs(r);
    sg.phase = cplx(std::round(sg.phase.real()), std::round(sg.phase.imag()));
    return sg;
}

double regular_part(const SupportData& s, double y, double lo, double hi) {
    double r = 1;
    for (double c : s.endpoints())
        if (c != lo && c != hi) r *= std::sqrt(std::abs(y - c));
    return r;
}

// y(theta) = lo + w sin^2(theta/2), evaluated from the nearer end
double seg_y(const Segment& sg, double th) {
    double w = sg.hi - sg.lo;
    if (th <= 0.5 * kPi) {
        double sn = std::sin(0.5 * th);
        return sg.lo + w * sn * sn;
    }
    double cs = std::cos(0.5 * th);
    return sg.hi - w * cs * cs;
}

double seg_theta(const Segment& sg, double y) {
    double w = sg.hi - sg.lo;
    if (y <= sg.lo) return 0;
    if (y >= sg.hi) return kPi;
    if (y - sg.lo < sg.hi - y) return 2 * std::asin(std::sqrt((y - sg.lo) / w));
    return 2 * std::acos(std::sqrt((sg.hi - y) / w));
}

// int g(y) / R^{1/2}_side(y) dy over the part of segment i with theta in [th0, th1]
template <class G>
CVec seg_integral(const SupportData& s, int i, double th0, double th1, int side, int dim, G&& g) {
    Segment sg = segment(s, i);
    cplx ph = (sg.band && side < 0) ? -sg.phase : sg.phase;
    auto f = [&](double th) {
        double y = seg_y(sg, th);
        return CVec(g(y) / (ph * regular_part(s, y, sg.lo, sg.hi)));
    };
    if (th1 <= th0) return CVec::Zero(dim);
    return gl_vec(f, th0, th1, dim);
}

CVec qvals(const SurfaceData& surf, cplx z) {
    CVec v(surf.g);
    for (int j = 0; j < surf.g; ++j) {
        cplx acc = 0;
        for (int r = surf.g - 1; r >= 0; --r) acc = acc * z + surf.Q(j, r);
        v(j) = acc;
    }
    return v;
}

// product of sqrt|y - c| over endpoints c != q (for y on the real line)
double rest_at(const SupportData& s, double y, double q) {
    double r = 1;
    for (double c : s.endpoints())
        if (c != q) r *= std::sqrt(std::abs(y - c));
    return r;
}

// int_{b_k}^{x} g(y)/R^{1/2}(y) dy for real x > b_k
template <class G>
CVec right_tail(const SupportData& s, double x, int dim, G&& g) {
    const double bk = s.b.back(), L = x - bk;
    auto f = [&](double t) {
        double y = bk + L * t * t;
        return CVec(2 * std::sqrt(L) * g(y) / rest_at(s, y, bk));
    };
    return gl_vec(f, 0.0, 1.0, dim);
}

// int_{b_k}^{infinity} g(y)/R^{1/2}(y) dy, g of degree <= k-2 relative to R^{1/2}
template <class G>
CVec right_infinite(const SupportData& s, int dim, G&& g) {
    const double bk = s.b.back();
    auto f = [&](double t) {
        double q = t / (1 - t), y = bk + q * q;
        return CVec(g(y) * (2.0 / ((1 - t) * (1 - t) * rest_at(s, y, bk))));
    };
    return gl_vec(f, 0.0, 1.0, dim);
}

// int_{-infinity}^{a_1} g(y)/R^{1/2}(y) dy
template <class G>
CVec left_infinite(const SupportData& s, int dim, G&& g) {
    const double a1 = s.a.front();
    const double sgn = (s.k() % 2 == 0) ? 1.0 : -1.0;
    auto f = [&](double t) {
        double q = t / (1 - t), y = a1 - q * q;
        return CVec(g(y) * (2.0 / ((1 - t) * (1 - t) * sgn * rest_at(s, y, a1))));
    };
    return gl_vec(f, 0.0, 1.0, dim);
}

// int_{a_1}^{x} g/R^{1/2} for real x < a_1
template <class G>
CVec left_tail(const SupportData& s, double x, int dim, G&& g) {
    const double a1 = s.a.front(), L = a1 - x;
    const double sgn = (s.k() % 2 == 0) ? 1.0 : -1.0;
    auto f = [&](double t) {
        double y = a1 - L * t * t;
        return CVec(-2 * std::sqrt(L) * g(y) / (sgn * rest_at(s, y, a1)));
    };
    return gl_vec(f, 0.0, 1.0, dim);
}

void require_genus(const SurfaceData& surf, const char* what) {
    if (surf.g < 1) throw std::invalid_argument(std::string(what) + ": needs k >= 2");
}

}  // namespace

// ---------------------------------------------------------------- theta functions

Characteristic Characteristic::odd(int g) {
    Characteristic c = zero(g);
    if (g > 0) c.alpha(0) = 0.5;
    c.beta.setConstant(0.5);
    return c;
}

int theta_truncation(const CMat& tau, double tol) {
    RMat Y = tau.imag();
    Y = 0.5 * (Y + Y.transpose());
    Eigen::SelfAdjointEigenSolver<RMat> es(Y);
    double lmin = es.eigenvalues().minCoeff();
    if (!(lmin > 0)) throw std::invalid_argument("theta: Im tau must be positive definite");
    return static_cast<int>(std::ceil(std::sqrt(std::log(1 / tol) / (kPi * lmin)))) + 2;
}

ThetaJet theta_jet(const CVec& xi, const CMat& tau, const Characteristic& ch, int order, double tol) {
    const int g = static_cast<int>(xi.size());
    if (tau.rows() != g || tau.cols() != g || ch.dim() != g) throw std::invalid_argument("theta: dimension mismatch");
    ThetaJet out{0, CVec::Zero(g), CMat::Zero(g, g), 0};
    if (g == 0) {
        out.value = 1;
        return out;
    }
    const int M = theta_truncation(tau, tol);
    RMat Y = tau.imag();
    RVec y = Y.ldlt().solve(xi.imag());
    Eigen::VectorXi c(g);
    for (int j = 0; j < g; ++j) c(j) = static_cast<int>(std::lround(-ch.alpha(j) - y(j)));
    CVec shift = xi + ch.beta.cast<cplx>();
    Eigen::VectorXi m = Eigen::VectorXi::Constant(g, -M);
    RVec v(g);
    while (true) {
        for (int j = 0; j < g; ++j) v(j) = c(j) + m(j) + ch.alpha(j);
        cplx e = 2 * kPi * I * v.cast<cplx>().dot(shift) + kPi * I * v.cast<cplx>().dot(tau * v.cast<cplx>());
        // dot() conjugates its first argument; v is real so this is the bilinear form
        cplx t = std::exp(e);
        out.value += t;
        out.abs_sum += std::abs(t);
        if (order >= 1) out.grad += (2 * kPi * I * t) * v.cast<cplx>();
        if (order >= 2) out.hess += (-4 * kPi * kPi * t) * (v * v.transpose()).cast<cplx>();
        int j = 0;
        while (j < g && m(j) == M) m(j++) = -M;
        if (j == g) break;
        ++m(j);
    }
    return out;
}

cplx theta(const CVec& xi, const CMat& tau, const Characteristic& ch, double tol) {
    return theta_jet(xi, tau, ch, 0, tol).value;
}

cplx theta(const CVec& xi, const CMat& tau, double tol) {
    return theta(xi, tau, Characteristic::zero(static_cast<int>(xi.size())), tol);
}

LogThetaDerivatives theta_log_derivatives(const CVec& xi, const CMat& tau, const Characteristic& ch, double tol) {
    ThetaJet j = theta_jet(xi, tau, ch, 2, tol);
    if (std::abs(j.value) <= 1e-13 * j.abs_sum) throw std::domain_error("theta_log_derivatives: theta vanishes");
    LogThetaDerivatives d;
    d.grad = j.grad / j.value;
    d.hess = j.hess / j.value - d.grad * d.grad.transpose();
    return d;
}

double jacobi_transform_check(const CVec& xi, const CMat& tau) {
    const int g = static_cast<int>(xi.size());
    CMat ti = tau.inverse();
    cplx lhs = theta(ti * xi, -ti);
    Eigen::ComplexEigenSolver<CMat> es(-I * tau);
    cplx sq = 1;
    for (int j = 0; j < g; ++j) sq *= std::sqrt(es.eigenvalues()(j));
    cplx q = (xi.transpose() * ti * xi)(0, 0);
    cplx rhs = std::exp(kPi * I * q) * sq * theta(xi, tau);
    return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

// ---------------------------------------------------------------- moments

cplx band_integral_R(const SupportData& s, int j, const std::function<cplx(double)>& g) {
    return seg_integral(s, 2 * j, 0.0, kPi, +1, 1, [&](double y) { return CVec::Constant(1, g(y)); })(0);
}

cplx gap_integral_R(const SupportData& s, int j, const std::function<cplx(double)>& g) {
    return seg_integral(s, 2 * j + 1, 0.0, kPi, +1, 1, [&](double y) { return CVec::Constant(1, g(y)); })(0);
}

RMat gap_moments(const SupportData& s, int rmax) {
    const int k = s.k();
    RMat M(std::max(k - 1, 0), rmax + 1);
    for (int i = 0; i + 1 < k; ++i) {
        CVec v = seg_integral(s, 2 * i + 1, 0.0, kPi, +1, rmax + 1, [&](double y) {
            CVec p(rmax + 1);
            double yp = 1;
            for (int r = 0; r <= rmax; ++r, yp *= y) p(r) = yp;
            return p;
        });
        M.row(i) = v.real().transpose();
    }
    return M;
}

RMat band_moments(const SupportData& s, int rmax) {
    const int k = s.k();
    RMat M(k, rmax + 1);
    for (int i = 0; i < k; ++i) {
        // |R_+| = -i phase^{-1} R_+ on a band; integrate with the phase removed
        Segment sg = segment(s, 2 * i);
        CVec v = seg_integral(s, 2 * i, 0.0, kPi, +1, rmax + 1, [&](double y) {
            CVec p(rmax + 1);
            double yp = 1;
            for (int r = 0; r <= rmax; ++r, yp *= y) p(r) = yp;
            return CVec(p * sg.phase);
        });
        M.row(i) = v.real().transpose();
    }
    return M;
}

// ---------------------------------------------------------------- surface

Polynomial SurfaceData::Qpoly(int j) const {
    std::vector<double> c(g);
    for (int r = 0; r < g; ++r) c[r] = Q(j, r);
    return Polynomial(c);
}

SurfaceData build_surface(const SupportData& s, const std::optional<EquilibriumData>& eq) {
    SurfaceData surf;
    surf.support = s;
    const int k = s.k(), g = k - 1;
    surf.g = g;
    if (eq) {
        surf.omega = RVec::Map(eq->omega.data(), eq->omega.size());
        surf.omega_hat = RVec(g);
        for (int j = 0; j < g; ++j) surf.omega_hat(j) = eq->band_mass[j + 1];
    }
    if (g == 0) {
        surf.omega = RVec(0);
        surf.omega_hat = RVec(0);
        surf.u_inf = RVec(0);
        return surf;
    }
    RMat gm = gap_moments(s, g - 1);
    surf.A = gm.transpose();
    if (std::abs(surf.A.determinant()) == 0) throw NumericalFailure("build_surface: singular A", 0);
    RMat Ainv = surf.A.inverse();
    surf.Q = -0.5 * Ainv;

    // B_{j,r} = sum_{i<=j} int_band_i x^{r-1}/R_+ = i * (-sum s_i int x^{r-1}/|R|)
    RMat bm = band_moments(s, g - 1);
    surf.B = RMat::Zero(g, g);
    for (int j = 0; j < g; ++j)
        for (int i = 0; i <= j; ++i) {
            double sgn = segment(s, 2 * i).phase.imag();  // R_+ = i sgn |R| on band i
            surf.B.row(j) -= sgn * bm.row(i);
        }
    CMat Bc = I * surf.B.cast<cplx>();
    surf.tau = -Bc * Ainv.transpose().cast<cplx>();
    auto& ck = surf.checks;
    ck.tau_symmetry = (surf.tau - surf.tau.transpose()).norm() / surf.tau.norm();
    ck.tau_real_part = surf.tau.real().norm() / surf.tau.norm();
    surf.tau = 0.5 * (surf.tau + surf.tau.transpose()).eval();
    surf.tau = (I * surf.tau.imag().cast<cplx>()).eval();
    {
        RMat Y = surf.tau.imag();
        Eigen::SelfAdjointEigenSolver<RMat> es(Y);
        ck.min_eig_im_tau = es.eigenvalues().minCoeff();
    }

    surf.C = RMat::Zero(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j <= i; ++j) surf.C(i, j) = 1;
    CMat ti = surf.tau.inverse();
    surf.tau_hat = -surf.C.cast<cplx>() * ti * surf.C.transpose().cast<cplx>();
    surf.tau_hat = 0.5 * (surf.tau_hat + surf.tau_hat.transpose()).eval();
    ck.tau_hat = (surf.tau_hat + surf.C.cast<cplx>() * ti * surf.C.transpose().cast<cplx>()).norm() / surf.tau_hat.norm();

    for (int i = 0; i < 2 * k - 1; ++i)
        surf.segment_integrals.push_back(
            seg_integral(s, i, 0.0, kPi, +1, g, [&](double y) { return qvals(surf, y); }));
    // A-normalization by tanh-sinh in the original variable
    {
        boost::math::quadrature::tanh_sinh<double> ts;
        double worst = 0;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                Polynomial qj = surf.Qpoly(j);
                const double lo = s.b[i], hi = s.a[i + 1], sgn = segment(s, 2 * i + 1).phase.real();
                auto f = [&](double x, double xc) {
                    double dlo = xc < 0 ? -xc : x - lo, dhi = xc > 0 ? xc : hi - x;
                    return qj(x) / (sgn * std::sqrt(dlo * dhi) * regular_part(s, x, lo, hi));
                };
                double v = -2 * ts.integrate(f, s.b[i], s.a[i + 1]);
                worst = std::max(worst, std::abs(v - (i == j ? 1.0 : 0.0)));
            }
        ck.a_normalization = worst;
    }
    if (ck.tau_symmetry > 1e-10 || ck.tau_real_part > 1e-10 || !(ck.min_eig_im_tau > 0) || ck.a_normalization > 1e-10)
        throw NumericalFailure("build_surface: surface invariants violated",
                               std::max({ck.tau_symmetry, ck.tau_real_part, ck.a_normalization}));
    surf.u_inf = right_infinite(s, g, [&](double y) { return qvals(surf, y); }).real();

    ThetaJet j0 = theta_jet(CVec::Zero(g), surf.tau, Characteristic::zero(g), 2, surf.theta_tol);
    surf.hess_log_theta0 = j0.hess / j0.value;
    return surf;
}

cplx sqrtR_at(const SupportData& s, const SurfacePoint& p) {
    if (p.side != 0) return sqrtR_boundary(s, p.z.real(), p.side);
    return sqrtR(s, p.z);
}

cplx gamma_fn(const SurfaceData& surf, const SurfacePoint& p) {
    const auto& s = surf.support;
    cplx z = p.z;
    if (p.side != 0) z = cplx(p.z.real(), p.side > 0 ? 0.0 : -0.0);
    cplx r = 1;
    for (int j = 0; j < s.k(); ++j) {
        if (z == s.a[j] || z == s.b[j]) throw std::domain_error("gamma: branch point");
        cplx q = (z - s.b[j]) / (z - s.a[j]);
        // ratio is negative real on the band; keep the side's sign of zero
        if (q.imag() == 0 && q.real() < 0) q = cplx(q.real(), p.side < 0 || std::signbit(z.imag()) ? -0.0 : 0.0);
        r *= std::pow(q, 0.25);
    }
    return r;
}

CVec abel_derivative(const SurfaceData& surf, const SurfacePoint& p) {
    return qvals(surf, p.z) / sqrtR_at(surf.support, p);
}

namespace {

// u_side(x) for real x in [a_1, b_k] by accumulating segment integrals from b_k
CVec abel_real(const SurfaceData& surf, double x, int side) {
    const auto& s = surf.support;
    const int k = s.k(), g = surf.g;
    CVec u = CVec::Zero(g);
    for (int i = 2 * k - 2; i >= 0; --i) {
        Segment sg = segment(s, i);
        CVec full = surf.segment_integrals[i];
        if (sg.band && side < 0) full = -full;
        if (x <= sg.lo) {
            u -= full;
            continue;
        }
        if (x < sg.hi) {
            double th = seg_theta(sg, x);
            // integrate the shorter piece
            if (th > 0.5 * kPi) {
                u -= seg_integral(s, i, th, kPi, side, g, [&](double y) { return qvals(surf, y); });
            } else {
                u -= full - seg_integral(s, i, 0.0, th, side, g, [&](double y) { return qvals(surf, y); });
            }
        }
        break;
    }
    return u;
}

}  // namespace

CVec abel_map(const SurfaceData& surf, const SurfacePoint& p) {
    require_genus(surf, "abel_map");
    const auto& s = surf.support;
    const int g = surf.g;
    const double a1 = s.a.front(), bk = s.b.back();
    auto qf = [&](double y) { return qvals(surf, y); };
    cplx z = p.z;
    if (z.imag() == 0 || p.side != 0) {
        double x = z.real();
        if (x >= bk) {
            if (x == bk) return CVec::Zero(g);
            if (x - bk <= 4 * (bk - a1)) return right_tail(s, x, g, qf);
            // far out: u(infinity) minus the tail beyond x
            auto f = [&](double t) {
                double q = t / (1 - t), y = x + q * q;
                return CVec(qf(y) * (2 * q / ((1 - t) * (1 - t) * sqrtR(s, cplx(y, 0)).real())));
            };
            return CVec(surf.u_inf.cast<cplx>() - gl_vec(f, 0.0, 1.0, g));
        }
        if (x <= a1) {
            CVec ua = abel_real(surf, a1, +1);
            return x == a1 ? ua : CVec(ua + left_tail(s, x, g, qf));
        }
        if (p.side == 0) throw std::domain_error("abel_map: point on the cut needs a side");
        return abel_real(surf, x, p.side);
    }
    if (z.imag() < 0) return abel_map(surf, SurfacePoint::at(std::conj(z))).conjugate();
    // b_k -> b_k + iH (with t^2 substitution at the branch point), then straight to z
    const double H = std::max(z.imag(), 0.5 * (bk - a1));
    const cplx top(bk, H);
    auto f1 = [&](double t) {
        cplx w = bk + cplx(0, H) * t * t;
        return CVec(qvals(surf, w) / sqrtR(s, w) * (cplx(0, 2 * H) * t));
    };
    auto f2 = [&](double t) {
        cplx w = top + (z - top) * t;
        return CVec(qvals(surf, w) / sqrtR(s, w) * (z - top));
    };
    CVec u = gl_vec(f1, 0.0, 1.0, g, 1e-14);
    if (std::abs(z - top) > 0) {
        // split into panels so near-real endpoints are resolved
        const int P = 8;
        for (int q = 0; q < P; ++q) u += gl_vec(f2, double(q) / P, double(q + 1) / P, g, 1e-14, 8192);
    }
    return u;
}

cplx prime_ratio_theta(const SurfaceData& surf, const SurfacePoint& z, const SurfacePoint& lam) {
    const auto& s = surf.support;
    if (surf.g == 0) {
        double a = s.a[0], b = s.b[0];
        cplx zz = z.z, ll = lam.z;
        if (zz == ll && z.side == lam.side) return 0;
        cplx den = sqrtR_at(s, z) * sqrtR_at(s, lam) + zz * ll + a * b - 0.5 * (a + b) * (zz + ll);
        return 0.5 * (b - a) * (zz - ll) / den;
    }
    for (double c : s.endpoints())
        if (lam.z == c && c != s.b.back() && lam.side == 0) throw std::domain_error("Theta: lambda at a branch point");
    CVec uz = abel_map(surf, z), ul = abel_map(surf, lam);
    auto ch = Characteristic::odd(surf.g);
    return theta(CVec(uz - ul), surf.tau, ch, surf.theta_tol) / theta(CVec(uz + ul), surf.tau, ch, surf.theta_tol);
}

CVec hat_abel_map(const SurfaceData& surf, const SurfacePoint& p) {
    require_genus(surf, "hat_abel_map");
    return surf.C.cast<cplx>() * surf.tau.inverse() * abel_map(surf, p);
}

Characteristic hat_odd_characteristic(const SurfaceData& surf) {
    Characteristic o = Characteristic::odd(surf.g);
    Characteristic h;
    h.alpha = -surf.C.transpose().inverse() * o.beta;
    h.beta = surf.C * o.alpha;
    return h;
}

cplx prime_ratio_theta_hat(const SurfaceData& surf, const SurfacePoint& z, const SurfacePoint& lam) {
    require_genus(surf, "prime_ratio_theta_hat");
    CVec uz = hat_abel_map(surf, z), ul = hat_abel_map(surf, lam);
    auto ch = hat_odd_characteristic(surf);
    return theta(CVec(uz - ul), surf.tau_hat, ch, surf.theta_tol) /
           theta(CVec(uz + ul), surf.tau_hat, ch, surf.theta_tol);
}

cplx theta_tilde_diag(const SurfaceData& surf, const SurfacePoint& z) {
    const auto& s = surf.support;
    if (surf.g == 0) {
        cplx r = sqrtR_at(s, z);
        return -(s.b[0] - s.a[0]) / (4.0 * r * r);
    }
    auto ch = Characteristic::odd(surf.g);
    CVec uz = abel_map(surf, z), du = abel_derivative(surf, z);
    ThetaJet j0 = theta_jet(CVec::Zero(surf.g), surf.tau, ch, 1, surf.theta_tol);
    cplx den = theta(CVec(2.0 * uz), surf.tau, ch, surf.theta_tol);
    return -(j0.grad.transpose() * du)(0, 0) / den;
}

CVec gap_cauchy(const SurfaceData& surf, cplx z) {
    const auto& s = surf.support;
    CVec out(surf.g);
    for (int j = 0; j < surf.g; ++j)
        out(j) = seg_integral(s, 2 * j + 1, 0.0, kPi, +1, 1, [&](double y) {
            CVec v(1);
            v(0) = 1.0 / (y - z);
            return v;
        })(0);
    return out;
}

cplx w_kernel(const SurfaceData& surf, const SurfacePoint& z, const SurfacePoint& lam) {
    if (z.z == lam.z) throw std::domain_error("w_kernel: lambda = z");
    const auto& s = surf.support;
    cplx rz = sqrtR_at(s, z), rl = sqrtR_at(s, lam);
    cplx w = rz / (rl * (lam.z - z.z));
    if (surf.g > 0) {
        CVec du = abel_derivative(surf, lam);
        CVec gc = gap_cauchy(surf, z.z);
        w += 2.0 * rz * du.cwiseProduct(gc).sum();
    }
    return w;
}

cplx W_kernel(const SurfaceData& surf, cplx z, cplx lam) {
    if (z == lam) throw std::domain_error("W_kernel: z = lambda");
    cplx gz = gamma_fn(surf, z), gl = gamma_fn(surf, lam);
    cplx r1 = gz / gl, r2 = gl / gz;
    cplx W = 0.5 / ((z - lam) * (z - lam)) * (r1 * r1 + r2 * r2);
    if (surf.g > 0) {
        CVec dz = abel_derivative(surf, SurfacePoint::at(z)), dl = abel_derivative(surf, SurfacePoint::at(lam));
        W -= 2.0 * (dz.transpose() * surf.hess_log_theta0 * dl)(0, 0);
    }
    return W;
}

cplx edge_bracket(const SurfaceData& surf, double t) {
    const auto& s = surf.support;
    if (s.band_of(t) < 0) throw std::domain_error("edge_bracket: t must lie inside a band");
    cplx rt = sqrtR_boundary(s, t, +1);
    CVec one = right_infinite(s, 1, [&](double y) {
        CVec v(1);
        v(0) = 1.0 / (y - t);
        return v;
    });
    cplx acc = one(0);
    if (surf.g > 0) acc += 2.0 * surf.u_inf.cast<cplx>().cwiseProduct(gap_cauchy(surf, t)).sum();
    return rt * acc - I * (kPi / 2);
}

// ---------------------------------------------------------------- Upsilon

RVec upsilon(const SurfaceData& surf, const TestFunction& f, bool matrix_route) {
    const auto& s = surf.support;
    const int g = surf.g;
    if (g == 0) return RVec(0);
    CVec direct = CVec::Zero(g);
    for (int j = 0; j < s.k(); ++j)
        direct += seg_integral(s, 2 * j, 0.0, kPi, +1, g, [&](double y) { return CVec(qvals(surf, y) * f(y)); });
    direct *= -1.0 / (kPi * I);
    CVec c = CVec::Zero(g);
    for (int j = 0; j < s.k(); ++j)
        c += seg_integral(s, 2 * j, 0.0, kPi, +1, g, [&](double y) {
            CVec p(g);
            double yp = 1;
            for (int r = 0; r < g; ++r, yp *= y) p(r) = yp * f(y);
            return p;
        });
    c /= (2 * kPi * I);
    CVec viaA = surf.A.inverse().cast<cplx>() * c;
    const double scale = std::max(1.0, direct.norm());
    double im = std::max(direct.imag().norm(), viaA.imag().norm());
    if (im > 1e-9 * scale) throw NumericalFailure("upsilon: imaginary part too large", im);
    double dis = (direct - viaA).norm();
    if (dis > 1e-10 * scale) throw NumericalFailure("upsilon: routes disagree", dis);
    return matrix_route ? RVec(viaA.real()) : RVec(direct.real());
}

RVec upsilon_log(const SurfaceData& surf, double t) {
    const auto& s = surf.support;
    const int g = surf.g;
    if (g == 0) return RVec(0);
    int j = s.band_of(t);
    if (j < 0) throw std::domain_error("upsilon_log: t must lie inside a band");
    RVec v = left_infinite(s, g, [&](double y) { return qvals(surf, y); }).real();
    for (int l = 0; l < j; ++l) v(l) -= 0.5;
    return v;
}

RVec upsilon_indicator(const SurfaceData& surf, double t) {
    if (surf.g == 0) return RVec(0);
    if (surf.support.band_of(t) < 0) throw std::domain_error("upsilon_indicator: t must lie inside a band");
    return abel_map(surf, SurfacePoint::above(t)).imag() / kPi;
}

CVec upsilon_hat(const SurfaceData& surf, const RVec& ups) {
    if (surf.g == 0) return CVec(0);
    return surf.C.cast<cplx>() * surf.tau.inverse() * ups.cast<cplx>();
}

// ---------------------------------------------------------------- Green kernel and L(f)

double green_kernel(const SurfaceData& surf, double x, double y) {
    const auto& s = surf.support;
    if (s.band_of(x) < 0 || s.band_of(y) < 0) throw std::domain_error("green_kernel: points must be band interiors");
    if (x == y) throw std::domain_error("green_kernel: diagonal");
    cplx th = prime_ratio_theta(surf, SurfacePoint::above(y), SurfacePoint::above(x));
    double G = -std::log(std::abs(th));
    if (surf.g > 0) {
        RVec ux = abel_map(surf, SurfacePoint::above(x)).imag(), uy = abel_map(surf, SurfacePoint::above(y)).imag();
        RMat Yi = surf.tau.imag().inverse();
        G -= 4 * kPi * ux.dot(Yi * uy);
    }
    return G / (2 * kPi * kPi);
}

double green_kernel_hat(const SurfaceData& surf, double x, double y) {
    require_genus(surf, "green_kernel_hat");
    if (x == y) throw std::domain_error("green_kernel_hat: diagonal");
    cplx th = prime_ratio_theta_hat(surf, SurfacePoint::above(y), SurfacePoint::above(x));
    RVec ux = hat_abel_map(surf, SurfacePoint::above(x)).imag(), uy = hat_abel_map(surf, SurfacePoint::above(y)).imag();
    RMat Yi = surf.tau_hat.imag().inverse();
    return (-std::log(std::abs(th)) - 4 * kPi * ux.dot(Yi * uy)) / (2 * kPi * kPi);
}

double quadratic_form_L(const SurfaceData& surf, const TestFunction& f, int n) {
    const auto& s = surf.support;
    const int k = s.k(), g = surf.g;
    Polynomial fp = f.p.derivative();
    if (fp.is_zero()) return 0;
    const auto& r = gauss_legendre<double>(n);
    struct Node {
        int band;
        double phi, x, weight;  // weight includes f'(x) dx/dphi
        RVec imu;
    };
    std::vector<Node> nodes;
    for (int j = 0; j < k; ++j) {
        Segment sg = segment(s, 2 * j);
        double w = sg.hi - sg.lo;
        for (int i = 0; i < n; ++i) {
            double phi = 0.5 * kPi * (1 + r.x[i]);
            Node nd;
            nd.band = j;
            nd.phi = phi;
            nd.x = seg_y(sg, phi);
            nd.weight = 0.5 * kPi * r.w[i] * fp(nd.x) * 0.5 * w * std::sin(phi);
            nodes.push_back(nd);
        }
    }
    RMat Yi = g > 0 ? RMat(surf.tau.imag().inverse()) : RMat(0, 0);
    auto ch = Characteristic::odd(g);
    std::vector<CVec> uplus(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i)
        uplus[i] = g > 0 ? abel_map(surf, SurfacePoint::above(nodes[i].x)) : CVec(0);
    for (size_t i = 0; i < nodes.size(); ++i) nodes[i].imu = uplus[i].imag();

    // smooth remainder H = 2 pi^2 G - log|sin((phi+psi)/2) / sin((phi-psi)/2)| on same-band pairs
    double total = 0;
    for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t l = 0; l < nodes.size(); ++l) {
            const Node &X = nodes[i], &Y = nodes[l];
            double h;
            double quad = g > 0 ? 4 * kPi * X.imu.dot(Yi * Y.imu) : 0.0;
            if (X.band != Y.band) {
                cplx th;
                if (g > 0)
                    th = theta(CVec(uplus[l] - uplus[i]), surf.tau, ch, surf.theta_tol) /
                         theta(CVec(uplus[l] + uplus[i]), surf.tau, ch, surf.theta_tol);
                else
                    th = prime_ratio_theta(surf, SurfacePoint::above(Y.x), SurfacePoint::above(X.x));
                h = -std::log(std::abs(th)) - quad;
            } else {
                double w = s.b[X.band] - s.a[X.band];
                double lsum = std::log(std::abs(std::sin(0.5 * (X.phi + Y.phi))));
                double ratio_log;  // log|Theta(y,x)/(y-x)|
                if (i == l) {
                    ratio_log = std::log(std::abs(theta_tilde_diag(surf, SurfacePoint::above(X.x))));
                } else {
                    cplx th;
                    if (g > 0)
                        th = theta(CVec(uplus[l] - uplus[i]), surf.tau, ch, surf.theta_tol) /
                             theta(CVec(uplus[l] + uplus[i]), surf.tau, ch, surf.theta_tol);
                    else
                        th = prime_ratio_theta(surf, SurfacePoint::above(Y.x), SurfacePoint::above(X.x));
                    ratio_log = std::log(std::abs(th / (Y.x - X.x)));
                }
                // 2 pi^2 G = -ratio_log - log|y-x| - quad, and log|y-x| = log w + lsum + log|sin((phi-psi)/2)|
                h = -ratio_log - std::log(w) - 2 * lsum - quad;
            }
            total += X.weight * Y.weight * h;
        }
    // singular part sum_m (2/m) S_m^2 per band, S_m = int F(phi) sin(m phi) dphi
    const int mmax = fp.degree() + 4;
    const auto& r2 = gauss_legendre<double>(std::max(64, 4 * mmax));
    for (int j = 0; j < k; ++j) {
        Segment sg = segment(s, 2 * j);
        double w = sg.hi - sg.lo;
        for (int m = 1; m <= mmax; ++m) {
            double S = 0;
            for (size_t i = 0; i < r2.x.size(); ++i) {
                double phi = 0.5 * kPi * (1 + r2.x[i]);
                S += 0.5 * kPi * r2.w[i] * fp(seg_y(sg, phi)) * 0.5 * w * std::sin(phi) * std::sin(m * phi);
            }
            total += 2.0 / m * S * S;
        }
    }
    return total / (2 * kPi * kPi);
}

// ---------------------------------------------------------------- Q~ and C_S

Polynomial tilde_Q(const SurfaceData& surf) {
    const int g = surf.g;
    if (g == 0) return Polynomial::constant(1);
    RMat M = gap_moments(surf.support, g);
    RMat lhs = M.leftCols(g);
    RVec rhs = -M.col(g);
    RVec q = lhs.fullPivLu().solve(rhs);
    std::vector<double> c(q.data(), q.data() + g);
    c.push_back(1);
    return Polynomial(c);
}

double c_surface(const SurfaceData& surf) {
    const auto& s = surf.support;
    Polynomial qt = tilde_Q(surf);
    const double a1 = s.a.front();
    auto f = [&](double t) {
        double q = t / (1 - t), y = a1 - q * q;
        double main = std::abs(qt(y)) / rest_at(s, y, a1) * 2.0 / ((1 - t) * (1 - t));
        double sub = 1.0 / (1 + a1 - y) * 2 * t / ((1 - t) * (1 - t) * (1 - t));
        CVec v(1);
        v(0) = main - sub;
        return v;
    };
    return gl_vec(f, 0.0, 1.0, 1, 1e-14, 1 << 15)(0).real();
}

}  // namespace mcut
