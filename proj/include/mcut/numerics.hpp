#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bernoulli.hpp>

namespace mcut {

using cplx = std::complex<double>;

struct Precision {
    int decimal_digits = 16;
    double target_tolerance = 1e-13;

    Precision() = default;
    Precision(int digits, double tol) : decimal_digits(digits), target_tolerance(tol) {
        if (digits < 16) throw std::invalid_argument("Precision: decimal_digits must be >= 16");
        if (!(tol > 0)) throw std::invalid_argument("Precision: target_tolerance must be > 0");
    }
    static Precision binary64() { return {16, 1e-13}; }
};

class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double achieved)
        : std::runtime_error(message(what, achieved)), achieved_error(achieved) {}
    double achieved_error;

private:
    static std::string message(const std::string& what, double achieved) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " (achieved error %.3e)", achieved);
        return what + buf;
    }
};

template <class T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class T>
double to_double(const T& x) {
    if constexpr (std::is_same_v<T, double>)
        return x;
    else
        return static_cast<double>(x);
}

template <class T>
double magnitude(const T& x) {
    using std::abs;
    if constexpr (is_complex<T>::value)
        return std::abs(x);
    else
        return to_double(abs(x));
}

// decimal digits carried by T at the moment of the call
template <class T>
int digits_of() {
    if constexpr (std::is_same_v<T, double>)
        return 16;
    else
        return static_cast<int>(T::default_precision());
}

template <class T>
T pi() {
    return boost::math::constants::pi<T>();
}

template <class T>
T eps_of() {
    if constexpr (std::is_same_v<T, double>)
        return std::numeric_limits<double>::epsilon();
    else {
        using std::pow;
        return pow(T(10), -digits_of<T>());
    }
}

}  // namespace detail

// ---------------------------------------------------------------- quadrature rules

template <class T>
struct QuadRule {
    std::vector<T> x, w;
};

namespace detail {

// orthonormal Jacobi recurrence for weight (1-x)^a (1+x)^b on [-1,1]
template <class T>
void jacobi_recurrence(int n, const T& a, const T& b, std::vector<T>& diag, std::vector<T>& off,
                       T& mu0) {
    using std::lgamma;
    using std::exp;
    using std::log;
    using std::sqrt;
    diag.assign(n, T(0));
    off.assign(n, T(0));  // off[j] couples j-1 and j, j >= 1
    const T ab = a + b;
    diag[0] = (b - a) / (ab + 2);
    for (int j = 1; j < n; ++j) {
        T jj = T(j);
        T s = 2 * jj + ab;
        diag[j] = (b * b - a * a) / (s * (s + 2));
    }
    if (n > 1) {
        off[1] = sqrt(4 * (1 + a) * (1 + b) / ((2 + ab) * (2 + ab) * (3 + ab)));
        for (int j = 2; j < n; ++j) {
            T jj = T(j);
            T s = 2 * jj + ab;
            off[j] = sqrt(4 * jj * (jj + a) * (jj + b) * (jj + ab) / (s * s * (s + 1) * (s - 1)));
        }
    }
    mu0 = exp((ab + 1) * log(T(2)) + lgamma(a + 1) + lgamma(b + 1) - lgamma(ab + 2));
}

QuadRule<double> golub_welsch_nodes(int n, double a, double b);

// Newton polish of the nodes and Christoffel weights in T arithmetic
template <class T>
QuadRule<T> jacobi_rule_refined(int n, double ad, double bd) {
    using std::abs;
    using std::sqrt;
    QuadRule<double> guess = golub_welsch_nodes(n, ad, bd);
    T a(ad), b(bd);
    std::vector<T> diag, off;
    T mu0;
    jacobi_recurrence<T>(n + 1, a, b, diag, off, mu0);
    const T p0 = 1 / sqrt(mu0);
    const T tiny = eps_of<T>() * 4;
    QuadRule<T> r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        T x(guess.x[i]);
        T sum;
        for (int it = 0; it < 60; ++it) {
            T pm(0), p(p0), dpm(0), dp(0);
            sum = p * p;
            for (int j = 0; j < n; ++j) {
                T pn = ((x - diag[j]) * p - (j > 0 ? off[j] * pm : T(0))) / off[j + 1];
                T dpn = (p + (x - diag[j]) * dp - (j > 0 ? off[j] * dpm : T(0))) / off[j + 1];
                pm = p;
                p = pn;
                dpm = dp;
                dp = dpn;
                if (j + 1 < n) sum += p * p;
            }
            T dx = p / dp;
            x -= dx;
            if (abs(dx) <= tiny * (1 + abs(x))) {
                // recompute Christoffel sum at the final node
                T qm(0), q(p0);
                sum = q * q;
                for (int j = 0; j + 1 < n; ++j) {
                    T qn = ((x - diag[j]) * q - (j > 0 ? off[j] * qm : T(0))) / off[j + 1];
                    qm = q;
                    q = qn;
                    sum += q * q;
                }
                break;
            }
        }
        r.x[i] = x;
        r.w[i] = 1 / sum;
    }
    return r;
}

}  // namespace detail

// Gauss-Jacobi rule for (1-x)^alpha (1+x)^beta on [-1,1]; cached per (n, alpha, beta, digits)
template <class T>
const QuadRule<T>& gauss_jacobi(int n, double alpha, double beta) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be positive");
    if (!(alpha > -1) || !(beta > -1)) throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");
    using Key = std::tuple<int, double, double, int>;
    static std::mutex mtx;
    static std::map<Key, std::shared_ptr<QuadRule<T>>> cache;
    Key key{n, alpha, beta, detail::digits_of<T>()};
    {
        std::lock_guard<std::mutex> lk(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }
    auto rule = std::make_shared<QuadRule<T>>(detail::jacobi_rule_refined<T>(n, alpha, beta));
    std::lock_guard<std::mutex> lk(mtx);
    auto [it, inserted] = cache.emplace(key, rule);
    return *it->second;
}

template <class T = double>
const QuadRule<T>& gauss_legendre(int n) {
    return gauss_jacobi<T>(n, 0.0, 0.0);
}

// Fixed-order rule for f(x)(x-a)^le (b-x)^re on [a,b].
template <class T, class F>
auto jacobi_sum(F&& f, const T& a, const T& b, double le, double re, int n) {
    using std::pow;
    const auto& r = gauss_jacobi<T>(n, re, le);
    T half = (b - a) / 2, mid = (a + b) / 2;
    using R = decltype(f(mid));
    R s = R(0);
    for (int i = 0; i < n; ++i) s += r.w[i] * f(mid + half * r.x[i]);
    T scale = (le == 0.0 && re == 0.0) ? half : T(pow(half, T(1) + T(le) + T(re)));
    return R(s * scale);
}

// integral of f(x)(x-a)^left_exp (b-x)^right_exp over [a,b], doubling the order until stable
template <class T, class F>
auto integrate_singular(F&& f, const T& a, const T& b, double left_exp, double right_exp,
                        const Precision& prec, int n0 = 16) {
    if (!(left_exp > -1) || !(right_exp > -1))
        throw std::invalid_argument("integrate_singular: exponents must exceed -1");
    if (!(a < b)) throw std::invalid_argument("integrate_singular: need a < b");
    const int nmax = std::max(2048, 64 * prec.decimal_digits);
    int n = n0;
    auto prev = jacobi_sum<T>(f, a, b, left_exp, right_exp, n);
    double err = 0;
    while (true) {
        n *= 2;
        auto cur = jacobi_sum<T>(f, a, b, left_exp, right_exp, n);
        err = detail::magnitude(cur - prev);
        double scale = std::max(1.0, detail::magnitude(cur));
        if (err <= prec.target_tolerance * scale) return cur;
        if (n >= 256) {
            // cancelling integrands: measure against the integral of |f|
            auto l1 = jacobi_sum<T>([&](const T& x) { return T(detail::magnitude(f(x))); }, a, b, left_exp,
                                    right_exp, n);
            scale = std::max(scale, detail::magnitude(l1));
            if (err <= prec.target_tolerance * scale) return cur;
        }
        if (n >= nmax) throw NumericalFailure("integrate_singular: no convergence", err / scale);
        prev = cur;
    }
}

// Composite Gauss-Legendre on [a,b] with m panels of n nodes.
template <class T, class F>
auto gl_panels(F&& f, const T& a, const T& b, int panels, int n) {
    const auto& r = gauss_legendre<T>(n);
    T h = (b - a) / panels;
    using R = decltype(f(a));
    R s = R(0);
    for (int p = 0; p < panels; ++p) {
        T lo = a + h * p;
        T mid = lo + h / 2, half = h / 2;
        R ps = R(0);
        for (int i = 0; i < n; ++i) ps += r.w[i] * f(mid + half * r.x[i]);
        s += ps * half;
    }
    return s;
}

// Adaptive Gauss-Legendre with interval bisection; works for real or complex integrands.
template <class F>
auto integrate_adaptive(F&& f, double a, double b, double tol, int depth = 40) {
    using R = decltype(f(a));
    const auto& r10 = gauss_legendre<double>(10);
    const auto& r20 = gauss_legendre<double>(20);
    auto rule = [&](const QuadRule<double>& r, double lo, double hi) {
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        R s = R(0);
        for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(mid + half * r.x[i]);
        return R(s * half);
    };
    std::function<R(double, double, R, int, double)> rec = [&](double lo, double hi, R whole, int d,
                                                                double t) -> R {
        double mid = 0.5 * (lo + hi);
        R left = rule(r20, lo, mid), right = rule(r20, mid, hi);
        R both = left + right;
        double err = detail::magnitude(both - whole);
        if (err <= t || err <= 64 * 2.2e-16 * detail::magnitude(both) || d <= 0) return both;
        return rec(lo, mid, left, d - 1, 0.5 * t) + rec(mid, hi, right, d - 1, 0.5 * t);
    };
    R coarse = rule(r10, a, b), fine = rule(r20, a, b);
    if (detail::magnitude(coarse - fine) <= tol * 1e-2) return fine;
    return rec(a, b, fine, depth, tol);
}

// ---------------------------------------------------------------- contours

struct ContourSpec {
    cplx center{0.0, 0.0};
    double radius = 1.0;
    // optional smooth closed parameterization on [0, 2pi); overrides the circle when set
    std::function<cplx(double)> z;
    std::function<cplx(double)> dz;

    static ContourSpec circle(cplx c, double r) {
        ContourSpec s;
        s.center = c;
        s.radius = r;
        return s;
    }
};

// trapezoid rule on the parameterization with node doubling
template <class F>
cplx integrate_contour(F&& f, const ContourSpec& c, const Precision& prec, int n0 = 32,
                       int nmax = 1 << 16) {
    // returns the trapezoid value and the L1 size of the summands, the latter scaling the tolerance
    auto sum = [&](int n, double& l1) {
        cplx s = 0;
        l1 = 0;
        const double h = 2 * M_PI / n;
        for (int j = 0; j < n; ++j) {
            double t = h * j;
            cplx v;
            if (c.z) {
                v = f(c.z(t)) * c.dz(t);
            } else {
                cplx e = std::polar(1.0, t);
                v = f(c.center + c.radius * e) * cplx(0, c.radius) * e;
            }
            s += v;
            l1 += std::abs(v);
        }
        l1 *= h;
        return s * h;
    };
    int n = n0;
    double l1;
    cplx prev = sum(n, l1);
    while (true) {
        n *= 2;
        cplx cur = sum(n, l1);
        double err = std::abs(cur - prev);
        if (err <= prec.target_tolerance * std::max({1.0, std::abs(cur), l1})) return cur;
        if (n >= nmax) throw NumericalFailure("integrate_contour: no convergence", err);
        prev = cur;
    }
}

// ---------------------------------------------------------------- principal value

// PV integral of f over [a,b] with a simple pole at p, by symmetric excision
template <class F>
double integrate_pv(F&& f, double a, double b, double p, const Precision& prec) {
    if (!(p > a && p < b)) throw std::invalid_argument("integrate_pv: pole must be interior");
    double d = std::min(p - a, b - p);
    auto sym = [&](double s) { return f(p + s) + f(p - s); };
    double res = integrate_adaptive(sym, 0.0, d, prec.target_tolerance);
    if (p - d > a + 1e-15 * (b - a)) res += integrate_adaptive(f, a, p - d, prec.target_tolerance);
    if (p + d < b - 1e-15 * (b - a)) res += integrate_adaptive(f, p + d, b, prec.target_tolerance);
    return res;
}

// ---------------------------------------------------------------- linear algebra

template <class T>
struct LinearSolution {
    Vec<T> x;
    double condition_estimate;
};

// LU with partial pivoting; condition estimate is ||M||_1 ||M^{-1}||_1 from the explicit inverse
template <class T>
LinearSolution<T> solve_linear(const Mat<T>& M, const Vec<T>& rhs) {
    using std::abs;
    const int n = static_cast<int>(M.rows());
    if (M.cols() != n || rhs.size() != n) throw std::invalid_argument("solve_linear: shape mismatch");
    Mat<T> lu = M;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    double norm1 = 0;
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += detail::magnitude(M(i, j));
        norm1 = std::max(norm1, s);
    }
    const double eps = detail::to_double(detail::eps_of<typename Eigen::NumTraits<T>::Real>());
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = detail::magnitude(lu(k, k));
        for (int i = k + 1; i < n; ++i)
            if (detail::magnitude(lu(i, k)) > best) best = detail::magnitude(lu(i, k)), piv = i;
        if (best <= eps * norm1 * n) throw NumericalFailure("solve_linear: singular matrix", best);
        if (piv != k) {
            lu.row(k).swap(lu.row(piv));
            std::swap(perm[k], perm[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            lu(i, k) /= lu(k, k);
            for (int j = k + 1; j < n; ++j) lu(i, j) -= lu(i, k) * lu(k, j);
        }
    }
    auto solve = [&](const Vec<T>& b) {
        Vec<T> y(n);
        for (int i = 0; i < n; ++i) {
            T s = b(perm[i]);
            for (int j = 0; j < i; ++j) s -= lu(i, j) * y(j);
            y(i) = s;
        }
        for (int i = n - 1; i >= 0; --i) {
            T s = y(i);
            for (int j = i + 1; j < n; ++j) s -= lu(i, j) * y(j);
            y(i) = s / lu(i, i);
        }
        return y;
    };
    LinearSolution<T> out;
    out.x = solve(rhs);
    double inv1 = 0;
    for (int j = 0; j < n; ++j) {
        Vec<T> e = Vec<T>::Zero(n);
        e(j) = T(1);
        Vec<T> c = solve(e);
        double s = 0;
        for (int i = 0; i < n; ++i) s += detail::magnitude(c(i));
        inv1 = std::max(inv1, s);
    }
    out.condition_estimate = norm1 * inv1;
    if (!(out.condition_estimate < 1 / eps)) throw NumericalFailure("solve_linear: singular to working precision", out.condition_estimate * eps);
    return out;
}

template <class T>
Mat<T> inverse(const Mat<T>& M) {
    const int n = static_cast<int>(M.rows());
    Mat<T> out(n, n);
    for (int j = 0; j < n; ++j) {
        Vec<T> e = Vec<T>::Zero(n);
        e(j) = T(1);
        out.col(j) = solve_linear<T>(M, e).x;
    }
    return out;
}

// ---------------------------------------------------------------- Newton

struct NewtonOptions {
    int max_iter = 100;
    double residual_tol = -1;  // defaults to prec.target_tolerance
};

template <class T>
Vec<T> solve_newton(const std::function<Vec<T>(const Vec<T>&)>& F, Vec<T> x, const Precision& prec,
                    NewtonOptions opt = {}) {
    using std::abs;
    using std::pow;
    const double tol = opt.residual_tol > 0 ? opt.residual_tol : prec.target_tolerance;
    const int m = static_cast<int>(x.size());
    const T h0 = pow(T(10), T(-detail::digits_of<T>()) / 3);
    auto norm = [](const Vec<T>& v) {
        double s = 0;
        for (int i = 0; i < v.size(); ++i) s = std::max(s, detail::magnitude(v(i)));
        return s;
    };
    Vec<T> fx = F(x);
    double r = norm(fx);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (r <= tol) return x;
        Mat<T> J(m, m);
        for (int j = 0; j < m; ++j) {
            T h = h0 * std::max(T(1), T(abs(x(j))));
            Vec<T> xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            J.col(j) = (F(xp) - F(xm)) / (2 * h);
        }
        Vec<T> dx = solve_linear<T>(J, Vec<T>(-fx)).x;
        T lam(1);
        bool improved = false;
        for (int ls = 0; ls < 40; ++ls) {
            Vec<T> xn = x + lam * dx;
            Vec<T> fn;
            bool ok = true;
            try {
                fn = F(xn);
            } catch (const std::exception&) {
                ok = false;
            }
            if (ok) {
                double rn = norm(fn);
                if (std::isfinite(rn) && rn < r) {
                    x = xn;
                    fx = fn;
                    r = rn;
                    improved = true;
                    break;
                }
            }
            lam /= 2;
        }
        if (!improved) break;
    }
    if (r <= tol) return x;
    throw NumericalFailure("solve_newton: no convergence", r);
}

inline Vec<double> solve_newton(const std::function<Vec<double>(const Vec<double>&)>& F,
                                const Vec<double>& x0, const Precision& prec,
                                NewtonOptions opt = {}) {
    return solve_newton<double>(F, x0, prec, opt);
}

// ---------------------------------------------------------------- special functions

template <class T>
T agm(T a, T b) {
    using std::abs;
    using std::sqrt;
    const T eps = detail::eps_of<T>();
    for (int i = 0; i < 200; ++i) {
        T an = (a + b) / 2;
        T bn = sqrt(a * b);
        a = an;
        b = bn;
        if (abs(a - b) <= eps * a) break;
    }
    return (a + b) / 2;
}

template <class T>
T elliptic_K(const T& k) {
    using std::sqrt;
    if (!(k > 0 && k < 1)) throw std::invalid_argument("elliptic_K: k must lie in (0,1)");
    return detail::pi<T>() / (2 * agm(T(1), T(sqrt(1 - k * k))));
}

namespace detail {
double zeta_prime_minus_one_binary64();
double log_barnes_g_binary64(double z);
}  // namespace detail

// log of the Glaisher-Kinkelin constant from the Euler-Maclaurin expansion of the hyperfactorial
template <class T>
T log_glaisher() {
    using std::abs;
    using std::log;
    if constexpr (std::is_same_v<T, double>) return 1.0 / 12 - detail::zeta_prime_minus_one_binary64();
    const int D = detail::digits_of<T>();
    const int n = std::max(20, D);
    T logH(0);
    for (int j = 2; j <= n; ++j) logH += T(j) * log(T(j));
    T nn(n);
    T c = logH - ((nn * nn / 2 + nn / 2 + T(1) / 12) * log(nn) - nn * nn / 4);
    const T eps = detail::eps_of<T>() / 1000;
    T prev_mag = -1;
    for (int j = 2; j < 4 * D + 40; ++j) {
        T b = boost::math::bernoulli_b2n<T>(j);
        T term = b / (T(2 * j) * (2 * j - 1) * (2 * j - 2));
        for (int p = 0; p < 2 * j - 2; ++p) term /= nn;
        T mag = abs(term);
        if (prev_mag >= 0 && mag > prev_mag) break;
        c += term;
        if (mag < eps) break;
        prev_mag = mag;
    }
    return c;
}

// binary64 requests are evaluated with guard digits and rounded once
template <class T = double>
T zeta_prime_minus_one() {
    if constexpr (std::is_same_v<T, double>)
        return detail::zeta_prime_minus_one_binary64();
    else
        return T(1) / 12 - log_glaisher<T>();
}

inline double zeta_prime_minus_one(const Precision&) { return zeta_prime_minus_one<double>(); }

namespace detail {

// log G(1+x) for large x by its asymptotic series
template <class T>
T log_barnes_asym(const T& x) {
    using std::abs;
    using std::log;
    const T lx = log(x);
    T s = x * x / 2 * lx - 3 * x * x / 4 + x / 2 * log(2 * pi<T>()) - lx / 12 +
          zeta_prime_minus_one<T>();
    const T eps = eps_of<T>() / 1000;
    const T x2 = x * x;
    T xp = x2;
    T prev(-1);
    for (int k = 1; k < 400; ++k) {
        T term = boost::math::bernoulli_b2n<T>(k + 1) / (T(4 * k) * (k + 1) * xp);
        T mag = abs(term);
        if (prev >= 0 && mag > prev) break;
        s += term;
        if (mag < eps * (1 + abs(s))) break;
        prev = mag;
        xp *= x2;
    }
    return s;
}

}  // namespace detail

template <class T>
T log_barnes_g(const T& z) {
    using std::ceil;
    using std::lgamma;
    if (!(z > 0)) throw std::invalid_argument("log_barnes_g: z must be positive");
    if constexpr (std::is_same_v<T, double>) return detail::log_barnes_g_binary64(z);
    const double x0 = 0.4 * detail::digits_of<T>() + 6;
    int m = 0;
    double zd = detail::to_double(z);
    if (zd - 1 < x0) m = static_cast<int>(std::ceil(x0 - (zd - 1)));
    T s = detail::log_barnes_asym<T>(z - 1 + m);
    for (int j = 0; j < m; ++j) s -= lgamma(z + j);
    return s;
}

inline double log_barnes_g(double z, const Precision&) { return log_barnes_g<double>(z); }

// principal log Gamma for Re z > 0 (continuous branch, Stirling series after upward shift)
cplx log_gamma(cplx z);

// 2 Re log G(1 + alpha/2 + i beta_im) = log G(1+alpha/2+beta) G(1+alpha/2-beta) with beta = i beta_im,
// via log G(1+z) = (z/2) log 2pi - z(z+1)/2 + z logGamma(1+z) - int_0^z logGamma(1+t) dt
double log_barnes_pair(double alpha, double beta_im);

// complex log G(1+z) by the shifted asymptotic series, independent of the integral route
cplx log_barnes_g1_series(cplx z);

}  // namespace mcut
