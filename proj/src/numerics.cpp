#include "mcut/numerics.hpp"

#include "mcut/mp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

namespace mcut {

namespace detail {

QuadRule<double> golub_welsch_nodes(int n, double a, double b) {
    std::vector<double> diag, off;
    double mu0;
    jacobi_recurrence<double>(n, a, b, diag, off, mu0);
    QuadRule<double> r;
    if (n == 1) {
        r.x = {diag[0]};
        r.w = {mu0};
        return r;
    }
    Eigen::VectorXd d(n), e(n - 1);
    for (int i = 0; i < n; ++i) d(i) = diag[i];
    for (int i = 0; i + 1 < n; ++i) e(i) = off[i + 1];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
    r.x.resize(n);
    r.w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) r.x[i] = std::clamp(es.eigenvalues()(i), -1.0, 1.0);
    return r;
}

double zeta_prime_minus_one_binary64() {
    static const double v = [] {
        DigitsGuard g(40);
        return static_cast<double>(zeta_prime_minus_one<mpreal>());
    }();
    return v;
}

double log_barnes_g_binary64(double z) {
    DigitsGuard g(36);
    return static_cast<double>(log_barnes_g<mpreal>(mpreal(z)));
}

}  // namespace detail

cplx log_gamma(cplx z) {
    if (!(z.real() > 0)) throw std::invalid_argument("log_gamma: needs Re z > 0");
    cplx shift = 0;
    while (z.real() < 15) {
        shift += std::log(z);
        z += 1.0;
    }
    const cplx iz = 1.0 / z, iz2 = iz * iz;
    cplx s = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2 * M_PI);
    cplx p = iz;
    for (int k = 1; k <= 12; ++k) {
        double b = boost::math::bernoulli_b2n<double>(k);
        s += b / (2.0 * k * (2.0 * k - 1)) * p;
        p *= iz2;
    }
    return s - shift;
}

double log_barnes_pair(double alpha, double beta_im) {
    if (!(alpha > -1)) throw std::invalid_argument("log_barnes_pair: alpha must exceed -1");
    const cplx z(alpha / 2, beta_im);
    if (std::abs(z) == 0) return 0.0;
    auto g = [&](double s) { return log_gamma(1.0 + s * z); };
    cplx integral = z * integrate_adaptive(g, 0.0, 1.0, 1e-15);
    cplx l = z / 2.0 * std::log(2 * M_PI) - z * (z + 1.0) / 2.0 + z * log_gamma(1.0 + z) - integral;
    return 2 * l.real();
}

cplx log_barnes_g1_series(cplx z) {
    cplx sub = 0;
    int m = 0;
    while (z.real() + m < 14) ++m;
    for (int j = 1; j <= m; ++j) sub += log_gamma(z + double(j));
    const cplx x = z + double(m);
    const cplx lx = std::log(x);
    cplx s = x * x / 2.0 * lx - 3.0 * x * x / 4.0 + x / 2.0 * std::log(2 * M_PI) - lx / 12.0 +
             zeta_prime_minus_one<double>();
    const cplx ix2 = 1.0 / (x * x);
    cplx p = ix2;
    for (int k = 1; k <= 12; ++k) {
        s += boost::math::bernoulli_b2n<double>(k + 1) / (4.0 * k * (k + 1)) * p;
        p *= ix2;
    }
    return s - sub;
}

}  // namespace mcut
