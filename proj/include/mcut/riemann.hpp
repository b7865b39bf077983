#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "mcut/equilibrium.hpp"

namespace mcut {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// ---------------------------------------------------------------- theta functions

struct Characteristic {
    RVec alpha, beta;

    static Characteristic zero(int g) { return {RVec::Zero(g), RVec::Zero(g)}; }
    // alpha = e_1/2, beta = (1,...,1)/2
    static Characteristic odd(int g);
    int dim() const { return static_cast<int>(alpha.size()); }
};

struct ThetaJet {
    cplx value;
    CVec grad;  // d theta / d xi_j
    CMat hess;  // d^2 theta / d xi_i d xi_j (filled when order == 2)
    double abs_sum = 0;  // sum of |terms|, the cancellation scale
};

// lattice half-width M for a given Im tau and tolerance
int theta_truncation(const CMat& tau, double tol);

cplx theta(const CVec& xi, const CMat& tau, const Characteristic& ch, double tol = 1e-16);
cplx theta(const CVec& xi, const CMat& tau, double tol = 1e-16);
ThetaJet theta_jet(const CVec& xi, const CMat& tau, const Characteristic& ch, int order = 2, double tol = 1e-16);

struct LogThetaDerivatives {
    CVec grad;
    CMat hess;
};
// gradient and Hessian of log theta[ch](xi|tau); throws if theta vanishes at xi
LogThetaDerivatives theta_log_derivatives(const CVec& xi, const CMat& tau, const Characteristic& ch,
                                          double tol = 1e-16);

// relative residual of the Jacobi transform identity
double jacobi_transform_check(const CVec& xi, const CMat& tau);

// ---------------------------------------------------------------- surface

struct SurfaceChecks {
    double tau_symmetry = 0, tau_real_part = 0, min_eig_im_tau = 0, a_normalization = 0, tau_hat = 0;
};

// a point of C \ J, or a boundary value x +- i0 on the real axis
struct SurfacePoint {
    cplx z;
    int side = 0;  // 0: generic, +1: from above, -1: from below
    static SurfacePoint at(cplx z) { return {z, 0}; }
    static SurfacePoint above(double x) { return {cplx(x, 0), +1}; }
    static SurfacePoint below(double x) { return {cplx(x, 0), -1}; }
};

struct SurfaceData {
    SupportData support;
    int g = 0;      // genus k - 1
    RMat A;         // A_{r,i}
    RMat B;         // -i times B_{j,r}
    RMat Q;         // row j: ascending coefficients of Q_j
    CMat tau;
    RMat C;
    CMat tau_hat;
    RVec omega;      // Omega_j (empty without equilibrium data)
    RVec omega_hat;  // mu([a_{j+1}, b_{j+1}])
    RVec u_inf;      // u(infinity), real
    CMat hess_log_theta0;  // (d_i d_j log theta)(0)
    double theta_tol = 1e-16;

    // integrals of Q_j/R^{1/2}_+ over segments band1, gap1, band2, ..., band k
    std::vector<CVec> segment_integrals;
    SurfaceChecks checks;  // residuals recorded by build_surface

    int k() const { return support.k(); }
    Polynomial Qpoly(int j) const;
};

SurfaceData build_surface(const SupportData& s, const std::optional<EquilibriumData>& eq = std::nullopt);
inline SurfaceData build_surface(const EquilibriumData& eq) { return build_surface(eq.support, eq); }

// R^{1/2} and gamma honoring boundary sides
cplx sqrtR_at(const SupportData& s, const SurfacePoint& p);
cplx gamma_fn(const SurfaceData& surf, const SurfacePoint& p);
inline cplx gamma_fn(const SurfaceData& surf, cplx z) { return gamma_fn(surf, SurfacePoint::at(z)); }

CVec abel_map(const SurfaceData& surf, const SurfacePoint& p);
inline CVec abel_map(const SurfaceData& surf, cplx z) { return abel_map(surf, SurfacePoint::at(z)); }
CVec abel_derivative(const SurfaceData& surf, const SurfacePoint& p);  // Q_j/R^{1/2}

// Theta(z, lambda) and Theta~(z, z) = lim Theta(z,w)/(w-z)
cplx prime_ratio_theta(const SurfaceData& surf, const SurfacePoint& z, const SurfacePoint& lam);
inline cplx prime_ratio_theta(const SurfaceData& surf, cplx z, cplx lam) {
    return prime_ratio_theta(surf, SurfacePoint::at(z), SurfacePoint::at(lam));
}
cplx theta_tilde_diag(const SurfaceData& surf, const SurfacePoint& z);

// hat basis: u^ = C tau^{-1} u, characteristic [beta^; alpha^] with alpha^ = C alpha, beta^ = -C^{-T} beta
CVec hat_abel_map(const SurfaceData& surf, const SurfacePoint& p);
Characteristic hat_odd_characteristic(const SurfaceData& surf);
cplx prime_ratio_theta_hat(const SurfaceData& surf, const SurfacePoint& z, const SurfacePoint& lam);

// int_{b_j}^{a_{j+1}} dx / (R^{1/2}(x)(x - z)), j = 0..k-2
CVec gap_cauchy(const SurfaceData& surf, cplx z);

cplx w_kernel(const SurfaceData& surf, const SurfacePoint& z, const SurfacePoint& lam);
cplx W_kernel(const SurfaceData& surf, cplx z, cplx lam);

// int_{b_k}^inf w_{t,+}(lambda) d lambda - pi i / 2
cplx edge_bracket(const SurfaceData& surf, double t);

// Upsilon(f); both the band-integral and the A^{-1} c(f) routes are evaluated and must agree,
// matrix_route selects which one is returned
RVec upsilon(const SurfaceData& surf, const TestFunction& f, bool matrix_route = false);
// Upsilon(log|. - t|) from the real-axis integral of u' left of a_1
RVec upsilon_log(const SurfaceData& surf, double t);
// Upsilon(1{t <= x}) = Im u_+(t) / pi
RVec upsilon_indicator(const SurfaceData& surf, double t);
// C tau^{-1} Upsilon; purely imaginary
CVec upsilon_hat(const SurfaceData& surf, const RVec& ups);

double green_kernel(const SurfaceData& surf, double x, double y);
// the same kernel written with Theta^, u^ and tau^
double green_kernel_hat(const SurfaceData& surf, double x, double y);
// L(f) = iint G(x+, y+) f'(x) f'(y)
double quadratic_form_L(const SurfaceData& surf, const TestFunction& f, int nodes_per_band = 64);

Polynomial tilde_Q(const SurfaceData& surf);
double c_surface(const SurfaceData& surf);

// int_{band j} g / R^{1/2}_+ and int_{gap j} g / R^{1/2} (0-based j)
cplx band_integral_R(const SupportData& s, int j, const std::function<cplx(double)>& g);
cplx gap_integral_R(const SupportData& s, int j, const std::function<cplx(double)>& g);

// moments int_{gap_i} x^r / R^{1/2}, r = 0..rmax
RMat gap_moments(const SupportData& s, int rmax);
// moments int_{band_i} x^r / |R^{1/2}_+|, r = 0..rmax
RMat band_moments(const SupportData& s, int rmax);

}  // namespace mcut
