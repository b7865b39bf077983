#pragma once

#include <vector>

#include "mcut/mp.hpp"
#include "mcut/numerics.hpp"
#include "mcut/potentials.hpp"

namespace mcut {

// nu(x) = e^{f(x)} prod |x - t_j|^{alpha_j} omega_{beta_j}(x) e^{-N_scale V(x)}
struct WeightSpec {
    PotentialSpec potential;
    TestFunction f;
    FHConfig fh;
    double N_scale = 1;
};
void validate_weight(const WeightSpec& w);

// log of the jump factor: -pi beta_im for x < t, +pi beta_im for x >= t
double log_jump(const FHSingularity& p, double x);

struct OracleOptions {
    int digits = 0;          // starting precision; 0 means 64 + ceil(1.5 N)
    int max_digits = 2048;
    double tol = 1e-12;      // agreement of two successive runs, relative to max(1, |log H_N|)
    int panel_nodes = 24;
    int panels = 0;          // panels over the truncated axis; 0 means max(32, 2N)
};

struct DiscreteMeasure {
    std::vector<mpreal> x, w;
    size_t size() const { return x.size(); }
};
// composite Gauss rules over the truncated axis, Gauss-Jacobi next to each |x - t|^alpha
DiscreteMeasure discretize(const WeightSpec& w, int degree, int digits, int panels, int nodes);

struct OPData {
    std::vector<double> alpha;   // diagonal recurrence coefficients
    std::vector<double> beta;    // off-diagonal sqrt(beta_j), j >= 1; beta[0] = sqrt(m_0)
    std::vector<double> log_norms;  // log kappa_j^{-2}
    int digits = 0;
    double achieved = 0;

    // mp data of the last run
    std::vector<mpreal> a_mp, b_mp;  // monic recurrence: pi_{j+1} = (x - a_j) pi_j - b_j pi_{j-1}; b_0 = m_0
    std::vector<mpreal> log_norms_mp;
};
// Stieltjes procedure on a discrete measure, degrees 0..n-1 (n recurrence steps)
OPData stieltjes(const DiscreteMeasure& m, int n);
// monic P_j(x) for j = 0..n from the recurrence
std::vector<mpreal> monic_values(const OPData& op, const mpreal& x, int n);

struct HankelResult {
    double logdet = 0;
    int digits = 0;
    double achieved = 0;   // difference between the last two runs
    double seconds = 0;
    size_t nodes = 0;
};
HankelResult hankel_logdet(const WeightSpec& w, int N, const OracleOptions& opt = {});
// explicit N x N moment determinant by LU at the given precision
double hankel_logdet_determinant(const WeightSpec& w, int N, int digits, int panels = 0);
std::vector<mpreal> moments(const WeightSpec& w, int max_degree, int digits, int panels = 0);

// exact log H_N(e^{-2 sigma N_scale x^2}) from the Hermite norms
double gaussian_reference(double sigma, int N, double N_scale);

OPData orthonormal_data(const WeightSpec& w, int N, const OracleOptions& opt = {});
// max |<p_i, p_j> - delta_ij| for i, j <= m on an independent discretization
double orthogonality_residual(const WeightSpec& w, const OPData& op, int m);

// log H_N(nu) - log H_N(e^{-N V})
double ratio_oracle(const WeightSpec& weight, const WeightSpec& base, int N, const OracleOptions& opt = {});

// ---------------------------------------------------------------- Chebyshev-weight identities

// w_1(x) = 1(x) e^{-2 n_w sigma x^2} / sqrt(1 - x^2) with the piecewise-linear cutoff built from sigma1
struct ChebyshevWeight {
    double sigma = 2.0;
    double sigma1 = 1.5;
    int n_w = -1;  // exponent scale; -1 uses the n of the check
};
double cutoff_one(double x, double sigma1);

struct ChebyshevCheck {
    double hankel_residual = 0;  // |log lhs - log rhs| of part (c)
    double kappa_residual = 0;   // max over degrees <= nk + r of part (b)
    double log_hankel_wk = 0;
    int digits = 0;
};
// w_k(x) = |U_{k-1}(x)| w_1(T_k(x)); both sides by independent quadratures in the angle variable
ChebyshevCheck chebyshev_identity_check(const ChebyshevWeight& w1, int k, int n, int r, int digits = 50);
// discrete measure of w_k in x = cos(phi)
DiscreteMeasure chebyshev_measure(const ChebyshevWeight& w1, int k, int n_w, int degree, int digits, int refine = 1);

}  // namespace mcut
