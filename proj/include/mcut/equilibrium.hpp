#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcut/numerics.hpp"
#include "mcut/potentials.hpp"

namespace mcut {

struct SupportData {
    std::vector<double> a, b;

    SupportData() = default;
    SupportData(std::vector<double> a_, std::vector<double> b_);
    static SupportData from_endpoints(const std::vector<double>& ep);  // a1, b1, a2, b2, ...

    int k() const { return static_cast<int>(a.size()); }
    std::vector<double> endpoints() const;
    double min_gap() const;        // +inf for k = 1
    double min_band_width() const;
    int band_of(double x) const;   // index of the band containing x in its interior, or -1
};

// R^{1/2}(z) = prod ((z-a_j)(z-b_j))^{1/2}, analytic off J, ~ z^k at infinity
cplx sqrtR(const SupportData& s, cplx z);
// boundary value on the real axis from above (side = +1) or below (side = -1)
cplx sqrtR_boundary(const SupportData& s, double x, int side = +1);
// product over endpoints c != q of |q - c|^{1/2}
double sqrtR_regular(const SupportData& s, double q);

// coefficients of prod_c (1 - c w)^{p} in powers of w, up to order n (p = +1/2 or -1/2)
std::vector<double> endpoint_series(const SupportData& s, double p, int n);

class NotRegular : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EquilibriumData {
    SupportData support;
    Polynomial h;                       // h_V
    std::vector<double> band_mass;      // mu_V([a_j,b_j])
    std::vector<double> omega;          // Omega_j, j = 1..k-1
    double ell = 0;
    double energy = 0;
    std::vector<double> edge_constants; // psi~ at a1, b1, a2, b2, ...
    double int_V = 0;                   // integral of V dmu

    int k() const { return support.k(); }
    double psi(double x) const;  // density (0 off J)
    // integral of g against mu_V over band j (0-based)
    double band_integral(int j, const std::function<double(double)>& g) const;
    double integral(const std::function<double(double)>& g) const;
    double cdf(double x) const;  // mu_V((-inf, x])
    // 2 int log|x-y| dmu(y) - V(x) + ell, via the derivative formula off J and zero on J
    double el_function(double x) const;
    // int log|x-y| dmu(y) by direct quadrature
    double log_potential(double x) const;
};

struct SolveOptions {
    std::optional<SupportData> init;
    double el_margin = 1e-6;  // EL-2 strictness threshold
    Precision prec = Precision::binary64();
};

EquilibriumData solve_equilibrium(const PotentialSpec& V, int k, const SolveOptions& opt = {});

// the 2k endpoint conditions evaluated at a trial support
std::vector<double> endpoint_residuals(const PotentialSpec& V, const SupportData& s);
// h_V from the polynomial part of V'/R^{1/2}
Polynomial h_from_potential(const PotentialSpec& V, const SupportData& s);
// h_V(x) by the contour integral (1/4 pi i) oint V'(z)/((z-x) R^{1/2}(z)) dz
double h_contour(const PotentialSpec& V, const SupportData& s, double x);

// fills mass, Omega, ell, energy, edge constants from support and h
EquilibriumData assemble_equilibrium(const PotentialSpec& V, const SupportData& s, const Polynomial& h);

std::vector<double> filling_fractions(const EquilibriumData& eq);
std::vector<double> edge_constants(const EquilibriumData& eq);
double energy(const EquilibriumData& eq, const PotentialSpec& V);

// verifies h nonvanishing on J and EL-2 strict off J; throws NotRegular
void check_regular(const EquilibriumData& eq, const PotentialSpec& V, double margin = 1e-6);

// closed-form support for polynomial_square, chebyshev and gaussian kinds
std::optional<SupportData> closed_form_support(const PotentialSpec& V);
// discrete log-gas minimizer clustered into k bands
SupportData fekete_support(const PotentialSpec& V, int k, int particles = 200);

struct InverseResult {
    PotentialSpec V;
    EquilibriumData eq;
    Polynomial q;
    double c_J;
};
InverseResult potential_from_support(const SupportData& J, double vhat);

std::vector<double> real_roots(const Polynomial& p);

}  // namespace mcut
