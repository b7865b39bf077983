#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "mcut/polynomial.hpp"

namespace mcut {

enum class PotentialKind { polynomial, polynomial_square, chebyshev, gaussian };

std::string to_string(PotentialKind k);

struct PotentialSpec {
    PotentialKind kind = PotentialKind::polynomial;
    Polynomial poly;  // exact expansion of V for every kind
    std::vector<double> roots;
    double nu = 0;
    int k = 0;
    double sigma = 0;
    double analyticity_margin = std::numeric_limits<double>::infinity();

    template <class T>
    T V(const T& x) const {
        if (kind == PotentialKind::chebyshev) {
            T t = cheb_T(x);
            return T(2 * sigma / k) * t * t;
        }
        return poly(x);
    }
    template <class T>
    T dV(const T& x) const {
        if (kind == PotentialKind::chebyshev) {
            T t, u;
            cheb_TU(x, t, u);
            return T(4 * sigma) * t * u;  // (2 sigma/k) 2 T_k k U_{k-1}
        }
        return dpoly_(x);
    }
    const Polynomial& dV_poly() const { return dpoly_; }

    // |x| beyond which V(x) - 2 log(1+|x|) > 0
    double growth_radius() const;

    void finalize();  // caches the derivative; called by the constructors

private:
    template <class T>
    void cheb_TU(const T& x, T& t, T& u) const {
        // T_k(x) and U_{k-1}(x) by the three-term recurrences
        T t0(1), t1 = x, u0(0), u1(1);
        for (int j = 1; j < k; ++j) {
            T t2 = T(2) * x * t1 - t0;
            T u2 = T(2) * x * u1 - u0;
            t0 = t1;
            t1 = t2;
            u0 = u1;
            u1 = u2;
        }
        t = t1;
        u = u1;
    }
    template <class T>
    T cheb_T(const T& x) const {
        T t, u;
        cheb_TU(x, t, u);
        return t;
    }
    Polynomial dpoly_;
};

PotentialSpec make_chebyshev_potential(int k, double sigma);
PotentialSpec make_pi_potential(const std::vector<double>& roots, double nu);
PotentialSpec make_gaussian(double sigma);
PotentialSpec make_polynomial_potential(const std::vector<double>& coeffs);

// 1/nu* is the smallest local maximum of Pi_k^2; 0 for k = 1
double nu_star(const std::vector<double>& roots);

struct TestFunction {
    Polynomial p;
    TestFunction() = default;
    explicit TestFunction(Polynomial q) : p(std::move(q)) {}
    static TestFunction from_coeffs(std::vector<double> c) { return TestFunction(Polynomial(std::move(c))); }
    template <class T>
    T operator()(const T& x) const {
        return p(x);
    }
    int degree() const { return p.degree(); }
    bool is_zero() const { return p.is_zero(); }
};

struct FHSingularity {
    double t;
    double alpha;
    double beta_im;  // beta = i * beta_im
};
using FHConfig = std::vector<FHSingularity>;

// checks alpha > -1, distinct t, and each t strictly inside a band [a_l, b_l] of the given endpoint list
void validate_fh(const FHConfig& fh, const std::vector<double>& endpoints);

}  // namespace mcut
