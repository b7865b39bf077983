#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace mcut {

// real polynomial, coefficients in ascending order
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }
    static Polynomial constant(double v) { return Polynomial({v}); }
    static Polynomial monomial(int d, double coef = 1.0) {
        std::vector<double> c(d + 1, 0.0);
        c[d] = coef;
        return Polynomial(std::move(c));
    }
    // prod (x - r_j)
    static Polynomial from_roots(const std::vector<double>& roots) {
        Polynomial p = constant(1.0);
        for (double r : roots) p = p * Polynomial({-r, 1.0});
        return p;
    }

    int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<double>& coeffs() const { return c_; }
    double coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : 0.0; }
    double leading() const { return c_.empty() ? 0.0 : c_.back(); }

    template <class T>
    T operator()(const T& x) const {
        T s(0);
        for (int i = degree(); i >= 0; --i) s = s * x + T(c_[i]);
        return s;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<double> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }
    // antiderivative vanishing at 0
    Polynomial integral() const {
        std::vector<double> d(c_.size() + 1, 0.0);
        for (size_t i = 0; i < c_.size(); ++i) d[i + 1] = c_[i] / static_cast<double>(i + 1);
        return Polynomial(std::move(d));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<double> c(std::max(a.c_.size(), b.c_.size()), 0.0);
        for (size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }
    friend Polynomial operator*(double s, const Polynomial& a) {
        std::vector<double> c = a.c_;
        for (auto& v : c) v *= s;
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<double> c(a.c_.size() + b.c_.size() - 1, 0.0);
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }
    // p(x + t)
    Polynomial shifted(double t) const {
        Polynomial out, lin({t, 1.0});
        for (int i = degree(); i >= 0; --i) out = out * lin + constant(c_[i]);
        return out;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

// Chebyshev T_k and U_k as polynomials
inline Polynomial chebyshev_T(int k) {
    Polynomial a = Polynomial::constant(1.0), b({0.0, 1.0});
    if (k == 0) return a;
    for (int j = 1; j < k; ++j) {
        Polynomial c = Polynomial({0.0, 2.0}) * b - a;
        a = b;
        b = c;
    }
    return b;
}

inline Polynomial chebyshev_U(int k) {
    Polynomial a = Polynomial::constant(1.0), b({0.0, 2.0});
    if (k == 0) return a;
    for (int j = 1; j < k; ++j) {
        Polynomial c = Polynomial({0.0, 2.0}) * b - a;
        a = b;
        b = c;
    }
    return b;
}

}  // namespace mcut
