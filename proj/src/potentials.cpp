#include "mcut/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mcut {

std::string to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::polynomial: return "polynomial";
        case PotentialKind::polynomial_square: return "polynomial_square";
        case PotentialKind::chebyshev: return "chebyshev";
        case PotentialKind::gaussian: return "gaussian";
    }
    return "unknown";
}

void PotentialSpec::finalize() {
    dpoly_ = poly.derivative();
    if (poly.degree() < 2 || poly.degree() % 2 != 0 || !(poly.leading() > 0))
        throw std::invalid_argument("potential must be an even-degree polynomial with positive leading coefficient");
}

double PotentialSpec::growth_radius() const {
    const auto& c = poly.coeffs();
    const int d = poly.degree();
    const double lead = c[d];
    double cauchy = 0;
    for (int i = 0; i < d; ++i) cauchy = std::max(cauchy, std::abs(c[i] / lead));
    // lower bound of V on |x| = R, minus the logarithmic term
    auto lower = [&](double R) {
        double s = lead * std::pow(R, d);
        for (int i = 0; i < d; ++i) s -= std::abs(c[i]) * std::pow(R, i);
        return s - 2 * std::log1p(R);
    };
    double R = 1 + cauchy;
    while (!(lower(R) > 0 && lower(2 * R) > lower(R))) R *= 1.25;
    return R;
}

namespace {

Polynomial square(const Polynomial& p) { return p * p; }

}  // namespace

PotentialSpec make_chebyshev_potential(int k, double sigma) {
    if (k < 1) throw std::invalid_argument("chebyshev potential: k must be positive");
    if (!(sigma > 1)) throw std::invalid_argument("chebyshev potential: sigma must exceed 1");
    PotentialSpec v;
    v.kind = PotentialKind::chebyshev;
    v.k = k;
    v.sigma = sigma;
    v.poly = (2 * sigma / k) * square(chebyshev_T(k));
    v.finalize();
    return v;
}

double nu_star(const std::vector<double>& roots) {
    std::vector<double> r = roots;
    std::sort(r.begin(), r.end());
    for (size_t i = 1; i < r.size(); ++i)
        if (!(r[i] > r[i - 1])) throw std::invalid_argument("polynomial_square: roots must be distinct");
    if (r.size() < 2) return 0.0;
    Polynomial pi = Polynomial::from_roots(r);
    Polynomial dpi = pi.derivative();
    double smallest = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < r.size(); ++i) {
        // Pi' changes sign exactly once between consecutive simple roots
        double lo = r[i], hi = r[i + 1];
        double flo = dpi(lo);
        for (int it = 0; it < 200 && hi - lo > 1e-16 * (1 + std::abs(lo)); ++it) {
            double m = 0.5 * (lo + hi);
            double fm = dpi(m);
            if ((fm > 0) == (flo > 0)) {
                lo = m;
                flo = fm;
            } else {
                hi = m;
            }
        }
        double c = 0.5 * (lo + hi);
        smallest = std::min(smallest, pi(c) * pi(c));
    }
    return 1 / smallest;
}

PotentialSpec make_pi_potential(const std::vector<double>& roots, double nu) {
    if (roots.empty()) throw std::invalid_argument("polynomial_square: need at least one root");
    double ns = nu_star(roots);
    if (!(nu > ns) || !(nu > 0)) {
        std::ostringstream os;
        os << "polynomial_square: nu must exceed nu* = " << ns;
        throw std::invalid_argument(os.str());
    }
    PotentialSpec v;
    v.kind = PotentialKind::polynomial_square;
    v.roots = roots;
    std::sort(v.roots.begin(), v.roots.end());
    v.nu = nu;
    v.k = static_cast<int>(roots.size());
    v.poly = (2 * nu / v.k) * square(Polynomial::from_roots(v.roots));
    v.finalize();
    return v;
}

PotentialSpec make_gaussian(double sigma) {
    if (!(sigma > 0)) throw std::invalid_argument("gaussian: sigma must be positive");
    PotentialSpec v;
    v.kind = PotentialKind::gaussian;
    v.sigma = sigma;
    v.k = 1;
    v.poly = Polynomial({0.0, 0.0, 2 * sigma});
    v.finalize();
    return v;
}

PotentialSpec make_polynomial_potential(const std::vector<double>& coeffs) {
    PotentialSpec v;
    v.kind = PotentialKind::polynomial;
    v.poly = Polynomial(coeffs);
    v.finalize();
    return v;
}

void validate_fh(const FHConfig& fh, const std::vector<double>& ep) {
    for (size_t i = 0; i < fh.size(); ++i) {
        if (!(fh[i].alpha > -1)) throw std::invalid_argument("FH: alpha must exceed -1");
        for (size_t j = 0; j < i; ++j)
            if (fh[i].t == fh[j].t) throw std::invalid_argument("FH: coincident singularities");
        bool inside = false;
        for (size_t l = 0; l + 1 < ep.size(); l += 2)
            if (fh[i].t > ep[l] && fh[i].t < ep[l + 1]) inside = true;
        if (!inside) throw std::invalid_argument("FH: singularity not inside a band");
    }
}

}  // namespace mcut
