#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mcut/riemann.hpp"

namespace mcut {

struct AsymptoticReport {
    double total = 0;
    std::vector<std::pair<std::string, double>> terms;
    int n = 0;
    int k = 0;
    std::string basis = "standard";
    std::string kind;

    void add(const std::string& label, double value) {
        terms.emplace_back(label, value);
        total += value;
    }
    double term(const std::string& label) const;  // throws if absent
    double sum_of_terms() const;
};

// ---------------------------------------------------------------- partition function

AsymptoticReport log_partition_asym(const EquilibriumData& eq, const SurfaceData& surf, int N);
// V = (2 nu / k) Pi_k^2 with theta(r Omega), r = N mod k
AsymptoticReport log_partition_asym_poly(const std::vector<double>& roots, double nu, int N);
// two-cut display with the elliptic K(k) in place of theta(0)
AsymptoticReport log_partition_two_cut_elliptic(const EquilibriumData& eq, const SurfaceData& surf, int N);
// V = 2 sigma x^2 closed form
AsymptoticReport log_partition_gaussian(double sigma, int N);

// ---------------------------------------------------------------- smooth ratio

// Concentric confocal ellipses around each band. A contour around band j reaches
// outer * g (resp. inner * g) beyond the band ends, g the smallest gap (band width when k = 1).
struct ContourOptions {
    double outer = 0.45;
    double inner = 0.25;
    bool swap = false;  // Gamma~ outside Gamma
    int min_nodes = 64;
    int max_nodes = 8192;
    double tol = 1e-13;
};
void validate_contours(const ContourOptions& c);

// (1/4) oint_Gamma oint_Gamma~ W(z,l) f(z) f(l) dz/2pi i dl/2pi i
double double_contour_W(const SurfaceData& surf, const TestFunction& f, const ContourOptions& c = {});
// (1/2) oint_Gamma R(z)/(2pi i) int_J f/(R_+(x)(x-z)) dx f'(z) dz/(2pi i)
double single_contour_term(const SurfaceData& surf, const TestFunction& f, const ContourOptions& c = {});

AsymptoticReport log_ratio_smooth(const EquilibriumData& eq, const SurfaceData& surf, const TestFunction& f, int N,
                                  int form, const ContourOptions& c = {});

// ---------------------------------------------------------------- counting law

struct CountingLaw {
    std::vector<std::vector<int>> points;  // x in Z^{k-1}
    std::vector<double> mass;
    RVec frac;   // <N Omega^>
    RVec floor;  // N Omega^ - <N Omega^>, so that # = floor + x
    int N = 0;

    double mass_at(const std::vector<int>& x) const;
    // E[exp(s . #)] from the table
    double laplace(const RVec& s) const;
};
CountingLaw counting_law(const EquilibriumData& eq, const SurfaceData& surf, int N);
// exp(N s.Omega^) theta^[-N Omega^; 0](s / 2 pi i) / theta^[-N Omega^; 0](0)
double counting_laplace_theta(const SurfaceData& surf, const RVec& omega_hat, int N, const RVec& s);

// ---------------------------------------------------------------- Fisher-Hartwig

// Upsilon(f + log omega) assembled from its polynomial, root and jump parts
RVec upsilon_fh(const SurfaceData& surf, const TestFunction& f, const FHConfig& fh);
// int log omega dmu
double integral_log_omega(const EquilibriumData& eq, const FHConfig& fh);

AsymptoticReport log_ratio_fh(const EquilibriumData& eq, const SurfaceData& surf, const TestFunction& f,
                              const FHConfig& fh, int N, const ContourOptions& c = {});
// log E prod |P(t_j)|^{alpha_j}
double moment_abs_charpoly(const EquilibriumData& eq, const SurfaceData& surf, const FHConfig& fh, int N);
AsymptoticReport moment_abs_charpoly_report(const EquilibriumData& eq, const SurfaceData& surf, const FHConfig& fh,
                                            int N);

struct CountingPoint {
    double t;
    double v;
};
// log E exp(sum 2 pi v_j H_N(t_j)); indicator_sign = -1 evaluates the theta argument as
// N Omega - 2 pi sum v_j Upsilon(1{t_j <= x}), +1 as printed in the pure-jump display
double counting_mgf_fh(const EquilibriumData& eq, const SurfaceData& surf, const std::vector<CountingPoint>& pts, int N,
                       int indicator_sign = -1);
AsymptoticReport counting_mgf_report(const EquilibriumData& eq, const SurfaceData& surf,
                                     const std::vector<CountingPoint>& pts, int N, int indicator_sign = -1);

// PV int_J w_{t,+}(l_+) f(l) dl
cplx pv_w_integral(const SurfaceData& surf, double t, const TestFunction& f);

}  // namespace mcut
