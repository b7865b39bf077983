#include "mcut/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace mcut {

namespace {

constexpr double kLn10 = 2.302585092994046;

double log_weight_d(const WeightSpec& w, double x) {
    double v = w.f(x) - w.N_scale * w.potential.V(x);
    for (const auto& p : w.fh) {
        if (p.alpha != 0) v += p.alpha * std::log(std::abs(x - p.t));
        v += log_jump(p, x);
    }
    return v;
}

// log nu(x) without the |x - t|^alpha factors of the excluded singularities
mpreal log_weight_mp(const WeightSpec& w, const mpreal& x, int skip_a, int skip_b) {
    using std::abs;
    using std::log;
    mpreal v = w.f(x) - mpreal(w.N_scale) * w.potential.V(x);
    for (int i = 0; i < static_cast<int>(w.fh.size()); ++i) {
        const auto& p = w.fh[i];
        if (p.alpha != 0 && i != skip_a && i != skip_b) v += mpreal(p.alpha) * log(abs(x - mpreal(p.t)));
        if (p.beta_im != 0) v += (x < mpreal(p.t) ? -1 : 1) * boost::math::constants::pi<mpreal>() * mpreal(p.beta_im);
    }
    return v;
}

struct Range {
    double lo, hi;
};

// the axis outside [lo, hi] carries less than 10^{-(digits+10)} of the largest x^degree nu(x)
Range truncation(const WeightSpec& w, int degree, int digits) {
    double R = std::max(2.0, w.potential.growth_radius());
    for (const auto& p : w.fh) R = std::max(R, std::abs(p.t) + 1);
    const double thr = (digits + 10) * kLn10 + 5;
    auto g = [&](double x) { return log_weight_d(w, x) + degree * std::log1p(std::abs(x)); };
    for (int it = 0; it < 60; ++it) {
        const int G = 4000;
        double gmax = -1e300;
        std::vector<double> vals(G + 1);
        for (int i = 0; i <= G; ++i) {
            double x = -R + 2 * R * (i + 0.5 * std::sqrt(2.0) - 0.5) / G;
            vals[i] = g(x);
            if (std::isfinite(vals[i])) gmax = std::max(gmax, vals[i]);
        }
        if (!std::isfinite(gmax)) throw std::invalid_argument("weight: not finite anywhere");
        int first = -1, last = -1;
        for (int i = 0; i <= G; ++i)
            if (vals[i] > gmax - thr) {
                if (first < 0) first = i;
                last = i;
            }
        if (first > 1 && last < G - 1) {
            double step = 2 * R / G;
            return {-R + step * (first - 1), -R + step * (last + 1)};
        }
        R *= 1.5;
    }
    throw NumericalFailure("weight: tails do not decay", 0);
}

}  // namespace

double log_jump(const FHSingularity& p, double x) {
    if (p.beta_im == 0) return 0;
    return (x < p.t ? -1 : 1) * M_PI * p.beta_im;
}

void validate_weight(const WeightSpec& w) {
    if (!(w.N_scale > 0)) throw std::invalid_argument("weight: N_scale must be positive");
    for (size_t i = 0; i < w.fh.size(); ++i) {
        if (!(w.fh[i].alpha > -1)) throw std::invalid_argument("weight: alpha must exceed -1");
        for (size_t j = 0; j < i; ++j)
            if (w.fh[i].t == w.fh[j].t) throw std::invalid_argument("weight: coincident singularities");
    }
    const int dv = w.potential.poly.degree(), df = w.f.degree();
    if (w.potential.kind != PotentialKind::chebyshev && df >= dv)
        throw std::invalid_argument("weight: e^f must be dominated by e^{-N V}");
}

DiscreteMeasure discretize(const WeightSpec& w, int degree, int digits, int panels, int nodes) {
    validate_weight(w);
    if (panels < 1 || nodes < 2) throw std::invalid_argument("discretize: bad panel layout");
    DigitsGuard guard(digits);
    Range rg = truncation(w, degree, digits);
    std::vector<std::pair<double, int>> brk{{rg.lo, -1}, {rg.hi, -1}};
    for (int i = 0; i < static_cast<int>(w.fh.size()); ++i) {
        const auto& p = w.fh[i];
        if (p.t <= rg.lo || p.t >= rg.hi) throw std::invalid_argument("weight: singularity outside the mass region");
        if (p.alpha != 0 || p.beta_im != 0) brk.push_back({p.t, p.alpha != 0 ? i : -1});
    }
    std::sort(brk.begin(), brk.end());
    const double h = (rg.hi - rg.lo) / panels;
    DiscreteMeasure m;
    for (size_t s = 0; s + 1 < brk.size(); ++s) {
        const mpreal A(brk[s].first), B(brk[s + 1].first);
        const double len = brk[s + 1].first - brk[s].first;
        const int np = std::max(2, static_cast<int>(std::ceil(len / h)));
        for (int q = 0; q < np; ++q) {
            mpreal a = A + (B - A) * q / np, b = A + (B - A) * (q + 1) / np;
            int sa = (q == 0) ? brk[s].second : -1, sb = (q == np - 1) ? brk[s + 1].second : -1;
            double le = sa >= 0 ? w.fh[sa].alpha : 0.0, re = sb >= 0 ? w.fh[sb].alpha : 0.0;
            const auto& rule = gauss_jacobi<mpreal>(nodes, re, le);
            mpreal half = (b - a) / 2, mid = (a + b) / 2;
            mpreal scale = (le == 0 && re == 0) ? half : mpreal(pow(half, 1 + mpreal(le) + mpreal(re)));
            for (int i = 0; i < nodes; ++i) {
                mpreal x = mid + half * rule.x[i];
                m.x.push_back(x);
                m.w.push_back(rule.w[i] * scale * exp(log_weight_mp(w, x, sa, sb)));
            }
        }
    }
    return m;
}

OPData stieltjes(const DiscreteMeasure& m, int n) {
    using std::log;
    using std::sqrt;
    const size_t M = m.size();
    if (n < 0) throw std::invalid_argument("stieltjes: negative degree");
    if (M <= static_cast<size_t>(n) + 1) throw std::invalid_argument("stieltjes: too few nodes");
    OPData op;
    mpreal h0 = 0;
    for (const auto& v : m.w) h0 += v;
    if (!(h0 > 0)) throw NumericalFailure("stieltjes: nonpositive mass", 0);
    std::vector<mpreal> qm(M, mpreal(0)), q(M, 1 / sqrt(h0)), r(M);
    op.b_mp.push_back(h0);
    op.log_norms_mp.push_back(log(h0));
    mpreal sb_prev = 0;
    for (int j = 0; j < n; ++j) {
        mpreal a = 0;
        for (size_t i = 0; i < M; ++i) a += m.w[i] * m.x[i] * q[i] * q[i];
        mpreal b = 0;
        for (size_t i = 0; i < M; ++i) {
            r[i] = (m.x[i] - a) * q[i] - sb_prev * qm[i];
            b += m.w[i] * r[i] * r[i];
        }
        // re-orthogonalize once against q_j
        mpreal c = 0;
        for (size_t i = 0; i < M; ++i) c += m.w[i] * r[i] * q[i];
        if (c != 0) {
            b = 0;
            for (size_t i = 0; i < M; ++i) {
                r[i] -= c * q[i];
                b += m.w[i] * r[i] * r[i];
            }
            a += c;
        }
        if (!(b > 0)) throw NumericalFailure("stieltjes: loss of positivity", static_cast<double>(b));
        op.a_mp.push_back(a);
        op.b_mp.push_back(b);
        op.log_norms_mp.push_back(op.log_norms_mp.back() + log(b));
        mpreal sb = sqrt(b);
        for (size_t i = 0; i < M; ++i) {
            qm[i] = q[i];
            q[i] = r[i] / sb;
        }
        sb_prev = sb;
    }
    op.digits = static_cast<int>(mpreal::default_precision());
    for (const auto& a : op.a_mp) op.alpha.push_back(static_cast<double>(a));
    for (const auto& b : op.b_mp) op.beta.push_back(static_cast<double>(sqrt(b)));
    for (const auto& l : op.log_norms_mp) op.log_norms.push_back(static_cast<double>(l));
    return op;
}

std::vector<mpreal> monic_values(const OPData& op, const mpreal& x, int n) {
    if (n > static_cast<int>(op.a_mp.size())) throw std::invalid_argument("monic_values: degree beyond the data");
    std::vector<mpreal> p{mpreal(1)};
    if (n >= 1) p.push_back(x - op.a_mp[0]);
    for (int j = 1; j < n; ++j) p.push_back((x - op.a_mp[j]) * p[j] - op.b_mp[j] * p[j - 1]);
    return p;
}

namespace {

struct Run {
    OPData op;
    double logdet;
    size_t nodes;
};

Run run_once(const WeightSpec& w, int N, int digits, int panels, int nodes) {
    DigitsGuard guard(digits);
    auto m = discretize(w, 2 * N + 2, digits, panels, nodes);
    Run r{stieltjes(m, N), 0, m.size()};
    mpreal s = 0;
    for (int j = 0; j < N; ++j) s += r.op.log_norms_mp[j];
    r.logdet = static_cast<double>(s);
    return r;
}

template <class Done>
Run escalate(const WeightSpec& w, int N, const OracleOptions& opt, HankelResult& info, Done&& agree) {
    if (N < 1) throw std::invalid_argument("oracle: N must be positive");
    auto t0 = std::chrono::steady_clock::now();
    int d = opt.digits > 0 ? opt.digits : 64 + static_cast<int>(std::ceil(1.5 * N));
    int P = opt.panels > 0 ? opt.panels : std::max(32, 2 * N);
    Run prev = run_once(w, N, d, P, opt.panel_nodes);
    while (true) {
        int d2 = 2 * d, P2 = 2 * P;
        if (d2 > opt.max_digits) throw NumericalFailure("oracle: precision limit reached", info.achieved);
        Run cur = run_once(w, N, d2, P2, opt.panel_nodes);
        info.achieved = agree(prev, cur);
        if (info.achieved <= opt.tol) {
            info.digits = d2;
            info.logdet = cur.logdet;
            info.nodes = cur.nodes;
            info.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            cur.op.achieved = info.achieved;
            cur.op.digits = d2;
            return cur;
        }
        d = d2;
        P = P2;
        prev = std::move(cur);
    }
}

}  // namespace

HankelResult hankel_logdet(const WeightSpec& w, int N, const OracleOptions& opt) {
    HankelResult info;
    escalate(w, N, opt, info, [](const Run& a, const Run& b) {
        return std::abs(a.logdet - b.logdet) / std::max(1.0, std::abs(b.logdet));
    });
    return info;
}

OPData orthonormal_data(const WeightSpec& w, int N, const OracleOptions& opt) {
    HankelResult info;
    return escalate(w, N, opt, info, [](const Run& a, const Run& b) {
               double e = 0;
               for (size_t j = 0; j < b.op.log_norms.size(); ++j)
                   e = std::max(e, std::abs(a.op.log_norms[j] - b.op.log_norms[j]) / std::max(1.0, std::abs(b.op.log_norms[j])));
               for (size_t j = 0; j < b.op.alpha.size(); ++j)
                   e = std::max(e, std::abs(a.op.alpha[j] - b.op.alpha[j]) / std::max(1.0, std::abs(b.op.alpha[j])));
               return e;
           })
        .op;
}

double orthogonality_residual(const WeightSpec& w, const OPData& op, int m) {
    using std::sqrt;
    if (m > static_cast<int>(op.a_mp.size())) throw std::invalid_argument("orthogonality_residual: m beyond the data");
    DigitsGuard guard(op.digits);
    // a panel layout unrelated to the one used for the recurrence
    auto meas = discretize(w, 2 * m + 2, op.digits, 3 * std::max(16, m) + 7, 20);
    const size_t M = meas.size();
    std::vector<std::vector<mpreal>> p(m + 1, std::vector<mpreal>(M));
    for (size_t i = 0; i < M; ++i) {
        auto mv = monic_values(op, meas.x[i], m);
        for (int j = 0; j <= m; ++j) p[j][i] = mv[j];
    }
    std::vector<mpreal> norm(m + 1);
    for (int j = 0; j <= m; ++j) norm[j] = sqrt(exp(op.log_norms_mp[j]));
    double worst = 0;
    for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= a; ++b) {
            mpreal s = 0;
            for (size_t i = 0; i < M; ++i) s += meas.w[i] * p[a][i] * p[b][i];
            s /= norm[a] * norm[b];
            worst = std::max(worst, std::abs(static_cast<double>(s) - (a == b ? 1.0 : 0.0)));
        }
    return worst;
}

std::vector<mpreal> moments(const WeightSpec& w, int max_degree, int digits, int panels) {
    if (max_degree < 0) throw std::invalid_argument("moments: negative degree");
    DigitsGuard guard(digits);
    auto m = discretize(w, max_degree, digits, panels > 0 ? panels : std::max(48, 2 * max_degree + 7), 24);
    std::vector<mpreal> out(max_degree + 1, mpreal(0));
    for (size_t i = 0; i < m.size(); ++i) {
        mpreal p = m.w[i];
        for (int j = 0; j <= max_degree; ++j) {
            out[j] += p;
            p *= m.x[i];
        }
    }
    return out;
}

double hankel_logdet_determinant(const WeightSpec& w, int N, int digits, int panels) {
    using std::abs;
    using std::log;
    if (N < 1) throw std::invalid_argument("hankel_logdet_determinant: N must be positive");
    DigitsGuard guard(digits);
    auto mom = moments(w, 2 * N - 2, digits, panels);
    std::vector<std::vector<mpreal>> H(N, std::vector<mpreal>(N));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) H[i][j] = mom[i + j];
    mpreal logdet = 0;
    int sign = 1;
    for (int c = 0; c < N; ++c) {
        int piv = c;
        for (int i = c + 1; i < N; ++i)
            if (abs(H[i][c]) > abs(H[piv][c])) piv = i;
        if (H[piv][c] == 0) throw NumericalFailure("hankel_logdet_determinant: singular", 0);
        if (piv != c) {
            std::swap(H[piv], H[c]);
            sign = -sign;
        }
        if (H[c][c] < 0) sign = -sign;
        logdet += log(abs(H[c][c]));
        for (int i = c + 1; i < N; ++i) {
            mpreal f = H[i][c] / H[c][c];
            for (int j = c; j < N; ++j) H[i][j] -= f * H[c][j];
        }
    }
    if (sign < 0) throw NumericalFailure("hankel_logdet_determinant: negative determinant", 0);
    return static_cast<double>(logdet);
}

double gaussian_reference(double sigma, int N, double N_scale) {
    if (!(sigma > 0) || !(N_scale > 0)) throw std::invalid_argument("gaussian_reference: sigma, N_scale must be positive");
    if (N < 0) throw std::invalid_argument("gaussian_reference: negative N");
    const double c = 2 * sigma * N_scale;
    double s = 0;
    for (int j = 0; j < N; ++j) s += 0.5 * std::log(M_PI) + std::lgamma(j + 1.0) - j * std::log(2.0) - (j + 0.5) * std::log(c);
    return s;
}

double ratio_oracle(const WeightSpec& weight, const WeightSpec& base, int N, const OracleOptions& opt) {
    if (!base.f.is_zero() || !base.fh.empty()) throw std::invalid_argument("ratio_oracle: base weight must be e^{-N V}");
    if (weight.N_scale != base.N_scale || weight.N_scale != N)
        throw std::invalid_argument("ratio_oracle: both weights need N_scale = N");
    if (weight.potential.poly.coeffs() != base.potential.poly.coeffs() || weight.potential.kind != base.potential.kind)
        throw std::invalid_argument("ratio_oracle: weights must share V");
    return hankel_logdet(weight, N, opt).logdet - hankel_logdet(base, N, opt).logdet;
}

// ---------------------------------------------------------------- Chebyshev-weight identities

double cutoff_one(double x, double sigma1) {
    const double d = (1 - 1 / sigma1) / 3, c1 = 1 / sigma1 + d, c2 = 1 - d, x2 = x * x;
    if (x2 < c1) return 1;
    if (x2 > c2) return 0;
    return 1 - (x2 - c1) / d;
}

DiscreteMeasure chebyshev_measure(const ChebyshevWeight& w1, int k, int n_w, int degree, int digits, int refine) {
    using std::acos;
    using std::cos;
    using std::exp;
    using std::sqrt;
    if (k < 1) throw std::invalid_argument("chebyshev_measure: k must be positive");
    if (!(w1.sigma1 > 1)) throw std::invalid_argument("chebyshev_measure: sigma1 must exceed 1");
    DigitsGuard guard(digits);
    const mpreal pi = boost::math::constants::pi<mpreal>();
    const mpreal s1(w1.sigma1), d = (1 - 1 / s1) / 3, c1 = 1 / s1 + d, c2 = 1 - d;
    auto cut = [&](const mpreal& y) {
        mpreal y2 = y * y;
        if (y2 <= c1) return mpreal(1);
        if (y2 >= c2) return mpreal(0);
        return mpreal(1 - (y2 - c1) / d);
    };
    // kinks of 1(cos psi) in psi = k phi over [0, k pi]
    std::vector<mpreal> br{mpreal(0), k * pi};
    for (const mpreal& c : {c1, c2}) {
        mpreal a = acos(sqrt(c));
        for (int m = 0; m <= k; ++m)
            for (const mpreal& v : {m * pi - a, m * pi + a, m * pi - (pi - a), m * pi + (pi - a)})
                if (v > 0 && v < k * pi) br.push_back(v);
    }
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end(), [](const mpreal& a, const mpreal& b) { return abs(a - b) < 1e-30; }), br.end());
    const int nodes = 40, sub = refine * (2 + degree / 8);
    const auto& rule = gauss_legendre<mpreal>(nodes);
    const mpreal ex = 2 * mpreal(n_w) * mpreal(w1.sigma);
    DiscreteMeasure m;
    for (size_t s = 0; s + 1 < br.size(); ++s) {
        mpreal mid = (br[s] + br[s + 1]) / 2;
        if (cut(cos(mid)) == 0) continue;
        for (int q = 0; q < sub; ++q) {
            mpreal a = br[s] + (br[s + 1] - br[s]) * q / sub, b = br[s] + (br[s + 1] - br[s]) * (q + 1) / sub;
            mpreal half = (b - a) / 2, c = (a + b) / 2;
            for (int i = 0; i < nodes; ++i) {
                mpreal psi = c + half * rule.x[i];
                mpreal y = cos(psi);
                m.x.push_back(cos(psi / k));
                // dpsi = k dphi
                m.w.push_back(rule.w[i] * half / k * cut(y) * exp(-ex * y * y));
            }
        }
    }
    return m;
}

ChebyshevCheck chebyshev_identity_check(const ChebyshevWeight& w1, int k, int n, int r, int digits) {
    using std::log;
    if (k < 1 || n < 0 || r < 0 || r >= k) throw std::invalid_argument("chebyshev_identity_check: need k >= 1, n >= 0, 0 <= r < k");
    DigitsGuard guard(digits);
    const int nw = w1.n_w >= 0 ? w1.n_w : n;
    const int N = n * k + r;
    auto m1 = chebyshev_measure(w1, 1, nw, 2 * (n + 2), digits);
    auto mk = chebyshev_measure(w1, k, nw, 2 * (N + 1), digits);
    OPData op1 = stieltjes(m1, n + 2), opk = stieltjes(mk, N + 1);
    auto P1 = monic_values(op1, mpreal(1), n + 1);
    const mpreal l2 = log(mpreal(2));
    auto logH1 = [&](int m) {
        mpreal s = 0;
        for (int j = 0; j < m; ++j) s += op1.log_norms_mp[j];
        return s;
    };
    mpreal lhs = 0;
    for (int j = 0; j < N; ++j) lhs += opk.log_norms_mp[j];
    mpreal rhs;
    if (r == 0) {
        rhs = k * logH1(n) + (k - 1) * log(P1[n]) - mpreal(n) * (k - 1) * (n * k - 1) * l2;
    } else {
        rhs = (k - r) * logH1(n) + r * logH1(n + 1) + (k - r) * log(P1[n]) + (r - 1) * log(P1[n + 1]) -
              (mpreal(n) * (k - 1) * (n * k - 1) + 2 * mpreal(n) * r * (k - 1) + mpreal(r - 1) * (r - 1)) * l2;
    }
    ChebyshevCheck out;
    out.digits = digits;
    out.hankel_residual = static_cast<double>(abs(lhs - rhs));
    out.log_hankel_wk = static_cast<double>(lhs);
    mpreal worst = 0;
    for (int deg = 0; deg <= N; ++deg) {
        int np = deg / k, rp = deg % k;
        mpreal pred = op1.log_norms_mp[np] - 2 * mpreal(np) * (k - 1) * l2;
        if (rp > 0) pred += -(2 * rp - 1) * l2 + log(P1[np + 1] / P1[np]);
        worst = std::max(worst, mpreal(abs(opk.log_norms_mp[deg] - pred)));
    }
    out.kappa_residual = static_cast<double>(worst);
    return out;
}

}  // namespace mcut
