#include "mcut/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace mcut {

double gas_log_density(const PotentialSpec& V, int N, const std::vector<double>& x) {
    double s = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        s -= N * V.V(x[i]);
        for (size_t j = 0; j < i; ++j) s += 2 * std::log(std::abs(x[i] - x[j]));
    }
    return s;
}

double gas_log_ratio(const PotentialSpec& V, int N, const std::vector<double>& x, int i, double y) {
    const double xi = x[i];
    double s = -N * (V.V(y) - V.V(xi));
    for (int j = 0; j < static_cast<int>(x.size()); ++j) {
        if (j == i) continue;
        double dy = std::abs(y - x[j]);
        if (dy == 0) return -std::numeric_limits<double>::infinity();
        s += 2 * (std::log(dy) - std::log(std::abs(xi - x[j])));
    }
    return s;
}

double acceptance_probability(const PotentialSpec& V, int N, const std::vector<double>& x, int i, double y) {
    double d = gas_log_ratio(V, N, x, i, y);
    return d >= 0 ? 1.0 : std::exp(d);
}

EquilibriumSampler::EquilibriumSampler(const EquilibriumData& eq, int cells) {
    if (cells < 8) throw std::invalid_argument("EquilibriumSampler: too few cells");
    const auto& s = eq.support;
    double left = 0;
    for (int j = 0; j < s.k(); ++j) {
        const double a = s.a[j], b = s.b[j];
        // nodes clustered at the square-root edges, cumulative mass by the midpoint rule in theta
        std::vector<double> x(cells + 1), F(cells + 1, 0.0);
        for (int i = 0; i <= cells; ++i) x[i] = a + (b - a) * (1 - std::cos(M_PI * i / cells)) / 2;
        x.front() = a;
        x.back() = b;
        const int sub = 8;
        for (int i = 0; i < cells; ++i) {
            double acc = 0;
            for (int q = 0; q < sub; ++q) {
                double th = M_PI * (i + (q + 0.5) / sub) / cells;
                acc += eq.psi(a + (b - a) * (1 - std::cos(th)) / 2) * (b - a) * std::sin(th) / 2;
            }
            F[i + 1] = F[i] + acc * M_PI / (cells * sub);
        }
        // match the band mass exactly
        const double scale = eq.band_mass[j] / F.back();
        for (auto& v : F) v *= scale;
        start_.push_back(left);
        left += eq.band_mass[j];
        x_.push_back(std::move(x));
        F_.push_back(std::move(F));
    }
}

double EquilibriumSampler::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0) * (start_.back() + F_.back().back());
    int j = static_cast<int>(start_.size()) - 1;
    while (j > 0 && u < start_[j]) --j;
    const auto &x = x_[j], &F = F_[j];
    double v = std::clamp(u - start_[j], 0.0, F.back());
    size_t i = std::upper_bound(F.begin(), F.end(), v) - F.begin();
    i = std::clamp<size_t>(i, 1, F.size() - 1);
    double w = F[i] - F[i - 1];
    double t = w > 0 ? (v - F[i - 1]) / w : 0.5;
    return x[i - 1] + t * (x[i] - x[i - 1]);
}

double EquilibriumSampler::density(double y) const {
    const double total = start_.back() + F_.back().back();
    for (size_t j = 0; j < x_.size(); ++j) {
        const auto &x = x_[j], &F = F_[j];
        if (y < x.front() || y > x.back()) continue;
        size_t i = std::upper_bound(x.begin(), x.end(), y) - x.begin();
        i = std::clamp<size_t>(i, 1, x.size() - 1);
        return (F[i] - F[i - 1]) / (x[i] - x[i - 1]) / total;
    }
    return 0;
}

SampleArchive mcmc_run(const PotentialSpec& V, int N, long sweeps, long burn_in, std::uint64_t seed,
                       const MCMCOptions& opt) {
    if (N < 2) throw std::invalid_argument("mcmc_run: N must be at least 2");
    if (burn_in < 0 || sweeps <= burn_in) throw std::invalid_argument("mcmc_run: need sweeps > burn_in >= 0");
    if (opt.thin < 1) throw std::invalid_argument("mcmc_run: thin must be positive");
    if (!(opt.target_acceptance > 0 && opt.target_acceptance < 1))
        throw std::invalid_argument("mcmc_run: target acceptance must lie in (0,1)");
    if (opt.jump_probability < 0 || opt.jump_probability >= 1)
        throw std::invalid_argument("mcmc_run: jump probability must lie in [0,1)");
    if (opt.jump_probability > 0 && !opt.measure)
        throw std::invalid_argument("mcmc_run: jump proposals need the equilibrium measure");

    std::optional<EquilibriumSampler> eqs;
    if (opt.measure) eqs.emplace(*opt.measure);

    GasState st;
    st.rng.seed(seed);
    st.positions.resize(N);
    for (int i = 0; i < N; ++i) {
        double u = (i + 0.5) / N;
        st.positions[i] = eqs ? eqs->quantile(u) : 2 * u - 1;
    }
    st.log_density = gas_log_density(V, N, st.positions);
    double width = eqs ? (opt.measure->support.b.back() - opt.measure->support.a.front()) : 2.0;
    st.step = 0.5 * width / N;

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SampleArchive ar;
    ar.N = N;
    ar.sweeps = sweeps;
    ar.burn_in = burn_in;
    ar.thin = opt.thin;
    ar.seed = seed;
    long rw_tried = 0, rw_acc = 0, j_tried = 0, j_acc = 0;
    for (long sweep = 0; sweep < sweeps; ++sweep) {
        long tried = 0, acc = 0;
        for (int i = 0; i < N; ++i) {
            const double xi = st.positions[i];
            double y, extra = 0;
            bool jump = eqs && opt.jump_probability > 0 && unif(st.rng) < opt.jump_probability;
            if (jump) {
                y = eqs->quantile(unif(st.rng));
                double qx = eqs->density(xi), qy = eqs->density(y);
                extra = (qx > 0 ? std::log(qx) : -std::numeric_limits<double>::infinity()) - std::log(qy);
            } else {
                y = xi + st.step * gauss(st.rng);
            }
            double la = gas_log_ratio(V, N, st.positions, i, y) + extra;
            bool ok = la >= 0 || std::log(unif(st.rng)) < la;
            if (ok) {
                st.positions[i] = y;
                st.log_density += la - extra;
            }
            if (!jump) {
                ++tried;
                acc += ok;
            }
            if (sweep >= burn_in) {
                if (jump) {
                    ++j_tried;
                    j_acc += ok;
                } else {
                    ++rw_tried;
                    rw_acc += ok;
                }
            }
        }
        if (sweep < burn_in && tried > 0) {
            double rate = static_cast<double>(acc) / tried;
            st.step *= std::exp((rate - opt.target_acceptance) * 2 / std::sqrt(1.0 + sweep / 10.0));
        } else if (sweep >= burn_in && (sweep - burn_in) % opt.thin == 0) {
            ar.states.push_back(st.positions);
        }
    }
    ar.step = st.step;
    ar.acceptance = rw_tried ? static_cast<double>(rw_acc) / rw_tried : 0;
    ar.jump_acceptance = j_tried ? static_cast<double>(j_acc) / j_tried : 0;
    return ar;
}

CountingStatistics counting_statistics(const SampleArchive& a, const EquilibriumData& eq, double epsilon) {
    const auto& s = eq.support;
    const int k = s.k();
    if (k < 2) throw std::invalid_argument("counting_statistics: needs k >= 2");
    const double gap = s.min_gap();
    if (epsilon < 0) epsilon = gap / 4;
    if (!(epsilon < gap / 2)) throw std::invalid_argument("counting_statistics: epsilon must be below half the smallest gap");
    CountingStatistics st;
    st.N = a.N;
    st.epsilon = epsilon;
    std::vector<int> fl(k - 1);
    for (int j = 1; j < k; ++j) {
        st.omega_hat.push_back(eq.band_mass[j]);
        fl[j - 1] = static_cast<int>(std::floor(a.N * eq.band_mass[j]));
    }
    std::map<std::vector<int>, long> hist;
    for (const auto& x : a.states) {
        std::vector<int> c(k, 0);
        int out = 0;
        for (double v : x) {
            int band = -1;
            for (int j = 0; j < k; ++j)
                if (v > s.a[j] - epsilon && v < s.b[j] + epsilon) band = j;
            if (band < 0)
                ++out;
            else
                ++c[band];
        }
        std::vector<int> p(k - 1);
        for (int j = 1; j < k; ++j) p[j - 1] = c[j] - fl[j - 1];
        ++hist[p];
        st.counts.push_back(std::move(c));
        st.unassigned.push_back(out);
    }
    const double tot = static_cast<double>(a.states.size());
    for (const auto& [p, n] : hist) {
        st.points.push_back(p);
        st.mass.push_back(n / tot);
    }
    return st;
}

double total_variation(const CountingStatistics& s, const CountingLaw& law) {
    if (s.N != law.N) throw std::invalid_argument("total_variation: N mismatch");
    std::map<std::vector<int>, double> diff;
    for (size_t i = 0; i < s.points.size(); ++i) diff[s.points[i]] += s.mass[i];
    for (size_t i = 0; i < law.points.size(); ++i) diff[law.points[i]] -= law.mass[i];
    double tv = 0;
    for (const auto& [p, d] : diff) tv += std::abs(d);
    return tv / 2;
}

double centred_count(const std::vector<double>& sorted, const EquilibriumData& eq, double u) {
    double n = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), u) - sorted.begin());
    return n - sorted.size() * eq.cdf(u);
}

double RigidityStatistics::fraction_below(double bound) const {
    if (sup_abs.empty()) return 0;
    long n = std::count_if(sup_abs.begin(), sup_abs.end(), [&](double v) { return v <= bound; });
    return static_cast<double>(n) / sup_abs.size();
}

RigidityStatistics rigidity_statistics(const SampleArchive& a, const EquilibriumData& eq, double eta, int grid) {
    const auto& s = eq.support;
    double minw = 1e300, total = 0;
    for (int j = 0; j < s.k(); ++j) {
        minw = std::min(minw, s.b[j] - s.a[j]);
        total += s.b[j] - s.a[j] - 2 * eta;
    }
    if (!(eta > 0) || !(eta < minw / 2)) throw std::invalid_argument("rigidity_statistics: eta must lie in (0, half the smallest band)");
    if (grid < 2) throw std::invalid_argument("rigidity_statistics: grid too small");
    RigidityStatistics r;
    r.eta = eta;
    int used = 0;
    for (int j = 0; j < s.k(); ++j) {
        double lo = s.a[j] + eta, hi = s.b[j] - eta;
        int m = (j + 1 == s.k()) ? grid - used : std::max(2, static_cast<int>(std::lround(grid * (hi - lo) / total)));
        for (int i = 0; i < m; ++i) r.grid.push_back(lo + (hi - lo) * i / (m - 1));
        used += m;
    }
    std::vector<double> F(r.grid.size());
    for (size_t i = 0; i < r.grid.size(); ++i) F[i] = a.N * eq.cdf(r.grid[i]);
    for (const auto& x : a.states) {
        std::vector<double> srt = x;
        std::sort(srt.begin(), srt.end());
        double sup = 0;
        size_t p = 0;
        for (size_t i = 0; i < r.grid.size(); ++i) {
            while (p < srt.size() && srt[p] <= r.grid[i]) ++p;
            sup = std::max(sup, std::abs(p - F[i]));
        }
        r.sup_abs.push_back(sup);
    }
    return r;
}

}  // namespace mcut
