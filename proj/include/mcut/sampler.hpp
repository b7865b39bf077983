#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mcut/asymptotics.hpp"
#include "mcut/equilibrium.hpp"
#include "mcut/potentials.hpp"

namespace mcut {

// log of prod_{i<j} (x_i - x_j)^2 prod e^{-N V(x_i)}
double gas_log_density(const PotentialSpec& V, int N, const std::vector<double>& x);
// change of the log-density when particle i moves to y
double gas_log_ratio(const PotentialSpec& V, int N, const std::vector<double>& x, int i, double y);
// Metropolis acceptance for that move
double acceptance_probability(const PotentialSpec& V, int N, const std::vector<double>& x, int i, double y);

struct GasState {
    std::vector<double> positions;
    double log_density = 0;
    std::mt19937_64 rng;
    double step = 0.1;
};

struct MCMCOptions {
    int thin = 1;
    double target_acceptance = 0.4;
    // probability of replacing the random-walk move by an independent draw from mu_V;
    // needs `measure` and lets particles cross gaps
    double jump_probability = 0;
    std::optional<EquilibriumData> measure;
};

struct SampleArchive {
    int N = 0;
    long sweeps = 0, burn_in = 0;
    int thin = 1;
    std::uint64_t seed = 0;
    double step = 0;        // frozen step size
    double acceptance = 0;  // random-walk acceptance after burn-in
    double jump_acceptance = 0;
    std::vector<std::vector<double>> states;
};

SampleArchive mcmc_run(const PotentialSpec& V, int N, long sweeps, long burn_in, std::uint64_t seed,
                       const MCMCOptions& opt = {});

// piecewise-linear inverse CDF of mu_V; density() is the exact density of the draws
class EquilibriumSampler {
public:
    explicit EquilibriumSampler(const EquilibriumData& eq, int cells_per_band = 2048);
    double quantile(double u) const;
    double density(double x) const;

private:
    std::vector<std::vector<double>> x_, F_;  // per band, F_ cumulative from 0
    std::vector<double> start_;                // mass left of each band
};

struct CountingStatistics {
    int N = 0;
    double epsilon = 0;
    std::vector<double> omega_hat;
    std::vector<std::vector<int>> counts;  // per state, one entry per band
    std::vector<int> unassigned;           // per state, particles outside every (a_j - eps, b_j + eps)
    // empirical law of (#_2, ..., #_k) - floor(N Omega^)
    std::vector<std::vector<int>> points;
    std::vector<double> mass;
};
// epsilon < 0 selects a quarter of the smallest gap
CountingStatistics counting_statistics(const SampleArchive& a, const EquilibriumData& eq, double epsilon = -1);
double total_variation(const CountingStatistics& s, const CountingLaw& law);

struct RigidityStatistics {
    double eta = 0;
    std::vector<double> grid;
    std::vector<double> sup_abs;  // per state
    double fraction_below(double bound) const;
};
RigidityStatistics rigidity_statistics(const SampleArchive& a, const EquilibriumData& eq, double eta, int grid = 1000);

// centred counting function #{x_j <= u} - N mu_V((-inf, u]) on sorted positions
double centred_count(const std::vector<double>& sorted, const EquilibriumData& eq, double u);

}  // namespace mcut
