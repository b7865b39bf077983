#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mcut/asymptotics.hpp"
#include "mcut/oracle.hpp"
#include "mcut/sampler.hpp"

namespace mcut {

using json = nlohmann::json;

PotentialSpec potential_from_json(const json& j);
json to_json(const PotentialSpec& v);
TestFunction test_function_from_json(const json& j);
json to_json(const TestFunction& f);
FHConfig fh_from_json(const json& j);
json to_json(const FHConfig& fh);
// {"a": [...], "b": [...]} or {"endpoints": [a1, b1, ...]}
SupportData support_from_json(const json& j);
// {"potential": ..., "f": ..., "fh": [...], "N_scale": ...}
WeightSpec weight_from_json(const json& j);

json to_json(const EquilibriumData& eq);
json to_json(const SurfaceData& s);
json to_json(const AsymptoticReport& r);

// equilibrium measure for V; k may be omitted when the support is known in closed form
EquilibriumData equilibrium_for(const PotentialSpec& V, std::optional<int> k = std::nullopt);

// fixed-notation decimal text independent of the global locale
std::string format_number(double v);

struct ExperimentConfig {
    PotentialSpec potential;
    std::optional<int> k;
    TestFunction f;
    FHConfig fh;
    std::vector<int> N_list;
    std::string theorem = "partition";  // partition | ratio | fh | counting
    int form = 1;
    int digits = 0;
    double tol = 1e-12;
    std::vector<std::uint64_t> seeds;
    std::string out;
    // decay criterion: residual(N_last) < residual(N_first), residual(N_last) <= max_last, residual*N <= max_scaled
    bool require_decay = false;
    std::optional<double> max_last;
    std::optional<double> max_scaled;
};
ExperimentConfig config_from_json(const json& j);

struct CompareRow {
    int N = 0;
    double oracle = 0, asymptotic = 0, residual = 0, scaled = 0;
};
struct CompareTable {
    std::string theorem;
    std::vector<CompareRow> rows;
    bool criterion_ok = true;
    std::string criterion;  // description of the checked criterion
};
CompareTable run_compare(const ExperimentConfig& c);
// header N,oracle,asymptotic,residual,residual_times_N
std::string emit_plotdata(const CompareTable& t);
json to_json(const CompareTable& t);

// asymptotic value for one N of the configured theorem
AsymptoticReport asymptotic_report(const ExperimentConfig& c, const EquilibriumData& eq, const SurfaceData& s, int N);
// oracle value for one N of the configured theorem
double oracle_value(const ExperimentConfig& c, const EquilibriumData& eq, int N);

std::string archive_to_csv(const SampleArchive& a);
SampleArchive archive_from_csv(const std::string& text);

}  // namespace mcut
