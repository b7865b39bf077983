#include "mcut/io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mcut/riemann.hpp"

namespace mcut {

namespace {

std::vector<double> doubles(const json& j, const char* what) {
    if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": expected an array");
    std::vector<double> v;
    for (const auto& e : j) v.push_back(e.get<double>());
    return v;
}

json real_matrix(const RMat& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        a.push_back(r);
    }
    return a;
}

// complex entries as [re, im]
json complex_matrix(const CMat& m) {
    json a = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back({m(i, j).real(), m(i, j).imag()});
        a.push_back(r);
    }
    return a;
}

json vec(const RVec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

PotentialSpec potential_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("potential: missing \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") return make_gaussian(j.at("sigma").get<double>());
    if (kind == "chebyshev") return make_chebyshev_potential(j.at("k").get<int>(), j.at("sigma").get<double>());
    if (kind == "polynomial_square") return make_pi_potential(doubles(j.at("roots"), "roots"), j.at("nu").get<double>());
    if (kind == "polynomial") return make_polynomial_potential(doubles(j.at("coeffs"), "coeffs"));
    throw std::invalid_argument("potential: unknown kind " + kind);
}

json to_json(const PotentialSpec& v) {
    switch (v.kind) {
        case PotentialKind::gaussian: return {{"kind", "gaussian"}, {"sigma", v.sigma}};
        case PotentialKind::chebyshev: return {{"kind", "chebyshev"}, {"k", v.k}, {"sigma", v.sigma}};
        case PotentialKind::polynomial_square: return {{"kind", "polynomial_square"}, {"roots", v.roots}, {"nu", v.nu}};
        case PotentialKind::polynomial: return {{"kind", "polynomial"}, {"coeffs", v.poly.coeffs()}};
    }
    return {};
}

TestFunction test_function_from_json(const json& j) {
    if (j.is_null()) return {};
    if (j.is_array()) return TestFunction::from_coeffs(doubles(j, "f"));
    if (j.value("kind", std::string("poly")) != "poly") throw std::invalid_argument("test function: only kind \"poly\"");
    return TestFunction::from_coeffs(doubles(j.at("coeffs"), "coeffs"));
}

json to_json(const TestFunction& f) { return {{"kind", "poly"}, {"coeffs", f.p.coeffs()}}; }

FHConfig fh_from_json(const json& j) {
    FHConfig fh;
    if (j.is_null()) return fh;
    if (!j.is_array()) throw std::invalid_argument("fh: expected an array");
    for (const auto& e : j) fh.push_back({e.at("t").get<double>(), e.value("alpha", 0.0), e.value("beta_im", 0.0)});
    return fh;
}

json to_json(const FHConfig& fh) {
    json a = json::array();
    for (const auto& p : fh) a.push_back({{"t", p.t}, {"alpha", p.alpha}, {"beta_im", p.beta_im}});
    return a;
}

SupportData support_from_json(const json& j) {
    if (j.contains("endpoints")) return SupportData::from_endpoints(doubles(j.at("endpoints"), "endpoints"));
    return SupportData(doubles(j.at("a"), "a"), doubles(j.at("b"), "b"));
}

WeightSpec weight_from_json(const json& j) {
    WeightSpec w;
    w.potential = potential_from_json(j.at("potential"));
    if (j.contains("f")) w.f = test_function_from_json(j.at("f"));
    if (j.contains("fh")) w.fh = fh_from_json(j.at("fh"));
    w.N_scale = j.value("N_scale", 0.0);
    return w;
}

json to_json(const EquilibriumData& eq) {
    return {{"endpoints", eq.support.endpoints()}, {"omega", eq.omega},          {"ell", eq.ell},
            {"energy", eq.energy},                 {"edge_constants", eq.edge_constants}, {"band_mass", eq.band_mass}};
}

json to_json(const SurfaceData& s) {
    json q = json::array();
    for (int j = 0; j < s.g; ++j) q.push_back(s.Qpoly(j).coeffs());
    json out = {{"A", real_matrix(s.A)},
                {"B", real_matrix(s.B)},
                {"tau", complex_matrix(s.tau)},
                {"tau_hat", complex_matrix(s.tau_hat)},
                {"omega_hat", vec(s.omega_hat)},
                {"Qcoeffs", q},
                {"tildeQ", tilde_Q(s).coeffs()},
                {"c_surface", c_surface(s)}};
    return out;
}

json to_json(const AsymptoticReport& r) {
    json t = json::array();
    for (const auto& [label, v] : r.terms) t.push_back({{"label", label}, {"value", v}});
    return {{"kind", r.kind}, {"N", r.n}, {"k", r.k}, {"total", r.total}, {"terms", t}};
}

EquilibriumData equilibrium_for(const PotentialSpec& V, std::optional<int> k) {
    auto closed = closed_form_support(V);
    SolveOptions opt;
    if (closed) {
        if (k && *k != closed->k()) throw std::invalid_argument("equilibrium: k disagrees with the closed-form support");
        opt.init = closed;
        return solve_equilibrium(V, closed->k(), opt);
    }
    return solve_equilibrium(V, k.value_or(1), opt);
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.potential = potential_from_json(j.at("potential"));
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("f")) c.f = test_function_from_json(j.at("f"));
    if (j.contains("fh")) c.fh = fh_from_json(j.at("fh"));
    if (j.contains("points")) {
        for (const auto& e : j.at("points")) c.fh.push_back({e.at("t").get<double>(), 0.0, -e.at("v").get<double>()});
    }
    if (!j.contains("N_list")) throw std::invalid_argument("config: missing N_list");
    c.N_list = j.at("N_list").get<std::vector<int>>();
    if (c.N_list.empty()) throw std::invalid_argument("config: empty N_list");
    for (size_t i = 0; i < c.N_list.size(); ++i) {
        if (c.N_list[i] < 1) throw std::invalid_argument("config: N must be positive");
        if (i > 0 && c.N_list[i] <= c.N_list[i - 1]) throw std::invalid_argument("config: N_list must be strictly increasing");
    }
    c.theorem = j.value("theorem", std::string("partition"));
    if (c.theorem != "partition" && c.theorem != "ratio" && c.theorem != "fh" && c.theorem != "counting")
        throw std::invalid_argument("config: unknown theorem " + c.theorem);
    c.form = j.value("form", 1);
    c.digits = j.value("digits", 0);
    c.tol = j.value("tol", 1e-12);
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.out = j.value("out", std::string());
    if (j.contains("criterion")) {
        const auto& k = j.at("criterion");
        c.require_decay = k.value("decay", false);
        if (k.contains("max_last")) c.max_last = k.at("max_last").get<double>();
        if (k.contains("max_scaled")) c.max_scaled = k.at("max_scaled").get<double>();
    }
    return c;
}

AsymptoticReport asymptotic_report(const ExperimentConfig& c, const EquilibriumData& eq, const SurfaceData& s, int N) {
    const auto& V = c.potential;
    if (c.theorem == "partition") {
        if (V.kind == PotentialKind::gaussian) return log_partition_gaussian(V.sigma, N);
        if (V.kind == PotentialKind::polynomial_square) return log_partition_asym_poly(V.roots, V.nu, N);
        return log_partition_asym(eq, s, N);
    }
    if (c.theorem == "ratio") return log_ratio_smooth(eq, s, c.f, N, c.form);
    if (c.theorem == "fh") return log_ratio_fh(eq, s, c.f, c.fh, N);
    std::vector<CountingPoint> pts;
    for (const auto& p : c.fh) pts.push_back({p.t, -p.beta_im});
    return counting_mgf_report(eq, s, pts, N);
}

double oracle_value(const ExperimentConfig& c, const EquilibriumData& eq, int N) {
    OracleOptions opt;
    opt.digits = c.digits;
    opt.tol = c.tol;
    WeightSpec base{c.potential, {}, {}, double(N)};
    if (c.theorem == "partition") {
        if (c.potential.kind == PotentialKind::gaussian) return gaussian_reference(c.potential.sigma, N, N);
        return hankel_logdet(base, N, opt).logdet;
    }
    WeightSpec w{c.potential, c.theorem == "counting" ? TestFunction{} : c.f, c.theorem == "ratio" ? FHConfig{} : c.fh,
                 double(N)};
    double r = ratio_oracle(w, base, N, opt);
    if (c.theorem == "counting") r -= N * integral_log_omega(eq, c.fh);
    return r;
}

CompareTable run_compare(const ExperimentConfig& c) {
    if (c.N_list.empty()) throw std::invalid_argument("compare: empty N_list");
    CompareTable t;
    t.theorem = c.theorem;
    auto eq = equilibrium_for(c.potential, c.k);
    auto s = build_surface(eq);
    for (int N : c.N_list) {
        CompareRow r;
        r.N = N;
        try {
            r.oracle = oracle_value(c, eq, N);
            r.asymptotic = asymptotic_report(c, eq, s, N).total;
        } catch (const std::exception& e) {
            throw std::runtime_error("compare at N = " + std::to_string(N) + ": " + e.what());
        }
        r.residual = std::abs(r.oracle - r.asymptotic);
        r.scaled = r.residual * N;
        t.rows.push_back(r);
    }
    std::ostringstream os;
    const auto &first = t.rows.front(), &last = t.rows.back();
    if (c.require_decay) {
        os << "residual decreases; ";
        if (t.rows.size() > 1 && !(last.residual < first.residual)) t.criterion_ok = false;
    }
    if (c.max_last) {
        os << "last residual <= " << format_number(*c.max_last) << "; ";
        if (!(last.residual <= *c.max_last)) t.criterion_ok = false;
    }
    if (c.max_scaled) {
        os << "residual*N <= " << format_number(*c.max_scaled) << "; ";
        for (const auto& r : t.rows)
            if (!(r.scaled <= *c.max_scaled)) t.criterion_ok = false;
    }
    t.criterion = os.str();
    return t;
}

std::string emit_plotdata(const CompareTable& t) {
    std::string out = "N,oracle,asymptotic,residual,residual_times_N\n";
    for (const auto& r : t.rows)
        out += std::to_string(r.N) + "," + format_number(r.oracle) + "," + format_number(r.asymptotic) + "," +
               format_number(r.residual) + "," + format_number(r.scaled) + "\n";
    return out;
}

json to_json(const CompareTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"N", r.N}, {"oracle", r.oracle}, {"asymptotic", r.asymptotic}, {"residual", r.residual},
                        {"residual_times_N", r.scaled}});
    return {{"theorem", t.theorem}, {"rows", rows}, {"criterion", t.criterion}, {"criterion_ok", t.criterion_ok}};
}

std::string archive_to_csv(const SampleArchive& a) {
    std::string out = "# N=" + std::to_string(a.N) + " sweeps=" + std::to_string(a.sweeps) +
                      " burn_in=" + std::to_string(a.burn_in) + " thin=" + std::to_string(a.thin) +
                      " seed=" + std::to_string(a.seed) + " step=" + format_number(a.step) +
                      " acceptance=" + format_number(a.acceptance) + "\n";
    for (const auto& s : a.states) {
        for (size_t i = 0; i < s.size(); ++i) {
            if (i) out += ',';
            out += format_number(s[i]);
        }
        out += '\n';
    }
    return out;
}

SampleArchive archive_from_csv(const std::string& text) {
    SampleArchive a;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream h(line.substr(1));
            std::string kv;
            while (h >> kv) {
                auto eqp = kv.find('=');
                if (eqp == std::string::npos) continue;
                std::string k = kv.substr(0, eqp), v = kv.substr(eqp + 1);
                if (k == "N") a.N = std::stoi(v);
                else if (k == "sweeps") a.sweeps = std::stol(v);
                else if (k == "burn_in") a.burn_in = std::stol(v);
                else if (k == "thin") a.thin = std::stoi(v);
                else if (k == "seed") a.seed = std::stoull(v);
                else if (k == "step") std::from_chars(v.data(), v.data() + v.size(), a.step);
                else if (k == "acceptance") std::from_chars(v.data(), v.data() + v.size(), a.acceptance);
            }
            continue;
        }
        std::vector<double> row;
        const char* p = line.data();
        const char* end = p + line.size();
        while (p < end) {
            double v;
            auto r = std::from_chars(p, end, v);
            if (r.ec != std::errc()) throw std::invalid_argument("archive: malformed number");
            row.push_back(v);
            p = r.ptr;
            if (p < end && *p == ',') ++p;
        }
        if (a.N == 0) a.N = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != a.N) throw std::invalid_argument("archive: row length differs from N");
        a.states.push_back(std::move(row));
    }
    return a;
}

}  // namespace mcut
