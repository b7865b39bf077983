#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mcut/io.hpp"
#include "mcut/riemann.hpp"

using namespace mcut;

namespace {

// a path to a JSON file, or inline JSON text
json load_json(const std::string& arg) {
    if (std::filesystem::exists(arg)) {
        std::ifstream in(arg);
        return json::parse(in);
    }
    return json::parse(arg);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::vector<int> parse_n_list(const std::string& s) {
    std::vector<int> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) v.push_back(std::stoi(item));
    return v;
}

struct Globals {
    int digits = 0;
    double tol = 1e-12;
    std::string out;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-cut equilibrium measures, Hankel asymptotics and oracles"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--digits", g.digits, "starting decimal digits of the oracle (0 chooses from N)");
    app.add_option("--tol", g.tol, "oracle agreement tolerance");
    app.add_option("--out", g.out, "output file (default stdout)");

    std::string potential, support, config, f_arg, fh_arg, weight, n_list, theorem = "partition", csv_path,
                                                                                  archive, json_path, kind = "counting";
    int k = 0, form = 1, samples = 0, N = 100, thin = 1;
    long sweeps = 2000, burn_in = 500;
    std::uint64_t seed = 1;
    double jump = 0.05, epsilon = -1, eta = 0.1;

    auto* eqm = app.add_subcommand("eqmeasure", "equilibrium measure of a potential");
    eqm->add_option("--potential", potential, "PotentialSpec JSON or file")->required();
    eqm->add_option("--k", k, "number of bands when no closed form is known");
    eqm->add_option("--density-csv", csv_path, "write x,psi samples here");
    eqm->add_option("--samples", samples, "number of density samples per band");

    auto* surf = app.add_subcommand("surface", "Riemann surface constants");
    surf->add_option("--potential", potential, "PotentialSpec JSON or file");
    surf->add_option("--support", support, "SupportData JSON or file");
    surf->add_option("--k", k, "number of bands when no closed form is known");

    auto* asym = app.add_subcommand("asym", "asymptotic formulas over an N sweep");
    asym->add_option("--config", config, "experiment config JSON or file");
    asym->add_option("--potential", potential, "PotentialSpec JSON or file");
    asym->add_option("--k", k, "number of bands");
    asym->add_option("--theorem", theorem, "partition | ratio | fh | counting")
        ->check(CLI::IsMember({"partition", "ratio", "fh", "counting"}));
    asym->add_option("--form", form, "smooth-ratio form 1, 2 or 3")->check(CLI::Range(1, 3));
    asym->add_option("--N-list", n_list, "comma separated N values");
    asym->add_option("--f", f_arg, "test function JSON");
    asym->add_option("--fh", fh_arg, "Fisher-Hartwig list JSON");
    asym->add_option("--csv", csv_path, "write the N,total sweep table here");

    auto* orc = app.add_subcommand("oracle", "extended-precision Hankel determinants");
    orc->add_option("--weight", weight, "WeightSpec JSON or file")->required();
    orc->add_option("--N-list", n_list, "comma separated N values")->required();

    auto* cmp = app.add_subcommand("compare", "oracle against asymptotics residual table");
    cmp->add_option("--config", config, "experiment config JSON or file")->required();
    cmp->add_option("--json", json_path, "also write the table as JSON here");

    auto* smp = app.add_subcommand("sample", "Metropolis sampling of the log-gas");
    smp->add_option("--potential", potential, "PotentialSpec JSON or file")->required();
    smp->add_option("--k", k, "number of bands");
    smp->add_option("--N", N, "number of particles");
    smp->add_option("--sweeps", sweeps, "total sweeps including burn-in");
    smp->add_option("--burn-in", burn_in, "adaptation sweeps");
    smp->add_option("--seed", seed, "random seed");
    smp->add_option("--thin", thin, "keep every thin-th sweep");
    smp->add_option("--jump", jump, "probability of an equilibrium-measure proposal");

    auto* sts = app.add_subcommand("stats", "counting or rigidity statistics of an archive");
    sts->add_option("--archive", archive, "CSV archive from sample")->required();
    sts->add_option("--potential", potential, "PotentialSpec JSON or file")->required();
    sts->add_option("--k", k, "number of bands");
    sts->add_option("--kind", kind, "counting | rigidity")->check(CLI::IsMember({"counting", "rigidity"}));
    sts->add_option("--epsilon", epsilon, "band margin (default a quarter of the smallest gap)");
    sts->add_option("--eta", eta, "edge distance of the rigidity grid");

    CLI11_PARSE(app, argc, argv);

    auto kopt = [&]() -> std::optional<int> { return k > 0 ? std::optional<int>(k) : std::nullopt; };

    try {
        if (*eqm) {
            auto V = potential_from_json(load_json(potential));
            auto eq = equilibrium_for(V, kopt());
            write_text(g.out, to_json(eq).dump(2) + "\n");
            if (!csv_path.empty()) {
                int m = samples > 0 ? samples : 200;
                std::string t = "x,psi\n";
                for (int j = 0; j < eq.k(); ++j)
                    for (int i = 0; i <= m; ++i) {
                        double x = eq.support.a[j] + (eq.support.b[j] - eq.support.a[j]) * i / m;
                        t += format_number(x) + "," + format_number(eq.psi(x)) + "\n";
                    }
                write_text(csv_path, t);
            }
        } else if (*surf) {
            SurfaceData s;
            if (!support.empty()) {
                s = build_surface(support_from_json(load_json(support)));
            } else if (!potential.empty()) {
                s = build_surface(equilibrium_for(potential_from_json(load_json(potential)), kopt()));
            } else {
                throw std::invalid_argument("surface: give --potential or --support");
            }
            write_text(g.out, to_json(s).dump(2) + "\n");
        } else if (*asym) {
            ExperimentConfig c;
            if (!config.empty()) {
                c = config_from_json(load_json(config));
            } else {
                json j;
                if (potential.empty()) throw std::invalid_argument("asym: give --config or --potential");
                j["potential"] = load_json(potential);
                if (k > 0) j["k"] = k;
                j["theorem"] = theorem;
                j["form"] = form;
                j["N_list"] = parse_n_list(n_list);
                if (!f_arg.empty()) j["f"] = load_json(f_arg);
                if (!fh_arg.empty()) j["fh"] = load_json(fh_arg);
                c = config_from_json(j);
            }
            auto eq = equilibrium_for(c.potential, c.k);
            auto s = build_surface(eq);
            json reports = json::array();
            std::string table = "N,total\n";
            for (int n : c.N_list) {
                auto r = asymptotic_report(c, eq, s, n);
                reports.push_back(to_json(r));
                table += std::to_string(n) + "," + format_number(r.total) + "\n";
            }
            write_text(g.out, reports.dump(2) + "\n");
            if (!csv_path.empty()) write_text(csv_path, table);
        } else if (*orc) {
            WeightSpec w = weight_from_json(load_json(weight));
            OracleOptions opt;
            opt.digits = g.digits;
            opt.tol = g.tol;
            std::string t = "N,log_H_N,achieved_digits,runtime\n";
            for (int n : parse_n_list(n_list)) {
                WeightSpec wn = w;
                if (!(wn.N_scale > 0)) wn.N_scale = n;
                auto r = hankel_logdet(wn, n, opt);
                t += std::to_string(n) + "," + format_number(r.logdet) + "," + std::to_string(r.digits) + "," +
                     format_number(r.seconds) + "\n";
            }
            write_text(g.out, t);
        } else if (*cmp) {
            json j = load_json(config);
            if (g.digits > 0) j["digits"] = g.digits;
            if (app.get_option("--tol")->count() > 0) j["tol"] = g.tol;
            auto c = config_from_json(j);
            auto t = run_compare(c);
            std::string out = g.out.empty() ? c.out : g.out;
            write_text(out, emit_plotdata(t));
            if (!json_path.empty()) write_text(json_path, to_json(t).dump(2) + "\n");
            if (!t.criterion_ok) {
                std::cerr << "criterion failed: " << t.criterion << "\n";
                return 3;
            }
        } else if (*smp) {
            auto V = potential_from_json(load_json(potential));
            MCMCOptions o;
            o.thin = thin;
            o.measure = equilibrium_for(V, kopt());
            o.jump_probability = o.measure->k() > 1 ? jump : 0.0;
            auto a = mcmc_run(V, N, sweeps, burn_in, seed, o);
            write_text(g.out, archive_to_csv(a));
        } else if (*sts) {
            auto V = potential_from_json(load_json(potential));
            auto eq = equilibrium_for(V, kopt());
            auto a = archive_from_csv(read_file(archive));
            json out;
            if (kind == "counting") {
                auto cs = counting_statistics(a, eq, epsilon);
                json h = json::array();
                for (size_t i = 0; i < cs.points.size(); ++i) h.push_back({{"x", cs.points[i]}, {"mass", cs.mass[i]}});
                out = {{"kind", "counting"}, {"N", cs.N}, {"epsilon", cs.epsilon}, {"omega_hat", cs.omega_hat},
                       {"histogram", h}};
                auto law = counting_law(eq, build_surface(eq), a.N);
                json lh = json::array();
                for (size_t i = 0; i < law.points.size(); ++i)
                    if (law.mass[i] > 1e-12) lh.push_back({{"x", law.points[i]}, {"mass", law.mass[i]}});
                out["law"] = lh;
                out["total_variation"] = total_variation(cs, law);
            } else {
                auto rs = rigidity_statistics(a, eq, eta);
                const double bound = 1.5 / M_PI * std::log(double(a.N));
                std::vector<double> s = rs.sup_abs;
                std::sort(s.begin(), s.end());
                json hist = json::array();
                const int bins = 20;
                double hi = s.empty() ? 1 : s.back() + 1e-12;
                std::vector<int> cnt(bins, 0);
                for (double v : s) cnt[std::min(bins - 1, static_cast<int>(v / hi * bins))]++;
                for (int i = 0; i < bins; ++i) hist.push_back({{"lo", hi * i / bins}, {"hi", hi * (i + 1) / bins}, {"count", cnt[i]}});
                out = {{"kind", "rigidity"}, {"N", a.N}, {"eta", eta}, {"bound", bound},
                       {"fraction_below_bound", rs.fraction_below(bound)}, {"histogram", hist}};
            }
            write_text(g.out, out.dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
