#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "mcut/io.hpp"

using namespace mcut;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static fs::path d = [] {
        auto p = fs::temp_directory_path() / ("mcut_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void put(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

// runs the CLI with arguments, returns the exit status
int run(const std::string& args) {
    std::string cmd = std::string(MCUT_CLI_PATH) + " " + args + " 2>" + (scratch() / "stderr.txt").string();
    int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

const char* kGauss = R"({"kind":"gaussian","sigma":1.0})";
const char* kPi2 = R"({"kind":"polynomial_square","roots":[-1.0,1.0],"nu":2.0})";

}  // namespace

TEST_CASE("eqmeasure") {
    auto pf = scratch() / "g.json", out = scratch() / "eq.json", dens = scratch() / "dens.csv";
    put(pf, kGauss);
    REQUIRE(run("--out " + out.string() + " eqmeasure --potential " + pf.string() + " --density-csv " + dens.string() +
                " --samples 10") == 0);
    auto j = json::parse(slurp(out));
    CHECK(j["endpoints"][0].get<double>() == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(j["endpoints"][1].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(j["omega"].empty());
    CHECK(j["edge_constants"].size() == 2);
    auto rows = csv_rows(slurp(dens));
    CHECK(rows.size() == 12);
    CHECK(rows[0][0] == "x");
}

TEST_CASE("surface") {
    auto out = scratch() / "s.json";
    REQUIRE(run("--out " + out.string() + " surface --potential '" + std::string(kPi2) + "'") == 0);
    auto j = json::parse(slurp(out));
    CHECK(j["tau"][0][0][0].get<double>() == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(j["tau"][0][0][1].get<double>() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
    CHECK(j["omega_hat"][0].get<double>() == doctest::Approx(0.5).epsilon(1e-10));
    for (const char* key : {"A", "B", "tau_hat", "Qcoeffs", "tildeQ", "c_surface"}) CHECK(j.contains(key));
    REQUIRE(run("--out " + out.string() + " surface --support '{\"a\":[-2,0.5],\"b\":[-1,1.5]}'") == 0);
    CHECK(json::parse(slurp(out))["A"].size() == 1);
    CHECK(run("surface") != 0);
}

TEST_CASE("asym") {
    auto out = scratch() / "a.json", csv = scratch() / "a.csv";
    REQUIRE(run("--out " + out.string() + " asym --potential '" + std::string(kPi2) +
                "' --theorem ratio --form 2 --N-list 10,20 --f '[0,0,0.1]' --csv " + csv.string()) == 0);
    auto j = json::parse(slurp(out));
    REQUIRE(j.size() == 2);
    CHECK(j[0]["N"] == 10);
    double sum = 0;
    for (const auto& t : j[1]["terms"]) sum += t["value"].get<double>();
    CHECK(sum == doctest::Approx(j[1]["total"].get<double>()).epsilon(1e-12));
    auto rows = csv_rows(slurp(csv));
    CHECK(rows.size() == 3);
    CHECK(run("asym --potential '" + std::string(kPi2) + "' --theorem bogus --N-list 10") != 0);
}

TEST_CASE("oracle") {
    auto out = scratch() / "o.csv";
    REQUIRE(run("--out " + out.string() + " oracle --weight '{\"potential\":{\"kind\":\"gaussian\",\"sigma\":0.5}}' --N-list 5,10") == 0);
    auto rows = csv_rows(slurp(out));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == std::vector<std::string>{"N", "log_H_N", "achieved_digits", "runtime"});
    CHECK(std::stod(rows[2][1]) == doctest::Approx(gaussian_reference(0.5, 10, 10)).epsilon(1e-12));
    CHECK(std::stoi(rows[2][2]) > 0);
}

TEST_CASE("compare reproduces the Gaussian table and is deterministic") {
    auto cfg = scratch() / "c.json", o1 = scratch() / "c1.csv", o2 = scratch() / "c2.csv", js = scratch() / "c.json.out";
    put(cfg, R"({"potential":{"kind":"gaussian","sigma":0.5},"theorem":"partition","N_list":[10,20,40],
                 "criterion":{"max_scaled":0.5}})");
    REQUIRE(run("--out " + o1.string() + " compare --config " + cfg.string() + " --json " + js.string()) == 0);
    REQUIRE(run("--out " + o2.string() + " compare --config " + cfg.string()) == 0);
    CHECK(slurp(o1) == slurp(o2));
    auto rows = csv_rows(slurp(o1));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].size() == 5);
    for (int i = 1; i <= 3; ++i) {
        int N = std::stoi(rows[i][0]);
        CHECK(std::stod(rows[i][1]) == doctest::Approx(gaussian_reference(0.5, N, N)).epsilon(1e-14));
        CHECK(std::stod(rows[i][4]) <= 0.5);
    }
    CHECK(json::parse(slurp(js))["criterion_ok"] == true);
    // an unattainable criterion sets the exit status
    put(cfg, R"({"potential":{"kind":"gaussian","sigma":0.5},"N_list":[10,20],"criterion":{"max_scaled":1e-9}})");
    CHECK(run("--out " + o1.string() + " compare --config " + cfg.string()) == 3);
    put(cfg, R"({"potential":{"kind":"gaussian","sigma":0.5},"N_list":[]})");
    CHECK(run("compare --config " + cfg.string()) == 2);
    put(cfg, R"({"potential":{"kind":"gaussian","sigma":0.5},"N_list":[20,10]})");
    CHECK(run("compare --config " + cfg.string()) == 2);
}

TEST_CASE("sample and stats") {
    auto a1 = scratch() / "s1.csv", a2 = scratch() / "s2.csv", st = scratch() / "st.json";
    std::string base = " sample --potential '" + std::string(kPi2) + "' --N 20 --sweeps 400 --burn-in 100 --seed 3 --thin 2";
    REQUIRE(run("--out " + a1.string() + base) == 0);
    REQUIRE(run("--out " + a2.string() + base) == 0);
    CHECK(slurp(a1) == slurp(a2));
    auto ar = archive_from_csv(slurp(a1));
    CHECK(ar.N == 20);
    CHECK(ar.states.size() == 150);
    CHECK(ar.seed == 3);
    REQUIRE(run("--out " + st.string() + " stats --archive " + a1.string() + " --potential '" + std::string(kPi2) + "'") == 0);
    auto j = json::parse(slurp(st));
    double tot = 0;
    for (const auto& h : j["histogram"]) tot += h["mass"].get<double>();
    CHECK(tot == doctest::Approx(1.0));
    CHECK(j["total_variation"].get<double>() >= 0);
    REQUIRE(run("--out " + st.string() + " stats --kind rigidity --eta 0.05 --archive " + a1.string() + " --potential '" +
                std::string(kPi2) + "'") == 0);
    j = json::parse(slurp(st));
    long n = 0;
    for (const auto& h : j["histogram"]) n += h["count"].get<long>();
    CHECK(n == 150);
}

TEST_CASE("archive round trip") {
    SampleArchive a;
    a.N = 3;
    a.seed = 99;
    a.step = 0.1234567890123;
    a.states = {{0.1, -0.2, 1.0 / 3}, {1e-300, 2.5, -7.125}};
    auto b = archive_from_csv(archive_to_csv(a));
    CHECK(b.states == a.states);
    CHECK(b.seed == 99);
    CHECK(b.step == a.step);
    CHECK_THROWS_AS(archive_from_csv("# N=2\n1,2,3\n"), std::invalid_argument);
}

TEST_CASE("plot data") {
    CompareTable t;
    t.rows.push_back({8, -1.5, -1.25, 0.25, 2.0});
    auto rows = csv_rows(emit_plotdata(t));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].size() == 5);
    CHECK(rows[1] == std::vector<std::string>{"8", "-1.5", "-1.25", "0.25", "2"});
    // a comma decimal separator in the global locale does not leak into the output
    struct Comma : std::numpunct<char> {
        char do_decimal_point() const override { return ','; }
    };
    auto old = std::locale::global(std::locale(std::locale::classic(), new Comma));
    CHECK(format_number(0.5) == "0.5");
    std::locale::global(old);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"potential":{"kind":"gaussian","sigma":1}})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"potential":{"kind":"cubic"},"N_list":[1]})")), std::invalid_argument);
    auto c = config_from_json(json::parse(
        R"({"potential":{"kind":"chebyshev","k":2,"sigma":4},"theorem":"counting","points":[{"t":0.5,"v":0.2}],"N_list":[4]})"));
    REQUIRE(c.fh.size() == 1);
    CHECK(c.fh[0].beta_im == -0.2);
    CHECK(to_json(c.potential)["kind"] == "chebyshev");
    CHECK(run("nosuchcommand") != 0);
}
