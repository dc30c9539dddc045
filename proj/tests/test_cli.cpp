#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rwa/models.hpp"
#include "scenario.hpp"

namespace fs = std::filesystem;
using namespace rwa;
using namespace rwa::cli;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("rwa_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "config.yaml";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

const char* kTls = R"(name: tls
system: {type: two_level, omega: 1.0}
bath: {gamma0: 0.005, cutoff: 100, regulator: lorentz_drude, temperature: 1.0}
variants: [full]
outputs: [steady_state]
)";

int run_binary(const std::string& args) {
    const int rc = std::system((std::string(RWA_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_CASE("minimal TLS scenario writes one CSV and a report") {
    const auto dir = scratch("minimal");
    const auto cfg = write(dir, kTls);
    CHECK(run_command("tls", cfg, dir / "out") == kOk);
    std::vector<std::string> files;
    for (const auto& e : fs::directory_iterator(dir / "out")) files.push_back(e.path().filename().string());
    std::sort(files.begin(), files.end());
    CHECK(files == std::vector<std::string>{"report.txt", "steady_state.csv"});
    const auto csv = slurp(dir / "out" / "steady_state.csv");
    CHECK(csv.rfind("variant,i,j,re,im\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    const auto rep = slurp(dir / "out" / "report.txt");
    CHECK(rep.find("status: ok") != std::string::npos);
    CHECK(rep.find("check tls_analytic_blocks: pass") != std::string::npos);
    CHECK(rep.find("weak_coupling: pass") != std::string::npos);
}

TEST_CASE("reruns are byte-identical") {
    const auto dir = scratch("determinism");
    std::string text = kTls;
    text.replace(text.find("variants: [full]"), 16, "variants: [full, post_rwa, pre_rwa]");
    text.replace(text.find("outputs: [steady_state]"), 23,
                 "outputs: [steady_state, eigenvalues, trajectory, generators, perturbation, cutoff_sweep]\n"
                 "times: {t_max: 50, steps: 5}");
    const auto cfg = write(dir, text);
    REQUIRE(run_command("tls", cfg, dir / "a") == kOk);
    REQUIRE(run_command("tls", cfg, dir / "b") == kOk);
    int n = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        CHECK(slurp(e.path()) == slurp(dir / "b" / e.path().filename()));
        ++n;
    }
    CHECK(n == 9);
}

TEST_CASE("config round trip") {
    for (const char* text :
         {kTls,
          "name: pair\nsystem:\n  type: composite\n  coupling: 0.2\n  a: {type: two_level, omega: 1}\n"
          "  b: {type: oscillator, omega: 1.3, mass: 0.7, n_fock: 5}\n"
          "bath: {gamma0: 0.01, cutoff: 20, regulator: hard, temperature: 0.3}\n"
          "variants: [full, naive_composite]\noutputs: [composite_gap]\n"
          "sweep: {parameter: coupling, values: [0.1, 0.2, 0.30000000000000004]}\n"}) {
        const Scenario s = parse_scenario(text);
        const std::string y = to_yaml(s);
        CHECK(parse_scenario(y) == s);
        CHECK(to_yaml(parse_scenario(y)) == y);
    }
}

TEST_CASE("validation failures exit with 2") {
    const auto dir = scratch("validation");
    std::string text = kTls;
    text.replace(text.find("[full]"), 6, "[full, frob]");
    const auto cfg = write(dir, text);
    CHECK(run_command("tls", cfg, dir / "out") == kValidation);
    const auto rep = slurp(dir / "out" / "report.txt");
    CHECK(rep.find("unknown variant 'frob' (allowed: full, post_rwa, pre_rwa, naive_composite)") != std::string::npos);
    CHECK(run_binary("tls --config " + cfg.string() + " --out " + (dir / "bin").string()) == kValidation);

    // unknown key reports its position
    const auto bad = write(dir, std::string(kTls) + "bath_typo: 1\n");
    try {
        load_scenario(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).rfind("line 6, column 1: unknown key 'bath_typo'", 0) == 0);
    }
    CHECK(run_command("tls", bad, dir / "out2") == kValidation);
    CHECK(fs::exists(dir / "out2" / "report.txt"));

    // comparison needs two variants
    CHECK(run_command("eigen", write(dir, kTls), dir / "out3") == kValidation);
    CHECK_THROWS_AS(compare_variants(parse_scenario(kTls)), ValidationError);
    // command / system mismatch and unproducible outputs
    CHECK(run_command("qbm", write(dir, kTls), dir / "out4") == kValidation);
    std::string cov = kTls;
    cov.replace(cov.find("[steady_state]"), 14, "[covariance]");
    CHECK(run_command("tls", write(dir, cov), dir / "out5") == kValidation);
    CHECK(run_binary("frobnicate --config x") == kValidation);
}

TEST_CASE("quadrature failure exits with 3") {
    const auto dir = scratch("numerical");
    // A(w) at the hard-cutoff edge is a PV pole on a jump
    const auto cfg = write(dir, "bath: {gamma0: 0.01, cutoff: 2, regulator: hard, temperature: 0.5}\n"
                                "grid: {min: -2, max: 2, points: 5}\n");
    CHECK(run_command("spectra", cfg, dir / "out") == kNumerical);
    CHECK(slurp(dir / "out" / "report.txt").find("status: numerical_error") != std::string::npos);
    CHECK(run_binary("spectra --config " + cfg.string() + " --out " + (dir / "bin").string()) == kNumerical);
}

TEST_CASE("variant comparison") {
    std::string text = kTls;
    text.replace(text.find("[full]"), 6, "[full, post_rwa, pre_rwa]");
    const auto s = parse_scenario(text);
    const auto rows = compare_variants(s);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].a == "full");
    CHECK(rows[0].b == "post_rwa");
    CHECK(rows[0].steady_state_distance < 1e-10);

    // full vs pre: the gap is the coherence-frequency difference of the two analytic blocks
    const auto bath = ohmic(0.005, 100.0, Regulator::lorentz_drude, 1.0);
    const auto full = tls_generators(bath, 1.0, TlsVariant::full);
    const auto c = full.coeffs;
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(full.coherence);
    double expect = 0.0;
    for (int k = 0; k < 2; ++k) {
        const cplx l = es.eigenvalues()(k);
        const cplx pre(-c.Gamma, l.imag() > 0 ? 1.0 - c.delta_Omega_star : -(1.0 - c.delta_Omega_star));
        expect = std::max(expect, std::abs(l - pre));
    }
    CHECK(rows[1].b == "pre_rwa");
    CHECK(rows[1].eigenvalue_gap == doctest::Approx(expect).epsilon(1e-9));
    const double shift_gap = std::abs(c.delta_Omega - c.delta_Omega_star);
    const double level_repulsion = (c.Gamma * c.Gamma + c.delta_Omega * c.delta_Omega) / 1.0;
    CHECK(std::abs(rows[1].eigenvalue_gap - shift_gap) < level_repulsion);
}

TEST_CASE("composite and oscillator commands") {
    const auto dir = scratch("composite");
    const auto cfg = write(dir, "name: pair\nsystem:\n  type: composite\n  coupling: 0.2\n"
                                "  a: {type: two_level, omega: 1}\n  b: {type: two_level, omega: 1}\n"
                                "bath: {gamma0: 0.05, cutoff: 20, regulator: lorentz_drude, temperature: 0.1}\n"
                                "variants: [full, naive_composite]\noutputs: [composite_gap]\n");
    REQUIRE(run_command("composite", cfg, dir / "out") == kOk);
    std::istringstream is(slurp(dir / "out" / "composite_gap.csv"));
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header == "coupling,rel_frobenius_gap,steady_state_trace_distance");
    double g, rel, td;
    char comma;
    std::istringstream(row) >> g >> comma >> rel >> comma >> td;
    CHECK(rel > 0.01);
    CHECK(td > 1e-4);

    const auto q = write(dir, "system: {type: oscillator, omega: 1, mass: 1, n_fock: 12}\n"
                              "bath: {gamma0: 0.002, cutoff: 10, regulator: lorentz_drude, temperature: 0.2}\n"
                              "variants: [full, post_rwa]\noutputs: [covariance, eigenvalues]\n"
                              "times: {t_max: 100, steps: 4}\n");
    REQUIRE(run_command("qbm", q, dir / "q") == kOk);
    const auto cov = slurp(dir / "q" / "covariance.csv");
    CHECK(std::count(cov.begin(), cov.end(), '\n') == 1 + 2 * 6);
    CHECK(cov.find("full,inf,") != std::string::npos);
    CHECK(slurp(dir / "q" / "report.txt").find("check qbm_moment_fit: pass") != std::string::npos);
}

TEST_CASE("sweep output follows grid order regardless of threads") {
    const auto dir = scratch("sweep");
    const auto cfg = write(dir, std::string(kTls) + "sweep: {parameter: gamma0, values: [0.004, 0.001, 0.002]}\n");
    REQUIRE(run_command("sweep", cfg, dir / "one", 1) == kOk);
    REQUIRE(run_command("sweep", cfg, dir / "three", 3) == kOk);
    const auto a = slurp(dir / "one" / "steady_state.csv");
    CHECK(a == slurp(dir / "three" / "steady_state.csv"));
    std::istringstream is(a);
    std::string line;
    std::getline(is, line);
    CHECK(line == "sweep_value,variant,i,j,re,im");
    std::vector<std::string> order;
    while (std::getline(is, line)) {
        const auto v = line.substr(0, line.find(','));
        if (order.empty() || order.back() != v) order.push_back(v);
    }
    CHECK(order == std::vector<std::string>{"0.0040000000000000001", "0.001", "0.002"});
    CHECK(run_command("sweep", write(dir, kTls), dir / "none") == kValidation);
}
