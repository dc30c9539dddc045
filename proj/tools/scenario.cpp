#include "scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "rwa/format.hpp"
#include "rwa/linalg.hpp"
#include "rwa/models.hpp"
#include "rwa/perturbation.hpp"

namespace fs = std::filesystem;

namespace rwa::cli {

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

// ---------------------------------------------------------------- parsing

[[noreturn]] void fail_at(const YAML::Node& n, const std::string& msg) {
    const auto m = n.Mark();
    throw ValidationError("line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ": " +
                          msg);
}

void check_keys(const YAML::Node& n, const std::vector<std::string>& allowed, const std::string& where) {
    if (!n.IsMap()) fail_at(n, where + " must be a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (!contains(allowed, key))
            fail_at(kv.first, "unknown key '" + key + "' in " + where + " (allowed: " + join(allowed) + ")");
    }
}

template <class T>
void read(const YAML::Node& n, const char* key, T& dst) {
    const YAML::Node v = n[key];
    if (!v) return;
    try {
        dst = v.as<T>();
    } catch (const YAML::Exception&) {
        fail_at(v, std::string("bad value for '") + key + "'");
    }
}

SystemConfig parse_system(const YAML::Node& n, bool top) {
    SystemConfig c;
    if (top)
        check_keys(n, {"type", "omega", "mass", "n_fock", "a", "b", "coupling"}, "system");
    else
        check_keys(n, {"type", "omega", "mass", "n_fock"}, "subsystem");
    read(n, "type", c.type);
    read(n, "omega", c.omega);
    read(n, "mass", c.mass);
    read(n, "n_fock", c.n_fock);
    if (top) {
        read(n, "coupling", c.coupling);
        for (const char* k : {"a", "b"})
            if (n[k]) c.parts.push_back(parse_system(n[k], false));
    }
    return c;
}

// ---------------------------------------------------------------- model assembly

SystemSpec make_leaf(const SystemConfig& c) {
    if (c.type == "two_level") return two_level(c.omega);
    return oscillator(c.omega, c.mass, c.n_fock);
}

BathSpec make_bath(const BathConfig& b) {
    auto bath = ohmic(b.gamma0, b.cutoff, regulator_from_string(b.regulator), b.temperature);
    bath.validate();
    return bath;
}

BathSpec coupling_bath(const SystemConfig& leaf, const BathSpec& b) {
    return leaf.type == "oscillator" ? qbm_coupling_bath(b, leaf.mass) : b;
}

int leaf_dim(const SystemConfig& c) { return c.type == "two_level" ? 2 : c.n_fock; }

int system_dim(const SystemConfig& c) {
    return c.type == "composite" ? leaf_dim(c.parts[0]) * leaf_dim(c.parts[1]) : leaf_dim(c);
}

Matrix interaction(const SystemConfig& c, const SystemSpec& a, const SystemSpec& b) {
    return c.coupling * kron(a.coupling("x"), b.coupling("x"));
}

class Builder {
public:
    explicit Builder(const Scenario& s) : s_(s), bath_(make_bath(s.bath)) {}

    const Generator& get(const std::string& variant) {
        auto it = cache_.find(variant);
        if (it == cache_.end()) it = cache_.emplace(variant, build(variant)).first;
        return it->second;
    }

private:
    Generator build(const std::string& v) {
        const auto& c = s_.system;
        if (v == "post_rwa") return post_trace_rwa(get("full"));
        if (c.type != "composite") {
            const auto sys = make_leaf(c);
            const auto cb = coupling_bath(c, bath_);
            return v == "pre_rwa" ? pre_trace_tcl2(sys, "x", cb) : build_tcl2(sys, "x", cb);
        }
        const auto a = make_leaf(c.parts[0]), b = make_leaf(c.parts[1]);
        const Matrix h_ab = interaction(c, a, b);
        const auto ca = coupling_bath(c.parts[0], bath_), cb = coupling_bath(c.parts[1], bath_);
        if (v == "naive_composite") return naive_compose(build_tcl2(a, "x", ca), build_tcl2(b, "x", cb), h_ab);
        const auto sys = compose(a, b, h_ab);
        std::vector<std::pair<std::string, BathSpec>> baths{{"A.x", ca}, {"B.x", cb}};
        return v == "pre_rwa" ? pre_trace_tcl2(sys, baths) : build_tcl2(sys, baths);
    }

    const Scenario& s_;
    BathSpec bath_;
    std::map<std::string, Generator> cache_;
};

// ---------------------------------------------------------------- output helpers

void write_atomic(const fs::path& path, const std::string& text) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw ValidationError("cannot write " + tmp.string());
        os << text;
    }
    fs::rename(tmp, path);
}

struct Csv {
    std::ostringstream os;
    explicit Csv(const std::string& header) { os << header << '\n'; }
    template <class... Ts>
    void row(const Ts&... cells) {
        bool first = true;
        ((os << (first ? "" : ",") << cell(cells), first = false), ...);
        os << '\n';
    }
    static std::string cell(double x) { return fmt(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(Eigen::Index x) { return std::to_string(x); }
    static std::string cell(std::size_t x) { return std::to_string(x); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
};

void matrix_rows(Csv& csv, const std::string& variant, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) csv.row(variant, i, j, m(i, j).real(), m(i, j).imag());
}

std::vector<double> time_grid(const TimesConfig& t) {
    std::vector<double> out;
    for (int k = 0; k <= t.steps; ++k) out.push_back(t.t_max * k / t.steps);
    return out;
}

// least-squares slope of log|y| against log x
double growth_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int k = 0; k < n; ++k) {
        const double lx = std::log(x[k]), ly = std::log(std::abs(y[k]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const char* verdict(bool ok) { return ok ? "pass" : "fail"; }

double trace_defect(const Generator& g) {
    const int n = g.dim();
    const Matrix& s = g.super_matrix();
    double worst = 0.0;
    for (Eigen::Index c = 0; c < s.cols(); ++c) {
        cplx t = 0;
        for (int i = 0; i < n; ++i) t += s(i + i * n, c);
        worst = std::max(worst, std::abs(t));
    }
    return worst;
}

QbmVariant qbm_fp_variant(const std::string& v) {
    if (v == "post_rwa") return QbmVariant::rwa;
    if (v == "pre_rwa") return QbmVariant::pre_trace;
    return QbmVariant::full;
}

// ---------------------------------------------------------------- one scenario point

class Runner {
public:
    Runner(const std::string& command, const Scenario& s, const fs::path& out, std::ostringstream& rep)
        : cmd_(command), s_(s), out_(out), rep_(rep), builder_(s) {}

    void run() {
        if (cmd_ == "spectra" || contains(s_.outputs, "spectra")) spectra();
        if (cmd_ == "spectra") return;

        const bool eigen = cmd_ == "eigen";
        for (const char* o : {"generators", "eigenvalues", "steady_state", "trajectory", "perturbation"})
            if (contains(s_.outputs, o) || (eigen && (std::string(o) == "eigenvalues" || std::string(o) == "steady_state")))
                generic_.insert(o);
        if (!generic_.empty() || eigen) {
            for (const auto& v : s_.variants) variant_report(v);
            generic_outputs();
        }
        if (eigen) gaps();
        if (contains(s_.outputs, "covariance")) covariance();
        if (contains(s_.outputs, "cutoff_sweep")) cutoff_sweep();
        if (contains(s_.outputs, "composite_gap")) composite_gap();
    }

private:
    void spectra() {
        const auto bath = make_bath(s_.bath);
        const auto cs = CoefficientSet::thermal(bath);
        Csv csv("omega,alpha_tilde,gamma_tilde,re_A,im_A,re_A_rwa,im_A_rwa");
        const auto& g = s_.grid;
        for (int k = 0; k < g.points; ++k) {
            const double w = g.min + (g.max - g.min) * k / (g.points - 1);
            const cplx a = cs.A(w), r = cs.A_rwa(w);
            csv.row(w, cs.alpha_tilde(w), bath.gamma_tilde(w), a.real(), a.imag(), r.real(), r.imag());
        }
        write_atomic(out_ / "spectra.csv", csv.os.str());
        rep_ << "spectra: " << g.points << " points\n";
    }

    void variant_report(const std::string& v) {
        const auto& g = builder_.get(v);
        const auto m = validity_report(g);
        rep_ << "[variant " << v << "]\n"
             << "provenance: " << to_string(g.provenance()) << '\n'
             << margins_text(m) << "trace_defect: " << fmt(trace_defect(g)) << '\n';
        const auto lc = lindblad_check(g);
        rep_ << "lindblad: " << (lc.is_lindblad ? "yes" : "no") << " (min dissipator eigenvalue "
             << fmt(lc.min_eigenvalue) << ")\n";
        if (v == "post_rwa") check("post_rwa_lindblad", lc.is_lindblad, lc.min_eigenvalue);

        const auto& c = s_.system;
        if (v == "full" && c.type == "two_level") {
            const auto ref = tls_generators(make_bath(s_.bath), c.omega, TlsVariant::full);
            const int pi[2] = {0, 3}, ci[2] = {2, 1};
            double dev = 0.0;
            for (int r = 0; r < 2; ++r)
                for (int k = 0; k < 2; ++k) {
                    dev = std::max(dev, std::abs(g.super_matrix()(pi[r], pi[k]) - ref.population(r, k)));
                    dev = std::max(dev, std::abs(g.super_matrix()(ci[r], ci[k]) - ref.coherence(r, k)));
                }
            check("tls_analytic_blocks", dev < 1e-8, dev);
        }
        if (v == "full" && c.type == "oscillator") {
            const auto fit = extract_phase_space(g);
            const auto q = qbm_coefficients(make_bath(s_.bath), c.omega, c.mass, QbmVariant::full);
            const double rel = std::max({std::abs(fit.H(1, 1) / 2 - q.Gamma) / q.Gamma,
                                         std::abs(fit.D(1, 1) / c.mass - q.D_pp) / q.D_pp,
                                         std::abs(-2 * fit.D(0, 1) - q.D_xp) / std::max(std::abs(q.D_xp), q.D_pp)});
            check("qbm_moment_fit", rel < 1e-4, rel);
        }
    }

    void check(const std::string& name, bool ok, double value) {
        checks_ << "check " << name << ": " << verdict(ok) << " (" << fmt(value) << ")\n";
    }

    void generic_outputs() {
        Csv gen("variant,row,col,re,im"), eig("variant,k,re,im"), ss("variant,i,j,re,im"),
            traj("variant,t,i,j,re,im");
        for (const auto& v : s_.variants) {
            const auto& g = builder_.get(v);
            if (generic_.count("generators")) matrix_rows(gen, v, g.super_matrix());
            if (generic_.count("eigenvalues")) {
                const Vector ev = spectrum(g);
                for (Eigen::Index k = 0; k < ev.size(); ++k) eig.row(v, k, ev(k).real(), ev(k).imag());
            }
            if (generic_.count("steady_state")) matrix_rows(ss, v, steady_state(g));
            if (generic_.count("trajectory")) {
                Matrix rho0 = Matrix::Zero(g.dim(), g.dim());
                rho0(s_.initial_level, s_.initial_level) = 1.0;
                const auto tr = propagate(g, rho0, time_grid(s_.times));
                for (std::size_t k = 0; k < tr.times.size(); ++k)
                    for (int i = 0; i < g.dim(); ++i)
                        for (int j = 0; j < g.dim(); ++j)
                            traj.row(v, tr.times[k], i, j, tr.states[k](i, j).real(), tr.states[k](i, j).imag());
            }
            if (generic_.count("perturbation")) {
                const auto r = liouville_corrections(g);
                write_atomic(out_ / ("perturbation_" + v + ".csv"), corrections_csv(r));
                rep_ << "[perturbation " << v << "]\nflagged_pairs: " << r.flagged.size() << '\n';
            }
        }
        if (generic_.count("generators")) write_atomic(out_ / "generators.csv", gen.os.str());
        if (generic_.count("eigenvalues")) write_atomic(out_ / "eigenvalues.csv", eig.os.str());
        if (generic_.count("steady_state")) write_atomic(out_ / "steady_state.csv", ss.os.str());
        if (generic_.count("trajectory")) write_atomic(out_ / "trajectory.csv", traj.os.str());
    }

    void gaps() {
        Csv csv("variant_a,variant_b,eigenvalue_gap,steady_state_trace_distance");
        for (const auto& r : compare_variants(s_)) csv.row(r.a, r.b, r.eigenvalue_gap, r.steady_state_distance);
        write_atomic(out_ / "variant_gaps.csv", csv.os.str());
    }

    void covariance() {
        const auto& c = s_.system;
        const auto bath = make_bath(s_.bath);
        const auto full = qbm_coefficients(bath, c.omega, c.mass, QbmVariant::full);
        Matrix2 vac;
        vac << 1.0 / (2 * c.mass * c.omega), 0.0, 0.0, c.mass * c.omega / 2;
        Csv csv("variant,t,sigma_xx,sigma_xp,sigma_pp,uncertainty_ok");
        for (const auto& v : s_.variants) {
            const auto fv = qbm_fp_variant(v);
            const auto coeffs =
                fv == QbmVariant::pre_trace ? qbm_coefficients(bath, c.omega, c.mass, QbmVariant::pre_trace) : full;
            const auto gm = fp_matrices(coeffs, fv);
            const auto times = time_grid(s_.times);
            const auto traj = covariance_evolve(gm, make_covariance(vac), times);
            for (std::size_t k = 0; k < times.size(); ++k) {
                const auto& sg = traj[k].sigma;
                csv.row(v, times[k], sg(0, 0), sg(0, 1), sg(1, 1), traj[k].uncertainty_ok ? 1 : 0);
            }
            const auto st = lyapunov_stationary(gm);
            csv.row(v, "inf", st.sigma(0, 0), st.sigma(0, 1), st.sigma(1, 1), st.uncertainty_ok ? 1 : 0);
            rep_ << "[covariance " << v << "]\nGamma: " << fmt(coeffs.Gamma) << "\nOmega_R: " << fmt(coeffs.Omega_R)
                 << "\nD_pp: " << fmt(coeffs.D_pp) << "\nD_xp: " << fmt(coeffs.D_xp) << '\n';
        }
        write_atomic(out_ / "covariance.csv", csv.os.str());
    }

    void cutoff_sweep() {
        const auto& c = s_.system;
        Csv csv("cutoff,delta_Omega,delta_Omega_star,D_xp,D_xp_star");
        std::vector<double> lam;
        std::vector<std::vector<double>> cols(4);
        for (double k : s_.cutoffs) {
            auto bath = make_bath(s_.bath);
            bath.cutoff = k * c.omega;
            const auto t = tls_coefficients(bath, c.omega);
            const auto f = qbm_coefficients(bath, c.omega, c.mass, QbmVariant::full);
            const auto p = qbm_coefficients(bath, c.omega, c.mass, QbmVariant::pre_trace);
            csv.row(bath.cutoff, t.delta_Omega, t.delta_Omega_star, f.D_xp, p.D_xp);
            lam.push_back(bath.cutoff);
            for (auto [i, x] : {std::pair{0, t.delta_Omega}, {1, t.delta_Omega_star}, {2, f.D_xp}, {3, p.D_xp}})
                cols[i].push_back(x);
        }
        write_atomic(out_ / "cutoff_sweep.csv", csv.os.str());
        const char* names[4] = {"delta_Omega", "delta_Omega_star", "D_xp", "D_xp_star"};
        rep_ << "[cutoff exponents]\n";
        for (int i = 0; i < 4; ++i) rep_ << names[i] << ": " << fmt(growth_exponent(lam, cols[i])) << '\n';
    }

    void composite_gap() {
        const auto& d = builder_.get("full");
        const auto& n = builder_.get("naive_composite");
        const double rel = (n.super_matrix() - d.super_matrix()).norm() / d.super_matrix().norm();
        const double td = trace_distance(steady_state(n), steady_state(d));
        Csv csv("coupling,rel_frobenius_gap,steady_state_trace_distance");
        csv.row(s_.system.coupling, rel, td);
        write_atomic(out_ / "composite_gap.csv", csv.os.str());
        rep_ << "[composite]\nrel_frobenius_gap: " << fmt(rel) << "\nsteady_state_trace_distance: " << fmt(td) << '\n';
    }

public:
    std::string checks() const { return checks_.str(); }

private:
    std::string cmd_;
    const Scenario& s_;
    fs::path out_;
    std::ostringstream& rep_;
    std::ostringstream checks_;
    Builder builder_;
    std::set<std::string> generic_;
};

std::string natural_command(const Scenario& s) {
    if (s.system.type == "two_level") return "tls";
    if (s.system.type == "oscillator") return "qbm";
    return "composite";
}

void set_parameter(Scenario& s, const std::string& p, double v) {
    if (p == "gamma0") s.bath.gamma0 = v;
    else if (p == "cutoff") s.bath.cutoff = v;
    else if (p == "temperature") s.bath.temperature = v;
    else if (p == "omega") s.system.omega = v;
    else s.system.coupling = v;
}

std::string read_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

int run_sweep(const Scenario& s, const fs::path& out, int threads, std::ostringstream& rep) {
    const auto& sw = *s.sweep;
    const std::size_t n = sw.values.size();
    const std::string cmd = natural_command(s);
    const fs::path points = out / "points";
    fs::create_directories(points);
    std::vector<int> codes(n, kOk);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < n;) {
            Scenario p = s;
            p.sweep.reset();
            p.name = s.name + "/" + std::to_string(k);
            set_parameter(p, sw.parameter, sw.values[k]);
            const fs::path dst = points / std::to_string(k), tmp = points / (std::to_string(k) + ".tmp");
            fs::remove_all(tmp);
            fs::remove_all(dst);
            codes[k] = run_scenario(cmd, p, tmp, 1);
            fs::rename(tmp, dst);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, threads); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // concatenate in grid order
    std::set<std::string> names;
    for (std::size_t k = 0; k < n; ++k)
        for (const auto& e : fs::directory_iterator(points / std::to_string(k)))
            if (e.path().extension() == ".csv") names.insert(e.path().filename().string());
    for (const auto& name : names) {
        std::string merged;
        for (std::size_t k = 0; k < n; ++k) {
            const fs::path f = points / std::to_string(k) / name;
            if (!fs::exists(f)) continue;
            std::istringstream is(read_file(f));
            std::string line;
            bool header = true;
            while (std::getline(is, line)) {
                if (header) {
                    if (merged.empty()) merged = "sweep_value," + line + '\n';
                    header = false;
                    continue;
                }
                merged += fmt(sw.values[k]) + "," + line + '\n';
            }
        }
        write_atomic(out / name, merged);
    }
    int code = kOk;
    rep << "sweep_parameter: " << sw.parameter << "\npoint_command: " << cmd << '\n';
    for (std::size_t k = 0; k < n; ++k) {
        rep << "point " << k << " (" << fmt(sw.values[k]) << "): exit " << codes[k] << '\n';
        code = std::max(code, codes[k]);
    }
    return code;
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ValidationError("line " + std::to_string(e.mark.line + 1) + ", column " +
                              std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    Scenario s;
    check_keys(root, {"name", "system", "bath", "variants", "outputs", "times", "grid", "cutoffs", "initial_level",
                      "sweep"},
               "scenario");
    read(root, "name", s.name);
    if (root["system"]) s.system = parse_system(root["system"], true);
    if (const auto b = root["bath"]) {
        check_keys(b, {"gamma0", "cutoff", "regulator", "temperature"}, "bath");
        read(b, "gamma0", s.bath.gamma0);
        read(b, "cutoff", s.bath.cutoff);
        read(b, "regulator", s.bath.regulator);
        read(b, "temperature", s.bath.temperature);
    }
    read(root, "variants", s.variants);
    read(root, "outputs", s.outputs);
    if (const auto t = root["times"]) {
        check_keys(t, {"t_max", "steps"}, "times");
        read(t, "t_max", s.times.t_max);
        read(t, "steps", s.times.steps);
    }
    if (const auto g = root["grid"]) {
        check_keys(g, {"min", "max", "points"}, "grid");
        read(g, "min", s.grid.min);
        read(g, "max", s.grid.max);
        read(g, "points", s.grid.points);
    }
    read(root, "cutoffs", s.cutoffs);
    read(root, "initial_level", s.initial_level);
    if (const auto w = root["sweep"]) {
        check_keys(w, {"parameter", "values"}, "sweep");
        SweepConfig sw;
        read(w, "parameter", sw.parameter);
        read(w, "values", sw.values);
        s.sweep = sw;
    }
    return s;
}

Scenario load_scenario(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot read config " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return parse_scenario(os.str());
}

namespace {
void emit_leaf(YAML::Emitter& e, const SystemConfig& c) {
    e << YAML::Key << "type" << YAML::Value << c.type;
    e << YAML::Key << "omega" << YAML::Value << fmt(c.omega);
    e << YAML::Key << "mass" << YAML::Value << fmt(c.mass);
    e << YAML::Key << "n_fock" << YAML::Value << c.n_fock;
}

void emit_doubles(YAML::Emitter& e, const std::vector<double>& v) {
    e << YAML::Flow << YAML::BeginSeq;
    for (double x : v) e << fmt(x);
    e << YAML::EndSeq;
}
} // namespace

std::string to_yaml(const Scenario& s) {
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << s.name;
    e << YAML::Key << "system" << YAML::Value << YAML::BeginMap;
    emit_leaf(e, s.system);
    if (!s.system.parts.empty() || s.system.coupling != 0.0)
        e << YAML::Key << "coupling" << YAML::Value << fmt(s.system.coupling);
    const char* keys[2] = {"a", "b"};
    for (std::size_t k = 0; k < s.system.parts.size() && k < 2; ++k) {
        e << YAML::Key << keys[k] << YAML::Value << YAML::BeginMap;
        emit_leaf(e, s.system.parts[k]);
        e << YAML::EndMap;
    }
    e << YAML::EndMap;
    e << YAML::Key << "bath" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "gamma0" << YAML::Value << fmt(s.bath.gamma0);
    e << YAML::Key << "cutoff" << YAML::Value << fmt(s.bath.cutoff);
    e << YAML::Key << "regulator" << YAML::Value << s.bath.regulator;
    e << YAML::Key << "temperature" << YAML::Value << fmt(s.bath.temperature);
    e << YAML::EndMap;
    e << YAML::Key << "variants" << YAML::Value << YAML::Flow << s.variants;
    e << YAML::Key << "outputs" << YAML::Value << YAML::Flow << s.outputs;
    e << YAML::Key << "times" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "t_max" << YAML::Value << fmt(s.times.t_max);
    e << YAML::Key << "steps" << YAML::Value << s.times.steps;
    e << YAML::EndMap;
    e << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "min" << YAML::Value << fmt(s.grid.min);
    e << YAML::Key << "max" << YAML::Value << fmt(s.grid.max);
    e << YAML::Key << "points" << YAML::Value << s.grid.points;
    e << YAML::EndMap;
    e << YAML::Key << "cutoffs" << YAML::Value;
    emit_doubles(e, s.cutoffs);
    e << YAML::Key << "initial_level" << YAML::Value << s.initial_level;
    if (s.sweep) {
        e << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "parameter" << YAML::Value << s.sweep->parameter;
        e << YAML::Key << "values" << YAML::Value;
        emit_doubles(e, s.sweep->values);
        e << YAML::EndMap;
    }
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

namespace {
void validate_leaf(const SystemConfig& c, const std::string& where) {
    if (c.type != "two_level" && c.type != "oscillator")
        throw ValidationError(where + ": unknown type '" + c.type + "' (allowed: two_level, oscillator" +
                              (where == "system" ? ", composite)" : ")"));
    if (!(c.omega > 0) || !std::isfinite(c.omega)) throw ValidationError(where + ": omega must be positive");
    if (!(c.mass > 0) || !std::isfinite(c.mass)) throw ValidationError(where + ": mass must be positive");
    if (c.type == "oscillator" && (c.n_fock < 4 || c.n_fock > 40))
        throw ValidationError(where + ": n_fock must be in [4, 40]");
}
} // namespace

void validate(const Scenario& s, const std::string& command) {
    if (!contains(kCommands, command))
        throw ValidationError("unknown command '" + command + "' (allowed: " + join(kCommands) + ")");
    const auto& c = s.system;
    if (c.type == "composite") {
        if (c.parts.size() != 2) throw ValidationError("composite system needs subsystems 'a' and 'b'");
        validate_leaf(c.parts[0], "system.a");
        validate_leaf(c.parts[1], "system.b");
        if (!std::isfinite(c.coupling)) throw ValidationError("system.coupling must be finite");
        if (system_dim(c) > 40) throw ValidationError("composite dimension exceeds 40");
    } else {
        validate_leaf(c, "system");
        if (!c.parts.empty()) throw ValidationError("subsystems 'a'/'b' require type composite");
    }
    make_bath(s.bath);

    if (s.variants.empty()) throw ValidationError("no variants (allowed: " + join(kVariants) + ")");
    std::set<std::string> seen;
    for (const auto& v : s.variants) {
        if (!contains(kVariants, v))
            throw ValidationError("unknown variant '" + v + "' (allowed: " + join(kVariants) + ")");
        if (!seen.insert(v).second) throw ValidationError("duplicate variant '" + v + "'");
        if (v == "naive_composite" && c.type != "composite")
            throw ValidationError("variant naive_composite requires a composite system");
    }
    for (const auto& o : s.outputs) {
        if (!contains(kOutputs, o))
            throw ValidationError("unknown output '" + o + "' (allowed: " + join(kOutputs) + ")");
        if (o == "covariance" && c.type != "oscillator")
            throw ValidationError("output covariance requires an oscillator system");
        if (o == "covariance" && contains(s.variants, "naive_composite"))
            throw ValidationError("output covariance has no naive_composite variant");
        if (o == "cutoff_sweep" && c.type == "composite")
            throw ValidationError("output cutoff_sweep requires a single system");
        if (o == "composite_gap" && c.type != "composite")
            throw ValidationError("output composite_gap requires a composite system");
    }
    if (!(s.times.t_max > 0) || s.times.steps < 1) throw ValidationError("times: need t_max > 0 and steps >= 1");
    if (!(s.grid.max > s.grid.min) || s.grid.points < 2) throw ValidationError("grid: need max > min and points >= 2");
    if (s.cutoffs.size() < 2) throw ValidationError("cutoffs: need at least two values");
    for (double k : s.cutoffs)
        if (!(k > 1)) throw ValidationError("cutoffs are in units of omega and must exceed 1");
    if (s.initial_level < 0 || s.initial_level >= system_dim(c))
        throw ValidationError("initial_level out of range [0, " + std::to_string(system_dim(c)) + ")");

    if (command == "tls" && c.type != "two_level") throw ValidationError("command tls needs system type two_level");
    if (command == "qbm" && c.type != "oscillator") throw ValidationError("command qbm needs system type oscillator");
    if (command == "composite" && c.type != "composite")
        throw ValidationError("command composite needs system type composite");
    if (command == "eigen" && s.variants.size() < 2)
        throw ValidationError("command eigen compares variants and needs at least two (allowed: " +
                              join(kVariants) + ")");
    if (command == "sweep") {
        if (!s.sweep) throw ValidationError("command sweep needs a sweep block");
        const std::vector<std::string> params{"gamma0", "cutoff", "temperature", "omega", "coupling"};
        if (!contains(params, s.sweep->parameter))
            throw ValidationError("unknown sweep parameter '" + s.sweep->parameter + "' (allowed: " + join(params) +
                                  ")");
        if (s.sweep->values.empty()) throw ValidationError("sweep: no values");
        for (double v : s.sweep->values) {
            Scenario p = s;
            p.sweep.reset();
            set_parameter(p, s.sweep->parameter, v);
            validate(p, natural_command(p));
        }
    }
}

std::vector<GapRow> compare_variants(const Scenario& s) {
    if (s.variants.size() < 2) throw ValidationError("compare_variants needs at least two variants");
    Builder b(s);
    std::vector<Vector> ev;
    std::vector<Matrix> ss;
    for (const auto& v : s.variants) {
        ev.push_back(spectrum(b.get(v)));
        ss.push_back(steady_state(b.get(v)));
    }
    std::vector<GapRow> rows;
    for (std::size_t i = 0; i < s.variants.size(); ++i)
        for (std::size_t j = i + 1; j < s.variants.size(); ++j)
            rows.push_back({s.variants[i], s.variants[j], paired_distance(ev[i], ev[j]), trace_distance(ss[i], ss[j])});
    return rows;
}

int run_scenario(const std::string& command, const Scenario& s, const fs::path& out, int threads) {
    std::ostringstream rep, body;
    int code = kOk;
    std::string status = "ok", message;
    std::string checks;
    try {
        fs::create_directories(out);
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "error: cannot create output directory: %s\n", e.what());
        return kValidation;
    }
    try {
        validate(s, command);
        if (command == "sweep") {
            code = run_sweep(s, out, threads, body);
        } else {
            Runner r(command, s, out, body);
            r.run();
            checks = r.checks();
        }
    } catch (const ValidationError& e) {
        code = kValidation;
        status = "validation_error";
        message = e.what();
    } catch (const QuadratureError& e) {
        code = kNumerical;
        status = "numerical_error";
        message = std::string(e.what()) + " (error estimate " + fmt(e.error_estimate) + ")";
    } catch (const NumericalError& e) {
        code = kNumerical;
        status = "numerical_error";
        message = e.what();
    } catch (const std::exception& e) {
        code = kNumerical;
        status = "error";
        message = e.what();
    }
    if (!message.empty()) std::fprintf(stderr, "error: %s\n", message.c_str());
    if (code == kOk && checks.find(": fail") != std::string::npos) status = "ok_with_failed_checks";
    rep << "scenario: " << s.name << "\ncommand: " << command << "\nstatus: " << status << '\n';
    if (!message.empty()) rep << "message: " << message << '\n';
    rep << "exit_code: " << code << '\n' << checks << body.str();
    write_atomic(out / "report.txt", rep.str());
    return code;
}

int run_command(const std::string& command, const fs::path& config, const fs::path& out, int threads) {
    Scenario s;
    try {
        s = load_scenario(config);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        std::error_code ec;
        fs::create_directories(out, ec);
        if (!ec)
            write_atomic(out / "report.txt", "scenario: ?\ncommand: " + command +
                                                 "\nstatus: validation_error\nmessage: " + e.what() +
                                                 "\nexit_code: 2\n");
        return kValidation;
    }
    return run_scenario(command, s, out, threads);
}

} // namespace rwa::cli
