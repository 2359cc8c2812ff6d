#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <random>
#include <semaphore>
#include <sstream>
#include <thread>

#include "freebound/biharmonic.hpp"
#include "freebound/gradientflow.hpp"
#include "freebound/mapped.hpp"
#include "freebound/presets.hpp"
#include "freebound/regularized.hpp"
#include "freebound/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace freebound;

namespace {

constexpr int kExitSolver = 1;
constexpr int kExitVerify = 2;
constexpr int kExitUsage = 64;

int thread_budget() {
    if (const char* env = std::getenv("FREEBOUND_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Run independent jobs with at most FREEBOUND_THREADS in flight.
template <typename Job>
void run_concurrently(std::vector<Job>& jobs) {
    std::counting_semaphore<64> gate(std::min(thread_budget(), 64));
    std::vector<std::future<void>> futs;
    for (auto& job : jobs)
        futs.push_back(std::async(std::launch::async, [&gate, &job] {
            gate.acquire();
            job();
            gate.release();
        }));
    for (auto& f : futs) f.get();
}

struct RunConfig {
    std::string problem = "od1d";   // od1d, od2d, bih1d
    std::string method = "gradient";  // gradient, mapped, regularized
    std::string ic = "quadratic";
    int n = 128;
    double k = 1e-4;
    double t_end = 0.05;
    double c = 1e4;  // regularization strength
    std::string output_dir = "out";
    int dumps = 6;
};

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "problem") cfg.problem = value;
    else if (key == "method") cfg.method = value;
    else if (key == "ic") cfg.ic = value;
    else if (key == "n") cfg.n = std::stoi(value);
    else if (key == "k") cfg.k = std::stod(value);
    else if (key == "t_end") cfg.t_end = std::stod(value);
    else if (key == "c") cfg.c = std::stod(value);
    else if (key == "output_dir") cfg.output_dir = value;
    else if (key == "dumps") cfg.dumps = std::stoi(value);
    else throw CLI::ValidationError("unknown config key: " + key);
}

void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("config line is not key=value: " + line);
        apply_key(cfg, line.substr(0, eq), line.substr(eq + 1));
    }
}

void apply_preset(RunConfig& cfg, const std::string& preset) {
    if (preset == "fig1-left") {
        cfg = {.problem = "od1d", .method = "mapped", .ic = "quadratic",
               .n = 128, .k = 1e-4, .t_end = 0.09};
    } else if (preset == "fig1-right") {
        cfg = {.problem = "od1d", .method = "mapped", .ic = "nonmonotone",
               .n = 128, .k = 1e-4, .t_end = 0.18};
    } else if (preset == "fig2") {
        cfg = {.problem = "od1d", .method = "gradient", .ic = "twobump",
               .n = 256, .k = 1e-4, .t_end = 0.1};
    } else if (preset == "fig3") {
        cfg = {.problem = "od2d", .method = "gradient", .ic = "annulus",
               .n = 64, .k = 1e-3, .t_end = 0.25};
    } else if (preset == "bih") {
        cfg = {.problem = "bih1d", .method = "gradient", .ic = "ramp",
               .n = 193, .k = 2e-3, .t_end = 5.0};
    } else {
        throw CLI::ValidationError("unknown preset: " + preset);
    }
}

void validate(const RunConfig& cfg) {
    auto bad = [](const std::string& msg) { throw CLI::ValidationError(msg); };
    if (cfg.problem != "od1d" && cfg.problem != "od2d" && cfg.problem != "bih1d")
        bad("problem must be od1d, od2d or bih1d");
    if (cfg.method != "gradient" && cfg.method != "mapped" && cfg.method != "regularized")
        bad("method must be gradient, mapped or regularized");
    if (cfg.problem == "od2d" && cfg.method != "gradient")
        bad("2D runs support only method=gradient");
    if (cfg.problem == "bih1d" && cfg.method != "gradient")
        bad("the biharmonic problem supports only method=gradient");
    if (cfg.n < 3 || cfg.k <= 0.0 || cfg.t_end <= 0.0) bad("need n >= 3, k > 0, t_end > 0");
}

std::function<double(double)> resolve_ic(const std::string& name) {
    if (name.rfind("file:", 0) == 0) {
        const std::string path = name.substr(5);
        auto samples = std::make_shared<std::vector<std::pair<double, double>>>();
        std::ifstream in(path);
        if (!in) throw CLI::ValidationError("cannot open ic file: " + path);
        double x, u;
        while (in >> x >> u) samples->emplace_back(x, u);
        if (samples->size() < 2) throw CLI::ValidationError("ic file needs >= 2 samples");
        return [samples](double xq) {
            const auto& s = *samples;
            if (xq <= s.front().first) return s.front().second;
            if (xq >= s.back().first) return s.back().second;
            for (std::size_t i = 0; i + 1 < s.size(); ++i)
                if (xq <= s[i + 1].first) {
                    const double t = (xq - s[i].first) / (s[i + 1].first - s[i].first);
                    return (1.0 - t) * s[i].second + t * s[i + 1].second;
                }
            return 0.0;
        };
    }
    return presets::named_ic(name);
}

void write_field_rows(std::ofstream& out, double t, const GridField& u) {
    for (int i = 0; i < u.nx; ++i)
        out << t << ',' << u.x_of(i) << ',' << u.v[i] << '\n';
}

std::vector<int> dump_steps(int total_steps, int dumps) {
    std::vector<int> idx;
    for (int d = 0; d <= dumps; ++d)
        idx.push_back(static_cast<int>(std::llround(double(total_steps) * d / dumps)));
    return idx;
}

json run_od1d(const RunConfig& cfg, const fs::path& dir) {
    const auto ic = resolve_ic(cfg.ic);
    json result;

    std::ofstream fields(dir / "od1d_fields.csv");
    std::ofstream front(dir / "od1d_front.csv");
    fields << "t,x,u\n";
    front << "t,s,census_boundary,census_components\n";
    fields.precision(12);
    front.precision(12);

    const int steps = static_cast<int>(std::llround(cfg.t_end / cfg.k));
    const auto dumps = dump_steps(steps, cfg.dumps);

    if (cfg.method == "mapped") {
        auto run = mapped::mapped_evolve(ic, cfg.n, cfg.k, cfg.t_end);
        for (std::size_t s = 0; s < run.track.S.size(); ++s)
            front << run.track.t[s] << ',' << run.track.S[s] << ",1,1\n";
        GridField grid(cfg.n, 1.5 / cfg.n);
        for (int d : dumps) {
            if (d >= static_cast<int>(run.snapshots.size())) break;
            for (int i = 0; i < grid.nx; ++i)
                grid.v[i] = mapped::eval_physical(run.snapshots[d], grid.x_of(i));
            write_field_rows(fields, d * cfg.k, grid);
        }
        result["collapsed"] = run.collapsed;
        result["final_S"] = run.track.S.back();
        return result;
    }

    auto u0 = presets::make_field_1d(cfg.n, ic);
    gradientflow::Trajectory traj;
    if (cfg.method == "regularized") {
        traj = regularized::reg_evolve(u0, {cfg.c, cfg.k}, cfg.t_end);
    } else {
        gradientflow::EvolveOptions opt;
        opt.stop_on_extinction = true;
        traj = gradientflow::gf_evolve(u0, cfg.k, cfg.t_end, opt);
    }
    const double tol = gradientflow::default_census_tol(u0);
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const auto f = gradientflow::front_position_1d(traj.snapshots[s], tol);
        const auto& cen = traj.census[s];
        front << s * cfg.k << ',' << (f ? *f : 0.0) << ',' << cen.boundary_nodes << ','
              << cen.components << '\n';
    }
    for (int d : dumps) {
        if (d >= static_cast<int>(traj.snapshots.size())) break;
        write_field_rows(fields, d * cfg.k, traj.snapshots[d]);
    }
    result["extinct"] = traj.extinct;
    result["extinction_step"] = traj.extinction_step;
    result["final_energy"] = traj.energy.back();
    return result;
}

json run_od2d(const RunConfig& cfg, const fs::path& dir) {
    auto u0 = (cfg.ic == "annulus" || cfg.ic == "uniform")
                  ? presets::make_2d_topology_preset(cfg.n)
                  : throw CLI::ValidationError("od2d supports ic=annulus");
    gradientflow::EvolveOptions opt;
    opt.stop_on_extinction = true;
    auto traj = gradientflow::gf_evolve(u0, cfg.k, cfg.t_end, opt);

    std::ofstream front(dir / "od2d_front.csv");
    front << "t,s,census_boundary,census_components\n";
    front.precision(12);
    for (std::size_t s = 0; s < traj.census.size(); ++s)
        front << s * cfg.k << ",0," << traj.census[s].boundary_nodes << ','
              << traj.census[s].components << '\n';

    const int steps = static_cast<int>(traj.snapshots.size()) - 1;
    for (int d : dump_steps(steps, cfg.dumps)) {
        std::ostringstream name;
        name << "od2d_t" << std::fixed << d * cfg.k << ".csv";
        std::ofstream out(dir / name.str());
        out << "t,x,y,u\n";
        out.precision(12);
        const auto& u = traj.snapshots[d];
        for (int j = 0; j < u.ny; ++j)
            for (int i = 0; i < u.nx; ++i)
                out << d * cfg.k << ',' << u.x_of(i) << ',' << u.y_of(j) << ',' << u.at(i, j)
                    << '\n';
    }

    json result;
    result["extinct"] = traj.extinct;
    json trace = json::array();
    int last_c = -1, last_h = -1;
    for (std::size_t s = 0; s < traj.census.size(); ++s) {
        if (traj.census[s].components != last_c || traj.census[s].holes != last_h) {
            last_c = traj.census[s].components;
            last_h = traj.census[s].holes;
            trace.push_back({{"t", s * cfg.k}, {"components", last_c}, {"holes", last_h}});
        }
    }
    result["topology_trace"] = trace;
    return result;
}

json run_bih1d(const RunConfig& cfg, const fs::path& dir) {
    biharmonic::BihProblem p;
    p.nodes = cfg.n;
    p.k = cfg.k;
    std::vector<double> u0(p.nodes);
    const auto steady = biharmonic::bih_steady_analytic();
    if (cfg.ic == "ramp" || cfg.ic == "quadratic")
        for (int i = 0; i < p.nodes; ++i) u0[i] = std::max(0.0, 1.0 - i * p.h() / 2.0);
    else if (cfg.ic == "inflated")
        for (int i = 0; i < p.nodes; ++i) u0[i] = 1.5 * steady(i * p.h());
    else
        throw CLI::ValidationError("bih1d supports ic=ramp or ic=inflated");

    auto run = biharmonic::bih_evolve(p, u0, cfg.t_end, 1e-8);

    std::ofstream fields(dir / "bih1d_fields.csv");
    fields << "t,x,u\n";
    fields.precision(12);
    for (int d : dump_steps(run.steps, cfg.dumps)) {
        if (d >= static_cast<int>(run.snapshots.size())) break;
        for (int i = 0; i < p.nodes; ++i)
            fields << d * cfg.k << ',' << i * p.h() << ',' << run.snapshots[d][i] << '\n';
    }

    double err = 0.0;
    for (int i = 0; i < p.nodes; ++i)
        err = std::max(err, std::abs(run.snapshots.back()[i] - steady(i * p.h())));

    json result;
    result["steady_reached"] = run.steady_reached;
    result["steady_max_err"] = err;
    result["contact_point"] = biharmonic::contact_point(p, run.snapshots.back(), 1e-7);
    return result;
}

int cmd_run(const RunConfig& cfg) {
    validate(cfg);
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);

    json manifest;
    manifest["config"] = {{"problem", cfg.problem}, {"method", cfg.method}, {"ic", cfg.ic},
                          {"n", cfg.n},             {"k", cfg.k},           {"t_end", cfg.t_end},
                          {"c", cfg.c},             {"dumps", cfg.dumps}};
    try {
        if (cfg.problem == "od1d") manifest["result"] = run_od1d(cfg, dir);
        else if (cfg.problem == "od2d") manifest["result"] = run_od2d(cfg, dir);
        else manifest["result"] = run_bih1d(cfg, dir);
        manifest["status"] = "ok";
    } catch (const NoConvergence& e) {
        manifest["status"] = "solver_failure";
        manifest["error"] = e.what();
        std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
    std::cout << manifest.dump(2) << '\n';
    return 0;
}

struct SuiteResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

SuiteResult suite_activeset() {
    SuiteResult r{.name = "activeset-oracle"};
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> amp(0.0, 0.6);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 9);
        activeset::QpProblem p{GridField(n, 1.0 / n), 0.02 + 0.1 * (trial % 5)};
        for (auto& x : p.u_n.v) x = amp(rng);
        auto oracle = activeset::brute_force_qp(p);
        auto sol = activeset::active_set_solve(p);
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(oracle.v[i] - sol.u.v[i]));
    }
    r.pass = worst < 1e-10;
    r.detail = "max oracle gap " + std::to_string(worst);
    return r;
}

SuiteResult suite_energy() {
    SuiteResult r{.name = "energy-dissipation"};
    auto u0 = presets::make_field_1d(128, presets::ic_twobump);
    auto traj = gradientflow::gf_evolve(u0, 1e-3, 0.05);
    r.pass = true;
    for (std::size_t s = 0; s + 1 < traj.energy.size(); ++s)
        if (traj.energy[s + 1] > traj.energy[s] + 1e-10 * (1.0 + std::abs(traj.energy[0])))
            r.pass = false;
    r.detail = "steps " + std::to_string(traj.energy.size() - 1);
    return r;
}

SuiteResult suite_contraction() {
    SuiteResult r{.name = "contraction"};
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    r.pass = true;
    for (int trial = 0; trial < 50; ++trial) {
        GridField a(64, 1.0 / 64.0), b(64, 1.0 / 64.0);
        for (int i = 0; i < 64; ++i) {
            a.v[i] = dist(rng);
            b.v[i] = dist(rng);
        }
        if (!verify::contraction_check(a, b, 1e-3, 0.02).pass) r.pass = false;
    }
    r.detail = "50 random pairs";
    return r;
}

SuiteResult suite_crossmethod() {
    SuiteResult r{.name = "cross-method"};
    auto cmp = verify::compare_methods(presets::ic_quadratic, 128, 1e-4, 0.05);
    r.pass = !cmp.truncated && cmp.max_field_gap <= 5e-2;
    r.detail = "field gap " + std::to_string(cmp.max_field_gap);
    return r;
}

SuiteResult suite_regularized() {
    SuiteResult r{.name = "regularization-monotone"};
    auto u0 = presets::make_field_1d(64, presets::ic_quadratic);
    auto rep = regularized::monotonicity_report(u0, {1e2, 1e3, 1e4}, 1e-3, 0.02);
    r.pass = rep.pass;
    r.detail = "worst violation " + std::to_string(rep.worst);
    return r;
}

SuiteResult suite_biharmonic() {
    SuiteResult r{.name = "biharmonic-steady"};
    biharmonic::BihProblem p;
    p.nodes = 97;
    p.k = 2e-3;
    std::vector<double> u0(p.nodes);
    for (int i = 0; i < p.nodes; ++i) u0[i] = std::max(0.0, 1.0 - i * p.h() / 2.0);
    auto run = biharmonic::bih_evolve(p, u0, 5.0, 1e-8);
    const auto steady = biharmonic::bih_steady_analytic();
    double err = 0.0;
    for (int i = 0; i < p.nodes; ++i)
        err = std::max(err, std::abs(run.snapshots.back()[i] - steady(i * p.h())));
    r.pass = run.steady_reached && err <= 4.0 * p.h();
    r.detail = "steady max err " + std::to_string(err);
    return r;
}

int cmd_verify(const std::string& suite) {
    std::map<std::string, SuiteResult (*)()> suites = {
        {"activeset", suite_activeset},     {"energy", suite_energy},
        {"contraction", suite_contraction}, {"crossmethod", suite_crossmethod},
        {"regularized", suite_regularized}, {"biharmonic", suite_biharmonic},
    };
    std::vector<std::string> selected;
    if (suite == "all")
        for (const auto& [name, fn] : suites) selected.push_back(name);
    else if (suites.count(suite))
        selected.push_back(suite);
    else
        throw CLI::ValidationError("unknown suite: " + suite);

    std::vector<SuiteResult> results(selected.size());
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < selected.size(); ++i)
        jobs.push_back([&, i] { results[i] = suites.at(selected[i])(); });
    run_concurrently(jobs);

    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.detail << ")\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : kExitVerify;
}

int cmd_study(const std::string& which) {
    if (which != "mapped") throw CLI::ValidationError("unknown study: " + which);
    const std::vector<int> N_list{16, 32, 64, 128};
    const std::vector<double> k_list{8e-3, 4e-3, 2e-3, 1e-3};

    mapped::StudyResult spatial, temporal;
    std::vector<std::function<void()>> jobs{
        [&] {
            spatial = mapped::convergence_study(presets::ic_quadratic, N_list,
                                                {4e-3, 2e-3, 1e-3}, 5e-2, {}, 1e-4, 128);
        },
        [&] {
            temporal = mapped::convergence_study(presets::ic_quadratic, {16, 32, 64}, k_list,
                                                 4.8e-2, {}, 1e-3, 192);
        },
    };
    run_concurrently(jobs);

    std::cout << "axis,resolution,error\n";
    for (std::size_t i = 0; i < spatial.h_errors.size(); ++i)
        std::cout << "h," << N_list[i] << ',' << spatial.h_errors[i] << '\n';
    for (std::size_t i = 0; i < temporal.k_errors.size(); ++i)
        std::cout << "k," << k_list[i] << ',' << temporal.k_errors[i] << '\n';
    std::cout << "observed p_h = " << spatial.p_h << "\nobserved p_k = " << temporal.p_k << '\n';
    const bool in_band = spatial.p_h > 1.6 && spatial.p_h < 2.4 && temporal.p_k > 0.7 &&
                         temporal.p_k < 1.3;
    return in_band ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"freebound: implicit free boundary solvers"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string preset, config_file;
    auto* run = app.add_subcommand("run", "run a simulation scenario");
    run->add_option("--preset", preset, "named scenario (fig1-left, fig1-right, fig2, fig3, bih)");
    run->add_option("--config", config_file, "key=value config file");
    run->add_option("--problem", cfg.problem, "od1d, od2d or bih1d");
    run->add_option("--method", cfg.method, "gradient, mapped or regularized");
    run->add_option("--ic", cfg.ic, "initial condition preset or file:<path>");
    run->add_option("--n", cfg.n, "grid resolution");
    run->add_option("--k", cfg.k, "time step");
    run->add_option("--t-end", cfg.t_end, "final time");
    run->add_option("--c", cfg.c, "regularization strength");
    run->add_option("--output-dir", cfg.output_dir, "output directory");

    std::string suite = "all";
    auto* ver = app.add_subcommand("verify", "run verification suites");
    ver->add_option("--suite", suite, "suite name or 'all'");

    std::string study = "mapped";
    auto* st = app.add_subcommand("study", "convergence studies");
    st->add_option("--convergence", study, "study name");

    try {
        app.parse(argc, argv);

        if (run->parsed()) {
            if (!preset.empty()) apply_preset(cfg, preset);
            if (!config_file.empty()) load_config_file(cfg, config_file);
            // explicit flags override preset/config values: reparse onto the
            // preset-initialized config
            app.clear();
            app.parse(argc, argv);
            return cmd_run(cfg);
        }
        if (ver->parsed()) return cmd_verify(suite);
        if (st->parsed()) return cmd_study(study);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitUsage;
}
