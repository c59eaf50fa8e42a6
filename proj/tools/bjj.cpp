// bjj - command-line front end for the junction work-statistics library
//
// Every command computes everything first and only then writes its CSV files
// and a <command>.manifest.json into --out-dir. Exit codes: 0 success,
// 2 invalid configuration, 3 numerical failure. Errors are reported as one
// JSON object on stderr.

#include "csv_io.hpp"
#include "manifest.hpp"

#include "bjj/dynamics.hpp"
#include "bjj/error.hpp"
#include "bjj/model.hpp"
#include "bjj/parallel.hpp"
#include "bjj/qho_oracle.hpp"
#include "bjj/ramp.hpp"
#include "bjj/ramp_control.hpp"
#include "bjj/spectral.hpp"
#include "bjj/work_stats.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>

namespace fs = std::filesystem;
using bjj::io::CsvTable;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Common {
    std::string config_file;
    std::string out_dir{"."};
    int n_particles{100};
    double tunneling{1.0};
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_file, "flat key = value configuration file (command line wins)");
    sub->add_option("--out-dir", c.out_dir, "directory for CSV and manifest output");
    sub->add_option("-N,--n-particles", c.n_particles, "particle number N")->check(CLI::PositiveNumber);
    sub->add_option("-J,--tunneling", c.tunneling, "tunneling energy J");
}

json resolved_config(const CLI::App* sub) {
    json j = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
        if (name == "help" || name == "config" || name.empty()) continue;
        const auto results = opt->reduced_results();
        if (!results.empty()) {
            j[name] = results.size() == 1 ? json(results.front()) : json(results);
        } else if (opt->get_default_str().size()) {
            j[name] = opt->get_default_str();
        } else {
            j[name] = nullptr;
        }
    }
    return j;
}

// Writes tables and the manifest once all computation has succeeded.
void emit(const Common& c, const std::string& command,
          const std::vector<std::pair<std::string, CsvTable>>& tables, bjj::io::RunManifest manifest) {
    fs::create_directories(c.out_dir);
    for (const auto& [name, table] : tables) {
        const fs::path p = fs::path(c.out_dir) / name;
        bjj::io::write_csv(p, table);
        manifest.add_output(p);
    }
    manifest.write(fs::path(c.out_dir) / (command + ".manifest.json"));
    for (const auto& [name, table] : tables) {
        std::cout << (fs::path(c.out_dir) / name).string() << " (" << table.rows.size() << " rows)\n";
    }
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Flat "key = value" file; '#' and ';' start comments. Keys are long option
// names of the subcommand. Values given on the command line take precedence.
void apply_config_file(CLI::App* sub, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw bjj::InvalidParameter("cannot read config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw bjj::InvalidParameter(path + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config") {
            throw bjj::InvalidParameter(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (opt->count() > 0) continue;
        try {
            if (opt->get_type_size() == 0) {
                opt->add_result(value == "true" || value == "1" || value == "on" ? "true" : "false");
            } else {
                opt->add_result(value);
            }
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw bjj::InvalidParameter(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::vector<double> sweep_grid(double from, double to, int points, const std::string& spacing) {
    if (points < 1) throw bjj::InvalidParameter("sweep needs at least one point");
    std::vector<double> out;
    if (points == 1) return {from};
    if (spacing == "log") {
        if (!(from > 0.0) || !(to > 0.0)) throw bjj::InvalidParameter("log spacing needs positive bounds");
        const double a = std::log10(from);
        const double b = std::log10(to);
        for (int i = 0; i < points; ++i) out.push_back(std::pow(10.0, a + (b - a) * i / (points - 1)));
    } else if (spacing == "linear") {
        for (int i = 0; i < points; ++i) out.push_back(from + (to - from) * i / (points - 1));
    } else {
        throw bjj::InvalidParameter("spacing must be 'log' or 'linear'");
    }
    return out;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
    Common c;
    double interaction{0.0};
};

void cmd_spectrum(const SpectrumArgs& a, const CLI::App* sub) {
    const bjj::ModelParams p{a.c.n_particles, a.c.tunneling, a.interaction};
    bjj::validate(p);
    const bjj::Spectrum s = bjj::diagonalize(bjj::build_hamiltonian(p));
    CsvTable t{"spectrum", {"q", "energy"}, {}};
    for (int q = 0; q < s.dimension(); ++q) t.rows.push_back({double(q), s.eigenvalues[q]});
    bjj::io::RunManifest m("spectrum", resolved_config(sub));
    m.set("regime", std::string(bjj::to_string(bjj::classify_regime(p))));
    emit(a.c, "spectrum", {{"spectrum.csv", t}}, std::move(m));
}

// ---------------------------------------------------------------- sudden-sweep

struct SweepArgs {
    Common c;
    std::string swept{"uf"};
    double fixed{0.0};
    double from{1e-3};
    double to{1e4};
    int points{50};
    std::string spacing{"log"};
};

void cmd_sudden_sweep(const SweepArgs& a, const CLI::App* sub) {
    if (a.swept != "uf" && a.swept != "ui") throw bjj::InvalidParameter("--sweep must be 'uf' or 'ui'");
    const auto grid = sweep_grid(a.from, a.to, a.points, a.spacing);
    const int n = a.c.n_particles;
    const double j = a.c.tunneling;
    for (double v : grid) {
        bjj::validate({n, j, v});
    }
    bjj::validate({n, j, a.fixed});

    const auto rows = bjj::parallel_map(grid.size(), [&](std::size_t i) {
        const double ui = a.swept == "ui" ? grid[i] : a.fixed;
        const double uf = a.swept == "uf" ? grid[i] : a.fixed;
        const bjj::ModelParams pi{n, j, ui};
        const bjj::ModelParams pf{n, j, uf};
        const auto ex = bjj::sudden_moments(pi, pf);
        const auto qho = bjj::qho_sudden_moments(pi, pf);
        const auto small = bjj::qho_limit_moments(pi, pf, bjj::QuenchLimit::small_initial).moments;
        double lq = kNaN, lv = kNaN, lw = kNaN;
        if (ui > 0.0 && uf >= 0.0) {
            const auto large = bjj::qho_limit_moments(pi, pf, bjj::QuenchLimit::large_initial).moments;
            lq = large.w_quant;
            lv = large.variance;
            lw = large.w_irr;
        }
        double weak = kNaN, strong = kNaN;
        if (ui == 0.0) {
            const auto lim = bjj::qho_quench_strength_limits(pf);
            weak = lim.w_irr_weak;
            strong = lim.w_irr_strong;
        }
        return std::vector<double>{grid[i], ex.mean, ex.w_quant, ex.variance, ex.w_irr,
                                   qho.mean, qho.w_quant, qho.variance, qho.w_irr,
                                   small.w_quant, small.variance, small.w_irr, lq, lv, lw, weak, strong,
                                   std::abs(ex.w_quant), std::abs(ex.variance), std::abs(ex.w_irr)};
    });
    CsvTable t{"sudden-sweep",
               {a.swept, "mean", "w_quant", "variance", "w_irr", "qho_mean", "qho_w_quant",
                "qho_variance", "qho_w_irr", "small_ui_w_quant", "small_ui_variance", "small_ui_w_irr",
                "large_ui_w_quant", "large_ui_variance", "large_ui_w_irr", "weak_quench_w_irr",
                "strong_quench_w_irr", "abs_w_quant", "abs_variance", "abs_w_irr"},
               rows};
    emit(a.c, "sudden-sweep", {{"sudden_sweep.csv", t}},
         bjj::io::RunManifest("sudden-sweep", resolved_config(sub)));
}

// ---------------------------------------------------------------- distribution

struct DistributionArgs {
    Common c;
    double ui{0.0};
    double uf{0.1};
    std::string mode{"sudden"};
    double tau{1.0};
    double dt{1e-3};
    bool exponential{false};
    int density_points{200};
};

void cmd_distribution(const DistributionArgs& a, const CLI::App* sub) {
    const bjj::ModelParams pi{a.c.n_particles, a.c.tunneling, a.ui};
    const bjj::ModelParams pf{a.c.n_particles, a.c.tunneling, a.uf};
    bjj::validate(pi);
    bjj::validate(pf);
    if (a.mode != "sudden" && a.mode != "linear") throw bjj::InvalidParameter("--mode must be 'sudden' or 'linear'");
    const double w_class = bjj::classical_work(a.c.n_particles, a.uf - a.ui);
    bjj::io::RunManifest m("distribution", resolved_config(sub));
    std::vector<std::pair<std::string, CsvTable>> tables;

    bjj::WorkDistribution dist;
    if (a.mode == "sudden") {
        dist = bjj::sudden_work_distribution(pi, pf);
    } else {
        const bjj::EvolutionConfig cfg(bjj::Ramp::linear(a.ui, a.uf, a.tau), a.dt);
        dist = bjj::finite_time_work(pi, pf, cfg, std::nullopt).distribution;
        const bjj::QhoParams q{a.c.n_particles, a.c.tunneling};
        const auto g = bjj::propagate_g(bjj::FrequencyProtocol::from_ramp(cfg.ramp(), pi.n_particles, pi.tunneling));
        const auto p = bjj::transition_probabilities(g.final_state(), q.omega(a.ui), q.omega(a.uf), q.mass());
        const auto mom = bjj::qho_finite_time_moments(g, q, a.ui, a.uf);
        const auto qd = bjj::qho_work_distribution(p, q.omega(a.uf), mom.delta_f);
        CsvTable tq{"distribution-qho", {"work", "probability", "quantum_work"}, {}};
        for (const auto& e : qd.entries) tq.rows.push_back({e.work, e.probability, e.work - w_class});
        tables.emplace_back("qho_distribution.csv", std::move(tq));
        m.set("qho_tail_estimate", p.tail_estimate);
    }
    CsvTable t{"distribution", {"work", "probability", "quantum_work"}, {}};
    for (const auto& e : dist.entries) t.rows.push_back({e.work, e.probability, e.work - w_class});
    tables.insert(tables.begin(), {"distribution.csv", std::move(t)});
    m.set("delta_f", dist.delta_f());
    m.set("total_probability", dist.total_probability());

    if (a.exponential) {
        const auto d = bjj::exponential_work_density(pi, pf, true);
        CsvTable e{"exponential-density", {"quantum_work", "density", "cdf"}, {}};
        const double span = 10.0 * d.sigma() * (d.mirrored() ? -1.0 : 1.0);
        for (int i = 1; i <= a.density_points; ++i) {
            const double w = span * i / a.density_points;
            e.rows.push_back({w, d.density(w), d.cdf(w)});
        }
        tables.emplace_back("exponential_density.csv", std::move(e));
        m.set("sigma", d.sigma());
    }
    emit(a.c, "distribution", tables, std::move(m));
}

// ---------------------------------------------------------------- ramp-sweep

struct RampArgs {
    Common c;
    double ui{0.0};
    double uf{0.2};
    std::string kind{"linear"};
    std::vector<double> params;
};

struct RampSweepArgs {
    RampArgs r;
    std::vector<double> taus;
    double tau_min{0.1};
    double tau_max{15.0};
    double tau_step{0.1};
    double dt{1e-3};
    int max_halvings{0};
    double refine_tolerance{1e-8};
    std::vector<double> trace_taus;
    int trace_stride{10};
};

void cmd_ramp_sweep(const RampSweepArgs& a, const CLI::App* sub) {
    const RampArgs& r = a.r;
    const int n = r.c.n_particles;
    const double j = r.c.tunneling;
    const bjj::ModelParams pi{n, j, r.ui};
    const bjj::ModelParams pf{n, j, r.uf};
    bjj::validate(pi);
    bjj::validate(pf);
    const bjj::RampKind kind = bjj::parse_ramp_kind(r.kind);
    const std::vector<double> taus = a.taus.empty() ? bjj::arithmetic_grid(a.tau_min, a.tau_max, a.tau_step) : a.taus;
    for (double tau : taus) {
        const bjj::Ramp ramp(kind, r.ui, r.uf, tau, r.params);
        if (!ramp.satisfies_reality_bound(n, j)) throw bjj::InvalidParameter("ramp violates the reality bound");
    }
    const bjj::QhoParams q{n, j};
    std::optional<bjj::StepRefinement> refine;
    if (a.max_halvings > 0) refine = bjj::StepRefinement{a.refine_tolerance, a.max_halvings};

    const auto rows = bjj::parallel_map(taus.size(), [&](std::size_t i) {
        const bjj::Ramp ramp(kind, r.ui, r.uf, taus[i], r.params);
        const auto bh = bjj::finite_time_work(pi, pf, bjj::EvolutionConfig(ramp, a.dt), refine);
        const auto g = bjj::propagate_g(bjj::FrequencyProtocol::from_ramp(ramp, n, j));
        const auto qm = bjj::qho_finite_time_moments(g, q, r.ui, r.uf);
        return std::vector<double>{taus[i], bh.moments.w_irr, bh.moments.variance, qm.w_irr, qm.variance,
                                   bh.time_step, double(bh.halvings), bh.converged ? 1.0 : 0.0};
    });
    std::vector<std::pair<std::string, CsvTable>> tables;
    tables.emplace_back("ramp_sweep.csv",
                        CsvTable{"ramp-sweep",
                                 {"tau", "w_irr", "variance", "qho_w_irr", "qho_variance", "time_step",
                                  "halvings", "converged"},
                                 rows});

    const double unit = j / q.omega(r.ui);
    for (double tau : a.trace_taus) {
        const bjj::Ramp ramp(kind, r.ui, r.uf, tau, r.params);
        if (!ramp.satisfies_reality_bound(n, j)) throw bjj::InvalidParameter("ramp violates the reality bound");
        const bjj::EvolutionConfig cfg(ramp, a.dt, {bjj::Tracked::position_variance}, a.trace_stride);
        const auto psi0 = bjj::ground_state(bjj::build_hamiltonian(pi)).second;
        const auto traj = bjj::evolve(psi0, pi, cfg);
        const auto g = bjj::propagate_g(bjj::FrequencyProtocol::from_ramp(ramp, n, j));
        const auto ref = bjj::evolved_variance(g, traj.times);
        const auto& x2 = traj.series_of(bjj::Tracked::position_variance);
        CsvTable t{"variance-trace", {"t", "x2", "qho_x2", "instantaneous_x2"}, {}};
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const double ut = ramp.value(std::min(traj.times[k], tau));
            t.rows.push_back({traj.times[k], x2[k] / unit, ref[k] / unit, j / q.omega(ut) / unit});
        }
        char name[64];
        std::snprintf(name, sizeof name, "variance_tau_%g.csv", tau);
        tables.emplace_back(name, std::move(t));
    }
    emit(r.c, "ramp-sweep", tables, bjj::io::RunManifest("ramp-sweep", resolved_config(sub)));
}

// ---------------------------------------------------------------- optimize / stability / landscape

struct SearchArgs {
    RampArgs r;
    std::vector<std::string> kinds{"lcs", "cubic"};
    std::vector<double> taus{0.02, 0.04, 0.06, 0.08, 0.10, 0.20, 0.30, 0.40, 0.50};
    double dt{1e-3};
    double lower{-30.0};
    double upper{30.0};
    double grid_step{0.2};
    double coarse_step{1.0};
    std::string strategy{"automatic"};
    int budget{20000};
    std::optional<std::uint64_t> seed;
    double stability_bound{0.0};
    int stability_samples{50};
};

bjj::SearchConfig search_config(const SearchArgs& a, std::uint64_t seed) {
    bjj::SearchConfig cfg;
    cfg.lower = a.lower;
    cfg.upper = a.upper;
    cfg.grid_step = a.grid_step;
    cfg.coarse_step = a.coarse_step;
    cfg.random_budget = a.budget;
    cfg.seed = seed;
    if (a.strategy == "exhaustive") {
        cfg.strategy = bjj::SearchStrategy::exhaustive;
    } else if (a.strategy != "automatic") {
        throw bjj::InvalidParameter("--strategy must be 'automatic' or 'exhaustive'");
    }
    return cfg;
}

void cmd_optimize(SearchArgs a, const CLI::App* sub) {
    const RampArgs& r = a.r;
    const std::uint64_t seed = resolve_seed(a.seed);
    const bjj::SearchConfig cfg = search_config(a, seed);
    std::vector<bjj::RampKind> kinds;
    for (const auto& k : a.kinds) kinds.push_back(bjj::parse_ramp_kind(k));
    for (double tau : a.taus) {
        if (!(tau > 0.0)) throw bjj::InvalidParameter("tau must be positive");
    }
    bjj::validate({r.c.n_particles, r.c.tunneling, r.ui});
    bjj::validate({r.c.n_particles, r.c.tunneling, r.uf});

    bjj::io::RunManifest m("optimize", resolved_config(sub));
    m.add_seed("search", seed);
    std::vector<std::pair<std::string, CsvTable>> tables;
    json results = json::array();
    for (bjj::RampKind kind : kinds) {
        std::vector<std::string> cols{"tau"};
        for (const auto& p : bjj::free_parameter_names(kind)) cols.push_back(p);
        for (const char* c : {"w_irr", "linear_w_irr", "dominates_linear", "evaluations", "infeasible"}) {
            cols.emplace_back(c);
        }
        if (a.stability_bound > 0.0) {
            for (const char* c : {"stability_mean", "stability_std", "stability_relative_change"}) cols.emplace_back(c);
        }
        CsvTable t{"optimize-" + std::string(bjj::to_string(kind)), cols, {}};
        for (double tau : a.taus) {
            const bjj::WorkObjective obj(r.c.n_particles, r.c.tunneling, r.ui, r.uf, tau, a.dt);
            const auto res = bjj::optimize(obj, kind, cfg);
            std::vector<double> row{tau};
            row.insert(row.end(), res.params.begin(), res.params.end());
            row.insert(row.end(), {res.w_irr, res.linear_w_irr, res.w_irr <= res.linear_w_irr ? 1.0 : 0.0,
                                   double(res.evaluations), double(res.infeasible)});
            if (a.stability_bound > 0.0 && !res.params.empty()) {
                const std::vector<double> bounds(res.params.size(), a.stability_bound);
                const auto rep = bjj::stability_analysis(obj, res, bounds, a.stability_samples, seed);
                row.insert(row.end(), {rep.mean, rep.stddev, rep.relative_change});
            } else if (a.stability_bound > 0.0) {
                row.insert(row.end(), {res.w_irr, 0.0, 0.0});
            }
            t.rows.push_back(std::move(row));
            results.push_back({{"kind", bjj::to_string(kind)}, {"tau", tau}, {"params", res.params},
                               {"w_irr", res.w_irr}, {"linear_w_irr", res.linear_w_irr},
                               {"strategy", res.strategy}, {"evaluations", res.evaluations},
                               {"infeasible", res.infeasible}, {"fell_back_to_linear", res.fell_back_to_linear},
                               {"n_particles", res.n_particles}});
        }
        tables.emplace_back("optimize_" + std::string(bjj::to_string(kind)) + ".csv", std::move(t));
    }
    m.set("optimizations", results);
    m.set("grid", {{"lower", cfg.lower}, {"upper", cfg.upper}, {"step", cfg.grid_step},
                   {"coarse_step", cfg.coarse_step}, {"budget", cfg.random_budget}});
    emit(r.c, "optimize", tables, std::move(m));
}

void cmd_stability(SearchArgs a, std::vector<double> bounds, const CLI::App* sub) {
    const RampArgs& r = a.r;
    const std::uint64_t seed = resolve_seed(a.seed);
    const bjj::SearchConfig cfg = search_config(a, seed);
    const bjj::RampKind kind = bjj::parse_ramp_kind(r.kind);
    const int dim = bjj::free_parameter_count(kind);
    if (dim == 0) throw bjj::InvalidParameter("stability analysis needs a kind with free parameters");
    if (bounds.size() == 1) bounds.assign(static_cast<std::size_t>(dim), bounds.front());
    if (static_cast<int>(bounds.size()) != dim) throw bjj::InvalidParameter("give one bound or one per parameter");
    if (!r.params.empty() && a.taus.size() != 1) {
        throw bjj::InvalidParameter("--params needs exactly one --taus value");
    }
    if (!r.params.empty() && static_cast<int>(r.params.size()) != dim) {
        throw bjj::InvalidParameter("wrong number of --params for this kind");
    }
    if (a.stability_samples < 2) throw bjj::InvalidParameter("--samples must be at least 2");

    std::vector<std::string> cols{"tau"};
    for (const auto& p : bjj::free_parameter_names(kind)) cols.push_back(p);
    for (const char* c : {"optimum", "mean", "std", "relative_change", "max_relative_change", "accepted", "rejected"}) {
        cols.emplace_back(c);
    }
    CsvTable t{"stability-" + std::string(bjj::to_string(kind)), cols, {}};
    for (double tau : a.taus) {
        const bjj::WorkObjective obj(r.c.n_particles, r.c.tunneling, r.ui, r.uf, tau, a.dt);
        bjj::OptimizationResult res;
        if (r.params.empty()) {
            res = bjj::optimize(obj, kind, cfg);
        } else {
            res.kind = kind;
            res.tau = tau;
            res.params = r.params;
        }
        const auto rep = bjj::stability_analysis(obj, res, bounds, a.stability_samples, seed);
        std::vector<double> row{tau};
        row.insert(row.end(), res.params.begin(), res.params.end());
        row.insert(row.end(), {rep.optimum, rep.mean, rep.stddev, rep.relative_change, rep.max_relative_change,
                               double(rep.accepted), double(rep.rejected)});
        t.rows.push_back(std::move(row));
    }
    bjj::io::RunManifest m("stability", resolved_config(sub));
    m.add_seed("perturbation", seed);
    emit(r.c, "stability", {{"stability.csv", t}}, std::move(m));
}

struct LandscapeArgs {
    RampArgs r;
    double tau{0.1};
    double dt{1e-3};
    double x_min{-10.0}, x_max{10.0}, x_step{0.2};
    double y_min{-10.0}, y_max{10.0}, y_step{0.2};
};

void cmd_landscape(const LandscapeArgs& a, const CLI::App* sub) {
    const RampArgs& r = a.r;
    const bjj::RampKind kind = bjj::parse_ramp_kind(r.kind);
    const auto xs = bjj::arithmetic_grid(a.x_min, a.x_max, a.x_step);
    const auto ys = bjj::arithmetic_grid(a.y_min, a.y_max, a.y_step);
    const bjj::WorkObjective obj(r.c.n_particles, r.c.tunneling, r.ui, r.uf, a.tau, a.dt);
    const auto land = bjj::landscape_scan(obj, kind, xs, ys);
    const auto names = bjj::free_parameter_names(kind);
    CsvTable t{"landscape-" + std::string(bjj::to_string(kind)), {names[0], names[1], "w_irr", "feasible"}, {}};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t k = 0; k < ys.size(); ++k) {
            const bool ok = land.feasible(int(i), int(k));
            t.rows.push_back({xs[i], ys[k], land.w_irr(int(i), int(k)), ok ? 1.0 : 0.0});
        }
    }
    bjj::io::RunManifest m("landscape", resolved_config(sub));
    if (land.best_row >= 0) {
        m.set("best", {{names[0], xs[land.best_row]}, {names[1], ys[land.best_col]},
                       {"w_irr", land.w_irr(land.best_row, land.best_col)}});
    }
    emit(r.c, "landscape", {{"landscape.csv", t}}, std::move(m));
}

void add_ramp(CLI::App* sub, RampArgs& r, double ui, double uf) {
    add_common(sub, r.c);
    r.ui = ui;
    r.uf = uf;
    sub->add_option("--ui", r.ui, "initial interaction U_i");
    sub->add_option("--uf", r.uf, "final interaction U_f");
    sub->add_option("--kind", r.kind, "ramp kind: linear, lcs, two_lcs, cubic, quintic");
    sub->add_option("--params", r.params, "free ramp parameters")->delimiter(',');
}

void add_search(CLI::App* sub, SearchArgs& a) {
    sub->add_option("--taus", a.taus, "ramp durations")->delimiter(',');
    sub->add_option("--dt", a.dt, "time step of the objective");
    sub->add_option("--lower", a.lower, "lower search bound");
    sub->add_option("--upper", a.upper, "upper search bound");
    sub->add_option("--grid-step", a.grid_step, "reported parameter granularity");
    sub->add_option("--coarse-step", a.coarse_step, "first-pass grid step (automatic strategy)");
    sub->add_option("--strategy", a.strategy, "automatic or exhaustive");
    sub->add_option("--budget", a.budget, "random samples for four-parameter kinds");
    sub->add_option("--seed", a.seed, "random seed (generated and recorded when absent)");
}

void report_error(const std::string& kind, const std::string& message, int code) {
    std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Work statistics of a bosonic Josephson junction"};
    app.require_subcommand(1);

    SpectrumArgs spectrum;
    auto* s_spec = app.add_subcommand("spectrum", "eigenvalues of the Fock-basis Hamiltonian");
    add_common(s_spec, spectrum.c);
    s_spec->add_option("-U,--interaction", spectrum.interaction, "interaction U");

    SweepArgs sweep;
    auto* s_sweep = app.add_subcommand("sudden-sweep", "sudden-quench moments over a U grid");
    add_common(s_sweep, sweep.c);
    s_sweep->add_option("--sweep", sweep.swept, "swept parameter: uf or ui");
    s_sweep->add_option("--fixed", sweep.fixed, "value of the other interaction");
    s_sweep->add_option("--from", sweep.from, "first grid value");
    s_sweep->add_option("--to", sweep.to, "last grid value");
    s_sweep->add_option("--points", sweep.points, "number of grid points");
    s_sweep->add_option("--spacing", sweep.spacing, "log or linear");

    DistributionArgs dist;
    auto* s_dist = app.add_subcommand("distribution", "work distribution of a quench");
    add_common(s_dist, dist.c);
    s_dist->add_option("--ui", dist.ui, "initial interaction");
    s_dist->add_option("--uf", dist.uf, "final interaction");
    s_dist->add_option("--mode", dist.mode, "sudden or linear");
    s_dist->add_option("--tau", dist.tau, "ramp duration (linear mode)");
    s_dist->add_option("--dt", dist.dt, "time step (linear mode)");
    s_dist->add_flag("--exponential", dist.exponential, "also emit the exponential density");
    s_dist->add_option("--density-points", dist.density_points, "samples of the density curve");

    RampSweepArgs rs;
    rs.r.c.n_particles = 200;
    auto* s_ramp = app.add_subcommand("ramp-sweep", "finite-time work versus ramp duration");
    add_ramp(s_ramp, rs.r, 0.0, 0.2);
    s_ramp->add_option("--taus", rs.taus, "explicit ramp durations")->delimiter(',');
    s_ramp->add_option("--tau-min", rs.tau_min, "first duration of the grid");
    s_ramp->add_option("--tau-max", rs.tau_max, "last duration of the grid");
    s_ramp->add_option("--tau-step", rs.tau_step, "grid step");
    s_ramp->add_option("--dt", rs.dt, "time step");
    s_ramp->add_option("--max-halvings", rs.max_halvings, "step halvings for convergence (0 = fixed step)");
    s_ramp->add_option("--refine-tolerance", rs.refine_tolerance, "halving stops below this change of <W>");
    s_ramp->add_option("--trace-taus", rs.trace_taus, "durations with a time-resolved variance file")->delimiter(',');
    s_ramp->add_option("--trace-stride", rs.trace_stride, "record every k-th step in traces");

    SearchArgs opt;
    opt.r.c.n_particles = 200;
    auto* s_opt = app.add_subcommand("optimize", "minimize W_irr over ramp parameters");
    add_ramp(s_opt, opt.r, 0.2, 0.8);
    add_search(s_opt, opt);
    s_opt->add_option("--kinds", opt.kinds, "ramp kinds to optimize")->delimiter(',');
    s_opt->add_option("--stability-bound", opt.stability_bound, "relative perturbation for stability columns");
    s_opt->add_option("--stability-samples", opt.stability_samples, "perturbed samples per optimum");

    SearchArgs stab;
    stab.r.c.n_particles = 200;
    stab.r.kind = "lcs";
    std::vector<double> bounds{0.2};
    auto* s_stab = app.add_subcommand("stability", "W_irr spread under random parameter errors");
    add_ramp(s_stab, stab.r, 0.2, 0.8);
    add_search(s_stab, stab);
    s_stab->add_option("--bounds", bounds, "relative error bound(s)")->delimiter(',');
    s_stab->add_option("--samples", stab.stability_samples, "perturbed samples");

    LandscapeArgs land;
    land.r.c.n_particles = 200;
    land.r.kind = "lcs";
    auto* s_land = app.add_subcommand("landscape", "W_irr over a two-parameter grid");
    add_ramp(s_land, land.r, 0.2, 0.8);
    s_land->add_option("--tau", land.tau, "ramp duration");
    s_land->add_option("--dt", land.dt, "time step");
    s_land->add_option("--x-min", land.x_min, "lower end of the first parameter axis");
    s_land->add_option("--x-max", land.x_max, "upper end of the first parameter axis");
    s_land->add_option("--x-step", land.x_step, "grid step of the first parameter axis");
    s_land->add_option("--y-min", land.y_min, "lower end of the second parameter axis");
    s_land->add_option("--y-max", land.y_max, "upper end of the second parameter axis");
    s_land->add_option("--y-step", land.y_step, "grid step of the second parameter axis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("config", e.what(), 2);
        return 2;
    }

    try {
        for (CLI::App* sub : app.get_subcommands()) {
            const CLI::Option* cfg = sub->get_option_no_throw("--config");
            if (cfg != nullptr && cfg->count() > 0) apply_config_file(sub, cfg->as<std::string>());
        }
        if (*s_spec) cmd_spectrum(spectrum, s_spec);
        if (*s_sweep) cmd_sudden_sweep(sweep, s_sweep);
        if (*s_dist) cmd_distribution(dist, s_dist);
        if (*s_ramp) cmd_ramp_sweep(rs, s_ramp);
        if (*s_opt) cmd_optimize(opt, s_opt);
        if (*s_stab) cmd_stability(stab, bounds, s_stab);
        if (*s_land) cmd_landscape(land, s_land);
    } catch (const bjj::InvalidParameter& e) {
        report_error("invalid_parameter", e.what(), 2);
        return 2;
    } catch (const bjj::NumericalFailure& e) {
        report_error("numerical_failure", e.what(), 3);
        return 3;
    } catch (const std::exception& e) {
        report_error("runtime", e.what(), 3);
        return 3;
    }
    return 0;
}
