#include "bjj/ramp_control.hpp"

#include "bjj/error.hpp"
#include "bjj/parallel.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace bjj {

namespace {

using Lattice = std::vector<long>;

// Memoized objective on the grid_step lattice.
class LatticeSearch {
public:
    LatticeSearch(const WorkObjective& objective, RampKind kind, const SearchConfig& config,
                  OptimizationResult& result)
        : objective_(objective), kind_(kind), config_(config), result_(result),
          lo_(std::lround(std::ceil(config.lower / config.grid_step - 1e-9))),
          hi_(std::lround(std::floor(config.upper / config.grid_step + 1e-9))) {}

    std::vector<double> values(const Lattice& p) const {
        std::vector<double> v(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) v[i] = static_cast<double>(p[i]) * config_.grid_step;
        return v;
    }

    bool inside(const Lattice& p) const {
        return std::all_of(p.begin(), p.end(), [&](long i) { return i >= lo_ && i <= hi_; });
    }

    Lattice snap(std::span<const double> v) const {
        Lattice p(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            p[i] = std::clamp(std::lround(v[i] / config_.grid_step), lo_, hi_);
        }
        return p;
    }

    // Evaluates the points not seen yet, in parallel, and records them in order.
    void evaluate(const std::vector<Lattice>& points) {
        std::vector<Lattice> fresh;
        for (const auto& p : points) {
            if (inside(p) && !cache_.count(p) &&
                std::find(fresh.begin(), fresh.end(), p) == fresh.end()) {
                fresh.push_back(p);
            }
        }
        const auto out = parallel_map(fresh.size(), [&](std::size_t i) {
            const auto v = values(fresh[i]);
            return objective_(kind_, v);
        });
        for (std::size_t i = 0; i < fresh.size(); ++i) record(fresh[i], out[i]);
    }

    std::optional<double> value(const Lattice& p) {
        auto it = cache_.find(p);
        if (it == cache_.end()) {
            evaluate({p});
            it = cache_.find(p);
            if (it == cache_.end()) return std::nullopt;
        }
        return it->second;
    }

    // Best feasible points seen so far, ascending in W_irr.
    std::vector<std::pair<Lattice, double>> best(std::size_t count) const {
        std::vector<std::pair<Lattice, double>> all;
        for (const auto& [p, w] : cache_) {
            if (w) all.emplace_back(p, *w);
        }
        std::stable_sort(all.begin(), all.end(),
                         [](const auto& a, const auto& b) { return a.second < b.second; });
        if (all.size() > count) all.resize(count);
        return all;
    }

    // Steepest-descent moves over the full neighbourhood (all +-1 combinations
    // of the lattice coordinates for two parameters, axial moves otherwise).
    Lattice descend(Lattice start) {
        auto current = value(start);
        if (!current) return start;
        for (int iter = 0; iter < 100000; ++iter) {
            std::vector<Lattice> nbrs = neighbours(start);
            evaluate(nbrs);
            Lattice next = start;
            double best_w = *current;
            for (const auto& q : nbrs) {
                const auto it = cache_.find(q);
                if (it != cache_.end() && it->second && *it->second < best_w) {
                    best_w = *it->second;
                    next = q;
                }
            }
            if (next == start) break;
            start = next;
            current = best_w;
        }
        return start;
    }

    const std::map<Lattice, std::optional<double>>& cache() const { return cache_; }

private:
    std::vector<Lattice> neighbours(const Lattice& p) const {
        std::vector<Lattice> out;
        if (p.size() == 2) {
            for (long dx = -1; dx <= 1; ++dx) {
                for (long dy = -1; dy <= 1; ++dy) {
                    if (dx == 0 && dy == 0) continue;
                    out.push_back({p[0] + dx, p[1] + dy});
                }
            }
        } else {
            for (std::size_t i = 0; i < p.size(); ++i) {
                for (long d : {-1L, 1L}) {
                    Lattice q = p;
                    q[i] += d;
                    out.push_back(q);
                }
            }
        }
        return out;
    }

    void record(const Lattice& p, std::optional<double> w) {
        cache_.emplace(p, w);
        ++result_.evaluations;
        if (!w) ++result_.infeasible;
        if (config_.keep_trace && w) result_.trace.push_back({values(p), *w});
    }

    const WorkObjective& objective_;
    RampKind kind_;
    const SearchConfig& config_;
    OptimizationResult& result_;
    long lo_;
    long hi_;
    std::map<Lattice, std::optional<double>> cache_;
};

struct SimplexContext {
    const WorkObjective* objective;
    RampKind kind;
    double lower;
    double upper;
    OptimizationResult* result;
};

double simplex_objective(const gsl_vector* x, void* params) {
    auto* ctx = static_cast<SimplexContext*>(params);
    std::vector<double> v(x->size);
    for (std::size_t i = 0; i < x->size; ++i) {
        v[i] = gsl_vector_get(x, i);
        if (v[i] < ctx->lower || v[i] > ctx->upper) return 1e30;
    }
    ++ctx->result->evaluations;
    const auto w = (*ctx->objective)(ctx->kind, v);
    if (!w) {
        ++ctx->result->infeasible;
        return 1e30;
    }
    return *w;
}

std::vector<double> run_simplex(SimplexContext& ctx, const std::vector<double>& start,
                                int iterations) {
    const std::size_t n = start.size();
    gsl_vector* x = gsl_vector_alloc(n);
    gsl_vector* step = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
        gsl_vector_set(x, i, start[i]);
        gsl_vector_set(step, i, 1.0);
    }
    gsl_multimin_function f{&simplex_objective, n, &ctx};
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(s, &f, x, step);
    for (int it = 0; it < iterations; ++it) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-3) == GSL_SUCCESS) break;
    }
    std::vector<double> best(n);
    for (std::size_t i = 0; i < n; ++i) best[i] = gsl_vector_get(s->x, i);
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return best;
}

void require_search_config(const SearchConfig& c) {
    if (!(c.grid_step > 0.0) || !(c.lower < c.upper)) {
        throw InvalidParameter("search bounds need lower < upper and a positive grid step");
    }
    if (!(c.lower <= 0.0 && c.upper >= 0.0)) {
        throw InvalidParameter("search box must contain the linear ramp (all parameters zero)");
    }
    if (!(c.coarse_step >= c.grid_step) || c.refine_candidates < 1) {
        throw InvalidParameter("coarse step must be at least the grid step");
    }
    if (c.random_budget < 1 || c.simplex_starts < 1 || c.simplex_iterations < 0) {
        throw InvalidParameter("search budget must be positive");
    }
}

}  // namespace

std::vector<double> arithmetic_grid(double lower, double upper, double step) {
    if (!(step > 0.0) || upper < lower) throw InvalidParameter("invalid grid specification");
    const long count = std::lround(std::floor((upper - lower) / step + 1e-9));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count) + 1);
    for (long i = 0; i <= count; ++i) out.push_back(lower + static_cast<double>(i) * step);
    return out;
}

WorkObjective::WorkObjective(int n_particles, double tunneling, double u_initial, double u_final,
                             double tau, double time_step, int min_steps)
    : n_(n_particles), j_(tunneling), u_i_(u_initial), u_f_(u_final), tau_(tau) {
    validate({n_particles, tunneling, u_initial});
    validate({n_particles, tunneling, u_final});
    if (!(tau > 0.0)) throw InvalidParameter("ramp duration must be positive");
    if (!(time_step > 0.0) || min_steps < 1) throw InvalidParameter("invalid objective time step");
    steps_ = std::max(min_steps, static_cast<int>(std::ceil(tau / time_step - 1e-9)));
    propagator_ = shared_propagator(n_particles, tunneling, Parity::even);
    const Spectrum si = diagonalize(propagator_->hamiltonian(u_initial));
    initial_ = si.state(0);
    const Spectrum sf = diagonalize(propagator_->hamiltonian(u_final));
    final_energies_ = sf.eigenvalues.array() - sf.eigenvalues[0];
    final_vectors_ = sf.eigenvectors;
}

Ramp WorkObjective::ramp(RampKind kind, std::span<const double> free_params) const {
    return Ramp(kind, u_i_, u_f_, tau_, free_params);
}

std::optional<double> WorkObjective::operator()(RampKind kind,
                                                std::span<const double> free_params) const {
    const Ramp r = ramp(kind, free_params);
    if (!r.satisfies_reality_bound(n_, j_)) return std::nullopt;
    return evaluate(r);
}

double WorkObjective::evaluate(const Ramp& ramp) const {
    if (!ramp.satisfies_reality_bound(n_, j_)) {
        throw InvalidParameter("ramp violates the reality bound U >= -2J/N");
    }
    const StateVector psi = propagator_->run(initial_, ramp, steps_);
    const Eigen::VectorXcd c = final_vectors_.transpose().cast<std::complex<double>>() * psi;
    double w = 0.0;
    for (Eigen::Index q = 0; q < c.size(); ++q) w += std::norm(c[q]) * final_energies_[q];
    return w;
}

OptimizationResult optimize(const WorkObjective& objective, RampKind kind, const SearchConfig& config) {
    require_search_config(config);
    OptimizationResult result;
    result.kind = kind;
    result.n_particles = objective.n_particles();
    result.u_initial = objective.u_initial();
    result.u_final = objective.u_final();
    result.tau = objective.tau();
    result.config = config;

    result.linear_w_irr = objective.evaluate(objective.ramp(RampKind::linear, {}));
    ++result.evaluations;
    const int dim = free_parameter_count(kind);
    if (dim == 0) {
        result.strategy = "linear";
        result.w_irr = result.linear_w_irr;
        return result;
    }

    LatticeSearch search(objective, kind, config, result);
    if (dim == 2) {
        if (config.strategy == SearchStrategy::exhaustive) {
            result.strategy = "exhaustive-grid";
            const auto axis = arithmetic_grid(config.lower, config.upper, config.grid_step);
            std::vector<Lattice> points;
            for (double a : axis) {
                for (double b : axis) points.push_back(search.snap(std::array{a, b}));
            }
            search.evaluate(points);
        } else {
            result.strategy = "hierarchical-grid";
            const auto axis = arithmetic_grid(config.lower, config.upper, config.coarse_step);
            std::vector<Lattice> points;
            for (double a : axis) {
                for (double b : axis) points.push_back(search.snap(std::array{a, b}));
            }
            search.evaluate(points);
            const long half = std::lround(config.coarse_step / config.grid_step);
            for (const auto& [p, w] : search.best(static_cast<std::size_t>(config.refine_candidates))) {
                std::vector<Lattice> window;
                for (long dx = -half; dx <= half; ++dx) {
                    for (long dy = -half; dy <= half; ++dy) window.push_back({p[0] + dx, p[1] + dy});
                }
                search.evaluate(window);
            }
            for (const auto& [p, w] : search.best(static_cast<std::size_t>(config.refine_candidates))) {
                search.descend(p);
            }
        }
    } else {
        if (config.strategy == SearchStrategy::exhaustive) {
            throw InvalidParameter("exhaustive search is only available for two-parameter kinds");
        }
        result.strategy = "random+simplex+grid";
        std::mt19937_64 rng(config.seed);
        std::uniform_real_distribution<double> draw(config.lower, config.upper);
        std::vector<std::vector<double>> samples(static_cast<std::size_t>(config.random_budget));
        for (auto& s : samples) {
            s.resize(static_cast<std::size_t>(dim));
            for (auto& v : s) v = draw(rng);
        }
        const auto values = parallel_map(samples.size(), [&](std::size_t i) {
            return objective(kind, samples[i]);
        });
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < values.size(); ++i) {
            ++result.evaluations;
            if (values[i]) {
                order.push_back(i);
            } else {
                ++result.infeasible;
            }
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return *values[a] < *values[b]; });
        if (order.size() > static_cast<std::size_t>(config.simplex_starts)) {
            order.resize(static_cast<std::size_t>(config.simplex_starts));
        }
        // The linear ramp is always a start as well.
        std::vector<std::vector<double>> starts{std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
        for (std::size_t i : order) starts.push_back(samples[i]);
        const auto refined = parallel_map(starts.size(), [&](std::size_t i) {
            OptimizationResult local;
            SimplexContext ctx{&objective, kind, config.lower, config.upper, &local};
            auto best = run_simplex(ctx, starts[i], config.simplex_iterations);
            return std::make_pair(best, std::make_pair(local.evaluations, local.infeasible));
        });
        for (const auto& [point, counts] : refined) {
            result.evaluations += counts.first;
            result.infeasible += counts.second;
            search.descend(search.snap(point));
        }
    }

    search.evaluate({Lattice(static_cast<std::size_t>(dim), 0)});
    const auto best = search.best(1);
    if (best.empty()) throw InvalidParameter("no feasible ramp found in the search box");
    result.params = search.values(best.front().first);
    result.w_irr = best.front().second;
    if (result.w_irr > result.linear_w_irr) {
        result.params.assign(static_cast<std::size_t>(dim), 0.0);
        result.w_irr = result.linear_w_irr;
        result.fell_back_to_linear = true;
    }
    return result;
}

StabilityReport stability_analysis(const WorkObjective& objective, const OptimizationResult& result,
                                   std::span<const double> relative_bounds, int samples,
                                   std::uint64_t seed) {
    if (samples < 2) throw InvalidParameter("stability analysis needs at least two samples");
    if (relative_bounds.size() != result.params.size()) {
        throw InvalidParameter("one relative bound per free parameter is required");
    }
    for (double b : relative_bounds) {
        if (!(b >= 0.0)) throw InvalidParameter("relative bounds must be non-negative");
    }
    StabilityReport rep;
    rep.kind = result.kind;
    rep.tau = result.tau;
    rep.bounds.assign(relative_bounds.begin(), relative_bounds.end());
    rep.samples = samples;
    rep.seed = seed;
    rep.optimum = objective.evaluate(objective.ramp(result.kind, result.params));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::vector<double>> draws;
    const long max_attempts = 100L * samples;
    for (long attempt = 0; attempt < max_attempts && static_cast<int>(draws.size()) < samples; ++attempt) {
        std::vector<double> p = result.params;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double width = relative_bounds[i] * (p[i] == 0.0 ? 0.2 : std::abs(p[i]));
            p[i] += width * unit(rng);
        }
        if (objective.ramp(result.kind, p).satisfies_reality_bound(objective.n_particles(),
                                                                   objective.tunneling())) {
            draws.push_back(std::move(p));
        } else {
            ++rep.rejected;
        }
    }
    if (draws.empty()) throw NumericalFailure("every perturbed parameter draw was infeasible");
    const auto w = parallel_map(draws.size(), [&](std::size_t i) {
        return objective.evaluate(objective.ramp(result.kind, draws[i]));
    });
    rep.accepted = static_cast<int>(w.size());
    rep.mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    double ss = 0.0;
    for (double v : w) {
        ss += (v - rep.mean) * (v - rep.mean);
        if (rep.optimum > 0.0) {
            rep.max_relative_change = std::max(rep.max_relative_change, std::abs(v - rep.optimum) / rep.optimum);
        }
    }
    rep.stddev = w.size() > 1 ? std::sqrt(ss / static_cast<double>(w.size() - 1)) : 0.0;
    rep.relative_change = rep.optimum > 0.0 ? std::abs(rep.mean - rep.optimum) / rep.optimum : 0.0;
    return rep;
}

bool Landscape::feasible(int row, int col) const { return !std::isnan(w_irr(row, col)); }

Landscape landscape_scan(const WorkObjective& objective, RampKind kind,
                         const std::vector<double>& x_grid, const std::vector<double>& y_grid) {
    if (free_parameter_count(kind) != 2) {
        throw InvalidParameter("landscape scans need a kind with two free parameters");
    }
    if (x_grid.empty() || y_grid.empty()) throw InvalidParameter("empty landscape grid");
    Landscape land;
    land.kind = kind;
    land.x = x_grid;
    land.y = y_grid;
    const std::size_t ny = y_grid.size();
    const auto values = parallel_map(x_grid.size() * ny, [&](std::size_t i) {
        return objective(kind, std::array{x_grid[i / ny], y_grid[i % ny]});
    });
    land.w_irr.resize(static_cast<Eigen::Index>(x_grid.size()), static_cast<Eigen::Index>(ny));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        const int r = static_cast<int>(i / ny);
        const int c = static_cast<int>(i % ny);
        land.w_irr(r, c) = values[i] ? *values[i] : std::numeric_limits<double>::quiet_NaN();
        if (values[i] && *values[i] < best) {
            best = *values[i];
            land.best_row = r;
            land.best_col = c;
        }
    }
    return land;
}

}  // namespace bjj
