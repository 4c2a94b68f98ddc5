#include "pomdpsr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <sstream>

#include "pomdpsr/bounds.hpp"
#include "pomdpsr/equivalent.hpp"
#include "pomdpsr/pbvi.hpp"

namespace pomdpsr {

namespace {

std::string fmt_num(double x, int precision = 10) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, x);
    return buf;
}

PlannerKind parse_planner(const std::string& s) {
    if (s == "aems-sr") return PlannerKind::AemsSr;
    if (s == "aems") return PlannerKind::Aems;
    if (s == "pomcp") return PlannerKind::Pomcp;
    if (s == "pbvi-sr-policy") return PlannerKind::PbviPolicy;
    throw ConfigError("unknown planner '" + s + "'");
}

UpperBoundKind parse_upper(const std::string& s) {
    if (s == "qmdp") return UpperBoundKind::Qmdp;
    if (s == "fib-sr") return UpperBoundKind::FibSr;
    throw ConfigError("unknown upper bound '" + s + "'");
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::string planner_name(PlannerKind k) {
    switch (k) {
        case PlannerKind::AemsSr: return "aems-sr";
        case PlannerKind::Aems: return "aems";
        case PlannerKind::Pomcp: return "pomcp";
        case PlannerKind::PbviPolicy: return "pbvi-sr-policy";
    }
    return "unknown";
}

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    ExperimentConfig c;
    try {
        c.environment = j.at("environment");
        if (!c.environment.is_object() || !c.environment.contains("name"))
            throw ConfigError("environment must be an object with a name");
        c.planner = parse_planner(get_or<std::string>(j, "planner", "aems-sr"));
        c.upper_bound = parse_upper(get_or<std::string>(j, "upper_bound", "fib-sr"));
        c.improve_bounds = get_or<bool>(j, "improve_bounds", false);
        if (j.contains("budget")) {
            const Json& b = j.at("budget");
            if (b.contains("expansions")) c.budget.max_expansions = b.at("expansions").get<long>();
            if (b.contains("seconds")) c.budget.seconds = b.at("seconds").get<double>();
            if (b.contains("simulations")) c.pomcp.simulations = b.at("simulations").get<long>();
            if (b.contains("seconds")) c.pomcp.seconds = b.at("seconds").get<double>();
        }
        c.epsilon = get_or<double>(j, "epsilon", 1e-3);
        c.episodes = get_or<int>(j, "episodes", 1);
        c.seed = get_or<std::uint64_t>(j, "seed", 1);
        if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (j.contains("initial_states")) c.initial_states = j.at("initial_states").get<std::vector<StateId>>();
        if (j.contains("pomcp")) {
            const Json& p = j.at("pomcp");
            if (p.contains("uct_c")) c.pomcp.uct_c = p.at("uct_c").get<double>();
            if (p.contains("rollout_depth")) c.pomcp.rollout_depth = p.at("rollout_depth").get<int>();
            c.pomcp.num_particles = get_or<int>(p, "num_particles", c.pomcp.num_particles);
            c.pomcp.simulations = get_or<long>(p, "simulations", c.pomcp.simulations);
        }
        if (j.contains("pbvi")) {
            const Json& p = j.at("pbvi");
            if (p.contains("points")) c.pbvi.points = beliefs_from_json(p.at("points"));
            c.pbvi.expansion_rounds = get_or<int>(p, "expansion_rounds", 0);
            c.pbvi.max_iters = get_or<long>(p, "max_iters", c.pbvi.max_iters);
            c.pbvi.tol = get_or<double>(p, "tol", c.pbvi.tol);
        }
        c.discount_cutoff = get_or<double>(j, "discount_cutoff", 1e-4);
        c.jobs = get_or<int>(j, "jobs", 1);
        c.label = get_or<std::string>(j, "label", "");
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed experiment config: ") + e.what());
    }
    if (c.episodes < 1) throw ConfigError("episodes must be at least 1");
    if (c.budget.max_expansions && *c.budget.max_expansions < 0) throw ConfigError("expansion budget must be >= 0");
    if (c.budget.seconds && *c.budget.seconds <= 0.0) throw ConfigError("time budget must be positive");
    if (c.epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
    if (c.jobs < 1) throw ConfigError("jobs must be at least 1");
    if (!c.seeds.empty() && static_cast<int>(c.seeds.size()) < c.episodes)
        throw ConfigError("fewer seeds than episodes");
    if (c.label.empty()) c.label = planner_name(c.planner);
    return c;
}

Json ExperimentConfig::to_json() const {
    Json j;
    j["environment"] = environment;
    j["planner"] = planner_name(planner);
    j["upper_bound"] = upper_bound == UpperBoundKind::Qmdp ? "qmdp" : "fib-sr";
    j["improve_bounds"] = improve_bounds;
    Json b = Json::object();
    if (budget.max_expansions) b["expansions"] = *budget.max_expansions;
    if (budget.seconds) b["seconds"] = *budget.seconds;
    if (planner == PlannerKind::Pomcp) b["simulations"] = pomcp.simulations;
    j["budget"] = b;
    j["epsilon"] = epsilon;
    j["episodes"] = episodes;
    j["seed"] = seed;
    if (!seeds.empty()) j["seeds"] = seeds;
    if (!initial_states.empty()) j["initial_states"] = initial_states;
    Json p;
    if (pomcp.uct_c) p["uct_c"] = *pomcp.uct_c;
    if (pomcp.rollout_depth) p["rollout_depth"] = *pomcp.rollout_depth;
    p["num_particles"] = pomcp.num_particles;
    p["simulations"] = pomcp.simulations;
    j["pomcp"] = p;
    j["discount_cutoff"] = discount_cutoff;
    j["jobs"] = jobs;
    j["label"] = label;
    return j;
}

std::uint64_t ExperimentConfig::episode_seed(int index) const {
    return seeds.empty() ? seed + static_cast<std::uint64_t>(index) : seeds[index];
}

Summary summarize(const std::vector<double>& xs) {
    Summary s;
    if (xs.empty()) return s;
    double total = 0.0;
    for (double x : xs) total += x;
    s.mean = total / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.standard_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return s;
}

namespace {

double mean_of(const std::vector<long>& xs) {
    if (xs.empty()) return 0.0;
    double t = 0.0;
    for (long x : xs) t += static_cast<double>(x);
    return t / static_cast<double>(xs.size());
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double t = 0.0;
    for (double x : xs) t += x;
    return t / static_cast<double>(xs.size());
}

}  // namespace

Summary ExperimentResult::returns() const {
    std::vector<double> xs;
    for (const auto& e : episodes) xs.push_back(e.discounted_return);
    return summarize(xs);
}

Summary ExperimentResult::expansions() const {
    std::vector<double> xs;
    for (const auto& e : episodes) xs.push_back(mean_of(e.expansions));
    return summarize(xs);
}

Summary ExperimentResult::error_reduction() const {
    std::vector<double> xs;
    for (const auto& e : episodes) xs.push_back(mean_of(e.error_reduction));
    return summarize(xs);
}

Environment make_environment(const Json& spec) {
    try {
        const std::string name = spec.at("name").get<std::string>();
        if (name == "robot-delivery") {
            RobotDeliveryParams p;
            p.n = get_or<int>(spec, "n", p.n);
            p.f = get_or<double>(spec, "f", p.f);
            p.t = get_or<double>(spec, "t", p.t);
            p.e = get_or<double>(spec, "e", p.e);
            p.discount = get_or<double>(spec, "discount", p.discount);
            p.request_cost = get_or<double>(spec, "request_cost", p.request_cost);
            p.exit_reward = get_or<double>(spec, "exit_reward", p.exit_reward);
            return robot_delivery_env(p);
        }
        if (name == "tag") {
            TagParams p;
            p.discount = get_or<double>(spec, "discount", p.discount);
            p.prey_stay_probability = get_or<double>(spec, "prey_stay_probability", p.prey_stay_probability);
            p.request_cost = get_or<double>(spec, "request_cost", p.request_cost);
            return tag_env(p);
        }
        if (name == "counterexample") {
            return fib_counterexample_env(get_or<double>(spec, "request_cost", 0.1),
                                          get_or<double>(spec, "discount", 0.95));
        }
        if (name == "model-file") {
            ModelFile f = load_model(spec.at("path").get<std::string>());
            if (spec.contains("request_cost")) f.request_cost = spec.at("request_cost").get<double>();
            const int ns = f.model.num_states();
            std::vector<Belief::Entry> all;
            if (spec.contains("initial_belief")) {
                for (const auto& e : spec.at("initial_belief")) all.emplace_back(e.at(0).get<int>(), e.at(1).get<double>());
            } else {
                for (StateId s = 0; s < ns; ++s) {
                    if (!f.model.is_terminal(s)) all.emplace_back(s, 1.0);
                }
            }
            return Environment{"model-file", f.as_pomdp_sr(), Belief(all), {}, {}};
        }
        throw ConfigError("unknown environment '" + name + "'");
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed environment spec: ") + e.what());
    }
}

namespace {

struct Shared {
    const ExperimentConfig* config;
    const Environment* env;
    std::unique_ptr<AlphaVectorSet> lower;
    std::unique_ptr<AlphaVectorSet> upper;
    std::unique_ptr<ValuePolicy> policy;
    std::unique_ptr<EquivalentPomdp> equivalent;
};

EpisodeResult run_episode(const Shared& sh, int index, std::ostream* trace) {
    const ExperimentConfig& cfg = *sh.config;
    const PomdpSr& p = sh.env->problem;
    const PomdpModel& m = p.model;
    EpisodeResult res;
    res.seed = cfg.episode_seed(index);
    Rng init_rng(res.seed, 1);
    Rng env_rng(res.seed, 2);
    Rng plan_rng(res.seed, 3);

    StateId s = cfg.initial_states.empty()
                    ? sample_state(sh.env->initial_state_distribution, init_rng)
                    : cfg.initial_states[static_cast<std::size_t>(index) % cfg.initial_states.size()];
    res.initial_state = s;
    Belief b = sh.env->initial_belief(s);

    std::unique_ptr<AlphaVectorSet> lower;
    std::unique_ptr<AlphaVectorSet> upper;
    std::unique_ptr<AnytimePlanner> planner;
    if (cfg.planner == PlannerKind::AemsSr || cfg.planner == PlannerKind::Aems) {
        lower = std::make_unique<AlphaVectorSet>(*sh.lower);
        upper = std::make_unique<AlphaVectorSet>(*sh.upper);
        PlannerOptions opts;
        opts.budget = cfg.budget;
        opts.epsilon = cfg.epsilon;
        planner = std::make_unique<AnytimePlanner>(
            p, cfg.planner == PlannerKind::AemsSr ? Heuristic::GraphPsi : Heuristic::TreePath, opts);
    }
    ParticleFilter particles;
    PomcpConfig pomcp_cfg;
    if (cfg.planner == PlannerKind::Pomcp) {
        pomcp_cfg = resolve_pomcp_config(*sh.equivalent, cfg.pomcp);
        particles = ParticleFilter::from_belief(b, pomcp_cfg.num_particles, plan_rng);
    }

    double discount = 1.0;
    for (int step = 0; discount >= cfg.discount_cutoff; ++step) {
        Decision d;
        long ne = 0;
        double er = 0.0;
        switch (cfg.planner) {
            case PlannerKind::AemsSr:
            case PlannerKind::Aems: {
                TraceSink sink;
                if (trace) {
                    sink = [&](const TraceRecord& r) {
                        Json rec;
                        rec["episode"] = index;
                        rec["step"] = step;
                        rec["iteration"] = r.iteration;
                        if (r.origin == kRootOrigin)
                            rec["origin"] = "ROOT";
                        else
                            rec["origin"] = r.origin;
                        rec["score"] = r.score;
                        rec["root_upper"] = r.root_upper;
                        rec["root_lower"] = r.root_lower;
                        rec["node_count"] = r.node_count;
                        *trace << rec.dump() << '\n';
                    };
                }
                d = planner->plan(*lower, *upper, b, sink);
                ne = d.stats.expansions;
                const double gap = evaluate(*sh.upper, b) - evaluate(*sh.lower, b);
                er = gap > 0.0 ? 1.0 - d.stats.root_gap() / gap : 0.0;
                if (cfg.improve_bounds && planner->graph()) {
                    const SearchGraph& g = *planner->graph();
                    auto cu = g.corner_values(BoundKind::Upper);
                    auto cl = g.corner_values(BoundKind::Lower);
                    *upper = improve_from_graph(*upper, cu);
                    *lower = improve_from_graph(*lower, cl);
                }
                break;
            }
            case PlannerKind::PbviPolicy:
                d = execute_policy(*sh.policy, b);
                break;
            case PlannerKind::Pomcp: {
                const EquivalentPomdp& eq = *sh.equivalent;
                const PomcpResult r0 = pomcp_plan_step(eq, particles.particles(), pomcp_cfg, plan_rng);
                d.request = r0.action == eq.request_action();
                std::vector<StateId> phase1;
                if (d.request) {
                    phase1.assign(1, eq.action_state(s));
                } else {
                    for (StateId x : particles.particles()) phase1.push_back(eq.action_state(x));
                }
                const PomcpResult r1 = pomcp_plan_step(eq, phase1, pomcp_cfg, plan_rng);
                d.action = r1.action;
                if (d.request) d.action_by_state.emplace_back(s, r1.action);
                ne = r0.simulations + r1.simulations;
                particles = ParticleFilter(std::move(phase1));
                break;
            }
        }

        const StepOutcome out = simulate(*sh.env, s, d, env_rng);
        res.discounted_return += discount * out.reward;
        res.expansions.push_back(ne);
        res.error_reduction.push_back(er);
        res.requests += d.request ? 1 : 0;
        ++res.steps;
        if (out.done) {
            res.terminated = true;
            break;
        }
        const Belief acting = d.request ? corner_belief(s) : b;
        b = belief_update(m, acting, out.action, out.observation);
        if (cfg.planner == PlannerKind::Pomcp) {
            try {
                particles.update(sh.equivalent->model(), out.action, out.observation, pomcp_cfg.num_particles,
                                 plan_rng);
            } catch (const ParticleDepletion&) {
                particles = ParticleFilter::from_belief(b, pomcp_cfg.num_particles, plan_rng);
            }
        }
        s = out.next_state;
        discount *= m.discount();
    }
    return res;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const TraceOptions& trace) {
    const Environment env = make_environment(config.environment);
    Shared sh;
    sh.config = &config;
    sh.env = &env;
    const PomdpSr& p = env.problem;
    if (config.planner == PlannerKind::AemsSr || config.planner == PlannerKind::Aems) {
        sh.lower = std::make_unique<AlphaVectorSet>(blind_lower_bound(p.model));
        sh.upper = std::make_unique<AlphaVectorSet>(config.upper_bound == UpperBoundKind::Qmdp
                                                        ? with_request_vector(qmdp(p.model), p.request_cost)
                                                        : fib_sr(p));
    } else if (config.planner == PlannerKind::PbviPolicy) {
        BeliefSet points(p.model.num_states(), config.pbvi.points);
        Rng rng(config.seed, 4);
        for (int r = 0; r < config.pbvi.expansion_rounds; ++r) expand_belief_set(p, points, rng);
        PbviOptions opts;
        opts.max_iters = config.pbvi.max_iters;
        opts.tol = config.pbvi.tol;
        sh.policy = std::make_unique<ValuePolicy>(pbvi_sr_solve(p, points, opts));
    } else {
        sh.equivalent = std::make_unique<EquivalentPomdp>(to_equivalent_pomdp(p));
    }

    std::unique_ptr<std::ofstream> trace_out;
    if (!trace.path.empty()) {
        trace_out = std::make_unique<std::ofstream>(trace.path, std::ios::binary);
        if (!*trace_out) throw ConfigError("cannot write " + trace.path);
    }

    ExperimentResult result;
    result.label = config.label;
    result.config = config;
    result.episodes.resize(config.episodes);
    std::vector<std::exception_ptr> errors(config.episodes);
#pragma omp parallel for schedule(dynamic) num_threads(config.jobs)
    for (int i = 0; i < config.episodes; ++i) {
        try {
            std::ostream* t = (trace_out && i == trace.episode) ? trace_out.get() : nullptr;
            result.episodes[i] = run_episode(sh, i, t);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::stable_sort(result.episodes.begin(), result.episodes.end(),
                     [](const EpisodeResult& a, const EpisodeResult& b) { return a.seed < b.seed; });
    return result;
}

std::string results_csv(const ExperimentResult& r) {
    std::ostringstream out;
    out << "seed,initial_state,return,steps,requests,mean_ne,mean_er,terminated\n";
    for (const auto& e : r.episodes) {
        out << e.seed << ',' << e.initial_state << ',' << fmt_num(e.discounted_return) << ',' << e.steps << ','
            << e.requests << ',' << fmt_num(mean_of(e.expansions), 4) << ',' << fmt_num(mean_of(e.error_reduction))
            << ',' << (e.terminated ? 1 : 0) << '\n';
    }
    return out.str();
}

namespace {

std::size_t best_return_index(const std::vector<ExperimentResult>& results) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i) {
        if (results[i].returns().mean > results[best].returns().mean) best = i;
    }
    return best;
}

std::string pm(const Summary& s, int precision) { return fmt_num(s.mean, precision) + " +- " + fmt_num(s.standard_error, precision); }

}  // namespace

std::string compare_table(const std::vector<ExperimentResult>& results) {
    std::vector<std::array<std::string, 4>> rows;
    rows.push_back({"Planner", "Return", "NE", "ER"});
    const std::size_t best = results.empty() ? 0 : best_return_index(results);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        rows.push_back({r.label + (i == best ? " *" : ""), pm(r.returns(), 2), fmt_num(r.expansions().mean, 0),
                        pm(r.error_reduction(), 2)});
    }
    std::array<std::size_t, 4> width{};
    for (const auto& row : rows)
        for (std::size_t c = 0; c < 4; ++c) width[c] = std::max(width[c], row[c].size());
    std::ostringstream out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < 4; ++c) {
            out << row[c] << std::string(width[c] - row[c].size(), ' ');
            out << (c + 1 < 4 ? "  " : "\n");
        }
    }
    return out.str();
}

std::string compare_csv(const std::vector<ExperimentResult>& results) {
    std::ostringstream out;
    out << "planner,return_mean,return_se,ne_mean,er_mean,er_se,episodes,best\n";
    const std::size_t best = results.empty() ? 0 : best_return_index(results);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        out << r.label << ',' << fmt_num(r.returns().mean, 6) << ',' << fmt_num(r.returns().standard_error, 6) << ','
            << fmt_num(r.expansions().mean, 2) << ',' << fmt_num(r.error_reduction().mean, 6) << ','
            << fmt_num(r.error_reduction().standard_error, 6) << ',' << r.episodes.size() << ','
            << (i == best ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace pomdpsr
