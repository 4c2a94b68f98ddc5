#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "pomdpsr/bounds.hpp"
#include "pomdpsr/harness.hpp"
#include "pomdpsr/io.hpp"
#include "pomdpsr/pbvi.hpp"

using namespace pomdpsr;

namespace {

int solve_bounds(const std::string& model_path, const std::string& kind, const std::string& out, double tol) {
    const ModelFile f = load_model(model_path);
    SolverOptions opts;
    opts.tol = tol;
    if (kind == "blind") {
        write_text_file(out, alpha_set_to_json(blind_lower_bound(f.model, opts)).dump(2) + "\n");
    } else if (kind == "qmdp") {
        write_text_file(out, alpha_set_to_json(qmdp(f.model, opts)).dump(2) + "\n");
    } else if (kind == "fib") {
        write_text_file(out, alpha_set_to_json(fib(f.model, opts)).dump(2) + "\n");
    } else {
        write_text_file(out, alpha_set_to_json(fib_sr(f.as_pomdp_sr(), opts)).dump(2) + "\n");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planning toolkit for POMDPs with state requests"};
    app.require_subcommand(1);

    auto* sb = app.add_subcommand("solve-bounds", "Compute an offline alpha-vector bound");
    std::string sb_model, sb_kind, sb_out;
    double sb_tol = 1e-6;
    sb->add_option("--model", sb_model, "Model JSON")->required()->check(CLI::ExistingFile);
    sb->add_option("--kind", sb_kind, "Bound kind")->required()->check(CLI::IsMember({"blind", "qmdp", "fib", "fib-sr"}));
    sb->add_option("--out", sb_out, "Output alpha-set JSON")->required();
    sb->add_option("--tol", sb_tol, "Max-norm stopping tolerance");

    auto* ge = app.add_subcommand("gen-env", "Write a benchmark model as JSON");
    std::string ge_name, ge_out, ge_map, ge_legend;
    RobotDeliveryParams rd;
    TagParams tp;
    double ce_cost = 0.1;
    double discount = -1.0;
    std::optional<double> cost;
    ge->add_option("name", ge_name, "Environment")->required()->check(
        CLI::IsMember({"robot-delivery", "tag", "counterexample"}));
    ge->add_option("--n", rd.n, "RobotDelivery corridor count");
    ge->add_option("--f", rd.f, "RobotDelivery movement failure probability");
    ge->add_option("--t", rd.t, "RobotDelivery transfer probability");
    ge->add_option("--e", rd.e, "RobotDelivery no-respawn probability");
    ge->add_option("--exit-reward", rd.exit_reward, "RobotDelivery exit reward");
    ge->add_option("--discount", discount, "Discount factor");
    ge->add_option("--request-cost", cost, "State request cost");
    ge->add_option("--out", ge_out, "Output model JSON")->required();
    ge->add_option("--map", ge_map, "RobotDelivery: write the ASCII map here");
    ge->add_option("--legend", ge_legend, "RobotDelivery: write the state legend CSV here");

    auto* run = app.add_subcommand("run", "Run an experiment config");
    std::string run_config, run_out, run_trace, run_table;
    int run_jobs = 0;
    run->add_option("--config", run_config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "Per-episode results CSV")->required();
    run->add_option("--trace", run_trace, "Planner trace JSONL (first episode)");
    run->add_option("--jobs", run_jobs, "Parallel episode workers (overrides config)");
    run->add_option("--table", run_table, "Also write the summary table CSV here");

    auto* pb = app.add_subcommand("pbvi-sr", "Solve a POMDP-SR offline with point-based value iteration");
    std::string pb_model, pb_points, pb_out;
    PbviOptions pb_opts;
    int pb_rounds = 0;
    std::uint64_t pb_seed = 1;
    pb->add_option("--model", pb_model, "Model JSON with request_cost")->required()->check(CLI::ExistingFile);
    pb->add_option("--points", pb_points, "Belief points JSON")->check(CLI::ExistingFile);
    pb->add_option("--out", pb_out, "Output policy JSON")->required();
    pb->add_option("--expand", pb_rounds, "Belief expansion rounds");
    pb->add_option("--seed", pb_seed, "Seed for belief expansion");
    pb->add_option("--max-iters", pb_opts.max_iters, "Backup cap");
    pb->add_option("--tol", pb_opts.tol, "Stopping tolerance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sb) return solve_bounds(sb_model, sb_kind, sb_out, sb_tol);

        if (*ge) {
            if (ge_name == "robot-delivery") {
                if (discount > 0) rd.discount = discount;
                if (cost) rd.request_cost = *cost;
                save_model(ge_out, robot_delivery(rd).model, rd.request_cost);
                const RobotDeliveryLayout layout(rd.n);
                if (!ge_map.empty()) write_text_file(ge_map, layout.ascii_map());
                if (!ge_legend.empty()) write_text_file(ge_legend, layout.state_legend());
            } else if (ge_name == "tag") {
                if (discount > 0) tp.discount = discount;
                if (cost) tp.request_cost = *cost;
                save_model(ge_out, tag(tp), tp.request_cost);
            } else {
                if (cost) ce_cost = *cost;
                const PomdpSr p = fib_counterexample(ce_cost, discount > 0 ? discount : 0.95);
                save_model(ge_out, p.model, p.request_cost);
            }
            return 0;
        }

        if (*run) {
            ExperimentConfig cfg = ExperimentConfig::from_json(read_json_file(run_config));
            if (run_jobs > 0) cfg.jobs = run_jobs;
            const ExperimentResult r = run_experiment(cfg, TraceOptions{run_trace, 0});
            write_text_file(run_out, results_csv(r));
            Json meta = cfg.to_json();
            meta["episodes_run"] = r.episodes.size();
            write_text_file(run_out + ".meta.json", meta.dump(2) + "\n");
            if (!run_table.empty()) write_text_file(run_table, compare_csv({r}));
            std::cout << compare_table({r});
            return 0;
        }

        if (*pb) {
            const ModelFile f = load_model(pb_model);
            const PomdpSr p = f.as_pomdp_sr();
            std::vector<Belief> extra;
            if (!pb_points.empty()) extra = beliefs_from_json(read_json_file(pb_points));
            BeliefSet points(p.model.num_states(), extra);
            Rng rng(pb_seed, 4);
            for (int r = 0; r < pb_rounds; ++r) expand_belief_set(p, points, rng);
            const ValuePolicy vp = pbvi_sr_solve(p, points, pb_opts);
            Json j = alpha_set_to_json(vp.gamma_set);
            j["iterations"] = vp.iterations;
            j["residual"] = vp.residual;
            j["points"] = beliefs_to_json(points.points());
            write_text_file(pb_out, j.dump(2) + "\n");
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
