// mcspred: batch harness for discrete MCS-sequence prediction.
//
// Subcommands:
//   simulate  generate synthetic full/partial-loading traces
//   run       replay traces through the predictors and write reports
//   inspect   per-user diagnostics (tree, predictive information, criteria)
//
// Exit codes: 0 success, 2 configuration error, 3 input data error.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcspred/blend.hpp"
#include "mcspred/complexity.hpp"
#include "mcspred/freq_tree.hpp"
#include "mcspred/metrics.hpp"
#include "mcspred/order_select.hpp"
#include "mcspred/predict.hpp"
#include "mcspred/runner.hpp"
#include "mcspred/simgen.hpp"
#include "mcspred/trace_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct ScenarioFlags {
    std::string loading = "partial";
    int users = 210;
    int seq_len = 1000;
    double rho = 0.9;
    int interferers = 8;
    double holding = 10.0;
    int alphabet = 28;
    std::uint64_t seed = 1;

    void add_options(CLI::App& cmd) {
        cmd.add_option("--loading", loading, "Loading mode: full or partial")
            ->check(CLI::IsMember({"full", "partial"}))
            ->capture_default_str();
        cmd.add_option("--users", users, "Number of users")->capture_default_str();
        cmd.add_option("--seq-len", seq_len, "Sequence length per user")->capture_default_str();
        cmd.add_option("--rho", rho, "Fading correlation per feedback step")
            ->capture_default_str();
        cmd.add_option("--interferers", interferers, "Interferer count")->capture_default_str();
        cmd.add_option("--holding", holding, "Mean interferer on/off holding time, steps")
            ->capture_default_str();
        cmd.add_option("--alphabet", alphabet, "Alphabet size p")->capture_default_str();
        cmd.add_option("--seed", seed, "Master seed")->capture_default_str();
    }

    mcspred::ScenarioConfig to_config() const {
        mcspred::ScenarioConfig cfg;
        cfg.loading = loading == "full" ? mcspred::Loading::kFull : mcspred::Loading::kPartial;
        cfg.users = users;
        cfg.seq_len = seq_len;
        cfg.rho = rho;
        cfg.interferers = interferers;
        cfg.mean_holding_steps = holding;
        cfg.alphabet_size = alphabet;
        cfg.seed = seed;
        return cfg;
    }
};

struct PipelineFlags {
    int depth = 5;
    int max_order = 4;
    double epsilon = 0.05;
    std::string criterion = "aicc";
    int recompute = 100;
    int bootstrap = 100;
    int median_window = 9;

    void add_options(CLI::App& cmd) {
        cmd.add_option("--depth", depth, "Frequency-tree depth m")->capture_default_str();
        cmd.add_option("--max-order", max_order, "Largest candidate order K")
            ->capture_default_str();
        cmd.add_option("--epsilon", epsilon, "Learning-curve stopping threshold, bits")
            ->capture_default_str();
        cmd.add_option("--criterion", criterion, "Order-selection criterion")
            ->check(CLI::IsMember({"mdl", "aic", "aicc"}))
            ->capture_default_str();
        cmd.add_option("--recompute", recompute, "Order re-selection period")
            ->capture_default_str();
        cmd.add_option("--bootstrap", bootstrap, "Symbols before the first re-selection")
            ->capture_default_str();
        cmd.add_option("--median-window", median_window, "Median baseline window")
            ->capture_default_str();
    }

    mcspred::PipelineConfig to_config() const {
        mcspred::PipelineConfig cfg;
        cfg.tree_depth = depth;
        cfg.max_order = max_order;
        cfg.epsilon = epsilon;
        cfg.criterion = criterion == "mdl"   ? mcspred::Criterion::kMdl
                        : criterion == "aic" ? mcspred::Criterion::kAic
                                             : mcspred::Criterion::kAicc;
        cfg.recompute_period = recompute;
        cfg.bootstrap_len = bootstrap;
        cfg.median_window = median_window;
        return cfg;
    }
};

std::vector<mcspred::PredictorKind> parse_predictors(const std::vector<std::string>& names) {
    std::vector<mcspred::PredictorKind> kinds;
    for (const std::string& name : names) {
        mcspred::PredictorKind kind;
        if (!mcspred::parse_predictor(name, kind))
            throw mcspred::DomainError("unknown predictor: " + name);
        kinds.push_back(kind);
    }
    return kinds;
}

std::string resolve_output_dir(const std::string& flag_value, bool flag_given) {
    if (flag_given) return flag_value;
    if (const char* env = std::getenv("MCSPRED_OUT")) return env;
    return flag_value;
}

int cmd_simulate(const ScenarioFlags& flags, const std::string& out_path) {
    mcspred::ScenarioConfig cfg = flags.to_config();
    try {
        cfg.validate();
    } catch (const mcspred::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    try {
        const std::vector<mcspred::Trace> traces = mcspred::generate_scenario(cfg);
        mcspred::save_traces(out_path, traces);
        std::cout << "wrote " << traces.size() << " traces to " << out_path << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}

int cmd_run(mcspred::RunConfig config) {
    try {
        config.validate();
    } catch (const mcspred::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    try {
        const mcspred::RunResult result = mcspred::run(config);
        std::printf("%-14s %14s %14s %18s\n", "predictor", "median p_loss", "p90 p_loss",
                    "frac r_eff >= 0.9");
        for (const mcspred::PredictorSummary& s : result.summary)
            std::printf("%-14s %14.4f %14.4f %18.4f\n", mcspred::predictor_name(s.kind),
                        s.median_p_loss, s.p90_p_loss, s.frac_r_eff_ge_90);
        for (const std::string& f : result.files_written) std::cout << "wrote " << f << '\n';
    } catch (const mcspred::ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitData;
    } catch (const mcspred::DomainError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}

int cmd_inspect(const std::string& trace_path, const std::string& user_id, long long upto,
                bool use_alz, const PipelineFlags& pipeline_flags, int alphabet_size) {
    mcspred::PipelineConfig pipeline = pipeline_flags.to_config();
    try {
        pipeline.validate();
        if (alphabet_size < 2) throw mcspred::DomainError("alphabet size must be >= 2");
    } catch (const mcspred::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const mcspred::Alphabet alphabet(alphabet_size);
        const std::vector<mcspred::Trace> traces = mcspred::load_traces(trace_path, alphabet);
        const mcspred::Trace* trace = nullptr;
        for (const mcspred::Trace& t : traces)
            if (t.user_id == user_id) trace = &t;
        if (trace == nullptr) throw mcspred::DomainError("unknown user: " + user_id);

        const std::vector<mcspred::Symbol> symbols = trace->symbols();
        const std::size_t n = std::min<std::size_t>(
            symbols.size(), upto > 0 ? static_cast<std::size_t>(upto) : symbols.size());

        mcspred::FrequencyTree tree(use_alz ? 0 : pipeline.tree_depth);
        mcspred::ActiveLezi alz;
        mcspred::PredictiveInfoEstimate estimate(pipeline.max_order, alphabet.size);
        std::vector<mcspred::Symbol> history;
        int current_order = 1;
        int k_bound = 1;
        for (std::size_t i = 0; i < n; ++i) {
            history.push_back(symbols[i]);
            if (use_alz)
                alz.ingest(tree, symbols[i]);
            else
                mcspred::ppm_ingest(tree, history);
            mcspred::ipred_update(estimate, tree, history);
            const long long count = static_cast<long long>(history.size());
            if (count >= pipeline.bootstrap_len && count % pipeline.recompute_period == 0) {
                k_bound = mcspred::k_opt(estimate, pipeline.epsilon);
                current_order = mcspred::select_order(history, tree, k_bound, pipeline.criterion,
                                                      pipeline.loglik_span);
            }
        }

        std::cout << "user " << user_id << " at position " << n << " of " << symbols.size()
                  << "\n\n";
        std::cout << "tree (depth,symbol,count):\n" << tree.dump() << '\n';

        if (estimate.n_used > 0) {
            std::cout << "predictive information (bits, " << estimate.n_used << " samples):\n";
            const std::vector<double> curve = mcspred::learning_curve(estimate);
            for (int k = 1; k <= estimate.max_order; ++k)
                std::printf("  k=%d  Ipred=%.6f  L=%.6f\n", k,
                            estimate.mean_bits[static_cast<std::size_t>(k - 1)],
                            curve[static_cast<std::size_t>(k - 1)]);
            std::cout << "  k_opt bound: " << k_bound << "\n\n";
        } else {
            std::cout << "predictive information: not enough samples\n\n";
        }

        if (history.size() > 1) {
            try {
                const mcspred::CriterionReport report =
                    mcspred::order_report(tree, history, k_bound, pipeline.loglik_span);
                std::cout << "criteria (user_id,i,loglik,n_params,mdl,aic,aicc):\n";
                for (const mcspred::CriterionRow& row : report.rows)
                    std::printf("  %s,%d,%.6f,%lld,%.6f,%.6f,%.6f\n", user_id.c_str(), row.order,
                                row.loglik, row.n_params, row.mdl, row.aic, row.aicc);
                std::printf("  chosen: mdl=%d aic=%d aicc=%d\n", report.chosen_mdl,
                            report.chosen_aic, report.chosen_aicc);
            } catch (const mcspred::DomainError&) {
                std::cout << "criteria: sequence too short\n";
            }
        } else {
            std::cout << "criteria: sequence too short\n";
        }
        std::cout << "current selected order: " << current_order << '\n';
    } catch (const mcspred::ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitData;
    } catch (const mcspred::DomainError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete MCS-sequence prediction harness"};
    app.require_subcommand(1);

    // simulate
    CLI::App* sim = app.add_subcommand("simulate", "Generate synthetic traces");
    ScenarioFlags sim_scenario;
    sim_scenario.add_options(*sim);
    std::string sim_out = "traces.csv";
    sim->add_option("--out", sim_out, "Output trace CSV")->capture_default_str();
    sim->set_config("--config");

    // run
    CLI::App* run_cmd = app.add_subcommand("run", "Replay traces through the predictors");
    ScenarioFlags run_scenario;
    run_scenario.add_options(*run_cmd);
    PipelineFlags run_pipeline;
    run_pipeline.add_options(*run_cmd);
    std::string trace_path;
    run_cmd->add_option("--trace", trace_path, "Trace CSV (omit to generate a scenario)");
    std::vector<std::string> predictor_names = {"vo_map", "vo_brm",  "fm_map",
                                                "fm_brm", "median", "no_prediction"};
    run_cmd->add_option("--predictors", predictor_names, "Predictors to evaluate")
        ->delimiter(',')
        ->capture_default_str();
    std::string rate_path;
    run_cmd->add_option("--rates", rate_path, "Rate-table override CSV");
    std::string out_dir = "out";
    CLI::Option* out_opt =
        run_cmd->add_option("--out", out_dir, "Output directory (or env MCSPRED_OUT)")
            ->capture_default_str();
    int jobs = 0;
    run_cmd->add_option("--jobs", jobs, "Worker threads, 0 = all cores")->capture_default_str();
    bool no_log = false;
    run_cmd->add_flag("--no-prediction-log", no_log, "Skip the per-step prediction log");
    run_cmd->set_config("--config");

    // inspect
    CLI::App* ins = app.add_subcommand("inspect", "Per-user diagnostics at a position");
    std::string ins_trace;
    ins->add_option("--trace", ins_trace, "Trace CSV")->required();
    std::string ins_user;
    ins->add_option("--user", ins_user, "User id")->required();
    long long ins_upto = 0;
    ins->add_option("--upto", ins_upto, "Position (prefix length), 0 = whole trace")
        ->capture_default_str();
    bool ins_alz = false;
    ins->add_flag("--alz", ins_alz, "Build the tree with the variable-depth parser");
    PipelineFlags ins_pipeline;
    ins_pipeline.add_options(*ins);
    int ins_alphabet = 28;
    ins->add_option("--alphabet", ins_alphabet, "Alphabet size p")->capture_default_str();
    ins->set_config("--config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (sim->parsed()) return cmd_simulate(sim_scenario, sim_out);

    if (run_cmd->parsed()) {
        mcspred::RunConfig config;
        if (!trace_path.empty()) config.trace_path = trace_path;
        config.scenario = run_scenario.to_config();
        config.alphabet_size = run_scenario.alphabet;
        config.pipeline = run_pipeline.to_config();
        try {
            config.predictors = parse_predictors(predictor_names);
        } catch (const mcspred::DomainError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        if (!rate_path.empty()) config.rate_table_path = rate_path;
        config.output_dir = resolve_output_dir(out_dir, out_opt->count() > 0);
        config.jobs = jobs;
        config.prediction_log = !no_log;
        return cmd_run(std::move(config));
    }

    return cmd_inspect(ins_trace, ins_user, ins_upto, ins_alz, ins_pipeline, ins_alphabet);
}
