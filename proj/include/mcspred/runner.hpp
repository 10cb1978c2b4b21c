#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcspred/metrics.hpp"
#include "mcspred/parallel.hpp"
#include "mcspred/predict.hpp"
#include "mcspred/simgen.hpp"
#include "mcspred/trace_io.hpp"
#include "mcspred/types.hpp"

namespace mcspred {

struct RunConfig {
    std::optional<std::string> trace_path;  // when absent, generate `scenario`
    ScenarioConfig scenario;
    std::vector<PredictorKind> predictors = {
        PredictorKind::kVoMap, PredictorKind::kVoBrm,  PredictorKind::kFmMap,
        PredictorKind::kFmBrm, PredictorKind::kMedian, PredictorKind::kNoPrediction};
    PipelineConfig pipeline;
    int alphabet_size = 28;  // for trace files; scenarios carry their own
    std::optional<std::string> rate_table_path;
    std::string output_dir = "out";
    int jobs = 0;  // 0 = hardware concurrency
    bool prediction_log = true;

    int effective_alphabet() const {
        return trace_path ? alphabet_size : scenario.alphabet_size;
    }

    void validate() const {
        pipeline.validate();
        if (!trace_path) scenario.validate();
        if (effective_alphabet() < 2) throw DomainError("alphabet size must be >= 2");
        if (predictors.empty()) throw DomainError("at least one predictor required");
    }
};

struct PredictorSummary {
    PredictorKind kind;
    double median_p_loss = 0.0;
    double p90_p_loss = 0.0;
    double frac_r_eff_ge_90 = 0.0;
};

struct UserRun {
    std::vector<StepResult> steps;  // one per trace position
    UserMetrics metrics;            // cold first position excluded
};

struct RunResult {
    std::vector<std::string> user_ids;
    std::map<PredictorKind, std::vector<UserRun>> runs;  // per predictor, by user index
    std::vector<PredictorSummary> summary;
    std::vector<std::string> files_written;
};

namespace detail {

inline UserRun replay_user(const Trace& trace, PredictorKind kind, const Alphabet& alphabet,
                           const RateTable& rates, const PipelineConfig& pipeline) {
    UserPipeline p(kind, alphabet, rates, pipeline);
    UserRun out;
    out.steps.reserve(trace.samples.size());
    for (const TraceSample& s : trace.samples) out.steps.push_back(p.step(s.x));

    std::vector<Symbol> actual;
    std::vector<Symbol> predicted;
    actual.reserve(trace.samples.size());
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        if (out.steps[i].cold) continue;
        actual.push_back(trace.samples[i].x);
        predicted.push_back(out.steps[i].predicted);
    }
    if (!actual.empty()) out.metrics = user_metrics(actual, predicted, rates);
    return out;
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace detail

// Replays every trace through every requested predictor. Tasks run on a
// worker pool; results land in slots indexed by (predictor, user) so the
// outcome is independent of scheduling.
inline RunResult evaluate_traces(std::span<const Trace> traces, const RunConfig& config) {
    config.validate();
    if (traces.empty()) throw DomainError("no traces to evaluate");

    const Alphabet alphabet(config.effective_alphabet());
    const RateTable rates = config.rate_table_path
                                ? load_rate_table(*config.rate_table_path, alphabet.size)
                                : default_rate_table(alphabet.size);

    RunResult result;
    for (const Trace& t : traces) result.user_ids.push_back(t.user_id);
    for (PredictorKind kind : config.predictors)
        result.runs[kind].resize(traces.size());

    struct Task {
        PredictorKind kind;
        std::size_t user;
    };
    std::vector<Task> tasks;
    tasks.reserve(config.predictors.size() * traces.size());
    for (PredictorKind kind : config.predictors)
        for (std::size_t u = 0; u < traces.size(); ++u) tasks.push_back({kind, u});

    parallel_for(tasks.size(), config.jobs, [&](std::size_t i) {
        const Task& task = tasks[i];
        result.runs[task.kind][task.user] =
            detail::replay_user(traces[task.user], task.kind, alphabet, rates, config.pipeline);
    });

    for (PredictorKind kind : config.predictors) {
        std::vector<double> losses;
        std::vector<double> effs;
        for (const UserRun& run : result.runs[kind]) {
            losses.push_back(run.metrics.p_loss);
            effs.push_back(run.metrics.r_eff);
        }
        PredictorSummary s;
        s.kind = kind;
        s.median_p_loss = percentile(losses, 0.5);
        s.p90_p_loss = percentile(losses, 0.9);
        long long good = 0;
        for (double e : effs)
            if (e >= 0.9) ++good;
        s.frac_r_eff_ge_90 = double(good) / double(effs.size());
        result.summary.push_back(s);
    }
    return result;
}

namespace detail {

class OutputSet {
public:
    explicit OutputSet(std::string dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    std::ofstream open(const std::string& name) {
        const std::string path = dir_ + "/" + name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ParseError("cannot open for writing: " + path);
        written_.push_back(path);
        return out;
    }

    const std::vector<std::string>& written() const { return written_; }

    void remove_all() {
        for (const std::string& path : written_) std::filesystem::remove(path);
    }

private:
    std::string dir_;
    std::vector<std::string> written_;
};

inline void write_outputs(OutputSet& out, std::span<const Trace> traces, const RunConfig& config,
                          RunResult& result) {
    if (config.prediction_log) {
        std::ofstream log = out.open("predictions.csv");
        log << "user_id,t,actual,predicted,predictor,order_used\n";
        for (PredictorKind kind : config.predictors) {
            const auto& runs = result.runs[kind];
            for (std::size_t u = 0; u < traces.size(); ++u)
                for (std::size_t i = 0; i < traces[u].samples.size(); ++i)
                    log << traces[u].user_id << ',' << traces[u].samples[i].t << ','
                        << traces[u].samples[i].x << ',' << runs[u].steps[i].predicted << ','
                        << predictor_name(kind) << ',' << runs[u].steps[i].order_used << '\n';
        }
    }

    {
        std::ofstream metrics = out.open("metrics.csv");
        metrics << "user_id,predictor,p_loss,r_eff,packets\n";
        for (PredictorKind kind : config.predictors) {
            const auto& runs = result.runs[kind];
            for (std::size_t u = 0; u < traces.size(); ++u)
                metrics << traces[u].user_id << ',' << predictor_name(kind) << ','
                        << format_double(runs[u].metrics.p_loss) << ','
                        << format_double(runs[u].metrics.r_eff) << ',' << runs[u].metrics.packets
                        << '\n';
        }
    }

    {
        std::ofstream cdf_csv = out.open("cdf.csv");
        cdf_csv << "predictor,metric,value,cum_fraction\n";
        for (PredictorKind kind : config.predictors) {
            const auto& runs = result.runs[kind];
            std::vector<double> losses;
            std::vector<double> effs;
            for (const UserRun& run : runs) {
                losses.push_back(run.metrics.p_loss);
                effs.push_back(run.metrics.r_eff);
            }
            for (auto [value, cum] : cdf(losses))
                cdf_csv << predictor_name(kind) << ",p_loss," << format_double(value) << ','
                        << format_double(cum) << '\n';
            for (auto [value, cum] : cdf(effs))
                cdf_csv << predictor_name(kind) << ",r_eff," << format_double(value) << ','
                        << format_double(cum) << '\n';
        }
    }

    {
        std::ofstream summary = out.open("summary.csv");
        summary << "predictor,median_p_loss,p90_p_loss,frac_r_eff_ge_0.9\n";
        for (const PredictorSummary& s : result.summary)
            summary << predictor_name(s.kind) << ',' << format_double(s.median_p_loss) << ','
                    << format_double(s.p90_p_loss) << ',' << format_double(s.frac_r_eff_ge_90)
                    << '\n';
    }

    result.files_written = out.written();
}

}  // namespace detail

// Full batch harness: resolve traces, replay, write report files. On any
// failure the partially written outputs are removed before rethrowing.
inline RunResult run(const RunConfig& config) {
    config.validate();

    std::vector<Trace> traces;
    if (config.trace_path) {
        traces = load_traces(*config.trace_path, Alphabet(config.alphabet_size));
        if (traces.empty()) throw DomainError("trace file has no rows: " + *config.trace_path);
    } else {
        traces = generate_scenario(config.scenario);
    }

    RunResult result = evaluate_traces(traces, config);

    detail::OutputSet out(config.output_dir);
    try {
        detail::write_outputs(out, traces, config, result);
    } catch (...) {
        out.remove_all();
        throw;
    }
    return result;
}

}  // namespace mcspred
