#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcspred/parallel.hpp"
#include "mcspred/types.hpp"

namespace mcspred {

// Synthetic per-user MCS sequences. The two causes of feedback churn are
// modelled directly: desired and interferer gains drift as first-order
// autoregressive complex processes (Doppler), and under partial loading each
// interferer toggles on and off with geometric holding times (traffic churn).
// SINR is quantized against a strictly increasing dB threshold ladder.
//
// Each link carries several independent gain branches whose powers average
// into the link power, standing in for the receive and best-subband
// frequency diversity behind a wideband rate feedback. More branches mean
// less residual fading variance around the slow drift.

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view user_id) {
    std::uint64_t state = master ^ fnv1a(user_id);
    splitmix64(state);
    return splitmix64(state);
}

}  // namespace rng

// Deterministic stream with explicit transforms (no library distributions,
// which vary between standard library implementations).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // [0, 1)
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {  // Box-Muller, one value per pair of uniforms
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::complex<double> complex_gaussian() {  // CN(0, 1)
        return {gaussian() / std::sqrt(2.0), gaussian() / std::sqrt(2.0)};
    }

    bool bernoulli(double p) { return uniform() < p; }

    int uniform_int(int n) {  // 0..n-1
        return std::min(n - 1, static_cast<int>(uniform() * double(n)));
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

enum class Loading { kFull, kPartial };

inline const char* loading_name(Loading l) {
    return l == Loading::kFull ? "full" : "partial";
}

struct ScenarioConfig {
    Loading loading = Loading::kPartial;
    int users = 210;
    int seq_len = 1000;
    double rho = 0.9;                 // AR(1) correlation per feedback step
    int interferers = 8;
    int diversity_branches = 256;      // gain branches averaged per link
    double mean_holding_steps = 10.0;  // ~50 ms of on/off dwell at 5 ms feedback
    double holding_spread = 4.0;       // per-interferer holding factor, log-uniform
    int alphabet_size = 28;
    std::vector<double> thresholds_db;  // empty -> uniform ladder below
    double threshold_low_db = -6.0;
    double threshold_high_db = 20.0;
    double noise_power = 0.02;
    // Per-user link geometry, drawn once per user (dB relative to unit gain).
    // The wide desired-power spread puts some users at the ladder edges where
    // they visit only a handful of MCS levels.
    double desired_db_min = -4.0;
    double desired_db_max = 26.0;
    double interferer_db_min = -26.0;
    double interferer_db_max = 4.0;
    std::uint64_t seed = 1;

    std::vector<double> thresholds() const {
        if (!thresholds_db.empty()) return thresholds_db;
        std::vector<double> t(static_cast<std::size_t>(alphabet_size - 1));
        for (std::size_t j = 0; j < t.size(); ++j)
            t[j] = threshold_low_db +
                   (threshold_high_db - threshold_low_db) * double(j) / double(t.size() - 1);
        return t;
    }

    void validate() const {
        if (users < 1) throw DomainError("scenario needs at least one user");
        if (seq_len < 1) throw DomainError("scenario needs seq_len >= 1");
        if (!(rho > 0.0 && rho < 1.0)) throw DomainError("rho must lie in (0, 1)");
        if (interferers < 1) throw DomainError("scenario needs at least one interferer");
        if (diversity_branches < 1) throw DomainError("scenario needs at least one branch");
        if (mean_holding_steps < 1.0) throw DomainError("mean holding time must be >= 1 step");
        if (holding_spread < 1.0) throw DomainError("holding spread must be >= 1");
        if (alphabet_size < 2) throw DomainError("alphabet size must be >= 2");
        const std::vector<double> t = thresholds();
        if (t.size() != static_cast<std::size_t>(alphabet_size - 1))
            throw DomainError("need exactly alphabet_size - 1 thresholds");
        for (std::size_t j = 1; j < t.size(); ++j)
            if (t[j] <= t[j - 1]) throw DomainError("thresholds must be strictly increasing");
        if (noise_power <= 0.0) throw DomainError("noise power must be positive");
    }
};

inline Symbol quantize_sinr_db(double sinr_db, std::span<const double> thresholds) {
    return static_cast<Symbol>(
        std::upper_bound(thresholds.begin(), thresholds.end(), sinr_db) - thresholds.begin());
}

namespace detail {

// One link: a bank of AR(1) complex branches; link power is their average
// squared magnitude (unit mean).
class FadingLink {
public:
    FadingLink(Rng& rng, int branches) : branches_(static_cast<std::size_t>(branches)) {
        for (auto& h : branches_) h = rng.complex_gaussian();
    }

    void evolve(Rng& rng, double rho, double innovation) {
        for (auto& h : branches_) h = rho * h + innovation * rng.complex_gaussian();
    }

    double power() const {
        double sum = 0.0;
        for (const auto& h : branches_) sum += std::norm(h);
        return sum / double(branches_.size());
    }

private:
    std::vector<std::complex<double>> branches_;
};

inline Trace generate_user(const ScenarioConfig& cfg, std::span<const double> thresholds,
                           const std::string& user_id) {
    Rng rng(rng::derive_seed(cfg.seed, user_id));

    const double desired_power =
        std::pow(10.0, (cfg.desired_db_min +
                        (cfg.desired_db_max - cfg.desired_db_min) * rng.uniform()) /
                           10.0);
    std::vector<double> interferer_power(static_cast<std::size_t>(cfg.interferers));
    for (double& g : interferer_power)
        g = std::pow(10.0, (cfg.interferer_db_min +
                            (cfg.interferer_db_max - cfg.interferer_db_min) * rng.uniform()) /
                               10.0);

    // per-interferer on/off time scales spread around the configured mean,
    // so one user sees fast flicker and slow blocks at once
    std::vector<double> toggle_prob(static_cast<std::size_t>(cfg.interferers));
    for (double& p : toggle_prob) {
        const double factor = std::pow(cfg.holding_spread, 2.0 * rng.uniform() - 1.0);
        p = std::min(1.0, 1.0 / (cfg.mean_holding_steps * factor));
    }

    FadingLink desired(rng, cfg.diversity_branches);
    std::vector<FadingLink> interferer_links;
    interferer_links.reserve(static_cast<std::size_t>(cfg.interferers));
    for (int i = 0; i < cfg.interferers; ++i)
        interferer_links.emplace_back(rng, cfg.diversity_branches);

    std::vector<bool> active(static_cast<std::size_t>(cfg.interferers), true);
    if (cfg.loading == Loading::kPartial)
        for (std::size_t i = 0; i < active.size(); ++i) active[i] = rng.bernoulli(0.5);

    const double innovation = std::sqrt(1.0 - cfg.rho * cfg.rho);

    Trace trace;
    trace.user_id = user_id;
    trace.samples.reserve(static_cast<std::size_t>(cfg.seq_len));
    for (int t = 0; t < cfg.seq_len; ++t) {
        if (t > 0) {
            desired.evolve(rng, cfg.rho, innovation);
            for (FadingLink& link : interferer_links) link.evolve(rng, cfg.rho, innovation);
            if (cfg.loading == Loading::kPartial)
                for (std::size_t i = 0; i < active.size(); ++i)
                    if (rng.bernoulli(toggle_prob[i])) active[i] = !active[i];
        }
        double interference = 0.0;
        for (std::size_t i = 0; i < active.size(); ++i)
            if (active[i]) interference += interferer_power[i] * interferer_links[i].power();
        const double sinr = desired_power * desired.power() /
                            (cfg.noise_power + interference);
        const double sinr_db = 10.0 * std::log10(sinr);
        trace.samples.push_back({t, quantize_sinr_db(sinr_db, thresholds)});
    }
    return trace;
}

}  // namespace detail

// Every user draws from an independent stream seeded from (master seed,
// user id), so traces are reproducible one user at a time and generation
// parallelizes across users without affecting the result.
inline std::vector<Trace> generate_scenario(const ScenarioConfig& cfg, int jobs = 0) {
    cfg.validate();
    const std::vector<double> thresholds = cfg.thresholds();
    std::vector<Trace> traces(static_cast<std::size_t>(cfg.users));
    parallel_for(traces.size(), jobs, [&](std::size_t u) {
        std::string id = "u" + std::to_string(u);
        if (u < 100) id = "u" + std::string(u < 10 ? "00" : "0") + std::to_string(u);
        traces[u] = detail::generate_user(cfg, thresholds, id);
    });
    return traces;
}

// Exact Markov source for oracle tests. `transition` is row-major with one
// row per context (m^order rows, contexts indexed with the most recent
// symbol varying fastest).
struct MarkovSourceConfig {
    int alphabet_size = 4;
    int order = 1;
    std::vector<double> transition;
    int length = 1000;
    std::uint64_t seed = 1;
    std::string user_id = "markov";

    std::size_t rows() const {
        std::size_t r = 1;
        for (int j = 0; j < order; ++j) r *= static_cast<std::size_t>(alphabet_size);
        return r;
    }

    void validate() const {
        if (alphabet_size < 2) throw DomainError("markov source needs m >= 2");
        if (order < 1) throw DomainError("markov source needs order >= 1");
        if (length < 1) throw DomainError("markov source needs length >= 1");
        if (transition.size() != rows() * static_cast<std::size_t>(alphabet_size))
            throw DomainError("transition matrix has the wrong shape");
        for (std::size_t r = 0; r < rows(); ++r) {
            double sum = 0.0;
            for (int s = 0; s < alphabet_size; ++s) {
                const double p = transition[r * static_cast<std::size_t>(alphabet_size) +
                                            static_cast<std::size_t>(s)];
                if (p < 0.0) throw DomainError("transition probabilities must be nonnegative");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw DomainError("transition row " + std::to_string(r) + " sums to " +
                                  std::to_string(sum));
        }
    }
};

inline Trace generate_markov(const MarkovSourceConfig& cfg) {
    cfg.validate();
    Rng rng(rng::derive_seed(cfg.seed, cfg.user_id));

    Trace trace;
    trace.user_id = cfg.user_id;
    trace.samples.reserve(static_cast<std::size_t>(cfg.length));

    std::vector<Symbol> context;
    for (int t = 0; t < cfg.length; ++t) {
        Symbol x;
        if (static_cast<int>(context.size()) < cfg.order) {
            x = rng.uniform_int(cfg.alphabet_size);
        } else {
            std::size_t row = 0;
            for (Symbol s : context) row = row * static_cast<std::size_t>(cfg.alphabet_size) +
                                           static_cast<std::size_t>(s);
            const double* probs = &cfg.transition[row * static_cast<std::size_t>(cfg.alphabet_size)];
            const double u = rng.uniform();
            double cum = 0.0;
            x = cfg.alphabet_size - 1;
            for (int s = 0; s < cfg.alphabet_size; ++s) {
                cum += probs[s];
                if (u < cum) {
                    x = s;
                    break;
                }
            }
        }
        trace.samples.push_back({t, x});
        context.push_back(x);
        if (static_cast<int>(context.size()) > cfg.order) context.erase(context.begin());
    }
    return trace;
}

}  // namespace mcspred
