#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mcspred/predict.hpp"
#include "mcspred/simgen.hpp"
#include "test_util.hpp"

using namespace mcspred;
using testutil::RawNgramModel;

namespace {

RateTable linear_rates(int p) {
    std::vector<double> r(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) r[static_cast<std::size_t>(i)] = double(i + 1);
    return RateTable(std::move(r));
}

}  // namespace

TEST_CASE("MAP decision rule", "[predict]") {
    SECTION("picks the mode") {
        const std::vector<double> probs = {0.3, 0.3, 0.4};
        CHECK(map_decision(probs) == 2);
    }
    SECTION("degenerate distribution") {
        std::vector<double> probs(28, 0.0);
        probs[17] = 1.0;
        CHECK(map_decision(probs) == 17);
    }
    SECTION("exact tie goes to the lower symbol") {
        std::vector<double> probs(10, 0.0);
        probs[4] = 0.5;
        probs[9] = 0.5;
        CHECK(map_decision(probs) == 4);
    }
}

TEST_CASE("BRM decision rule", "[predict]") {
    SECTION("hand-enumerated costs") {
        // rates (1,2,3), probabilities (0.3,0.3,0.4):
        //   C_0 = 0*0.3 + 1*0.3 + 2*0.4 = 1.1
        //   C_1 = 1*0.3 + 0*0.3 + 1*0.4 = 0.7
        //   C_2 = 1*0.3 + 2*0.3 + 0*0.4 = 0.9
        const RateTable rates = linear_rates(3);
        const std::vector<double> probs = {0.3, 0.3, 0.4};
        CHECK(brm_expected_cost(probs, rates, 0) == Catch::Approx(1.1).epsilon(1e-12));
        CHECK(brm_expected_cost(probs, rates, 1) == Catch::Approx(0.7).epsilon(1e-12));
        CHECK(brm_expected_cost(probs, rates, 2) == Catch::Approx(0.9).epsilon(1e-12));
        CHECK(brm_decision(probs, rates) == 1);

        // exhaustive argmin cross-check
        Symbol best = 0;
        double best_cost = brm_expected_cost(probs, rates, 0);
        for (Symbol j = 1; j < 3; ++j) {
            const double c = brm_expected_cost(probs, rates, j);
            if (c < best_cost) {
                best_cost = c;
                best = j;
            }
        }
        CHECK(brm_decision(probs, rates) == best);
    }

    SECTION("degenerate distribution forces the observed symbol") {
        const RateTable rates = linear_rates(6);
        std::vector<double> probs(6, 0.0);
        probs[3] = 1.0;
        CHECK(brm_decision(probs, rates) == 3);
        CHECK(brm_expected_cost(probs, rates, 3) == 0.0);
    }

    SECTION("two-symbol tie goes to the lower rate") {
        // p = (0.5, 0.5), rates (1, 2): C_0 = 0.5, C_1 = 0.5
        const RateTable rates = linear_rates(2);
        const std::vector<double> probs = {0.5, 0.5};
        CHECK(brm_expected_cost(probs, rates, 0) == Catch::Approx(0.5));
        CHECK(brm_expected_cost(probs, rates, 1) == Catch::Approx(0.5));
        CHECK(brm_decision(probs, rates) == 0);
    }
}

TEST_CASE("median and last-value baselines", "[predict]") {
    const std::vector<Symbol> h1 = {3, 20, 22, 24};
    CHECK(predict_median(h1, 3) == 22);
    const std::vector<Symbol> h2 = {10, 14};
    CHECK(predict_median(h2, 2) == 10);
    const std::vector<Symbol> h3 = {7, 7, 7, 7};
    CHECK(predict_median(h3, 9) == 7);
    CHECK(predict_last(h1) == 24);
    const std::vector<Symbol> h4 = {17};
    CHECK(predict_last(h4) == 17);
    CHECK(predict_median(h4, 9) == 17);

    const std::vector<Symbol> empty;
    CHECK_THROWS_AS(predict_last(empty), DomainError);
    CHECK_THROWS_AS(predict_median(empty, 9), DomainError);
}

TEST_CASE("pipeline cold start and bootstrap order", "[predict]") {
    const Alphabet alphabet(28);
    UserPipeline p(PredictorKind::kVoMap, alphabet, default_rate_table(28));

    const StepResult first = p.step(22);
    CHECK(first.cold);
    CHECK(first.predicted == 0);
    CHECK(first.order_used == 0);

    // until the first scheduled re-selection the variable-order path is order 1
    testutil::TestRng rng(53);
    for (int i = 0; i < 80; ++i) {
        const StepResult r = p.step(rng.below(28));
        CHECK_FALSE(r.cold);
        CHECK(r.order_used == 1);
    }
}

TEST_CASE("fixed-order path uses order 3 as soon as history allows", "[predict]") {
    const Alphabet alphabet(8);
    UserPipeline p(PredictorKind::kFmMap, alphabet, default_rate_table(8));
    p.step(1);
    CHECK(p.step(2).order_used == 1);
    CHECK(p.step(3).order_used == 2);
    CHECK(p.step(4).order_used == 3);
    for (int i = 0; i < 30; ++i) CHECK(p.step(i % 8).order_used == 3);
}

TEST_CASE("scripted variable-order MAP run matches an independent simulation",
          "[predict][oracle]") {
    // Before the first re-selection the pipeline predicts with order 1, so
    // each prediction is the argmax of the blended conditional computed from
    // the prefix seen so far. The oracle recomputes that distribution from
    // raw n-gram counts of the prefix, entirely outside the tree code.
    const std::vector<Symbol> script = {2, 2, 1, 2, 2, 1, 0, 2, 2, 1};
    const Alphabet alphabet(3);
    UserPipeline p(PredictorKind::kVoMap, alphabet, default_rate_table(3));

    std::vector<Symbol> prefix;
    for (Symbol x : script) {
        const StepResult r = p.step(x);
        if (prefix.empty()) {
            CHECK(r.cold);
        } else {
            const RawNgramModel oracle(prefix, 3, 2);
            Symbol best = 0;
            double best_p = -1.0;
            for (Symbol t = 0; t < 3; ++t) {
                const double prob = oracle.prob({prefix.back()}, t).value();
                if (prob > best_p) {
                    best_p = prob;
                    best = t;
                }
            }
            INFO("prefix length " << prefix.size());
            CHECK(r.predicted == best);
        }
        prefix.push_back(x);
    }
}

TEST_CASE("predictions are causal", "[predict][property]") {
    // replaying any prefix yields the same predictions as the full run
    testutil::TestRng rng(59);
    const auto seq = rng.sequence(150, 6);
    const Alphabet alphabet(6);
    const RateTable rates = default_rate_table(6);

    for (PredictorKind kind : {PredictorKind::kVoBrm, PredictorKind::kFmMap,
                               PredictorKind::kMedian, PredictorKind::kNoPrediction}) {
        UserPipeline full(kind, alphabet, rates);
        std::vector<Symbol> full_predictions;
        for (Symbol x : seq) full_predictions.push_back(full.step(x).predicted);

        const std::size_t cut = 60;
        UserPipeline partial(kind, alphabet, rates);
        for (std::size_t i = 0; i < cut; ++i) {
            const StepResult r = partial.step(seq[i]);
            REQUIRE(r.predicted == full_predictions[i]);
        }
    }
}

TEST_CASE("risk choice never costs more than the MAP choice", "[predict][property]") {
    testutil::TestRng rng(61);
    const auto seq = rng.sequence(400, 8);
    const Alphabet alphabet(8);
    const RateTable rates = default_rate_table(8);

    UserPipeline p(PredictorKind::kVoBrm, alphabet, rates);
    long long checked = 0;
    p.observer = [&](const StepObservation& obs) {
        const double brm_cost = brm_expected_cost(obs.probs, rates, obs.brm_choice);
        const double map_cost = brm_expected_cost(obs.probs, rates, obs.map_choice);
        REQUIRE(brm_cost <= map_cost);
        ++checked;
    };
    for (Symbol x : seq) p.step(x);
    CHECK(checked == static_cast<long long>(seq.size()) - 1);
}

TEST_CASE("MAP maximizes hit probability under the true conditional", "[predict][property]") {
    // decisions computed from the true row itself: the argmax cannot be less
    // likely than the risk-minimizing choice
    testutil::TestRng rng(67);
    const RateTable rates = default_rate_table(5);
    for (int round = 0; round < 200; ++round) {
        std::vector<double> row(5);
        double sum = 0.0;
        for (double& v : row) {
            v = 0.05 + double(rng.below(1000));
            sum += v;
        }
        for (double& v : row) v /= sum;
        const Symbol map_pick = map_decision(row);
        const Symbol brm_pick = brm_decision(row, rates);
        CHECK(row[static_cast<std::size_t>(map_pick)] >=
              row[static_cast<std::size_t>(brm_pick)]);
    }
}

TEST_CASE("deeper trees leave variable-order predictions unchanged", "[predict]") {
    // blending reads only to depth (selected order + 1), so growing the build
    // depth beyond it is invisible to the predictor
    MarkovSourceConfig cfg;
    cfg.alphabet_size = 4;
    cfg.order = 1;
    cfg.transition.assign(16, 0.1);
    for (int s = 0; s < 4; ++s) cfg.transition[static_cast<std::size_t>(s * 4 + s)] = 0.7;
    cfg.length = 350;
    cfg.seed = 77;
    const std::vector<Symbol> seq = generate_markov(cfg).symbols();

    const Alphabet alphabet(4);
    const RateTable rates = default_rate_table(4);
    PipelineConfig shallow;
    shallow.tree_depth = 5;
    PipelineConfig deep;
    deep.tree_depth = 8;

    UserPipeline a(PredictorKind::kVoMap, alphabet, rates, shallow);
    UserPipeline b(PredictorKind::kVoMap, alphabet, rates, deep);
    for (Symbol x : seq) {
        const StepResult ra = a.step(x);
        const StepResult rb = b.step(x);
        REQUIRE(ra.predicted == rb.predicted);
        REQUIRE(ra.order_used == rb.order_used);
    }
}

TEST_CASE("pipeline configuration is validated", "[predict]") {
    PipelineConfig bad;
    bad.tree_depth = 4;
    bad.max_order = 4;  // blending at order 4 needs depth 5
    CHECK_THROWS_AS(
        UserPipeline(PredictorKind::kVoMap, Alphabet(8), default_rate_table(8), bad),
        DomainError);

    CHECK_THROWS_AS(
        UserPipeline(PredictorKind::kVoMap, Alphabet(8), default_rate_table(4), {}),
        DomainError);

    UserPipeline p(PredictorKind::kVoMap, Alphabet(8), default_rate_table(8));
    CHECK_THROWS_AS(p.step(8), DomainError);
}
