#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "dexgrasp/common/error.hpp"
#include "dexgrasp/common/random.hpp"
#include "dexgrasp/kb/knowledge_base.hpp"
#include "dexgrasp/learner/classifier.hpp"
#include "dexgrasp/learner/evaluation.hpp"
#include "dexgrasp/learner/grasp.hpp"
#include "fixtures.hpp"

using namespace dexgrasp;
using namespace dexgrasp::learner;

namespace {

GraspDistribution random_distribution(Rng& rng) {
    GraspDistribution d;
    double sum = 0.0;
    for (double& v : d.p) {
        v = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
        sum += v;
    }
    if (sum == 0.0) return GraspDistribution::uniform();
    for (double& v : d.p) v /= sum;
    return d;
}

GraspLabel random_label(Rng& rng) {
    GraspLabel label;
    for (auto& f : label.frequencies) f = rng.uniform() < 0.5 ? 0u : static_cast<unsigned>(rng.index(6));
    if (label.total() == 0) label.frequencies[rng.index(kGraspClassCount)] = 1;
    return label;
}

std::vector<double> random_input(Rng& rng, std::size_t width) {
    std::vector<double> x(width);
    for (double& v : x) v = rng.uniform(-1.0, 2.0);
    return x;
}

const std::vector<Example>& fixture_examples() {
    static const auto examples =
        make_examples(load_labels(fixtures::data_path("labels.csv")), kb::load_records(fixtures::data_path("kb.csv")));
    return examples;
}

const TrainResult& fixture_training() {
    static const auto result = train(fixture_examples(), TrainConfig{});
    return result;
}

}  // namespace

TEST_CASE("grasp codes decompose into type and dimension") {
    std::set<std::string> codes;
    for (auto grasp : kAllGraspClasses) {
        const std::string text(code(grasp));
        codes.insert(text);
        CHECK(text == std::string(to_string(grasp_type(grasp))) + "." + std::string(to_string(grasp_dim(grasp))));
        CHECK(parse_grasp_class(text) == grasp);
        CHECK(compose(grasp_type(grasp), grasp_dim(grasp)) == grasp);
    }
    CHECK(codes.size() == 9);
    CHECK(code(GraspClass::rc_ab) == "rc.ab");
    CHECK(code(GraspClass::wt_c) == "wt.c");

    std::size_t composable = 0;
    for (std::size_t t = 0; t < 6; ++t) {
        for (std::size_t d = 0; d < 7; ++d) {
            if (compose(static_cast<GraspType>(t), static_cast<GraspDim>(d))) ++composable;
        }
    }
    CHECK(composable == 9);
    CHECK_FALSE(compose(GraspType::wt, GraspDim::a));
    CHECK_FALSE(parse_grasp_class("wt.a"));
    CHECK(parse_grasp_type("wh") == GraspType::wh);
    CHECK(parse_grasp_dim("abc") == GraspDim::abc);
}

TEST_CASE("label normalization") {
    const auto calculator = fixtures::label_rows().front();
    const auto d = calculator.distribution();
    CHECK(d.valid());
    CHECK(d[GraspClass::rp_b] == doctest::Approx(5.0 / 9.0));
    CHECK(d[GraspClass::rp_c] == doctest::Approx(2.0 / 9.0));
    CHECK(d[GraspClass::wt_c] == doctest::Approx(2.0 / 9.0));
    CHECK(calculator.max_frequency() == 5);
    CHECK_THROWS_AS(GraspLabel{}.distribution(), DataError);
    CHECK(GraspDistribution::uniform().valid());
    CHECK_FALSE(GraspDistribution{}.valid());
}

TEST_CASE("cross entropy examples") {
    const auto hot = GraspDistribution::one_hot(GraspClass::wh_bc);
    CHECK(cross_entropy(hot, hot) == 0.0);
    CHECK(cross_entropy(hot, GraspDistribution::uniform()) == doctest::Approx(std::log(9.0)).epsilon(1e-12));

    // Hand sum over the calculator row: each nonzero term is p_j * ln 9.
    const auto calculator = fixtures::label_rows().front().distribution();
    const double hand = (5.0 / 9.0) * std::log(9.0) + (2.0 / 9.0) * std::log(9.0) + (2.0 / 9.0) * std::log(9.0);
    CHECK(cross_entropy(calculator, GraspDistribution::uniform()) == doctest::Approx(hand).epsilon(1e-12));
    CHECK(hand == doctest::Approx(2.1972).epsilon(1e-4));

    // A zero prediction is clamped, not infinite.
    const auto other = GraspDistribution::one_hot(GraspClass::rc_ab);
    CHECK(cross_entropy(hot, other) == doctest::Approx(-std::log(1e-12)));
}

TEST_CASE("cross entropy is minimized at the truth") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto truth = random_distribution(rng);
        const auto other = random_distribution(rng);
        CHECK(cross_entropy(truth, other) >= cross_entropy(truth, truth) - 1e-12);
    }
}

TEST_CASE("select_grasp examples") {
    CHECK(select_grasp(GraspDistribution::one_hot(GraspClass::wh_bc)) == GraspClass::wh_bc);
    CHECK(select_grasp(GraspDistribution::uniform()) == GraspClass::rc_ab);
    GraspDistribution d;
    d.p = {0.1, 0.4, 0.3, 0.05, 0.05, 0.1, 0.0, 0.0, 0.0};
    CHECK(select_grasp(d) == GraspClass::rc_bc);
    d.p = {0.0, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.4, 0.3};
    CHECK(select_grasp(d) == GraspClass::wp_bc);
    d.p = {0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5};
    CHECK(select_grasp(d) == GraspClass::wh_bc);
}

TEST_CASE("select_grasp is invariant under strictly increasing transforms") {
    const std::vector<std::function<double(double)>> transforms = {
        [](double x) { return std::exp(x); },
        [](double x) { return x * x * x; },
        [](double x) { return std::log(x + 1e-9); },
        [](double x) { return 3.0 * x - 7.0; },
        [](double x) { return -1.0 / (x + 0.5); },
        [](double x) { return std::sqrt(x); },
    };
    Rng rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        auto d = random_distribution(rng);
        if (trial % 4 == 0) d.p[rng.index(9)] = d.p[rng.index(9)];  // plant ties
        const auto expected = select_grasp(d);
        for (const auto& f : transforms) {
            GraspDistribution mapped;
            for (std::size_t i = 0; i < kGraspClassCount; ++i) mapped.p[i] = f(d.p[i]);
            CHECK(select_grasp(mapped) == expected);
        }
    }
}

TEST_CASE("feasibility and match scores on the calculator and water bottle rows") {
    const auto rows = fixtures::label_rows();
    const std::vector<GraspLabel> calculator = {rows[0]};
    const std::vector<GraspLabel> bottle = {rows[1]};
    auto argmax = [](GraspClass grasp) { return std::vector<GraspDistribution>{GraspDistribution::one_hot(grasp)}; };

    CHECK(feasibility_score(calculator, argmax(GraspClass::rp_c)) == 1.0);
    CHECK(feasibility_score(calculator, argmax(GraspClass::rc_ab)) == 0.0);
    CHECK(match_score(calculator, argmax(GraspClass::rp_b)) == 1.0);
    CHECK(match_score(calculator, argmax(GraspClass::rp_c)) == 0.0);
    CHECK(match_score(bottle, argmax(GraspClass::wh_bc)) == 1.0);

    std::vector<GraspDistribution> truth;
    for (const auto& r : rows) truth.push_back(r.distribution());
    CHECK(feasibility_score(rows, truth) == 1.0);
    CHECK(match_score(rows, truth) == 1.0);

    CHECK_THROWS_AS(feasibility_score(rows, argmax(GraspClass::rp_b)), std::invalid_argument);
    CHECK_THROWS_AS(match_score(rows, argmax(GraspClass::rp_b)), std::invalid_argument);
}

TEST_CASE("match ties with the modal grasp count") {
    GraspLabel label{1, {0, 4, 0, 0, 0, 4, 0, 1, 0}};
    CHECK(match_score({label}, {GraspDistribution::one_hot(GraspClass::wh_bc)}) == 1.0);
    CHECK(match_score({label}, {GraspDistribution::one_hot(GraspClass::rc_bc)}) == 1.0);
    CHECK(match_score({label}, {GraspDistribution::one_hot(GraspClass::wp_bc)}) == 0.0);
}

TEST_CASE("match score never exceeds feasibility score") {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.index(12);
        std::vector<GraspLabel> labels;
        std::vector<GraspDistribution> predictions;
        for (std::size_t i = 0; i < n; ++i) {
            labels.push_back(random_label(rng));
            predictions.push_back(random_distribution(rng));
        }
        const double fl = feasibility_score(labels, predictions);
        const double fm = match_score(labels, predictions);
        CHECK(fm <= fl);
        CHECK(fl >= 0.0);
        CHECK(fl <= 1.0);
    }
}

TEST_CASE("label file") {
    const auto labels = load_labels(fixtures::data_path("labels.csv"));
    CHECK(labels.size() >= 30);
    const auto table = fixtures::label_rows();
    REQUIRE(labels.size() >= table.size());
    for (std::size_t i = 0; i < table.size(); ++i) CHECK(labels[i] == table[i]);

    std::stringstream out;
    write_labels_csv(out, labels);
    CHECK(read_labels_csv(out) == labels);

    auto read = [](const std::string& text) {
        std::istringstream in(text);
        return read_labels_csv(in);
    };
    const std::string header = "object_id,rc.ab,rc.bc,rp.b,rp.c,wc.abc,wh.bc,wh.c,wp.bc,wt.c\n";
    CHECK(read(header + "3,0,0,0,0,0,0,0,0,1\n").size() == 1);
    CHECK_THROWS_AS(read(header + "3,0,0,0,0,0,0,0,0,0\n"), DataError);
    CHECK_THROWS_AS(read(header + "3,0,0,0,0,0,0,0,0,-1\n"), DataError);
    CHECK_THROWS_AS(read(header + "3,0,0,0,0,0,0,0,x,1\n"), DataError);
    CHECK_THROWS_AS(read(header + "3,0,0,0,0,0,0,0,1\n"), DataError);
    CHECK_THROWS_AS(read(header + "3,0,0,0,0,0,0,0,0,1\n3,1,0,0,0,0,0,0,0,0\n"), DataError);
    CHECK_THROWS_AS(read("object_id,rc.ab\n1,1\n"), DataError);
    CHECK_THROWS_AS(read(""), DataError);
    CHECK_THROWS_AS(load_labels(fixtures::data_path("no_such_labels.csv")), DataError);

    // Column order is free.
    const auto shuffled = read("wt.c,wp.bc,wh.c,wh.bc,wc.abc,rp.c,rp.b,rc.bc,rc.ab,object_id\n2,0,0,0,0,0,0,0,1,9\n");
    CHECK(shuffled.front().object_id == 9);
    CHECK(shuffled.front().frequency(GraspClass::wt_c) == 2);
    CHECK(shuffled.front().frequency(GraspClass::rc_ab) == 1);
}

TEST_CASE("model input transform and columns") {
    const auto calculator = kb::encode(fixtures::kb_rows().front());
    const auto x = model_input(calculator);
    REQUIRE(x.size() == kModelInputWidth);
    CHECK(kModelInputWidth == 35);
    CHECK(x[0] == doctest::Approx(std::log(16.4)));
    CHECK(x[3] == doctest::Approx(std::log(117.0)));
    for (std::size_t i = 26; i < 35; ++i) CHECK(x[i] == 1.0);

    kb::FeatureQuery partial;
    partial.b = 4.0;
    const auto y = model_input(kb::encode(partial));
    CHECK(y[0] == 0.0);
    CHECK(y[1] == doctest::Approx(std::log(5.0)));
    CHECK(y[26] == 0.0);
    CHECK(y[27] == 1.0);

    std::set<std::size_t> all;
    for (auto attribute : kb::kAllAttributes) {
        for (auto column : input_columns(attribute)) CHECK(all.insert(column).second);
    }
    CHECK(all.size() == kModelInputWidth);
    CHECK(input_columns(kb::Attribute::material).size() == 9);
}

TEST_CASE("predict examples") {
    const auto zero = zero_like(init_model(ModelConfig{}, 1));
    const auto calculator = kb::encode(fixtures::kb_rows().front());
    const auto uniform = predict(zero, calculator);
    for (double p : uniform.p) CHECK(p == doctest::Approx(1.0 / 9.0).epsilon(1e-15));

    const auto model = init_model(ModelConfig{}, 3);
    CHECK(model.layer_sizes() == std::vector<std::size_t>{35, 32, 32, 9});
    for (const auto& layer : model.layers) {
        for (double b : layer.bias) CHECK(b == 0.0);
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
        for (double w : layer.weights) CHECK(std::abs(w) <= limit);
    }
    CHECK(init_model(ModelConfig{}, 3) == model);
    CHECK_FALSE(init_model(ModelConfig{}, 4) == model);

    CHECK_THROWS_AS(predict(model, std::vector<double>(26, 0.0)), ModelError);
    CHECK_THROWS_AS(predict(ClassifierModel{}, std::vector<double>(35, 0.0)), ModelError);
    CHECK_THROWS_AS(init_model(ModelConfig{{0}, Activation::relu}, 1), ModelError);
}

TEST_CASE("predict always returns a distribution") {
    Rng rng(8);
    for (auto activation : {Activation::relu, Activation::tanh}) {
        const auto model = init_model(ModelConfig{{16, 8}, activation}, 12);
        for (int trial = 0; trial < 300; ++trial) {
            auto x = random_input(rng, kModelInputWidth);
            for (double& v : x) v *= 20.0;
            const auto d = predict(model, x);
            CHECK(d.valid());
            CHECK(predict(model, x) == d);
        }
    }
}

TEST_CASE("analytic gradient matches central differences") {
    Rng rng(77);
    for (int trial = 0; trial < 6; ++trial) {
        const auto activation = trial % 2 == 0 ? Activation::tanh : Activation::relu;
        const std::size_t inputs = 3 + rng.index(5);
        auto model = init_model(ModelConfig{{4 + rng.index(4), 3 + rng.index(3)}, activation}, 100 + trial, inputs);
        for (auto& layer : model.layers) {
            for (double& b : layer.bias) b = rng.uniform(-0.5, 0.5);
        }
        std::vector<std::vector<double>> xs;
        std::vector<GraspDistribution> ts;
        for (int i = 0; i < 4; ++i) {
            xs.push_back(random_input(rng, inputs));
            ts.push_back(random_distribution(rng));
        }
        const auto analytic = loss_gradient(model, xs, ts);

        for (std::size_t l = 0; l < model.layers.size(); ++l) {
            auto check = [&](std::vector<double>& params, const std::vector<double>& grads) {
                for (std::size_t k = 0; k < params.size(); ++k) {
                    const double saved = params[k];
                    const double h = 1e-6;
                    params[k] = saved + h;
                    const double up = dataset_loss(model, xs, ts);
                    params[k] = saved - h;
                    const double down = dataset_loss(model, xs, ts);
                    params[k] = saved;
                    const double numeric = (up - down) / (2.0 * h);
                    const double scale = std::max({std::abs(numeric), std::abs(grads[k]), 1e-6});
                    CHECK(std::abs(numeric - grads[k]) / scale <= 1e-4);
                }
            };
            check(model.layers[l].weights, analytic.layers[l].weights);
            check(model.layers[l].bias, analytic.layers[l].bias);
        }
    }
}

TEST_CASE("training with zero epochs returns the seeded initialization") {
    TrainConfig config;
    config.epochs = 0;
    config.seed = 19;
    const auto result = train(fixture_examples(), config);
    CHECK(result.loss_history.empty());
    CHECK(result.model == init_model(config.model, 19));
}

TEST_CASE("training fits a single example") {
    TrainConfig config;
    config.epochs = 400;
    const std::vector<std::vector<double>> xs = {model_input(kb::encode(fixtures::kb_rows().front()))};
    const std::vector<GraspDistribution> ts = {GraspDistribution::one_hot(GraspClass::rp_b)};
    const auto result = train(xs, ts, config);
    CHECK(result.loss_history.size() == 400);
    CHECK(dataset_loss(result.model, xs, ts) < 0.05);
}

TEST_CASE("training on the fixture labels") {
    const auto& result = fixture_training();
    REQUIRE(result.loss_history.size() == TrainConfig{}.epochs);
    CHECK(result.loss_history.back() < result.loss_history.front());

    // The history entry is the loss before that epoch's step.
    const auto xs = input_matrix(fixture_examples());
    const auto ts = targets(fixture_examples());
    CHECK(result.loss_history.front() == doctest::Approx(dataset_loss(init_model(ModelConfig{}, 7), xs, ts)));

    const auto calculator = predict(result.model, kb::encode(fixtures::kb_rows().front()));
    CHECK(code(select_grasp(calculator)) == "rp.b");
    CHECK(calculator.valid());
}

TEST_CASE("training is reproducible") {
    TrainConfig config;
    config.epochs = 150;
    config.batch_size = 8;
    const auto first = train(fixture_examples(), config);
    const auto second = train(fixture_examples(), config);
    CHECK(first.model == second.model);
    CHECK(first.loss_history == second.loss_history);
    config.seed = 8;
    CHECK_FALSE(train(fixture_examples(), config).model == first.model);
}

TEST_CASE("training errors") {
    CHECK_THROWS_AS(train(std::vector<Example>{}, TrainConfig{}), TrainingError);
    TrainConfig config;
    config.epochs = 3;
    config.model.activation = Activation::tanh;
    std::vector<std::vector<double>> xs = {std::vector<double>(kModelInputWidth, 1.0)};
    xs[0][2] = std::nan("");
    CHECK_THROWS_AS(train(xs, {GraspDistribution::uniform()}, config), TrainingError);
    config.learning_rate = 0.0;
    CHECK_THROWS_AS(train(fixture_examples(), config), TrainingError);
    CHECK_THROWS_AS(make_examples({GraspLabel{9999, {1, 0, 0, 0, 0, 0, 0, 0, 0}}}, fixtures::kb_rows()), DataError);
}

TEST_CASE("model file round trip") {
    const auto& model = fixture_training().model;
    CHECK(model_from_json(model_to_json(model)) == model);
    CHECK_THROWS_AS(model_from_json("{}"), ModelError);
    CHECK_THROWS_AS(model_from_json("not json"), ModelError);
    auto text = model_to_json(init_model(ModelConfig{{2}, Activation::tanh}, 1));
    CHECK(model_from_json(text).activation == Activation::tanh);
    text.replace(text.find("\"tanh\""), 6, "\"gelu\"");
    CHECK_THROWS_AS(model_from_json(text), ModelError);
    CHECK_THROWS_AS(load_model(fixtures::data_path("no_such_model.json")), ModelError);
}

TEST_CASE("resubstitution scores on the fixture labels") {
    const auto scores = evaluate_resubstitution(fixture_examples(), TrainConfig{});
    CHECK(scores.feasibility == 1.0);
    CHECK(scores.match >= 0.70);
    CHECK(scores.match <= scores.feasibility);
    CHECK(scores.predictions.size() == fixture_examples().size());
}

TEST_CASE("leave-one-out predicts held-out objects") {
    std::vector<Example> subset(fixture_examples().begin(), fixture_examples().begin() + 8);
    TrainConfig config;
    config.epochs = 200;
    const auto scores = evaluate_leave_one_out(subset, config);
    CHECK(scores.predictions.size() == 8);
    CHECK(scores.match <= scores.feasibility);
    // Object 0 is predicted by a model that never saw it.
    std::vector<Example> rest(subset.begin() + 1, subset.end());
    CHECK(scores.predictions[0] == predict(train(rest, config).model, subset[0].features));
    CHECK_THROWS_AS(evaluate_leave_one_out({subset[0]}, config), TrainingError);
}

TEST_CASE("feature ranking finds the attribute the labels depend on") {
    Rng rng(31);
    std::vector<Example> examples;
    for (int i = 0; i < 40; ++i) {
        kb::FeatureQuery q;
        q.a = rng.uniform(20.0, 30.0);
        q.b = rng.uniform(2.0, 12.0);
        q.c = rng.uniform(0.5, 1.5);
        q.mass = rng.uniform(10.0, 1000.0);
        q.shape = static_cast<kb::Shape>(rng.index(5));
        q.rigidity = static_cast<kb::Rigidity>(rng.index(3));
        q.texture = kb::Texture::smooth;
        q.fragility = static_cast<kb::Fragility>(rng.index(3));
        q.material = static_cast<kb::Material>(rng.index(8));
        GraspLabel label{i, {}};
        label.frequencies[index_of(*q.b < 7.0 ? GraspClass::rp_b : GraspClass::wh_bc)] = 9;
        examples.push_back({kb::encode(q), label});
    }
    TrainConfig config;
    config.epochs = 150;
    config.learning_rate = 0.1;
    config.model.hidden = {8};
    const auto ranking = rank_features(examples, config);
    REQUIRE(ranking.size() == 9);
    CHECK(ranking.front().attribute == kb::Attribute::b);
    std::set<kb::Attribute> seen;
    for (const auto& f : ranking) seen.insert(f.attribute);
    CHECK(seen.size() == 9);
}

TEST_CASE("feature ranking puts a constant attribute last") {
    // Every attribute except texture votes for one grasp class.
    Rng rng(47);
    std::vector<Example> examples;
    for (int i = 0; i < 40; ++i) {
        kb::FeatureQuery q;
        q.a = rng.uniform(20.0, 30.0);
        q.b = rng.uniform(2.0, 12.0);
        q.c = rng.uniform(0.5, 1.5);
        q.mass = rng.uniform(10.0, 1000.0);
        q.shape = static_cast<kb::Shape>(rng.index(5));
        q.rigidity = static_cast<kb::Rigidity>(rng.index(3));
        q.texture = kb::Texture::rough;
        q.fragility = static_cast<kb::Fragility>(rng.index(3));
        q.material = static_cast<kb::Material>(rng.index(8));
        GraspLabel label{i, {}};
        auto vote = [&](std::size_t grasp) { ++label.frequencies[grasp % kGraspClassCount]; };
        vote(*q.a < 25.0 ? 0 : 1);
        vote(*q.b < 7.0 ? 2 : 3);
        vote(*q.c < 1.0 ? 4 : 5);
        vote(*q.mass < 500.0 ? 6 : 7);
        vote(static_cast<std::size_t>(*q.shape));
        vote(static_cast<std::size_t>(*q.rigidity) + 3);
        vote(8);
        vote(static_cast<std::size_t>(*q.fragility) + 6);
        vote(static_cast<std::size_t>(*q.material));
        examples.push_back({kb::encode(q), label});
    }
    TrainConfig config;
    config.epochs = 300;
    config.learning_rate = 0.1;
    config.model.hidden = {16};
    const auto ranking = rank_features(examples, config);
    REQUIRE(ranking.size() == 9);
    CHECK(ranking.back().attribute == kb::Attribute::texture);
    CHECK(ranking.back().importance == 0.0);
}
