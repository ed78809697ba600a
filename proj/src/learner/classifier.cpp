#include "dexgrasp/learner/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "dexgrasp/common/error.hpp"
#include "dexgrasp/common/random.hpp"

namespace dexgrasp::learner {
namespace {

constexpr std::string_view kModelFormat = "dexgrasp-classifier";
constexpr int kModelVersion = 1;

double activate(Activation activation, double x) {
    return activation == Activation::relu ? (x < 0.0 ? 0.0 : x) : std::tanh(x);
}

// Derivative expressed through the activation output.
double activate_slope(Activation activation, double y) {
    return activation == Activation::relu ? (y > 0.0 ? 1.0 : 0.0) : 1.0 - y * y;
}

void softmax(std::vector<double>& z) {
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - top);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

// Outputs of every layer; [0] is the input itself.
std::vector<std::vector<double>> forward(const ClassifierModel& model, std::span<const double> input) {
    if (model.layers.empty()) throw ModelError("model has no layers");
    if (input.size() != model.input_width()) {
        throw ModelError(fmt::format("input width {} does not match model width {}", input.size(),
                                     model.input_width()));
    }
    std::vector<std::vector<double>> outputs;
    outputs.reserve(model.layers.size() + 1);
    outputs.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        const auto& x = outputs.back();
        std::vector<double> y(layer.outputs);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double* w = &layer.weights[o * layer.inputs];
            double z = layer.bias[o];
            for (std::size_t i = 0; i < layer.inputs; ++i) z += w[i] * x[i];
            y[o] = z;
        }
        if (l + 1 < model.layers.size()) {
            for (double& v : y) v = activate(model.activation, v);
        } else {
            softmax(y);
        }
        outputs.push_back(std::move(y));
    }
    return outputs;
}

GraspDistribution to_distribution(const std::vector<double>& probabilities) {
    GraspDistribution d;
    std::copy(probabilities.begin(), probabilities.end(), d.p.begin());
    return d;
}

void check_dataset(const std::vector<std::vector<double>>& inputs, const std::vector<GraspDistribution>& targets) {
    if (inputs.size() != targets.size()) {
        throw TrainingError(fmt::format("{} inputs but {} targets", inputs.size(), targets.size()));
    }
}

// Accumulates the gradient of the summed loss over `rows` into `gradient`.
double accumulate_gradient(const ClassifierModel& model, const std::vector<std::vector<double>>& inputs,
                           const std::vector<GraspDistribution>& targets, std::span<const std::size_t> rows,
                           ClassifierModel& gradient) {
    double loss = 0.0;
    for (std::size_t row : rows) {
        const auto outputs = forward(model, inputs[row]);
        const auto& target = targets[row];
        const auto& probabilities = outputs.back();
        loss += cross_entropy(target, to_distribution(probabilities));

        const double mass = std::accumulate(target.p.begin(), target.p.end(), 0.0);
        std::vector<double> delta(kGraspClassCount);
        for (std::size_t j = 0; j < kGraspClassCount; ++j) delta[j] = mass * probabilities[j] - target.p[j];

        for (std::size_t l = model.layers.size(); l-- > 0;) {
            const auto& layer = model.layers[l];
            auto& grad = gradient.layers[l];
            const auto& x = outputs[l];
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                grad.bias[o] += delta[o];
                double* g = &grad.weights[o * layer.inputs];
                for (std::size_t i = 0; i < layer.inputs; ++i) g[i] += delta[o] * x[i];
            }
            if (l == 0) break;
            std::vector<double> previous(layer.inputs, 0.0);
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double* w = &layer.weights[o * layer.inputs];
                for (std::size_t i = 0; i < layer.inputs; ++i) previous[i] += w[i] * delta[o];
            }
            for (std::size_t i = 0; i < layer.inputs; ++i) previous[i] *= activate_slope(model.activation, x[i]);
            delta = std::move(previous);
        }
    }
    return loss;
}

}  // namespace

std::vector<double> model_input(const kb::EncodedFeatures& features) {
    std::vector<double> input(kModelInputWidth, 0.0);
    for (std::size_t i = 0; i < kb::kEncodedWidth; ++i) {
        const double v = features.values[i];
        input[i] = i < 4 ? std::log1p(v) : v;
    }
    for (std::size_t i = 0; i < kb::kAttributeCount; ++i) {
        input[kb::kEncodedWidth + i] = features.mask.test(i) ? 1.0 : 0.0;
    }
    return input;
}

std::vector<std::size_t> input_columns(kb::Attribute attribute) {
    const auto block = kb::block_of(attribute);
    std::vector<std::size_t> columns;
    for (std::size_t i = 0; i < block.width; ++i) columns.push_back(block.offset + i);
    columns.push_back(kb::kEncodedWidth + kb::index_of(attribute));
    return columns;
}

std::string_view to_string(Activation activation) { return activation == Activation::relu ? "relu" : "tanh"; }

Activation parse_activation(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    throw ModelError(fmt::format("unknown activation '{}'", name));
}

std::vector<std::size_t> ClassifierModel::layer_sizes() const {
    std::vector<std::size_t> sizes;
    if (layers.empty()) return sizes;
    sizes.push_back(layers.front().inputs);
    for (const auto& layer : layers) sizes.push_back(layer.outputs);
    return sizes;
}

std::size_t ClassifierModel::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
    return n;
}

ClassifierModel init_model(const ModelConfig& config, std::uint64_t seed, std::size_t inputs) {
    if (inputs == 0) throw ModelError("input width must be positive");
    ClassifierModel model;
    model.activation = config.activation;
    model.seed = seed;
    Rng rng(seed);
    std::vector<std::size_t> sizes = {inputs};
    sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
    sizes.push_back(kGraspClassCount);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        if (sizes[l + 1] == 0) throw ModelError("hidden layers must have at least one unit");
        Layer layer;
        layer.inputs = sizes[l];
        layer.outputs = sizes[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
        layer.weights.resize(layer.inputs * layer.outputs);
        for (double& w : layer.weights) w = rng.uniform(-limit, limit);
        layer.bias.assign(layer.outputs, 0.0);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

ClassifierModel zero_like(const ClassifierModel& model) {
    ClassifierModel zero = model;
    for (auto& layer : zero.layers) {
        std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
        std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
    }
    return zero;
}

GraspDistribution predict(const ClassifierModel& model, std::span<const double> input) {
    if (model.layers.empty()) throw ModelError("model has no layers");
    if (model.layers.back().outputs != kGraspClassCount) {
        throw ModelError(fmt::format("model has {} outputs, expected {}", model.layers.back().outputs,
                                     kGraspClassCount));
    }
    return to_distribution(forward(model, input).back());
}

GraspDistribution predict(const ClassifierModel& model, const kb::EncodedFeatures& features) {
    return predict(model, model_input(features));
}

std::vector<Example> make_examples(const std::vector<GraspLabel>& labels,
                                   const std::vector<kb::ObjectRecord>& records) {
    std::map<int, const kb::ObjectRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;
    std::vector<Example> examples;
    examples.reserve(labels.size());
    for (const auto& label : labels) {
        const auto it = by_id.find(label.object_id);
        if (it == by_id.end()) throw DataError(fmt::format("label for unknown object {}", label.object_id));
        examples.push_back({kb::encode(*it->second), label});
    }
    return examples;
}

std::vector<std::vector<double>> input_matrix(const std::vector<Example>& examples) {
    std::vector<std::vector<double>> rows;
    rows.reserve(examples.size());
    for (const auto& e : examples) rows.push_back(model_input(e.features));
    return rows;
}

std::vector<GraspDistribution> targets(const std::vector<Example>& examples) {
    std::vector<GraspDistribution> out;
    out.reserve(examples.size());
    for (const auto& e : examples) out.push_back(e.label.distribution());
    return out;
}

double dataset_loss(const ClassifierModel& model, const std::vector<std::vector<double>>& inputs,
                    const std::vector<GraspDistribution>& targets) {
    check_dataset(inputs, targets);
    double loss = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) loss += cross_entropy(targets[i], predict(model, inputs[i]));
    return loss;
}

ClassifierModel loss_gradient(const ClassifierModel& model, const std::vector<std::vector<double>>& inputs,
                              const std::vector<GraspDistribution>& targets, double* loss) {
    check_dataset(inputs, targets);
    auto gradient = zero_like(model);
    std::vector<std::size_t> rows(inputs.size());
    std::iota(rows.begin(), rows.end(), 0);
    const double total = accumulate_gradient(model, inputs, targets, rows, gradient);
    if (loss) *loss = total;
    return gradient;
}

TrainResult train(const std::vector<std::vector<double>>& inputs, const std::vector<GraspDistribution>& targets,
                  const TrainConfig& config) {
    check_dataset(inputs, targets);
    if (inputs.empty()) throw TrainingError("dataset is empty");
    if (!(config.learning_rate > 0.0)) throw TrainingError("learning rate must be positive");

    TrainResult result{init_model(config.model, config.seed, inputs.front().size()), {}};
    auto& model = result.model;
    Rng shuffler(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(inputs.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t batch = config.batch_size == 0 ? order.size() : std::min(config.batch_size, order.size());

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (batch < order.size()) shuffler.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t count = std::min(batch, order.size() - start);
            auto gradient = zero_like(model);
            epoch_loss += accumulate_gradient(model, inputs, targets,
                                              std::span<const std::size_t>(order).subspan(start, count), gradient);
            const double step = config.learning_rate / static_cast<double>(count);
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                auto& layer = model.layers[l];
                const auto& grad = gradient.layers[l];
                for (std::size_t k = 0; k < layer.weights.size(); ++k) layer.weights[k] -= step * grad.weights[k];
                for (std::size_t k = 0; k < layer.bias.size(); ++k) layer.bias[k] -= step * grad.bias[k];
            }
        }
        if (!std::isfinite(epoch_loss)) {
            throw TrainingError(fmt::format("loss became non-finite at epoch {} (learning rate {})", epoch + 1,
                                            config.learning_rate));
        }
        result.loss_history.push_back(epoch_loss);
    }
    return result;
}

TrainResult train(const std::vector<Example>& examples, const TrainConfig& config) {
    return train(input_matrix(examples), targets(examples), config);
}

std::string model_to_json(const ClassifierModel& model) {
    nlohmann::json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["layer_sizes"] = model.layer_sizes();
    j["activation"] = to_string(model.activation);
    j["seed"] = model.seed;
    auto& layers = j["layers"] = nlohmann::json::array();
    for (const auto& layer : model.layers) {
        layers.push_back({{"weights", layer.weights}, {"bias", layer.bias}});
    }
    return j.dump(1);
}

ClassifierModel model_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (j.at("format").get<std::string>() != kModelFormat) throw ModelError("not a classifier model file");
        const int version = j.at("version").get<int>();
        if (version != kModelVersion) throw ModelError(fmt::format("unsupported model version {}", version));
        ClassifierModel model;
        model.activation = parse_activation(j.at("activation").get<std::string>());
        model.seed = j.at("seed").get<std::uint64_t>();
        const auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
        const auto& layers = j.at("layers");
        if (sizes.size() < 2 || layers.size() != sizes.size() - 1) throw ModelError("layer count mismatch");
        if (sizes.back() != kGraspClassCount) throw ModelError("output layer must have 9 units");
        for (std::size_t l = 0; l < layers.size(); ++l) {
            Layer layer;
            layer.inputs = sizes[l];
            layer.outputs = sizes[l + 1];
            layer.weights = layers[l].at("weights").get<std::vector<double>>();
            layer.bias = layers[l].at("bias").get<std::vector<double>>();
            if (layer.weights.size() != layer.inputs * layer.outputs || layer.bias.size() != layer.outputs) {
                throw ModelError(fmt::format("layer {} has the wrong number of parameters", l));
            }
            model.layers.push_back(std::move(layer));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(fmt::format("bad model file: {}", e.what()));
    }
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ModelError(fmt::format("cannot write model {}", path.string()));
    out << model_to_json(model) << '\n';
}

ClassifierModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ModelError(fmt::format("cannot open model {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

}  // namespace dexgrasp::learner
