#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dexgrasp/kb/attributes.hpp"
#include "dexgrasp/kb/encoding.hpp"
#include "dexgrasp/learner/grasp.hpp"

namespace dexgrasp::learner {

/// Encoded features followed by the 9-bit presence mask.
inline constexpr std::size_t kModelInputWidth = kb::kEncodedWidth + kb::kAttributeCount;

/// Network input for one object. Continuous columns pass through ln(1 + x)
/// so centimeters and grams share a scale; absent fields stay 0.
std::vector<double> model_input(const kb::EncodedFeatures& features);

/// Input columns fed by `attribute`: its encoded slots plus its mask bit.
std::vector<std::size_t> input_columns(kb::Attribute attribute);

enum class Activation { relu, tanh };

std::string_view to_string(Activation activation);
Activation parse_activation(std::string_view name);  // throws ModelError

/// Dense layer; `weights` is row-major, outputs x inputs.
struct Layer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    double& weight(std::size_t out, std::size_t in) { return weights[out * inputs + in]; }
    double weight(std::size_t out, std::size_t in) const { return weights[out * inputs + in]; }

    friend bool operator==(const Layer&, const Layer&) = default;
};

/// Feed-forward network: hidden layers use `activation`, the last layer
/// is a softmax over the nine grasp classes.
struct ClassifierModel {
    std::vector<Layer> layers;
    Activation activation = Activation::relu;
    std::uint64_t seed = 0;

    std::vector<std::size_t> layer_sizes() const;
    std::size_t input_width() const { return layers.empty() ? 0 : layers.front().inputs; }
    std::size_t parameter_count() const;

    friend bool operator==(const ClassifierModel&, const ClassifierModel&) = default;
};

struct ModelConfig {
    std::vector<std::size_t> hidden = {32, 32};
    Activation activation = Activation::relu;
};

/// Xavier-uniform weights, zero biases.
ClassifierModel init_model(const ModelConfig& config, std::uint64_t seed, std::size_t inputs = kModelInputWidth);

/// Same shape as `model` with every parameter zero.
ClassifierModel zero_like(const ClassifierModel& model);

/// Throws ModelError when the input width does not match the model.
GraspDistribution predict(const ClassifierModel& model, std::span<const double> input);
GraspDistribution predict(const ClassifierModel& model, const kb::EncodedFeatures& features);

struct Example {
    kb::EncodedFeatures features;
    GraspLabel label;
};

/// Pairs each label with its record's encoding. Throws DataError for ids
/// missing from `records`.
std::vector<Example> make_examples(const std::vector<GraspLabel>& labels, const std::vector<kb::ObjectRecord>& records);

/// Rows of model_input(), one per example.
std::vector<std::vector<double>> input_matrix(const std::vector<Example>& examples);
std::vector<GraspDistribution> targets(const std::vector<Example>& examples);

/// Summed cross-entropy over the rows.
double dataset_loss(const ClassifierModel& model, const std::vector<std::vector<double>>& inputs,
                    const std::vector<GraspDistribution>& targets);

/// Gradient of dataset_loss() with respect to every parameter, returned in
/// the shape of `model`. Also returns the loss.
ClassifierModel loss_gradient(const ClassifierModel& model, const std::vector<std::vector<double>>& inputs,
                              const std::vector<GraspDistribution>& targets, double* loss = nullptr);

struct TrainConfig {
    std::size_t epochs = 3000;
    double learning_rate = 0.05;
    /// 0 trains full-batch; otherwise rows are reshuffled every epoch.
    std::size_t batch_size = 0;
    std::uint64_t seed = 7;
    ModelConfig model;
};

struct TrainResult {
    ClassifierModel model;
    /// Summed cross-entropy seen during each epoch.
    std::vector<double> loss_history;
};

/// Gradient descent on the mean loss of each batch. Throws TrainingError
/// on an empty dataset or a non-finite loss.
TrainResult train(const std::vector<std::vector<double>>& inputs, const std::vector<GraspDistribution>& targets,
                  const TrainConfig& config);
TrainResult train(const std::vector<Example>& examples, const TrainConfig& config);

std::string model_to_json(const ClassifierModel& model);
ClassifierModel model_from_json(const std::string& text);  // throws ModelError
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

}  // namespace dexgrasp::learner
