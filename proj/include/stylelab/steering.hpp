#pragma once

#include <array>
#include <string>
#include <vector>

#include "stylelab/common.hpp"
#include "stylelab/corpus.hpp"
#include "stylelab/model.hpp"

namespace stylelab {

// ---------------------------------------------------------------------------
// Style vectors. For a target emotion t the per-layer vector is the mean
// pooled activation of the target's texts minus the average of the mean
// pooled activations of the six contrast classes (the other five emotions
// plus neutral):
//
//   v_i(t) = mean_i(t) - (1/6) * sum_c mean_i(c)
// ---------------------------------------------------------------------------

// Per-layer mean of pooled activations over a set of samples.
struct MeanActivation {
    std::string label;
    // [num_layers][hidden_dim]
    std::vector<std::vector<double>> per_layer;
    int sample_count = 0;
    PoolingMode pooling = PoolingMode::mean_all_positions;
};

// Forwards every sample (no injection) and averages the pooled per-layer
// activations. Samples are used as given; apply truncate_tokens first when
// the token-limit policy should hold. Throws argument_error on an empty list.
MeanActivation collect_mean_activation(const Model& model,
                                       const std::vector<TokenSequence>& samples,
                                       PoolingMode pooling,
                                       std::string label = {});

// v_i = target.per_layer[i] - (1/s) * sum_j contrasts[j].per_layer[i].
// Throws argument_error when contrasts is empty or shapes disagree.
std::vector<std::vector<double>> style_vector_from_means(
    const MeanActivation& target, const std::vector<MeanActivation>& contrasts);

struct StyleVectorSet {
    int num_layers = 0;
    int hidden_dim = 0;
    uint64_t model_checksum = 0;
    uint64_t corpus_hash = 0;
    PoolingMode pooling = PoolingMode::mean_all_positions;
    // vectors[emotion][layer][dim], emotions indexed 0..5
    std::array<std::vector<std::vector<double>>, kEkmanSix> vectors;
    // texts that contributed to each class mean, indexed by label
    std::array<int, kAllLabels> sample_counts{};

    const std::vector<std::vector<double>>& for_emotion(Emotion e) const;
    double layer_norm_of(Emotion e, int layer) const;  // euclidean norm, diagnostics
    uint64_t content_hash() const;                     // over the numeric payload
};

struct BuildOptions {
    PoolingMode pooling = PoolingMode::mean_all_positions;
};

// Runs the model over every corpus text (tokenized and truncated to
// kActivationTokenLimit) and forms the difference-of-means vectors for all
// six targets. Every one of the seven classes must have at least one text;
// otherwise throws missing_label_error naming the class.
StyleVectorSet build_style_vectors(const Model& model, const Corpus& corpus,
                                   const BuildOptions& options = {});

// JSON serialization, exact double round-trip
void save_style_vectors(const StyleVectorSet& set, const std::string& path);
StyleVectorSet load_style_vectors(const std::string& path);

// Throws data_error when the set's model checksum or shape does not match
// the model it is about to steer.
void check_compatible(const StyleVectorSet& set, const Model& model);

// Builds a plan borrowing the set's storage; the set must outlive the plan.
// The target must be one of the six steerable emotions.
InjectionPlan make_plan(const StyleVectorSet& set, Emotion target, double lambda,
                        std::vector<int> layer_mask = {});

// One steered generation with its settings and provenance attached.
struct SteeredGeneration {
    std::string prompt;
    std::string text;         // continuation only
    TokenSequence tokens;     // continuation tokens
    Emotion target = Emotion::anger;
    double lambda = 0.0;
    std::vector<int> layer_mask;  // empty = all layers
    DecodeParams decode;
    uint64_t model_checksum = 0;
    uint64_t vectors_hash = 0;
    uint64_t corpus_hash = 0;
    std::vector<std::string> warnings;
};

// Checks set/model compatibility, generates with the injection plan, and
// records the run's parameters. Errors propagate from Model::generate.
SteeredGeneration steer_generate(const Model& model, const std::string& prompt,
                                 const StyleVectorSet& set, Emotion target,
                                 double lambda, const DecodeParams& decode,
                                 std::vector<int> layer_mask = {});

}  // namespace stylelab
