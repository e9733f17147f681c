#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stylelab/common.hpp"

namespace stylelab {

// ---------------------------------------------------------------------------
// A minimal decoder-only transformer with deterministic seeded weights,
// per-layer activation taps, and per-layer additive injection hooks.
//
// Architecture (pre-norm):
//   x0 = embed(token) + sinusoidal_pe(position)
//   for each block i:
//     h  = x + attn(ln1(x))          causal multi-head attention
//     y  = h + mlp(ln2(h))           gelu feed-forward, 4x expansion
//     y += lambda * v_i              additive injection, applied after the
//                                    residual add when layer i is masked
//   logits = ln_f(y_last) @ We^T     output head tied to the embedding
//
// All arithmetic is double precision. Models are immutable after
// construction; forward/generate are const and safe to call concurrently.
// ---------------------------------------------------------------------------

struct ModelConfig {
    int num_layers = 4;
    int hidden_dim = 64;
    int num_heads = 4;
    int vocab_size = 256;
    int max_context = 512;
    uint64_t seed = 42;

    void validate() const;  // throws config_error
};

struct TokenSequence {
    std::vector<int> tokens;

    bool empty() const { return tokens.empty(); }
    size_t size() const { return tokens.size(); }
};

// Byte-level tokenization: token id == byte value, total on any input.
// detokenize(tokenize(t)) == t for every byte string.
TokenSequence tokenize(std::string_view text);
std::string detokenize(const TokenSequence& seq);

enum class PoolingMode {
    mean_all_positions,  // mean over every token position (default)
    last_position,       // final token position only
};

const char* to_string(PoolingMode m);
PoolingMode pooling_from_string(std::string_view s);  // throws argument_error

// Per-layer residual-stream activations captured during a forward pass.
struct LayerActivations {
    // [num_layers][hidden_dim], pooled per `pooling`
    std::vector<std::vector<double>> per_layer;
    PoolingMode pooling = PoolingMode::mean_all_positions;
    // optional retention of the pre-pooling values, [num_layers][T][hidden_dim]
    std::vector<std::vector<std::vector<double>>> per_position;

    bool has_positions() const { return !per_position.empty(); }
};

// Additive steering plan: vectors[i] is added to the residual stream at the
// output of block i, scaled by lambda, at every token position.
struct InjectionPlan {
    // one vector of length hidden_dim per model layer
    std::span<const std::vector<double>> vectors;
    double lambda = 0.0;
    // layer indices to inject at; empty means all layers
    std::vector<int> layer_mask;

    bool applies_to(int layer) const;
};

struct DecodeParams {
    double temperature = 0.7;  // 0 = greedy
    int top_k = 40;            // <= 0 = full vocabulary
    int max_new_tokens = 128;
    uint64_t seed = 0;
};

struct ForwardOptions {
    PoolingMode pooling = PoolingMode::mean_all_positions;
    bool keep_positions = false;
    bool want_logits = true;
};

struct ForwardResult {
    // [T][vocab_size]; empty when want_logits = false
    std::vector<std::vector<double>> logits;
    LayerActivations acts;
};

struct GenerateOutput {
    TokenSequence generated;  // continuation only, excludes the prompt
    std::vector<std::string> warnings;
};

// Per-block parameters. Matrices are row-major [out][in].
struct LayerWeights {
    std::vector<double> ln1_gamma, ln1_beta;  // [h]
    std::vector<double> wq, wk, wv, wo;       // [h][h]
    std::vector<double> ln2_gamma, ln2_beta;  // [h]
    std::vector<double> w1;                   // [4h][h]
    std::vector<double> b1;                   // [4h]
    std::vector<double> w2;                   // [h][4h]
    std::vector<double> b2;                   // [h]
};

class Model {
  public:
    // deterministic seeded initialization; identical (config, seed) pairs
    // produce bit-identical weights
    explicit Model(const ModelConfig& config);

    // flat binary weight file (see docs/formats.md); max_context is not part
    // of the file and must be supplied by the caller
    static Model load(const std::string& path, int max_context = 512);
    void save(const std::string& path) const;

    const ModelConfig& config() const { return config_; }
    uint64_t weight_checksum() const { return checksum_; }

    const std::vector<double>& embedding() const { return embedding_; }  // [vocab][h]
    const std::vector<LayerWeights>& layers() const { return layers_; }
    const std::vector<double>& final_gamma() const { return ln_f_gamma_; }
    const std::vector<double>& final_beta() const { return ln_f_beta_; }

    // positional encoding value for (position, component)
    double positional(int pos, int dim) const;

    // Full-sequence forward pass. Throws argument_error on empty input or
    // out-of-range tokens, and a context-overflow data_error when the
    // sequence exceeds max_context.
    ForwardResult forward(const TokenSequence& input,
                          const InjectionPlan* plan = nullptr,
                          const ForwardOptions& options = {}) const;

    // Autoregressive decode applying the plan at every step and position.
    // Deterministic given (model, prompt, plan, decode). If the prompt plus
    // the decode budget would overflow max_context, the oldest prompt tokens
    // are dropped up front and a warning is recorded.
    GenerateOutput generate(const TokenSequence& prompt,
                            const InjectionPlan* plan,
                            const DecodeParams& decode) const;

  private:
    Model() = default;
    void compute_checksum();
    void validate_plan(const InjectionPlan* plan) const;

    ModelConfig config_;
    std::vector<double> embedding_;  // [vocab][h]
    std::vector<LayerWeights> layers_;
    std::vector<double> ln_f_gamma_, ln_f_beta_;  // [h]
    uint64_t checksum_ = 0;

    friend class DecoderState;
};

// weight-file identification
inline constexpr char kWeightMagic[4] = {'S', 'T', 'Y', 'V'};
inline constexpr uint32_t kWeightFormatVersion = 1;

}  // namespace stylelab
