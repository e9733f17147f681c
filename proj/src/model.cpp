#include "stylelab/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

namespace stylelab {

namespace {

// initialization constants; the draw order is part of the weight contract
constexpr double kEmbedStd = 0.25;
constexpr double kPeAmplitude = 0.05;
constexpr double kInitScale = 0.8;
constexpr double kLnEpsilon = 1e-5;

void layer_norm(const std::vector<double>& x, const std::vector<double>& gamma,
                const std::vector<double>& beta, std::vector<double>& out) {
    const size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : x) {
        const double d = v - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + kLnEpsilon);
    out.resize(n);
    for (size_t j = 0; j < n; ++j) out[j] = (x[j] - mean) * inv * gamma[j] + beta[j];
}

// out[i] = bias[i] + sum_j w[i][j] * in[j], w row-major [rows][cols]
void matvec(const std::vector<double>& w, const std::vector<double>& in,
            std::vector<double>& out, int rows, int cols,
            const std::vector<double>* bias = nullptr) {
    out.resize(rows);
    for (int i = 0; i < rows; ++i) {
        const double* row = w.data() + static_cast<size_t>(i) * cols;
        double acc = bias ? (*bias)[i] : 0.0;
        for (int j = 0; j < cols; ++j) acc += row[j] * in[j];
        out[i] = acc;
    }
}

double gelu(double x) {
    // tanh approximation
    constexpr double kSqrt2OverPi = 0.7978845608028654;
    return 0.5 * x * (1.0 + std::tanh(kSqrt2OverPi * (x + 0.044715 * x * x * x)));
}

// --- little-endian serialization helpers ---

void put_u32(std::string& buf, uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

class ByteReader {
  public:
    ByteReader(const std::string& buf, const std::string& path) : buf_(buf), path_(path) {}

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    double f64() {
        need(8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
        pos_ += 8;
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }

    void f64_block(std::vector<double>& out, size_t count) {
        out.resize(count);
        for (size_t i = 0; i < count; ++i) out[i] = f64();
    }

    size_t remaining() const { return buf_.size() - pos_; }

  private:
    void need(size_t n) {
        if (pos_ + n > buf_.size())
            throw io_error("weight file truncated: " + path_);
    }
    const std::string& buf_;
    std::string path_;
    size_t pos_ = 0;
};

int sample_token(const std::vector<double>& logits, const DecodeParams& decode, Rng& rng) {
    const int vocab = static_cast<int>(logits.size());
    if (decode.temperature <= 0.0) {
        // greedy: lowest index wins ties
        int best = 0;
        for (int t = 1; t < vocab; ++t)
            if (logits[t] > logits[best]) best = t;
        return best;
    }
    const int k = (decode.top_k <= 0) ? vocab : std::min(decode.top_k, vocab);
    std::vector<int> order(vocab);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
        if (logits[a] != logits[b]) return logits[a] > logits[b];
        return a < b;  // deterministic tie-break
    });
    const double maxl = logits[order[0]];
    std::vector<double> probs(k);
    double denom = 0.0;
    for (int i = 0; i < k; ++i) {
        probs[i] = std::exp((logits[order[i]] - maxl) / decode.temperature);
        denom += probs[i];
    }
    const double r = rng.uniform() * denom;
    double acc = 0.0;
    for (int i = 0; i < k; ++i) {
        acc += probs[i];
        if (r < acc) return order[i];
    }
    return order[k - 1];
}

}  // namespace

// ---------------------------------------------------------------------------
// config and tokenizer
// ---------------------------------------------------------------------------

void ModelConfig::validate() const {
    if (num_layers < 1) throw config_error("num_layers must be >= 1");
    if (hidden_dim < 2) throw config_error("hidden_dim must be >= 2");
    if (num_heads < 1) throw config_error("num_heads must be >= 1");
    if (hidden_dim % num_heads != 0)
        throw config_error("hidden_dim must be divisible by num_heads");
    if (vocab_size < 1 || vocab_size > 65536)
        throw config_error("vocab_size must be in [1, 65536]");
    if (max_context < 1) throw config_error("max_context must be >= 1");
}

TokenSequence tokenize(std::string_view text) {
    TokenSequence seq;
    seq.tokens.reserve(text.size());
    for (unsigned char c : text) seq.tokens.push_back(static_cast<int>(c));
    return seq;
}

std::string detokenize(const TokenSequence& seq) {
    std::string out;
    out.reserve(seq.size());
    for (int t : seq.tokens) {
        if (t < 0 || t > 255)
            throw argument_error("token " + std::to_string(t) + " is outside the byte range");
        out.push_back(static_cast<char>(static_cast<unsigned char>(t)));
    }
    return out;
}

const char* to_string(PoolingMode m) {
    return m == PoolingMode::mean_all_positions ? "mean" : "last";
}

PoolingMode pooling_from_string(std::string_view s) {
    if (s == "mean" || s == "mean_all_positions") return PoolingMode::mean_all_positions;
    if (s == "last" || s == "last_position") return PoolingMode::last_position;
    throw argument_error("unknown pooling mode '" + std::string(s) + "' (expected mean|last)");
}

bool InjectionPlan::applies_to(int layer) const {
    if (layer_mask.empty()) return true;
    return std::find(layer_mask.begin(), layer_mask.end(), layer) != layer_mask.end();
}

// ---------------------------------------------------------------------------
// model construction and serialization
// ---------------------------------------------------------------------------

Model::Model(const ModelConfig& config) : config_(config) {
    config_.validate();
    const int h = config_.hidden_dim;
    Rng rng(config_.seed);

    auto draw = [&rng](std::vector<double>& w, size_t n, double std_dev) {
        w.resize(n);
        for (size_t i = 0; i < n; ++i) w[i] = rng.normal() * std_dev;
    };

    draw(embedding_, static_cast<size_t>(config_.vocab_size) * h, kEmbedStd);

    const double proj_std = kInitScale / std::sqrt(static_cast<double>(h));
    const double down_std = kInitScale / std::sqrt(static_cast<double>(4 * h));
    layers_.resize(config_.num_layers);
    for (auto& lw : layers_) {
        lw.ln1_gamma.assign(h, 1.0);
        lw.ln1_beta.assign(h, 0.0);
        draw(lw.wq, static_cast<size_t>(h) * h, proj_std);
        draw(lw.wk, static_cast<size_t>(h) * h, proj_std);
        draw(lw.wv, static_cast<size_t>(h) * h, proj_std);
        draw(lw.wo, static_cast<size_t>(h) * h, proj_std);
        lw.ln2_gamma.assign(h, 1.0);
        lw.ln2_beta.assign(h, 0.0);
        draw(lw.w1, static_cast<size_t>(4 * h) * h, proj_std);
        lw.b1.assign(4 * h, 0.0);
        draw(lw.w2, static_cast<size_t>(h) * (4 * h), down_std);
        lw.b2.assign(h, 0.0);
    }
    ln_f_gamma_.assign(h, 1.0);
    ln_f_beta_.assign(h, 0.0);
    compute_checksum();
}

namespace {

std::string serialize_model(const ModelConfig& cfg, const std::vector<double>& embedding,
                            const std::vector<LayerWeights>& layers,
                            const std::vector<double>& ln_f_gamma,
                            const std::vector<double>& ln_f_beta) {
    std::string buf;
    buf.append(kWeightMagic, 4);
    put_u32(buf, kWeightFormatVersion);
    put_u32(buf, static_cast<uint32_t>(cfg.num_layers));
    put_u32(buf, static_cast<uint32_t>(cfg.hidden_dim));
    put_u32(buf, static_cast<uint32_t>(cfg.num_heads));
    put_u32(buf, static_cast<uint32_t>(cfg.vocab_size));
    auto block = [&buf](const std::vector<double>& w) {
        for (double v : w) put_f64(buf, v);
    };
    block(embedding);
    for (const auto& lw : layers) {
        block(lw.ln1_gamma);
        block(lw.ln1_beta);
        block(lw.wq);
        block(lw.wk);
        block(lw.wv);
        block(lw.wo);
        block(lw.ln2_gamma);
        block(lw.ln2_beta);
        block(lw.w1);
        block(lw.b1);
        block(lw.w2);
        block(lw.b2);
    }
    block(ln_f_gamma);
    block(ln_f_beta);
    return buf;
}

}  // namespace

void Model::compute_checksum() {
    const std::string buf =
        serialize_model(config_, embedding_, layers_, ln_f_gamma_, ln_f_beta_);
    checksum_ = fnv1a64(buf);
}

void Model::save(const std::string& path) const {
    const std::string buf =
        serialize_model(config_, embedding_, layers_, ln_f_gamma_, ln_f_beta_);
    write_text_file(path, buf);
}

Model Model::load(const std::string& path, int max_context) {
    const std::string buf = read_text_file(path);
    ByteReader r(buf, path);
    if (buf.size() < 4 || std::memcmp(buf.data(), kWeightMagic, 4) != 0)
        throw io_error("not a weight file (bad magic): " + path);
    r.u32();  // skip magic (validated above)
    const uint32_t version = r.u32();
    if (version != kWeightFormatVersion)
        throw io_error("unsupported weight format version " + std::to_string(version) + ": " + path);

    Model m;
    m.config_.num_layers = static_cast<int>(r.u32());
    m.config_.hidden_dim = static_cast<int>(r.u32());
    m.config_.num_heads = static_cast<int>(r.u32());
    m.config_.vocab_size = static_cast<int>(r.u32());
    m.config_.max_context = max_context;
    m.config_.seed = 0;  // weights came from the file, not a seed
    try {
        m.config_.validate();
    } catch (const config_error& e) {
        throw io_error("invalid weight file header (" + std::string(e.what()) + "): " + path);
    }

    const int h = m.config_.hidden_dim;
    r.f64_block(m.embedding_, static_cast<size_t>(m.config_.vocab_size) * h);
    m.layers_.resize(m.config_.num_layers);
    for (auto& lw : m.layers_) {
        r.f64_block(lw.ln1_gamma, h);
        r.f64_block(lw.ln1_beta, h);
        r.f64_block(lw.wq, static_cast<size_t>(h) * h);
        r.f64_block(lw.wk, static_cast<size_t>(h) * h);
        r.f64_block(lw.wv, static_cast<size_t>(h) * h);
        r.f64_block(lw.wo, static_cast<size_t>(h) * h);
        r.f64_block(lw.ln2_gamma, h);
        r.f64_block(lw.ln2_beta, h);
        r.f64_block(lw.w1, static_cast<size_t>(4 * h) * h);
        r.f64_block(lw.b1, 4 * h);
        r.f64_block(lw.w2, static_cast<size_t>(h) * (4 * h));
        r.f64_block(lw.b2, h);
    }
    r.f64_block(m.ln_f_gamma_, h);
    r.f64_block(m.ln_f_beta_, h);
    if (r.remaining() != 0)
        throw io_error("weight file has " + std::to_string(r.remaining()) +
                       " trailing bytes: " + path);
    m.compute_checksum();
    return m;
}

double Model::positional(int pos, int dim) const {
    const int pair = dim / 2;
    const double freq = std::pow(10000.0, -(2.0 * pair) / config_.hidden_dim);
    const double angle = pos * freq;
    return kPeAmplitude * ((dim % 2 == 0) ? std::sin(angle) : std::cos(angle));
}

// ---------------------------------------------------------------------------
// incremental decoder core; one code path serves forward() and generate()
// ---------------------------------------------------------------------------

class DecoderState {
  public:
    DecoderState(const Model& m, const InjectionPlan* plan, bool keep_positions)
        : m_(m), plan_(plan), keep_positions_(keep_positions) {
        const auto& cfg = m_.config();
        kcache_.resize(cfg.num_layers);
        vcache_.resize(cfg.num_layers);
        act_sum_.assign(cfg.num_layers, std::vector<double>(cfg.hidden_dim, 0.0));
        act_last_.assign(cfg.num_layers, std::vector<double>(cfg.hidden_dim, 0.0));
        if (keep_positions_) act_pos_.resize(cfg.num_layers);
    }

    size_t length() const { return t_; }

    // feeds one token at position t_ and advances; logits for this position
    // are written to logits_out when non-null
    void step(int token, std::vector<double>* logits_out) {
        const auto& cfg = m_.config();
        const int h = cfg.hidden_dim;
        const int heads = cfg.num_heads;
        const int hd = h / heads;
        if (t_ >= static_cast<size_t>(cfg.max_context))
            throw data_error("context overflow: position " + std::to_string(t_) +
                             " exceeds max_context " + std::to_string(cfg.max_context));

        std::vector<double> x(h);
        const double* emb = m_.embedding().data() + static_cast<size_t>(token) * h;
        for (int j = 0; j < h; ++j) x[j] = emb[j] + m_.positional(static_cast<int>(t_), j);

        std::vector<double> normed, q, k, v, proj, ctx(h), mlp_hidden;
        for (int layer = 0; layer < cfg.num_layers; ++layer) {
            const LayerWeights& w = m_.layers()[layer];

            // x += attn(ln1(x))
            layer_norm(x, w.ln1_gamma, w.ln1_beta, normed);
            matvec(w.wq, normed, q, h, h);
            matvec(w.wk, normed, k, h, h);
            matvec(w.wv, normed, v, h, h);
            auto& kc = kcache_[layer];
            auto& vc = vcache_[layer];
            kc.insert(kc.end(), k.begin(), k.end());
            vc.insert(vc.end(), v.begin(), v.end());
            const size_t cached = t_ + 1;  // causal: all cached positions are visible
            const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
            std::fill(ctx.begin(), ctx.end(), 0.0);
            std::vector<double> scores(cached);
            for (int head = 0; head < heads; ++head) {
                const int off = head * hd;
                double maxs = -std::numeric_limits<double>::infinity();
                for (size_t p = 0; p < cached; ++p) {
                    const double* kp = kc.data() + p * h + off;
                    double s = 0.0;
                    for (int j = 0; j < hd; ++j) s += q[off + j] * kp[j];
                    scores[p] = s * scale;
                    maxs = std::max(maxs, scores[p]);
                }
                double denom = 0.0;
                for (size_t p = 0; p < cached; ++p) {
                    scores[p] = std::exp(scores[p] - maxs);
                    denom += scores[p];
                }
                for (size_t p = 0; p < cached; ++p) {
                    const double weight = scores[p] / denom;
                    const double* vp = vc.data() + p * h + off;
                    for (int j = 0; j < hd; ++j) ctx[off + j] += weight * vp[j];
                }
            }
            matvec(w.wo, ctx, proj, h, h);
            for (int j = 0; j < h; ++j) x[j] += proj[j];

            // x += mlp(ln2(x))
            layer_norm(x, w.ln2_gamma, w.ln2_beta, normed);
            matvec(w.w1, normed, mlp_hidden, 4 * h, h, &w.b1);
            for (double& m : mlp_hidden) m = gelu(m);
            matvec(w.w2, mlp_hidden, proj, h, 4 * h, &w.b2);
            for (int j = 0; j < h; ++j) x[j] += proj[j];

            // additive steering after the residual add; lambda == 0 skips the
            // addition entirely so a zero plan is bitwise identical to none
            if (plan_ != nullptr && plan_->lambda != 0.0 && plan_->applies_to(layer)) {
                const std::vector<double>& vec = plan_->vectors[layer];
                const double lambda = plan_->lambda;
                for (int j = 0; j < h; ++j) x[j] = x[j] + lambda * vec[j];
            }

            std::vector<double>& sum = act_sum_[layer];
            for (int j = 0; j < h; ++j) sum[j] += x[j];
            act_last_[layer] = x;
            if (keep_positions_) act_pos_[layer].push_back(x);
        }

        if (logits_out != nullptr) {
            layer_norm(x, m_.final_gamma(), m_.final_beta(), normed);
            logits_out->resize(cfg.vocab_size);
            for (int t = 0; t < cfg.vocab_size; ++t) {
                const double* row = m_.embedding().data() + static_cast<size_t>(t) * h;
                double acc = 0.0;
                for (int j = 0; j < h; ++j) acc += normed[j] * row[j];
                (*logits_out)[t] = acc;  // tied output head
            }
        }
        ++t_;
    }

    LayerActivations finish(PoolingMode pooling) {
        LayerActivations acts;
        acts.pooling = pooling;
        if (pooling == PoolingMode::mean_all_positions) {
            const double inv = 1.0 / static_cast<double>(t_);
            acts.per_layer = std::move(act_sum_);
            for (auto& layer : acts.per_layer)
                for (double& v : layer) v *= inv;
        } else {
            acts.per_layer = std::move(act_last_);
        }
        acts.per_position = std::move(act_pos_);
        return acts;
    }

  private:
    const Model& m_;
    const InjectionPlan* plan_;
    bool keep_positions_;
    size_t t_ = 0;
    std::vector<std::vector<double>> kcache_, vcache_;  // [layer], each [cached * h]
    std::vector<std::vector<double>> act_sum_, act_last_;
    std::vector<std::vector<std::vector<double>>> act_pos_;
};

// ---------------------------------------------------------------------------
// forward and generate
// ---------------------------------------------------------------------------

void Model::validate_plan(const InjectionPlan* plan) const {
    if (plan == nullptr) return;
    if (!std::isfinite(plan->lambda))
        throw argument_error("injection lambda must be finite");
    if (static_cast<int>(plan->vectors.size()) != config_.num_layers)
        throw argument_error("injection plan has " + std::to_string(plan->vectors.size()) +
                             " vectors, model has " + std::to_string(config_.num_layers) +
                             " layers");
    for (const auto& vec : plan->vectors)
        if (static_cast<int>(vec.size()) != config_.hidden_dim)
            throw argument_error("injection vector length " + std::to_string(vec.size()) +
                                 " does not match hidden_dim " +
                                 std::to_string(config_.hidden_dim));
    for (int idx : plan->layer_mask)
        if (idx < 0 || idx >= config_.num_layers)
            throw argument_error("layer_mask index " + std::to_string(idx) +
                                 " is out of range");
}

namespace {

void validate_tokens(const TokenSequence& seq, int vocab_size) {
    for (int t : seq.tokens)
        if (t < 0 || t >= vocab_size)
            throw argument_error("token " + std::to_string(t) +
                                 " is outside the vocabulary of size " +
                                 std::to_string(vocab_size));
}

}  // namespace

ForwardResult Model::forward(const TokenSequence& input, const InjectionPlan* plan,
                             const ForwardOptions& options) const {
    if (input.empty()) throw argument_error("forward requires at least one token");
    if (static_cast<int>(input.size()) > config_.max_context)
        throw data_error("context overflow: sequence length " + std::to_string(input.size()) +
                         " exceeds max_context " + std::to_string(config_.max_context));
    validate_tokens(input, config_.vocab_size);
    validate_plan(plan);

    DecoderState state(*this, plan, options.keep_positions);
    ForwardResult out;
    if (options.want_logits) out.logits.reserve(input.size());
    std::vector<double> logits;
    for (int tok : input.tokens) {
        state.step(tok, options.want_logits ? &logits : nullptr);
        if (options.want_logits) out.logits.push_back(logits);
    }
    out.acts = state.finish(options.pooling);
    return out;
}

GenerateOutput Model::generate(const TokenSequence& prompt, const InjectionPlan* plan,
                               const DecodeParams& decode) const {
    if (prompt.empty()) throw argument_error("generate requires a non-empty prompt");
    validate_tokens(prompt, config_.vocab_size);
    validate_plan(plan);
    if (decode.max_new_tokens < 0)
        throw argument_error("max_new_tokens must be non-negative");
    if (!std::isfinite(decode.temperature) || decode.temperature < 0.0)
        throw argument_error("temperature must be finite and non-negative");

    GenerateOutput out;
    std::vector<int> tokens = prompt.tokens;
    const int keep = std::max(1, config_.max_context - decode.max_new_tokens);
    if (static_cast<int>(tokens.size()) > keep) {
        const size_t dropped = tokens.size() - keep;
        tokens.erase(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(dropped));
        out.warnings.push_back("context overflow: dropped " + std::to_string(dropped) +
                               " oldest prompt tokens to fit max_context " +
                               std::to_string(config_.max_context));
    }

    Rng rng(decode.seed);
    DecoderState state(*this, plan, false);
    std::vector<double> logits;
    for (size_t i = 0; i < tokens.size(); ++i)
        state.step(tokens[i], i + 1 == tokens.size() ? &logits : nullptr);

    int remaining = decode.max_new_tokens;
    while (remaining > 0) {
        const int next = sample_token(logits, decode, rng);
        out.generated.tokens.push_back(next);
        --remaining;
        if (remaining == 0) break;
        if (state.length() >= static_cast<size_t>(config_.max_context)) {
            out.warnings.push_back("decode stopped at the context limit with " +
                                   std::to_string(remaining) + " tokens ungenerated");
            break;
        }
        state.step(next, &logits);
    }
    return out;
}

}  // namespace stylelab
