#include "stylelab/steering.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace stylelab {

using nlohmann::json;

const std::vector<std::vector<double>>& StyleVectorSet::for_emotion(Emotion e) const {
    const int idx = static_cast<int>(e);
    if (idx < 0 || idx >= kEkmanSix)
        throw argument_error(std::string("no style vector for label '") + to_string(e) + "'");
    return vectors[static_cast<size_t>(idx)];
}

double StyleVectorSet::layer_norm_of(Emotion e, int layer) const {
    const auto& vs = for_emotion(e);
    if (layer < 0 || layer >= static_cast<int>(vs.size()))
        throw argument_error("layer index out of range: " + std::to_string(layer));
    double acc = 0.0;
    for (double v : vs[static_cast<size_t>(layer)]) acc += v * v;
    return std::sqrt(acc);
}

uint64_t StyleVectorSet::content_hash() const {
    Fnv1a64 h;
    h.update_u64(static_cast<uint64_t>(num_layers));
    h.update_u64(static_cast<uint64_t>(hidden_dim));
    h.update_u64(model_checksum);
    h.update_u64(corpus_hash);
    h.update(to_string(pooling));
    for (const auto& per_layer : vectors)
        for (const auto& layer : per_layer)
            for (double v : layer) h.update_double(v);
    return h.digest();
}

MeanActivation collect_mean_activation(const Model& model,
                                       const std::vector<TokenSequence>& samples,
                                       PoolingMode pooling, std::string label) {
    if (samples.empty())
        throw argument_error("collect_mean_activation needs at least one sample");
    const int m = model.config().num_layers;
    const int h = model.config().hidden_dim;

    MeanActivation out;
    out.label = std::move(label);
    out.pooling = pooling;
    out.sample_count = static_cast<int>(samples.size());
    out.per_layer.assign(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(h), 0.0));

    ForwardOptions fopts;
    fopts.pooling = pooling;
    fopts.want_logits = false;
    for (const TokenSequence& seq : samples) {
        const ForwardResult res = model.forward(seq, nullptr, fopts);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < h; ++j)
                out.per_layer[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
                    res.acts.per_layer[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    for (auto& layer : out.per_layer)
        for (double& v : layer) v /= out.sample_count;
    return out;
}

std::vector<std::vector<double>> style_vector_from_means(
    const MeanActivation& target, const std::vector<MeanActivation>& contrasts) {
    if (contrasts.empty())
        throw argument_error("style_vector_from_means needs at least one contrast mean");
    const size_t m = target.per_layer.size();
    const size_t h = m == 0 ? 0 : target.per_layer[0].size();
    for (const MeanActivation& c : contrasts) {
        if (c.per_layer.size() != m)
            throw argument_error("contrast mean layer count does not match the target");
        for (const auto& layer : c.per_layer)
            if (layer.size() != h)
                throw argument_error("contrast mean width does not match the target");
    }
    for (const auto& layer : target.per_layer)
        if (layer.size() != h)
            throw argument_error("target mean is not rectangular");

    const double s = static_cast<double>(contrasts.size());
    std::vector<std::vector<double>> v(m, std::vector<double>(h, 0.0));
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < h; ++j) {
            double contrast = 0.0;
            for (const MeanActivation& c : contrasts) contrast += c.per_layer[i][j];
            v[i][j] = target.per_layer[i][j] - contrast / s;
        }
    return v;
}

StyleVectorSet build_style_vectors(const Model& model, const Corpus& corpus,
                                   const BuildOptions& options) {
    // group tokenized, truncated samples by class
    std::array<std::vector<TokenSequence>, kAllLabels> grouped;
    for (const LabeledText& item : corpus.items())
        grouped[static_cast<size_t>(item.label)].push_back(
            truncate_tokens(tokenize(item.text)));

    std::array<MeanActivation, kAllLabels> means;
    for (int label = 0; label < kAllLabels; ++label) {
        const Emotion e = static_cast<Emotion>(label);
        if (grouped[static_cast<size_t>(label)].empty())
            throw missing_label_error(std::string("corpus has no texts labeled '") +
                                      to_string(e) + "'; every class needs at least one");
        means[static_cast<size_t>(label)] = collect_mean_activation(
            model, grouped[static_cast<size_t>(label)], options.pooling, to_string(e));
    }

    StyleVectorSet set;
    set.num_layers = model.config().num_layers;
    set.hidden_dim = model.config().hidden_dim;
    set.model_checksum = model.weight_checksum();
    set.corpus_hash = corpus.content_hash();
    set.pooling = options.pooling;
    for (int label = 0; label < kAllLabels; ++label)
        set.sample_counts[static_cast<size_t>(label)] =
            means[static_cast<size_t>(label)].sample_count;
    for (int target = 0; target < kEkmanSix; ++target) {
        // contrasts: the other five emotions plus neutral
        std::vector<MeanActivation> contrasts;
        contrasts.reserve(kAllLabels - 1);
        for (int c = 0; c < kAllLabels; ++c)
            if (c != target) contrasts.push_back(means[static_cast<size_t>(c)]);
        set.vectors[static_cast<size_t>(target)] =
            style_vector_from_means(means[static_cast<size_t>(target)], contrasts);
    }
    return set;
}

namespace {
constexpr const char* kVectorFormat = "stylelab-style-vectors";
constexpr int kVectorVersion = 1;
}  // namespace

void save_style_vectors(const StyleVectorSet& set, const std::string& path) {
    json j;
    j["format"] = kVectorFormat;
    j["version"] = kVectorVersion;
    j["num_layers"] = set.num_layers;
    j["hidden_dim"] = set.hidden_dim;
    j["model_checksum"] = hex64(set.model_checksum);
    j["corpus_hash"] = hex64(set.corpus_hash);
    j["pooling"] = to_string(set.pooling);
    json counts = json::object();
    for (int label = 0; label < kAllLabels; ++label)
        counts[to_string(static_cast<Emotion>(label))] = set.sample_counts[static_cast<size_t>(label)];
    j["sample_counts"] = counts;
    json vectors = json::object();
    for (int target = 0; target < kEkmanSix; ++target)
        vectors[to_string(static_cast<Emotion>(target))] = set.vectors[static_cast<size_t>(target)];
    j["vectors"] = vectors;
    write_text_file(path, j.dump(2) + "\n");
}

StyleVectorSet load_style_vectors(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw data_error("cannot parse style vector file " + path + ": " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kVectorFormat)
            throw data_error("not a style vector file: " + path);
        if (j.at("version").get<int>() != kVectorVersion)
            throw data_error("unsupported style vector version in " + path);
        StyleVectorSet set;
        set.num_layers = j.at("num_layers").get<int>();
        set.hidden_dim = j.at("hidden_dim").get<int>();
        set.model_checksum = parse_hex64(j.at("model_checksum").get<std::string>());
        set.corpus_hash = parse_hex64(j.at("corpus_hash").get<std::string>());
        set.pooling = pooling_from_string(j.at("pooling").get<std::string>());
        if (set.num_layers < 1 || set.hidden_dim < 1)
            throw data_error("invalid dimensions in style vector file " + path);
        if (j.contains("sample_counts"))
            for (int label = 0; label < kAllLabels; ++label) {
                const char* name = to_string(static_cast<Emotion>(label));
                if (j["sample_counts"].contains(name))
                    set.sample_counts[static_cast<size_t>(label)] =
                        j["sample_counts"][name].get<int>();
            }
        const json& vectors = j.at("vectors");
        for (int target = 0; target < kEkmanSix; ++target) {
            const char* name = to_string(static_cast<Emotion>(target));
            if (!vectors.contains(name))
                throw data_error(std::string("style vector file is missing '") + name +
                                 "': " + path);
            auto& out = set.vectors[static_cast<size_t>(target)];
            out = vectors[name].get<std::vector<std::vector<double>>>();
            if (static_cast<int>(out.size()) != set.num_layers)
                throw data_error(std::string("'") + name + "' has wrong layer count in " + path);
            for (const auto& layer : out)
                if (static_cast<int>(layer.size()) != set.hidden_dim)
                    throw data_error(std::string("'") + name +
                                     "' has wrong vector length in " + path);
        }
        return set;
    } catch (const json::exception& e) {
        throw data_error("malformed style vector file " + path + ": " + e.what());
    }
}

void check_compatible(const StyleVectorSet& set, const Model& model) {
    if (set.num_layers != model.config().num_layers ||
        set.hidden_dim != model.config().hidden_dim)
        throw data_error("style vectors were built for a " + std::to_string(set.num_layers) +
                         "-layer, " + std::to_string(set.hidden_dim) +
                         "-dim model; this model is " +
                         std::to_string(model.config().num_layers) + "-layer, " +
                         std::to_string(model.config().hidden_dim) + "-dim");
    if (set.model_checksum != model.weight_checksum())
        throw data_error("style vectors were built for model checksum " +
                         hex64(set.model_checksum) + " but this model has checksum " +
                         hex64(model.weight_checksum()));
}

InjectionPlan make_plan(const StyleVectorSet& set, Emotion target, double lambda,
                        std::vector<int> layer_mask) {
    InjectionPlan plan;
    plan.vectors = std::span<const std::vector<double>>(set.for_emotion(target));
    plan.lambda = lambda;
    plan.layer_mask = std::move(layer_mask);
    return plan;
}

SteeredGeneration steer_generate(const Model& model, const std::string& prompt,
                                 const StyleVectorSet& set, Emotion target,
                                 double lambda, const DecodeParams& decode,
                                 std::vector<int> layer_mask) {
    check_compatible(set, model);
    SteeredGeneration g;
    g.prompt = prompt;
    g.target = target;
    g.lambda = lambda;
    g.layer_mask = layer_mask;
    g.decode = decode;
    g.model_checksum = model.weight_checksum();
    g.vectors_hash = set.content_hash();
    g.corpus_hash = set.corpus_hash;

    const InjectionPlan plan = make_plan(set, target, lambda, std::move(layer_mask));
    GenerateOutput out = model.generate(tokenize(prompt), &plan, decode);
    g.text = detokenize(out.generated);
    g.tokens = std::move(out.generated);
    g.warnings = std::move(out.warnings);
    return g;
}

}  // namespace stylelab
