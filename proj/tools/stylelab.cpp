#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stylelab/adapters.hpp"
#include "stylelab/corpus.hpp"
#include "stylelab/distributions.hpp"
#include "stylelab/harness.hpp"
#include "stylelab/model.hpp"
#include "stylelab/report.hpp"
#include "stylelab/stats.hpp"
#include "stylelab/steering.hpp"

namespace {

using namespace stylelab;
using nlohmann::json;

// shared model construction flags
struct ModelArgs {
    std::string weights_path;
    int layers = 4;
    int hidden_dim = 64;
    int heads = 4;
    int vocab = 256;
    int max_context = 512;
    uint64_t seed = 42;
};

void add_model_flags(CLI::App* cmd, ModelArgs& args) {
    cmd->add_option("--model", args.weights_path, "load model weights from this file");
    cmd->add_option("--layers", args.layers, "transformer blocks (seeded init)")
        ->capture_default_str();
    cmd->add_option("--hidden-dim", args.hidden_dim, "residual width (seeded init)")
        ->capture_default_str();
    cmd->add_option("--heads", args.heads, "attention heads (seeded init)")
        ->capture_default_str();
    cmd->add_option("--vocab", args.vocab, "vocabulary size (seeded init)")
        ->capture_default_str();
    cmd->add_option("--max-context", args.max_context, "maximum sequence length")
        ->capture_default_str();
    cmd->add_option("--model-seed", args.seed, "weight init seed")->capture_default_str();
}

Model make_model(const ModelArgs& args) {
    if (!args.weights_path.empty()) return Model::load(args.weights_path, args.max_context);
    ModelConfig cfg;
    cfg.num_layers = args.layers;
    cfg.hidden_dim = args.hidden_dim;
    cfg.num_heads = args.heads;
    cfg.vocab_size = args.vocab;
    cfg.max_context = args.max_context;
    cfg.seed = args.seed;
    return Model(cfg);
}

std::string resolve(const std::string& value, const std::string& data_dir,
                    const char* default_name) {
    return value.empty() ? data_dir + "/" + default_name : value;
}

void warn_lambda(double lambda) {
    if (std::fabs(lambda) > kLambdaWarnThreshold + 1e-12)
        std::fprintf(stderr,
                     "warning: |lambda| = %g exceeds %.2f; generations tend to degrade\n",
                     std::fabs(lambda), kLambdaWarnThreshold);
}

json anova_to_json(const RmAnovaResult& r) {
    auto effect = [](const AnovaEffect& e) {
        json m;
        m["degenerate"] = e.mauchly.degenerate;
        m["w"] = e.mauchly.w;
        m["df"] = e.mauchly.df;
        if (!e.mauchly.degenerate) {
            m["chi_squared"] = e.mauchly.chi_squared;
            m["p"] = e.mauchly.p;
        }
        return json{{"name", e.name},
                    {"ss", e.ss},
                    {"df", e.df},
                    {"ms", e.ms},
                    {"ss_error", e.ss_error},
                    {"df_error", e.df_error},
                    {"ms_error", e.ms_error},
                    {"f", e.f},
                    {"p", e.p},
                    {"partial_eta_sq", e.partial_eta_sq},
                    {"gg_epsilon", e.epsilon},
                    {"gg_df", e.df_gg},
                    {"gg_df_error", e.df_error_gg},
                    {"gg_p", e.p_gg},
                    {"mauchly", m}};
    };
    return json{{"n_subjects", r.n_subjects},
                {"levels_a", r.levels_a},
                {"levels_b", r.levels_b},
                {"grand_mean", r.grand_mean},
                {"ss_subjects", r.ss_subjects},
                {"ss_total", r.ss_total},
                {"a", effect(r.a)},
                {"b", effect(r.b)},
                {"ab", effect(r.ab)}};
}

json block_icc_to_json(const BlockIccSummary& s) {
    json j{{"blocks_used", s.blocks_used},
           {"blocks_skipped", s.blocks_skipped},
           {"min_raters", s.min_raters},
           {"max_raters", s.max_raters}};
    if (s.blocks_used > 0) {
        j["icc_2_1"] = s.icc_single;
        j["icc_2_1_band"] = icc_band(s.icc_single);
        j["icc_2_k"] = s.icc_average;
        j["icc_2_k_band"] = icc_band(s.icc_average);
    }
    return j;
}

void print_row_errors(const std::vector<std::string>& errors, const char* what) {
    if (errors.empty()) return;
    std::fprintf(stderr, "%zu %s row(s) rejected:\n", errors.size(), what);
    const size_t shown = std::min<size_t>(errors.size(), 10);
    for (size_t i = 0; i < shown; ++i)
        std::fprintf(stderr, "  %s\n", errors[i].c_str());
    if (errors.size() > shown)
        std::fprintf(stderr, "  ... and %zu more\n", errors.size() - shown);
}

// ---------------------------------------------------------------------------
// subcommand bodies
// ---------------------------------------------------------------------------

void cmd_init_model(const ModelArgs& margs, const std::string& out) {
    const Model model = make_model(margs);
    model.save(out);
    std::printf("wrote %s (checksum %s)\n", out.c_str(),
                hex64(model.weight_checksum()).c_str());
}

void cmd_build_vectors(const ModelArgs& margs, const std::string& data_dir,
                       const std::string& corpus_path, const std::string& mapping_path,
                       const std::string& pooling, const std::string& out) {
    const Model model = make_model(margs);
    const EkmanMapping mapping =
        EkmanMapping::load(resolve(mapping_path, data_dir, "ekman_mapping.tsv"));
    CorpusLoadReport rep;
    const Corpus corpus = Corpus::load(corpus_path, mapping, &rep);
    BuildOptions opts;
    opts.pooling = pooling_from_string(pooling);
    const StyleVectorSet set = build_style_vectors(model, corpus, opts);
    save_style_vectors(set, out);

    std::printf(
        "corpus: %d lines, %d kept, dropped: %d ambiguous, %d unmapped, %d duplicate, "
        "%zu malformed\n",
        rep.data_lines, rep.kept, rep.dropped_ambiguous, rep.dropped_unmapped,
        rep.dropped_duplicate, rep.row_errors.size());
    print_row_errors(rep.row_errors, "corpus");
    for (int label = 0; label < kAllLabels; ++label)
        std::printf("  %-9s %4d texts\n", to_string(static_cast<Emotion>(label)),
                    corpus.counts()[static_cast<size_t>(label)]);
    std::printf("model checksum: %s\ncorpus hash:    %s\n",
                hex64(model.weight_checksum()).c_str(), hex64(corpus.content_hash()).c_str());
    std::printf("per-layer vector norms:\n");
    for (int t = 0; t < kEkmanSix; ++t) {
        std::printf("  %-9s", to_string(static_cast<Emotion>(t)));
        for (int layer = 0; layer < set.num_layers; ++layer)
            std::printf(" %8.4f", set.layer_norm_of(static_cast<Emotion>(t), layer));
        std::printf("\n");
    }
    std::printf("wrote %s\n", out.c_str());
}

void cmd_generate(const ModelArgs& margs, const std::string& data_dir,
                  const std::string& vectors_path, std::string prompt, int prompt_id,
                  const std::string& prompts_path, const std::string& target_name,
                  double lambda, uint64_t seed, const DecodeParams& decode) {
    const Model model = make_model(margs);
    std::optional<Emotion> target;
    if (!target_name.empty()) {
        const Emotion e = emotion_from_string(target_name);
        if (static_cast<int>(e) >= kEkmanSix)
            throw argument_error("target must be one of the six steerable emotions");
        target = e;
    }
    if (prompt.empty()) {
        const std::vector<std::string> prompts =
            load_prompts(resolve(prompts_path, data_dir, "prompts.txt"));
        if (prompt_id < 1 || prompt_id > static_cast<int>(prompts.size()))
            throw argument_error("--prompt-id outside [1, " +
                                 std::to_string(prompts.size()) + "]");
        prompt = prompts[static_cast<size_t>(prompt_id - 1)];
    } else {
        prompt_id = 0;  // ad-hoc prompt: seed mixes with id 0
    }
    warn_lambda(lambda);

    StyleVectorSet set;
    const StyleVectorSet* set_ptr = nullptr;
    if (target.has_value() && lambda != 0.0) {
        if (vectors_path.empty())
            throw argument_error("steered generation needs --vectors");
        set = load_style_vectors(vectors_path);
        check_compatible(set, model);
        set_ptr = &set;
    }
    std::vector<std::string> warnings;
    const std::string text = generate_row(model, set_ptr, prompt, prompt_id, target, lambda,
                                          seed, decode, &warnings);
    for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("%s\n", text.c_str());
}

void cmd_sweep(const ModelArgs& margs, const std::string& data_dir,
               const std::string& vectors_path, const std::string& prompts_path,
               uint64_t seed, const DecodeParams& decode, std::vector<double> lambdas,
               const std::string& out) {
    const Model model = make_model(margs);
    const StyleVectorSet set = load_style_vectors(vectors_path);
    check_compatible(set, model);
    const std::vector<std::string> prompts =
        load_prompts(resolve(prompts_path, data_dir, "prompts.txt"));

    SweepOptions opts;
    opts.seed = seed;
    opts.decode = decode;
    if (!lambdas.empty()) opts.lambdas = std::move(lambdas);
    for (double l : opts.lambdas) warn_lambda(l);
    opts.progress = [](int done, int total) {
        if (done % 50 == 0 || done == total)
            std::fprintf(stderr, "\rsweep: %d/%d rows", done, total);
        if (done == total) std::fprintf(stderr, "\n");
    };
    const ResultsFile results = run_sweep(model, set, prompts, opts);
    save_results(results, out);
    std::printf("wrote %zu rows to %s\n", results.rows.size(), out.c_str());
}

void cmd_score(const std::string& data_dir, const std::string& results_path,
               const std::string& out, const std::string& scorer_spec,
               const std::string& judge_spec, const std::string& function_words_path) {
    ResultsFile results = load_results(results_path);
    const std::unique_ptr<Scorer> scorer = make_scorer(scorer_spec, data_dir);
    const std::unique_ptr<Judge> judge = make_judge(judge_spec);
    const FunctionWordSet function_words =
        FunctionWordSet::load(resolve(function_words_path, data_dir, "function_words.txt"));
    score_results(results, *scorer, *judge, &function_words);
    save_results(results, out);
    std::printf("scored %zu rows with %s / %s -> %s\n", results.rows.size(),
                scorer->name().c_str(), judge->name().c_str(), out.c_str());
}

void cmd_stats(const std::string& data_dir, const std::string& ratings_path,
               const std::string& prompts_path, const std::string& results_path,
               const std::string& prescreen_path, const std::string& json_out) {
    const std::vector<std::string> prompts =
        load_prompts(resolve(prompts_path, data_dir, "prompts.txt"));
    const int prompt_count = static_cast<int>(prompts.size());
    RatingsLoadReport load_rep;
    std::vector<RatingRecord> records = ingest_ratings(ratings_path, prompt_count, &load_rep);
    print_row_errors(load_rep.row_errors, "rating");
    json j;
    j["participants_total"] = participant_ids(records).size();
    j["rows_rejected"] = load_rep.row_errors.size();

    if (!prescreen_path.empty()) {
        RatingsLoadReport pre_rep;
        const std::vector<RatingRecord> pre =
            ingest_ratings(prescreen_path, prompt_count, &pre_rep);
        print_row_errors(pre_rep.row_errors, "prescreen");
        std::map<std::string, std::vector<PrescreenItem>> by_participant;
        for (const RatingRecord& rec : pre) {
            PrescreenItem item;
            item.true_label = rec.target;
            for (int d = 0; d < kEkmanSix; ++d) {
                const double v = rec.values[static_cast<size_t>(d)];
                if (std::isnan(v))
                    throw data_error("prescreen ratings must not have missing intensities");
                item.intensities[static_cast<size_t>(d)] = v;
            }
            by_participant[rec.participant_id].push_back(item);
        }
        std::printf("prescreen (%zu participants):\n", by_participant.size());
        std::vector<std::string> passing;
        json jp = json::object();
        for (const auto& [id, items] : by_participant) {
            int correct = 0;
            for (const PrescreenItem& item : items)
                if (prescreen_item_correct(item)) ++correct;
            const bool pass = prescreen_pass(items);
            std::printf("  %-12s %d/%zu correct -> %s\n", id.c_str(), correct, items.size(),
                        pass ? "pass" : "fail");
            jp[id] = json{{"correct", correct}, {"pass", pass}};
            if (pass) passing.push_back(id);
        }
        j["prescreen"] = jp;
        const size_t before = records.size();
        std::erase_if(records, [&passing](const RatingRecord& rec) {
            return std::find(passing.begin(), passing.end(), rec.participant_id) ==
                   passing.end();
        });
        if (records.empty())
            throw data_error("no participants passed the prescreen");
        std::printf("prescreen kept %zu of %zu rating rows\n\n", records.size(), before);
    }

    const ImputationSummary imp = impute_missing(records);
    std::printf("ratings: %zu rows, %zu participants, %d missing values imputed\n\n",
                records.size(), participant_ids(records).size(), imp.imputed);
    j["rows"] = records.size();
    j["participants_analyzed"] = participant_ids(records).size();
    j["imputation"] = json{{"missing_before", imp.missing_before}, {"imputed", imp.imputed}};

    for (int dim = 0; dim < kRatingDimCount; ++dim) {
        const char* dname = rating_dim_name(dim);
        std::printf("== dimension: %s ==\n", dname);
        const BlockIccSummary icc = ratings_block_icc(records, dim);
        std::printf("%s\n", render_block_icc_text(icc).c_str());
        const auto cube = ratings_to_anova_data(records, dim);
        const RmAnovaResult anova = rm_anova_two_way(cube, "target", "lambda");
        std::printf("%s\n", render_anova_text(anova).c_str());
        j["dimensions"][dname] = {{"icc", block_icc_to_json(icc)},
                                  {"anova", anova_to_json(anova)}};
    }

    if (!results_path.empty()) {
        const ResultsFile results = load_results(results_path);
        const SweepCurves curves = curves_from_results(results);
        const auto human = mean_rating_curves(records);
        std::array<Curve, kEkmanSix> human_diag{};
        std::array<Curve, kEkmanSix> model_diag{};
        for (int t = 0; t < kEkmanSix; ++t) {
            const size_t ts = static_cast<size_t>(t);
            human_diag[ts] = human[ts][ts];
            model_diag[ts] = curves.values[ts][ts];
        }
        const AlignmentResult align = align_human_model(human_diag, model_diag);
        // constant curves (e.g. a scorer that never fires) have no defined
        // correlation; report n/a instead of failing
        auto safe_pearson = [](const Curve& a, const Curve& b) {
            try {
                return pearson(std::vector<double>{a.begin(), a.end()},
                               std::vector<double>{b.begin(), b.end()});
            } catch (const numeric_error&) {
                return std::numeric_limits<double>::quiet_NaN();
            }
        };
        auto cell = [](double r) {
            if (std::isnan(r)) return std::string("n/a");
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", r);
            return std::string(buf);
        };
        std::printf("human vs scorer correlation over the lambda grid:\n");
        std::printf("  %-9s %18s %22s\n", "target", "r(target dim)", "r(comprehensibility)");
        for (int t = 0; t < kEkmanSix; ++t) {
            const size_t ts = static_cast<size_t>(t);
            const EmotionAlignment& ea = align.per_emotion[ts];
            const double r_target =
                ea.defined ? ea.r : std::numeric_limits<double>::quiet_NaN();
            const double r_compr =
                safe_pearson(curves.values[ts][kEkmanSix], human[ts][kEkmanSix]);
            std::printf("  %-9s %18s %22s\n", to_string(static_cast<Emotion>(t)),
                        cell(r_target).c_str(), cell(r_compr).c_str());
            if (!ea.defined)
                std::fprintf(stderr, "note: %s intensity correlation undefined: %s\n",
                             to_string(static_cast<Emotion>(t)), ea.error.c_str());
            j["correlations"][to_string(static_cast<Emotion>(t))] = {
                {"target_dim", r_target}, {"comprehensibility", r_compr}};
        }
        std::printf("  mean r across emotions: %s\n", cell(align.mean_r).c_str());
        j["mean_r"] = align.mean_r;
    }

    if (!json_out.empty()) {
        write_text_file(json_out, j.dump(2) + "\n");
        std::printf("wrote %s\n", json_out.c_str());
    }
}

void cmd_report(const std::string& results_path, const std::string& ratings_path,
                const std::string& out_dir, double heatmap_lambda) {
    const ResultsFile results = load_results(results_path);
    std::vector<RatingRecord> records;
    const std::vector<RatingRecord>* ratings = nullptr;
    if (!ratings_path.empty()) {
        RatingsLoadReport rep;
        records = ingest_ratings(ratings_path,
                                 static_cast<int>(results.meta.prompts.size()), &rep);
        print_row_errors(rep.row_errors, "rating");
        const ImputationSummary imp = impute_missing(records);
        if (imp.imputed > 0)
            std::fprintf(stderr, "note: imputed %d missing rating values\n", imp.imputed);
        ratings = &records;
    }
    const ReportOutput out = write_report(results, ratings, out_dir, heatmap_lambda);
    for (const std::string& w : out.warnings)
        std::fprintf(stderr, "warning: %s\n", w.c_str());
    for (const std::string& f : out.files) std::printf("wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stylelab: a desk-scale activation steering laboratory"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI/TOML file "
                                   "(command-line flags take precedence)");
    std::string data_dir = "data";
    app.add_option("--data-dir", data_dir, "directory with bundled data files")
        ->capture_default_str();

    // init-model
    auto* init = app.add_subcommand("init-model", "write seeded model weights to a file");
    ModelArgs init_margs;
    add_model_flags(init, init_margs);
    std::string init_out;
    init->add_option("--out", init_out, "weight file to write")->required();
    init->callback([&] { cmd_init_model(init_margs, init_out); });

    // build-vectors
    auto* bv = app.add_subcommand("build-vectors",
                                  "compute per-layer style vectors from a labeled corpus");
    ModelArgs bv_margs;
    add_model_flags(bv, bv_margs);
    std::string bv_corpus, bv_mapping, bv_pooling = "mean", bv_out;
    bv->add_option("--corpus", bv_corpus, "labeled corpus TSV")->required();
    bv->add_option("--mapping", bv_mapping, "raw-to-coarse label mapping TSV");
    bv->add_option("--pooling", bv_pooling, "mean|last")->capture_default_str();
    bv->add_option("--out", bv_out, "style vector JSON to write")->required();
    bv->callback([&] {
        cmd_build_vectors(bv_margs, data_dir, bv_corpus, bv_mapping, bv_pooling, bv_out);
    });

    // generate
    auto* gen = app.add_subcommand("generate", "generate one steered continuation");
    ModelArgs gen_margs;
    add_model_flags(gen, gen_margs);
    std::string gen_vectors, gen_prompt, gen_prompts_path, gen_target;
    int gen_prompt_id = 0;
    double gen_lambda = 0.0;
    uint64_t gen_seed = 42;
    DecodeParams gen_decode;
    gen->add_option("--vectors", gen_vectors, "style vector JSON");
    gen->add_option("--prompt", gen_prompt, "prompt text");
    gen->add_option("--prompt-id", gen_prompt_id, "1-based prompt from the prompt file");
    gen->add_option("--prompts", gen_prompts_path, "prompt file");
    gen->add_option("--target", gen_target, "one of the six emotions");
    gen->add_option("--lambda", gen_lambda, "injection strength")->capture_default_str();
    gen->add_option("--seed", gen_seed, "sweep seed (mixed with the prompt id)")
        ->capture_default_str();
    gen->add_option("--temperature", gen_decode.temperature)->capture_default_str();
    gen->add_option("--top-k", gen_decode.top_k)->capture_default_str();
    gen->add_option("--max-new-tokens", gen_decode.max_new_tokens)->capture_default_str();
    gen->callback([&] {
        if (gen_prompt.empty() && gen_prompt_id == 0)
            throw argument_error("generate needs --prompt or --prompt-id");
        cmd_generate(gen_margs, data_dir, gen_vectors, gen_prompt, gen_prompt_id,
                     gen_prompts_path, gen_target, gen_lambda, gen_seed, gen_decode);
    });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run the full prompt x target x lambda grid");
    ModelArgs sweep_margs;
    add_model_flags(sweep, sweep_margs);
    std::string sweep_vectors, sweep_prompts, sweep_out;
    uint64_t sweep_seed = 42;
    DecodeParams sweep_decode;
    std::vector<double> sweep_lambdas;
    sweep->add_option("--vectors", sweep_vectors, "style vector JSON")->required();
    sweep->add_option("--prompts", sweep_prompts, "prompt file");
    sweep->add_option("--seed", sweep_seed, "sweep seed")->capture_default_str();
    sweep->add_option("--temperature", sweep_decode.temperature)->capture_default_str();
    sweep->add_option("--top-k", sweep_decode.top_k)->capture_default_str();
    sweep->add_option("--max-new-tokens", sweep_decode.max_new_tokens)->capture_default_str();
    sweep->add_option("--lambdas", sweep_lambdas, "comma-separated lambda list")
        ->delimiter(',');
    sweep->add_option("--out", sweep_out, "results JSONL to write")->required();
    sweep->callback([&] {
        cmd_sweep(sweep_margs, data_dir, sweep_vectors, sweep_prompts, sweep_seed,
                  sweep_decode, sweep_lambdas, sweep_out);
    });

    // score
    auto* score = app.add_subcommand("score", "apply a scorer and judge to sweep results");
    std::string score_results_path, score_out, score_scorer = "lexicon",
                score_judge = "heuristic", score_function_words;
    score->add_option("--results", score_results_path, "results JSONL")->required();
    score->add_option("--out", score_out, "scored results JSONL to write")->required();
    score->add_option("--scorer", score_scorer,
                      "lexicon | lexicon:<path> | exec:<cmd> | http://...")
        ->capture_default_str();
    score->add_option("--judge", score_judge, "heuristic | exec:<cmd> | http://...")
        ->capture_default_str();
    score->add_option("--function-words", score_function_words, "function word list");
    score->callback([&] {
        cmd_score(data_dir, score_results_path, score_out, score_scorer, score_judge,
                  score_function_words);
    });

    // stats
    auto* stats = app.add_subcommand("stats", "ratings statistics: ICC, RM-ANOVA, correlation");
    std::string stats_ratings, stats_prompts, stats_results, stats_prescreen, stats_json;
    stats->add_option("--ratings", stats_ratings, "ratings CSV")->required();
    stats->add_option("--prompts", stats_prompts, "prompt file (defines valid prompt ids)");
    stats->add_option("--results", stats_results, "scored results JSONL for correlations");
    stats->add_option("--prescreen", stats_prescreen,
                      "prescreen ratings CSV; failing participants are excluded");
    stats->add_option("--json", stats_json, "write the full report as JSON");
    stats->callback([&] {
        cmd_stats(data_dir, stats_ratings, stats_prompts, stats_results, stats_prescreen,
                  stats_json);
    });

    // report
    auto* report = app.add_subcommand("report", "render SVG plots and summary tables");
    std::string report_results, report_ratings, report_out = "report";
    double report_heatmap_lambda = 0.20;
    report->add_option("--results", report_results, "scored results JSONL")->required();
    report->add_option("--ratings", report_ratings, "ratings CSV to overlay");
    report->add_option("--out-dir", report_out, "output directory")->capture_default_str();
    report->add_option("--heatmap-lambda", report_heatmap_lambda,
                       "lambda grid value for the target x dimension heatmap")
        ->capture_default_str();
    report->callback([&] {
        cmd_report(report_results, report_ratings, report_out, report_heatmap_lambda);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const argument_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const data_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
