#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stylelab/eval.hpp"

namespace stylelab {

// ---------------------------------------------------------------------------
// Adapters that delegate scoring to an external process or HTTP endpoint.
// Wire contract (one JSON document per line / per request):
//   request:        {"text": "..."}
//   scorer reply:   {"scores": {"anger": 0.1, ..., "surprise": 0.2}}
//   judge reply:    {"raw": 3.5}
// Scorer replies are re-normalized with the shared epsilon smoothing; judge
// replies are clamped into [1, 10]. Transport failures throw io_error,
// malformed replies throw data_error.
// ---------------------------------------------------------------------------

// line-oriented child process; starts on construction, one reply line per
// request line
class SubprocessLine {
  public:
    SubprocessLine(std::vector<std::string> argv, int timeout_ms);
    ~SubprocessLine();
    SubprocessLine(const SubprocessLine&) = delete;
    SubprocessLine& operator=(const SubprocessLine&) = delete;

    std::string request(const std::string& line);
    const std::string& command() const { return display_; }

  private:
    void shutdown() noexcept;

    std::string display_;
    int timeout_ms_;
    int child_pid_ = -1;
    int to_child_ = -1;    // our write end of the child's stdin
    int from_child_ = -1;  // our read end of the child's stdout
    std::string buffer_;   // bytes read past the last newline
};

class SubprocessScorer : public Scorer {
  public:
    SubprocessScorer(std::vector<std::string> argv, int timeout_ms = 30000);
    EmotionScores score(const std::string& text) override;
    std::string name() const override;

  private:
    SubprocessLine proc_;
};

class SubprocessJudge : public Judge {
  public:
    SubprocessJudge(std::vector<std::string> argv, int timeout_ms = 30000);
    double raw_score(const std::string& text) override;
    std::string name() const override;

  private:
    SubprocessLine proc_;
};

class HttpScorer : public Scorer {
  public:
    explicit HttpScorer(const std::string& url, int timeout_ms = 30000);
    ~HttpScorer() override;
    EmotionScores score(const std::string& text) override;
    std::string name() const override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class HttpJudge : public Judge {
  public:
    explicit HttpJudge(const std::string& url, int timeout_ms = 30000);
    ~HttpJudge() override;
    double raw_score(const std::string& text) override;
    std::string name() const override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// shared reply parsing, also used by the HTTP adapters and tests
EmotionScores parse_scorer_reply(const std::string& body, const std::string& origin);
double parse_judge_reply(const std::string& body, const std::string& origin);

// Factories used by the command line tool.
//   scorer spec: "lexicon" | "lexicon:<path>" | "exec:<command line>" | "http://..."
//   judge spec:  "heuristic" | "exec:<command line>" | "http://..."
// "lexicon" without a path loads <data_dir>/emotion_lexicon.tsv. exec
// commands are split on whitespace, no shell involved.
std::unique_ptr<Scorer> make_scorer(const std::string& spec, const std::string& data_dir);
std::unique_ptr<Judge> make_judge(const std::string& spec);

}  // namespace stylelab
