#include "stylelab/adapters.hpp"

#include <csignal>
#include <cstring>
#include <mutex>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

namespace stylelab {

using nlohmann::json;

// ---------------------------------------------------------------------------
// reply parsing
// ---------------------------------------------------------------------------

EmotionScores parse_scorer_reply(const std::string& body, const std::string& origin) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw data_error("scorer reply from " + origin + " is not JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("scores") || !j["scores"].is_object())
        throw data_error("scorer reply from " + origin + " lacks a 'scores' object");
    EmotionScores raw{};
    for (int e = 0; e < kEkmanSix; ++e) {
        const char* name = to_string(static_cast<Emotion>(e));
        if (!j["scores"].contains(name))
            throw data_error("scorer reply from " + origin + " is missing '" +
                             std::string(name) + "'");
        if (!j["scores"][name].is_number())
            throw data_error("scorer reply from " + origin + " has a non-numeric '" +
                             std::string(name) + "'");
        raw[static_cast<size_t>(e)] = j["scores"][name].get<double>();
    }
    try {
        return normalize_scores(raw);
    } catch (const data_error& e) {
        throw data_error(std::string(e.what()) + " (reply from " + origin + ")");
    }
}

double parse_judge_reply(const std::string& body, const std::string& origin) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw data_error("judge reply from " + origin + " is not JSON: " + e.what());
    }
    if (!j.is_object() || !j.contains("raw") || !j["raw"].is_number())
        throw data_error("judge reply from " + origin + " lacks a numeric 'raw' field");
    const double raw = j["raw"].get<double>();
    if (!std::isfinite(raw))
        throw data_error("judge reply from " + origin + " is not finite");
    return raw;
}

namespace {

std::string make_request_line(const std::string& text) {
    json j;
    j["text"] = bytes_to_json_text(text);
    return j.dump();
}

void ignore_sigpipe_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { std::signal(SIGPIPE, SIG_IGN); });
}

std::string join_argv(const std::vector<std::string>& argv) {
    std::string out;
    for (size_t i = 0; i < argv.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += argv[i];
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// subprocess engine
// ---------------------------------------------------------------------------

SubprocessLine::SubprocessLine(std::vector<std::string> argv, int timeout_ms)
    : display_(join_argv(argv)), timeout_ms_(timeout_ms) {
    if (argv.empty()) throw argument_error("subprocess command is empty");
    ignore_sigpipe_once();

    int to_child[2];    // parent writes [1], child reads [0]
    int from_child[2];  // child writes [1], parent reads [0]
    if (pipe(to_child) != 0) throw io_error("pipe failed: " + std::string(strerror(errno)));
    if (pipe(from_child) != 0) {
        close(to_child[0]);
        close(to_child[1]);
        throw io_error("pipe failed: " + std::string(strerror(errno)));
    }

    const pid_t pid = fork();
    if (pid < 0) {
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        throw io_error("fork failed: " + std::string(strerror(errno)));
    }
    if (pid == 0) {
        // child: wire the pipes to stdio and exec
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        std::vector<char*> cargv;
        cargv.reserve(argv.size() + 1);
        for (std::string& a : argv) cargv.push_back(a.data());
        cargv.push_back(nullptr);
        execvp(cargv[0], cargv.data());
        _exit(127);
    }
    child_pid_ = pid;
    to_child_ = to_child[1];
    from_child_ = from_child[0];
    close(to_child[0]);
    close(from_child[1]);
}

SubprocessLine::~SubprocessLine() { shutdown(); }

void SubprocessLine::shutdown() noexcept {
    if (to_child_ >= 0) {
        close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        close(from_child_);
        from_child_ = -1;
    }
    if (child_pid_ > 0) {
        // give the child a moment to exit on stdin EOF, then force it
        int status = 0;
        for (int i = 0; i < 20; ++i) {
            const pid_t r = waitpid(child_pid_, &status, WNOHANG);
            if (r == child_pid_ || r < 0) {
                child_pid_ = -1;
                return;
            }
            usleep(100 * 1000);
        }
        kill(child_pid_, SIGKILL);
        waitpid(child_pid_, &status, 0);
        child_pid_ = -1;
    }
}

std::string SubprocessLine::request(const std::string& line) {
    if (to_child_ < 0)
        throw io_error("subprocess '" + display_ + "' is not running");
    std::string payload = line;
    payload.push_back('\n');
    size_t written = 0;
    while (written < payload.size()) {
        const ssize_t n = write(to_child_, payload.data() + written, payload.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw io_error("write to subprocess '" + display_ +
                           "' failed: " + std::string(strerror(errno)));
        }
        written += static_cast<size_t>(n);
    }

    for (;;) {
        const size_t nl = buffer_.find('\n');
        if (nl != std::string::npos) {
            std::string reply = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return reply;
        }
        struct pollfd pfd{};
        pfd.fd = from_child_;
        pfd.events = POLLIN;
        const int pr = poll(&pfd, 1, timeout_ms_);
        if (pr == 0)
            throw io_error("subprocess '" + display_ + "' timed out after " +
                           std::to_string(timeout_ms_) + " ms");
        if (pr < 0) {
            if (errno == EINTR) continue;
            throw io_error("poll on subprocess '" + display_ +
                           "' failed: " + std::string(strerror(errno)));
        }
        char chunk[4096];
        const ssize_t n = read(from_child_, chunk, sizeof chunk);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw io_error("read from subprocess '" + display_ +
                           "' failed: " + std::string(strerror(errno)));
        }
        if (n == 0)
            throw io_error("subprocess '" + display_ + "' closed its output (exited?)");
        buffer_.append(chunk, static_cast<size_t>(n));
    }
}

SubprocessScorer::SubprocessScorer(std::vector<std::string> argv, int timeout_ms)
    : proc_(std::move(argv), timeout_ms) {}

EmotionScores SubprocessScorer::score(const std::string& text) {
    return parse_scorer_reply(proc_.request(make_request_line(text)), name());
}

std::string SubprocessScorer::name() const { return "exec:" + proc_.command(); }

SubprocessJudge::SubprocessJudge(std::vector<std::string> argv, int timeout_ms)
    : proc_(std::move(argv), timeout_ms) {}

double SubprocessJudge::raw_score(const std::string& text) {
    return parse_judge_reply(proc_.request(make_request_line(text)), name());
}

std::string SubprocessJudge::name() const { return "exec:" + proc_.command(); }

// ---------------------------------------------------------------------------
// http engine
// ---------------------------------------------------------------------------

namespace {

struct ParsedUrl {
    std::string host;
    int port = 80;
    std::string path = "/";
};

ParsedUrl parse_http_url(const std::string& url) {
    const std::string prefix = "http://";
    if (url.rfind(prefix, 0) != 0)
        throw argument_error("only http:// endpoints are supported: " + url);
    std::string rest = url.substr(prefix.size());
    ParsedUrl p;
    const size_t slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    p.path = slash == std::string::npos ? "/" : rest.substr(slash);
    const size_t colon = authority.find(':');
    if (colon != std::string::npos) {
        p.host = authority.substr(0, colon);
        p.port = static_cast<int>(parse_long_strict(authority.substr(colon + 1)));
    } else {
        p.host = authority;
    }
    if (p.host.empty() || p.port < 1 || p.port > 65535)
        throw argument_error("malformed endpoint url: " + url);
    return p;
}

std::string http_post(httplib::Client& client, const ParsedUrl& url,
                      const std::string& full_url, const std::string& body) {
    httplib::Result res = client.Post(url.path, body, "application/json");
    if (!res)
        throw io_error("request to " + full_url +
                       " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw io_error("request to " + full_url + " returned status " +
                       std::to_string(res->status));
    return res->body;
}

}  // namespace

struct HttpScorer::Impl {
    std::string url;
    ParsedUrl parsed;
    httplib::Client client;
    Impl(const std::string& u, int timeout_ms)
        : url(u), parsed(parse_http_url(u)), client(parsed.host, parsed.port) {
        client.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    }
};

HttpScorer::HttpScorer(const std::string& url, int timeout_ms)
    : impl_(std::make_unique<Impl>(url, timeout_ms)) {}

HttpScorer::~HttpScorer() = default;

EmotionScores HttpScorer::score(const std::string& text) {
    const std::string body =
        http_post(impl_->client, impl_->parsed, impl_->url, make_request_line(text));
    return parse_scorer_reply(body, impl_->url);
}

std::string HttpScorer::name() const { return impl_->url; }

struct HttpJudge::Impl {
    std::string url;
    ParsedUrl parsed;
    httplib::Client client;
    Impl(const std::string& u, int timeout_ms)
        : url(u), parsed(parse_http_url(u)), client(parsed.host, parsed.port) {
        client.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
        client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    }
};

HttpJudge::HttpJudge(const std::string& url, int timeout_ms)
    : impl_(std::make_unique<Impl>(url, timeout_ms)) {}

HttpJudge::~HttpJudge() = default;

double HttpJudge::raw_score(const std::string& text) {
    const std::string body =
        http_post(impl_->client, impl_->parsed, impl_->url, make_request_line(text));
    return parse_judge_reply(body, impl_->url);
}

std::string HttpJudge::name() const { return impl_->url; }

// ---------------------------------------------------------------------------
// factories
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_command(const std::string& command) {
    std::vector<std::string> argv;
    std::istringstream in(command);
    std::string word;
    while (in >> word) argv.push_back(word);
    if (argv.empty()) throw argument_error("empty exec: command");
    return argv;
}

}  // namespace

std::unique_ptr<Scorer> make_scorer(const std::string& spec, const std::string& data_dir) {
    if (spec == "lexicon")
        return std::make_unique<LexiconScorer>(
            LexiconScorer::load(data_dir + "/emotion_lexicon.tsv"));
    if (spec.rfind("lexicon:", 0) == 0)
        return std::make_unique<LexiconScorer>(LexiconScorer::load(spec.substr(8)));
    if (spec.rfind("exec:", 0) == 0)
        return std::make_unique<SubprocessScorer>(split_command(spec.substr(5)));
    if (spec.rfind("http://", 0) == 0) return std::make_unique<HttpScorer>(spec);
    throw argument_error("unknown scorer spec '" + spec +
                         "' (expected lexicon, lexicon:<path>, exec:<cmd>, http://...)");
}

std::unique_ptr<Judge> make_judge(const std::string& spec) {
    if (spec == "heuristic") return std::make_unique<HeuristicJudge>();
    if (spec.rfind("exec:", 0) == 0)
        return std::make_unique<SubprocessJudge>(split_command(spec.substr(5)));
    if (spec.rfind("http://", 0) == 0) return std::make_unique<HttpJudge>(spec);
    throw argument_error("unknown judge spec '" + spec +
                         "' (expected heuristic, exec:<cmd>, http://...)");
}

}  // namespace stylelab
