#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "t4f/corpus.hpp"
#include "t4f/io.hpp"
#include "t4f/pipeline.hpp"
#include "t4f/resources.hpp"
#include "t4f/topics.hpp"

namespace httplib {
class Server;
}

namespace t4f::gateway {

using io::Json;
using Params = std::multimap<std::string, std::string>;

/// Bodies above this size are replaced by a 413 error.
inline constexpr std::size_t kMaxBodyBytes = 10u << 20;

/// Everything the read-only service answers from. Immutable once built.
struct ServiceState {
    std::shared_ptr<const Resources> resources;
    text::PreparedCorpus prep;
    std::optional<topics::TopicModel> model;
    /// Top topic per tweet (aligned with the snapshot) when a model is loaded.
    std::vector<std::uint32_t> topic_of;
    /// Task results by run id.
    std::map<std::string, Json> runs;

    /// Normalizes the snapshot when needed, infers topics with `model`, and reads
    /// every *.json file of `runs_dir` as a run named after its file stem.
    static ServiceState build(std::shared_ptr<const Resources> res, corpus::CorpusSnapshot snapshot,
                              std::optional<topics::TopicModel> model = std::nullopt,
                              const std::optional<std::filesystem::path>& runs_dir = std::nullopt);
};

/// [{id, task, accuracy, baseline, p_value}] in id order.
Json run_index(const std::map<std::string, Json>& runs);

/// {topic, words: [{word, count}]}
Json topic_words_json(const topics::TopicModel& model, std::uint32_t topic, std::size_t n);

struct Response {
    int status = 200;
    std::string body;
};

/// Maps API paths to library calls. Bodies are canonical JSON; errors are {"error": message}.
class Service {
public:
    explicit Service(std::shared_ptr<const ServiceState> state) : state_(std::move(state)) {}

    Response handle(std::string_view path, const Params& params) const;
    const ServiceState& state() const { return *state_; }

private:
    std::shared_ptr<const ServiceState> state_;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    bool cors = false;
    std::optional<std::filesystem::path> static_dir;
};

/// HTTP front end for a Service.
class HttpServer {
public:
    HttpServer(std::shared_ptr<const Service> service, ServerOptions options);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and returns the port. Throws t4f::Error when the port is taken.
    int bind();
    /// Serves until stop(); bind() first.
    void listen();
    /// bind() plus listen() on a background thread.
    int start();
    /// Lets in-flight requests finish, then returns.
    void stop();

private:
    std::shared_ptr<const Service> service_;
    ServerOptions options_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
    int port_ = -1;
};

/// Command-line entry point: 0 on success, 1 on usage errors, 2 on data errors.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace t4f::gateway
