#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "idiomizer/engine.hpp"

namespace idiomizer {

struct EngineUnavailable : std::runtime_error {
    explicit EngineUnavailable(std::string message) : std::runtime_error(std::move(message)) {}
};

/// One JSONL record: {"request_sha256": hex, "idiom": ..., "prompt": ...,
/// "abstract_code": ..., "response": ...}.
struct FixtureRecord {
    std::string request_sha256;
    std::string idiom;
    std::string prompt;
    std::string abstract_code;
    std::string response;

    std::string to_json_line() const;
    static FixtureRecord from_json_line(const std::string& line);
};

/// Read-mostly store; lookups and recording inserts may race, so access is
/// serialized internally. Returned pointers stay valid across inserts.
class FixtureStore {
public:
    FixtureStore() = default;
    FixtureStore(FixtureStore&& other) noexcept : records_(std::move(other.records_)) {}
    FixtureStore& operator=(FixtureStore&& other) noexcept {
        records_ = std::move(other.records_);
        return *this;
    }
    static FixtureStore load(const std::filesystem::path& path);  // throws FileError

    const std::string* lookup(const std::string& request_sha256) const;
    void insert(FixtureRecord record);
    /// Appends one record to the backing file (exclusive-writer contract).
    static void append_to(const std::filesystem::path& path, const FixtureRecord& record);
    std::size_t size() const { return records_.size(); }

private:
    mutable std::mutex mutex_;
    std::map<std::string, FixtureRecord> records_;
};

struct LlmEndpoint {
    std::string url;      // http://host[:port]/path
    std::string api_key;  // optional; sent as a bearer token
    std::string model = "gpt-3.5-turbo";
};

/// HTTP seam; tests substitute a transport that must never be reached.
class Transport {
public:
    struct Result {
        int status = 0;
        std::string body;
        std::string error;  // non-empty on connection-level failure
    };
    virtual ~Transport() = default;
    virtual Result post(const LlmEndpoint& endpoint, const std::string& json_body) = 0;
};

/// Real chat-completion POST via cpp-httplib (plain HTTP).
std::unique_ptr<Transport> make_http_transport();

struct LlmOptions {
    FixtureStore* fixtures = nullptr;            // replay store
    std::optional<LlmEndpoint> endpoint;         // live endpoint
    Transport* transport = nullptr;              // required when endpoint set
    std::optional<std::filesystem::path> record_path;  // append live responses
    int max_in_flight = 4;                       // concurrent live requests
};

/// Fixture hit: the stored response verbatim. Miss with an endpoint: one
/// chat-completion call at temperature 0 (recorded when recording is on).
/// Miss without an endpoint: EngineUnavailable.
EngineResponse llm_complete(const EngineRequest& request, const LlmOptions& options);

/// Engine backed by llm_complete; replies are parsed for the Yes/No verdict
/// and fenced code block, and Accepted code is checked for the idiom marker.
class LlmEngine final : public Engine {
public:
    LlmEngine(std::string name, LlmOptions options)
        : name_(std::move(name)), options_(std::move(options)) {}
    std::string_view name() const override { return name_; }
    IdiomatizationOutcome idiomatize(const EngineContext& ctx,
                                     const AbstractionResult& abstraction) override;

private:
    std::string name_;
    LlmOptions options_;
};

}  // namespace idiomizer
