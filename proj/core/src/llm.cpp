#include "idiomizer/llm.hpp"

#include <condition_variable>
#include <fstream>
#include <mutex>

#include <httplib.h>
#include <json.hpp>

#include "idiomizer/source.hpp"

namespace idiomizer {

using json = nlohmann::ordered_json;

std::string FixtureRecord::to_json_line() const {
    json j;
    j["request_sha256"] = request_sha256;
    j["idiom"] = idiom;
    j["prompt"] = prompt;
    j["abstract_code"] = abstract_code;
    j["response"] = response;
    return j.dump();
}

FixtureRecord FixtureRecord::from_json_line(const std::string& line) {
    const json j = json::parse(line);
    FixtureRecord r;
    r.request_sha256 = j.at("request_sha256").get<std::string>();
    r.idiom = j.at("idiom").get<std::string>();
    r.prompt = j.at("prompt").get<std::string>();
    r.abstract_code = j.at("abstract_code").get<std::string>();
    r.response = j.at("response").get<std::string>();
    return r;
}

FixtureStore FixtureStore::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError(path.string() + ": cannot open fixture store");
    FixtureStore store;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            store.insert(FixtureRecord::from_json_line(line));
        } catch (const std::exception& e) {
            throw FileError(path.string() + ":" + std::to_string(line_no) +
                            ": bad fixture record: " + e.what());
        }
    }
    return store;
}

const std::string* FixtureStore::lookup(const std::string& request_sha256) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = records_.find(request_sha256);
    return it == records_.end() ? nullptr : &it->second.response;
}

void FixtureStore::insert(FixtureRecord record) {
    std::lock_guard<std::mutex> lock(mutex_);
    records_[record.request_sha256] = std::move(record);
}

void FixtureStore::append_to(const std::filesystem::path& path, const FixtureRecord& record) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw FileError(path.string() + ": cannot append fixture record");
    out << record.to_json_line() << "\n";
}

namespace {

struct UrlParts {
    std::string host_port;  // scheme://host[:port]
    std::string path;
};

UrlParts split_url(const std::string& url) {
    UrlParts parts;
    const std::size_t scheme = url.find("://");
    const std::size_t path_start =
        url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) {
        parts.host_port = url;
        parts.path = "/";
    } else {
        parts.host_port = url.substr(0, path_start);
        parts.path = url.substr(path_start);
    }
    return parts;
}

class HttplibTransport final : public Transport {
public:
    Result post(const LlmEndpoint& endpoint, const std::string& json_body) override {
        Result result;
        const UrlParts parts = split_url(endpoint.url);
        if (parts.host_port.rfind("https://", 0) == 0) {
            result.error = "https endpoints are not supported; use a plain-http gateway";
            return result;
        }
        httplib::Client client(parts.host_port);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(60, 0);
        httplib::Headers headers;
        if (!endpoint.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + endpoint.api_key);
        }
        auto res = client.Post(parts.path, headers, json_body, "application/json");
        if (!res) {
            result.error = "connection failed: " + httplib::to_string(res.error());
            return result;
        }
        result.status = res->status;
        result.body = res->body;
        return result;
    }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() {
    return std::make_unique<HttplibTransport>();
}

EngineResponse llm_complete(const EngineRequest& request, const LlmOptions& options) {
    const std::string sha = request.request_sha256();
    if (options.fixtures) {
        if (const std::string* stored = options.fixtures->lookup(sha)) {
            EngineResponse response;
            response.raw_text = *stored;
            response.outcome = parse_engine_reply(*stored);
            return response;
        }
    }
    if (!options.endpoint) {
        throw EngineUnavailable("no fixture for request " + sha.substr(0, 12) +
                                " and no endpoint configured");
    }
    if (!options.transport) {
        throw EngineUnavailable("endpoint configured without a transport");
    }

    // At most max_in_flight live requests; the gate covers the call only.
    static std::mutex gate_mutex;
    static std::condition_variable gate_cv;
    static int in_flight = 0;
    const int cap = std::max(1, options.max_in_flight);

    json body;
    body["model"] = options.endpoint->model;
    body["temperature"] = 0;  // reproducibility over creativity
    body["messages"] = json::array({json{{"role", "user"}, {"content", request.prompt}}});
    Transport::Result result;
    {
        std::unique_lock<std::mutex> lock(gate_mutex);
        gate_cv.wait(lock, [&] { return in_flight < cap; });
        ++in_flight;
    }
    try {
        result = options.transport->post(*options.endpoint, body.dump());
    } catch (...) {
        std::lock_guard<std::mutex> lock(gate_mutex);
        --in_flight;
        gate_cv.notify_one();
        throw;
    }
    {
        std::lock_guard<std::mutex> lock(gate_mutex);
        --in_flight;
        gate_cv.notify_one();
    }
    if (!result.error.empty()) {
        throw EngineUnavailable("endpoint unreachable: " + result.error);
    }
    if (result.status != 200) {
        throw EngineUnavailable("endpoint returned HTTP " + std::to_string(result.status));
    }

    EngineResponse response;
    try {
        const json parsed = json::parse(result.body);
        response.raw_text = parsed.at("choices").at(0).at("message").at("content")
                                .get<std::string>();
    } catch (const std::exception&) {
        response.raw_text = result.body;
    }
    response.outcome = parse_engine_reply(response.raw_text);

    if (options.record_path) {
        static std::mutex record_mutex;  // exclusive-writer contract
        std::lock_guard<std::mutex> lock(record_mutex);
        FixtureRecord record;
        record.request_sha256 = sha;
        record.idiom = std::string(idiom_name(request.idiom));
        record.prompt = request.prompt;
        record.abstract_code = request.abstract_code;
        record.response = response.raw_text;
        FixtureStore::append_to(*options.record_path, record);
        if (options.fixtures) options.fixtures->insert(std::move(record));
    }
    return response;
}

IdiomatizationOutcome LlmEngine::idiomatize(const EngineContext& ctx,
                                            const AbstractionResult& abstraction) {
    if (!ctx.site) return Declined{"engine invoked without a site"};
    EngineRequest request;
    request.idiom = ctx.site->idiom;
    request.prompt = render_prompt(prompt_for(ctx.site->idiom), abstraction.abstract_code);
    request.abstract_code = abstraction.abstract_code;
    const EngineResponse response = llm_complete(request, options_);
    if (const Accepted* acc = accepted(response.outcome)) {
        std::string probe = acc->abstract_idiomatic_code;
        if (ctx.site->idiom == IdiomKind::StarInFuncCall) probe = "probe_(" + probe + ")";
        if (!has_idiom_marker(ctx.site->idiom, probe)) {
            return Declined{"response code lacks the idiom's syntactic marker"};
        }
    }
    return response.outcome;
}

}  // namespace idiomizer
