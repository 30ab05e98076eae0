#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "idiomizer/llm.hpp"
#include "idiomizer/sha256.hpp"

#include "support/fixture_gen.hpp"
#include "support/test_support.hpp"

using namespace idiomizer;

namespace {

struct DenyAllTransport final : Transport {
    int calls = 0;
    Result post(const LlmEndpoint&, const std::string&) override {
        ++calls;
        Result r;
        r.error = "network access denied by test harness";
        return r;
    }
};

struct CannedTransport final : Transport {
    std::string body;
    int status = 200;
    int calls = 0;
    Result post(const LlmEndpoint&, const std::string& request) override {
        ++calls;
        last_request = request;
        return Result{status, body, ""};
    }
    std::string last_request;
};

}  // namespace

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("The quick brown fox jumps over the lazy dog") ==
          "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592");
}

TEST_CASE("fixture records round-trip through json lines") {
    FixtureRecord r;
    r.request_sha256 = "00ff";
    r.idiom = "chain-comparison";
    r.prompt = "line one\nline \"two\"";
    r.abstract_code = "v1 > v2 and v3 == v2";
    r.response = "Yes\n```python\nv1 > v2 == v3\n```\n";
    const FixtureRecord back = FixtureRecord::from_json_line(r.to_json_line());
    CHECK(back.request_sha256 == r.request_sha256);
    CHECK(back.idiom == r.idiom);
    CHECK(back.prompt == r.prompt);
    CHECK(back.abstract_code == r.abstract_code);
    CHECK(back.response == r.response);
}

TEST_CASE("fixture store load, lookup and append") {
    testsup::TempDir dir;
    FixtureRecord r;
    r.request_sha256 = "aa";
    r.idiom = "fstring";
    r.prompt = "p";
    r.abstract_code = "c";
    r.response = "No. nope\n";
    const auto path = dir.path() / "store.jsonl";
    FixtureStore::append_to(path, r);
    r.request_sha256 = "bb";
    FixtureStore::append_to(path, r);
    const FixtureStore store = FixtureStore::load(path);
    CHECK(store.size() == 2);
    REQUIRE(store.lookup("aa"));
    CHECK(*store.lookup("aa") == "No. nope\n");
    CHECK(store.lookup("zz") == nullptr);
    CHECK_THROWS_AS(FixtureStore::load(dir.path() / "missing.jsonl"), FileError);
}

TEST_CASE("fixture hit returns the stored response verbatim, no transport use") {
    FixtureStore store;
    EngineRequest request{IdiomKind::ChainComparison, "prompt", "v1 > v2 and v3 == v2", 0.0};
    FixtureRecord r;
    r.request_sha256 = request.request_sha256();
    r.idiom = "chain-comparison";
    r.prompt = request.prompt;
    r.abstract_code = request.abstract_code;
    r.response = "Yes\n```python\nv1 > v2 == v3\n```\n";
    store.insert(r);

    DenyAllTransport deny;
    LlmOptions options;
    options.fixtures = &store;
    options.endpoint = LlmEndpoint{"http://127.0.0.1:1/v1/chat/completions", "", "m"};
    options.transport = &deny;
    const EngineResponse response = llm_complete(request, options);
    CHECK(response.raw_text == r.response);
    REQUIRE(accepted(response.outcome) != nullptr);
    CHECK(accepted(response.outcome)->abstract_idiomatic_code == "v1 > v2 == v3");
    CHECK(deny.calls == 0);
}

TEST_CASE("fixture miss without endpoint raises EngineUnavailable") {
    FixtureStore store;
    LlmOptions options;
    options.fixtures = &store;
    EngineRequest request{IdiomKind::Fstring, "p", "c", 0.0};
    CHECK_THROWS_AS(llm_complete(request, options), EngineUnavailable);
}

TEST_CASE("live call parses the chat-completion body and records") {
    testsup::TempDir dir;
    CannedTransport canned;
    canned.body =
        R"({"choices": [{"message": {"role": "assistant", "content": "Yes\n```python\nnot n % 2\n```"}}]})";
    FixtureStore store;
    LlmOptions options;
    options.fixtures = &store;
    options.endpoint = LlmEndpoint{"http://gateway.local/v1/chat/completions", "key", "model-x"};
    options.transport = &canned;
    options.record_path = dir.path() / "rec.jsonl";

    EngineRequest request{IdiomKind::TruthTest, "the prompt", "n % 2 == 0", 0.0};
    const EngineResponse response = llm_complete(request, options);
    CHECK(canned.calls == 1);
    REQUIRE(accepted(response.outcome));
    CHECK(accepted(response.outcome)->abstract_idiomatic_code == "not n % 2");
    // temperature pinned to zero in the request body.
    CHECK(canned.last_request.find("\"temperature\":0") != std::string::npos);
    // Recorded and replayable: the second call never reaches the transport.
    const EngineResponse replay = llm_complete(request, options);
    CHECK(canned.calls == 1);
    CHECK(replay.raw_text == response.raw_text);
    const FixtureStore reloaded = FixtureStore::load(*options.record_path);
    CHECK(reloaded.size() == 1);
}

TEST_CASE("transport failures surface as EngineUnavailable") {
    DenyAllTransport deny;
    LlmOptions options;
    options.endpoint = LlmEndpoint{"http://127.0.0.1:1/v1", "", "m"};
    options.transport = &deny;
    EngineRequest request{IdiomKind::Fstring, "p", "c", 0.0};
    CHECK_THROWS_AS(llm_complete(request, options), EngineUnavailable);
    CannedTransport canned;
    canned.status = 503;
    options.transport = &canned;
    CHECK_THROWS_AS(llm_complete(request, options), EngineUnavailable);
}

TEST_CASE("replay engine equals deterministic engine on the golden corpus") {
    FixtureStore store;
    for (const auto& r : testsup::golden_fixture_records()) store.insert(r);
    DenyAllTransport deny;
    LlmOptions options;
    options.fixtures = &store;
    options.endpoint = LlmEndpoint{"http://127.0.0.1:1/v1", "", "m"};
    options.transport = &deny;
    LlmEngine replay("replay", options);
    DeterministicEngine det;

    for (const auto& g : golden::cases()) {
        const SourceFile file = SourceFile::from_text(g.id + ".py", g.file_text);
        const Ast ast = parse_source(file.text());
        const auto sites = find_sites(file, ast, {g.idiom});
        REQUIRE(sites.size() == 1);
        const auto abstraction = abstract_site(sites[0], file);
        EngineContext ctx;
        ctx.file = &file;
        ctx.site = &sites[0];
        ctx.indent_unit = "    ";
        const auto a = det.idiomatize(ctx, abstraction.result);
        const auto b = replay.idiomatize(ctx, abstraction.result);
        REQUIRE(accepted(a) != nullptr);
        REQUIRE_MESSAGE(accepted(b) != nullptr, g.id);
        CHECK(accepted(a)->abstract_idiomatic_code == accepted(b)->abstract_idiomatic_code);
    }
    CHECK(deny.calls == 0);
}

TEST_CASE("llm engine rejects accepted replies without the idiom marker") {
    FixtureStore store;
    const SourceFile file = SourceFile::from_text("t.py", "r = a > b and a < 1\n");
    const Ast ast = parse_source(file.text());
    const auto sites = find_sites(file, ast, {IdiomKind::ChainComparison});
    REQUIRE(sites.size() == 1);
    const auto abstraction = abstract_site(sites[0], file);

    EngineRequest request;
    request.idiom = IdiomKind::ChainComparison;
    request.prompt =
        render_prompt(prompt_for(IdiomKind::ChainComparison), abstraction.result.abstract_code);
    request.abstract_code = abstraction.result.abstract_code;
    FixtureRecord r;
    r.request_sha256 = request.request_sha256();
    r.idiom = "chain-comparison";
    r.prompt = request.prompt;
    r.abstract_code = request.abstract_code;
    r.response = "Yes\n```python\nv1 > v2\n```\n";  // not a chained comparison
    store.insert(r);

    LlmOptions options;
    options.fixtures = &store;
    LlmEngine replay("replay", options);
    EngineContext ctx;
    ctx.file = &file;
    ctx.site = &sites[0];
    const auto out = replay.idiomatize(ctx, abstraction.result);
    REQUIRE(declined(out) != nullptr);
    CHECK(declined(out)->reason.find("marker") != std::string::npos);
}
