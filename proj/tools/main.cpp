// idiomizer: detect non-idiomatic Python fragments and refactor them into
// Pythonic idioms. Subcommands: detect, refactor (default), eval, idioms.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "idiomizer/evaluation.hpp"
#include "idiomizer/idioms.hpp"
#include "idiomizer/llm.hpp"
#include "idiomizer/pipeline.hpp"
#include "idiomizer/source.hpp"

namespace {

using idiomizer::RunConfig;

struct CommonOpts {
    std::vector<std::string> paths;
    std::vector<std::string> idioms;
    std::string engine = "deterministic";
    std::string fixtures;
    bool record = false;
    int jobs = 0;
    int max_passes = 5;
    std::vector<std::string> include;
    std::vector<std::string> exclude;
};

// CLI flags > idiomizer.json at the current directory > built-in defaults.
void apply_config_file(CommonOpts& opts, bool& fix, bool& json_out, bool& check) {
    std::ifstream in("idiomizer.json");
    if (!in) return;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        std::cerr << "warning: idiomizer.json ignored: " << e.what() << "\n";
        return;
    }
    if (opts.idioms.empty() && j.contains("idioms")) {
        opts.idioms = j["idioms"].get<std::vector<std::string>>();
    }
    if (opts.engine == "deterministic" && j.contains("engine")) {
        opts.engine = j["engine"].get<std::string>();
    }
    if (opts.fixtures.empty() && j.contains("fixtures")) {
        opts.fixtures = j["fixtures"].get<std::string>();
    }
    if (opts.max_passes == 5 && j.contains("max_passes")) {
        opts.max_passes = j["max_passes"].get<int>();
    }
    if (opts.jobs == 0 && j.contains("jobs")) opts.jobs = j["jobs"].get<int>();
    if (opts.include.empty() && j.contains("include")) {
        opts.include = j["include"].get<std::vector<std::string>>();
    }
    if (opts.exclude.empty() && j.contains("exclude")) {
        opts.exclude = j["exclude"].get<std::vector<std::string>>();
    }
    if (!fix && j.contains("fix")) fix = j["fix"].get<bool>();
    if (!json_out && j.contains("json")) json_out = j["json"].get<bool>();
    if (!check && j.contains("check")) check = j["check"].get<bool>();
}

int resolve_idioms(const std::vector<std::string>& names,
                   std::vector<idiomizer::IdiomKind>& out) {
    if (names.empty()) {
        out.assign(idiomizer::kAllIdioms.begin(), idiomizer::kAllIdioms.end());
        return 0;
    }
    out.clear();
    for (const std::string& name : names) {
        const auto kind = idiomizer::idiom_from_name(name);
        if (!kind) {
            std::cerr << "error: unknown idiom \"" << name << "\"\n";
            return 2;
        }
        out.push_back(*kind);
    }
    return 0;
}

std::optional<idiomizer::LlmEndpoint> endpoint_from_env() {
    const char* url = std::getenv("IDIOMIZER_LLM_ENDPOINT");
    if (!url || !*url) return std::nullopt;
    idiomizer::LlmEndpoint ep;
    ep.url = url;
    if (const char* key = std::getenv("IDIOMIZER_LLM_KEY")) ep.api_key = key;
    if (const char* model = std::getenv("IDIOMIZER_LLM_MODEL")) ep.model = model;
    return ep;
}

struct EngineBundle {
    std::unique_ptr<idiomizer::Engine> engine;
    std::unique_ptr<idiomizer::FixtureStore> fixtures;
    std::unique_ptr<idiomizer::Transport> transport;
};

int make_engine(const CommonOpts& opts, EngineBundle& bundle) {
    using idiomizer::LlmOptions;
    if (opts.engine == "deterministic") {
        bundle.engine = std::make_unique<idiomizer::DeterministicEngine>();
        return 0;
    }
    if (opts.engine != "llm" && opts.engine != "replay") {
        std::cerr << "error: --engine must be deterministic, llm or replay\n";
        return 2;
    }
    LlmOptions options;
    if (!opts.fixtures.empty()) {
        try {
            bundle.fixtures = std::make_unique<idiomizer::FixtureStore>(
                idiomizer::FixtureStore::load(opts.fixtures));
        } catch (const idiomizer::FileError& e) {
            if (opts.engine == "replay" || !opts.record) {
                std::cerr << "error: " << e.what() << "\n";
                return 2;
            }
            bundle.fixtures = std::make_unique<idiomizer::FixtureStore>();
        }
        options.fixtures = bundle.fixtures.get();
    } else if (opts.engine == "replay") {
        std::cerr << "error: --engine replay requires --fixtures <path>\n";
        return 2;
    }
    if (opts.engine == "llm") {
        options.endpoint = endpoint_from_env();
        if (!options.endpoint) {
            std::cerr << "error: --engine llm requires IDIOMIZER_LLM_ENDPOINT\n";
            return 2;
        }
        bundle.transport = idiomizer::make_http_transport();
        options.transport = bundle.transport.get();
        if (opts.record) {
            if (opts.fixtures.empty()) {
                std::cerr << "error: --record requires --fixtures <path>\n";
                return 2;
            }
            options.record_path = opts.fixtures;
        }
    }
    bundle.engine = std::make_unique<idiomizer::LlmEngine>(opts.engine, std::move(options));
    return 0;
}

int fill_config(const CommonOpts& opts, bool fix, bool json_out, bool check, RunConfig& config) {
    for (const std::string& p : opts.paths) config.paths.emplace_back(p);
    if (int rc = resolve_idioms(opts.idioms, config.idioms)) return rc;
    config.engine = opts.engine == "llm"      ? RunConfig::EngineSel::Llm
                    : opts.engine == "replay" ? RunConfig::EngineSel::Replay
                                              : RunConfig::EngineSel::Deterministic;
    config.fix = fix;
    config.check = check;
    config.output = json_out ? RunConfig::Output::Json : RunConfig::Output::Diff;
    config.max_passes = std::max(1, opts.max_passes);
    if (!opts.fixtures.empty()) config.fixture_path = opts.fixtures;
    config.record = opts.record;
    config.include = opts.include;
    config.exclude = opts.exclude;
    config.jobs = opts.jobs;
    return 0;
}

// Writes atomically: temp file in the same directory, then rename.
bool write_file_atomic(const std::filesystem::path& path, const std::string& text,
                       std::string& error) {
    std::random_device rd;
    const std::filesystem::path tmp =
        path.parent_path() /
        (path.filename().string() + ".idiomizer." + std::to_string(rd()) + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            error = tmp.string() + ": cannot open for writing";
            return false;
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) {
            error = tmp.string() + ": short write";
            return false;
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        error = path.string() + ": rename failed: " + ec.message();
        std::filesystem::remove(tmp, ec);
        return false;
    }
    return true;
}

// Experimental whole-method baseline: one raw LLM request per (file, idiom)
// with the entire source, emitted as JSON records for manual comparison.
// No extraction, no rewriting.
int cmd_whole_method(const CommonOpts& opts) {
    if (opts.engine != "llm" && opts.engine != "replay") {
        std::cerr << "error: --mode whole-method requires --engine llm or replay\n";
        return 2;
    }
    EngineBundle bundle;
    if (int rc = make_engine(opts, bundle)) return rc;
    RunConfig config;
    if (int rc = fill_config(opts, false, true, false, config)) return rc;
    std::vector<std::string> errors;
    const auto files = idiomizer::collect_python_files(config, &errors);
    for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
    if (!errors.empty()) return 2;

    idiomizer::LlmOptions options;
    options.fixtures = bundle.fixtures.get();
    options.endpoint = endpoint_from_env();
    options.transport = bundle.transport.get();
    if (opts.record && !opts.fixtures.empty()) options.record_path = opts.fixtures;

    long long responses = 0;
    for (const auto& path : files) {
        std::string text;
        try {
            text = idiomizer::SourceFile::read(path).text();
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            continue;
        }
        for (idiomizer::IdiomKind kind : config.idioms) {
            idiomizer::EngineRequest request;
            request.idiom = kind;
            request.prompt =
                "Find every non-idiomatic fragment of the following Python code that can be "
                "refactored with the " +
                std::string(idiomizer::idiom_name(kind)) +
                " idiom and give each <non-idiomatic, idiomatic> code pair. Respond with Yes "
                "and the pairs in fenced code blocks, or No if there are none.\n\n```python\n" +
                text + "\n```";
            request.abstract_code = text;
            nlohmann::ordered_json record;
            record["path"] = path.string();
            record["idiom"] = std::string(idiomizer::idiom_name(kind));
            record["mode"] = "whole-method";
            try {
                const idiomizer::EngineResponse response =
                    idiomizer::llm_complete(request, options);
                record["response"] = response.raw_text;
                ++responses;
            } catch (const idiomizer::EngineUnavailable& e) {
                record["error"] = e.what();
            }
            std::cout << record.dump() << "\n";
        }
    }
    return responses > 0 ? 1 : 0;
}

int cmd_refactor(const CommonOpts& opts, bool fix, bool json_out, bool check) {
    RunConfig config;
    if (int rc = fill_config(opts, fix, json_out, check, config)) return rc;
    EngineBundle bundle;
    if (int rc = make_engine(opts, bundle)) return rc;

    idiomizer::RunReport report = idiomizer::run(config, *bundle.engine);
    for (const std::string& e : report.errors) std::cerr << "error: " << e << "\n";
    if (report.exit_code == 2) return 2;

    if (config.fix) {
        for (const idiomizer::FileOutcome& f : report.files) {
            if (f.error || f.candidates.empty()) continue;
            std::string error;
            if (!write_file_atomic(f.path, f.final_text, error)) {
                std::cerr << "error: " << error << "\n";
                return 2;
            }
        }
    }
    if (config.output == RunConfig::Output::Json) {
        std::cout << idiomizer::render_candidates_json(report);
    } else {
        std::cout << idiomizer::render_diffs(report);
        for (const idiomizer::FileOutcome& f : report.files) {
            if (f.error) continue;
            for (const auto& s : f.declined) {
                std::cerr << f.path << ": " << idiomizer::idiom_name(s.idiom)
                          << " declined: " << s.reason << "\n";
            }
        }
    }
    for (const idiomizer::FileOutcome& f : report.files) {
        if (f.error && config.output != RunConfig::Output::Json) {
            std::cerr << "error: " << *f.error << "\n";
        }
    }
    return report.exit_code;
}

int cmd_detect(const CommonOpts& opts) {
    RunConfig config;
    if (int rc = fill_config(opts, false, true, false, config)) return rc;
    std::vector<std::string> errors;
    const auto files = idiomizer::collect_python_files(config, &errors);
    for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
    if (!errors.empty()) return 2;
    long long total = 0;
    for (const auto& path : files) {
        try {
            const idiomizer::SourceFile file = idiomizer::SourceFile::read(path);
            const auto sites =
                idiomizer::detect_sites(path.string(), file.text(), config.idioms);
            total += static_cast<long long>(sites.size());
            std::cout << idiomizer::render_detect_json(sites);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
        }
    }
    return total > 0 ? 1 : 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& benchmark,
             const std::string& report_path) {
    EngineBundle bundle;
    if (int rc = make_engine(opts, bundle)) return rc;
    std::vector<idiomizer::BenchmarkEntry> entries;
    try {
        entries = idiomizer::load_benchmark(benchmark);
    } catch (const idiomizer::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    const idiomizer::EvalReport report =
        idiomizer::run_benchmark(entries, *bundle.engine, opts.jobs);
    std::cout << report.to_table();
    for (const std::string& e : report.errors) std::cerr << "warning: " << e << "\n";
    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::cerr << "error: cannot write " << report_path << "\n";
            return 2;
        }
        out << report.to_json();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detects non-idiomatic Python fragments and refactors them into Pythonic idioms"};
    app.require_subcommand(0, 1);

    CommonOpts opts;
    bool fix = false, json_out = false, check = false;

    auto add_common = [&](CLI::App* cmd, bool with_paths) {
        if (with_paths) {
            cmd->add_option("paths", opts.paths, "Files or directories to process");
        }
        cmd->add_option("--idiom", opts.idioms,
                        "Restrict to an idiom (repeatable; default: all 13)")
            ->allow_extra_args(false);
        cmd->add_option("--engine", opts.engine, "deterministic|llm|replay")
            ->default_val("deterministic");
        cmd->add_option("--fixtures", opts.fixtures, "Fixture store (JSON lines)");
        cmd->add_flag("--record", opts.record, "Record live responses into --fixtures");
        cmd->add_option("--jobs", opts.jobs, "Worker threads (default: CPU count)");
        cmd->add_option("--max-passes", opts.max_passes, "Fixpoint bound")->default_val(5);
        cmd->add_option("--include", opts.include, "Glob of paths to include (repeatable)")
            ->allow_extra_args(false);
        cmd->add_option("--exclude", opts.exclude, "Glob of paths to exclude (repeatable)")
            ->allow_extra_args(false);
    };

    CLI::App* refactor = app.add_subcommand("refactor", "Rewrite non-idiomatic code (default)");
    add_common(refactor, true);
    refactor->add_flag("--fix", fix, "Write rewritten files in place");
    refactor->add_flag("--json", json_out, "Emit JSON lines instead of diffs");
    refactor->add_flag("--check", check, "Report only; exit 1 when candidates exist");
    std::string mode = "pipeline";
    refactor->add_option("--mode", mode,
                         "pipeline (default) or the experimental whole-method baseline")
        ->default_val("pipeline");

    CLI::App* detect = app.add_subcommand("detect", "Report match sites as JSON lines");
    add_common(detect, true);

    CLI::App* eval = app.add_subcommand("eval", "Score the pipeline against a benchmark");
    std::string benchmark, report_path;
    eval->add_option("--benchmark", benchmark, "Benchmark JSONL file")->required();
    eval->add_option("--report", report_path, "Write the JSON report here");
    add_common(eval, false);

    CLI::App* idioms_cmd = app.add_subcommand("idioms", "Describe the idiom knowledge base");
    bool idioms_json = false;
    idioms_cmd->add_flag("--json", idioms_json, "Emit the catalog as JSON");

    // Bare paths or flags run the default subcommand.
    std::vector<std::string> args(argv + 1, argv + argc);
    if (!args.empty()) {
        static const std::set<std::string> known = {"refactor", "detect", "eval", "idioms"};
        static const std::set<std::string> app_level = {"-h", "--help", "--version"};
        if (!known.count(args[0]) && !app_level.count(args[0])) {
            args.insert(args.begin(), "refactor");
        }
    }

    try {
        std::vector<const char*> cargs{argv[0]};
        for (const std::string& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    apply_config_file(opts, fix, json_out, check);

    if (idioms_cmd->parsed()) {
        if (idioms_json) {
            std::cout << idiomizer::catalog_json();
        } else {
            for (const auto& spec : idiomizer::catalog()) {
                std::cout << idiomizer::idiom_name(spec.kind) << "\n";
            }
        }
        return 0;
    }
    if (detect->parsed()) return cmd_detect(opts);
    if (eval->parsed()) return cmd_eval(opts, benchmark, report_path);
    if (refactor->parsed()) {
        if (mode == "whole-method") return cmd_whole_method(opts);
        if (mode != "pipeline") {
            std::cerr << "error: --mode must be pipeline or whole-method\n";
            return 2;
        }
        return cmd_refactor(opts, fix, json_out, check);
    }
    std::cout << app.help();
    return 0;
}
