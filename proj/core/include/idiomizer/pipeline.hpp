#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "idiomizer/engine.hpp"
#include "idiomizer/idioms.hpp"
#include "idiomizer/llm.hpp"
#include "idiomizer/rewriting.hpp"

namespace idiomizer {

struct CandidateRecord {
    std::string site_id;
    IdiomKind idiom;
    Span span;
    LineCol start;
    LineCol end;
    int pass = 1;
    std::string non_idiomatic;
    std::string idiomatic;
    std::string abstraction;  // abstract code fed to the engine
    std::string diff;
    std::string new_source;
    std::optional<std::string> caveat;
};

struct SkipRecord {
    std::string site_id;
    IdiomKind idiom;
    std::string reason;
    int pass = 1;
};

struct FileOutcome {
    std::string path;
    std::vector<CandidateRecord> candidates;  // applied rewrites, all passes
    std::vector<SkipRecord> skipped;          // overlap losers
    std::vector<SkipRecord> declined;         // engine declines (diagnostics)
    std::vector<SkipRecord> discarded;        // unparseable rewrites, never emitted
    std::optional<std::string> error;         // I/O, decode or syntax error
    std::string final_text;
    int passes = 0;
};

/// Detection only: one record per site, no idiomatization.
struct SiteRecord {
    std::string path;
    IdiomKind idiom;
    LineCol start;
    LineCol end;
    std::string site_id;
    std::string excerpt;
};
std::vector<SiteRecord> detect_sites(const std::string& path, const std::string& text,
                                     const std::vector<IdiomKind>& kinds);

/// find_sites -> abstract -> idiomatize -> rewrite, repeated to fixpoint or
/// max_passes. Non-overlapping accepted candidates are applied together per
/// pass; overlap losers keep the earlier-starting, longer site.
FileOutcome process_text(std::string path, std::string text,
                         const std::vector<IdiomKind>& kinds, Engine& engine, int max_passes);

struct RunConfig {
    std::vector<std::filesystem::path> paths;
    std::vector<IdiomKind> idioms{kAllIdioms.begin(), kAllIdioms.end()};
    enum class EngineSel { Deterministic, Llm, Replay } engine = EngineSel::Deterministic;
    bool fix = false;
    enum class Output { Diff, Json } output = Output::Diff;
    bool check = false;
    int max_passes = 5;
    std::optional<std::filesystem::path> fixture_path;
    bool record = false;
    std::vector<std::string> include;
    std::vector<std::string> exclude;
    int jobs = 0;  // 0: hardware concurrency
    std::optional<LlmEndpoint> endpoint;
};

struct RunReport {
    std::vector<FileOutcome> files;
    std::vector<std::string> errors;  // operational problems (bad paths, ...)
    int exit_code = 0;                // 0 clean, 1 candidates found, 2 error
    long long total_candidates = 0;
};

/// Orchestrates the pipeline over files and directories; files are processed
/// by a worker pool and reported in lexicographic path order. I/O errors are
/// reported per file and never abort the run.
RunReport run(const RunConfig& config, Engine& engine);

/// Collects .py files under the configured paths, include/exclude applied,
/// lexicographically sorted.
std::vector<std::filesystem::path> collect_python_files(const RunConfig& config,
                                                        std::vector<std::string>* errors);

std::string render_detect_json(const std::vector<SiteRecord>& sites);
std::string render_candidates_json(const RunReport& report);
std::string render_diffs(const RunReport& report);

}  // namespace idiomizer
