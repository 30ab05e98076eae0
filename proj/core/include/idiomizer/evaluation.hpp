#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "idiomizer/engine.hpp"
#include "idiomizer/idioms.hpp"

namespace idiomizer {

struct GoldPair {
    std::string non_idiomatic;
    std::string idiomatic;
};

struct BenchmarkEntry {
    std::string method_source;
    IdiomKind idiom;
    std::vector<GoldPair> gold_pairs;
};

struct FormatError : std::runtime_error {
    FormatError(std::string message, int line_) : std::runtime_error(std::move(message)), line(line_) {}
    int line = 0;
};

/// JSONL, one entry per line:
/// {"method_source": ..., "idiom": ..., "gold_pairs": [{"non_idiomatic": ...,
/// "idiomatic": ...}, ...]}. Validates that the method parses and that each
/// gold non-idiomatic side occurs (token-normalized) in the method.
std::vector<BenchmarkEntry> load_benchmark(const std::filesystem::path& path);

struct ConfusionCounts {
    long long tp = 0;
    long long fp = 0;
    long long fn = 0;
    ConfusionCounts& operator+=(const ConfusionCounts& other) {
        tp += other.tp;
        fp += other.fp;
        fn += other.fn;
        return *this;
    }
};

/// Greedy 1:1 matching in source order on token-normalized equality of BOTH
/// sides. `near_misses` (optional) counts produced pairs whose non-idiomatic
/// side matched an unmatched gold pair but whose idiomatic side differed;
/// such pairs still score FP+FN.
ConfusionCounts match_pairs(const std::vector<GoldPair>& produced,
                            const std::vector<GoldPair>& gold,
                            long long* near_misses = nullptr);

struct Metrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// precision = tp/(tp+fp), recall = tp/(tp+fn), f1 = 2tp/(2tp+fp+fn),
/// accuracy = tp/(tp+fp+fn); 0 whenever the denominator is 0.
Metrics compute_metrics(const ConfusionCounts& counts);

/// Rounded to four decimals for display.
double round4(double value);

struct EvalRow {
    ConfusionCounts counts;
    Metrics metrics;
    long long near_misses = 0;
};

struct EvalReport {
    std::map<IdiomKind, EvalRow> per_idiom;
    EvalRow total;
    std::vector<std::string> errors;  // per-entry failures, never fatal
    std::string to_json() const;
    std::string to_table() const;
};

/// Runs the pipeline (single pass) over each entry restricted to its idiom
/// and scores produced pairs against gold.
EvalReport run_benchmark(const std::vector<BenchmarkEntry>& entries, Engine& engine,
                         int jobs = 0);

}  // namespace idiomizer
