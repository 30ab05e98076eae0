#include "idiomizer/evaluation.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "idiomizer/pipeline.hpp"
#include "idiomizer/tokens.hpp"

namespace idiomizer {

using json = nlohmann::ordered_json;

std::vector<BenchmarkEntry> load_benchmark(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError(path.string() + ": cannot open benchmark", 0);
    std::vector<BenchmarkEntry> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const std::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": invalid JSON: " + e.what(), line_no);
        }
        BenchmarkEntry entry;
        try {
            entry.method_source = j.at("method_source").get<std::string>();
            const std::string idiom = j.at("idiom").get<std::string>();
            const auto kind = idiom_from_name(idiom);
            if (!kind) {
                throw FormatError(path.string() + ":" + std::to_string(line_no) +
                                  ": unknown idiom \"" + idiom + "\"", line_no);
            }
            entry.idiom = *kind;
            for (const auto& p : j.at("gold_pairs")) {
                entry.gold_pairs.push_back({p.at("non_idiomatic").get<std::string>(),
                                            p.at("idiomatic").get<std::string>()});
            }
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what(),
                              line_no);
        }
        try {
            parse_source(entry.method_source);
        } catch (const SyntaxError& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) +
                              ": method_source does not parse: " + e.what(), line_no);
        }
        const std::vector<std::string> method_tokens = token_texts(entry.method_source);
        for (const GoldPair& pair : entry.gold_pairs) {
            if (!contains_token_seq(method_tokens, token_texts(pair.non_idiomatic))) {
                throw FormatError(path.string() + ":" + std::to_string(line_no) +
                                  ": gold non_idiomatic not found in method_source", line_no);
            }
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

ConfusionCounts match_pairs(const std::vector<GoldPair>& produced,
                            const std::vector<GoldPair>& gold, long long* near_misses) {
    ConfusionCounts counts;
    std::vector<bool> gold_used(gold.size(), false);
    if (near_misses) *near_misses = 0;
    for (const GoldPair& p : produced) {
        const std::string p_non = normalize_tokens(p.non_idiomatic);
        const std::string p_idio = normalize_tokens(p.idiomatic);
        bool matched = false;
        for (std::size_t g = 0; g < gold.size(); ++g) {
            if (gold_used[g]) continue;
            if (normalize_tokens(gold[g].non_idiomatic) == p_non &&
                normalize_tokens(gold[g].idiomatic) == p_idio) {
                gold_used[g] = true;
                matched = true;
                break;
            }
        }
        if (matched) {
            ++counts.tp;
            continue;
        }
        ++counts.fp;
        if (near_misses) {
            for (std::size_t g = 0; g < gold.size(); ++g) {
                if (gold_used[g]) continue;
                if (normalize_tokens(gold[g].non_idiomatic) == p_non) {
                    ++*near_misses;
                    break;
                }
            }
        }
    }
    counts.fn = static_cast<long long>(gold.size()) - counts.tp;
    return counts;
}

Metrics compute_metrics(const ConfusionCounts& c) {
    Metrics m;
    const long long p_den = c.tp + c.fp;
    const long long r_den = c.tp + c.fn;
    const long long f_den = 2 * c.tp + c.fp + c.fn;
    const long long a_den = c.tp + c.fp + c.fn;
    m.precision = p_den == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(p_den);
    m.recall = r_den == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(r_den);
    // 2PR/(P+R) reduced to one exact quotient: 2tp / (2tp + fp + fn).
    m.f1 = f_den == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(f_den);
    m.accuracy = a_den == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(a_den);
    return m;
}

double round4(double value) { return std::round(value * 10000.0) / 10000.0; }

EvalReport run_benchmark(const std::vector<BenchmarkEntry>& entries, Engine& engine,
                         int jobs) {
    EvalReport report;
    struct EntryResult {
        ConfusionCounts counts;
        long long near = 0;
        std::optional<std::string> error;
        IdiomKind idiom = IdiomKind::ListComprehension;
    };
    std::vector<EntryResult> results(entries.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= entries.size()) break;
            const BenchmarkEntry& entry = entries[i];
            EntryResult& slot = results[i];
            slot.idiom = entry.idiom;
            FileOutcome outcome = process_text("<benchmark:" + std::to_string(i + 1) + ">",
                                               entry.method_source, {entry.idiom}, engine,
                                               /*max_passes=*/1);
            if (outcome.error) {
                slot.error = outcome.error;
                // An unprocessable entry still counts its gold pairs as misses.
                slot.counts.fn = static_cast<long long>(entry.gold_pairs.size());
                continue;
            }
            std::vector<GoldPair> produced;
            for (const CandidateRecord& c : outcome.candidates) {
                produced.push_back({c.non_idiomatic, c.idiomatic});
            }
            slot.counts = match_pairs(produced, entry.gold_pairs, &slot.near);
        }
    };
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    int n = jobs > 0 ? jobs : std::max(1, hw);
    n = std::min<int>(n, std::max<int>(1, static_cast<int>(entries.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    for (const EntryResult& r : results) {
        EvalRow& row = report.per_idiom[r.idiom];
        row.counts += r.counts;
        row.near_misses += r.near;
        report.total.counts += r.counts;
        report.total.near_misses += r.near;
        if (r.error) report.errors.push_back(*r.error);
    }
    for (auto& [kind, row] : report.per_idiom) row.metrics = compute_metrics(row.counts);
    report.total.metrics = compute_metrics(report.total.counts);
    return report;
}

namespace {

json row_json(const EvalRow& row) {
    json j;
    j["tp"] = row.counts.tp;
    j["fp"] = row.counts.fp;
    j["fn"] = row.counts.fn;
    j["accuracy"] = round4(row.metrics.accuracy);
    j["precision"] = round4(row.metrics.precision);
    j["recall"] = round4(row.metrics.recall);
    j["f1"] = round4(row.metrics.f1);
    j["near_misses"] = row.near_misses;
    return j;
}

}  // namespace

std::string EvalReport::to_json() const {
    json doc;
    for (const auto& [kind, row] : per_idiom) {
        doc[std::string(idiom_name(kind))] = row_json(row);
    }
    doc["total"] = row_json(total);
    if (!errors.empty()) doc["errors"] = errors;
    return doc.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
    char buf[160];
    std::string out =
        "idiom                     tp    fp    fn   acc     prec    recall  f1\n";
    auto line = [&](const std::string& name, const EvalRow& row) {
        std::snprintf(buf, sizeof(buf), "%-24s %5lld %5lld %5lld  %.4f  %.4f  %.4f  %.4f\n",
                      name.c_str(), row.counts.tp, row.counts.fp, row.counts.fn,
                      round4(row.metrics.accuracy), round4(row.metrics.precision),
                      round4(row.metrics.recall), round4(row.metrics.f1));
        out += buf;
    };
    for (const auto& [kind, row] : per_idiom) line(std::string(idiom_name(kind)), row);
    line("total", total);
    return out;
}

}  // namespace idiomizer
