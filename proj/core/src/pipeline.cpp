#include "idiomizer/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <json.hpp>

#include "idiomizer/textops.hpp"

namespace idiomizer {

namespace {

using json = nlohmann::ordered_json;

// Smaller sorts first when spans tie exactly; the chained-assignment form is
// the more specific pattern and must win its tie against assign-multi.
int tie_priority(IdiomKind kind) {
    if (kind == IdiomKind::ChainAssignSameValue) return 0;
    if (kind == IdiomKind::AssignMultiTargets) return 1;
    for (std::size_t i = 0; i < kAllIdioms.size(); ++i) {
        if (kAllIdioms[i] == kind) return static_cast<int>(i) + 2;
    }
    return 100;
}

struct PassCandidate {
    MatchSite site;
    RefactoringCandidate rewrite;
    std::string abstract_code;
};

}  // namespace

std::vector<SiteRecord> detect_sites(const std::string& path, const std::string& text,
                                     const std::vector<IdiomKind>& kinds) {
    const SourceFile file = SourceFile::from_text(path, text);
    const Ast ast = parse_source(file.text());
    std::vector<SiteRecord> out;
    for (const MatchSite& site : find_sites(file, ast, kinds)) {
        SiteRecord rec;
        rec.path = path;
        rec.idiom = site.idiom;
        rec.start = file.line_col(site.span.start);
        rec.end = file.line_col(site.span.end);
        rec.site_id = site.site_id;
        std::string_view excerpt = file.slice(site.span);
        std::size_t cut = std::min<std::size_t>(excerpt.size(), 120);
        // Back up to a character boundary; never split a UTF-8 sequence.
        while (cut > 0 && cut < excerpt.size() &&
               (static_cast<unsigned char>(excerpt[cut]) & 0xC0) == 0x80) {
            --cut;
        }
        rec.excerpt = std::string(excerpt.substr(0, cut));
        out.push_back(std::move(rec));
    }
    return out;
}

FileOutcome process_text(std::string path, std::string text,
                         const std::vector<IdiomKind>& kinds, Engine& engine, int max_passes) {
    FileOutcome outcome;
    outcome.path = path;

    std::string current = std::move(text);
    for (int pass = 1; pass <= max_passes; ++pass) {
        SourceFile file = SourceFile::from_text(path, current);
        Ast ast;
        try {
            ast = parse_source(file.text());
        } catch (const SyntaxError& e) {
            outcome.error = path + ":" + std::to_string(e.line) + ":" +
                            std::to_string(e.col) + ": " + e.what();
            break;
        }
        EngineContext ctx;
        ctx.file = &file;
        ctx.indent_unit = detect_indent_unit(file.text());

        std::vector<PassCandidate> accepted_candidates;
        // Chain-comparison pairs in one and-chain: leftmost accepted pair
        // wins the pass; later pairs of the same scenario are overlap losers.
        std::set<const Node*> chain_scenarios_done;

        for (const MatchSite& site : find_sites(file, ast, kinds)) {
            ctx.site = &site;
            if (site.idiom == IdiomKind::ChainComparison && site.scenario &&
                chain_scenarios_done.count(site.scenario)) {
                outcome.skipped.push_back(
                    {site.site_id, site.idiom, "skipped: overlap", pass});
                continue;
            }
            SiteAbstraction abstraction;
            IdiomatizationOutcome result = Declined{"unprocessed"};
            try {
                abstraction = abstract_site(site, file);
                result = engine.idiomatize(ctx, abstraction.result);
            } catch (const EngineUnavailable& e) {
                outcome.error = path + ": " + e.what();
                break;
            } catch (const std::exception& e) {
                outcome.declined.push_back({site.site_id, site.idiom, e.what(), pass});
                continue;
            }
            if (const Declined* dec = declined(result)) {
                const bool dup = std::any_of(
                    outcome.declined.begin(), outcome.declined.end(), [&](const SkipRecord& r) {
                        return r.site_id == site.site_id && r.reason == dec->reason;
                    });
                if (!dup) {
                    outcome.declined.push_back({site.site_id, site.idiom, dec->reason, pass});
                }
                continue;
            }
            try {
                RefactoringCandidate rewrite =
                    rewrite_site(file, site, *accepted(result), abstraction);
                if (site.idiom == IdiomKind::ChainComparison && site.scenario) {
                    chain_scenarios_done.insert(site.scenario);
                }
                accepted_candidates.push_back(
                    {site, std::move(rewrite), abstraction.result.abstract_code});
            } catch (const std::exception& e) {
                // ResultUnparseable and any other rewrite failure: the
                // candidate is discarded and logged, never emitted.
                outcome.discarded.push_back({site.site_id, site.idiom, e.what(), pass});
            }
        }
        if (outcome.error) break;

        // Arbitration: earlier-starting, longer candidate wins; exact span
        // ties resolve by idiom specificity then catalog order.
        std::sort(accepted_candidates.begin(), accepted_candidates.end(),
                  [](const PassCandidate& a, const PassCandidate& b) {
                      const Span& sa = a.rewrite.span;
                      const Span& sb = b.rewrite.span;
                      if (sa.start != sb.start) return sa.start < sb.start;
                      if (sa.end != sb.end) return sa.end > sb.end;
                      const int pa = tie_priority(a.rewrite.idiom);
                      const int pb = tie_priority(b.rewrite.idiom);
                      if (pa != pb) return pa < pb;
                      return a.rewrite.site_id < b.rewrite.site_id;
                  });
        std::vector<PassCandidate> winners;
        std::vector<Edit> combined_edits;
        for (PassCandidate& cand : accepted_candidates) {
            const bool clashes = std::any_of(
                winners.begin(), winners.end(), [&](const PassCandidate& w) {
                    return w.rewrite.span.overlaps(cand.rewrite.span);
                });
            if (clashes) {
                outcome.skipped.push_back(
                    {cand.rewrite.site_id, cand.rewrite.idiom, "skipped: overlap", pass});
                continue;
            }
            winners.push_back(std::move(cand));
        }
        if (winners.empty()) {
            outcome.passes = pass;
            break;
        }

        for (const PassCandidate& w : winners) {
            CandidateRecord rec;
            rec.site_id = w.rewrite.site_id;
            rec.idiom = w.rewrite.idiom;
            rec.span = w.rewrite.span;
            rec.start = file.line_col(w.rewrite.span.start);
            rec.end = file.line_col(w.rewrite.span.end);
            rec.pass = pass;
            rec.non_idiomatic = w.rewrite.non_idiomatic;
            rec.idiomatic = w.rewrite.idiomatic;
            rec.abstraction = w.abstract_code;
            rec.diff = w.rewrite.diff;
            rec.new_source = w.rewrite.new_source;
            rec.caveat = w.rewrite.caveat;
            outcome.candidates.push_back(std::move(rec));
            for (const Edit& e : w.rewrite.edits) combined_edits.push_back(e);
        }
        std::string next = splice(file.text(), std::move(combined_edits));
        try {
            parse_source(next);
        } catch (const SyntaxError& e) {
            outcome.error = path + ": combined rewrites no longer parse: " +
                            std::string(e.what());
            break;
        }
        current = std::move(next);
        outcome.passes = pass;
    }
    outcome.final_text = std::move(current);
    return outcome;
}

std::vector<std::filesystem::path> collect_python_files(const RunConfig& config,
                                                        std::vector<std::string>* errors) {
    namespace fs = std::filesystem;
    std::vector<fs::path> files;
    auto matches_filters = [&](const fs::path& p) {
        const std::string s = p.generic_string();
        if (!config.include.empty()) {
            bool any = false;
            for (const std::string& pattern : config.include) {
                if (glob_match(pattern, s)) {
                    any = true;
                    break;
                }
            }
            if (!any) return false;
        }
        for (const std::string& pattern : config.exclude) {
            if (glob_match(pattern, s)) return false;
        }
        return true;
    };
    for (const fs::path& root : config.paths) {
        std::error_code ec;
        if (fs::is_directory(root, ec)) {
            for (fs::recursive_directory_iterator it(root, ec), end; it != end;
                 it.increment(ec)) {
                if (ec) break;
                if (!it->is_regular_file(ec)) continue;
                if (it->path().extension() != ".py") continue;
                if (matches_filters(it->path())) files.push_back(it->path());
            }
        } else if (fs::is_regular_file(root, ec)) {
            if (matches_filters(root)) files.push_back(root);
        } else {
            if (errors) errors->push_back(root.string() + ": no such file or directory");
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });
    files.erase(std::unique(files.begin(), files.end()), files.end());
    return files;
}

RunReport run(const RunConfig& config, Engine& engine) {
    RunReport report;
    const auto files = collect_python_files(config, &report.errors);
    if (!report.errors.empty()) {
        report.exit_code = 2;
        return report;
    }

    report.files.resize(files.size());
    std::atomic<std::size_t> next{0};
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    int jobs = config.jobs > 0 ? config.jobs : std::max(1, hw);
    jobs = std::min<int>(jobs, static_cast<int>(files.size()) == 0 ? 1
                                                                   : static_cast<int>(files.size()));
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size()) break;
            FileOutcome& slot = report.files[i];
            const std::string path = files[i].string();
            try {
                SourceFile file = SourceFile::read(files[i]);
                slot = process_text(path, file.text(), config.idioms, engine,
                                    config.max_passes);
            } catch (const FileError& e) {
                slot.path = path;
                slot.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < jobs; ++i) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    for (const FileOutcome& f : report.files) {
        report.total_candidates += static_cast<long long>(f.candidates.size());
    }
    report.exit_code = report.total_candidates > 0 ? 1 : 0;
    return report;
}

std::string render_detect_json(const std::vector<SiteRecord>& sites) {
    std::string out;
    for (const SiteRecord& s : sites) {
        json j;
        j["path"] = s.path;
        j["idiom"] = std::string(idiom_name(s.idiom));
        j["line"] = s.start.line;
        j["col"] = s.start.col;
        j["end_line"] = s.end.line;
        j["end_col"] = s.end.col;
        j["site_id"] = s.site_id;
        j["excerpt"] = s.excerpt;
        out += j.dump();
        out += "\n";
    }
    return out;
}

std::string render_candidates_json(const RunReport& report) {
    std::string out;
    for (const FileOutcome& f : report.files) {
        for (const CandidateRecord& c : f.candidates) {
            json j;
            j["path"] = f.path;
            j["site_id"] = c.site_id;
            j["idiom"] = std::string(idiom_name(c.idiom));
            j["line"] = c.start.line;
            j["col"] = c.start.col;
            j["pass"] = c.pass;
            j["non_idiomatic"] = c.non_idiomatic;
            j["idiomatic"] = c.idiomatic;
            j["abstraction"] = c.abstraction;
            j["diff"] = c.diff;
            if (c.caveat) j["caveat"] = *c.caveat;
            out += j.dump();
            out += "\n";
        }
        for (const SkipRecord& s : f.skipped) {
            json j;
            j["path"] = f.path;
            j["site_id"] = s.site_id;
            j["idiom"] = std::string(idiom_name(s.idiom));
            j["skipped"] = s.reason;
            j["pass"] = s.pass;
            out += j.dump();
            out += "\n";
        }
        for (const SkipRecord& s : f.declined) {
            json j;
            j["path"] = f.path;
            j["site_id"] = s.site_id;
            j["idiom"] = std::string(idiom_name(s.idiom));
            j["declined"] = s.reason;
            j["pass"] = s.pass;
            out += j.dump();
            out += "\n";
        }
        if (f.error) {
            json j;
            j["path"] = f.path;
            j["error"] = *f.error;
            out += j.dump();
            out += "\n";
        }
    }
    return out;
}

std::string render_diffs(const RunReport& report) {
    std::string out;
    for (const FileOutcome& f : report.files) {
        if (f.error) {
            out += "error: " + *f.error + "\n";
            continue;
        }
        for (const CandidateRecord& c : f.candidates) {
            out += c.diff;
            if (!c.diff.empty() && c.diff.back() != '\n') out += "\n";
        }
    }
    return out;
}

}  // namespace idiomizer
