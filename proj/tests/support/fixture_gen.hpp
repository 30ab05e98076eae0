// Builds the replay fixture store for the golden corpus: one record per
// golden site whose response replays exactly what the deterministic engine
// produces, in the Yes/No + fenced-block reply format.
#pragma once

#include <string>
#include <vector>

#include "idiomizer/abstraction.hpp"
#include "idiomizer/engine.hpp"
#include "idiomizer/extraction.hpp"
#include "idiomizer/llm.hpp"
#include "idiomizer/pipeline.hpp"
#include "idiomizer/textops.hpp"

#include "golden.hpp"

namespace testsup {

inline std::vector<idiomizer::FixtureRecord> golden_fixture_records() {
    using namespace idiomizer;
    std::vector<FixtureRecord> records;
    DeterministicEngine det;
    for (const golden::GoldenCase& g : golden::cases()) {
        const SourceFile file = SourceFile::from_text(g.id + ".py", g.file_text);
        const Ast ast = parse_source(file.text());
        EngineContext ctx;
        ctx.file = &file;
        ctx.indent_unit = detect_indent_unit(file.text());
        for (const MatchSite& site : find_sites(file, ast, {g.idiom})) {
            ctx.site = &site;
            const SiteAbstraction abstraction = abstract_site(site, file);
            const IdiomatizationOutcome outcome = det.idiomatize(ctx, abstraction.result);
            EngineRequest request;
            request.idiom = site.idiom;
            request.prompt = render_prompt(prompt_for(site.idiom),
                                           abstraction.result.abstract_code);
            request.abstract_code = abstraction.result.abstract_code;
            FixtureRecord record;
            record.request_sha256 = request.request_sha256();
            record.idiom = std::string(idiom_name(site.idiom));
            record.prompt = request.prompt;
            record.abstract_code = request.abstract_code;
            if (const Accepted* acc = accepted(outcome)) {
                record.response = "Yes\n```python\n" + acc->abstract_idiomatic_code + "\n```\n";
            } else {
                record.response = "No. " + declined(outcome)->reason + "\n";
            }
            records.push_back(std::move(record));
        }
    }
    return records;
}

inline std::string golden_fixture_jsonl() {
    std::string out;
    for (const idiomizer::FixtureRecord& r : golden_fixture_records()) {
        out += r.to_json_line();
        out += "\n";
    }
    return out;
}

}  // namespace testsup
