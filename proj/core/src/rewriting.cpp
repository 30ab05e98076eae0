#include "idiomizer/rewriting.hpp"

#include "idiomizer/textops.hpp"

namespace idiomizer {

RefactoringCandidate rewrite_site(const SourceFile& file, const MatchSite& site,
                                  const Accepted& outcome, const SiteAbstraction& abstraction) {
    RefactoringCandidate candidate;
    candidate.site_id = site.site_id;
    candidate.idiom = site.idiom;

    const std::string idiomatic = restore(outcome.abstract_idiomatic_code,
                                          abstraction.result.bindings);
    candidate.idiomatic = idiomatic;

    std::vector<Edit> edits;
    switch (site.idiom) {
        case IdiomKind::ChainComparison: {
            // Delete Compare1 plus its "and", then replace Compare2 with the
            // restored chain. Wrapping parentheses travel with the operands.
            const Node* c1 = site.components.nodes.at(0);
            const Node* c2 = site.components.nodes.at(1);
            const Span e1 = expand_wrapping_parens(file.text(), c1->span);
            const Span e2 = expand_wrapping_parens(file.text(), c2->span);
            candidate.span = Span{e1.start, e2.end};
            candidate.non_idiomatic = std::string(file.slice(candidate.span));
            edits.emplace_back(Span{e1.start, e2.start}, "");
            edits.emplace_back(e2, idiomatic);
            break;
        }
        case IdiomKind::TruthTest:
        case IdiomKind::Fstring: {
            candidate.span = site.span;
            candidate.non_idiomatic = std::string(file.slice(site.span));
            edits.emplace_back(site.span, idiomatic);
            break;
        }
        case IdiomKind::StarInFuncCall: {
            candidate.span = site.span;
            candidate.non_idiomatic = std::string(file.slice(site.span));
            edits.emplace_back(site.span, idiomatic);
            break;
        }
        case IdiomKind::With: {
            const Node* host = enclosing_statement(*site.components.nodes.front());
            if (!host) throw ResultUnparseable("with-site host statement vanished");
            candidate.span = host->span;
            candidate.non_idiomatic = abstraction.component_text;
            edits.emplace_back(host->span,
                               reindent_block(idiomatic, abstraction.base_indent));
            break;
        }
        default: {
            // Statement-run replacements: comprehensions, loop-else,
            // assignment runs, for-multi-targets, enumerate.
            candidate.span = site.span;
            candidate.non_idiomatic = abstraction.component_text;
            edits.emplace_back(site.span,
                               reindent_block(idiomatic, abstraction.base_indent));
            break;
        }
    }

    candidate.edits = edits;
    candidate.new_source = splice(file.text(), std::move(edits));
    try {
        parse_source(candidate.new_source);
    } catch (const SyntaxError& e) {
        throw ResultUnparseable("rewritten " + file.path() + " does not parse: " + e.what());
    }
    candidate.diff = unified_diff(file.text(), candidate.new_source, file.path());
    if (site.idiom == IdiomKind::LoopElse) {
        candidate.caveat =
            "loop-else: the else clause also runs when the loop makes zero iterations";
    }
    return candidate;
}

}  // namespace idiomizer
