#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "idiomizer/abstraction.hpp"
#include "idiomizer/engine.hpp"
#include "idiomizer/extraction.hpp"
#include "idiomizer/source.hpp"

namespace idiomizer {

/// The candidate rewrite never leaves this module unparsed: rewrite_site
/// reparses new_source and throws instead of emitting broken output.
struct ResultUnparseable : std::runtime_error {
    explicit ResultUnparseable(std::string message) : std::runtime_error(std::move(message)) {}
};

struct RefactoringCandidate {
    std::string site_id;
    IdiomKind idiom;
    Span span;
    std::string non_idiomatic;  // original component text
    std::string idiomatic;      // final replacement text (dedented form)
    std::vector<Edit> edits;
    std::string diff;
    std::string new_source;
    std::optional<std::string> caveat;  // loop-else zero-iteration note
};

/// Restores bindings into the accepted abstract code and splices it into the
/// source along the idiom's edit plan. Throws ResultUnparseable when the
/// rewritten file no longer parses (the candidate is discarded by callers).
RefactoringCandidate rewrite_site(const SourceFile& file, const MatchSite& site,
                                  const Accepted& outcome, const SiteAbstraction& abstraction);

/// Unified diff with three context lines and stable a/<path> b/<path>
/// headers; returns "" for identical inputs. CRLF input is compared and
/// emitted LF-normalized.
std::string unified_diff(std::string_view before, std::string_view after,
                         std::string_view path);

}  // namespace idiomizer
