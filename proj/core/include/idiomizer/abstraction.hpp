#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "idiomizer/extraction.hpp"
#include "idiomizer/idioms.hpp"
#include "idiomizer/source.hpp"

namespace idiomizer {

struct ObjectNotFound : std::runtime_error {
    explicit ObjectNotFound(std::string message) : std::runtime_error(std::move(message)) {}
};
struct UnboundSymbol : std::runtime_error {
    explicit UnboundSymbol(std::string message) : std::runtime_error(std::move(message)) {}
};

using Bindings = std::vector<std::pair<std::string, std::string>>;

struct AbstractionResult {
    std::string abstract_code;
    Bindings bindings;  // symbol -> original expression text, first-occurrence order
    AbstractionMode mode = AbstractionMode::NoAbstraction;
};

/// One operand to abstract: its span inside the component text, plus whether
/// restoring it into operator context requires wrapping parentheses
/// (conditional expressions, lambdas, boolean operators).
struct OperandRef {
    Span span;
    bool wrap_parens = false;
};

/// Replaces each operand span with a symbol v1, v2, ...; operands with equal
/// token-normalized text share one symbol.
AbstractionResult abstract_operands(std::string_view component_text,
                                    std::span<const OperandRef> operands);

/// Replaces every whole-token occurrence of `object_text` with the symbol "v".
AbstractionResult abstract_specified(std::string_view component_text,
                                     std::string_view object_text);

/// Whole-token substitution of symbols by their bound texts; "v1" never
/// matches inside "v12" or any longer identifier.
std::string restore(std::string_view abstract_code, const Bindings& bindings);

/// Per-idiom abstraction of a match site. The component text is dedented so
/// it parses standalone; `base_indent` preserves what rewriting must restore.
struct SiteAbstraction {
    AbstractionResult result;
    std::string component_text;  // dedented original text fed to abstraction
    std::string base_indent;
};
SiteAbstraction abstract_site(const MatchSite& site, const SourceFile& file);

}  // namespace idiomizer
