#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "idiomizer/abstraction.hpp"
#include "idiomizer/extraction.hpp"
#include "idiomizer/idioms.hpp"

namespace idiomizer {

struct Accepted {
    std::string abstract_idiomatic_code;
};
struct Declined {
    std::string reason;
};
using IdiomatizationOutcome = std::variant<Accepted, Declined>;

inline const Accepted* accepted(const IdiomatizationOutcome& o) {
    return std::get_if<Accepted>(&o);
}
inline const Declined* declined(const IdiomatizationOutcome& o) {
    return std::get_if<Declined>(&o);
}

struct EngineRequest {
    IdiomKind idiom;
    std::string prompt;
    std::string abstract_code;
    double temperature = 0.0;  // fixed at 0 for reproducibility
    /// SHA-256 of idiom name, prompt and abstract code (US-separated).
    std::string request_sha256() const;
};

struct EngineResponse {
    std::string raw_text;
    IdiomatizationOutcome outcome = Declined{"empty response"};
};

struct PromptTemplate {
    IdiomKind idiom;
    std::string instruction;
    std::vector<std::pair<std::string, std::string>> examples;  // <= 3 pairs
};
const PromptTemplate& prompt_for(IdiomKind kind);
/// The abstraction-step prompt (shipped for the remote engine).
const std::string& abstraction_prompt();
std::string render_prompt(const PromptTemplate& tmpl, std::string_view abstract_code);

/// Everything a transform may consult besides the abstract code itself.
struct EngineContext {
    const SourceFile* file = nullptr;
    const MatchSite* site = nullptr;
    std::string indent_unit = "    ";
};

class Engine {
public:
    virtual ~Engine() = default;
    virtual std::string_view name() const = 0;
    /// Declined is a valid, non-error outcome.
    virtual IdiomatizationOutcome idiomatize(const EngineContext& ctx,
                                             const AbstractionResult& abstraction) = 0;
};

/// Built-in rule engine: pure, deterministic, no I/O.
class DeterministicEngine final : public Engine {
public:
    std::string_view name() const override { return "deterministic"; }
    IdiomatizationOutcome idiomatize(const EngineContext& ctx,
                                     const AbstractionResult& abstraction) override;
};

/// Accepted code must carry the idiom's syntactic marker once parsed with
/// symbols treated as plain names.
bool has_idiom_marker(IdiomKind kind, std::string_view code);

/// Parses an engine reply: a Yes/No verdict line plus a fenced code block.
/// Unparseable replies degrade to Declined with a malformed-response reason.
IdiomatizationOutcome parse_engine_reply(std::string_view raw);

// Individual deterministic transforms (exposed for targeted testing).

/// Merges two abstract comparisons into one chain. Tries the eight
/// order/reversal configurations in a fixed sequence and accepts the first
/// whose boundary operands coincide; reversals mirror the whole operand
/// sequence (< <-> >, <= <-> >=, ==/!= and is/is not unchanged) and any
/// configuration that would reverse `in`/`not in` is discarded.
IdiomatizationOutcome chain_two_compares(std::string_view c1, std::string_view c2);

enum class CompFlavor { List, Set, Dict };
/// Builds `target = [elt for ... if ...]` (or set/dict form) from the init
/// assignment and loop of a comprehension-shaped site.
IdiomatizationOutcome build_comprehension(std::string_view loop_text,
                                          std::string_view init_text, CompFlavor flavor);

/// First name from base, base2, base3, ... whose token never occurs in text.
std::string fresh_name(std::string_view text, std::string_view base);

}  // namespace idiomizer
