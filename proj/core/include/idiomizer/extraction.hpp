#pragma once

#include <optional>
#include <string>
#include <vector>

#include "idiomizer/ast.hpp"
#include "idiomizer/idioms.hpp"
#include "idiomizer/source.hpp"

namespace idiomizer {

/// One candidate occurrence of a component shape inside a scenario scope.
struct ComponentTuple {
    std::vector<const Node*> nodes;  // arity fixed by the spec's shape
    const Node* scope = nullptr;     // scenario node or module root
};

struct MatchSite {
    IdiomKind idiom;
    const Node* scenario = nullptr;  // null when the idiom has no scenario
    ComponentTuple components;
    Span span;            // first component start .. last component end
    std::string site_id;  // stable hash of (path, idiom, component spans)
};

/// Scenario step: nodes matching the spec's scenario pattern in source order,
/// or the module root when the idiom has none.
std::vector<const Node*> extract_scenarios(const Ast& ast, const IdiomSpec& spec);

/// Component step: tuples within one scope. For runs, only maximal adjacent
/// runs of length >= min_len; for pairs, all position-ordered pairs; nested
/// matches inside returned nodes are reported as independent tuples.
std::vector<ComponentTuple> extract_components(const Node& scope, const IdiomSpec& spec,
                                               const SourceFile& file);

/// Condition step: pure predicate over a tuple.
bool evaluate_condition(ConditionId cond, IdiomKind idiom, const ComponentTuple& tuple,
                        const SourceFile& file);

/// Scenario -> component -> condition composition for the selected idioms,
/// source-ordered and deduplicated by site_id.
std::vector<MatchSite> find_sites(const SourceFile& file, const Ast& ast,
                                  const std::vector<IdiomKind>& kinds);

// ---------------------------------------------------------------------------
// Structural analyses shared between condition evaluation and the
// deterministic transforms. All operate on a node plus the buffer it was
// parsed from.

/// Negation of a test expression by the syntactic table:
/// is<->is not, in<->not in, ==<->!=, <<->>=, ><-><=, E<->not E.
std::string negate_test(const Node& test, std::string_view text);

/// True when the expression needs parentheses as an operand of `and`.
bool needs_parens_in_and(const Node& expr);
/// True when the expression needs parentheses under `not` or as a statement
/// substituted into operator context (BoolOp / conditional / lambda).
bool needs_parens_as_operand(const Node& expr);

struct CompClause {
    const Node* target = nullptr;
    const Node* iter = nullptr;
    std::vector<std::string> guards;  // rendered guard texts, in order
};

/// Canonical comprehension-shaped loop body: optional `if C: continue`
/// guards, then exactly one of {terminal effect statement, nested for,
/// guarding if}, with nothing after it.
struct CompShape {
    bool ok = false;
    std::string fail_reason;
    std::vector<CompClause> clauses;
    const Node* terminal = nullptr;  // Expr(call) or Assign-to-subscript
};
CompShape analyze_comprehension_loop(const Node& for_node, std::string_view text);

/// target.append(x) / target.add(x) statement decomposition.
struct EffectCall {
    const Node* receiver = nullptr;  // expression before .append/.add
    std::string_view method;
    const Node* argument = nullptr;
};
std::optional<EffectCall> as_append_or_add(const Node& stmt);

/// d[k] = v statement decomposition.
struct SubscriptAssign {
    const Node* base = nullptr;
    const Node* index = nullptr;
    const Node* value = nullptr;
};
std::optional<SubscriptAssign> as_subscript_assign(const Node& stmt);

/// Single-target simple assignment (target is Name/Attribute/Subscript).
struct SimpleAssign {
    const Node* target = nullptr;
    const Node* value = nullptr;
};
std::optional<SimpleAssign> as_simple_assign(const Node& stmt);

/// break statements belonging to this loop (not nested loops).
std::vector<const Node*> collect_breaks(const Node& loop);

/// The unique `if GUARD: break` of a loop, when there is exactly one break
/// and it is the sole statement of a plain if.
const Node* unique_break_guard(const Node& loop);

/// Subscript index normalized to base expression + integer offset:
/// a[3] -> ("", 3); a[i] -> ("i", 0); a[i+1] -> ("i", 1); a[i-2] -> ("i", -2).
struct IndexForm {
    std::string base;  // normalized tokens; empty for pure literals
    long long offset = 0;
};
std::optional<IndexForm> index_form(const Node& index_expr, std::string_view text);

/// Maximal runs of consecutive positional Subscript arguments of a call.
std::vector<std::vector<const Node*>> subscript_arg_runs(const Node& call);

/// for i in range(len(X)) decomposition.
struct RangeLenLoop {
    const Node* index_var = nullptr;  // Name node
    const Node* sequence = nullptr;   // X (Name or Attribute)
};
std::optional<RangeLenLoop> as_range_len_loop(const Node& for_node);

/// All `base[index]` subscripts of a given name below `root` (by token
/// equality on the base).
std::vector<const Node*> subscripts_of(const Node& root, std::string_view base_tokens,
                                       std::string_view text);

/// Uses of a plain name below `root` (Name nodes with matching id).
std::vector<const Node*> name_uses(const Node& root, std::string_view name);

bool is_empty_set_literal(const Node& expr, std::string_view text);
bool is_immutable_literal(const Node& expr);

}  // namespace idiomizer
