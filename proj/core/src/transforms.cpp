#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>

#include "idiomizer/engine.hpp"
#include "idiomizer/textops.hpp"
#include "idiomizer/tokens.hpp"

namespace idiomizer {

namespace {

struct ParsedStmts {
    Ast ast;
    std::vector<const Node*> stmts;
    bool ok = false;
};

ParsedStmts parse_statements(std::string_view text) {
    ParsedStmts out;
    try {
        out.ast = parse_source(text);
    } catch (const SyntaxError&) {
        return out;
    }
    if (const auto* body = out.ast.root().field_list("body")) {
        out.stmts = *body;
        out.ok = true;
    }
    return out;
}

const Node* sole_expression(const ParsedStmts& parsed) {
    if (!parsed.ok || parsed.stmts.size() != 1) return nullptr;
    if (parsed.stmts[0]->kind != NodeKind::Expr) return nullptr;
    return parsed.stmts[0]->field_node("value");
}

// --- chain comparison ------------------------------------------------------

struct Cmp {
    std::vector<std::string> operands;  // source texts
    std::vector<std::string> norms;     // normalized operand texts
    std::vector<std::string> ops;
    bool reversible = true;
};

std::optional<Cmp> parse_compare_text(std::string_view text) {
    ParsedStmts parsed = parse_statements(text);
    const Node* expr = sole_expression(parsed);
    if (!expr || expr->kind != NodeKind::Compare) return std::nullopt;
    Cmp out;
    for (const Node* operand : compare_operands(*expr)) {
        out.operands.emplace_back(node_text(*operand, text));
        out.norms.push_back(normalize_tokens(out.operands.back()));
    }
    for (std::string_view op : compare_ops(*expr)) {
        out.ops.emplace_back(op);
        if (op == "in" || op == "not in") out.reversible = false;
    }
    if (out.operands.size() < 2 || out.ops.empty()) return std::nullopt;
    return out;
}

std::optional<std::string> reversed_op(const std::string& op) {
    if (op == "<") return ">";
    if (op == ">") return "<";
    if (op == "<=") return ">=";
    if (op == ">=") return "<=";
    if (op == "==" || op == "!=" || op == "is" || op == "is not") return op;
    return std::nullopt;  // in / not in do not reverse
}

std::optional<Cmp> reversed(const Cmp& c) {
    if (!c.reversible) return std::nullopt;
    Cmp out;
    out.operands.assign(c.operands.rbegin(), c.operands.rend());
    out.norms.assign(c.norms.rbegin(), c.norms.rend());
    for (auto it = c.ops.rbegin(); it != c.ops.rend(); ++it) {
        const auto flipped = reversed_op(*it);
        if (!flipped) return std::nullopt;
        out.ops.push_back(*flipped);
    }
    return out;
}

std::optional<std::string> merge_chain(const Cmp& first, const Cmp& second) {
    if (first.norms.back() != second.norms.front()) return std::nullopt;
    std::string out = first.operands.front();
    for (std::size_t i = 0; i < first.ops.size(); ++i) {
        out += " " + first.ops[i] + " " + first.operands[i + 1];
    }
    for (std::size_t i = 0; i < second.ops.size(); ++i) {
        out += " " + second.ops[i] + " " + second.operands[i + 1];
    }
    return out;
}

}  // namespace

IdiomatizationOutcome chain_two_compares(std::string_view c1_text, std::string_view c2_text) {
    const auto c1 = parse_compare_text(c1_text);
    const auto c2 = parse_compare_text(c2_text);
    if (!c1 || !c2) return Declined{"operand is not a comparison expression"};

    const auto r1 = reversed(*c1);
    const auto r2 = reversed(*c2);

    // Fixed configuration order; reversals of in/not in are discarded, never
    // tried. The order is pinned by the worked examples: identity orderings
    // first, then single reversals with the original ordering, then the rest.
    const std::array<std::pair<const Cmp*, const Cmp*>, 8> configs = {{
        {&*c1, &*c2},
        {&*c2, &*c1},
        {r1 ? &*r1 : nullptr, &*c2},
        {&*c1, r2 ? &*r2 : nullptr},
        {r2 ? &*r2 : nullptr, &*c1},
        {&*c2, r1 ? &*r1 : nullptr},
        {r1 ? &*r1 : nullptr, r2 ? &*r2 : nullptr},
        {r2 ? &*r2 : nullptr, r1 ? &*r1 : nullptr},
    }};
    for (const auto& [first, second] : configs) {
        if (!first || !second) continue;
        if (auto merged = merge_chain(*first, *second)) {
            return Accepted{*merged};
        }
    }
    if (!c1->reversible || !c2->reversible) {
        return Declined{"reversing compare operands is invalid for the 'in' operator"};
    }
    return Declined{"no reversal configuration aligns a shared boundary operand"};
}

// --- comprehensions --------------------------------------------------------

IdiomatizationOutcome build_comprehension(std::string_view loop_text,
                                          std::string_view init_text, CompFlavor flavor) {
    ParsedStmts init_parsed = parse_statements(init_text);
    if (!init_parsed.ok || init_parsed.stmts.size() != 1) {
        return Declined{"initializer does not parse as one statement"};
    }
    const auto init = as_simple_assign(*init_parsed.stmts[0]);
    if (!init) return Declined{"initializer is not a simple assignment"};

    ParsedStmts loop_parsed = parse_statements(loop_text);
    if (!loop_parsed.ok || loop_parsed.stmts.size() != 1 ||
        loop_parsed.stmts[0]->kind != NodeKind::For) {
        return Declined{"component does not parse as one for statement"};
    }
    const CompShape shape = analyze_comprehension_loop(*loop_parsed.stmts[0], loop_text);
    if (!shape.ok || !shape.terminal) {
        return Declined{shape.fail_reason.empty() ? "loop body is not comprehension-shaped"
                                                  : shape.fail_reason};
    }

    std::string element;
    if (flavor == CompFlavor::Dict) {
        const auto sub = as_subscript_assign(*shape.terminal);
        if (!sub) return Declined{"loop does not assign through a subscript"};
        element = std::string(node_text(*sub->index, loop_text)) + ": " +
                  std::string(node_text(*sub->value, loop_text));
    } else {
        const auto effect = as_append_or_add(*shape.terminal);
        const std::string_view want = flavor == CompFlavor::List ? "append" : "add";
        if (!effect || effect->method != want) {
            return Declined{"loop does not end in the collecting call"};
        }
        element = std::string(node_text(*effect->argument, loop_text));
    }

    std::string clauses;
    for (const CompClause& clause : shape.clauses) {
        clauses += " for ";
        clauses += node_text(*clause.target, loop_text);
        clauses += " in ";
        clauses += node_text(*clause.iter, loop_text);
        if (!clause.guards.empty()) {
            clauses += " if ";
            for (std::size_t i = 0; i < clause.guards.size(); ++i) {
                if (i > 0) clauses += " and ";
                clauses += clause.guards[i];
            }
        }
    }

    const char open = flavor == CompFlavor::List ? '[' : '{';
    const char close = flavor == CompFlavor::List ? ']' : '}';
    std::string out(node_text(*init->target, init_text));
    out += " = ";
    out += open;
    out += element;
    out += clauses;
    out += close;
    return Accepted{out};
}

namespace {

// --- truth test ------------------------------------------------------------

IdiomatizationOutcome transform_truth_test(std::string_view abstract) {
    ParsedStmts parsed = parse_statements(abstract);
    const Node* compare = sole_expression(parsed);
    if (!compare || compare->kind != NodeKind::Compare) {
        return Declined{"component is not a comparison"};
    }
    const auto ops = compare_ops(*compare);
    const auto operands = compare_operands(*compare);
    if (ops.size() != 1 || operands.size() != 2) {
        return Declined{"comparison is not a single == or != test"};
    }
    const bool left_empty = is_empty_set_literal(*operands[0], abstract);
    const bool right_empty = is_empty_set_literal(*operands[1], abstract);
    if (left_empty == right_empty) {
        return Declined{"exactly one operand must be an EmptySet literal"};
    }
    const Node* subject = left_empty ? operands[1] : operands[0];
    std::string text(node_text(*subject, abstract));
    if (needs_parens_as_operand(*subject)) text = "(" + text + ")";
    if (ops[0] == "==") return Accepted{"not " + text};
    if (ops[0] == "!=") return Accepted{text};
    return Declined{"comparison operator is not == or !="};
}

// --- loop-else -------------------------------------------------------------

IdiomatizationOutcome transform_loop_else(std::string_view abstract) {
    ParsedStmts parsed = parse_statements(abstract);
    if (!parsed.ok || parsed.stmts.size() != 2) {
        return Declined{"component is not a loop followed by an if"};
    }
    const Node* loop = parsed.stmts[0];
    const Node* post_if = parsed.stmts[1];
    if ((loop->kind != NodeKind::For && loop->kind != NodeKind::While) ||
        post_if->kind != NodeKind::If) {
        return Declined{"component is not a loop followed by an if"};
    }
    const Node* test = post_if->field_node("test");
    if (!test) return Declined{"malformed if statement"};
    // Replace the if header ("if TEST:") with "else:"; the body bytes are
    // kept verbatim, which also preserves comments and inner indentation.
    std::size_t colon = std::string_view::npos;
    for (const Token& t : tokenize(abstract)) {
        if (t.span.start >= test->span.end && t.kind == Token::Kind::Op &&
            abstract.substr(t.span.start, t.span.size()) == ":") {
            colon = t.span.start;
            break;
        }
    }
    if (colon == std::string_view::npos) return Declined{"malformed if statement"};
    return Accepted{splice(abstract, {{Span{post_if->span.start, colon + 1}, "else:"}})};
}

// Comment lines inside a merged statement run cannot stay in place; they are
// hoisted above the merged statement in source order.
std::string hoisted_comments(std::string_view run_text) {
    std::string out;
    for (const Token& t : tokenize(run_text)) {
        if (t.kind != Token::Kind::Comment) continue;
        out.append(run_text.substr(t.span.start, t.span.size()));
        out.push_back('\n');
    }
    return out;
}

// --- assignment runs -------------------------------------------------------

bool value_needs_parens_in_tuple(const Node& value) {
    return value.kind == NodeKind::Tuple || value.kind == NodeKind::Lambda ||
           value.kind == NodeKind::IfExp || value.kind == NodeKind::Starred ||
           value.type_name == "NamedExpr" || value.type_name == "Yield" ||
           value.type_name == "YieldFrom";
}

IdiomatizationOutcome transform_assign_multi(std::string_view abstract) {
    ParsedStmts parsed = parse_statements(abstract);
    if (!parsed.ok || parsed.stmts.size() < 2) {
        return Declined{"component is not a run of assignments"};
    }
    std::string targets;
    std::string values;
    for (std::size_t i = 0; i < parsed.stmts.size(); ++i) {
        const auto assign = as_simple_assign(*parsed.stmts[i]);
        if (!assign || !assign->value) return Declined{"run contains a non-simple assignment"};
        if (i > 0) {
            targets += ", ";
            values += ", ";
        }
        targets += node_text(*assign->target, abstract);
        std::string value(node_text(*assign->value, abstract));
        if (value_needs_parens_in_tuple(*assign->value)) value = "(" + value + ")";
        values += value;
    }
    return Accepted{hoisted_comments(abstract) + targets + " = " + values};
}

IdiomatizationOutcome transform_chain_assign(std::string_view abstract) {
    ParsedStmts parsed = parse_statements(abstract);
    if (!parsed.ok || parsed.stmts.size() < 2) {
        return Declined{"component is not a run of assignments"};
    }
    std::string out;
    std::string first_value;
    for (std::size_t i = 0; i < parsed.stmts.size(); ++i) {
        const auto assign = as_simple_assign(*parsed.stmts[i]);
        if (!assign || !assign->value) return Declined{"run contains a non-simple assignment"};
        const std::string value(node_text(*assign->value, abstract));
        if (i == 0) {
            first_value = value;
        } else if (normalize_tokens(value) != normalize_tokens(first_value)) {
            return Declined{"assigned values differ"};
        }
        out += node_text(*assign->target, abstract);
        out += " = ";
    }
    out += first_value;
    return Accepted{hoisted_comments(abstract) + out};
}

// --- for-multi-targets -----------------------------------------------------

IdiomatizationOutcome transform_for_multi(const EngineContext& ctx, std::string_view abstract) {
    ParsedStmts parsed = parse_statements(abstract);
    if (!parsed.ok || parsed.stmts.size() != 1 || parsed.stmts[0]->kind != NodeKind::For) {
        return Declined{"component is not a for statement"};
    }
    const Node* loop = parsed.stmts[0];
    const Node* target = loop->field_node("target");
    if (!target || target->kind != NodeKind::Name) {
        return Declined{"loop target is not a plain name"};
    }
    const std::string var(target->field_str("id"));  // the abstraction symbol

    const auto* body = loop->field_list("body");
    if (!body) return Declined{"empty loop body"};
    long long max_index = -1;
    std::vector<std::pair<Span, long long>> uses;
    for (const Node* stmt : *body) {
        for (const Node* sub : subscripts_of(*stmt, var, abstract)) {
            const Node* index = sub->field_node("slice");
            const auto form = index ? index_form(*index, abstract) : std::nullopt;
            if (!form || !form->base.empty() || form->offset < 0) {
                return Declined{"subscript index is not a non-negative integer literal"};
            }
            uses.emplace_back(sub->span, form->offset);
            max_index = std::max(max_index, form->offset);
        }
    }
    if (uses.empty()) return Declined{"loop variable is never subscripted"};

    // Fresh element names, checked against the whole file; unpacking always
    // keeps a starred rest so sequences longer than max_index+1 still match.
    const std::string_view file_text = ctx.file ? ctx.file->text() : abstract;
    std::string pool(file_text);
    pool += "\n";
    pool += abstract;
    std::vector<std::string> names;
    for (long long k = 0; k <= max_index; ++k) {
        names.push_back(fresh_name(pool, "e" + std::to_string(k)));
        pool += " " + names.back();
    }
    const std::string rest = fresh_name(pool, "e");

    std::string target_list;
    for (const std::string& n : names) target_list += n + ", ";
    target_list += "*" + rest;

    std::vector<Edit> edits;
    edits.emplace_back(target->span, target_list);
    for (const auto& [span, offset] : uses) {
        edits.emplace_back(span, names[static_cast<std::size_t>(offset)]);
    }
    return Accepted{splice(abstract, std::move(edits))};
}

// --- enumerate -------------------------------------------------------------

IdiomatizationOutcome transform_enumerate(const EngineContext& ctx, std::string_view abstract) {
    ParsedStmts parsed = parse_statements(abstract);
    if (!parsed.ok || parsed.stmts.size() != 1 || parsed.stmts[0]->kind != NodeKind::For) {
        return Declined{"component is not a for statement"};
    }
    const Node* loop = parsed.stmts[0];
    const auto rl = as_range_len_loop(*loop);
    if (!rl) return Declined{"loop does not iterate range(len(...))"};
    const std::string idx(rl->index_var->field_str("id"));
    const std::string seq(node_text(*rl->sequence, abstract));  // the symbol "v"

    const auto* body = loop->field_list("body");
    if (!body || body->empty()) return Declined{"empty loop body"};

    // Subscripts seq[idx] in the body; assignments through them disqualify.
    std::vector<const Node*> element_reads;
    for (const Node* stmt : *body) {
        for (const Node* sub : subscripts_of(*stmt, normalize_tokens(seq), abstract)) {
            const Node* index = sub->field_node("slice");
            if (!index || index->kind != NodeKind::Name || index->field_str("id") != idx) {
                continue;
            }
            if (sub->parent && sub->parent->kind == NodeKind::Assign) {
                const auto* targets = sub->parent->field_list("targets");
                if (targets && std::find(targets->begin(), targets->end(), sub) != targets->end()) {
                    return Declined{"the iterated element is assigned through its subscript"};
                }
            }
            element_reads.push_back(sub);
        }
    }
    if (element_reads.empty()) return Declined{"loop body never reads the iterated element"};

    // `w = seq[idx]` as the first statement names the element; otherwise a
    // fresh name is introduced.
    std::string elem;
    std::vector<Edit> edits;
    const Node* first = (*body)[0];
    const auto binding = as_simple_assign(*first);
    const bool bound = binding && binding->target->kind == NodeKind::Name &&
                       binding->value && !element_reads.empty() &&
                       binding->value == element_reads.front() &&
                       element_reads.front()->parent == first;
    if (bound) {
        elem = std::string(binding->target->field_str("id"));
        // Drop the binding line, indentation and newline included.
        std::size_t line_start = first->span.start;
        while (line_start > 0 && abstract[line_start - 1] != '\n') --line_start;
        std::size_t line_end = first->span.end;
        if (line_end < abstract.size() && abstract[line_end] == '\n') ++line_end;
        edits.emplace_back(Span{line_start, line_end}, "");
        for (std::size_t i = 1; i < element_reads.size(); ++i) {
            edits.emplace_back(element_reads[i]->span, elem);
        }
    } else {
        std::string pool(ctx.file ? ctx.file->text() : abstract);
        pool += "\n";
        pool += abstract;
        elem = fresh_name(pool, "w");
        for (const Node* read : element_reads) {
            edits.emplace_back(read->span, elem);
        }
    }

    // Header: "for i in range(len(v)):" -> "for (i, w) in enumerate(v):".
    const Node* iter = loop->field_node("iter");
    std::size_t colon = std::string_view::npos;
    for (const Token& t : tokenize(abstract)) {
        if (t.span.start >= iter->span.end && t.kind == Token::Kind::Op &&
            abstract.substr(t.span.start, t.span.size()) == ":") {
            colon = t.span.start;
            break;
        }
    }
    if (colon == std::string_view::npos) return Declined{"malformed for statement"};
    edits.emplace_back(Span{loop->span.start, colon + 1},
                       "for (" + idx + ", " + elem + ") in enumerate(" + seq + "):");
    return Accepted{splice(abstract, std::move(edits))};
}

// --- star-in-func-call -----------------------------------------------------

IdiomatizationOutcome transform_star(std::string_view abstract) {
    // abstract is "v[i], v[i+1], ..." — a tuple of subscripts on one line.
    ParsedStmts parsed = parse_statements(abstract);
    const Node* tuple = sole_expression(parsed);
    if (!tuple) return Declined{"component is not an argument run"};
    std::vector<const Node*> subs;
    if (tuple->kind == NodeKind::Tuple) {
        if (const auto* elts = tuple->field_list("elts")) {
            subs.assign(elts->begin(), elts->end());
        }
    }
    if (subs.size() < 2) return Declined{"component is not a run of two or more subscripts"};
    std::string base;
    std::vector<IndexForm> forms;
    std::vector<std::string> index_texts;
    for (const Node* sub : subs) {
        if (sub->kind != NodeKind::Subscript) return Declined{"argument is not a subscript"};
        const Node* value = sub->field_node("value");
        const Node* index = sub->field_node("slice");
        if (!value || !index) return Declined{"argument is not a subscript"};
        if (base.empty()) {
            base = std::string(node_text(*value, abstract));
        } else if (normalize_tokens(node_text(*value, abstract)) != normalize_tokens(base)) {
            return Declined{"subscript values differ"};
        }
        const auto form = index_form(*index, abstract);
        if (!form) return Declined{"index is not an expression"};
        forms.push_back(*form);
        index_texts.emplace_back(node_text(*index, abstract));
    }
    for (std::size_t i = 1; i < forms.size(); ++i) {
        if (forms[i].base != forms[0].base) return Declined{"indices are not an arithmetic run"};
        if (forms[i].offset != forms[i - 1].offset + 1) {
            return Declined{"indices do not ascend by one"};
        }
        if (forms[i - 1].offset < 0 && forms[i].offset >= 0) {
            return Declined{"slicing does not wrap from negative to non-negative indices"};
        }
    }
    // Slice end is last index + 1, rendered literally; an all-negative run
    // ending at -1 uses an open end (v[-2:] instead of the empty v[-2:0]).
    const IndexForm& last = forms.back();
    std::string end;
    if (last.base.empty()) {
        if (last.offset + 1 != 0) end = std::to_string(last.offset + 1);
    } else {
        const long long k = last.offset + 1;
        if (k == 0) {
            end = last.base;
        } else {
            end = last.base + (k > 0 ? " + " : " - ") + std::to_string(k > 0 ? k : -k);
        }
    }
    return Accepted{"*" + base + "[" + index_texts.front() + ":" + end + "]"};
}

// --- with ------------------------------------------------------------------

IdiomatizationOutcome transform_with(const EngineContext& ctx, std::string_view abstract) {
    ParsedStmts parsed = parse_statements(abstract);
    if (!parsed.ok || parsed.stmts.size() != 1) {
        return Declined{"host is not a single statement"};
    }
    const Node* host = parsed.stmts[0];
    std::vector<const Node*> opens;
    std::function<void(const Node&)> collect = [&](const Node& n) {
        if (n.kind == NodeKind::Call) {
            const Node* fn = n.field_node("func");
            if (fn && fn->kind == NodeKind::Name && fn->field_str("id") == "open") {
                opens.push_back(&n);
            }
        }
        for (const Node* c : n.children) collect(*c);
    };
    collect(*host);
    if (opens.size() != 1) {
        return Declined{opens.empty() ? "host statement has no open() call"
                                      : "host statement has several open() calls"};
    }
    const Node* call = opens.front();
    std::string pool(ctx.file ? ctx.file->text() : abstract);
    pool += "\n";
    pool += abstract;
    const std::string handle = fresh_name(pool, "f");
    const std::string call_text(node_text(*call, abstract));
    const std::string new_host = splice(abstract, {{call->span, handle}});
    std::string out = "with " + call_text + " as " + handle + ":\n";
    out += ctx.indent_unit;
    out += reindent_block(new_host, ctx.indent_unit);
    return Accepted{out};
}

// --- fstring ---------------------------------------------------------------

IdiomatizationOutcome transform_fstring(std::string_view abstract) {
    ParsedStmts parsed = parse_statements(abstract);
    const Node* binop = sole_expression(parsed);
    if (!binop || binop->kind != NodeKind::BinOp || binop->field_str("op") != "Mod") {
        return Declined{"component is not a % formatting expression"};
    }
    const Node* left = binop->field_node("left");
    const Node* right = binop->field_node("right");
    if (!left || left->kind != NodeKind::Constant || left->const_kind != "str" || !right) {
        return Declined{"left operand is not a string literal"};
    }
    const std::string literal(node_text(*left, abstract));

    // Split the literal into prefix, quote delimiter and inner text.
    std::size_t q = 0;
    while (q < literal.size() && literal[q] != '\'' && literal[q] != '"') ++q;
    if (q == literal.size()) return Declined{"malformed string literal"};
    const std::string prefix = literal.substr(0, q);
    for (char c : prefix) {
        const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (l == 'b' || l == 'f') return Declined{"bytes and f-string literals are not convertible"};
    }
    const char quote = literal[q];
    const bool triple = literal.substr(q, 3) == std::string(3, quote);
    const std::size_t open = triple ? 3 : 1;
    const std::string delim = literal.substr(q, open);
    if (literal.size() < q + 2 * open) return Declined{"malformed string literal"};
    const std::string inner = literal.substr(q + open, literal.size() - q - 2 * open);

    std::vector<std::string> args;
    if (right->kind == NodeKind::Tuple) {
        if (const auto* elts = right->field_list("elts")) {
            for (const Node* e : *elts) {
                if (e->kind == NodeKind::Starred) return Declined{"starred format argument"};
                args.emplace_back(node_text(*e, abstract));
            }
        }
    } else {
        if (right->kind == NodeKind::Name || right->kind == NodeKind::Attribute ||
            right->kind == NodeKind::Call || right->kind == NodeKind::Subscript ||
            right->kind == NodeKind::Constant || right->kind == NodeKind::BinOp ||
            right->kind == NodeKind::UnaryOp) {
            args.emplace_back(node_text(*right, abstract));
        } else {
            return Declined{"unsupported format argument expression"};
        }
    }
    for (const std::string& a : args) {
        if (a.find(quote) != std::string::npos || a.find('\\') != std::string::npos ||
            a.find('\n') != std::string::npos || a.find('{') != std::string::npos ||
            a.find('}') != std::string::npos) {
            return Declined{"format argument cannot be embedded in an f-string"};
        }
    }

    std::string out_inner;
    std::size_t used = 0;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        const char c = inner[i];
        if (c == '{') {
            out_inner += "{{";
            continue;
        }
        if (c == '}') {
            out_inner += "}}";
            continue;
        }
        if (c != '%') {
            out_inner += c;
            continue;
        }
        if (i + 1 >= inner.size()) return Declined{"dangling % in format string"};
        const char spec = inner[++i];
        if (used >= args.size()) return Declined{"more format specifiers than arguments"};
        switch (spec) {
            case 's': out_inner += "{" + args[used] + "}"; break;
            case 'r': out_inner += "{" + args[used] + "!r}"; break;
            case 'd': out_inner += "{" + args[used] + ":d}"; break;
            case 'f': out_inner += "{" + args[used] + ":f}"; break;
            default:
                return Declined{std::string("unsupported format specifier %") + spec};
        }
        ++used;
    }
    if (used != args.size()) return Declined{"fewer format specifiers than arguments"};
    return Accepted{"f" + prefix + delim + out_inner + delim};
}

// --- chain comparison site glue --------------------------------------------

IdiomatizationOutcome transform_chain_site(const EngineContext& ctx,
                                           const AbstractionResult& abstraction) {
    // Adjacent conjuncts only: rewriting across an intervening operand would
    // reorder its evaluation relative to the comparisons.
    if (ctx.site && ctx.site->scenario) {
        const auto* values = ctx.site->scenario->field_list("values");
        if (values) {
            std::ptrdiff_t i = -1, j = -1;
            for (std::size_t k = 0; k < values->size(); ++k) {
                if ((*values)[k] == ctx.site->components.nodes.at(0)) i = static_cast<std::ptrdiff_t>(k);
                if ((*values)[k] == ctx.site->components.nodes.at(1)) j = static_cast<std::ptrdiff_t>(k);
            }
            if (i < 0 || j != i + 1) {
                return Declined{"comparisons are not adjacent operands of the and-chain"};
            }
        }
    }
    ParsedStmts parsed = parse_statements(abstraction.abstract_code);
    const Node* boolop = sole_expression(parsed);
    if (!boolop || boolop->kind != NodeKind::BoolOp) {
        return Declined{"abstract code is not an and-pair of comparisons"};
    }
    const auto* values = boolop->field_list("values");
    if (!values || values->size() != 2) {
        return Declined{"abstract code is not an and-pair of comparisons"};
    }
    return chain_two_compares(node_text(*(*values)[0], abstraction.abstract_code),
                              node_text(*(*values)[1], abstraction.abstract_code));
}

}  // namespace

IdiomatizationOutcome DeterministicEngine::idiomatize(const EngineContext& ctx,
                                                      const AbstractionResult& abstraction) {
    if (!ctx.site) return Declined{"engine invoked without a site"};
    const std::string_view code = abstraction.abstract_code;
    IdiomatizationOutcome out = Declined{"unhandled idiom"};
    switch (ctx.site->idiom) {
        case IdiomKind::ChainComparison:
            out = transform_chain_site(ctx, abstraction);
            break;
        case IdiomKind::TruthTest:
            out = transform_truth_test(code);
            break;
        case IdiomKind::ListComprehension:
        case IdiomKind::SetComprehension:
        case IdiomKind::DictComprehension: {
            // abstract code is "init \n loop"; split on the statement bound.
            ParsedStmts parsed = parse_statements(code);
            if (!parsed.ok || parsed.stmts.size() != 2) {
                out = Declined{"component is not an initializer followed by a loop"};
                break;
            }
            const Node* init = parsed.stmts[0];
            const Node* loop = parsed.stmts[1];
            const CompFlavor flavor = ctx.site->idiom == IdiomKind::ListComprehension
                                          ? CompFlavor::List
                                          : (ctx.site->idiom == IdiomKind::SetComprehension
                                                 ? CompFlavor::Set
                                                 : CompFlavor::Dict);
            out = build_comprehension(node_text(*loop, code), node_text(*init, code), flavor);
            if (const Accepted* acc = accepted(out)) {
                const std::string comments = hoisted_comments(code);
                if (!comments.empty()) out = Accepted{comments + acc->abstract_idiomatic_code};
            }
            break;
        }
        case IdiomKind::LoopElse:
            out = transform_loop_else(code);
            break;
        case IdiomKind::AssignMultiTargets:
            out = transform_assign_multi(code);
            break;
        case IdiomKind::ChainAssignSameValue:
            out = transform_chain_assign(code);
            break;
        case IdiomKind::ForMultiTargets:
            out = transform_for_multi(ctx, code);
            break;
        case IdiomKind::Enumerate:
            out = transform_enumerate(ctx, code);
            break;
        case IdiomKind::StarInFuncCall:
            out = transform_star(code);
            break;
        case IdiomKind::With:
            out = transform_with(ctx, code);
            break;
        case IdiomKind::Fstring:
            out = transform_fstring(code);
            break;
    }
    if (const Accepted* acc = accepted(out)) {
        std::string probe = acc->abstract_idiomatic_code;
        if (ctx.site->idiom == IdiomKind::StarInFuncCall) {
            probe = "probe_(" + probe + ")";
        }
        if (!has_idiom_marker(ctx.site->idiom, probe)) {
            return Declined{"transform produced code without the idiom's marker"};
        }
    }
    return out;
}

}  // namespace idiomizer
