#include "idiomizer/extraction.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "idiomizer/sha256.hpp"
#include "idiomizer/tokens.hpp"

namespace idiomizer {

namespace {

void walk_from(const Node& node, const std::function<void(const Node&)>& fn) {
    fn(node);
    for (const Node* c : node.children) walk_from(*c, fn);
}

std::vector<const Node*> collect_kind(const Node& scope, NodeKind kind) {
    std::vector<const Node*> out;
    walk_from(scope, [&](const Node& n) {
        if (n.kind == kind) out.push_back(&n);
    });
    return out;
}

// Compare nodes reachable from a test root through truth-preserving edges
// only (BoolOp operands and `not` operands).
void truth_position_compares(const Node& node, std::vector<const Node*>& out) {
    if (node.kind == NodeKind::Compare) {
        out.push_back(&node);
        return;
    }
    if (node.kind == NodeKind::BoolOp) {
        if (const auto* values = node.field_list("values")) {
            for (const Node* v : *values) truth_position_compares(*v, out);
        }
        return;
    }
    if (node.kind == NodeKind::UnaryOp && node.field_str("op") == "Not") {
        if (const Node* operand = node.field_node("operand")) {
            truth_position_compares(*operand, out);
        }
    }
}

std::vector<const Node*> test_roots(const Ast& ast) {
    std::vector<const Node*> out;
    ast.walk([&](const Node& n) {
        switch (n.kind) {
            case NodeKind::If:
            case NodeKind::While:
            case NodeKind::IfExp:
                if (const Node* test = n.field_node("test")) out.push_back(test);
                break;
            case NodeKind::UnaryOp:
                if (n.field_str("op") == "Not") {
                    if (const Node* operand = n.field_node("operand")) out.push_back(operand);
                }
                break;
            default:
                if (n.type_name == "comprehension") {
                    if (const auto* ifs = n.field_list("ifs")) {
                        out.insert(out.end(), ifs->begin(), ifs->end());
                    }
                }
                break;
        }
    });
    return out;
}

// All statement lists in the subtree, the scope's own suites included.
void each_suite(const Node& node, const std::function<void(const std::vector<const Node*>&)>& fn) {
    walk_from(node, [&](const Node& n) {
        for (const Field& f : n.fields) {
            if (f.name != "body" && f.name != "orelse" && f.name != "finalbody") continue;
            if (const auto* list = std::get_if<std::vector<const Node*>>(&f.value)) {
                if (!list->empty() && (*list)[0]->is_statement()) fn(*list);
            }
        }
    });
}

bool is_plain_string_literal(const Node& node, const SourceFile& file) {
    if (node.kind != NodeKind::Constant || node.const_kind != "str") return false;
    std::string_view text = node_text(node, file);
    for (char c : text) {
        if (c == '\'' || c == '"') return true;
        const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (l == 'b' || l == 'f') return false;
        if (l != 'r' && l != 'u') return false;
    }
    return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Shared structural analyses

bool needs_parens_as_operand(const Node& expr) {
    if (expr.kind == NodeKind::BoolOp || expr.kind == NodeKind::IfExp ||
        expr.kind == NodeKind::Lambda) {
        return true;
    }
    return expr.type_name == "NamedExpr" || expr.type_name == "Yield" ||
           expr.type_name == "YieldFrom" || expr.type_name == "Await";
}

bool needs_parens_in_and(const Node& expr) {
    if (expr.kind == NodeKind::BoolOp) return expr.field_str("op") == "Or";
    if (expr.kind == NodeKind::IfExp || expr.kind == NodeKind::Lambda) return true;
    return expr.type_name == "NamedExpr" || expr.type_name == "Yield" ||
           expr.type_name == "YieldFrom" || expr.type_name == "Await";
}

std::string negate_test(const Node& test, std::string_view text) {
    if (test.kind == NodeKind::Compare) {
        const auto ops = compare_ops(test);
        const auto operands = compare_operands(test);
        if (ops.size() == 1 && operands.size() == 2) {
            static const std::pair<std::string_view, std::string_view> flips[] = {
                {"==", "!="}, {"!=", "=="}, {"<", ">="},     {">=", "<"},
                {">", "<="},  {"<=", ">"},  {"is", "is not"}, {"is not", "is"},
                {"in", "not in"}, {"not in", "in"},
            };
            for (const auto& [from, to] : flips) {
                if (ops[0] == from) {
                    std::string out(node_text(*operands[0], text));
                    out += " ";
                    out += to;
                    out += " ";
                    out += node_text(*operands[1], text);
                    return out;
                }
            }
        }
    }
    if (test.kind == NodeKind::UnaryOp && test.field_str("op") == "Not") {
        const Node* operand = test.field_node("operand");
        std::string inner(node_text(*operand, text));
        if (needs_parens_as_operand(*operand)) return "(" + inner + ")";
        return inner;
    }
    std::string inner(node_text(test, text));
    if (needs_parens_as_operand(test)) return "not (" + inner + ")";
    return "not " + inner;
}

std::optional<EffectCall> as_append_or_add(const Node& stmt) {
    if (stmt.kind != NodeKind::Expr) return std::nullopt;
    const Node* call = stmt.field_node("value");
    if (!call || call->kind != NodeKind::Call) return std::nullopt;
    const Node* func = call->field_node("func");
    if (!func || func->kind != NodeKind::Attribute) return std::nullopt;
    const std::string_view method = func->field_str("attr");
    if (method != "append" && method != "add") return std::nullopt;
    const auto* args = call->field_list("args");
    if (!args || args->size() != 1) return std::nullopt;
    const auto* keywords = call->field_list("keywords");
    if (keywords && !keywords->empty()) return std::nullopt;
    return EffectCall{func->field_node("value"), method, (*args)[0]};
}

std::optional<SubscriptAssign> as_subscript_assign(const Node& stmt) {
    if (stmt.kind != NodeKind::Assign) return std::nullopt;
    const auto* targets = stmt.field_list("targets");
    if (!targets || targets->size() != 1) return std::nullopt;
    const Node* target = (*targets)[0];
    if (target->kind != NodeKind::Subscript) return std::nullopt;
    const Node* index = target->field_node("slice");
    if (!index || index->kind == NodeKind::Slice) return std::nullopt;
    return SubscriptAssign{target->field_node("value"), index, stmt.field_node("value")};
}

std::optional<SimpleAssign> as_simple_assign(const Node& stmt) {
    if (stmt.kind != NodeKind::Assign) return std::nullopt;
    const auto* targets = stmt.field_list("targets");
    if (!targets || targets->size() != 1) return std::nullopt;
    const Node* target = (*targets)[0];
    if (target->kind != NodeKind::Name && target->kind != NodeKind::Attribute &&
        target->kind != NodeKind::Subscript) {
        return std::nullopt;
    }
    return SimpleAssign{target, stmt.field_node("value")};
}

namespace {

void collect_breaks_rec(const Node& node, std::vector<const Node*>& out, bool top) {
    for (const Field& f : node.fields) {
        if (f.name != "body" && f.name != "orelse" && f.name != "finalbody") continue;
        // A nested loop captures breaks in its body but not in its else suite.
        if (!top && (node.kind == NodeKind::For || node.kind == NodeKind::While) &&
            f.name != "orelse") {
            continue;
        }
        if (const auto* list = std::get_if<std::vector<const Node*>>(&f.value)) {
            for (const Node* stmt : *list) {
                if (stmt->kind == NodeKind::Break) {
                    out.push_back(stmt);
                    continue;
                }
                if (stmt->kind == NodeKind::FunctionDef || stmt->type_name == "ClassDef") {
                    continue;
                }
                collect_breaks_rec(*stmt, out, false);
            }
        }
    }
}

}  // namespace

std::vector<const Node*> collect_breaks(const Node& loop) {
    std::vector<const Node*> out;
    // Walk the loop's own body/else suites, then recurse without crossing
    // nested loop bodies or function boundaries.
    for (const Field& f : loop.fields) {
        if (f.name != "body") continue;
        if (const auto* list = std::get_if<std::vector<const Node*>>(&f.value)) {
            for (const Node* stmt : *list) {
                if (stmt->kind == NodeKind::Break) {
                    out.push_back(stmt);
                    continue;
                }
                if (stmt->kind == NodeKind::FunctionDef || stmt->type_name == "ClassDef") {
                    continue;
                }
                collect_breaks_rec(*stmt, out, false);
            }
        }
    }
    return out;
}

const Node* unique_break_guard(const Node& loop) {
    const auto breaks = collect_breaks(loop);
    if (breaks.size() != 1) return nullptr;
    const Node* br = breaks.front();
    const Node* guard = br->parent;
    if (!guard || guard->kind != NodeKind::If) return nullptr;
    const auto* body = guard->field_list("body");
    const auto* orelse = guard->field_list("orelse");
    if (!body || body->size() != 1 || (*body)[0] != br) return nullptr;
    if (orelse && !orelse->empty()) return nullptr;
    return guard;
}

std::optional<IndexForm> index_form(const Node& index_expr, std::string_view text) {
    auto int_value = [](const Node& n) -> std::optional<long long> {
        if (n.kind == NodeKind::Constant && n.const_kind == "int") {
            try {
                return std::stoll(n.const_value);
            } catch (...) {
                return std::nullopt;
            }
        }
        return std::nullopt;
    };
    if (index_expr.kind == NodeKind::Slice || index_expr.kind == NodeKind::Tuple ||
        index_expr.kind == NodeKind::Starred) {
        return std::nullopt;
    }
    if (auto v = int_value(index_expr)) return IndexForm{"", *v};
    if (index_expr.kind == NodeKind::UnaryOp && index_expr.field_str("op") == "USub") {
        if (const Node* operand = index_expr.field_node("operand")) {
            if (auto v = int_value(*operand)) return IndexForm{"", -*v};
        }
    }
    if (index_expr.kind == NodeKind::BinOp) {
        const std::string_view op = index_expr.field_str("op");
        if (op == "Add" || op == "Sub") {
            const Node* left = index_expr.field_node("left");
            const Node* right = index_expr.field_node("right");
            if (left && right) {
                if (auto v = int_value(*right)) {
                    return IndexForm{normalize_tokens(node_text(*left, text)),
                                     op == "Add" ? *v : -*v};
                }
            }
        }
    }
    return IndexForm{normalize_tokens(node_text(index_expr, text)), 0};
}

std::vector<std::vector<const Node*>> subscript_arg_runs(const Node& call) {
    std::vector<std::vector<const Node*>> runs;
    const auto* args = call.field_list("args");
    if (!args) return runs;
    std::vector<const Node*> current;
    for (const Node* arg : *args) {
        if (arg->kind == NodeKind::Subscript) {
            current.push_back(arg);
            continue;
        }
        if (current.size() >= 2) runs.push_back(current);
        current.clear();
    }
    if (current.size() >= 2) runs.push_back(current);
    return runs;
}

std::optional<RangeLenLoop> as_range_len_loop(const Node& for_node) {
    const Node* target = for_node.field_node("target");
    const Node* iter = for_node.field_node("iter");
    if (!target || target->kind != NodeKind::Name) return std::nullopt;
    if (!iter || iter->kind != NodeKind::Call) return std::nullopt;
    const Node* range_fn = iter->field_node("func");
    if (!range_fn || range_fn->kind != NodeKind::Name || range_fn->field_str("id") != "range") {
        return std::nullopt;
    }
    const auto* range_args = iter->field_list("args");
    if (!range_args || range_args->size() != 1) return std::nullopt;
    const Node* len_call = (*range_args)[0];
    if (len_call->kind != NodeKind::Call) return std::nullopt;
    const Node* len_fn = len_call->field_node("func");
    if (!len_fn || len_fn->kind != NodeKind::Name || len_fn->field_str("id") != "len") {
        return std::nullopt;
    }
    const auto* len_args = len_call->field_list("args");
    if (!len_args || len_args->size() != 1) return std::nullopt;
    const Node* seq = (*len_args)[0];
    if (seq->kind != NodeKind::Name && seq->kind != NodeKind::Attribute) return std::nullopt;
    return RangeLenLoop{target, seq};
}

std::vector<const Node*> subscripts_of(const Node& root, std::string_view base_tokens,
                                       std::string_view text) {
    std::vector<const Node*> out;
    walk_from(root, [&](const Node& n) {
        if (n.kind != NodeKind::Subscript) return;
        const Node* base = n.field_node("value");
        if (base && normalize_tokens(node_text(*base, text)) == base_tokens) {
            out.push_back(&n);
        }
    });
    return out;
}

std::vector<const Node*> name_uses(const Node& root, std::string_view name) {
    std::vector<const Node*> out;
    walk_from(root, [&](const Node& n) {
        if (n.kind == NodeKind::Name && n.field_str("id") == name) out.push_back(&n);
    });
    return out;
}

bool is_empty_set_literal(const Node& expr, std::string_view text) {
    switch (expr.kind) {
        case NodeKind::Constant: {
            if (expr.const_kind == "int") return expr.const_value == "0";
            if (expr.const_kind == "float") return expr.const_value == "0.0";
            if (expr.const_kind == "bool") return expr.const_value == "False";
            if (expr.const_kind == "str" || expr.const_kind == "bytes") {
                // Empty when nothing sits between the quote delimiters.
                std::string_view t = node_text(expr, text);
                std::size_t i = 0;
                while (i < t.size() && t[i] != '\'' && t[i] != '"') ++i;
                if (i >= t.size()) return false;
                const char q = t[i];
                const bool triple = t.substr(i, 3) == std::string(3, q);
                const std::size_t open = triple ? 3 : 1;
                return t.size() == i + 2 * open &&
                       t.substr(i, open) == t.substr(t.size() - open);
            }
            return false;
        }
        case NodeKind::ListExpr:
        case NodeKind::Tuple: {
            const auto* elts = expr.field_list("elts");
            return !elts || elts->empty();
        }
        case NodeKind::DictExpr: {
            const auto* keys = expr.field_list("keys");
            return !keys || keys->empty();
        }
        default:
            return false;
    }
}

bool is_immutable_literal(const Node& expr) {
    if (expr.kind == NodeKind::Constant) {
        return expr.const_kind == "none" || expr.const_kind == "bool" ||
               expr.const_kind == "int" || expr.const_kind == "float" ||
               expr.const_kind == "complex" || expr.const_kind == "str";
    }
    if (expr.kind == NodeKind::UnaryOp) {
        const std::string_view op = expr.field_str("op");
        if (op != "USub" && op != "UAdd") return false;
        const Node* operand = expr.field_node("operand");
        return operand && operand->kind == NodeKind::Constant &&
               (operand->const_kind == "int" || operand->const_kind == "float" ||
                operand->const_kind == "complex");
    }
    return false;
}

CompShape analyze_comprehension_loop(const Node& for_node, std::string_view text) {
    CompShape shape;
    struct Frame {
        const Node* loop;
    };
    shape.clauses.clear();

    std::function<bool(const Node&)> process_loop;
    std::function<bool(const std::vector<const Node*>&)> process_suite;

    auto fail = [&](std::string why) {
        shape.ok = false;
        shape.fail_reason = std::move(why);
        return false;
    };

    process_suite = [&](const std::vector<const Node*>& suite) -> bool {
        for (std::size_t i = 0; i < suite.size(); ++i) {
            const Node* stmt = suite[i];
            const bool last = i + 1 == suite.size();
            if (stmt->kind == NodeKind::If) {
                const auto* orelse = stmt->field_list("orelse");
                if (orelse && !orelse->empty()) return fail("if statement carries an else");
                const auto* body = stmt->field_list("body");
                if (!body || body->empty()) return fail("empty if body");
                const Node* test = stmt->field_node("test");
                if (body->size() == 1 && (*body)[0]->kind == NodeKind::Continue) {
                    // `if C: continue` filters the rest of this clause.
                    if (last) return fail("continue guard with no statement after it");
                    shape.clauses.back().guards.push_back(negate_test(*test, text));
                    continue;
                }
                if (!last) return fail("statements follow a guarding if block");
                std::string guard(node_text(*test, text));
                if (needs_parens_in_and(*test)) guard = "(" + guard + ")";
                shape.clauses.back().guards.push_back(std::move(guard));
                return process_suite(*body);
            }
            if (stmt->kind == NodeKind::For) {
                if (!last) return fail("statements follow a nested for");
                return process_loop(*stmt);
            }
            if (stmt->kind == NodeKind::Expr || stmt->kind == NodeKind::Assign) {
                if (!last) return fail("statements after the collecting statement");
                shape.terminal = stmt;
                return true;
            }
            return fail("unsupported statement in loop body");
        }
        return fail("empty loop body");
    };

    process_loop = [&](const Node& loop) -> bool {
        const auto* orelse = loop.field_list("orelse");
        if (orelse && !orelse->empty()) return fail("loop carries an else");
        const Node* target = loop.field_node("target");
        const Node* iter = loop.field_node("iter");
        if (!target || !iter) return fail("malformed for statement");
        shape.clauses.push_back(CompClause{target, iter, {}});
        const auto* body = loop.field_list("body");
        if (!body) return fail("empty loop body");
        return process_suite(*body);
    };

    shape.ok = process_loop(for_node);
    if (!shape.ok) shape.clauses.clear();
    return shape;
}

// ---------------------------------------------------------------------------
// Scenario / component / condition steps

std::vector<const Node*> extract_scenarios(const Ast& ast, const IdiomSpec& spec) {
    if (!spec.scenario) return {&ast.root()};
    std::vector<const Node*> out;
    switch (spec.scenario->which) {
        case ScenarioPattern::Which::AndBoolOp:
            ast.walk([&](const Node& n) {
                if (n.kind == NodeKind::BoolOp && n.field_str("op") == "And") {
                    out.push_back(&n);
                }
            });
            break;
        case ScenarioPattern::Which::TestPosition:
            out = test_roots(ast);
            break;
        case ScenarioPattern::Which::CallNode:
            ast.walk([&](const Node& n) {
                if (n.kind == NodeKind::Call) out.push_back(&n);
            });
            break;
    }
    std::sort(out.begin(), out.end(), [](const Node* a, const Node* b) {
        return a->span.start != b->span.start ? a->span.start < b->span.start
                                              : a->span.end < b->span.end;
    });
    return out;
}

std::vector<ComponentTuple> extract_components(const Node& scope, const IdiomSpec& spec,
                                               const SourceFile& file) {
    (void)file;
    std::vector<ComponentTuple> out;
    if (const auto* single = std::get_if<SingleNode>(&spec.component)) {
        if (spec.kind == IdiomKind::TruthTest) {
            std::vector<const Node*> compares;
            truth_position_compares(scope, compares);
            for (const Node* c : compares) out.push_back({{c}, &scope});
            return out;
        }
        for (const Node* n : collect_kind(scope, single->kind)) {
            out.push_back({{n}, &scope});
        }
        return out;
    }
    if (const auto* pair = std::get_if<NodePair>(&spec.component)) {
        switch (pair->rule) {
            case NodePair::Adjacency::WithinScenario: {
                // Direct operands of the scenario BoolOp only.
                const auto* values = scope.field_list("values");
                if (!values) return out;
                std::vector<const Node*> compares;
                for (const Node* v : *values) {
                    if (v->kind == NodeKind::Compare) compares.push_back(v);
                }
                for (std::size_t i = 0; i < compares.size(); ++i) {
                    for (std::size_t j = i + 1; j < compares.size(); ++j) {
                        out.push_back({{compares[i], compares[j]}, &scope});
                    }
                }
                return out;
            }
            case NodePair::Adjacency::InitBeforeLoop: {
                for (const Node* loop : collect_kind(scope, NodeKind::For)) {
                    const auto pos = suite_position(*loop);
                    if (!pos || pos->index == 0) continue;
                    const Node* prev = (*pos->list)[pos->index - 1];
                    if (prev->kind != NodeKind::Assign) continue;
                    out.push_back({{loop, prev}, &scope});
                }
                return out;
            }
            case NodePair::Adjacency::NextStatement: {
                for (const Node* loop : collect_kind(scope, pair->first)) {
                    const auto pos = suite_position(*loop);
                    if (!pos || pos->index + 1 >= pos->list->size()) continue;
                    const Node* next = (*pos->list)[pos->index + 1];
                    if (next->kind == NodeKind::If) out.push_back({{loop, next}, &scope});
                }
                if (pair->first_alt != NodeKind::Other) {
                    for (const Node* loop : collect_kind(scope, pair->first_alt)) {
                        const auto pos = suite_position(*loop);
                        if (!pos || pos->index + 1 >= pos->list->size()) continue;
                        const Node* next = (*pos->list)[pos->index + 1];
                        if (next->kind == NodeKind::If) out.push_back({{loop, next}, &scope});
                    }
                }
                return out;
            }
        }
        return out;
    }
    if (const auto* run = std::get_if<ConsecutiveRun>(&spec.component)) {
        if (spec.kind == IdiomKind::StarInFuncCall) {
            for (auto& r : subscript_arg_runs(scope)) {
                if (static_cast<int>(r.size()) >= run->min_len) out.push_back({r, &scope});
            }
            return out;
        }
        each_suite(scope, [&](const std::vector<const Node*>& suite) {
            std::vector<const Node*> current;
            auto flush = [&]() {
                if (static_cast<int>(current.size()) >= run->min_len) {
                    out.push_back({current, &scope});
                }
                current.clear();
            };
            for (const Node* stmt : suite) {
                if (stmt->kind == run->kind) {
                    current.push_back(stmt);
                } else {
                    flush();
                }
            }
            flush();
        });
        return out;
    }
    return out;
}

namespace {

// For comprehension tuples: nodes = [For, Assign-init].
const Node* tuple_loop(const ComponentTuple& t) { return t.nodes.at(0); }
const Node* tuple_init(const ComponentTuple& t) { return t.nodes.at(1); }

bool body_reduces_to_single_effect(IdiomKind idiom, const ComponentTuple& tuple,
                                   const SourceFile& file) {
    const auto init = as_simple_assign(*tuple_init(tuple));
    if (!init) return false;
    const CompShape shape = analyze_comprehension_loop(*tuple_loop(tuple), file.text());
    if (!shape.ok || !shape.terminal) return false;
    const std::string target_tokens = normalize_tokens(node_text(*init->target, file.text()));

    const Node* element_source = nullptr;
    if (idiom == IdiomKind::DictComprehension) {
        const auto sub = as_subscript_assign(*shape.terminal);
        if (!sub) return false;
        if (normalize_tokens(node_text(*sub->base, file.text())) != target_tokens) return false;
        element_source = shape.terminal;
    } else {
        const auto effect = as_append_or_add(*shape.terminal);
        if (!effect || !effect->receiver) return false;
        const std::string_view want =
            idiom == IdiomKind::ListComprehension ? "append" : "add";
        if (effect->method != want) return false;
        if (normalize_tokens(node_text(*effect->receiver, file.text())) != target_tokens) {
            return false;
        }
        element_source = shape.terminal;
    }
    (void)element_source;

    // The collected target must not be referenced anywhere else in the loop:
    // the comprehension only exists after the loop completes.
    std::size_t refs = 0;
    walk_from(*tuple_loop(tuple), [&](const Node& n) {
        if ((n.kind == NodeKind::Name || n.kind == NodeKind::Attribute) &&
            normalize_tokens(node_text(n, file.text())) == target_tokens) {
            ++refs;
        }
    });
    // Exactly one reference: the receiver/base inside the terminal statement.
    return refs == 1;
}

bool init_assigns_empty_collection(IdiomKind idiom, const ComponentTuple& tuple,
                                   const SourceFile& file) {
    const auto init = as_simple_assign(*tuple_init(tuple));
    if (!init || !init->value) return false;
    if (init->target->kind == NodeKind::Subscript) return false;
    const Node& v = *init->value;
    switch (idiom) {
        case IdiomKind::ListComprehension: {
            const auto* elts = v.field_list("elts");
            return v.kind == NodeKind::ListExpr && (!elts || elts->empty());
        }
        case IdiomKind::SetComprehension: {
            if (v.kind != NodeKind::Call) return false;
            const Node* fn = v.field_node("func");
            const auto* args = v.field_list("args");
            return fn && fn->kind == NodeKind::Name && fn->field_str("id") == "set" &&
                   (!args || args->empty());
        }
        case IdiomKind::DictComprehension: {
            const auto* keys = v.field_list("keys");
            return v.kind == NodeKind::DictExpr && (!keys || keys->empty());
        }
        default:
            return false;
    }
}

bool no_cross_dependency(const ComponentTuple& tuple, const SourceFile& file) {
    for (std::size_t i = 0; i < tuple.nodes.size(); ++i) {
        const auto earlier = as_simple_assign(*tuple.nodes[i]);
        if (!earlier) return false;
        const auto target_toks = token_texts(node_text(*earlier->target, file.text()));
        for (std::size_t j = i + 1; j < tuple.nodes.size(); ++j) {
            const auto later = as_simple_assign(*tuple.nodes[j]);
            if (!later || !later->value) return false;
            const auto rhs_toks = token_texts(node_text(*later->value, file.text()));
            if (contains_token_seq(rhs_toks, target_toks)) return false;
            if (earlier->target->kind == NodeKind::Name) {
                const std::string name(earlier->target->field_str("id"));
                for (const std::string& t : rhs_toks) {
                    if (t == name) return false;
                }
            }
        }
    }
    return true;
}

bool open_call_consumed_in_simple_statement(const ComponentTuple& tuple) {
    const Node* call = tuple.nodes.at(0);
    const Node* host = enclosing_statement(*call);
    if (!host) return false;
    if (host->kind != NodeKind::Expr && host->kind != NodeKind::Assign) return false;
    if (host->kind == NodeKind::Assign && host->field_node("value") == call) return false;
    if (host->kind == NodeKind::Expr && host->field_node("value") == call) return false;
    for (const Node* n = call->parent; n && n != host->parent; n = n->parent) {
        if (n->type_name == "withitem" || n->type_name == "Yield" ||
            n->type_name == "YieldFrom" || n->type_name == "Await" ||
            n->type_name == "NamedExpr" || n->kind == NodeKind::Lambda) {
            return false;
        }
    }
    return true;
}

bool star_indices_valid(const ComponentTuple& tuple, const SourceFile& file) {
    std::vector<IndexForm> forms;
    for (const Node* sub : tuple.nodes) {
        const Node* index = sub->field_node("slice");
        if (!index) return false;
        const auto form = index_form(*index, file.text());
        if (!form) return false;
        forms.push_back(*form);
    }
    for (std::size_t i = 1; i < forms.size(); ++i) {
        if (forms[i].base != forms[0].base) return false;
        if (forms[i].offset != forms[i - 1].offset + 1) return false;
        if (forms[i - 1].offset < 0 && forms[i].offset >= 0) return false;
    }
    return true;
}

bool loop_var_subscript_conditions(ConditionId cond, const ComponentTuple& tuple,
                                   const SourceFile& file) {
    const Node* loop = tuple.nodes.at(0);
    const Node* target = loop->field_node("target");
    const auto* body = loop->field_list("body");
    if (!target || target->kind != NodeKind::Name || !body) return false;
    const std::string var(target->field_str("id"));

    std::vector<const Node*> subs;
    std::vector<const Node*> uses;
    for (const Node* stmt : *body) {
        for (const Node* s : subscripts_of(*stmt, var, file.text())) subs.push_back(s);
        for (const Node* u : name_uses(*stmt, var)) uses.push_back(u);
    }
    switch (cond) {
        case ConditionId::BodyHasSubscript:
        case ConditionId::SubscriptValueIsLoopVariable:
            return !subs.empty();
        case ConditionId::IndicesAreNonNegativeIntLiterals: {
            if (subs.empty()) return false;
            for (const Node* s : subs) {
                const Node* index = s->field_node("slice");
                if (!index) return false;
                const auto form = index_form(*index, file.text());
                if (!form || !form->base.empty() || form->offset < 0) return false;
            }
            return true;
        }
        case ConditionId::LoopVarUsedOnlySubscripted: {
            for (const Node* u : uses) {
                const Node* p = u->parent;
                if (!p || p->kind != NodeKind::Subscript || p->field_node("value") != u) {
                    return false;
                }
            }
            return true;
        }
        default:
            return false;
    }
}

bool enumerate_conditions(ConditionId cond, const ComponentTuple& tuple,
                          const SourceFile& file) {
    const Node* loop = tuple.nodes.at(0);
    switch (cond) {
        case ConditionId::IterNotEnumerateCall: {
            const Node* iter = loop->field_node("iter");
            if (!iter) return false;
            if (iter->kind != NodeKind::Call) return true;
            const Node* fn = iter->field_node("func");
            return !(fn && fn->kind == NodeKind::Name && fn->field_str("id") == "enumerate");
        }
        case ConditionId::IterIsRangeLen:
            return as_range_len_loop(*loop).has_value();
        case ConditionId::BodySubscriptsIteratedObject: {
            const auto rl = as_range_len_loop(*loop);
            if (!rl) return false;
            const std::string base = normalize_tokens(node_text(*rl->sequence, file.text()));
            const std::string idx(rl->index_var->field_str("id"));
            const auto* body = loop->field_list("body");
            if (!body) return false;
            for (const Node* stmt : *body) {
                for (const Node* s : subscripts_of(*stmt, base, file.text())) {
                    const Node* index = s->field_node("slice");
                    if (index && index->kind == NodeKind::Name &&
                        index->field_str("id") == idx) {
                        return true;
                    }
                }
            }
            return false;
        }
        default:
            return false;
    }
}

}  // namespace

bool evaluate_condition(ConditionId cond, IdiomKind idiom, const ComponentTuple& tuple,
                        const SourceFile& file) {
    const std::string_view text = file.text();
    switch (cond) {
        case ConditionId::ForHasAppendCall:
        case ConditionId::ForHasAddCall: {
            const std::string_view want =
                cond == ConditionId::ForHasAppendCall ? "append" : "add";
            bool found = false;
            walk_from(*tuple_loop(tuple), [&](const Node& n) {
                if (n.is_statement()) {
                    if (const auto effect = as_append_or_add(n)) {
                        if (effect->method == want) found = true;
                    }
                }
            });
            return found;
        }
        case ConditionId::CallReceiverIsInitTarget: {
            const auto init = as_simple_assign(*tuple_init(tuple));
            if (!init) return false;
            const std::string target_tokens = normalize_tokens(node_text(*init->target, text));
            bool found = false;
            walk_from(*tuple_loop(tuple), [&](const Node& n) {
                if (!n.is_statement()) return;
                if (const auto effect = as_append_or_add(n)) {
                    if (effect->receiver &&
                        normalize_tokens(node_text(*effect->receiver, text)) == target_tokens) {
                        found = true;
                    }
                }
            });
            return found;
        }
        case ConditionId::InitAssignsEmptyCollection:
            return init_assigns_empty_collection(idiom, tuple, file);
        case ConditionId::BodyReducesToSingleEffect:
            return body_reduces_to_single_effect(idiom, tuple, file);
        case ConditionId::ForHasSubscriptAssign: {
            bool found = false;
            walk_from(*tuple_loop(tuple), [&](const Node& n) {
                if (n.is_statement() && as_subscript_assign(n)) found = true;
            });
            return found;
        }
        case ConditionId::SubscriptBaseIsInitTarget: {
            const auto init = as_simple_assign(*tuple_init(tuple));
            if (!init) return false;
            const std::string target_tokens = normalize_tokens(node_text(*init->target, text));
            bool found = false;
            walk_from(*tuple_loop(tuple), [&](const Node& n) {
                if (!n.is_statement()) return;
                if (const auto sub = as_subscript_assign(n)) {
                    if (normalize_tokens(node_text(*sub->base, text)) == target_tokens) {
                        found = true;
                    }
                }
            });
            return found;
        }
        case ConditionId::CompareOperandsIntersect: {
            const auto a = compare_operands(*tuple.nodes.at(0));
            const auto b = compare_operands(*tuple.nodes.at(1));
            for (const Node* x : a) {
                for (const Node* y : b) {
                    if (normalize_tokens(node_text(*x, text)) ==
                        normalize_tokens(node_text(*y, text))) {
                        return true;
                    }
                }
            }
            return false;
        }
        case ConditionId::CompareOpIsEqOrNotEq: {
            const auto ops = compare_ops(*tuple.nodes.at(0));
            return ops.size() == 1 && (ops[0] == "==" || ops[0] == "!=");
        }
        case ConditionId::OneOperandIsEmptySetLiteral: {
            const auto operands = compare_operands(*tuple.nodes.at(0));
            if (operands.size() != 2) return false;
            const bool left = is_empty_set_literal(*operands[0], text);
            const bool right = is_empty_set_literal(*operands[1], text);
            return left != right;
        }
        case ConditionId::LoopHasBreak:
            return !collect_breaks(*tuple.nodes.at(0)).empty();
        case ConditionId::IfIsNextStatementOfLoop: {
            const auto pos = suite_position(*tuple.nodes.at(0));
            if (!pos || pos->index + 1 >= pos->list->size()) return false;
            return (*pos->list)[pos->index + 1] == tuple.nodes.at(1);
        }
        case ConditionId::IfTestNegatesUniqueBreakGuard: {
            const Node* guard = unique_break_guard(*tuple.nodes.at(0));
            if (!guard) return false;
            const Node* guard_test = guard->field_node("test");
            const Node* post_test = tuple.nodes.at(1)->field_node("test");
            if (!guard_test || !post_test) return false;
            return tokens_equal(negate_test(*guard_test, text), node_text(*post_test, text));
        }
        case ConditionId::NoDanglingElse: {
            const auto* loop_else = tuple.nodes.at(0)->field_list("orelse");
            if (loop_else && !loop_else->empty()) return false;
            const auto* if_else = tuple.nodes.at(1)->field_list("orelse");
            return !if_else || if_else->empty();
        }
        case ConditionId::NoCrossDependency:
            return no_cross_dependency(tuple, file);
        case ConditionId::AllSingleTargetSimpleAssigns: {
            for (const Node* stmt : tuple.nodes) {
                if (!as_simple_assign(*stmt)) return false;
            }
            return true;
        }
        case ConditionId::AssignValuesAllSame: {
            std::string first;
            for (std::size_t i = 0; i < tuple.nodes.size(); ++i) {
                const auto assign = as_simple_assign(*tuple.nodes[i]);
                if (!assign || !assign->value) return false;
                const std::string norm = normalize_tokens(node_text(*assign->value, text));
                if (i == 0) {
                    first = norm;
                } else if (norm != first) {
                    return false;
                }
            }
            return true;
        }
        case ConditionId::SharedValueIsImmutableLiteral: {
            for (const Node* stmt : tuple.nodes) {
                const auto assign = as_simple_assign(*stmt);
                if (!assign || !assign->value || !is_immutable_literal(*assign->value)) {
                    return false;
                }
            }
            return true;
        }
        case ConditionId::BodyHasSubscript:
        case ConditionId::SubscriptValueIsLoopVariable:
        case ConditionId::IndicesAreNonNegativeIntLiterals:
        case ConditionId::LoopVarUsedOnlySubscripted:
            return loop_var_subscript_conditions(cond, tuple, file);
        case ConditionId::SubscriptValuesSame: {
            std::string first;
            for (std::size_t i = 0; i < tuple.nodes.size(); ++i) {
                const Node* base = tuple.nodes[i]->field_node("value");
                if (!base) return false;
                const std::string norm = normalize_tokens(node_text(*base, text));
                if (i == 0) {
                    first = norm;
                } else if (norm != first) {
                    return false;
                }
            }
            return true;
        }
        case ConditionId::StarIndicesValid:
            return star_indices_valid(tuple, file);
        case ConditionId::CalleeNameIsOpen: {
            const Node* fn = tuple.nodes.at(0)->field_node("func");
            return fn && fn->kind == NodeKind::Name && fn->field_str("id") == "open";
        }
        case ConditionId::OpenCallConsumedInSimpleStatement:
            return open_call_consumed_in_simple_statement(tuple);
        case ConditionId::IterNotEnumerateCall:
        case ConditionId::IterIsRangeLen:
        case ConditionId::BodySubscriptsIteratedObject:
            return enumerate_conditions(cond, tuple, file);
        case ConditionId::BinOpIsPercent:
            return tuple.nodes.at(0)->field_str("op") == "Mod";
        case ConditionId::LeftOperandIsPlainStringLiteral: {
            const Node* left = tuple.nodes.at(0)->field_node("left");
            return left && is_plain_string_literal(*left, file);
        }
    }
    return false;
}

std::vector<MatchSite> find_sites(const SourceFile& file, const Ast& ast,
                                  const std::vector<IdiomKind>& kinds) {
    std::vector<MatchSite> sites;
    std::unordered_set<std::string> seen;
    for (const IdiomSpec& spec : catalog()) {
        if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end()) continue;
        for (const Node* scope : extract_scenarios(ast, spec)) {
            for (ComponentTuple& tuple : extract_components(*scope, spec, file)) {
                bool ok = true;
                for (ConditionId cond : spec.conditions) {
                    if (!evaluate_condition(cond, spec.kind, tuple, file)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                Span span{tuple.nodes.front()->span.start, tuple.nodes.front()->span.end};
                for (const Node* n : tuple.nodes) {
                    span.start = std::min(span.start, n->span.start);
                    span.end = std::max(span.end, n->span.end);
                }
                std::string key(file.path());
                key += "|";
                key += idiom_name(spec.kind);
                for (const Node* n : tuple.nodes) {
                    key += "|" + std::to_string(n->span.start) + ":" +
                           std::to_string(n->span.end);
                }
                std::string id = sha256_hex(key).substr(0, 16);
                if (!seen.insert(id).second) continue;
                MatchSite site;
                site.idiom = spec.kind;
                site.scenario = spec.scenario ? scope : nullptr;
                site.components = std::move(tuple);
                site.span = span;
                site.site_id = std::move(id);
                sites.push_back(std::move(site));
            }
        }
    }
    std::sort(sites.begin(), sites.end(), [](const MatchSite& a, const MatchSite& b) {
        if (a.span.start != b.span.start) return a.span.start < b.span.start;
        if (a.span.end != b.span.end) return a.span.end < b.span.end;
        if (a.idiom != b.idiom) return static_cast<int>(a.idiom) < static_cast<int>(b.idiom);
        return a.site_id < b.site_id;
    });
    return sites;
}

}  // namespace idiomizer
