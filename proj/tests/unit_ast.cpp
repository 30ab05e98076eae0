#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>

#include "idiomizer/ast.hpp"

using namespace idiomizer;

namespace {

const Node* find_first(const Ast& ast, NodeKind kind) {
    const Node* found = nullptr;
    ast.walk([&](const Node& n) {
        if (!found && n.kind == kind) found = &n;
    });
    return found;
}

}  // namespace

TEST_CASE("table-1 boolop shape") {
    const std::string src = "a > b and a < 1\n";
    const Ast ast = parse_source(src);
    const Node* boolop = find_first(ast, NodeKind::BoolOp);
    REQUIRE(boolop);
    CHECK(boolop->field_str("op") == "And");
    const auto* values = boolop->field_list("values");
    REQUIRE(values);
    REQUIRE(values->size() == 2);
    CHECK((*values)[0]->kind == NodeKind::Compare);
    CHECK((*values)[1]->kind == NodeKind::Compare);
    CHECK(node_text(*(*values)[0], src) == "a > b");
    CHECK(node_text(*(*values)[1], src) == "a < 1");
}

TEST_CASE("empty file parses to empty module") {
    const Ast ast = parse_source("");
    CHECK(ast.root().kind == NodeKind::Module);
    const auto* body = ast.root().field_list("body");
    REQUIRE(body);
    CHECK(body->empty());
}

TEST_CASE("syntax error carries a location") {
    try {
        parse_source("def f(:\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line == 1);
    }
}

TEST_CASE("node spans slice the source exactly") {
    const std::string src =
        "def f(xs):\n"
        "    total = 0\n"
        "    for x in xs:\n"
        "        if x > 0 and x < 9:\n"
        "            total += x\n"
        "    return total\n";
    const Ast ast = parse_source(src);
    const Node* loop = find_first(ast, NodeKind::For);
    REQUIRE(loop);
    CHECK(node_text(*loop, src).substr(0, 12) == "for x in xs:");
    const Node* ret = find_first(ast, NodeKind::Return);
    REQUIRE(ret);
    CHECK(node_text(*ret, src) == "return total");
    // Child containment everywhere.
    ast.walk([&](const Node& n) {
        for (const Node* c : n.children) {
            CHECK(n.span.contains(c->span));
        }
    });
    // Module covers the whole buffer.
    CHECK(node_text(ast.root(), src) == src);
}

TEST_CASE("byte offsets with multibyte characters") {
    const std::string src = "h\xc3\xa9llo = 1\nn = h\xc3\xa9llo\n";
    const Ast ast = parse_source(src);
    const Node* assign = find_first(ast, NodeKind::Assign);
    REQUIRE(assign);
    CHECK(node_text(*assign, src) == "h\xc3\xa9llo = 1");
}

TEST_CASE("name attribute call subscript fields") {
    const std::string src = "r[k] = obj.meth(x, key=1)\n";
    const Ast ast = parse_source(src);
    const Node* call = find_first(ast, NodeKind::Call);
    REQUIRE(call);
    const Node* func = call->field_node("func");
    REQUIRE(func);
    CHECK(func->kind == NodeKind::Attribute);
    CHECK(func->field_str("attr") == "meth");
    CHECK(node_text(*func->field_node("value"), src) == "obj");
    REQUIRE(call->field_list("args"));
    CHECK(call->field_list("args")->size() == 1);
    const Node* sub = find_first(ast, NodeKind::Subscript);
    REQUIRE(sub);
    CHECK(node_text(*sub->field_node("slice"), src) == "k");
}

TEST_CASE("compare operands and operator tokens") {
    const std::string src = "x = a is not b != c\n";
    const Ast ast = parse_source(src);
    const Node* cmp = find_first(ast, NodeKind::Compare);
    REQUIRE(cmp);
    const auto operands = compare_operands(*cmp);
    const auto ops = compare_ops(*cmp);
    REQUIRE(operands.size() == 3);
    REQUIRE(ops.size() == 2);
    CHECK(ops[0] == "is not");
    CHECK(ops[1] == "!=");
    CHECK(node_text(*operands[2], src) == "c");
}

TEST_CASE("unsupported statements project to Other with children") {
    const std::string src = "match x:\n    case 1:\n        y = 2\n";
    Ast ast;
    try {
        ast = parse_source(src);
    } catch (const SyntaxError&) {
        return;  // grammar without match statements
    }
    const auto* body = ast.root().field_list("body");
    REQUIRE(body);
    REQUIRE(body->size() == 1);
    CHECK((*body)[0]->kind == NodeKind::Other);
    CHECK(!(*body)[0]->children.empty());
    CHECK(find_first(ast, NodeKind::Assign) != nullptr);  // reachable inside
}

TEST_CASE("parse determinism") {
    const std::string src = "for i in range(len(xs)):\n    print(xs[i])\n";
    const Ast a1 = parse_source(src);
    const Ast a2 = parse_source(src);
    std::vector<Span> s1, s2;
    a1.walk([&](const Node& n) { s1.push_back(n.span); });
    a2.walk([&](const Node& n) { s2.push_back(n.span); });
    CHECK(s1 == s2);
}

TEST_CASE("suite positions and enclosing statements") {
    const std::string src = "a = 1\nif c:\n    b = 2\n    d = 3\n";
    const Ast ast = parse_source(src);
    const Node* d_assign = nullptr;
    ast.walk([&](const Node& n) {
        if (n.kind == NodeKind::Assign && node_text(n, src) == "d = 3") d_assign = &n;
    });
    REQUIRE(d_assign);
    const auto pos = suite_position(*d_assign);
    REQUIRE(pos);
    CHECK(pos->index == 1);
    CHECK(pos->parent->kind == NodeKind::If);

    const Node* name_c = nullptr;
    ast.walk([&](const Node& n) {
        if (n.kind == NodeKind::Name && n.field_str("id") == "c") name_c = &n;
    });
    REQUIRE(name_c);
    CHECK(enclosing_statement(*name_c)->kind == NodeKind::If);
}

TEST_CASE("round-trip splice identity on node spans") {
    const std::string src = "x = f(a, b)\nfor i in s:\n    pass\n";
    const Ast ast = parse_source(src);
    ast.walk([&](const Node& n) {
        if (n.span.empty()) return;
        const std::string again =
            splice(src, {{n.span, std::string(node_text(n, src))}});
        CHECK(again == src);
    });
}
