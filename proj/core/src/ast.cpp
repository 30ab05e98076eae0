#include "idiomizer/ast.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

namespace idiomizer {

std::string py_ast_dump_json(std::string_view src);  // py_bridge.cpp

namespace {

using json = nlohmann::json;

NodeKind kind_for(const std::string& type_name) {
    static const std::unordered_map<std::string, NodeKind> table = {
        {"Module", NodeKind::Module},
        {"FunctionDef", NodeKind::FunctionDef},
        {"AsyncFunctionDef", NodeKind::FunctionDef},
        {"For", NodeKind::For},
        {"While", NodeKind::While},
        {"If", NodeKind::If},
        {"With", NodeKind::With},
        {"Assign", NodeKind::Assign},
        {"Return", NodeKind::Return},
        {"Break", NodeKind::Break},
        {"Continue", NodeKind::Continue},
        {"Expr", NodeKind::Expr},
        {"Compare", NodeKind::Compare},
        {"BoolOp", NodeKind::BoolOp},
        {"BinOp", NodeKind::BinOp},
        {"UnaryOp", NodeKind::UnaryOp},
        {"Call", NodeKind::Call},
        {"Subscript", NodeKind::Subscript},
        {"Attribute", NodeKind::Attribute},
        {"Name", NodeKind::Name},
        {"Constant", NodeKind::Constant},
        {"Tuple", NodeKind::Tuple},
        {"List", NodeKind::ListExpr},
        {"Set", NodeKind::SetExpr},
        {"Dict", NodeKind::DictExpr},
        {"ListComp", NodeKind::ListComp},
        {"SetComp", NodeKind::SetComp},
        {"DictComp", NodeKind::DictComp},
        {"GeneratorExp", NodeKind::GeneratorExp},
        {"IfExp", NodeKind::IfExp},
        {"Lambda", NodeKind::Lambda},
        {"Starred", NodeKind::Starred},
        {"JoinedStr", NodeKind::JoinedStr},
        {"Slice", NodeKind::Slice},
    };
    auto it = table.find(type_name);
    return it == table.end() ? NodeKind::Other : it->second;
}

constexpr std::size_t kNoSpan = static_cast<std::size_t>(-1);

struct Builder {
    std::deque<Node>& arena;
    const std::vector<std::size_t>& line_starts;
    std::size_t text_size;

    std::size_t offset(int line, int col) const {
        const std::size_t li = static_cast<std::size_t>(line - 1);
        if (li >= line_starts.size()) return text_size;
        return std::min(line_starts[li] + static_cast<std::size_t>(col), text_size);
    }

    Node* build(const json& j) {
        Node* node = &arena.emplace_back();
        node->type_name = j.at(".").get<std::string>();
        node->kind = kind_for(node->type_name);
        node->span = {kNoSpan, kNoSpan};
        if (auto it = j.find("p"); it != j.end()) {
            const auto& p = *it;
            node->span.start = offset(p[0].get<int>(), p[1].get<int>());
            node->span.end = offset(p[2].get<int>(), p[3].get<int>());
        }
        if (node->kind == NodeKind::Constant) {
            node->const_kind = j.value("k", "other");
            node->const_value = j.value("v", "");
            return node;
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& key = it.key();
            if (key == "." || key == "p") continue;
            node->fields.push_back({key, build_field(it.value(), node)});
        }
        // Positioned children in source order.
        for (const Field& f : node->fields) {
            if (const auto* child = std::get_if<const Node*>(&f.value)) {
                node->children.push_back(*child);
            } else if (const auto* list = std::get_if<std::vector<const Node*>>(&f.value)) {
                node->children.insert(node->children.end(), list->begin(), list->end());
            }
        }
        std::sort(node->children.begin(), node->children.end(),
                  [](const Node* a, const Node* b) {
                      return a->span.start != b->span.start ? a->span.start < b->span.start
                                                            : a->span.end < b->span.end;
                  });
        // Positionless interior nodes (withitem, comprehension, ...) span the
        // union of their children; containment is restored in a later pass.
        if (node->span.start == kNoSpan) {
            for (const Node* c : node->children) {
                if (c->span.start == kNoSpan) continue;
                if (node->span.start == kNoSpan) {
                    node->span = c->span;
                } else {
                    node->span.start = std::min(node->span.start, c->span.start);
                    node->span.end = std::max(node->span.end, c->span.end);
                }
            }
        } else {
            for (const Node* c : node->children) {
                if (c->span.start == kNoSpan) continue;
                node->span.start = std::min(node->span.start, c->span.start);
                node->span.end = std::max(node->span.end, c->span.end);
            }
        }
        for (const Node* c : node->children) {
            const_cast<Node*>(c)->parent = node;
        }
        return node;
    }

    FieldValue build_field(const json& value, Node* parent) {
        (void)parent;
        if (value.is_null()) return std::monostate{};
        if (value.is_string()) return value.get<std::string>();
        if (value.is_array()) {
            if (!value.empty() && value.front().is_string()) {
                return value.get<std::vector<std::string>>();
            }
            std::vector<const Node*> nodes;
            nodes.reserve(value.size());
            for (const auto& item : value) {
                if (item.is_object()) nodes.push_back(build(item));
                // Mixed arrays do not occur in the grammar; strings-only lists
                // were handled above.
            }
            return nodes;
        }
        if (value.is_object()) return build(value);
        return std::monostate{};
    }
};

void fix_sentinels(Node& node, std::size_t fallback_start) {
    if (node.span.start == kNoSpan) {
        node.span = {fallback_start, fallback_start};
    }
    for (const Node* c : node.children) {
        fix_sentinels(const_cast<Node&>(*c), node.span.start);
    }
}

}  // namespace

Ast build_ast_from_json(std::string_view json_text, std::string_view text) {
    const json doc = json::parse(json_text);
    if (auto it = doc.find("error"); it != doc.end()) {
        throw SyntaxError((*it).value("msg", "invalid syntax"), (*it).value("line", 0),
                          (*it).value("col", 0));
    }
    Ast ast;
    const auto line_starts = compute_line_starts(text);
    Builder builder{*ast.arena_, line_starts, text.size()};
    Node* root = builder.build(doc.at("ast"));
    // The module covers the whole buffer.
    root->span = {0, text.size()};
    fix_sentinels(*root, 0);
    ast.root_ = root;
    return ast;
}

Ast parse_source(std::string_view text) {
    return build_ast_from_json(py_ast_dump_json(text), text);
}

void Ast::walk(const std::function<void(const Node&)>& fn) const {
    std::vector<const Node*> stack{root_};
    while (!stack.empty()) {
        const Node* n = stack.back();
        stack.pop_back();
        fn(*n);
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) {
            stack.push_back(*it);
        }
    }
}

const Node* Node::field_node(std::string_view name) const {
    for (const Field& f : fields) {
        if (f.name == name) {
            if (const auto* n = std::get_if<const Node*>(&f.value)) return *n;
            return nullptr;
        }
    }
    return nullptr;
}

const std::vector<const Node*>* Node::field_list(std::string_view name) const {
    for (const Field& f : fields) {
        if (f.name == name) return std::get_if<std::vector<const Node*>>(&f.value);
    }
    return nullptr;
}

std::string_view Node::field_str(std::string_view name) const {
    for (const Field& f : fields) {
        if (f.name == name) {
            if (const auto* s = std::get_if<std::string>(&f.value)) return *s;
            return {};
        }
    }
    return {};
}

const std::vector<std::string>* Node::field_strs(std::string_view name) const {
    for (const Field& f : fields) {
        if (f.name == name) return std::get_if<std::vector<std::string>>(&f.value);
    }
    return nullptr;
}

bool Node::is_statement() const {
    if (!parent) return false;
    for (const Field& f : parent->fields) {
        if (f.name != "body" && f.name != "orelse" && f.name != "finalbody") continue;
        if (const auto* list = std::get_if<std::vector<const Node*>>(&f.value)) {
            for (const Node* n : *list) {
                if (n == this) return true;
            }
        }
    }
    // ExceptHandler bodies and similar still count via their own body field.
    return false;
}

std::string_view node_text(const Node& node, const SourceFile& file) {
    return file.slice(node.span);
}

std::string_view node_text(const Node& node, std::string_view text) {
    return text.substr(node.span.start, node.span.size());
}

std::string_view op_token(std::string_view class_name) {
    static const std::unordered_map<std::string_view, std::string_view> table = {
        {"Add", "+"},      {"Sub", "-"},      {"Mult", "*"},   {"MatMult", "@"},
        {"Div", "/"},      {"Mod", "%"},      {"Pow", "**"},   {"LShift", "<<"},
        {"RShift", ">>"},  {"BitOr", "|"},    {"BitXor", "^"}, {"BitAnd", "&"},
        {"FloorDiv", "//"},{"And", "and"},    {"Or", "or"},    {"Not", "not"},
        {"Invert", "~"},   {"UAdd", "+"},     {"USub", "-"},   {"Eq", "=="},
        {"NotEq", "!="},   {"Lt", "<"},       {"LtE", "<="},   {"Gt", ">"},
        {"GtE", ">="},     {"Is", "is"},      {"IsNot", "is not"}, {"In", "in"},
        {"NotIn", "not in"},
    };
    auto it = table.find(class_name);
    return it == table.end() ? class_name : it->second;
}

std::optional<SuitePos> suite_position(const Node& stmt) {
    if (!stmt.parent) return std::nullopt;
    for (const Field& f : stmt.parent->fields) {
        if (f.name != "body" && f.name != "orelse" && f.name != "finalbody") continue;
        if (const auto* list = std::get_if<std::vector<const Node*>>(&f.value)) {
            for (std::size_t i = 0; i < list->size(); ++i) {
                if ((*list)[i] == &stmt) return SuitePos{stmt.parent, list, i};
            }
        }
    }
    return std::nullopt;
}

const Node* enclosing_statement(const Node& node) {
    const Node* n = &node;
    while (n && !n->is_statement()) n = n->parent;
    return n;
}

std::vector<const Node*> compare_operands(const Node& compare) {
    std::vector<const Node*> out;
    if (const Node* left = compare.field_node("left")) out.push_back(left);
    if (const auto* rest = compare.field_list("comparators")) {
        out.insert(out.end(), rest->begin(), rest->end());
    }
    return out;
}

std::vector<std::string_view> compare_ops(const Node& compare) {
    std::vector<std::string_view> out;
    if (const auto* ops = compare.field_strs("ops")) {
        out.reserve(ops->size());
        for (const std::string& o : *ops) out.push_back(op_token(o));
    }
    return out;
}

std::string_view node_kind_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::Module: return "Module";
        case NodeKind::FunctionDef: return "FunctionDef";
        case NodeKind::For: return "For";
        case NodeKind::While: return "While";
        case NodeKind::If: return "If";
        case NodeKind::With: return "With";
        case NodeKind::Assign: return "Assign";
        case NodeKind::Return: return "Return";
        case NodeKind::Break: return "Break";
        case NodeKind::Continue: return "Continue";
        case NodeKind::Expr: return "Expr";
        case NodeKind::Compare: return "Compare";
        case NodeKind::BoolOp: return "BoolOp";
        case NodeKind::BinOp: return "BinOp";
        case NodeKind::UnaryOp: return "UnaryOp";
        case NodeKind::Call: return "Call";
        case NodeKind::Subscript: return "Subscript";
        case NodeKind::Attribute: return "Attribute";
        case NodeKind::Name: return "Name";
        case NodeKind::Constant: return "Constant";
        case NodeKind::Tuple: return "Tuple";
        case NodeKind::ListExpr: return "List";
        case NodeKind::SetExpr: return "Set";
        case NodeKind::DictExpr: return "Dict";
        case NodeKind::ListComp: return "ListComp";
        case NodeKind::SetComp: return "SetComp";
        case NodeKind::DictComp: return "DictComp";
        case NodeKind::GeneratorExp: return "GeneratorExp";
        case NodeKind::IfExp: return "IfExp";
        case NodeKind::Lambda: return "Lambda";
        case NodeKind::Starred: return "Starred";
        case NodeKind::JoinedStr: return "JoinedStr";
        case NodeKind::Slice: return "Slice";
        case NodeKind::Other: return "Other";
    }
    return "Other";
}

}  // namespace idiomizer
