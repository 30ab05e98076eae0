#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "idiomizer/source.hpp"

namespace idiomizer {

/// Facade node kinds. The underlying parser's richer node set is projected
/// onto this enumeration; anything else maps to Other with children intact.
enum class NodeKind {
    Module,
    FunctionDef,
    For,
    While,
    If,
    With,
    Assign,
    Return,
    Break,
    Continue,
    Expr,
    Compare,
    BoolOp,
    BinOp,
    UnaryOp,
    Call,
    Subscript,
    Attribute,
    Name,
    Constant,
    Tuple,
    ListExpr,
    SetExpr,
    DictExpr,
    ListComp,
    SetComp,
    DictComp,
    GeneratorExp,
    IfExp,
    Lambda,
    Starred,
    JoinedStr,
    Slice,
    Other,
};

std::string_view node_kind_name(NodeKind kind);

struct Node;

/// Mirrors the parser's per-node fields: a child node, an ordered child list,
/// an identifier / operator tag (or a list of them), or nothing.
using FieldValue = std::variant<std::monostate, const Node*, std::vector<const Node*>,
                                std::string, std::vector<std::string>>;

struct Field {
    std::string name;
    FieldValue value;
};

struct Node {
    NodeKind kind = NodeKind::Other;
    std::string type_name;  // parser class name, e.g. "AugAssign"
    Span span;
    const Node* parent = nullptr;
    std::vector<const Node*> children;  // positioned children, source order
    std::vector<Field> fields;

    // Constant payload (kind == Constant): one of int, float, complex, str,
    // bytes, bool, none, ellipsis; value text only for int/float/bool.
    std::string const_kind;
    std::string const_value;

    const Node* field_node(std::string_view name) const;
    const std::vector<const Node*>* field_list(std::string_view name) const;
    std::string_view field_str(std::string_view name) const;
    const std::vector<std::string>* field_strs(std::string_view name) const;
    bool is_statement() const;
};

struct SyntaxError : std::runtime_error {
    SyntaxError(std::string message, int line_, int col_)
        : std::runtime_error(std::move(message)), line(line_), col(col_) {}
    int line = 0;
    int col = 0;
};

/// Parsed tree. Node addresses are stable for the lifetime of the Ast and
/// survive moves of the Ast itself.
class Ast {
public:
    Ast() = default;
    Ast(Ast&&) = default;
    Ast& operator=(Ast&&) = default;
    Ast(const Ast&) = delete;
    Ast& operator=(const Ast&) = delete;

    const Node& root() const { return *root_; }
    void walk(const std::function<void(const Node&)>& fn) const;

private:
    friend Ast build_ast_from_json(std::string_view json, std::string_view text);
    std::unique_ptr<std::deque<Node>> arena_ = std::make_unique<std::deque<Node>>();
    const Node* root_ = nullptr;
};

/// Deterministic, reentrant parse of syntactically valid Python 3 source.
/// Throws SyntaxError with a location otherwise.
Ast parse_source(std::string_view text);

std::string_view node_text(const Node& node, const SourceFile& file);
std::string_view node_text(const Node& node, std::string_view text);

/// "Lt" -> "<", "IsNot" -> "is not", "And" -> "and", "Mod" -> "%", ...
std::string_view op_token(std::string_view class_name);

/// Statement-list membership: which suite holds this statement, and where.
struct SuitePos {
    const Node* parent = nullptr;
    const std::vector<const Node*>* list = nullptr;
    std::size_t index = 0;
};
std::optional<SuitePos> suite_position(const Node& stmt);

/// Innermost statement containing the expression node (or the node itself).
const Node* enclosing_statement(const Node& node);

/// Ordered Compare pieces: operands() = [left, comparators...],
/// ops() = operator tokens between them.
std::vector<const Node*> compare_operands(const Node& compare);
std::vector<std::string_view> compare_ops(const Node& compare);

}  // namespace idiomizer
