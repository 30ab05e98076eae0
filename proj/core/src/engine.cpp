#include "idiomizer/engine.hpp"

#include <algorithm>

#include "idiomizer/sha256.hpp"
#include "idiomizer/tokens.hpp"

namespace idiomizer {

std::string EngineRequest::request_sha256() const {
    std::string payload(idiom_name(idiom));
    payload.push_back('\x1f');
    payload += prompt;
    payload.push_back('\x1f');
    payload += abstract_code;
    return sha256_hex(payload);
}

namespace {

bool walk_any(const Node& node, const std::function<bool(const Node&)>& pred) {
    if (pred(node)) return true;
    for (const Node* c : node.children) {
        if (walk_any(*c, pred)) return true;
    }
    return false;
}

}  // namespace

bool has_idiom_marker(IdiomKind kind, std::string_view code) {
    Ast ast;
    try {
        ast = parse_source(code);
    } catch (const SyntaxError&) {
        return false;
    }
    switch (kind) {
        case IdiomKind::ListComprehension:
            return walk_any(ast.root(), [](const Node& n) { return n.kind == NodeKind::ListComp; });
        case IdiomKind::SetComprehension:
            return walk_any(ast.root(), [](const Node& n) { return n.kind == NodeKind::SetComp; });
        case IdiomKind::DictComprehension:
            return walk_any(ast.root(), [](const Node& n) { return n.kind == NodeKind::DictComp; });
        case IdiomKind::ChainComparison:
            return walk_any(ast.root(), [](const Node& n) {
                if (n.kind != NodeKind::Compare) return false;
                const auto* ops = n.field_strs("ops");
                return ops && ops->size() >= 2;
            });
        case IdiomKind::TruthTest:
            // Marker is the pattern's absence: no ==/!= against an EmptySet
            // literal survives in the output.
            return !walk_any(ast.root(), [&](const Node& n) {
                if (n.kind != NodeKind::Compare) return false;
                const auto ops = compare_ops(n);
                if (ops.size() != 1 || (ops[0] != "==" && ops[0] != "!=")) return false;
                const auto operands = compare_operands(n);
                return operands.size() == 2 &&
                       (is_empty_set_literal(*operands[0], code) ||
                        is_empty_set_literal(*operands[1], code));
            });
        case IdiomKind::LoopElse:
            return walk_any(ast.root(), [](const Node& n) {
                if (n.kind != NodeKind::For && n.kind != NodeKind::While) return false;
                const auto* orelse = n.field_list("orelse");
                return orelse && !orelse->empty();
            });
        case IdiomKind::AssignMultiTargets:
            return walk_any(ast.root(), [](const Node& n) {
                if (n.kind != NodeKind::Assign) return false;
                const auto* targets = n.field_list("targets");
                if (!targets || targets->size() != 1) return false;
                const Node* t = (*targets)[0];
                const auto* elts = t->field_list("elts");
                return t->kind == NodeKind::Tuple && elts && elts->size() >= 2;
            });
        case IdiomKind::ForMultiTargets:
            return walk_any(ast.root(), [](const Node& n) {
                if (n.kind != NodeKind::For) return false;
                const Node* t = n.field_node("target");
                return t && t->kind == NodeKind::Tuple;
            });
        case IdiomKind::StarInFuncCall:
            return walk_any(ast.root(), [](const Node& n) {
                if (n.kind != NodeKind::Call) return false;
                const auto* args = n.field_list("args");
                if (!args) return false;
                return std::any_of(args->begin(), args->end(), [](const Node* a) {
                    return a->kind == NodeKind::Starred;
                });
            });
        case IdiomKind::With:
            return walk_any(ast.root(), [](const Node& n) { return n.kind == NodeKind::With; });
        case IdiomKind::Enumerate:
            return walk_any(ast.root(), [](const Node& n) {
                if (n.kind != NodeKind::For) return false;
                const Node* iter = n.field_node("iter");
                if (!iter || iter->kind != NodeKind::Call) return false;
                const Node* fn = iter->field_node("func");
                return fn && fn->kind == NodeKind::Name && fn->field_str("id") == "enumerate";
            });
        case IdiomKind::ChainAssignSameValue:
            return walk_any(ast.root(), [](const Node& n) {
                if (n.kind != NodeKind::Assign) return false;
                const auto* targets = n.field_list("targets");
                return targets && targets->size() >= 2;
            });
        case IdiomKind::Fstring:
            return walk_any(ast.root(), [](const Node& n) { return n.kind == NodeKind::JoinedStr; });
    }
    return false;
}

IdiomatizationOutcome parse_engine_reply(std::string_view raw) {
    // First non-empty line decides the verdict.
    std::size_t pos = 0;
    std::string verdict_line;
    while (pos < raw.size()) {
        std::size_t eol = raw.find('\n', pos);
        if (eol == std::string_view::npos) eol = raw.size();
        std::string_view line = raw.substr(pos, eol - pos);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (!line.empty()) {
            verdict_line = std::string(line);
            break;
        }
        pos = eol + 1;
    }
    auto lower_prefix = [&](std::string_view want) {
        if (verdict_line.size() < want.size()) return false;
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(verdict_line[i])) != want[i]) return false;
        }
        if (verdict_line.size() > want.size()) {
            const char next = verdict_line[want.size()];
            if (std::isalnum(static_cast<unsigned char>(next))) return false;
        }
        return true;
    };

    if (lower_prefix("no")) {
        std::string reason = verdict_line.size() > 2 ? verdict_line.substr(2) : "";
        while (!reason.empty() && (reason.front() == ',' || reason.front() == '.' ||
                                   reason.front() == ':' || reason.front() == ' ')) {
            reason.erase(reason.begin());
        }
        if (reason.empty()) {
            // Take the remainder of the reply as the reason, if any.
            const std::size_t nl = raw.find('\n');
            if (nl != std::string_view::npos) {
                std::string rest(raw.substr(nl + 1));
                while (!rest.empty() && (rest.back() == '\n' || rest.back() == ' ')) rest.pop_back();
                reason = rest;
            }
        }
        if (reason.empty()) reason = "engine declined";
        return Declined{reason};
    }
    if (!lower_prefix("yes")) {
        return Declined{"malformed response: expected a Yes/No verdict line"};
    }
    const std::size_t fence = raw.find("```");
    if (fence == std::string_view::npos) {
        return Declined{"malformed response: missing fenced code block"};
    }
    std::size_t body_start = raw.find('\n', fence);
    if (body_start == std::string_view::npos) {
        return Declined{"malformed response: unterminated code fence"};
    }
    ++body_start;
    const std::size_t closing = raw.find("```", body_start);
    if (closing == std::string_view::npos) {
        return Declined{"malformed response: unterminated code fence"};
    }
    std::string code(raw.substr(body_start, closing - body_start));
    while (!code.empty() && code.back() == '\n') code.pop_back();
    if (code.empty()) return Declined{"malformed response: empty code block"};
    return Accepted{code};
}

std::string fresh_name(std::string_view text, std::string_view base) {
    const auto tokens = token_texts(text);
    auto taken = [&](const std::string& candidate) {
        return std::find(tokens.begin(), tokens.end(), candidate) != tokens.end();
    };
    std::string candidate(base);
    for (int suffix = 2; taken(candidate); ++suffix) {
        candidate = std::string(base) + std::to_string(suffix);
    }
    return candidate;
}

}  // namespace idiomizer
