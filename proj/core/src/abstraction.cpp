#include "idiomizer/abstraction.hpp"

#include <algorithm>
#include <map>

#include "idiomizer/textops.hpp"
#include "idiomizer/tokens.hpp"

namespace idiomizer {

AbstractionResult abstract_operands(std::string_view component_text,
                                    std::span<const OperandRef> operands) {
    AbstractionResult result;
    result.mode = AbstractionMode::OperandMapping;

    std::vector<OperandRef> ordered(operands.begin(), operands.end());
    std::sort(ordered.begin(), ordered.end(),
              [](const OperandRef& a, const OperandRef& b) { return a.span.start < b.span.start; });

    std::map<std::string, std::string> symbol_by_norm;
    std::vector<Edit> edits;
    for (const OperandRef& ref : ordered) {
        const std::string original(component_text.substr(ref.span.start, ref.span.size()));
        const std::string norm = normalize_tokens(original);
        auto it = symbol_by_norm.find(norm);
        if (it == symbol_by_norm.end()) {
            std::string symbol = "v" + std::to_string(symbol_by_norm.size() + 1);
            it = symbol_by_norm.emplace(norm, symbol).first;
            result.bindings.emplace_back(symbol,
                                         ref.wrap_parens ? "(" + original + ")" : original);
        }
        edits.emplace_back(ref.span, it->second);
    }
    result.abstract_code = splice(component_text, std::move(edits));
    return result;
}

AbstractionResult abstract_specified(std::string_view component_text,
                                     std::string_view object_text) {
    AbstractionResult result;
    result.mode = AbstractionMode::SpecifiedObject;

    const std::vector<std::string> needle = token_texts(object_text);
    if (needle.empty()) throw ObjectNotFound("empty object text");
    const std::vector<Token> tokens = tokenize(component_text);
    std::vector<Edit> edits;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (tokens[i].kind == Token::Kind::Comment) {
            ++i;
            continue;
        }
        bool match = true;
        std::size_t k = 0;
        std::size_t j = i;
        while (k < needle.size()) {
            if (j >= tokens.size() || tokens[j].kind == Token::Kind::Comment) {
                match = false;
                break;
            }
            const Token& t = tokens[j];
            if (component_text.substr(t.span.start, t.span.size()) != needle[k]) {
                match = false;
                break;
            }
            ++k;
            ++j;
        }
        if (match) {
            edits.emplace_back(Span{tokens[i].span.start, tokens[j - 1].span.end}, "v");
            i = j;
        } else {
            ++i;
        }
    }
    if (edits.empty()) {
        throw ObjectNotFound("object text \"" + std::string(object_text) +
                             "\" not found in component");
    }
    result.bindings.emplace_back("v", std::string(object_text));
    result.abstract_code = splice(component_text, std::move(edits));
    return result;
}

std::string restore(std::string_view abstract_code, const Bindings& bindings) {
    std::vector<Edit> edits;
    for (const Token& t : tokenize(abstract_code)) {
        if (t.kind != Token::Kind::Name) continue;
        const std::string_view word = abstract_code.substr(t.span.start, t.span.size());
        for (const auto& [symbol, original] : bindings) {
            if (word == symbol) {
                edits.emplace_back(t.span, original);
                break;
            }
        }
    }
    // Every symbol referenced must be bound; an unbound v-symbol is an error.
    for (const Token& t : tokenize(abstract_code)) {
        if (t.kind != Token::Kind::Name) continue;
        const std::string_view word = abstract_code.substr(t.span.start, t.span.size());
        if (word.size() < 2 || word[0] != 'v') continue;
        const bool numeric_tail = std::all_of(word.begin() + 1, word.end(), [](char c) {
            return c >= '0' && c <= '9';
        });
        if (!numeric_tail) continue;
        bool bound = false;
        for (const auto& [symbol, original] : bindings) {
            (void)original;
            if (word == symbol) {
                bound = true;
                break;
            }
        }
        if (!bound) throw UnboundSymbol("symbol \"" + std::string(word) + "\" has no binding");
    }
    return splice(abstract_code, std::move(edits));
}

SiteAbstraction abstract_site(const MatchSite& site, const SourceFile& file) {
    SiteAbstraction out;
    const IdiomSpec& spec = spec_for(site.idiom);

    switch (spec.abstraction) {
        case AbstractionMode::OperandMapping: {
            // Chain comparison. The pair is reported verbatim but the
            // abstract code is rendered structurally ("v1 > v2 and v3 == v2")
            // so it parses standalone even when the source pair wraps lines.
            out.component_text = std::string(file.slice(site.span));
            out.base_indent = indent_at(file, site.span.start);
            AbstractionResult& r = out.result;
            r.mode = AbstractionMode::OperandMapping;
            std::map<std::string, std::string> symbol_by_norm;
            auto symbol_for = [&](const Node& operand) {
                const std::string original(node_text(operand, file));
                const std::string norm = normalize_tokens(original);
                auto it = symbol_by_norm.find(norm);
                if (it == symbol_by_norm.end()) {
                    std::string sym = "v" + std::to_string(symbol_by_norm.size() + 1);
                    it = symbol_by_norm.emplace(norm, sym).first;
                    r.bindings.emplace_back(
                        sym, needs_parens_as_operand(operand) ? "(" + original + ")" : original);
                }
                return it->second;
            };
            std::string abstract;
            for (std::size_t c = 0; c < site.components.nodes.size(); ++c) {
                if (c > 0) abstract += " and ";
                const Node& compare = *site.components.nodes[c];
                const auto operands = compare_operands(compare);
                const auto ops = compare_ops(compare);
                for (std::size_t i = 0; i < operands.size(); ++i) {
                    if (i > 0) {
                        abstract += " ";
                        abstract += ops[i - 1];
                        abstract += " ";
                    }
                    abstract += symbol_for(*operands[i]);
                }
            }
            r.abstract_code = std::move(abstract);
            break;
        }
        case AbstractionMode::SpecifiedObject: {
            std::string object;
            if (site.idiom == IdiomKind::StarInFuncCall) {
                const Node* base = site.components.nodes.front()->field_node("value");
                object = std::string(node_text(*base, file));
                // Join the argument run onto one line; inner spans are short.
                std::string joined;
                for (std::size_t i = 0; i < site.components.nodes.size(); ++i) {
                    if (i > 0) joined += ", ";
                    joined += node_text(*site.components.nodes[i], file);
                }
                out.component_text = std::string(file.slice(site.span));
                out.base_indent = indent_at(file, site.span.start);
                out.result = abstract_specified(joined, object);
                break;
            }
            if (site.idiom == IdiomKind::ForMultiTargets) {
                const Node* target = site.components.nodes.front()->field_node("target");
                object = std::string(node_text(*target, file));
            } else {  // Enumerate: the iterated object X of range(len(X))
                const auto rl = as_range_len_loop(*site.components.nodes.front());
                object = rl ? std::string(node_text(*rl->sequence, file)) : std::string();
            }
            const DedentedBlock block = dedent_block(file, site.span);
            out.component_text = block.text;
            out.base_indent = block.base_indent;
            out.result = abstract_specified(out.component_text, object);
            break;
        }
        case AbstractionMode::NoAbstraction: {
            Span span = site.span;
            if (site.idiom == IdiomKind::With) {
                // The component is the open(...) call; the unit of rewriting
                // is its host statement.
                const Node* host = enclosing_statement(*site.components.nodes.front());
                if (host) span = host->span;
            }
            const DedentedBlock block = dedent_block(file, span);
            out.component_text = block.text;
            out.base_indent = block.base_indent;
            out.result.mode = AbstractionMode::NoAbstraction;
            out.result.abstract_code = out.component_text;
            break;
        }
    }
    return out;
}

}  // namespace idiomizer
