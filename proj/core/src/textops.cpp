#include "idiomizer/textops.hpp"

#include <algorithm>

#include "idiomizer/tokens.hpp"

namespace idiomizer {

std::string detect_indent_unit(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::size_t i = pos;
        while (i < eol && (text[i] == ' ' || text[i] == '\t')) ++i;
        if (i > pos && i < eol && text[i] != '#') {
            return std::string(text.substr(pos, i - pos));
        }
        pos = eol + 1;
    }
    return "    ";
}

std::string indent_at(const SourceFile& file, std::size_t offset) {
    const std::size_t ls = file.line_start_of(offset);
    std::size_t i = ls;
    const std::string& text = file.text();
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    return text.substr(ls, i - ls);
}

namespace {

// 0-based line numbers (relative to `text`) whose first byte is inside a
// string token spanning multiple lines.
std::vector<std::size_t> lines_inside_strings(std::string_view text) {
    std::vector<std::size_t> out;
    const auto starts = compute_line_starts(text);
    for (const Token& t : tokenize(text)) {
        if (t.kind != Token::Kind::String) continue;
        for (std::size_t li = 0; li < starts.size(); ++li) {
            if (starts[li] > t.span.start && starts[li] < t.span.end) out.push_back(li);
        }
    }
    return out;
}

}  // namespace

DedentedBlock dedent_block(const SourceFile& file, Span span) {
    DedentedBlock block;
    block.base_indent = indent_at(file, span.start);
    const std::string_view raw = file.slice(span);
    block.protected_lines = lines_inside_strings(raw);

    std::string out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= raw.size()) {
        std::size_t eol = raw.find('\n', pos);
        const bool last = eol == std::string_view::npos;
        if (last) eol = raw.size();
        std::string_view line = raw.substr(pos, eol - pos);
        if (line_no > 0 &&
            std::find(block.protected_lines.begin(), block.protected_lines.end(), line_no) ==
                block.protected_lines.end()) {
            if (line.substr(0, block.base_indent.size()) == block.base_indent) {
                line.remove_prefix(block.base_indent.size());
            }
        }
        out.append(line);
        if (!last) out.push_back('\n');
        if (last) break;
        pos = eol + 1;
        ++line_no;
    }
    block.text = std::move(out);
    return block;
}

std::string reindent_block(std::string_view text, std::string_view indent) {
    if (indent.empty()) return std::string(text);
    const auto protected_lines = lines_inside_strings(text);
    std::string out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        const bool last = eol == std::string_view::npos;
        if (last) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        if (line_no > 0 && !line.empty() &&
            std::find(protected_lines.begin(), protected_lines.end(), line_no) ==
                protected_lines.end()) {
            out.append(indent);
        }
        out.append(line);
        if (!last) out.push_back('\n');
        if (last) break;
        pos = eol + 1;
        ++line_no;
    }
    return out;
}

Span expand_wrapping_parens(std::string_view text, Span span) {
    auto prev_non_ws = [&](std::size_t pos) -> std::optional<std::size_t> {
        while (pos > 0) {
            --pos;
            const char c = text[pos];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\\') continue;
            return pos;
        }
        return std::nullopt;
    };
    auto next_non_ws = [&](std::size_t pos) -> std::optional<std::size_t> {
        while (pos < text.size()) {
            const char c = text[pos];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\\') {
                ++pos;
                continue;
            }
            return pos;
        }
        return std::nullopt;
    };
    while (true) {
        const auto before = prev_non_ws(span.start);
        const auto after = next_non_ws(span.end);
        if (!before || !after) break;
        if (text[*before] != '(' || text[*after] != ')') break;
        span = Span{*before, *after + 1};
    }
    return span;
}

bool glob_match(std::string_view pattern, std::string_view path) {
    if (pattern.empty()) return path.empty();
    if (pattern[0] == '*') {
        const bool crosses = pattern.size() > 1 && pattern[1] == '*';
        std::string_view rest = pattern.substr(crosses ? 2 : 1);
        while (!rest.empty() && rest[0] == '*') rest.remove_prefix(1);
        if (crosses) {
            // "**/" also matches zero directories.
            if (!rest.empty() && rest[0] == '/' && glob_match(rest.substr(1), path)) {
                return true;
            }
            for (std::size_t i = 0;; ++i) {
                if (glob_match(rest, path.substr(i))) return true;
                if (i >= path.size()) return false;
            }
        }
        for (std::size_t i = 0;; ++i) {
            if (glob_match(rest, path.substr(i))) return true;
            if (i >= path.size() || path[i] == '/') return false;
        }
    }
    if (path.empty()) return false;
    if (pattern[0] == '?') {
        return path[0] != '/' && glob_match(pattern.substr(1), path.substr(1));
    }
    return pattern[0] == path[0] && glob_match(pattern.substr(1), path.substr(1));
}

}  // namespace idiomizer
