#include "idiomizer/tokens.hpp"

#include <array>
#include <cctype>
#include <unordered_set>

namespace idiomizer {

namespace {

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}
bool is_ident_cont(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool is_string_prefix(std::string_view s) {
    if (s.size() > 2) return false;
    for (char c : s) {
        switch (std::tolower(static_cast<unsigned char>(c))) {
            case 'r':
            case 'b':
            case 'u':
            case 'f':
                break;
            default:
                return false;
        }
    }
    return true;
}

// Longest-match first.
constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 19> kOps2 = {
    "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", ":=",
    "+=", "-=", "*=", "/=", "%=", "@=", "&=", "|=", "^="};

std::size_t scan_string(std::string_view text, std::size_t i, bool raw) {
    // i points at the opening quote. Returns offset one past the closing
    // quote, or text.size() on an unterminated literal.
    const char q = text[i];
    const bool triple = text.substr(i, 3) == std::string(3, q);
    const std::size_t open = triple ? 3 : 1;
    std::size_t p = i + open;
    while (p < text.size()) {
        if (text[p] == '\\' && p + 1 < text.size()) {
            // Even in raw strings a backslash prevents the following quote
            // from terminating the literal.
            p += 2;
            continue;
        }
        if (!triple && (text[p] == '\n')) return p;  // unterminated single-quoted
        if (text[p] == q) {
            if (!triple) return p + 1;
            if (text.substr(p, 3) == std::string(3, q)) return p + 3;
        }
        ++p;
    }
    (void)raw;
    return text.size();
}

std::size_t scan_number(std::string_view text, std::size_t i) {
    std::size_t p = i;
    while (p < text.size()) {
        const char c = text[p];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
            ++p;
            continue;
        }
        if ((c == '+' || c == '-') && p > i) {
            const char prev = text[p - 1];
            if (prev == 'e' || prev == 'E') {
                // Exponent sign, but only in a decimal context (0xE+1 is an
                // expression, not a float).
                bool hex = text.size() - i > 1 && text[i] == '0' &&
                           (text[i + 1] == 'x' || text[i + 1] == 'X');
                if (!hex) {
                    ++p;
                    continue;
                }
            }
        }
        break;
    }
    return p;
}

}  // namespace

bool is_python_keyword(std::string_view word) {
    static const std::unordered_set<std::string_view> kw = {
        "False", "None", "True", "and", "as", "assert", "async", "await", "break",
        "class", "continue", "def", "del", "elif", "else", "except", "finally",
        "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
        "not", "or", "pass", "raise", "return", "try", "while", "with", "yield"};
    return kw.count(word) > 0;
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (c == ' ' || c == '\t' || c == '\f' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        if (c == '\\') {  // line continuation (or stray backslash)
            ++i;
            continue;
        }
        if (c == '#') {
            std::size_t p = i;
            while (p < n && text[p] != '\n') ++p;
            out.push_back({Token::Kind::Comment, {i, p}});
            i = p;
            continue;
        }
        if (c == '\'' || c == '"') {
            std::size_t p = scan_string(text, i, false);
            out.push_back({Token::Kind::String, {i, p}});
            i = p;
            continue;
        }
        if (is_ident_start(c)) {
            std::size_t p = i;
            while (p < n && is_ident_cont(static_cast<unsigned char>(text[p]))) ++p;
            // A string prefix glues to the following quote: r"...", fr'...'.
            std::string_view word = text.substr(i, p - i);
            if (p < n && (text[p] == '\'' || text[p] == '"') && is_string_prefix(word)) {
                std::size_t q = scan_string(text, p, true);
                out.push_back({Token::Kind::String, {i, q}});
                i = q;
                continue;
            }
            out.push_back({Token::Kind::Name, {i, p}});
            i = p;
            continue;
        }
        if (std::isdigit(c) || (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t p = scan_number(text, i);
            out.push_back({Token::Kind::Number, {i, p}});
            i = p;
            continue;
        }
        bool matched = false;
        for (std::string_view op : kOps3) {
            if (text.substr(i, 3) == op) {
                out.push_back({Token::Kind::Op, {i, i + 3}});
                i += 3;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        for (std::string_view op : kOps2) {
            if (text.substr(i, 2) == op) {
                out.push_back({Token::Kind::Op, {i, i + 2}});
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        out.push_back({Token::Kind::Op, {i, i + 1}});
        ++i;
    }
    return out;
}

std::vector<std::string> token_texts(std::string_view text) {
    std::vector<std::string> out;
    for (const Token& t : tokenize(text)) {
        if (t.kind == Token::Kind::Comment) continue;
        out.emplace_back(text.substr(t.span.start, t.span.size()));
    }
    return out;
}

std::string normalize_tokens(std::string_view text) {
    std::string out;
    for (const Token& t : tokenize(text)) {
        if (t.kind == Token::Kind::Comment) continue;
        if (!out.empty()) out.push_back(' ');
        out.append(text.substr(t.span.start, t.span.size()));
    }
    return out;
}

bool tokens_equal(std::string_view a, std::string_view b) {
    return normalize_tokens(a) == normalize_tokens(b);
}

bool contains_token_seq(const std::vector<std::string>& haystack,
                        const std::vector<std::string>& needle) {
    if (needle.empty()) return true;
    if (needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        bool all = true;
        for (std::size_t k = 0; k < needle.size(); ++k) {
            if (haystack[i + k] != needle[k]) {
                all = false;
                break;
            }
        }
        if (all) return true;
    }
    return false;
}

}  // namespace idiomizer
