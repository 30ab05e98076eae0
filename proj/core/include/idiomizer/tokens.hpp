#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "idiomizer/source.hpp"

namespace idiomizer {

/// Lexical token over Python source. The lexer is layout-free: it never
/// emits INDENT/NEWLINE tokens, which makes it usable on fragments as well
/// as whole files. Comments are emitted so callers can skip or keep them.
struct Token {
    enum class Kind { Name, Number, String, Op, Comment };
    Kind kind = Kind::Op;
    Span span;
};

/// Best-effort scan; unknown bytes become single-char Op tokens.
std::vector<Token> tokenize(std::string_view text);

/// Token texts in order, comments skipped.
std::vector<std::string> token_texts(std::string_view text);

/// Tokens joined with single spaces, comments skipped. "x<y" and "x < y"
/// normalize identically; parentheses are tokens and are kept.
std::string normalize_tokens(std::string_view text);

bool tokens_equal(std::string_view a, std::string_view b);

/// True when `needle`'s token sequence occurs contiguously in `haystack`'s.
bool contains_token_seq(const std::vector<std::string>& haystack,
                        const std::vector<std::string>& needle);

bool is_python_keyword(std::string_view word);

}  // namespace idiomizer
