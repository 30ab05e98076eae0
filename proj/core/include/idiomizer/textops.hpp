#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idiomizer/source.hpp"

namespace idiomizer {

/// Indentation unit observed in a file: the leading whitespace of its first
/// indented line. Defaults to four spaces.
std::string detect_indent_unit(std::string_view text);

/// Leading whitespace of the line containing `offset`.
std::string indent_at(const SourceFile& file, std::size_t offset);

/// A multi-line fragment lifted out of its surrounding indentation so it can
/// be parsed standalone. `base_indent` is what was stripped from continuation
/// lines; `protected_lines` are 0-based fragment line numbers that start
/// inside a multi-line string token and were left untouched.
struct DedentedBlock {
    std::string text;
    std::string base_indent;
    std::vector<std::size_t> protected_lines;
};

/// Dedents file text covered by `span`. The first line is taken from the span
/// start (its indentation lives outside the span); following lines have
/// `base_indent` stripped unless they begin inside a string literal.
DedentedBlock dedent_block(const SourceFile& file, Span span);

/// Prefixes every line after the first with `indent`, skipping lines that lie
/// inside multi-line string tokens of `text`.
std::string reindent_block(std::string_view text, std::string_view indent);

/// Expands a span outward over directly wrapping parentheses:
/// "(a > b)" with span on "a > b" grows to include both parens. Repeats while
/// the nearest non-whitespace neighbours are a '(' ... ')' pair.
Span expand_wrapping_parens(std::string_view text, Span span);

/// Minimal glob matching for --include/--exclude: '*' matches within a path
/// segment, '**' crosses segments, '?' one character.
bool glob_match(std::string_view pattern, std::string_view path);

}  // namespace idiomizer
