#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace idiomizer {

/// Half-open byte range [start, end) into a UTF-8 source buffer.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    bool empty() const { return start == end; }
    bool contains(const Span& other) const {
        return start <= other.start && other.end <= end;
    }
    bool overlaps(const Span& other) const {
        return start < other.end && other.start < end;
    }
    friend bool operator==(const Span&, const Span&) = default;
    friend auto operator<=>(const Span&, const Span&) = default;
};

/// 1-based line, 0-based byte column within the line.
struct LineCol {
    int line = 1;
    int col = 0;
};

struct FileError : std::runtime_error {
    explicit FileError(std::string message) : std::runtime_error(std::move(message)) {}
};

bool is_valid_utf8(std::string_view text);

/// Immutable source buffer with a line-start index. No newline or encoding
/// normalization is applied: slicing by a parsed node's span reproduces the
/// node's source bytes exactly.
class SourceFile {
public:
    SourceFile() = default;
    static SourceFile from_text(std::string path, std::string text);
    /// Reads raw bytes; throws FileError on I/O failure or invalid UTF-8.
    static SourceFile read(const std::filesystem::path& path);

    const std::string& path() const { return path_; }
    const std::string& text() const { return text_; }
    std::string_view slice(Span span) const {
        return std::string_view(text_).substr(span.start, span.size());
    }
    /// line_starts()[0] == 0; strictly increasing; one entry per line.
    const std::vector<std::size_t>& line_starts() const { return line_starts_; }
    LineCol line_col(std::size_t offset) const;
    std::size_t offset_of(int line, int col) const;
    /// Byte offset where the line containing `offset` begins.
    std::size_t line_start_of(std::size_t offset) const;

private:
    std::string path_;
    std::string text_;
    std::vector<std::size_t> line_starts_;
};

std::vector<std::size_t> compute_line_starts(std::string_view text);

struct OverlappingEdits : std::runtime_error {
    explicit OverlappingEdits(std::string message) : std::runtime_error(std::move(message)) {}
};

using Edit = std::pair<Span, std::string>;

/// Applies non-overlapping edits right-to-left so earlier offsets stay valid.
/// Throws OverlappingEdits when two spans intersect (two zero-width inserts at
/// the same offset count as intersecting: their order would be ambiguous).
std::string splice(std::string_view text, std::vector<Edit> edits);

}  // namespace idiomizer
