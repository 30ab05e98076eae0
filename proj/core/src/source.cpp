#include "idiomizer/source.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace idiomizer {

bool is_valid_utf8(std::string_view text) {
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        std::size_t len;
        unsigned min_cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            min_cp = 0x80;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            min_cp = 0x800;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            min_cp = 0x10000;
        } else {
            return false;
        }
        if (i + len > n) return false;
        unsigned cp = c & (0x7F >> len);
        for (std::size_t k = 1; k < len; ++k) {
            const unsigned char cc = static_cast<unsigned char>(text[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        if (cp < min_cp) return false;                    // overlong
        if (cp > 0x10FFFF) return false;
        if (cp >= 0xD800 && cp <= 0xDFFF) return false;   // surrogate
        i += len;
    }
    return true;
}

std::vector<std::size_t> compute_line_starts(std::string_view text) {
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n') starts.push_back(i + 1);
    }
    return starts;
}

SourceFile SourceFile::from_text(std::string path, std::string text) {
    SourceFile f;
    f.path_ = std::move(path);
    f.text_ = std::move(text);
    f.line_starts_ = compute_line_starts(f.text_);
    return f;
}

SourceFile SourceFile::read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError(path.string() + ": cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw FileError(path.string() + ": read failed");
    std::string text = std::move(buf).str();
    if (!is_valid_utf8(text)) {
        throw FileError(path.string() + ": not valid UTF-8");
    }
    return from_text(path.string(), std::move(text));
}

LineCol SourceFile::line_col(std::size_t offset) const {
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    const std::size_t line_index = static_cast<std::size_t>(it - line_starts_.begin()) - 1;
    return LineCol{static_cast<int>(line_index) + 1,
                   static_cast<int>(offset - line_starts_[line_index])};
}

std::size_t SourceFile::offset_of(int line, int col) const {
    const std::size_t li = static_cast<std::size_t>(line - 1);
    if (li >= line_starts_.size()) return text_.size();
    return std::min(line_starts_[li] + static_cast<std::size_t>(col), text_.size());
}

std::size_t SourceFile::line_start_of(std::size_t offset) const {
    auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
    return line_starts_[static_cast<std::size_t>(it - line_starts_.begin()) - 1];
}

std::string splice(std::string_view text, std::vector<Edit> edits) {
    std::sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
        return a.first.start != b.first.start ? a.first.start < b.first.start
                                              : a.first.end < b.first.end;
    });
    for (std::size_t i = 0; i < edits.size(); ++i) {
        const Span& s = edits[i].first;
        if (s.start > s.end || s.end > text.size()) {
            throw OverlappingEdits("edit span out of range");
        }
        if (i + 1 < edits.size()) {
            const Span& next = edits[i + 1].first;
            const bool intersect =
                s.end > next.start || (s.start == next.start && s.end == next.end && s.empty());
            if (intersect) throw OverlappingEdits("edit spans intersect");
        }
    }
    std::string out(text);
    for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
        out.replace(it->first.start, it->first.size(), it->second);
    }
    return out;
}

}  // namespace idiomizer
