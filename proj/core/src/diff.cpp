#include <cstdint>
#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "idiomizer/rewriting.hpp"

namespace idiomizer {

namespace {

std::vector<std::string> split_lines_lf(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        pos = eol + 1;
    }
    return lines;
}

struct OpBlock {
    enum class Tag { Equal, Replace } tag;
    std::size_t a1, a2, b1, b2;
};

// Opcode list via common prefix/suffix trim plus an LCS DP over the middle.
std::vector<OpBlock> diff_opcodes(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) {
    std::size_t prefix = 0;
    while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
    std::size_t suffix = 0;
    while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
           a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix]) {
        ++suffix;
    }
    const std::size_t an = a.size() - prefix - suffix;
    const std::size_t bn = b.size() - prefix - suffix;

    // LCS table over the trimmed middle.
    std::vector<std::vector<std::uint32_t>> lcs(an + 1, std::vector<std::uint32_t>(bn + 1, 0));
    for (std::size_t i = an; i-- > 0;) {
        for (std::size_t j = bn; j-- > 0;) {
            if (a[prefix + i] == b[prefix + j]) {
                lcs[i][j] = lcs[i + 1][j + 1] + 1;
            } else {
                lcs[i][j] = std::max(lcs[i + 1][j], lcs[i][j + 1]);
            }
        }
    }

    std::vector<OpBlock> ops;
    auto emit = [&](OpBlock::Tag tag, std::size_t a1, std::size_t a2, std::size_t b1,
                    std::size_t b2) {
        if (a1 == a2 && b1 == b2) return;
        if (!ops.empty() && ops.back().tag == tag) {
            ops.back().a2 = a2;
            ops.back().b2 = b2;
            return;
        }
        ops.push_back({tag, a1, a2, b1, b2});
    };

    if (prefix) emit(OpBlock::Tag::Equal, 0, prefix, 0, prefix);
    std::size_t i = 0, j = 0;
    while (i < an || j < bn) {
        if (i < an && j < bn && a[prefix + i] == b[prefix + j]) {
            emit(OpBlock::Tag::Equal, prefix + i, prefix + i + 1, prefix + j, prefix + j + 1);
            ++i;
            ++j;
        } else if (j < bn && (i == an || lcs[i][j + 1] >= lcs[i + 1][j])) {
            emit(OpBlock::Tag::Replace, prefix + i, prefix + i, prefix + j, prefix + j + 1);
            ++j;
        } else {
            emit(OpBlock::Tag::Replace, prefix + i, prefix + i + 1, prefix + j, prefix + j);
            ++i;
        }
    }
    if (suffix) {
        emit(OpBlock::Tag::Equal, a.size() - suffix, a.size(), b.size() - suffix, b.size());
    }
    return ops;
}

std::string format_range(std::size_t start, std::size_t stop) {
    std::size_t beginning = start + 1;
    const std::size_t length = stop - start;
    if (length == 1) return std::to_string(beginning);
    if (length == 0) --beginning;
    return std::to_string(beginning) + "," + std::to_string(length);
}

}  // namespace

std::string unified_diff(std::string_view before, std::string_view after,
                         std::string_view path) {
    if (before == after) return "";
    const auto a = split_lines_lf(before);
    const auto b = split_lines_lf(after);
    auto ops = diff_opcodes(a, b);
    if (ops.empty()) return "";
    const bool any_change = std::any_of(ops.begin(), ops.end(), [](const OpBlock& op) {
        return op.tag == OpBlock::Tag::Replace;
    });
    if (!any_change) return "";

    constexpr std::size_t n = 3;  // context lines
    // Trim outer context and split over-long equal runs into hunk groups.
    if (ops.front().tag == OpBlock::Tag::Equal) {
        OpBlock& first = ops.front();
        first.a1 = std::max(first.a1, first.a2 > n ? first.a2 - n : 0);
        first.b1 = std::max(first.b1, first.b2 > n ? first.b2 - n : 0);
    }
    if (ops.back().tag == OpBlock::Tag::Equal) {
        OpBlock& last = ops.back();
        last.a2 = std::min(last.a2, last.a1 + n);
        last.b2 = std::min(last.b2, last.b1 + n);
    }
    std::vector<std::vector<OpBlock>> groups;
    std::vector<OpBlock> group;
    for (const OpBlock& op : ops) {
        if (op.tag == OpBlock::Tag::Equal && op.a2 - op.a1 > 2 * n) {
            group.push_back({op.tag, op.a1, std::min(op.a2, op.a1 + n), op.b1,
                             std::min(op.b2, op.b1 + n)});
            groups.push_back(group);
            group.clear();
            group.push_back({op.tag, op.a2 > n ? op.a2 - n : 0, op.a2,
                             op.b2 > n ? op.b2 - n : 0, op.b2});
            continue;
        }
        group.push_back(op);
    }
    if (!group.empty() && !(group.size() == 1 && group[0].tag == OpBlock::Tag::Equal)) {
        groups.push_back(group);
    }

    std::string out;
    out += "--- a/";
    out += path;
    out += "\n+++ b/";
    out += path;
    out += "\n";
    for (const auto& g : groups) {
        const std::size_t a1 = g.front().a1, a2 = g.back().a2;
        const std::size_t b1 = g.front().b1, b2 = g.back().b2;
        out += "@@ -" + format_range(a1, a2) + " +" + format_range(b1, b2) + " @@\n";
        for (const OpBlock& op : g) {
            if (op.tag == OpBlock::Tag::Equal) {
                for (std::size_t i = op.a1; i < op.a2; ++i) out += " " + a[i] + "\n";
            } else {
                for (std::size_t i = op.a1; i < op.a2; ++i) out += "-" + a[i] + "\n";
                for (std::size_t i = op.b1; i < op.b2; ++i) out += "+" + b[i] + "\n";
            }
        }
    }
    return out;
}

}  // namespace idiomizer
