#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace lexlink::tsv {

inline std::vector<std::string> split(std::string_view line, char sep = '\t') {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

struct Line {
    std::size_t number = 0;  // 1-based
    std::vector<std::string> cells;
};

/// Reads non-blank, non-comment (`#`) lines. A trailing CR is dropped.
inline std::vector<Line> read_lines(std::istream& in) {
    std::vector<Line> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        out.push_back({n, split(line)});
    }
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    out << join(cells, "\t") << '\n';
}

}  // namespace lexlink::tsv
