#include "holorepair/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <vector>

namespace holorepair {

static bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

Value canonicalize(std::string_view raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && is_space(raw[b])) ++b;
    while (e > b && is_space(raw[e - 1])) --e;
    if (b == e) return std::nullopt;
    return std::string(raw.substr(b, e - b));
}

std::optional<double> parse_decimal(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);  // from_chars rejects a leading '+'
    if (s.empty()) return std::nullopt;
    double out = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t cur = row[j];
            std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
            diag = cur;
        }
    }
    return row[b.size()];
}

double similarity(std::string_view a, std::string_view b) {
    std::size_t m = std::max(a.size(), b.size());
    if (m == 0) return 1.0;
    return 1.0 - static_cast<double>(edit_distance(a, b)) / static_cast<double>(m);
}

}  // namespace holorepair
