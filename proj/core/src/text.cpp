#include "metafair/text.hpp"

#include <algorithm>
#include <cctype>

namespace metafair::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_quote_or_punct(char c) {
    switch (c) {
        case '"': case '\'': case '`': case '.': case ',': case ';': case ':':
        case '!': case '?': case ')': case '(': case '[': case ']': case '*':
            return true;
        default:
            return false;
    }
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string normalize_answer(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (is_space(s[b]) || is_quote_or_punct(s[b]))) ++b;
    while (e > b && (is_space(s[e - 1]) || is_quote_or_punct(s[e - 1]))) --e;
    return to_lower(s.substr(b, e - b));
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    if (needle.size() > haystack.size()) return false;
    const std::string h = to_lower(haystack);
    const std::string n = to_lower(needle);
    return h.find(n) != std::string::npos;
}

std::size_t word_count(std::string_view s) {
    std::size_t count = 0;
    bool in_word = false;
    for (char c : s) {
        if (is_space(c)) {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++count;
        }
    }
    return count;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '\n') {
            std::string_view line = s.substr(start, i - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            lines.emplace_back(line);
            start = i + 1;
        }
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::string render_placeholders(
    std::string_view body,
    const std::vector<std::pair<std::string, std::string>>& vars) {
    std::string out;
    out.reserve(body.size());
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == '{') {
            std::size_t close = body.find('}', i + 1);
            if (close != std::string_view::npos) {
                std::string_view name = body.substr(i + 1, close - i - 1);
                auto it = std::find_if(vars.begin(), vars.end(),
                                       [&](const auto& kv) { return kv.first == name; });
                if (it != vars.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += body[i];
        ++i;
    }
    return out;
}

std::vector<std::string> placeholder_names(std::string_view body) {
    std::vector<std::string> names;
    std::size_t i = 0;
    while (i < body.size()) {
        if (body[i] == '{') {
            std::size_t close = body.find('}', i + 1);
            if (close != std::string_view::npos) {
                std::string name(body.substr(i + 1, close - i - 1));
                if (!name.empty() &&
                    std::find(names.begin(), names.end(), name) == names.end()) {
                    names.push_back(name);
                }
                i = close + 1;
                continue;
            }
        }
        ++i;
    }
    return names;
}

std::vector<LabelledOption> extract_mc_options(std::string_view prompt) {
    // Option markers: an uppercase letter followed by ')' '.' or ':' at a word
    // boundary. Options run until the next marker or end of text.
    struct Marker {
        std::size_t pos;
        char label;
        std::size_t body_start;
    };
    std::vector<Marker> markers;
    for (std::size_t i = 0; i + 1 < prompt.size(); ++i) {
        char c = prompt[i];
        if (c < 'A' || c > 'Z') continue;
        char next = prompt[i + 1];
        if (next != ')' && next != '.' && next != ':') continue;
        if (i > 0 && !is_space(prompt[i - 1]) && prompt[i - 1] != '(') continue;
        // Refuse "A." sentence starts without a following option body.
        std::size_t body = i + 2;
        while (body < prompt.size() && is_space(prompt[body])) ++body;
        if (body >= prompt.size()) continue;
        markers.push_back({i, c, body});
    }
    // Keep only a consecutive run starting at 'A'.
    std::vector<LabelledOption> options;
    std::size_t run_start = 0;
    while (run_start < markers.size() && markers[run_start].label != 'A') ++run_start;
    if (run_start == markers.size()) return {};
    char expected = 'A';
    std::vector<Marker> run;
    for (std::size_t i = run_start; i < markers.size(); ++i) {
        if (markers[i].label != expected) break;
        run.push_back(markers[i]);
        ++expected;
    }
    if (run.size() < 2) return {};
    for (std::size_t i = 0; i < run.size(); ++i) {
        std::size_t end = (i + 1 < run.size()) ? run[i + 1].pos : prompt.size();
        std::string body = trim(prompt.substr(run[i].body_start, end - run[i].body_start));
        while (!body.empty() && (body.back() == '.' || body.back() == ',' ||
                                 body.back() == '?' || body.back() == '!'))
            body.pop_back();
        if (body.empty()) return {};
        options.push_back({std::string(1, run[i].label), trim(body)});
    }
    return options;
}

std::vector<std::string> extract_ranking_items(std::string_view prompt) {
    std::size_t colon = prompt.rfind(':');
    if (colon == std::string_view::npos) return {};
    std::string_view tail = prompt.substr(colon + 1);
    std::vector<std::string> items;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= tail.size(); ++i) {
        if (i == tail.size() || tail[i] == ',') {
            std::string item = trim(tail.substr(start, i - start));
            while (!item.empty() && (item.back() == '.' || item.back() == '?')) item.pop_back();
            item = trim(item);
            if (!item.empty()) items.push_back(item);
            start = i + 1;
        }
    }
    if (items.size() < 2) return {};
    return items;
}

namespace {

// Finds the end index (one past) of a balanced JSON container starting at
// `open`, honouring string literals and escapes. npos when unbalanced.
std::size_t balanced_end(std::string_view s, std::size_t open) {
    const char open_c = s[open];
    const char close_c = (open_c == '[') ? ']' : '}';
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < s.size(); ++i) {
        char c = s[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == open_c) {
            ++depth;
        } else if (c == close_c) {
            --depth;
            if (depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

std::optional<std::string> first_balanced(std::string_view raw, char open_c) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != open_c) continue;
        std::size_t end = balanced_end(raw, i);
        if (end != std::string_view::npos) {
            return std::string(raw.substr(i, end - i));
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> first_json_array(std::string_view raw) {
    return first_balanced(raw, '[');
}

std::optional<std::string> first_json_object(std::string_view raw) {
    return first_balanced(raw, '{');
}

}  // namespace metafair::text
