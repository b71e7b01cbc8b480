#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include <json.hpp>

#include "wheelhouse/bn/serialization.hpp"
#include "wheelhouse/error.hpp"
#include "wheelhouse/structure_gen.hpp"

namespace wheelhouse {

namespace {

bool is_word_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && (std::isalnum(u) || c == '_');
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_verb(std::string_view word) {
    static const std::array<std::string_view, 6> verbs{"influence", "influences", "affect",
                                                        "affects",   "cause",      "causes"};
    const auto w = lower(word);
    return std::find(verbs.begin(), verbs.end(), w) != verbs.end();
}

enum class TokenKind { word, arrow, other };

struct Token {
    TokenKind kind;
    std::string_view text;
};

constexpr std::string_view kUnicodeArrow = "\xE2\x86\x92";

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (is_word_char(c)) {
            std::size_t j = i;
            while (j < text.size() && is_word_char(text[j])) ++j;
            tokens.push_back({TokenKind::word, text.substr(i, j - i)});
            i = j;
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            tokens.push_back({TokenKind::arrow, text.substr(i, 2)});
            i += 2;
        } else if (text.substr(i, kUnicodeArrow.size()) == kUnicodeArrow) {
            tokens.push_back({TokenKind::arrow, text.substr(i, kUnicodeArrow.size())});
            i += kUnicodeArrow.size();
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else {
            tokens.push_back({TokenKind::other, text.substr(i, 1)});
            ++i;
        }
    }
    return tokens;
}

bool operand(const Token& t) { return t.kind == TokenKind::word && !is_verb(t.text); }

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\"'`[]().;*";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

// Items after "nodes:", "variables:" or "factors:" on a single line.
std::vector<std::string> declared_nodes(std::string_view line) {
    static const std::array<std::string_view, 6> keywords{"nodes", "node", "variables", "variable",
                                                           "factors", "factor"};
    const auto low = lower(line);
    for (std::size_t pos = 0; pos < low.size(); ++pos) {
        if (pos > 0 && is_word_char(low[pos - 1])) continue;
        for (auto kw : keywords) {
            if (low.compare(pos, kw.size(), kw) != 0) continue;
            std::size_t k = pos + kw.size();
            if (k < low.size() && is_word_char(low[k])) continue;
            while (k < low.size() && (low[k] == ' ' || low[k] == '\t')) ++k;
            if (k >= low.size() || low[k] != ':') continue;
            std::vector<std::string> items;
            std::string_view rest = line.substr(k + 1);
            while (!rest.empty()) {
                const auto comma = rest.find(',');
                const auto item = trim(rest.substr(0, comma));
                if (!item.empty() && std::all_of(item.begin(), item.end(), is_word_char))
                    items.emplace_back(item);
                if (comma == std::string_view::npos) break;
                rest.remove_prefix(comma + 1);
            }
            return items;
        }
    }
    return {};
}

}  // namespace

std::vector<std::string_view> balanced_brace_spans(std::string_view text) {
    std::vector<std::string_view> spans;
    std::size_t depth = 0;
    std::size_t start = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"' && depth > 0) {
            in_string = true;
        } else if (c == '{') {
            if (depth++ == 0) start = i;
        } else if (c == '}' && depth > 0) {
            if (--depth == 0) spans.push_back(text.substr(start, i - start + 1));
        }
    }
    return spans;
}

bn::NetworkStructure parse_structured_text(std::string_view response) {
    bn::NetworkStructure s;
    std::set<std::string> seen_nodes;
    std::set<bn::Edge> seen_edges;
    auto add_node = [&](const std::string& n) {
        if (seen_nodes.insert(n).second) s.nodes.push_back(n);
    };

    std::size_t line_start = 0;
    while (line_start <= response.size()) {
        const auto nl = response.find('\n', line_start);
        const auto line = response.substr(line_start, nl == std::string_view::npos ? nl : nl - line_start);
        for (auto& n : declared_nodes(line)) add_node(n);
        if (nl == std::string_view::npos) break;
        line_start = nl + 1;
    }

    const auto tokens = tokenize(response);
    for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
        const auto& mid = tokens[i + 1];
        const bool link = mid.kind == TokenKind::arrow || (mid.kind == TokenKind::word && is_verb(mid.text));
        if (!link || !operand(tokens[i]) || !operand(tokens[i + 2])) continue;
        bn::Edge e{std::string(tokens[i].text), std::string(tokens[i + 2].text)};
        add_node(e.first);
        add_node(e.second);
        if (seen_edges.insert(e).second) s.edges.push_back(std::move(e));
    }

    if (s.nodes.empty() && s.edges.empty())
        throw ParseError("no nodes or edges found in text", {"text: no node lists or edge phrases"});
    return s;
}

bn::NetworkStructure parse_llm_response(std::string_view response) {
    std::vector<std::string> diagnostics;

    const auto spans = balanced_brace_spans(response);
    if (spans.empty()) diagnostics.emplace_back("json: no brace-delimited object");
    for (auto span : spans) {
        auto doc = nlohmann::json::parse(span.begin(), span.end(), nullptr, false);
        if (doc.is_discarded()) {
            diagnostics.emplace_back("json: object at offset " + std::to_string(span.data() - response.data()) +
                                     " is not valid JSON");
            continue;
        }
        if (!doc.is_object()) continue;
        const auto report = bn::validate_structure_json(doc);
        if (report.valid()) return bn::structure_from_json(doc);
        for (const auto& v : report.violations) diagnostics.push_back(std::string("json: ") + bn::to_string(v.code) + ": " + v.message);
    }

    try {
        auto s = parse_structured_text(response);
        const auto report = bn::validate_structure(s);
        if (report.valid()) return s;
        for (const auto& v : report.violations) diagnostics.push_back(std::string("text: ") + bn::to_string(v.code) + ": " + v.message);
    } catch (const ParseError& e) {
        for (const auto& d : e.diagnostics()) diagnostics.push_back(d);
    }
    throw ParseError("could not extract a valid network structure", std::move(diagnostics));
}

}  // namespace wheelhouse
