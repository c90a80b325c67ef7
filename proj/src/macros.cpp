#include "macroconv/macros.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>

#include "macroconv/utf8.hpp"

namespace macroconv {

namespace {

constexpr std::size_t kMaxParameterText = 80;

bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

/// Cursor over comment-stripped TeX source.
class Scanner {
public:
    explicit Scanner(std::string_view text) : text_(text) {}

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_spaces() {
        while (!at_end() && is_space(text_[pos_])) ++pos_;
    }

    // Reads a control sequence at the cursor: backslash plus letters, or backslash plus one
    // (possibly multi-byte) character.
    std::optional<std::string> control_sequence() {
        if (peek() != '\\' || pos_ + 1 >= text_.size()) return std::nullopt;
        std::size_t end = pos_ + 1;
        if (is_letter(text_[end])) {
            while (end < text_.size() && is_letter(text_[end])) ++end;
        } else {
            utf8::next(text_, end);
        }
        std::string cs(text_.substr(pos_, end - pos_));
        pos_ = end;
        return cs;
    }

    // With the cursor on `{`, returns the text between it and its matching `}` and moves past
    // the closing brace.
    std::optional<std::string_view> braced_group() {
        if (peek() != '{') return std::nullopt;
        int depth = 0;
        for (std::size_t i = pos_; i < text_.size(); ++i) {
            const char c = text_[i];
            if (c == '\\') {
                ++i;
                continue;
            }
            if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    auto inner = text_.substr(pos_ + 1, i - pos_ - 1);
                    pos_ = i + 1;
                    return inner;
                }
            }
        }
        return std::nullopt;
    }

    // With the cursor on `[`, returns the bracketed text (braces protect nested `]`).
    std::optional<std::string_view> bracket_group() {
        if (peek() != '[') return std::nullopt;
        int depth = 0;
        for (std::size_t i = pos_ + 1; i < text_.size(); ++i) {
            const char c = text_[i];
            if (c == '\\') {
                ++i;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth < 0) return std::nullopt;
            } else if (c == ']' && depth == 0) {
                auto inner = text_.substr(pos_ + 1, i - pos_ - 1);
                pos_ = i + 1;
                return inner;
            }
        }
        return std::nullopt;
    }

    std::string_view slice(std::size_t from, std::size_t to) const {
        return text_.substr(from, to - from);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

std::string collapse_spaces(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending = false;
    for (char c : raw) {
        if (is_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) {
            out.push_back(' ');
            pending = false;
        }
        out.push_back(c);
    }
    return out;
}

// `#1#2...#n` becomes "[n]"; other parameter texts are kept with whitespace removed.
std::optional<std::string> def_signature(std::string_view params) {
    std::string compact;
    for (char c : params)
        if (!is_space(c)) compact.push_back(c);
    if (compact.empty()) return std::string{};
    if (compact.size() % 2 == 0) {
        bool sequential = true;
        for (std::size_t i = 0; i < compact.size(); i += 2) {
            if (compact[i] != '#' || compact[i + 1] != static_cast<char>('1' + i / 2)) {
                sequential = false;
                break;
            }
        }
        if (sequential && compact.size() / 2 <= 9)
            return "[" + std::to_string(compact.size() / 2) + "]";
    }
    for (std::size_t i = 0; i < compact.size(); ++i) {
        if (compact[i] == '#' && (i + 1 >= compact.size() || compact[i + 1] < '1' ||
                                  compact[i + 1] > '9'))
            return std::nullopt;
    }
    return compact;
}

std::optional<MacroDefinition> parse_def(Scanner& sc) {
    sc.skip_spaces();
    auto name = sc.control_sequence();
    if (!name) return std::nullopt;
    const std::size_t params_begin = sc.pos();
    while (!sc.at_end() && sc.peek() != '{') {
        const char c = sc.peek();
        if (c == '}' || sc.pos() - params_begin > kMaxParameterText) return std::nullopt;
        if (c == '\\') {
            if (!sc.control_sequence()) return std::nullopt;
        } else {
            sc.seek(sc.pos() + 1);
        }
    }
    auto params = sc.slice(params_begin, sc.pos());
    if (params.find("\n\n") != std::string_view::npos) return std::nullopt;
    auto signature = def_signature(params);
    if (!signature) return std::nullopt;
    auto body = sc.braced_group();
    if (!body) return std::nullopt;
    MacroDefinition def;
    def.name = std::move(*name);
    def.body = normalize_body(*body);
    def.signature = std::move(*signature);
    def.command = DefiningCommand::Def;
    return def;
}

std::optional<MacroDefinition> parse_newcommand(Scanner& sc, DefiningCommand cmd) {
    if (sc.peek() == '*') sc.seek(sc.pos() + 1);
    sc.skip_spaces();
    std::optional<std::string> name;
    if (sc.peek() == '{') {
        auto group = sc.braced_group();
        if (!group) return std::nullopt;
        Scanner inner(*group);
        inner.skip_spaces();
        name = inner.control_sequence();
        inner.skip_spaces();
        if (!name || !inner.at_end()) return std::nullopt;
    } else {
        name = sc.control_sequence();
        if (!name) return std::nullopt;
    }

    std::string signature;
    sc.skip_spaces();
    if (sc.peek() == '[') {
        auto arity = sc.bracket_group();
        if (!arity) return std::nullopt;
        auto n = collapse_spaces(*arity);
        if (n.size() != 1 || n[0] < '0' || n[0] > '9') return std::nullopt;
        sc.skip_spaces();
        if (n[0] != '0') signature = "[" + n + "]";
        if (sc.peek() == '[') {
            auto dflt = sc.bracket_group();
            if (!dflt || signature.empty()) return std::nullopt;
            signature += "[" + collapse_spaces(*dflt) + "]";
            sc.skip_spaces();
        }
    }
    auto body = sc.braced_group();
    if (!body) return std::nullopt;
    MacroDefinition def;
    def.name = std::move(*name);
    def.body = normalize_body(*body);
    def.signature = std::move(signature);
    def.command = cmd;
    return def;
}

}  // namespace

std::string_view to_string(DefiningCommand cmd) {
    switch (cmd) {
        case DefiningCommand::Def: return "def";
        case DefiningCommand::NewCommand: return "newcommand";
        case DefiningCommand::RenewCommand: return "renewcommand";
    }
    return "def";
}

std::string MacroDefinition::body_key() const {
    if (signature.empty()) return body;
    return signature + '\x1f' + body;
}

std::string_view body_of_key(std::string_view key) {
    const auto sep = key.find('\x1f');
    return sep == std::string_view::npos ? key : key.substr(sep + 1);
}

std::string strip_comments(std::string_view source) {
    std::string out;
    out.reserve(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        const char c = source[i];
        if (c == '\\' && i + 1 < source.size()) {
            out.push_back(c);
            out.push_back(source[++i]);
        } else if (c == '%') {
            while (i + 1 < source.size() && source[i + 1] != '\n') ++i;
        } else {
            out.push_back(c);
        }
    }
    return out;
}

ExtractionResult extract_definitions(std::string_view source, std::string_view paper_id) {
    const std::string text = strip_comments(source);
    ExtractionResult result;
    Scanner sc(text);
    while (!sc.at_end()) {
        if (sc.peek() != '\\') {
            sc.seek(sc.pos() + 1);
            continue;
        }
        const std::size_t start = sc.pos();
        auto cs = sc.control_sequence();
        if (!cs) break;
        std::optional<MacroDefinition> def;
        bool candidate = true;
        if (*cs == "\\def") {
            def = parse_def(sc);
        } else if (*cs == "\\newcommand") {
            def = parse_newcommand(sc, DefiningCommand::NewCommand);
        } else if (*cs == "\\renewcommand") {
            def = parse_newcommand(sc, DefiningCommand::RenewCommand);
        } else {
            candidate = false;
        }
        if (!candidate) continue;
        if (!def || def->body.empty()) {
            ++result.skipped;
            sc.seek(start + cs->size());
            continue;
        }
        def->paper_id = std::string(paper_id);
        def->offset = start;
        result.definitions.push_back(std::move(*def));
    }
    return result;
}

std::vector<MacroDefinition> resolve_paper_macros(std::vector<MacroDefinition> definitions) {
    std::map<std::string, std::size_t> last;
    for (std::size_t i = 0; i < definitions.size(); ++i) last[definitions[i].name] = i;
    std::vector<MacroDefinition> out;
    out.reserve(last.size());
    for (std::size_t i = 0; i < definitions.size(); ++i)
        if (last[definitions[i].name] == i) out.push_back(std::move(definitions[i]));
    return out;
}

bool braces_balanced(std::string_view text) {
    long depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\\') {
            ++i;
        } else if (text[i] == '{') {
            ++depth;
        } else if (text[i] == '}' && --depth < 0) {
            return false;
        }
    }
    return depth == 0;
}

std::string normalize_body(std::string_view raw) {
    if (!braces_balanced(raw)) throw std::invalid_argument("unbalanced braces in macro body");
    return collapse_spaces(raw);
}

NameFeatures name_features(std::string_view name) {
    NameFeatures f;
    std::size_t lower = 0, upper = 0;
    for (std::size_t pos = 0; pos < name.size();) {
        const char32_t c = utf8::next(name, pos);
        ++f.length;
        if (c >= 'a' && c <= 'z') {
            ++lower;
        } else if (c >= 'A' && c <= 'Z') {
            ++upper;
        } else {
            ++f.non_alpha;
        }
    }
    if (f.length > 0) {
        f.frac_lower = static_cast<double>(lower) / static_cast<double>(f.length);
        f.frac_upper = static_cast<double>(upper) / static_cast<double>(f.length);
    }
    return f;
}

BodyFeatures body_features(std::string_view body) {
    BodyFeatures f;
    std::size_t depth = 0;
    bool escaped = false;
    for (std::size_t pos = 0; pos < body.size();) {
        const char32_t c = utf8::next(body, pos);
        ++f.length;
        const bool letter = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
        if (!letter) ++f.non_alpha;
        if (escaped) {
            escaped = false;
            continue;
        }
        if (c == '\\') {
            escaped = true;
        } else if (c == '{') {
            f.max_brace_depth = std::max(f.max_brace_depth, ++depth);
        } else if (c == '}' && depth > 0) {
            --depth;
        }
    }
    return f;
}

}  // namespace macroconv
