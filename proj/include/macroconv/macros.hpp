#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace macroconv {

enum class DefiningCommand { Def, NewCommand, RenewCommand };

std::string_view to_string(DefiningCommand cmd);

struct MacroDefinition {
    std::string name;       // control sequence including the leading backslash
    std::string body;       // normalized
    std::string signature;  // "" for parameterless macros, "[n]" / "[n][default]" / raw \def parameter text
    std::string paper_id;
    DefiningCommand command = DefiningCommand::Def;
    std::size_t offset = 0;  // position of the defining command in the comment-stripped source

    /// Key under which synonymous bodies are grouped. Parameterized bodies only
    /// compare equal when their signatures match.
    std::string body_key() const;
};

/// Body text of a body key (drops the signature prefix, if any).
std::string_view body_of_key(std::string_view key);

struct ExtractionResult {
    std::vector<MacroDefinition> definitions;
    std::size_t skipped = 0;
};

/// Removes `%` comments up to (not including) the end of line. `\%` is kept.
std::string strip_comments(std::string_view source);

/// Every \def, \newcommand and \renewcommand definition in source order. Bodies are not
/// expanded; unparseable candidates and empty bodies are counted in `skipped`.
ExtractionResult extract_definitions(std::string_view source, std::string_view paper_id);

/// One (name, body) per name for a single paper: the last definition of a name wins, identical
/// repeats collapse. The result keeps source order of the winning definitions.
std::vector<MacroDefinition> resolve_paper_macros(std::vector<MacroDefinition> definitions);

/// Collapses whitespace runs to one space and trims. Throws std::invalid_argument on
/// unbalanced braces.
std::string normalize_body(std::string_view raw);

/// True when unescaped `{` and `}` pair up.
bool braces_balanced(std::string_view text);

struct NameFeatures {
    std::size_t length = 0;
    std::size_t non_alpha = 0;
    double frac_lower = 0.0;
    double frac_upper = 0.0;
};

struct BodyFeatures {
    std::size_t length = 0;
    std::size_t non_alpha = 0;
    std::size_t max_brace_depth = 0;
};

NameFeatures name_features(std::string_view name);
BodyFeatures body_features(std::string_view body);

}  // namespace macroconv
