#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace macroconv {

enum class TitleStyleKind {
    Colon,
    QuestionMark,
    Math,
    FirstNoun,
    FirstVerb,
    FirstAdjective,
    FirstDeterminer,
};

inline constexpr std::array<TitleStyleKind, 7> kAllTitleStyles = {
    TitleStyleKind::Colon,     TitleStyleKind::QuestionMark,   TitleStyleKind::Math,
    TitleStyleKind::FirstNoun, TitleStyleKind::FirstVerb,      TitleStyleKind::FirstAdjective,
    TitleStyleKind::FirstDeterminer,
};

std::string_view to_string(TitleStyleKind kind);
std::optional<TitleStyleKind> parse_title_style(std::string_view name);

struct TitleStyle {
    bool has_colon = false;
    bool has_question_mark = false;
    bool has_math = false;
    bool first_noun = false;
    bool first_verb = false;
    bool first_adjective = false;
    bool first_determiner = false;

    bool operator[](TitleStyleKind kind) const;
};

enum class WordClass { Unknown, Other, Noun, Verb, Adjective, Determiner };

/// Closed-class word lists plus suffix rules for first-word classification.
class Lexicon {
public:
    static const Lexicon& builtin();
    /// Throws std::invalid_argument on a malformed line.
    static Lexicon parse(std::string_view text);
    static Lexicon load(const std::filesystem::path& file);

    WordClass classify(std::string_view word) const;

private:
    std::unordered_map<std::string, WordClass> words_;
    std::vector<std::pair<std::string, WordClass>> suffixes_;  // longest first
};

TitleStyle classify_title(std::string_view title, const Lexicon& lexicon = Lexicon::builtin());

}  // namespace macroconv
