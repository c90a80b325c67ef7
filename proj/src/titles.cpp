#include "macroconv/titles.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "title_lexicon_data.hpp"

namespace macroconv {

namespace {

std::optional<WordClass> parse_class(std::string_view name) {
    if (name == "noun") return WordClass::Noun;
    if (name == "verb") return WordClass::Verb;
    if (name == "adjective") return WordClass::Adjective;
    if (name == "determiner") return WordClass::Determiner;
    if (name == "other") return WordClass::Other;
    return std::nullopt;
}

std::vector<std::string> split_words(std::string_view line) {
    std::vector<std::string> out;
    std::istringstream in{std::string(line)};
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

char ascii_lower(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32) : c; }

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || c == '-' || c == '\'' || static_cast<unsigned char>(c) >= 0x80;
}

}  // namespace

std::string_view to_string(TitleStyleKind kind) {
    switch (kind) {
        case TitleStyleKind::Colon: return "colon";
        case TitleStyleKind::QuestionMark: return "question";
        case TitleStyleKind::Math: return "math";
        case TitleStyleKind::FirstNoun: return "noun";
        case TitleStyleKind::FirstVerb: return "verb";
        case TitleStyleKind::FirstAdjective: return "adjective";
        case TitleStyleKind::FirstDeterminer: return "determiner";
    }
    return "colon";
}

std::optional<TitleStyleKind> parse_title_style(std::string_view name) {
    for (auto k : kAllTitleStyles)
        if (to_string(k) == name) return k;
    return std::nullopt;
}

bool TitleStyle::operator[](TitleStyleKind kind) const {
    switch (kind) {
        case TitleStyleKind::Colon: return has_colon;
        case TitleStyleKind::QuestionMark: return has_question_mark;
        case TitleStyleKind::Math: return has_math;
        case TitleStyleKind::FirstNoun: return first_noun;
        case TitleStyleKind::FirstVerb: return first_verb;
        case TitleStyleKind::FirstAdjective: return first_adjective;
        case TitleStyleKind::FirstDeterminer: return first_determiner;
    }
    return false;
}

const Lexicon& Lexicon::builtin() {
    static const Lexicon lexicon = parse(detail::kBuiltinTitleLexicon);
    return lexicon;
}

Lexicon Lexicon::parse(std::string_view text) {
    Lexicon lex;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        auto words = split_words(line);
        if (words.empty()) continue;
        const bool suffix = words[0] == "suffix";
        const std::size_t first = suffix ? 2 : 1;
        auto cls = words.size() > (suffix ? 1u : 0u) ? parse_class(words[first - 1]) : std::nullopt;
        if (!cls)
            throw std::invalid_argument("lexicon line " + std::to_string(line_no) +
                                        ": unknown word class");
        for (std::size_t i = first; i < words.size(); ++i) {
            std::string w = words[i];
            std::transform(w.begin(), w.end(), w.begin(), ascii_lower);
            if (suffix)
                lex.suffixes_.emplace_back(std::move(w), *cls);
            else
                lex.words_.try_emplace(std::move(w), *cls);
        }
    }
    std::stable_sort(lex.suffixes_.begin(), lex.suffixes_.end(),
                     [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::invalid_argument("cannot open lexicon " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

WordClass Lexicon::classify(std::string_view raw) const {
    std::string word;
    for (char c : raw) word.push_back(ascii_lower(c));
    while (!word.empty() && !is_word_char(word.back())) word.pop_back();
    std::size_t lead = 0;
    while (lead < word.size() && !is_word_char(word[lead])) ++lead;
    word.erase(0, lead);
    if (word.empty()) return WordClass::Unknown;

    if (auto it = words_.find(word); it != words_.end()) return it->second;
    if (word.size() > 3 && word.back() == 's') {
        if (auto it = words_.find(word.substr(0, word.size() - 1)); it != words_.end())
            return it->second;
    }
    for (const auto& [suffix, cls] : suffixes_) {
        if (word.size() > suffix.size() + 1 &&
            word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0)
            return cls;
    }
    return WordClass::Unknown;
}

TitleStyle classify_title(std::string_view title, const Lexicon& lexicon) {
    TitleStyle style;
    style.has_colon = title.find(':') != std::string_view::npos;
    style.has_question_mark = title.find('?') != std::string_view::npos;
    style.has_math = title.find('$') != std::string_view::npos ||
                     (title.find('\\') != std::string_view::npos &&
                      title.find('\\') + 1 < title.size());

    const auto begin = title.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return style;
    auto end = title.find_first_of(" \t\r\n", begin);
    auto first = title.substr(begin, end == std::string_view::npos ? end : end - begin);
    if (first.front() == '$' || first.front() == '\\') return style;

    switch (lexicon.classify(first)) {
        case WordClass::Noun: style.first_noun = true; break;
        case WordClass::Verb: style.first_verb = true; break;
        case WordClass::Adjective: style.first_adjective = true; break;
        case WordClass::Determiner: style.first_determiner = true; break;
        case WordClass::Other:
        case WordClass::Unknown: break;
    }
    return style;
}

}  // namespace macroconv
