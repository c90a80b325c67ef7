#pragma once

#include <string>
#include <vector>

#include "macroconv/corpus.hpp"
#include "macroconv/fights.hpp"
#include "macroconv/timeline.hpp"

namespace support {

inline macroconv::Paper paper(std::string id, std::string date, std::vector<std::string> authors,
                              std::string source = {}, std::string title = "Untitled") {
    macroconv::Paper p;
    p.id = std::move(id);
    p.timestamp = *macroconv::Timestamp::parse(date);
    for (const auto& a : authors) p.authors.push_back(macroconv::normalize_author(a));
    p.title = std::move(title);
    p.source = std::move(source);
    return p;
}

inline macroconv::AuthorId author(const std::string& raw) { return macroconv::normalize_author(raw); }

/// One occurrence per entry, each in its own paper and tie group.
inline macroconv::Timeline timeline(const std::vector<std::string>& names,
                                    const std::vector<std::string>& authors,
                                    std::string key = "body") {
    std::vector<macroconv::Occurrence> occ;
    for (std::size_t i = 0; i < names.size(); ++i)
        occ.push_back({i, i, names[i], {author(authors[i])}});
    return macroconv::Timeline(std::move(key), std::move(occ));
}

inline std::string def(const std::string& name, const std::string& body) {
    return "\\newcommand{" + name + "}{" + body + "}\n";
}

inline bool same_fight(const macroconv::FightRecord& a, const macroconv::FightRecord& b) {
    return a.paper == b.paper && a.key == b.key && a.first == b.first && a.second == b.second &&
           a.first_variant == b.first_variant && a.second_variant == b.second_variant &&
           a.used_variant == b.used_variant && a.winner == b.winner &&
           a.first_experience == b.first_experience && a.second_experience == b.second_experience &&
           a.first_prior_paper == b.first_prior_paper && a.second_prior_paper == b.second_prior_paper;
}

}  // namespace support
