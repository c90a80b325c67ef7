#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace macroconv {

/// Raised for unrecoverable input problems (missing manifest, bad arguments).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonical author key. Construct through normalize_author().
class AuthorId {
public:
    AuthorId() = default;
    static AuthorId from_normalized(std::string key) {
        AuthorId id;
        id.key_ = std::move(key);
        return id;
    }

    const std::string& str() const { return key_; }
    bool empty() const { return key_.empty(); }

    friend auto operator<=>(const AuthorId&, const AuthorId&) = default;
    friend bool operator==(const AuthorId&, const AuthorId&) = default;

private:
    std::string key_;
};

/// Case-folded, whitespace-collapsed, diacritic-stripped author key.
/// Throws InputError on empty (or all-whitespace) input.
AuthorId normalize_author(std::string_view raw);

/// A publication date that is either exact (YYYY-MM-DD) or only known to the month (YYYY-MM).
struct Timestamp {
    int year = 0;
    int month = 0;
    int day = 0;  // 0 for month-granular timestamps

    bool exact() const { return day != 0; }
    std::string to_string() const;

    static std::optional<Timestamp> parse(std::string_view text);

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

struct Paper {
    std::string id;
    Timestamp timestamp;
    std::vector<AuthorId> authors;
    std::string title;
    std::string source;
};

struct OrderedPaper {
    const Paper* paper;
    std::size_t tie_group;
};

/// Immutable, temporally ordered collection of papers.
///
/// Papers are stored sorted by (timestamp, id). Month-granular papers that share a
/// year-month form one tie group; every exact-dated paper is its own tie group. A
/// month bucket sorts before exact dates inside the same month. Two papers are
/// strictly ordered iff their tie groups differ.
class Corpus {
public:
    Corpus() = default;
    explicit Corpus(std::vector<Paper> papers);

    std::size_t size() const { return papers_.size(); }
    bool empty() const { return papers_.empty(); }

    const Paper& paper(std::size_t pos) const { return papers_[pos]; }
    const std::vector<Paper>& papers() const { return papers_; }

    std::size_t tie_group(std::size_t pos) const { return tie_groups_[pos]; }
    std::size_t tie_group_count() const { return group_count_; }
    std::size_t tie_group_size(std::size_t group) const { return group_sizes_[group]; }

    /// Strict temporal precedence; false for papers in the same tie group.
    bool strictly_before(std::size_t a, std::size_t b) const {
        return tie_groups_[a] < tie_groups_[b];
    }

    std::optional<std::size_t> find(std::string_view paper_id) const;

private:
    std::vector<Paper> papers_;
    std::vector<std::size_t> tie_groups_;
    std::vector<std::size_t> group_sizes_;
    std::size_t group_count_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Papers in temporal order paired with their tie group id.
std::vector<OrderedPaper> temporal_order(const Corpus& corpus);

struct LoadResult {
    Corpus corpus;
    std::size_t skipped = 0;
    std::vector<std::string> warnings;
};

/// Reads a newline-delimited JSON manifest. `path` may name the manifest file itself or a
/// directory containing `manifest.jsonl`. Malformed records are skipped with a warning.
LoadResult load_corpus(const std::filesystem::path& path);

/// Parses manifest lines already in memory. `base_dir` resolves `source_path` entries.
LoadResult parse_manifest(std::string_view text, const std::filesystem::path& base_dir);

/// Writes the corpus as a manifest with inline sources. Re-loading yields an equal corpus.
void write_manifest(const Corpus& corpus, const std::filesystem::path& file);
std::string manifest_line(const Paper& paper);

bool operator==(const Paper& a, const Paper& b);

}  // namespace macroconv

template <>
struct std::hash<macroconv::AuthorId> {
    std::size_t operator()(const macroconv::AuthorId& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
