#include "macroconv/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "latin_fold_table.hpp"
#include "macroconv/utf8.hpp"

namespace macroconv {

namespace {

bool is_space(char32_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' ||
           c == 0x00A0 || c == 0x2009 || c == 0x202F || c == 0x3000;
}

bool is_combining_mark(char32_t c) {
    return (c >= 0x0300 && c <= 0x036F) || (c >= 0x1AB0 && c <= 0x1AFF) ||
           (c >= 0x1DC0 && c <= 0x1DFF) || (c >= 0x20D0 && c <= 0x20FF) ||
           (c >= 0xFE20 && c <= 0xFE2F);
}

const char* fold_latin(char32_t c) {
    const auto& table = detail::kLatinFold;
    auto it = std::lower_bound(table.begin(), table.end(), c,
                               [](const detail::FoldEntry& e, char32_t v) { return e.code < v; });
    if (it != table.end() && it->code == c) return it->ascii;
    return nullptr;
}

char32_t lower_other(char32_t c) {
    if (c >= 'A' && c <= 'Z') return c + 0x20;
    if (c >= 0x0391 && c <= 0x03A9 && c != 0x03A2) return c + 0x20;  // Greek
    if (c >= 0x0410 && c <= 0x042F) return c + 0x20;                  // Cyrillic
    if (c >= 0x0400 && c <= 0x040F) return c + 0x50;
    return c;
}

bool parse_int(std::string_view text, int& out) {
    if (text.empty()) return false;
    for (char c : text)
        if (c < '0' || c > '9') return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return month == 2 && leap ? 29 : kDays[month - 1];
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError("cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

AuthorId normalize_author(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (std::size_t pos = 0; pos < raw.size();) {
        const char32_t c = utf8::next(raw, pos);
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (is_combining_mark(c)) continue;
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        if (const char* folded = fold_latin(c)) {
            out += folded;
        } else {
            utf8::append(out, lower_other(c));
        }
    }
    if (out.empty()) throw InputError("author name is empty");
    return AuthorId::from_normalized(std::move(out));
}

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
    if (text.size() != 7 && text.size() != 10) return std::nullopt;
    if (text[4] != '-') return std::nullopt;
    Timestamp ts;
    if (!parse_int(text.substr(0, 4), ts.year) || !parse_int(text.substr(5, 2), ts.month))
        return std::nullopt;
    if (ts.month < 1 || ts.month > 12) return std::nullopt;
    if (text.size() == 10) {
        if (text[7] != '-' || !parse_int(text.substr(8, 2), ts.day)) return std::nullopt;
        if (ts.day < 1 || ts.day > days_in_month(ts.year, ts.month)) return std::nullopt;
    }
    return ts;
}

std::string Timestamp::to_string() const {
    char buf[16];
    if (exact())
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    else
        std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

Corpus::Corpus(std::vector<Paper> papers) : papers_(std::move(papers)) {
    std::sort(papers_.begin(), papers_.end(), [](const Paper& a, const Paper& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.id < b.id;
    });
    tie_groups_.resize(papers_.size());
    for (std::size_t i = 0; i < papers_.size(); ++i) {
        if (!index_.emplace(papers_[i].id, i).second)
            throw InputError("duplicate paper id " + papers_[i].id);
        const auto& ts = papers_[i].timestamp;
        const bool joins_previous =
            i > 0 && !ts.exact() && papers_[i - 1].timestamp == ts;
        if (i == 0) {
            tie_groups_[i] = 0;
        } else {
            tie_groups_[i] = joins_previous ? tie_groups_[i - 1] : tie_groups_[i - 1] + 1;
        }
        if (!joins_previous) group_sizes_.push_back(0);
        ++group_sizes_.back();
    }
    group_count_ = group_sizes_.size();
}

std::optional<std::size_t> Corpus::find(std::string_view paper_id) const {
    auto it = index_.find(std::string(paper_id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<OrderedPaper> temporal_order(const Corpus& corpus) {
    std::vector<OrderedPaper> out;
    out.reserve(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i)
        out.push_back({&corpus.paper(i), corpus.tie_group(i)});
    return out;
}

bool operator==(const Paper& a, const Paper& b) {
    return a.id == b.id && a.timestamp == b.timestamp && a.authors == b.authors &&
           a.title == b.title && a.source == b.source;
}

namespace {

// Returns an error description, or empty on success.
std::string parse_record(const nlohmann::json& rec, const std::filesystem::path& base_dir,
                         Paper& out) {
    if (!rec.is_object()) return "record is not an object";
    auto text_field = [&](const char* key, std::string& dst) -> bool {
        auto it = rec.find(key);
        if (it == rec.end() || !it->is_string()) return false;
        dst = it->get<std::string>();
        return true;
    };
    if (!text_field("id", out.id) || out.id.empty()) return "missing or empty id";

    std::string date;
    if (!text_field("date", date)) return "missing date";
    auto ts = Timestamp::parse(date);
    if (!ts) return "malformed date '" + date + "'";
    out.timestamp = *ts;

    auto authors = rec.find("authors");
    if (authors == rec.end() || !authors->is_array() || authors->empty())
        return "authors must be a non-empty array";
    std::set<AuthorId> seen;
    for (const auto& a : *authors) {
        if (!a.is_string()) return "author entry is not a string";
        AuthorId id;
        try {
            id = normalize_author(a.get<std::string>());
        } catch (const InputError&) {
            return "empty author name";
        }
        if (!seen.insert(id).second) return "duplicate author '" + id.str() + "'";
        out.authors.push_back(std::move(id));
    }

    if (!text_field("title", out.title)) return "missing title";

    if (!text_field("source", out.source)) {
        std::string rel;
        if (!text_field("source_path", rel)) return "missing source or source_path";
        try {
            out.source = read_file(base_dir / rel);
        } catch (const InputError& e) {
            return e.what();
        }
    }
    return {};
}

}  // namespace

LoadResult parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
    LoadResult result;
    std::vector<Paper> papers;
    std::set<std::string> ids;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) {
            if (end == text.size()) break;
            continue;
        }

        std::string error;
        Paper paper;
        try {
            error = parse_record(nlohmann::json::parse(line), base_dir, paper);
        } catch (const nlohmann::json::exception& e) {
            error = std::string("invalid JSON: ") + e.what();
        }
        if (error.empty() && !ids.insert(paper.id).second)
            error = "duplicate paper id '" + paper.id + "'";
        if (!error.empty()) {
            ++result.skipped;
            result.warnings.push_back("line " + std::to_string(line_no) + ": " + error);
        } else {
            papers.push_back(std::move(paper));
        }
        if (end == text.size()) break;
    }
    result.corpus = Corpus(std::move(papers));
    return result;
}

LoadResult load_corpus(const std::filesystem::path& path) {
    std::filesystem::path manifest = path;
    if (std::filesystem::is_directory(path)) manifest = path / "manifest.jsonl";
    if (!std::filesystem::is_regular_file(manifest))
        throw InputError("manifest not found: " + manifest.string());
    return parse_manifest(read_file(manifest), manifest.parent_path());
}

std::string manifest_line(const Paper& paper) {
    nlohmann::ordered_json rec;
    rec["id"] = paper.id;
    rec["date"] = paper.timestamp.to_string();
    auto& authors = rec["authors"] = nlohmann::ordered_json::array();
    for (const auto& a : paper.authors) authors.push_back(a.str());
    rec["title"] = paper.title;
    rec["source"] = paper.source;
    return rec.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

void write_manifest(const Corpus& corpus, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw InputError("cannot write " + file.string());
    for (const auto& p : corpus.papers()) out << manifest_line(p) << '\n';
}

}  // namespace macroconv
