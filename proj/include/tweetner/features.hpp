#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tweetner/corpus.hpp"
#include "tweetner/utf8.hpp"

// Token-level feature tagging: the meta-tag rule cascade over surface shape
// and the gazetteer-backed X-tag that overrides the POS tag on a list hit.

namespace tweetner {

enum class MetaTag {
    YYYY,  // default
    ICAP,  // initial capital
    ABBR,  // abbreviation
    CHAS,  // '#' then capital
    HASH,  // leading '#'
    ATSY,  // leading '@'
    CCOL,  // trailing ':' with initial capital
    COLN,  // trailing ':'
    CHYP,  // hyphen with initial capital
    HYPH,  // hyphen at index >= 3
    DFOR,  // exactly 4 digits
    DTWO,  // exactly 2 digits
    DONE,  // exactly 1 digit
    DIGT,  // contains a digit
    DCOM,  // one comma and a digit
    CLCO,  // trailing comma with initial capital
    LCOM,  // trailing comma
    CMCO,  // several commas with initial capital
    ALDT,  // all dots
};

inline constexpr std::array<std::string_view, 19> kMetaTagNames = {
    "YYYY", "ICAP", "ABBR", "CHAS", "HASH", "ATSY", "CCOL", "COLN", "CHYP", "HYPH",
    "DFOR", "DTWO", "DONE", "DIGT", "DCOM", "CLCO", "LCOM", "CMCO", "ALDT"};

inline std::string_view to_string(MetaTag tag) {
    return kMetaTagNames[static_cast<std::size_t>(tag)];
}

// Surface-shape rule cascade. Every block is evaluated in order and a matching
// block overwrites the current meta-tag; the value after the last block wins.
// Capital letters and digits are ASCII.
inline MetaTag assign_meta_tag(std::string_view surface) {
    if (surface.empty()) throw std::invalid_argument("assign_meta_tag: empty token");
    const std::vector<char32_t> cps = utf8::decode(surface);
    const std::size_t n = cps.size();
    const char32_t first = cps.front();
    const char32_t last = cps.back();
    const bool first_cap = utf8::is_ascii_upper(first);

    std::size_t digits = 0, commas = 0, letters = 0;
    bool all_digits = true, all_dots = true, abbr_chars = true;
    std::size_t first_hyphen = n;  // n = no hyphen
    for (std::size_t i = 0; i < n; ++i) {
        char32_t c = cps[i];
        if (utf8::is_ascii_digit(c)) ++digits;
        else all_digits = false;
        if (c == U',') ++commas;
        if (c != U'.') all_dots = false;
        if (utf8::is_ascii_upper(c)) ++letters;
        else if (c != U'.') abbr_chars = false;
        if (c == U'-' && first_hyphen == n) first_hyphen = i;
    }
    // Abbreviation: >= 2 chars, only uppercase letters and periods, at least
    // one letter ("U.S.", "BJP").
    const bool is_abbr = n >= 2 && abbr_chars && letters > 0;

    MetaTag tag = MetaTag::YYYY;
    if (first_cap) tag = MetaTag::ICAP;
    if (is_abbr) tag = MetaTag::ABBR;
    if (first == U'#' && n >= 2 && utf8::is_ascii_upper(cps[1])) tag = MetaTag::CHAS;
    else if (first == U'#') tag = MetaTag::HASH;
    if (first == U'@') tag = MetaTag::ATSY;
    if (last == U':' && first_cap) tag = MetaTag::CCOL;
    else if (last == U':') tag = MetaTag::COLN;
    if (first_hyphen < n && first_cap) tag = MetaTag::CHYP;
    else if (first_hyphen < n && first_hyphen >= 3) tag = MetaTag::HYPH;
    if (n == 4 && all_digits) tag = MetaTag::DFOR;
    else if (n == 2 && all_digits) tag = MetaTag::DTWO;
    else if (n == 1 && all_digits) tag = MetaTag::DONE;
    else if (digits > 0) tag = MetaTag::DIGT;
    if (commas == 1 && digits > 0) tag = MetaTag::DCOM;
    else if (last == U',' && first_cap) tag = MetaTag::CLCO;
    else if (last == U',') tag = MetaTag::LCOM;
    else if (commas > 1 && first_cap) tag = MetaTag::CMCO;
    if (all_dots) tag = MetaTag::ALDT;
    return tag;
}

// Gazetteer codes in cascade order; these are reserved words disjoint from
// POS tags.
inline constexpr std::array<std::string_view, 10> kGazetteerCodes = {
    "BPER", "IPER", "BLOC", "ILOC", "FACI", "MONT", "DAYS", "PERD", "COUN", "MONY"};

inline constexpr std::array<std::string_view, 10> kGazetteerFiles = {
    "bperson.txt", "iperson.txt",   "blocation.txt", "ilocation.txt", "facilities.txt",
    "months.txt",  "days.txt",      "period.txt",    "count_expr.txt", "monetary.txt"};

inline bool is_gazetteer_code(std::string_view tag) {
    return std::find(kGazetteerCodes.begin(), kGazetteerCodes.end(), tag) != kGazetteerCodes.end();
}

// Ten case-folded word lists, checked in cascade order. Immutable after load.
class GazetteerSet {
  public:
    GazetteerSet() = default;

    // Directory layout: gaz/bperson.txt ... gaz/monetary.txt, one entry per
    // line, '#' comments allowed. Missing files load as empty lists.
    static GazetteerSet load(const std::filesystem::path& dir) {
        GazetteerSet gaz;
        for (std::size_t i = 0; i < kGazetteerFiles.size(); ++i) {
            std::filesystem::path file = dir / kGazetteerFiles[i];
            if (!std::filesystem::exists(file)) continue;
            std::ifstream in(file);
            if (!in) throw std::runtime_error("cannot open gazetteer file " + file.string());
            std::string line;
            while (std::getline(in, line)) {
                line = detail::chomp(std::move(line));
                if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
                while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
                std::size_t start = line.find_first_not_of(" \t");
                if (start == std::string::npos) continue;
                gaz.add(i, line.substr(start));
            }
        }
        return gaz;
    }

    void add(std::size_t list_index, std::string_view entry) {
        lists_.at(list_index).insert(utf8::fold_case(entry));
    }
    void add(std::string_view code, std::string_view entry) {
        auto it = std::find(kGazetteerCodes.begin(), kGazetteerCodes.end(), code);
        if (it == kGazetteerCodes.end())
            throw std::invalid_argument("unknown gazetteer code " + std::string(code));
        add(static_cast<std::size_t>(it - kGazetteerCodes.begin()), entry);
    }

    // First list containing the (already folded) word, or npos.
    std::size_t find(const std::string& folded_word) const {
        for (std::size_t i = 0; i < lists_.size(); ++i)
            if (lists_[i].count(folded_word)) return i;
        return npos;
    }

    std::size_t list_size(std::size_t i) const { return lists_.at(i).size(); }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  private:
    std::array<std::set<std::string>, 10> lists_;
};

// Lookup form of a token: strip ",.:#@" (all occurrences, only when the raw
// token has >= 2 characters), then case fold.
inline std::string gazetteer_lookup_key(std::string_view surface) {
    std::vector<char32_t> cps = utf8::decode(surface);
    std::string out;
    if (cps.size() >= 2) {
        for (char32_t c : cps) {
            if (c == U',' || c == U'.' || c == U':' || c == U'#' || c == U'@') continue;
            utf8::encode_to(utf8::ascii_lower(c), out);
        }
    } else {
        for (char32_t c : cps) utf8::encode_to(utf8::ascii_lower(c), out);
    }
    return out;
}

// X-tag: the gazetteer code of the first list containing the token, else the
// POS tag.
inline std::string assign_x_tag(std::string_view surface, std::string_view pos_tag,
                                const GazetteerSet& gaz) {
    if (pos_tag.empty()) throw std::invalid_argument("assign_x_tag: empty POS tag");
    std::string key = gazetteer_lookup_key(surface);
    if (!key.empty()) {
        if (std::size_t i = gaz.find(key); i != GazetteerSet::npos)
            return std::string(kGazetteerCodes[i]);
    }
    return std::string(pos_tag);
}

// U+241F SYMBOL FOR UNIT SEPARATOR, the reserved joiner for observation keys.
inline constexpr std::string_view kObservationSep = "\xE2\x90\x9F";

// The triplet observation symbol <word, X-tag, meta-tag>.
struct PseudoToken {
    std::string word;
    std::string x_tag;
    std::string meta_tag;

    bool operator==(const PseudoToken&) const = default;
};

inline std::vector<PseudoToken> featurize_sentence(const std::vector<Token>& tokens,
                                                   const std::vector<std::string>& pos_tags,
                                                   const GazetteerSet& gaz) {
    if (tokens.size() != pos_tags.size())
        throw std::invalid_argument("featurize_sentence: tokens.len != pos_tags.len");
    std::vector<PseudoToken> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].surface.find(kObservationSep) != std::string::npos ||
            pos_tags[i].find(kObservationSep) != std::string::npos)
            throw std::runtime_error("token or POS tag contains the reserved separator U+241F");
        out.push_back({tokens[i].surface, assign_x_tag(tokens[i].surface, pos_tags[i], gaz),
                       std::string(to_string(assign_meta_tag(tokens[i].surface)))});
    }
    return out;
}

}  // namespace tweetner
