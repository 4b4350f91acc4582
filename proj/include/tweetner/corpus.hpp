#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tweetner/utf8.hpp"

// Corpus handling: the two-file tweet format (raw text + span annotations),
// whitespace tokenization with character offsets, conversion between span
// annotations and IOB token labels, and the CoNLL-style interchange file.

namespace tweetner {

struct RawTweet {
    std::string tweet_id;
    std::string user_id;
    std::string text;
};

struct EntitySpan {
    std::string ne_tag;
    std::string raw_string;
    std::size_t start_index = 0;  // character offset, 0-based per tweet
    std::size_t length = 0;       // character count, >= 1

    std::size_t end_index() const { return start_index + length; }

    bool operator==(const EntitySpan&) const = default;
};

struct Token {
    std::string surface;
    std::size_t start = 0;  // character offsets, [start, end)
    std::size_t end = 0;

    bool operator==(const Token&) const = default;
};

inline const std::string kOutsideLabel = "O";

inline bool is_begin_label(std::string_view label) { return label.starts_with("B-"); }
inline bool is_inside_label(std::string_view label) { return label.starts_with("I-"); }

// Entity type of a B-/I- label ("B-LOCATION" -> "LOCATION").
inline std::string_view label_type(std::string_view label) {
    if (is_begin_label(label) || is_inside_label(label)) return label.substr(2);
    return {};
}

struct IobSentence {
    std::vector<Token> tokens;
    std::vector<std::string> labels;
    std::vector<std::string> pos_tags;  // optional, parallel to tokens when present

    IobSentence() = default;
    IobSentence(std::vector<Token> toks, std::vector<std::string> labs)
        : tokens(std::move(toks)), labels(std::move(labs)) {
        if (tokens.size() != labels.size())
            throw std::invalid_argument("IobSentence: labels.len != tokens.len");
    }
};

// Counters for annotation quirks tolerated during ingest.
struct IngestReport {
    std::size_t dropped_spans = 0;     // spans overlapping no token
    std::size_t unknown_tweets = 0;    // annotation rows for absent tweet ids
    std::vector<std::string> warnings;

    void warn(std::string msg) {
        warnings.push_back(std::move(msg));
    }
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        std::size_t tab = line.find('\t', pos);
        if (tab == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
    return fields;
}

inline std::string chomp(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace detail

// Raw file: one tweet per line, 3 tab-separated fields (tweet_id, user_id, text).
inline std::vector<RawTweet> parse_raw_file(std::istream& in) {
    std::vector<RawTweet> tweets;
    std::map<std::string, std::size_t> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::chomp(std::move(line));
        if (line.empty()) continue;
        auto fields = detail::split_tabs(line);
        if (fields.size() != 3)
            throw std::runtime_error("raw file: expected 3 fields at line " +
                                     std::to_string(lineno) + ", got " +
                                     std::to_string(fields.size()));
        if (fields[0].empty())
            throw std::runtime_error("raw file: empty tweet_id at line " + std::to_string(lineno));
        if (auto [it, inserted] = seen.emplace(fields[0], lineno); !inserted)
            throw std::runtime_error("raw file: duplicate tweet_id '" + fields[0] + "' at line " +
                                     std::to_string(lineno) + " (first at line " +
                                     std::to_string(it->second) + ")");
        tweets.push_back({fields[0], fields[1], fields[2]});
    }
    return tweets;
}

// Annotation file: 6 tab-separated columns per row:
// tweet_id, user_id, NE-tag, NE raw string, start index, length.
inline std::map<std::string, std::vector<EntitySpan>> parse_annotation_file(std::istream& in) {
    std::map<std::string, std::vector<EntitySpan>> spans;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::chomp(std::move(line));
        if (line.empty()) continue;
        auto fields = detail::split_tabs(line);
        if (fields.size() != 6)
            throw std::runtime_error("annotation file: expected 6 columns at line " +
                                     std::to_string(lineno) + ", got " +
                                     std::to_string(fields.size()));
        long start, length;
        try {
            std::size_t used;
            start = std::stol(fields[4], &used);
            if (used != fields[4].size()) throw std::invalid_argument(fields[4]);
            length = std::stol(fields[5], &used);
            if (used != fields[5].size()) throw std::invalid_argument(fields[5]);
        } catch (const std::exception&) {
            throw std::runtime_error("annotation file: non-integer index/length at line " +
                                     std::to_string(lineno));
        }
        if (start < 0)
            throw std::runtime_error("annotation file: negative start index at line " +
                                     std::to_string(lineno));
        if (length < 1)
            throw std::runtime_error("annotation file: length must be >= 1 at line " +
                                     std::to_string(lineno));
        spans[fields[0]].push_back({fields[2], fields[3], static_cast<std::size_t>(start),
                                    static_cast<std::size_t>(length)});
    }
    for (auto& [id, list] : spans)
        std::stable_sort(list.begin(), list.end(),
                         [](const EntitySpan& a, const EntitySpan& b) {
                             return a.start_index < b.start_index;
                         });
    return spans;
}

// Whitespace tokenization: maximal runs of non-space characters, offsets in
// code points, surfaces untouched (punctuation, '#', '@' kept).
inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t byte = 0, ch = 0;
    std::size_t tok_start_byte = 0, tok_start_ch = 0;
    bool in_token = false;
    while (byte < text.size()) {
        std::size_t next = byte;
        char32_t cp = utf8::decode_at(text, next);
        if (utf8::is_space(cp)) {
            if (in_token) {
                tokens.push_back({std::string(text.substr(tok_start_byte, byte - tok_start_byte)),
                                  tok_start_ch, ch});
                in_token = false;
            }
        } else if (!in_token) {
            in_token = true;
            tok_start_byte = byte;
            tok_start_ch = ch;
        }
        byte = next;
        ++ch;
    }
    if (in_token)
        tokens.push_back({std::string(text.substr(tok_start_byte)), tok_start_ch, ch});
    return tokens;
}

// Validates span invariants against the owning tweet text. Returns an error
// message, or empty when the span is consistent.
inline std::string check_span(const RawTweet& tweet, const EntitySpan& span) {
    std::size_t text_len = utf8::length(tweet.text);
    if (span.end_index() > text_len)
        return "span [" + std::to_string(span.start_index) + "+" + std::to_string(span.length) +
               ") exceeds text length " + std::to_string(text_len) + " in tweet " + tweet.tweet_id;
    std::string actual = utf8::substr_chars(tweet.text, span.start_index, span.end_index());
    if (actual != span.raw_string)
        return "span raw string mismatch in tweet " + tweet.tweet_id + ": annotation has '" +
               span.raw_string + "', text has '" + actual + "'";
    return {};
}

// Span annotations -> IOB labels. A token partially covered by a span belongs
// to it; the first covered token gets B-XXX, the rest I-XXX. Spans covering no
// token are dropped with a warning in the report.
inline IobSentence spans_to_iob(const RawTweet& tweet, const std::vector<EntitySpan>& spans,
                                IngestReport* report = nullptr) {
    std::vector<Token> tokens = tokenize(tweet.text);
    std::vector<std::string> labels(tokens.size(), kOutsideLabel);

    std::vector<EntitySpan> sorted = spans;
    std::sort(sorted.begin(), sorted.end(),
              [](const EntitySpan& a, const EntitySpan& b) { return a.start_index < b.start_index; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].start_index < sorted[i - 1].end_index())
            throw std::runtime_error("overlapping spans in tweet " + tweet.tweet_id);

    for (const EntitySpan& span : sorted) {
        if (std::string err = check_span(tweet, span); !err.empty())
            throw std::runtime_error(err);
        bool first = true;
        bool hit = false;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (tokens[i].start < span.end_index() && tokens[i].end > span.start_index) {
                labels[i] = (first ? "B-" : "I-") + span.ne_tag;
                first = false;
                hit = true;
            }
        }
        if (!hit) {
            if (report) {
                ++report->dropped_spans;
                report->warn("tweet " + tweet.tweet_id + ": span '" + span.raw_string +
                             "' overlaps no token, dropped");
            }
        }
    }
    return IobSentence(std::move(tokens), std::move(labels));
}

// IOB labels -> span annotations; inverse of spans_to_iob for token-aligned
// spans. Orphan I-XXX labels are an error (run repair_orphan_i first).
inline std::vector<EntitySpan> iob_to_spans(std::string_view text, const IobSentence& sentence) {
    std::vector<EntitySpan> spans;
    const auto& toks = sentence.tokens;
    const auto& labs = sentence.labels;
    std::size_t i = 0;
    while (i < labs.size()) {
        if (is_inside_label(labs[i]))
            throw std::runtime_error("orphan I- label '" + labs[i] + "' at token " +
                                     std::to_string(i));
        if (!is_begin_label(labs[i])) {
            ++i;
            continue;
        }
        std::string type(label_type(labs[i]));
        std::size_t start = toks[i].start;
        std::size_t end = toks[i].end;
        ++i;
        while (i < labs.size() && is_inside_label(labs[i])) {
            if (label_type(labs[i]) != type)
                throw std::runtime_error("orphan I- label '" + labs[i] + "' at token " +
                                         std::to_string(i) + " after entity of type " + type);
            end = toks[i].end;
            ++i;
        }
        spans.push_back({type, utf8::substr_chars(text, start, end), start, end - start});
    }
    return spans;
}

// 6-column output, tweet order then start_index.
inline void emit_annotation_file(std::ostream& out, const std::vector<RawTweet>& tweets,
                                 const std::map<std::string, std::vector<EntitySpan>>& spans) {
    for (const RawTweet& tweet : tweets) {
        auto it = spans.find(tweet.tweet_id);
        if (it == spans.end()) continue;
        std::vector<EntitySpan> sorted = it->second;
        std::sort(sorted.begin(), sorted.end(),
                  [](const EntitySpan& a, const EntitySpan& b) {
                      return a.start_index < b.start_index;
                  });
        for (const EntitySpan& s : sorted)
            out << tweet.tweet_id << '\t' << tweet.user_id << '\t' << s.ne_tag << '\t'
                << s.raw_string << '\t' << s.start_index << '\t' << s.length << '\n';
    }
}

// CoNLL-style interchange file: "surface<TAB>POS<TAB>label" per token, blank
// line between tweets, optional "# tweet_id<TAB>user_id" comment per tweet.
struct InterchangeSentence {
    std::string tweet_id;
    std::string user_id;
    std::vector<std::string> surfaces;
    std::vector<std::string> pos_tags;
    std::vector<std::string> labels;
};

inline void write_interchange(std::ostream& out, const std::vector<InterchangeSentence>& sents) {
    for (const auto& s : sents) {
        if (!s.tweet_id.empty()) out << "# " << s.tweet_id << '\t' << s.user_id << '\n';
        for (std::size_t i = 0; i < s.surfaces.size(); ++i)
            out << s.surfaces[i] << '\t' << s.pos_tags[i] << '\t' << s.labels[i] << '\n';
        out << '\n';
    }
}

inline std::vector<InterchangeSentence> read_interchange(std::istream& in) {
    std::vector<InterchangeSentence> sents;
    InterchangeSentence cur;
    std::string line;
    std::size_t lineno = 0;
    auto flush = [&] {
        if (!cur.surfaces.empty() || !cur.tweet_id.empty()) sents.push_back(std::move(cur));
        cur = {};
    };
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::chomp(std::move(line));
        if (line.empty()) {
            flush();
            continue;
        }
        if (line.starts_with("# ")) {
            auto fields = detail::split_tabs(line.substr(2));
            cur.tweet_id = fields[0];
            if (fields.size() > 1) cur.user_id = fields[1];
            continue;
        }
        auto fields = detail::split_tabs(line);
        if (fields.size() != 3)
            throw std::runtime_error("interchange file: expected 3 columns at line " +
                                     std::to_string(lineno) + ", got " +
                                     std::to_string(fields.size()));
        cur.surfaces.push_back(fields[0]);
        cur.pos_tags.push_back(fields[1]);
        cur.labels.push_back(fields[2]);
    }
    flush();
    return sents;
}

}  // namespace tweetner
