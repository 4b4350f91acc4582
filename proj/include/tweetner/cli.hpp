#pragma once

#include <cstdio>
#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tweetner/corpus.hpp"
#include "tweetner/eval.hpp"
#include "tweetner/features.hpp"
#include "tweetner/model.hpp"
#include "tweetner/viterbi.hpp"

// Command implementations behind the tweetner CLI: convert, train, tag, eval,
// inspect. Kept header-side so the test suite can drive them directly.
//
// Exit-code contract: 0 success, 1 decoding/evaluation failure, 2 usage or
// I/O error. Errors surface as exceptions; UsageError and IoError map to 2.

namespace tweetner::cli {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string raw_path;
    std::string iob_path;
    std::string annotation_path;
    std::string gazetteer_dir;
    std::string model_path;
    std::string output_path;
    std::string pos_cmd;        // external tagger: tokens in, one tag per line out
    std::string pos_file;       // parallel interchange-style file with a POS column
    std::string default_pos = "X";
    ModelConfig model;
    int verbosity = 1;
};

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input file: " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

// Config echo next to every produced output.
inline void write_manifest(const std::string& output_path, const std::string& command,
                           const RunConfig& cfg) {
    nlohmann::json j;
    j["command"] = command;
    j["inputs"] = nlohmann::json::object();
    if (!cfg.raw_path.empty()) j["inputs"]["raw"] = cfg.raw_path;
    if (!cfg.iob_path.empty()) j["inputs"]["iob"] = cfg.iob_path;
    if (!cfg.annotation_path.empty()) j["inputs"]["annotations"] = cfg.annotation_path;
    if (!cfg.gazetteer_dir.empty()) j["inputs"]["gazetteers"] = cfg.gazetteer_dir;
    if (!cfg.model_path.empty()) j["inputs"]["model"] = cfg.model_path;
    if (!cfg.pos_cmd.empty()) j["inputs"]["pos_cmd"] = cfg.pos_cmd;
    if (!cfg.pos_file.empty()) j["inputs"]["pos_file"] = cfg.pos_file;
    j["output"] = output_path;
    j["config"] = {{"suffix_max_len", cfg.model.suffix_max_len},
                   {"rare_threshold", cfg.model.rare_threshold},
                   {"eq7_literal", cfg.model.eq7_literal},
                   {"default_pos", cfg.default_pos}};
    std::ofstream out(output_path + ".manifest.json", std::ios::binary);
    if (out) out << j.dump(2) << '\n';
}

// Pipes one token per line through an external tagger command; expects one
// tag per line back.
inline std::vector<std::string> run_pos_command(const std::string& cmd,
                                                const std::vector<std::string>& tokens) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path();
    fs::path in_path = dir / ("tweetner-pos-in-" + std::to_string(::getpid()) + ".txt");
    fs::path out_path = dir / ("tweetner-pos-out-" + std::to_string(::getpid()) + ".txt");
    {
        std::ofstream f(in_path);
        for (const auto& t : tokens) f << t << '\n';
    }
    std::string full = cmd + " < " + in_path.string() + " > " + out_path.string();
    int rc = std::system(full.c_str());
    if (rc != 0) throw IoError("POS command failed with status " + std::to_string(rc));
    std::vector<std::string> tags;
    std::ifstream f(out_path);
    std::string line;
    while (std::getline(f, line)) tags.push_back(detail::chomp(std::move(line)));
    fs::remove(in_path);
    fs::remove(out_path);
    if (tags.size() != tokens.size())
        throw IoError("POS command returned " + std::to_string(tags.size()) + " tags for " +
                      std::to_string(tokens.size()) + " tokens");
    return tags;
}

// POS source shared by convert and tag: parallel file, external command, or
// the configured default tag.
class PosSource {
  public:
    explicit PosSource(const RunConfig& cfg) : cfg_(&cfg) {
        if (!cfg.pos_file.empty()) {
            auto in = open_input(cfg.pos_file);
            for (auto& sent : read_interchange_pos(in))
                by_tweet_[sent.first] = std::move(sent.second);
        }
    }

    std::vector<std::string> tags_for(const RawTweet& tweet, const std::vector<Token>& tokens) const {
        if (!cfg_->pos_file.empty()) {
            auto it = by_tweet_.find(tweet.tweet_id);
            if (it == by_tweet_.end())
                throw IoError("POS file has no entry for tweet " + tweet.tweet_id);
            if (it->second.size() != tokens.size())
                throw IoError("POS file entry for tweet " + tweet.tweet_id + " has " +
                              std::to_string(it->second.size()) + " tags for " +
                              std::to_string(tokens.size()) + " tokens");
            return it->second;
        }
        if (!cfg_->pos_cmd.empty()) {
            std::vector<std::string> surfaces;
            for (const auto& t : tokens) surfaces.push_back(t.surface);
            return run_pos_command(cfg_->pos_cmd, surfaces);
        }
        return std::vector<std::string>(tokens.size(), cfg_->default_pos);
    }

  private:
    // POS file reuses the interchange layout with >= 2 columns; the label
    // column, when present, is ignored.
    static std::vector<std::pair<std::string, std::vector<std::string>>> read_interchange_pos(
        std::istream& in) {
        std::vector<std::pair<std::string, std::vector<std::string>>> out;
        std::string line, id;
        std::vector<std::string> tags;
        std::size_t lineno = 0;
        auto flush = [&] {
            if (!tags.empty() || !id.empty()) out.emplace_back(std::move(id), std::move(tags));
            id.clear();
            tags.clear();
        };
        while (std::getline(in, line)) {
            ++lineno;
            line = detail::chomp(std::move(line));
            if (line.empty()) {
                flush();
                continue;
            }
            if (line.starts_with("# ")) {
                id = detail::split_tabs(line.substr(2))[0];
                continue;
            }
            auto fields = detail::split_tabs(line);
            if (fields.size() < 2)
                throw IoError("POS file: expected at least 2 columns at line " +
                              std::to_string(lineno));
            tags.push_back(fields[1]);
        }
        flush();
        return out;
    }

    const RunConfig* cfg_;
    std::map<std::string, std::vector<std::string>> by_tweet_;
};

// convert: two-file training format -> IOB interchange file.
inline int cmd_convert(const RunConfig& cfg) {
    auto raw_in = open_input(cfg.raw_path);
    std::vector<RawTweet> tweets = parse_raw_file(raw_in);
    auto ann_in = open_input(cfg.annotation_path);
    AnnotationMap spans = parse_annotation_file(ann_in);
    PosSource pos(cfg);

    std::set<std::string> known_ids;
    for (const auto& t : tweets) known_ids.insert(t.tweet_id);
    IngestReport report;
    for (const auto& [id, _] : spans)
        if (!known_ids.count(id)) {
            ++report.unknown_tweets;
            report.warn("annotation references unknown tweet_id " + id + ", skipped");
        }

    std::vector<InterchangeSentence> out_sents;
    for (const RawTweet& tweet : tweets) {
        auto it = spans.find(tweet.tweet_id);
        static const std::vector<EntitySpan> kNoSpans;
        IobSentence sent = spans_to_iob(tweet, it == spans.end() ? kNoSpans : it->second, &report);
        InterchangeSentence isent;
        isent.tweet_id = tweet.tweet_id;
        isent.user_id = tweet.user_id;
        for (const auto& tok : sent.tokens) isent.surfaces.push_back(tok.surface);
        isent.pos_tags = pos.tags_for(tweet, sent.tokens);
        isent.labels = sent.labels;
        out_sents.push_back(std::move(isent));
    }

    auto out = open_output(cfg.output_path);
    write_interchange(out, out_sents);
    write_manifest(cfg.output_path, "convert", cfg);
    if (cfg.verbosity > 0) {
        std::cerr << "convert: " << tweets.size() << " tweets, " << report.dropped_spans
                  << " spans dropped, " << report.unknown_tweets << " unknown tweet ids\n";
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    }
    return 0;
}

// train: IOB interchange file (with POS column) -> model file.
inline int cmd_train(const RunConfig& cfg) {
    auto in = open_input(cfg.iob_path);
    std::vector<InterchangeSentence> sents = read_interchange(in);
    GazetteerSet gaz = cfg.gazetteer_dir.empty() ? GazetteerSet()
                                                 : GazetteerSet::load(cfg.gazetteer_dir);

    std::vector<TrainingSentence> training;
    for (const auto& s : sents) {
        if (s.surfaces.empty()) continue;
        std::vector<Token> tokens;
        for (const auto& surf : s.surfaces) tokens.push_back({surf, 0, 0});
        training.emplace_back(featurize_sentence(tokens, s.pos_tags, gaz), s.labels);
    }
    HmmModel model = HmmModel::train(training, cfg.model);

    auto out = open_output(cfg.output_path);
    model.save(out);
    write_manifest(cfg.output_path, "train", cfg);
    if (cfg.verbosity > 0) {
        auto l = model.lambdas();
        std::cerr << "train: " << training.size() << " sentences, " << model.tags().size()
                  << " labels, vocab " << model.vocabulary_size() << ", lambdas " << l[0] << ' '
                  << l[1] << ' ' << l[2] << ", theta " << model.theta() << '\n';
    }
    return 0;
}

// tag: raw file + model -> 6-column annotation file.
inline int cmd_tag(const RunConfig& cfg) {
    auto raw_in = open_input(cfg.raw_path);
    std::vector<RawTweet> tweets = parse_raw_file(raw_in);
    auto model_in = open_input(cfg.model_path);
    HmmModel model = HmmModel::load(model_in);
    GazetteerSet gaz = cfg.gazetteer_dir.empty() ? GazetteerSet()
                                                 : GazetteerSet::load(cfg.gazetteer_dir);
    PosSource pos(cfg);
    ViterbiTables tables(model);

    AnnotationMap predictions;
    for (const RawTweet& tweet : tweets) {
        std::vector<Token> tokens = tokenize(tweet.text);
        if (tokens.empty()) continue;
        IobSentence sent = decode_tweet(tweet, pos.tags_for(tweet, tokens), gaz, tables);
        sent.labels = repair_orphan_i(sent.labels);
        auto spans = iob_to_spans(tweet.text, sent);
        if (!spans.empty()) predictions[tweet.tweet_id] = std::move(spans);
    }

    auto out = open_output(cfg.output_path);
    emit_annotation_file(out, tweets, predictions);
    write_manifest(cfg.output_path, "tag", cfg);
    if (cfg.verbosity > 0) {
        std::size_t n = 0;
        for (const auto& [_, s] : predictions) n += s.size();
        std::cerr << "tag: " << tweets.size() << " tweets, " << n << " entities\n";
    }
    return 0;
}

// eval: gold + predicted annotation files -> report on stdout.
inline int cmd_eval(const std::string& gold_path, const std::string& pred_path, bool machine,
                    std::ostream& out = std::cout) {
    auto gold_in = open_input(gold_path);
    AnnotationMap gold = parse_annotation_file(gold_in);
    auto pred_in = open_input(pred_path);
    AnnotationMap pred = parse_annotation_file(pred_in);
    EvalReport report = score(gold, pred);
    if (machine) render_machine(out, report);
    else render_report(out, report);
    if (report.duplicate_predictions > 0)
        std::cerr << "warning: " << report.duplicate_predictions
                  << " duplicate predicted spans counted once\n";
    return 0;
}

// inspect: probe a model file. Queries:
//   trans <prev2> <prev1>          transition row
//   emit <word> <xtag> <metatag>   emission row for a known triplet
//   suffix <word> <xtag> <metatag> suffix-model distribution for a triplet
inline int cmd_inspect(const std::string& model_path, const std::vector<std::string>& query,
                       std::ostream& out = std::cout) {
    auto model_in = open_input(model_path);
    HmmModel model = HmmModel::load(model_in);
    const auto& tags = model.tags();

    if (query.size() == 3 && query[0] == "trans") {
        for (int t = 0; t < tags.total_size(); ++t) {
            if (t == tags.start1() || t == tags.start2()) continue;
            out << tags.label(t) << '\t' << model.transition_prob(query[1], query[2], tags.label(t))
                << '\n';
        }
        return 0;
    }
    if (query.size() == 4 && (query[0] == "emit" || query[0] == "suffix")) {
        std::string key = observation_key({query[1], query[2], query[3]});
        bool known = model.has_key(key);
        if (query[0] == "emit" && !known) {
            out << "(unknown key; suffix-model scores)\n";
        }
        for (int t = 0; t < tags.size(); ++t) {
            double v = (query[0] == "emit" && known) ? model.emission_prob(key, t)
                                                     : model.suffix_prob(key, t);
            out << tags.label(t) << '\t' << v << '\n';
        }
        return 0;
    }
    throw UsageError("inspect: expected 'trans <t2> <t1>', 'emit <word> <xtag> <meta>' or "
                     "'suffix <word> <xtag> <meta>'");
}

}  // namespace tweetner::cli
