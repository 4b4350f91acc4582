// Acceptance suite: one self-contained check per release criterion, each
// printing a single PASS/FAIL line. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "support/oracle.hpp"
#include "support/synthetic.hpp"
#include "tweetner/cli.hpp"
#include "tweetner/corpus.hpp"
#include "tweetner/eval.hpp"
#include "tweetner/features.hpp"
#include "tweetner/model.hpp"
#include "tweetner/viterbi.hpp"

using namespace tweetner;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

// ---------------------------------------------------------------------------
// 1. Viterbi agrees with exhaustive enumeration on >= 1000 random models.

void criterion_decoder_exactness() {
    constexpr int kIterations = 1000;
    constexpr double kTol = 1e-9;
    std::mt19937 rng(424201);
    auto t0 = std::chrono::steady_clock::now();
    int checked = 0;
    std::string detail;
    bool ok = true;
    for (int iter = 0; iter < kIterations && ok; ++iter) {
        int num_tags = std::uniform_int_distribution<int>(2, 4)(rng);
        int vocab = std::uniform_int_distribution<int>(2, 5)(rng);
        HmmModel model = HmmModel::train(testing::random_corpus(rng, num_tags, vocab));
        ViterbiTables tables(model);
        std::vector<std::string> keys = testing::random_keys(rng, vocab, 6);

        testing::BruteForceResult brute = testing::brute_force_decode(keys, model);
        ViterbiResult vit = viterbi_indices(keys, tables);
        double attained = testing::sequence_log_score(keys, vit.tag_indices, model);
        if (std::abs(vit.log_score - brute.log_score) > kTol ||
            std::abs(attained - vit.log_score) > kTol) {
            ok = false;
            detail = "mismatch at iteration " + std::to_string(iter) + " (viterbi " +
                     std::to_string(vit.log_score) + ", enumeration " +
                     std::to_string(brute.log_score) + ")";
        }
        ++checked;
    }
    double elapsed = seconds_since(t0);
    if (ok && elapsed >= 60.0) {
        ok = false;
        detail = "exceeded the 60 s budget";
    }
    if (ok)
        detail = std::to_string(checked) + " random models within 1e-9 in " +
                 format_percent(elapsed) + " s";
    report(1, "decoder matches exhaustive search", ok, detail);
}

// ---------------------------------------------------------------------------
// 2. Distributional laws: lambdas sum to 1, transition rows over seen
//    contexts are stochastic, every suffix distribution is stochastic.

bool check_smoothing_laws(const HmmModel& model, std::string& detail) {
    const auto& l = model.lambdas();
    if (std::abs(l[0] + l[1] + l[2] - 1.0) > 1e-12 || l[0] < 0 || l[1] < 0 || l[2] < 0) {
        detail = "interpolation weights do not form a distribution";
        return false;
    }
    const auto& counts = model.counts();
    const int total = counts.tags.total_size();
    for (const auto& [ctx, c] : counts.bigram) {
        if (c <= 0 || ctx.second == counts.tags.end_tag()) continue;
        double sum = 0.0;
        for (int t = 0; t < total; ++t) sum += model.transition_prob(ctx.first, ctx.second, t);
        if (std::abs(sum - 1.0) > 1e-9) {
            detail = "transition row (" + counts.tags.label(ctx.first) + ", " +
                     counts.tags.label(ctx.second) + ") sums to " + std::to_string(sum);
            return false;
        }
    }
    for (const auto& [suffix, dist] : model.suffix_table()) {
        double sum = 0.0;
        for (double p : dist) sum += p;
        if (std::abs(sum - 1.0) > 1e-9) {
            detail = "suffix distribution sums to " + std::to_string(sum);
            return false;
        }
    }
    return true;
}

void criterion_smoothing_laws() {
    std::string detail;
    bool ok = true;
    std::mt19937 rng(77003);
    int rows = 0;
    for (int iter = 0; iter < 50 && ok; ++iter) {
        HmmModel model = HmmModel::train(testing::random_corpus(
            rng, std::uniform_int_distribution<int>(2, 5)(rng), 4));
        ok = check_smoothing_laws(model, detail);
        rows += static_cast<int>(model.counts().bigram.size());
    }
    if (ok) {
        testing::SyntheticCorpus gen(5150);
        GazetteerSet gaz = gen.gazetteers();
        std::vector<TrainingSentence> training;
        for (const auto& s : gen.sample(300)) {
            std::vector<Token> toks;
            std::size_t off = 0;
            for (const auto& w : s.words) {
                toks.push_back({w, off, off + utf8::length(w)});
                off += utf8::length(w) + 1;
            }
            std::vector<std::string> labels;
            for (int l : s.labels) labels.push_back(testing::SyntheticCorpus::label_names()[l]);
            training.push_back({featurize_sentence(toks, s.pos, gaz), repair_orphan_i(labels)});
        }
        HmmModel model = HmmModel::train(training);
        ok = check_smoothing_laws(model, detail);
        rows += static_cast<int>(model.counts().bigram.size());
    }
    if (ok)
        detail = "51 models, " + std::to_string(rows) + " transition contexts checked";
    report(2, "smoothed distributions are stochastic", ok, detail);
}

// ---------------------------------------------------------------------------
// 3. Shape-rule cascade and gazetteer lookup conformance.

void criterion_rule_cascade() {
    const std::vector<std::pair<std::string, MetaTag>> witnesses = {
        {"hello", MetaTag::YYYY},  {"Delhi", MetaTag::ICAP},  {"U.S.", MetaTag::ABBR},
        {"BJP", MetaTag::ABBR},    {"#Delhi", MetaTag::CHAS}, {"#delhi", MetaTag::HASH},
        {"@user", MetaTag::ATSY},  {"Time:", MetaTag::CCOL},  {"time:", MetaTag::COLN},
        {"Co-op", MetaTag::CHYP},  {"cooper-x", MetaTag::HYPH}, {"2015", MetaTag::DFOR},
        {"15", MetaTag::DTWO},     {"7", MetaTag::DONE},      {"a1b2", MetaTag::DIGT},
        {"1,000", MetaTag::DCOM},  {"Modi,", MetaTag::CLCO},  {"modi,", MetaTag::LCOM},
        {"A,b,c", MetaTag::CMCO},  {"...", MetaTag::ALDT},
        // later blocks overwrite earlier matches
        {"@user1", MetaTag::DIGT}, {"#FIFA2015", MetaTag::DIGT}, {"Delhi:", MetaTag::CCOL},
    };
    bool ok = true;
    std::string detail;
    for (const auto& [surface, expected] : witnesses) {
        MetaTag got = assign_meta_tag(surface);
        if (got != expected) {
            ok = false;
            detail = "'" + surface + "' tagged " + std::string(to_string(got)) + ", expected " +
                     std::string(to_string(expected));
            break;
        }
    }
    if (ok) {
        // punctuation is stripped before gazetteer lookup
        GazetteerSet gaz;
        gaz.add("BPER", "Ram");
        if (assign_x_tag("#Ram,", "NNP", gaz) != "BPER") {
            ok = false;
            detail = "'#Ram,' did not resolve to BPER after stripping";
        } else if (assign_x_tag("#Ram,", "NNP", GazetteerSet()) != "NNP") {
            ok = false;
            detail = "missing gazetteer entry must fall back to the POS tag";
        }
    }
    if (ok) detail = std::to_string(witnesses.size()) + " witnesses plus lookup stripping";
    report(3, "shape-rule cascade conformance", ok, detail);
}

// ---------------------------------------------------------------------------
// 4. Span <-> IOB round trip on random token-aligned annotations, plus
//    lossless annotation-file parse/emit.

void criterion_iob_round_trip() {
    std::mt19937 rng(90125);
    const std::vector<std::string> types = {"PERSON", "LOCATION", "ORGANIZATION", "COUNT"};
    bool ok = true;
    std::string detail;
    std::vector<RawTweet> tweets;
    AnnotationMap all_spans;
    for (int iter = 0; iter < 1000 && ok; ++iter) {
        int n = std::uniform_int_distribution<int>(1, 12)(rng);
        std::string text;
        for (int i = 0; i < n; ++i) {
            if (i) text += ' ';
            int len = std::uniform_int_distribution<int>(1, 5)(rng);
            for (int j = 0; j < len; ++j)
                text += static_cast<char>('a' + std::uniform_int_distribution<int>(0, 25)(rng));
        }
        RawTweet tweet{"T" + std::to_string(iter), "U1", text};
        auto toks = tokenize(text);

        std::vector<EntitySpan> spans;
        std::size_t next_tok = 0;
        while (next_tok < toks.size()) {
            if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
                std::size_t last =
                    std::min(toks.size() - 1,
                             next_tok + std::uniform_int_distribution<std::size_t>(0, 2)(rng));
                std::size_t start = toks[next_tok].start;
                std::size_t end = toks[last].end;
                spans.push_back(
                    {types[std::uniform_int_distribution<std::size_t>(0, types.size() - 1)(rng)],
                     utf8::substr_chars(text, start, end), start, end - start});
                next_tok = last + 2;
            } else {
                ++next_tok;
            }
        }
        auto sent = spans_to_iob(tweet, spans);
        auto back = iob_to_spans(text, sent);
        if (back != spans) {
            ok = false;
            detail = "round trip diverged for tweet " + tweet.tweet_id;
        }
        tweets.push_back(tweet);
        if (!spans.empty()) all_spans[tweet.tweet_id] = spans;
    }
    if (ok) {
        std::ostringstream out;
        emit_annotation_file(out, tweets, all_spans);
        std::istringstream back(out.str());
        AnnotationMap reparsed = parse_annotation_file(back);
        std::ostringstream out2;
        emit_annotation_file(out2, tweets, reparsed);
        if (reparsed != all_spans || out2.str() != out.str()) {
            ok = false;
            detail = "annotation file parse/emit is not lossless";
        } else {
            detail = "1000 random tweets round-tripped, file format lossless";
        }
    }
    report(4, "span/IOB conversion is invertible", ok, detail);
}

// ---------------------------------------------------------------------------
// 5. Orphan continuation repair: hand case, idempotence, and the repaired
//    output is always well-formed.

void criterion_repair() {
    bool ok = repair_orphan_i({"O", "I-LOC", "I-LOC", "O"}) ==
              std::vector<std::string>{"O", "O", "O", "O"};
    std::string detail = ok ? "" : "hand case [O, I-LOC, I-LOC, O] not cleared to all O";

    std::mt19937 rng(31337);
    const std::vector<std::string> alphabet = {"O", "B-PER", "I-PER", "B-LOC", "I-LOC"};
    for (int iter = 0; iter < 1000 && ok; ++iter) {
        int n = std::uniform_int_distribution<int>(1, 14)(rng);
        std::vector<std::string> labels;
        for (int i = 0; i < n; ++i)
            labels.push_back(
                alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]);
        auto repaired = repair_orphan_i(labels);
        if (repair_orphan_i(repaired) != repaired) {
            ok = false;
            detail = "repair is not idempotent";
            break;
        }
        std::size_t raw_entities = 0, kept = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (is_begin_label(labels[i]) && repaired[i] != labels[i]) {
                ok = false;
                detail = "repair modified a B- label";
            }
            if (labels[i] != "O") ++raw_entities;
            if (repaired[i] != "O") ++kept;
        }
        if (ok && kept > raw_entities) {
            ok = false;
            detail = "repair introduced entity labels";
        }
        if (ok) {
            std::string text;
            for (int i = 0; i < n; ++i) {
                if (i) text += ' ';
                text += 'a';
            }
            try {
                iob_to_spans(text, IobSentence(tokenize(text), repaired));
            } catch (const std::exception& e) {
                ok = false;
                detail = std::string("repaired sequence still malformed: ") + e.what();
            }
        }
    }
    if (ok) detail = "1000 random sequences repaired to well-formed output";
    report(5, "orphan continuation repair", ok, detail);
}

// ---------------------------------------------------------------------------
// 6. Entity scorer: pinned hand case, identity, and precision/recall duality.

void criterion_scorer() {
    bool ok = true;
    std::string detail;

    AnnotationMap gold, pred;
    gold["T1"] = {{"PERSON", "Modi", 0, 4}, {"LOCATION", "Delhi", 10, 5}};
    pred["T1"] = {{"PERSON", "Modi", 0, 4}, {"LOCATION", "elhi", 11, 4}};
    EvalReport r = score(gold, pred);
    std::ostringstream machine;
    render_machine(machine, r);
    if (machine.str().find("OVERALL\t50.00\t50.00\t50.00\n") == std::string::npos) {
        ok = false;
        detail = "boundary-mismatch hand case did not score 50.00/50.00/50.00";
    }

    std::mt19937 rng(60706);
    for (int iter = 0; iter < 100 && ok; ++iter) {
        auto random_map = [&rng] {
            AnnotationMap m;
            int tweets = std::uniform_int_distribution<int>(1, 6)(rng);
            for (int t = 0; t < tweets; ++t) {
                std::vector<EntitySpan>& spans = m["T" + std::to_string(t)];
                std::set<std::pair<std::size_t, std::string>> used;
                int k = std::uniform_int_distribution<int>(0, 4)(rng);
                for (int s = 0; s < k; ++s) {
                    std::size_t start = std::uniform_int_distribution<std::size_t>(0, 30)(rng);
                    std::string type = std::uniform_int_distribution<int>(0, 1)(rng) ? "PERSON"
                                                                                     : "LOCATION";
                    if (!used.insert({start, type}).second) continue;
                    spans.push_back({type, "x", start,
                                     std::uniform_int_distribution<std::size_t>(1, 5)(rng)});
                }
                if (spans.empty()) m.erase("T" + std::to_string(t));
            }
            return m;
        };
        AnnotationMap g = random_map(), p = random_map();
        EvalReport self = score(g, g);
        if (!g.empty() &&
            (self.overall.precision() != 100.0 || self.overall.recall() != 100.0 ||
             self.overall.f_measure() != 100.0)) {
            ok = false;
            detail = "scoring a set against itself is not perfect";
            break;
        }
        EvalReport fwd = score(g, p), rev = score(p, g);
        if (std::abs(fwd.overall.precision() - rev.overall.recall()) > 1e-9 ||
            std::abs(fwd.overall.recall() - rev.overall.precision()) > 1e-9) {
            ok = false;
            detail = "precision/recall duality violated under argument swap";
            break;
        }
    }
    if (ok) detail = "hand case, identity and duality over 100 random annotation sets";
    report(6, "entity-level scorer", ok, detail);
}

// ---------------------------------------------------------------------------
// 7. End-to-end quality on a synthetic corpus with a known generating
//    process; thresholds are first verified attainable by the Bayes-optimal
//    decoder for that process.

struct LabeledSet {
    std::vector<std::vector<std::string>> words, pos, labels;
};

LabeledSet take(testing::SyntheticCorpus& gen, std::size_t n) {
    LabeledSet set;
    for (const auto& s : gen.sample(n)) {
        std::vector<std::string> labels;
        for (int l : s.labels) labels.push_back(testing::SyntheticCorpus::label_names()[l]);
        set.words.push_back(s.words);
        set.pos.push_back(s.pos);
        // the sampler can emit stray continuations; the reference labeling is
        // the repaired sequence
        set.labels.push_back(repair_orphan_i(labels));
    }
    return set;
}

std::vector<Token> as_tokens(const std::vector<std::string>& words) {
    std::vector<Token> toks;
    std::size_t off = 0;
    for (const auto& w : words) {
        toks.push_back({w, off, off + utf8::length(w)});
        off += utf8::length(w) + 1;
    }
    return toks;
}

std::string joined(const std::vector<std::string>& words) {
    std::string text;
    for (const auto& w : words) {
        if (!text.empty()) text += ' ';
        text += w;
    }
    return text;
}

void criterion_end_to_end_quality() {
    constexpr double kTokenAccuracyFloor = 0.90;
    constexpr double kEntityFFloor = 70.0;
    auto t0 = std::chrono::steady_clock::now();
    testing::SyntheticCorpus gen(20150814);
    GazetteerSet gaz = gen.gazetteers();
    LabeledSet train = take(gen, 2000);
    LabeledSet test = take(gen, 500);

    auto evaluate = [&](auto&& tagger, double& token_acc, double& entity_f) {
        std::size_t tokens = 0, correct = 0;
        AnnotationMap gold, pred;
        for (std::size_t i = 0; i < test.words.size(); ++i) {
            std::vector<std::string> out = repair_orphan_i(tagger(i));
            const std::vector<std::string>& ref = test.labels[i];
            for (std::size_t j = 0; j < ref.size(); ++j) {
                ++tokens;
                if (out[j] == ref[j]) ++correct;
            }
            std::string text = joined(test.words[i]);
            std::string id = "S" + std::to_string(i);
            auto toks = tokenize(text);
            auto gold_spans = iob_to_spans(text, IobSentence(toks, ref));
            auto pred_spans = iob_to_spans(text, IobSentence(toks, out));
            if (!gold_spans.empty()) gold[id] = gold_spans;
            if (!pred_spans.empty()) pred[id] = pred_spans;
        }
        token_acc = static_cast<double>(correct) / static_cast<double>(tokens);
        entity_f = score(gold, pred).overall.f_measure();
    };

    // The Bayes-optimal decoder over the true process must clear the
    // thresholds, otherwise they would be unattainable by construction.
    double oracle_acc = 0.0, oracle_f = 0.0;
    evaluate(
        [&](std::size_t i) {
            std::vector<std::string> labels;
            for (int l : gen.bayes_optimal_decode(test.words[i]))
                labels.push_back(testing::SyntheticCorpus::label_names()[l]);
            return labels;
        },
        oracle_acc, oracle_f);

    std::vector<TrainingSentence> training;
    for (std::size_t i = 0; i < train.words.size(); ++i)
        training.push_back(
            {featurize_sentence(as_tokens(train.words[i]), train.pos[i], gaz), train.labels[i]});
    HmmModel model = HmmModel::train(training);
    ViterbiTables tables(model);

    double acc = 0.0, f = 0.0;
    evaluate(
        [&](std::size_t i) {
            return viterbi(featurize_sentence(as_tokens(test.words[i]), test.pos[i], gaz), tables);
        },
        acc, f);

    double elapsed = seconds_since(t0);
    bool ok = oracle_acc >= kTokenAccuracyFloor && oracle_f >= kEntityFFloor;
    std::string detail;
    if (!ok) {
        detail = "thresholds unattainable even for the true-process decoder (accuracy " +
                 format_percent(100.0 * oracle_acc) + ", F " + format_percent(oracle_f) + ")";
    } else if (acc < kTokenAccuracyFloor || f < kEntityFFloor || elapsed >= 300.0) {
        ok = false;
        detail = "trained tagger: token accuracy " + format_percent(100.0 * acc) + "%, entity F " +
                 format_percent(f) + " in " + format_percent(elapsed) + " s";
    } else {
        detail = "token accuracy " + format_percent(100.0 * acc) + "% (oracle " +
                 format_percent(100.0 * oracle_acc) + "%), entity F " + format_percent(f) +
                 " (oracle " + format_percent(oracle_f) + ") in " + format_percent(elapsed) + " s";
    }
    report(7, "end-to-end quality on a synthetic corpus", ok, detail);
}

// ---------------------------------------------------------------------------
// 8. Determinism: training and tagging twice from the same inputs produce
//    byte-identical model and output files.

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("tweetner-acceptance-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path file(const std::string& name) const { return path / name; }
};

void criterion_determinism() {
    bool ok = true;
    std::string detail;
    try {
        TempDir dir;
        testing::SyntheticCorpus gen(8086);
        LabeledSet data = take(gen, 300);

        std::vector<InterchangeSentence> sentences;
        std::string raw, pos;
        for (std::size_t i = 0; i < data.words.size(); ++i) {
            std::string id = "T" + std::to_string(i);
            sentences.push_back({id, "U1", data.words[i], data.pos[i], data.labels[i]});
            raw += id + "\tU1\t" + joined(data.words[i]) + "\n";
            pos += "# " + id + "\tU1\n";
            for (std::size_t j = 0; j < data.words[i].size(); ++j)
                pos += data.words[i][j] + "\t" + data.pos[i][j] + "\n";
            pos += "\n";
        }
        {
            std::ofstream iob(dir.file("train.iob"));
            write_interchange(iob, sentences);
            std::ofstream(dir.file("raw.txt")) << raw;
            std::ofstream(dir.file("pos.txt")) << pos;
        }
        fs::create_directories(dir.file("gaz"));
        // no gazetteer entries needed; an empty directory exercises the
        // POS-only fallback path deterministically

        cli::RunConfig train_cfg;
        train_cfg.verbosity = 0;
        train_cfg.iob_path = dir.file("train.iob");
        train_cfg.gazetteer_dir = dir.file("gaz");
        train_cfg.output_path = dir.file("model.tnm");

        cli::RunConfig tag_cfg;
        tag_cfg.verbosity = 0;
        tag_cfg.raw_path = dir.file("raw.txt");
        tag_cfg.model_path = dir.file("model.tnm");
        tag_cfg.gazetteer_dir = dir.file("gaz");
        tag_cfg.pos_file = dir.file("pos.txt");
        tag_cfg.output_path = dir.file("pred.ann");

        cli::cmd_train(train_cfg);
        cli::cmd_tag(tag_cfg);
        std::string model1 = read_bytes(dir.file("model.tnm"));
        std::string pred1 = read_bytes(dir.file("pred.ann"));

        cli::cmd_train(train_cfg);
        cli::cmd_tag(tag_cfg);
        if (read_bytes(dir.file("model.tnm")) != model1) {
            ok = false;
            detail = "retraining produced a different model file";
        } else if (read_bytes(dir.file("pred.ann")) != pred1) {
            ok = false;
            detail = "re-tagging produced different output";
        } else if (model1.empty() || pred1.empty()) {
            ok = false;
            detail = "empty model or prediction file";
        } else {
            // a reloaded model answers identically to the in-memory one
            std::ifstream in(dir.file("model.tnm"));
            HmmModel reloaded = HmmModel::load(in);
            std::ostringstream resaved;
            reloaded.save(resaved);
            if (resaved.str() != model1) {
                ok = false;
                detail = "load/save is not the identity on the model file";
            } else {
                detail = "model and output byte-identical across runs; load/save stable";
            }
        }
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(8, "training and tagging are deterministic", ok, detail);
}

// ---------------------------------------------------------------------------
// 9. Throughput: 10,000 tweets of ~15 tokens against a 43-label inventory in
//    under 30 seconds, single-threaded.

void criterion_throughput() {
    constexpr int kTypes = 21;  // O + B/I per type = 43 labels
    std::mt19937 rng(300992);

    std::vector<std::string> labels = {"O"};
    for (int i = 0; i < kTypes; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "T%02d", i);
        labels.push_back(std::string("B-") + buf);
        labels.push_back(std::string("I-") + buf);
    }
    auto word_for = [](int label, int j) {
        return "w" + std::to_string(label) + "x" + std::to_string(j);
    };
    constexpr int kPoolSize = 30;
    auto sample_next = [&rng](int prev, int types) {
        double r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        auto random_begin = [&] {
            return 1 + 2 * std::uniform_int_distribution<int>(0, types - 1)(rng);
        };
        if (prev == 0) return r < 0.6 ? 0 : random_begin();
        if (prev % 2 == 1) {  // B-
            if (r < 0.5) return 0;
            if (r < 0.8) return prev + 1;
            return random_begin();
        }
        if (r < 0.6) return 0;  // I-
        if (r < 0.8) return prev;
        return random_begin();
    };
    auto sample_sentence = [&](int len) {
        std::pair<std::vector<int>, std::vector<PseudoToken>> out;
        int prev = 0;
        for (int i = 0; i < len; ++i) {
            int l = sample_next(prev, kTypes);
            out.first.push_back(l);
            out.second.push_back(
                {word_for(l, std::uniform_int_distribution<int>(0, kPoolSize - 1)(rng)),
                 l == 0 ? "NN" : "NNP", l == 0 ? "YYYY" : "ICAP"});
            prev = l;
        }
        return out;
    };

    std::vector<TrainingSentence> training;
    for (int s = 0; s < 3000; ++s) {
        auto [lab, obs] = sample_sentence(std::uniform_int_distribution<int>(10, 18)(rng));
        std::vector<std::string> names;
        for (int l : lab) names.push_back(labels[l]);
        training.push_back({obs, repair_orphan_i(names)});
    }
    HmmModel model = HmmModel::train(training);
    bool ok = model.tags().size() == 43;
    std::string detail = ok ? "" : "expected a 43-label inventory, got " +
                                       std::to_string(model.tags().size());

    if (ok) {
        std::vector<std::vector<std::string>> batch;
        for (int s = 0; s < 10000; ++s) {
            auto [lab, obs] = sample_sentence(15);
            std::vector<std::string> keys;
            for (const auto& p : obs) keys.push_back(observation_key(p));
            batch.push_back(std::move(keys));
        }
        auto t0 = std::chrono::steady_clock::now();
        ViterbiTables tables(model);
        std::size_t decoded_tokens = 0;
        for (const auto& keys : batch) {
            ViterbiResult r = viterbi_indices(keys, tables);
            decoded_tokens += r.tag_indices.size();
        }
        double elapsed = seconds_since(t0);
        if (decoded_tokens != 150000) {
            ok = false;
            detail = "decoder dropped tokens";
        } else if (elapsed >= 30.0) {
            ok = false;
            detail = "10,000 tweets took " + format_percent(elapsed) + " s";
        } else {
            detail = "10,000 tweets (150,000 tokens, 43 labels) in " + format_percent(elapsed) +
                     " s";
        }
    }
    report(9, "decoding throughput", ok, detail);
}

}  // namespace

int main() {
    criterion_decoder_exactness();
    criterion_smoothing_laws();
    criterion_rule_cascade();
    criterion_iob_round_trip();
    criterion_repair();
    criterion_scorer();
    criterion_end_to_end_quality();
    criterion_determinism();
    criterion_throughput();
    std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
