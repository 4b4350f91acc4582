#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tweetner/corpus.hpp"
#include "tweetner/features.hpp"
#include "tweetner/model.hpp"

// Trigram Viterbi over tag-pair lattice states. Scores are natural logs with
// -inf for zero probability; ties break toward the lowest tag index.

namespace tweetner {

// Dense log-transition tables, built once per model and shared across tweets.
class ViterbiTables {
  public:
    explicit ViterbiTables(const HmmModel& model) : model_(&model), k_(model.tags().size()) {
        const int s1 = model.tags().start1();
        const int s2 = model.tags().start2();
        const int end = model.tags().end_tag();
        auto lg = [](double p) {
            return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
        };

        init_.resize(k_);
        for (int t = 0; t < k_; ++t) init_[t] = lg(model.transition_prob(s1, s2, t));

        // main_[b][a][t]: log P(t | a, b) with a over real tags plus <s2> at
        // slot k_, b over real tags.
        const int na = k_ + 1;
        main_.assign(static_cast<std::size_t>(k_) * na * k_, 0.0);
        end_.assign(static_cast<std::size_t>(na) * k_, 0.0);
        for (int b = 0; b < k_; ++b)
            for (int a = 0; a <= k_; ++a) {
                int a_full = a == k_ ? s2 : a;
                double* row = &main_[(static_cast<std::size_t>(b) * na + a) * k_];
                for (int t = 0; t < k_; ++t) row[t] = lg(model.transition_prob(a_full, b, t));
                end_[static_cast<std::size_t>(a) * k_ + b] =
                    lg(model.transition_prob(a_full, b, end));
            }
    }

    const HmmModel& model() const { return *model_; }
    int num_tags() const { return k_; }
    double init(int t) const { return init_[t]; }
    double main(int b, int a, int t) const {
        return main_[(static_cast<std::size_t>(b) * (k_ + 1) + a) * k_ + t];
    }
    const double* main_row(int b, int a) const {
        return &main_[(static_cast<std::size_t>(b) * (k_ + 1) + a) * k_];
    }
    double end(int a, int b) const { return end_[static_cast<std::size_t>(a) * k_ + b]; }

  private:
    const HmmModel* model_;
    int k_;
    std::vector<double> init_;  // log P(t | <s1>, <s2>)
    std::vector<double> main_;
    std::vector<double> end_;   // log P(</s> | a, b)
};

struct ViterbiResult {
    std::vector<int> tag_indices;
    double log_score = 0.0;
};

inline ViterbiResult viterbi_indices(const std::vector<std::string>& keys,
                                     const ViterbiTables& tables) {
    if (keys.empty()) throw std::invalid_argument("viterbi: empty observation sequence");
    const int k = tables.num_tags();
    const int start2_slot = k;  // prev-axis slot for <s2>
    const double ninf = -std::numeric_limits<double>::infinity();
    const std::size_t n = keys.size();

    // delta[a * k + b]: best log-score of a path ending in (t_{i-1}=a, t_i=b),
    // a ranging over real tags plus the <s2> slot.
    std::vector<double> delta(static_cast<std::size_t>(k + 1) * k, ninf);
    std::vector<std::vector<int>> backptr(n, std::vector<int>(static_cast<std::size_t>(k) * k, -1));

    std::vector<double> emis = tables.model().emission_log_scores(keys[0]);
    bool any = false;
    for (int t = 0; t < k; ++t) {
        double v = tables.init(t) + emis[t];
        delta[static_cast<std::size_t>(start2_slot) * k + t] = v;
        any = any || v > ninf;
    }
    if (!any) throw std::runtime_error("viterbi: no admissible tag at position 0");

    std::vector<double> next(delta.size());
    for (std::size_t i = 1; i < n; ++i) {
        emis = tables.model().emission_log_scores(keys[i]);
        std::fill(next.begin(), next.end(), ninf);
        any = false;
        int* bp = backptr[i].data();  // indexed [b * k + t]
        for (int b = 0; b < k; ++b) {
            double* out = &next[static_cast<std::size_t>(b) * k];
            for (int a = 0; a <= k; ++a) {
                double db = delta[static_cast<std::size_t>(a) * k + b];
                if (db == ninf) continue;
                const double* row = tables.main_row(b, a);
                for (int t = 0; t < k; ++t) {
                    if (emis[t] == ninf) continue;
                    double v = db + row[t];
                    if (v > out[t]) {
                        out[t] = v;
                        bp[static_cast<std::size_t>(b) * k + t] = a;
                    }
                }
            }
            for (int t = 0; t < k; ++t)
                if (out[t] > ninf) {
                    out[t] += emis[t];
                    any = true;
                }
        }
        if (!any)
            throw std::runtime_error("viterbi: no admissible path at position " + std::to_string(i));
        delta.swap(next);
    }

    // Close with the end-boundary transition and pick the best final state.
    double best = ninf;
    int best_a = -1, best_b = -1;
    for (int a = 0; a <= k; ++a)
        for (int b = 0; b < k; ++b) {
            double db = delta[static_cast<std::size_t>(a) * k + b];
            if (db == ninf) continue;
            double v = db + tables.end(a, b);
            if (v > best) {
                best = v;
                best_a = a;
                best_b = b;
            }
        }
    if (best_b < 0) throw std::runtime_error("viterbi: no admissible complete path");

    ViterbiResult result;
    result.log_score = best;
    result.tag_indices.assign(n, -1);
    int a = best_a, b = best_b;
    for (std::size_t i = n; i-- > 0;) {
        result.tag_indices[i] = b;
        if (i == 0) break;
        int prev_a = backptr[i][static_cast<std::size_t>(a) * k + b];
        b = a;
        a = prev_a;
    }
    return result;
}

inline std::vector<std::string> viterbi(const std::vector<PseudoToken>& obs,
                                        const ViterbiTables& tables) {
    std::vector<std::string> keys;
    keys.reserve(obs.size());
    for (const auto& p : obs) keys.push_back(observation_key(p));
    ViterbiResult r = viterbi_indices(keys, tables);
    std::vector<std::string> labels;
    labels.reserve(r.tag_indices.size());
    for (int t : r.tag_indices) labels.push_back(tables.model().tags().label(t));
    return labels;
}

inline std::vector<std::string> viterbi(const std::vector<PseudoToken>& obs,
                                        const HmmModel& model) {
    ViterbiTables tables(model);
    return viterbi(obs, tables);
}

// Full per-tweet pipeline: tokenize, featurize, decode, attach labels.
inline IobSentence decode_tweet(const RawTweet& tweet, const std::vector<std::string>& pos_tags,
                                const GazetteerSet& gaz, const ViterbiTables& tables) {
    std::vector<Token> tokens = tokenize(tweet.text);
    if (tokens.empty()) return IobSentence();
    std::vector<PseudoToken> obs = featurize_sentence(tokens, pos_tags, gaz);
    std::vector<std::string> labels = viterbi(obs, tables);
    IobSentence out(std::move(tokens), std::move(labels));
    out.pos_tags = pos_tags;
    return out;
}

}  // namespace tweetner
