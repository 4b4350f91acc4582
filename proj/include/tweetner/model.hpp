#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "tweetner/features.hpp"
#include "tweetner/utf8.hpp"

// Trigram HMM parameter estimation: tag transition probabilities smoothed by
// deleted interpolation, triplet emission probabilities, and a suffix model
// over rare pseudo-words for unknown observation keys.

namespace tweetner {

struct ModelConfig {
    std::size_t suffix_max_len = 10;  // L, longest suffix kept (code points)
    std::size_t rare_threshold = 2;   // pseudo-words with frequency <= this feed the suffix model
    bool eq7_literal = false;         // emission denominator C(o) instead of C(t)
};

// Deterministic reversible join of the triplet fields.
inline std::string observation_key(const PseudoToken& p) {
    if (p.word.empty() || p.x_tag.empty() || p.meta_tag.empty())
        throw std::invalid_argument("observation_key: empty pseudo-token field");
    for (const std::string* f : {&p.word, &p.x_tag, &p.meta_tag})
        if (f->find(kObservationSep) != std::string::npos)
            throw std::runtime_error("pseudo-token field contains the reserved separator U+241F");
    std::string key = p.word;
    key += kObservationSep;
    key += p.x_tag;
    key += kObservationSep;
    key += p.meta_tag;
    return key;
}

inline PseudoToken parse_observation_key(std::string_view key) {
    std::size_t a = key.find(kObservationSep);
    if (a == std::string_view::npos) throw std::invalid_argument("malformed observation key");
    std::size_t b = key.find(kObservationSep, a + kObservationSep.size());
    if (b == std::string_view::npos) throw std::invalid_argument("malformed observation key");
    return {std::string(key.substr(0, a)),
            std::string(key.substr(a + kObservationSep.size(), b - a - kObservationSep.size())),
            std::string(key.substr(b + kObservationSep.size()))};
}

// The NE label set plus the three synthetic boundary tags. Real labels get
// stable sorted indices [0, size); the boundaries sit above them.
class TagInventory {
  public:
    TagInventory() = default;
    explicit TagInventory(std::vector<std::string> sorted_labels)
        : labels_(std::move(sorted_labels)) {
        for (int i = 0; i < static_cast<int>(labels_.size()); ++i) index_[labels_[i]] = i;
    }

    int size() const { return static_cast<int>(labels_.size()); }
    int total_size() const { return size() + 3; }
    int start1() const { return size(); }
    int start2() const { return size() + 1; }
    int end_tag() const { return size() + 2; }
    bool is_boundary(int i) const { return i >= size(); }

    int index(std::string_view label) const {
        auto it = index_.find(std::string(label));
        if (it == index_.end())
            throw std::out_of_range("unknown label '" + std::string(label) + "'");
        return it->second;
    }
    bool contains(std::string_view label) const { return index_.count(std::string(label)) > 0; }

    const std::string& label(int i) const {
        static const std::string kStart1 = "<s1>", kStart2 = "<s2>", kEnd = "</s>";
        if (i == start1()) return kStart1;
        if (i == start2()) return kStart2;
        if (i == end_tag()) return kEnd;
        return labels_.at(i);
    }
    const std::vector<std::string>& labels() const { return labels_; }

  private:
    std::vector<std::string> labels_;
    std::map<std::string, int, std::less<>> index_;
};

// Raw event counts from a training corpus. Every sentence is padded with the
// two start tags and the end tag before n-gram counting; emissions count real
// tokens only. C(t) for real t equals unigram[t], and C(o) equals the sum of
// emission counts for o.
struct CountTables {
    TagInventory tags;
    std::int64_t total_padded = 0;                              // N, over padded sequences
    std::vector<std::int64_t> unigram;                          // indexed by tag
    std::map<std::pair<int, int>, std::int64_t> bigram;
    std::map<std::tuple<int, int, int>, std::int64_t> trigram;
    std::map<std::string, std::map<int, std::int64_t>> emission;  // key -> tag -> count
    std::map<std::string, std::int64_t> key_counts;               // C(o)

    std::int64_t uni(int t) const { return unigram[t]; }
    std::int64_t bi(int a, int b) const {
        auto it = bigram.find({a, b});
        return it == bigram.end() ? 0 : it->second;
    }
    std::int64_t tri(int a, int b, int c) const {
        auto it = trigram.find({a, b, c});
        return it == trigram.end() ? 0 : it->second;
    }
};

using TrainingSentence = std::pair<std::vector<PseudoToken>, std::vector<std::string>>;

inline void validate_label(const std::string& label) {
    if (label == kOutsideLabel) return;
    if ((is_begin_label(label) || is_inside_label(label)) && label.size() > 2) return;
    throw std::runtime_error("unknown label format '" + label + "'");
}

inline CountTables count_events(const std::vector<TrainingSentence>& training) {
    std::set<std::string> label_set;
    std::int64_t n_tokens = 0;
    for (const auto& [obs, labels] : training) {
        if (obs.size() != labels.size())
            throw std::runtime_error("training sentence has mismatched lengths");
        for (const auto& l : labels) {
            validate_label(l);
            label_set.insert(l);
        }
        n_tokens += static_cast<std::int64_t>(obs.size());
    }
    if (n_tokens == 0) throw std::runtime_error("training corpus is empty");

    CountTables counts;
    counts.tags = TagInventory(std::vector<std::string>(label_set.begin(), label_set.end()));
    counts.unigram.assign(counts.tags.total_size(), 0);

    const int s1 = counts.tags.start1(), s2 = counts.tags.start2(), end = counts.tags.end_tag();
    for (const auto& [obs, labels] : training) {
        if (obs.empty()) continue;
        std::vector<int> seq;
        seq.reserve(labels.size() + 3);
        seq.push_back(s1);
        seq.push_back(s2);
        for (const auto& l : labels) seq.push_back(counts.tags.index(l));
        seq.push_back(end);

        for (std::size_t i = 0; i < seq.size(); ++i) {
            ++counts.unigram[seq[i]];
            ++counts.total_padded;
            if (i + 1 < seq.size()) ++counts.bigram[{seq[i], seq[i + 1]}];
            if (i + 2 < seq.size()) ++counts.trigram[{seq[i], seq[i + 1], seq[i + 2]}];
        }
        for (std::size_t i = 0; i < obs.size(); ++i) {
            std::string key = observation_key(obs[i]);
            ++counts.emission[key][seq[i + 2]];
            ++counts.key_counts[key];
        }
    }
    return counts;
}

// Deleted interpolation: each seen trigram votes its count for whichever of
// the three discounted MLEs is largest (ties favor the higher order); the
// vote totals are normalized into (lambda1, lambda2, lambda3) for the
// unigram, bigram and trigram components.
inline std::array<double, 3> fit_lambdas(const CountTables& counts) {
    if (counts.trigram.empty()) throw std::runtime_error("fit_lambdas: no trigram events");
    auto ratio = [](std::int64_t num, std::int64_t den) {
        return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
    };
    std::array<double, 3> votes = {0.0, 0.0, 0.0};
    for (const auto& [tri, c] : counts.trigram) {
        auto [t1, t2, t3] = tri;
        double d3 = ratio(c - 1, counts.bi(t1, t2) - 1);
        double d2 = ratio(counts.bi(t2, t3) - 1, counts.uni(t2) - 1);
        double d1 = ratio(counts.uni(t3) - 1, counts.total_padded - 1);
        if (d3 >= d2 && d3 >= d1) votes[2] += static_cast<double>(c);
        else if (d2 >= d1) votes[1] += static_cast<double>(c);
        else votes[0] += static_cast<double>(c);
    }
    double total = votes[0] + votes[1] + votes[2];
    return {votes[0] / total, votes[1] / total, votes[2] / total};
}

// A fitted model: immutable, concurrently readable.
class HmmModel {
  public:
    static HmmModel fit(CountTables counts, ModelConfig config = {}) {
        HmmModel m;
        m.counts_ = std::move(counts);
        m.config_ = config;
        m.lambdas_ = fit_lambdas(m.counts_);
        m.build_suffix_model();
        return m;
    }

    static HmmModel train(const std::vector<TrainingSentence>& training, ModelConfig config = {}) {
        return fit(count_events(training), config);
    }

    const TagInventory& tags() const { return counts_.tags; }
    const CountTables& counts() const { return counts_; }
    const ModelConfig& config() const { return config_; }
    const std::array<double, 3>& lambdas() const { return lambdas_; }
    double theta() const { return theta_; }
    bool suffix_model_from_rare_events() const { return suffix_from_rare_; }
    std::size_t vocabulary_size() const { return counts_.emission.size(); }

    bool has_key(const std::string& key) const { return counts_.emission.count(key) > 0; }

    // P(t | prev2, prev1), Eq. (2) smoothed by deleted interpolation.
    double transition_prob(int prev2, int prev1, int t) const {
        auto mle = [](std::int64_t num, std::int64_t den) {
            return den > 0 ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
        };
        double p3 = mle(counts_.tri(prev2, prev1, t), counts_.bi(prev2, prev1));
        double p2 = mle(counts_.bi(prev1, t), counts_.uni(prev1));
        double p1 = mle(counts_.uni(t), counts_.total_padded);
        return lambdas_[2] * p3 + lambdas_[1] * p2 + lambdas_[0] * p1;
    }
    double transition_prob(std::string_view prev2, std::string_view prev1,
                           std::string_view t) const {
        return transition_prob(boundary_or_index(prev2), boundary_or_index(prev1),
                               boundary_or_index(t));
    }

    // P(o | t) for a key in the training vocabulary. Unknown keys are the
    // suffix model's job; asking here is a contract violation.
    double emission_prob(const std::string& key, int t) const {
        auto it = counts_.emission.find(key);
        if (it == counts_.emission.end())
            throw std::invalid_argument("emission_prob: unknown observation key (route to suffix_prob)");
        auto jt = it->second.find(t);
        std::int64_t joint = jt == it->second.end() ? 0 : jt->second;
        std::int64_t den = config_.eq7_literal ? counts_.key_counts.at(key) : counts_.uni(t);
        return den > 0 ? static_cast<double>(joint) / static_cast<double>(den) : 0.0;
    }

    // Emission-style score for an unknown key: P(t | longest stored suffix)
    // divided by the prior P(t), so a completely alien key scores every tag
    // equally.
    double suffix_prob(const std::string& key, int t) const {
        const std::vector<double>& dist = suffix_distribution(key);
        double prior = suffix_priors_[t];
        return prior > 0.0 ? dist[t] / prior : 0.0;
    }

    // The stored P(. | s) for the longest matching suffix of the key.
    const std::vector<double>& suffix_distribution(const std::string& key) const {
        std::vector<char32_t> cps = utf8::decode(key);
        std::size_t maxk = std::min(config_.suffix_max_len, cps.size());
        for (std::size_t k = maxk; k > 0; --k) {
            std::string s = utf8::encode({cps.end() - static_cast<std::ptrdiff_t>(k), cps.end()});
            auto it = suffix_dist_.find(s);
            if (it != suffix_dist_.end()) return it->second;
        }
        return suffix_dist_.at(std::string());
    }

    const std::vector<double>& suffix_priors() const { return suffix_priors_; }
    const std::map<std::string, std::vector<double>>& suffix_table() const { return suffix_dist_; }

    // Natural-log emission scores over real tags, routing known keys to the
    // emission MLE and unknown keys to the suffix model.
    std::vector<double> emission_log_scores(const std::string& key) const {
        const int k = tags().size();
        std::vector<double> out(k, -std::numeric_limits<double>::infinity());
        if (has_key(key)) {
            for (int t = 0; t < k; ++t) {
                double p = emission_prob(key, t);
                if (p > 0.0) out[t] = std::log(p);
            }
        } else {
            for (int t = 0; t < k; ++t) {
                double p = suffix_prob(key, t);
                if (p > 0.0) out[t] = std::log(p);
            }
        }
        return out;
    }

    void save(std::ostream& out) const;
    static HmmModel load(std::istream& in);

  private:
    HmmModel() = default;

    int boundary_or_index(std::string_view label) const {
        if (label == "<s1>") return counts_.tags.start1();
        if (label == "<s2>") return counts_.tags.start2();
        if (label == "</s>") return counts_.tags.end_tag();
        return counts_.tags.index(label);
    }

    // Suffix model per the TnT recipe: accumulate tag counts for every suffix
    // (up to L code points) of each rare pseudo-word event, then smooth from
    // the empty suffix outward with weight theta.
    void build_suffix_model() {
        const int k = counts_.tags.size();
        std::map<std::string, std::vector<std::int64_t>> suffix_counts;
        for (const auto& [key, per_tag] : counts_.emission) {
            if (counts_.key_counts.at(key) > static_cast<std::int64_t>(config_.rare_threshold))
                continue;
            std::vector<char32_t> cps = utf8::decode(key);
            std::size_t maxk = std::min(config_.suffix_max_len, cps.size());
            for (std::size_t len = 0; len <= maxk; ++len) {
                std::string s =
                    utf8::encode({cps.end() - static_cast<std::ptrdiff_t>(len), cps.end()});
                auto& row = suffix_counts[s];
                if (row.empty()) row.assign(k, 0);
                for (const auto& [t, c] : per_tag) row[t] += c;
            }
        }

        suffix_priors_.assign(k, 0.0);
        suffix_from_rare_ = !suffix_counts.empty();
        if (suffix_from_rare_) {
            const auto& base = suffix_counts.at(std::string());
            std::int64_t total = 0;
            for (std::int64_t c : base) total += c;
            for (int t = 0; t < k; ++t)
                suffix_priors_[t] = static_cast<double>(base[t]) / static_cast<double>(total);
        } else {
            // No rare pseudo-words: fall back to the overall tag distribution.
            std::int64_t total = 0;
            for (int t = 0; t < k; ++t) total += counts_.uni(t);
            for (int t = 0; t < k; ++t)
                suffix_priors_[t] = static_cast<double>(counts_.uni(t)) / static_cast<double>(total);
        }

        // theta = sample standard deviation of the tag priors.
        theta_ = 0.0;
        if (k > 1) {
            double mean = 0.0;
            for (double p : suffix_priors_) mean += p;
            mean /= static_cast<double>(k);
            double ss = 0.0;
            for (double p : suffix_priors_) ss += (p - mean) * (p - mean);
            theta_ = std::sqrt(ss / static_cast<double>(k - 1));
        }

        suffix_dist_.clear();
        suffix_dist_[std::string()] = suffix_priors_;
        if (!suffix_from_rare_) return;

        // Increasing suffix length; the one-shorter suffix is always present.
        std::vector<const std::string*> order;
        order.reserve(suffix_counts.size());
        for (const auto& [s, row] : suffix_counts)
            if (!s.empty()) order.push_back(&s);
        std::sort(order.begin(), order.end(), [](const std::string* a, const std::string* b) {
            std::size_t la = utf8::length(*a), lb = utf8::length(*b);
            return la != lb ? la < lb : *a < *b;
        });
        for (const std::string* sp : order) {
            std::vector<char32_t> cps = utf8::decode(*sp);
            std::string parent = utf8::encode({cps.begin() + 1, cps.end()});
            const auto& prev = suffix_dist_.at(parent);
            const auto& row = suffix_counts.at(*sp);
            std::int64_t total = 0;
            for (std::int64_t c : row) total += c;
            std::vector<double> dist(k);
            for (int t = 0; t < k; ++t) {
                double mle = static_cast<double>(row[t]) / static_cast<double>(total);
                dist[t] = (mle + theta_ * prev[t]) / (1.0 + theta_);
            }
            suffix_dist_[*sp] = std::move(dist);
        }
    }

    CountTables counts_;
    ModelConfig config_;
    std::array<double, 3> lambdas_ = {0.0, 0.0, 0.0};
    std::map<std::string, std::vector<double>> suffix_dist_;
    std::vector<double> suffix_priors_;
    double theta_ = 0.0;
    bool suffix_from_rare_ = false;
};

namespace detail {

inline std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

// Model file: versioned, line oriented, UTF-8. Only the integer count tables
// and the config are stored; lambdas and the suffix model are refitted on
// load, which is deterministic, so save/load is the identity on every
// queryable probability.
inline void HmmModel::save(std::ostream& out) const {
    std::ostringstream body;
    body << "config\t" << config_.suffix_max_len << '\t' << config_.rare_threshold << '\t'
         << (config_.eq7_literal ? 1 : 0) << '\n';
    body << "tags\t" << counts_.tags.size() << '\n';
    for (const auto& l : counts_.tags.labels()) body << l << '\n';
    body << "unigram\t" << counts_.unigram.size() << '\n';
    for (std::size_t i = 0; i < counts_.unigram.size(); ++i)
        body << i << '\t' << counts_.unigram[i] << '\n';
    body << "bigram\t" << counts_.bigram.size() << '\n';
    for (const auto& [k, c] : counts_.bigram)
        body << k.first << '\t' << k.second << '\t' << c << '\n';
    body << "trigram\t" << counts_.trigram.size() << '\n';
    for (const auto& [k, c] : counts_.trigram)
        body << std::get<0>(k) << '\t' << std::get<1>(k) << '\t' << std::get<2>(k) << '\t' << c
             << '\n';
    body << "emissions\t" << counts_.emission.size() << '\n';
    for (const auto& [key, per_tag] : counts_.emission) {
        body << key << '\t' << per_tag.size();
        for (const auto& [t, c] : per_tag) body << '\t' << t << '\t' << c;
        body << '\n';
    }
    std::string payload = body.str();
    out << "tweetner-model\t1\n" << payload;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(payload)));
    out << "checksum\t" << buf << '\n';
}

inline HmmModel HmmModel::load(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("model file: empty or unreadable");
    {
        auto fields = detail::split_tabs(detail::chomp(std::move(line)));
        if (fields.size() != 2 || fields[0] != "tweetner-model")
            throw std::runtime_error("model file: bad header");
        if (std::stol(fields[1]) > 1)
            throw std::runtime_error("model file: version " + fields[1] + " is newer than supported");
    }

    std::ostringstream payload;
    auto next = [&](const char* what) {
        if (!std::getline(in, line)) throw std::runtime_error(std::string("model file: truncated at ") + what);
        line = detail::chomp(std::move(line));
        return detail::split_tabs(line);
    };
    auto record = [&] { payload << line << '\n'; };

    CountTables counts;
    ModelConfig config;

    auto fields = next("config");
    if (fields.size() != 4 || fields[0] != "config") throw std::runtime_error("model file: expected config");
    record();
    config.suffix_max_len = static_cast<std::size_t>(std::stoul(fields[1]));
    config.rare_threshold = static_cast<std::size_t>(std::stoul(fields[2]));
    config.eq7_literal = fields[3] == "1";

    fields = next("tags");
    if (fields.size() != 2 || fields[0] != "tags") throw std::runtime_error("model file: expected tags");
    record();
    std::size_t ntags = std::stoul(fields[1]);
    std::vector<std::string> labels(ntags);
    for (std::size_t i = 0; i < ntags; ++i) {
        fields = next("tag label");
        record();
        labels[i] = line;
    }
    counts.tags = TagInventory(std::move(labels));

    fields = next("unigram");
    if (fields.size() != 2 || fields[0] != "unigram") throw std::runtime_error("model file: expected unigram");
    record();
    std::size_t n = std::stoul(fields[1]);
    if (n != static_cast<std::size_t>(counts.tags.total_size()))
        throw std::runtime_error("model file: unigram table size mismatch");
    counts.unigram.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        fields = next("unigram entry");
        record();
        if (fields.size() != 2) throw std::runtime_error("model file: bad unigram entry");
        counts.unigram[std::stoul(fields[0])] = std::stoll(fields[1]);
        counts.total_padded += std::stoll(fields[1]);
    }

    fields = next("bigram");
    if (fields.size() != 2 || fields[0] != "bigram") throw std::runtime_error("model file: expected bigram");
    record();
    n = std::stoul(fields[1]);
    for (std::size_t i = 0; i < n; ++i) {
        fields = next("bigram entry");
        record();
        if (fields.size() != 3) throw std::runtime_error("model file: bad bigram entry");
        counts.bigram[{std::stoi(fields[0]), std::stoi(fields[1])}] = std::stoll(fields[2]);
    }

    fields = next("trigram");
    if (fields.size() != 2 || fields[0] != "trigram") throw std::runtime_error("model file: expected trigram");
    record();
    n = std::stoul(fields[1]);
    for (std::size_t i = 0; i < n; ++i) {
        fields = next("trigram entry");
        record();
        if (fields.size() != 4) throw std::runtime_error("model file: bad trigram entry");
        counts.trigram[{std::stoi(fields[0]), std::stoi(fields[1]), std::stoi(fields[2])}] =
            std::stoll(fields[3]);
    }

    fields = next("emissions");
    if (fields.size() != 2 || fields[0] != "emissions") throw std::runtime_error("model file: expected emissions");
    record();
    n = std::stoul(fields[1]);
    for (std::size_t i = 0; i < n; ++i) {
        fields = next("emission entry");
        record();
        if (fields.size() < 2) throw std::runtime_error("model file: bad emission entry");
        const std::string& key = fields[0];
        std::size_t pairs = std::stoul(fields[1]);
        if (fields.size() != 2 + 2 * pairs) throw std::runtime_error("model file: bad emission entry");
        for (std::size_t p = 0; p < pairs; ++p) {
            int t = std::stoi(fields[2 + 2 * p]);
            std::int64_t c = std::stoll(fields[3 + 2 * p]);
            counts.emission[key][t] = c;
            counts.key_counts[key] += c;
        }
    }

    fields = next("checksum");
    if (fields.size() != 2 || fields[0] != "checksum") throw std::runtime_error("model file: missing checksum");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a(payload.str())));
    if (fields[1] != buf) throw std::runtime_error("model file: checksum mismatch");

    return HmmModel::fit(std::move(counts), config);
}

}  // namespace tweetner
