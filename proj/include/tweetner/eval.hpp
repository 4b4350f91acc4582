#pragma once

#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tweetner/corpus.hpp"

// Output post-processing (orphan I-XXX repair) and entity-level
// precision/recall/F-measure over exact (type, start, length) matches.

namespace tweetner {

// Replaces I-XXX labels that do not continue an entity of the same type with
// O. Covers O -> I transitions, sentence-initial I runs, and type switches
// inside a run. Idempotent; never touches B- labels.
inline std::vector<std::string> repair_orphan_i(const std::vector<std::string>& labels) {
    std::vector<std::string> out;
    out.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (is_inside_label(labels[i])) {
            bool continues = !out.empty() &&
                             (is_begin_label(out.back()) || is_inside_label(out.back())) &&
                             label_type(out.back()) == label_type(labels[i]);
            out.push_back(continues ? labels[i] : kOutsideLabel);
        } else {
            out.push_back(labels[i]);
        }
    }
    return out;
}

struct TypeScore {
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;

    double precision() const {
        std::size_t d = true_positives + false_positives;
        return d == 0 ? 0.0 : 100.0 * static_cast<double>(true_positives) / static_cast<double>(d);
    }
    double recall() const {
        std::size_t d = true_positives + false_negatives;
        return d == 0 ? 0.0 : 100.0 * static_cast<double>(true_positives) / static_cast<double>(d);
    }
    double f_measure() const {
        double p = precision(), r = recall();
        return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }
};

struct EvalReport {
    std::map<std::string, TypeScore> per_type;
    TypeScore overall;
    std::size_t duplicate_predictions = 0;
};

using AnnotationMap = std::map<std::string, std::vector<EntitySpan>>;

// Exact-match entity scoring: a predicted span is a true positive iff the
// same tweet's gold set contains a span with identical type, start and
// length. Duplicate predictions count once.
inline EvalReport score(const AnnotationMap& gold, const AnnotationMap& predicted) {
    using Item = std::tuple<std::string, std::size_t, std::size_t>;  // type, start, length
    EvalReport report;

    std::set<std::string> tweet_ids;
    for (const auto& [id, _] : gold) tweet_ids.insert(id);
    for (const auto& [id, _] : predicted) tweet_ids.insert(id);

    for (const auto& id : tweet_ids) {
        std::set<Item> gold_set, pred_set;
        if (auto it = gold.find(id); it != gold.end())
            for (const auto& s : it->second) gold_set.insert({s.ne_tag, s.start_index, s.length});
        if (auto it = predicted.find(id); it != predicted.end())
            for (const auto& s : it->second) {
                if (!pred_set.insert({s.ne_tag, s.start_index, s.length}).second)
                    ++report.duplicate_predictions;
            }
        for (const auto& item : pred_set) {
            TypeScore& ts = report.per_type[std::get<0>(item)];
            if (gold_set.count(item)) ++ts.true_positives;
            else ++ts.false_positives;
        }
        for (const auto& item : gold_set)
            if (!pred_set.count(item)) ++report.per_type[std::get<0>(item)].false_negatives;
    }

    for (const auto& [type, ts] : report.per_type) {
        report.overall.true_positives += ts.true_positives;
        report.overall.false_positives += ts.false_positives;
        report.overall.false_negatives += ts.false_negatives;
    }
    return report;
}

inline std::string format_percent(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

// Fixed-width human-readable table.
inline void render_report(std::ostream& out, const EvalReport& report) {
    out << std::left << std::setw(16) << "Type" << std::right << std::setw(6) << "TP"
        << std::setw(6) << "FP" << std::setw(6) << "FN" << std::setw(10) << "P" << std::setw(10)
        << "R" << std::setw(10) << "F" << '\n';
    auto row = [&](const std::string& name, const TypeScore& ts) {
        out << std::left << std::setw(16) << name << std::right << std::setw(6)
            << ts.true_positives << std::setw(6) << ts.false_positives << std::setw(6)
            << ts.false_negatives << std::setw(10) << format_percent(ts.precision())
            << std::setw(10) << format_percent(ts.recall()) << std::setw(10)
            << format_percent(ts.f_measure()) << '\n';
    };
    for (const auto& [type, ts] : report.per_type) row(type, ts);
    row("OVERALL", report.overall);
}

// Machine-readable lines "TYPE<TAB>P<TAB>R<TAB>F".
inline void render_machine(std::ostream& out, const EvalReport& report) {
    auto row = [&](const std::string& name, const TypeScore& ts) {
        out << name << '\t' << format_percent(ts.precision()) << '\t'
            << format_percent(ts.recall()) << '\t' << format_percent(ts.f_measure()) << '\n';
    };
    for (const auto& [type, ts] : report.per_type) row(type, ts);
    row("OVERALL", report.overall);
}

}  // namespace tweetner
