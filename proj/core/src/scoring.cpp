#include "pseudo/scoring.hpp"

#include <functional>

#include <json.hpp>

#include "pseudo/error.hpp"

namespace pseudo {

namespace {

using nlohmann::json;

void finish_metrics(LabelScore& s) {
    s.support = s.tp + s.fn;
    s.defined = s.support > 0;
    std::uint64_t pred_count = s.tp + s.fp;
    s.precision = pred_count == 0
                      ? 0.0
                      : static_cast<double>(s.tp) /
                            static_cast<double>(pred_count);
    s.recall = s.support == 0 ? 0.0
                              : static_cast<double>(s.tp) /
                                    static_cast<double>(s.support);
    s.f1 = (s.precision + s.recall) == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
}

ScoreReport finish_report(std::string mode,
                          std::map<std::string, LabelScore> labels) {
    ScoreReport report;
    report.mode = std::move(mode);
    for (auto& [label, s] : labels) {
        finish_metrics(s);
        report.micro.tp += s.tp;
        report.micro.fp += s.fp;
        report.micro.fn += s.fn;
        if (s.defined) {
            report.macro_precision += s.precision;
            report.macro_recall += s.recall;
            report.macro_f1 += s.f1;
            report.macro_label_count += 1;
        }
    }
    finish_metrics(report.micro);
    if (report.macro_label_count > 0) {
        double k = static_cast<double>(report.macro_label_count);
        report.macro_precision /= k;
        report.macro_recall /= k;
        report.macro_f1 /= k;
    }
    report.labels = std::move(labels);
    return report;
}

struct Span {
    std::size_t begin;
    std::size_t end;  // half-open token range
    std::string label;

    bool operator==(const Span& other) const = default;
};

std::vector<Span> extract_spans(
    const TokenLabelSequence& seq,
    const std::function<const std::string&(const LabeledToken&)>& get) {
    std::vector<Span> spans;
    std::size_t i = 0;
    while (i < seq.tokens.size()) {
        const std::string& label = get(seq.tokens[i]);
        if (label == "O") {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < seq.tokens.size() && get(seq.tokens[j]) == label)
            ++j;
        spans.push_back({i, j, label});
        i = j;
    }
    return spans;
}

void require_preds(const std::vector<TokenLabelSequence>& seqs) {
    for (const TokenLabelSequence& seq : seqs) {
        if (!seq.tokens.empty() && !seq.has_preds())
            fail("document '", seq.doc_id,
                 "' has no predictions; cannot score");
    }
}

}  // namespace

ScoreReport score_tokens(const std::vector<TokenLabelSequence>& seqs) {
    require_preds(seqs);
    std::map<std::string, LabelScore> labels;
    for (const TokenLabelSequence& seq : seqs) {
        for (const LabeledToken& tok : seq.tokens) {
            const std::string& gold = tok.gold;
            const std::string& pred = *tok.pred;
            if (gold == pred) {
                if (gold != "O")
                    labels[gold].tp += 1;
                continue;
            }
            if (pred != "O")
                labels[pred].fp += 1;
            if (gold != "O")
                labels[gold].fn += 1;
        }
    }
    return finish_report("token", std::move(labels));
}

ScoreReport score_spans(const std::vector<TokenLabelSequence>& seqs) {
    require_preds(seqs);
    std::map<std::string, LabelScore> labels;
    for (const TokenLabelSequence& seq : seqs) {
        auto gold_spans = extract_spans(
            seq, [](const LabeledToken& t) -> const std::string& {
                return t.gold;
            });
        auto pred_spans = extract_spans(
            seq, [](const LabeledToken& t) -> const std::string& {
                return *t.pred;
            });
        std::size_t gi = 0;
        std::size_t pi = 0;
        // Both lists are sorted by span start.
        while (gi < gold_spans.size() && pi < pred_spans.size()) {
            const Span& g = gold_spans[gi];
            const Span& p = pred_spans[pi];
            if (g == p) {
                labels[g.label].tp += 1;
                ++gi;
                ++pi;
            } else if (p.begin < g.begin ||
                       (p.begin == g.begin && p.end < g.end)) {
                labels[p.label].fp += 1;
                ++pi;
            } else {
                labels[g.label].fn += 1;
                ++gi;
            }
        }
        for (; gi < gold_spans.size(); ++gi)
            labels[gold_spans[gi].label].fn += 1;
        for (; pi < pred_spans.size(); ++pi)
            labels[pred_spans[pi].label].fp += 1;
    }
    return finish_report("span", std::move(labels));
}

std::string ScoreReport::to_json() const {
    auto score_json = [](const LabelScore& s) {
        json j = {{"tp", s.tp},           {"fp", s.fp},
                  {"fn", s.fn},           {"support", s.support},
                  {"defined", s.defined}};
        if (s.defined || s.tp + s.fp > 0) {
            j["precision"] = s.precision;
            j["recall"] = s.recall;
            j["f1"] = s.f1;
        }
        return j;
    };
    json labels_json = json::object();
    for (const auto& [label, s] : labels)
        labels_json[label] = score_json(s);
    json j = {{"mode", mode},
              {"micro", score_json(micro)},
              {"macro",
               {{"precision", macro_precision},
                {"recall", macro_recall},
                {"f1", macro_f1},
                {"labels", macro_label_count}}},
              {"labels", labels_json}};
    return j.dump(2);
}

}  // namespace pseudo
