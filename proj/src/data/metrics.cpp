#include "hetrain/data/metrics.hpp"

#include <sstream>

#include <json.hpp>

#include "hetrain/common/error.hpp"

namespace hetrain::data {

MetricsReport evaluate(std::span<const size_t> preds, std::span<const size_t> truth,
                       size_t classes) {
    if (preds.size() != truth.size())
        throw ParamError("evaluate: " + std::to_string(preds.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " ground-truth labels");
    if (classes == 0) throw ParamError("evaluate: need at least one class");

    MetricsReport rep;
    rep.classes = classes;
    rep.samples = preds.size();
    rep.confusion.assign(classes, std::vector<uint64_t>(classes, 0));
    for (size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] >= classes || truth[i] >= classes)
            throw ParamError("evaluate: class index out of range at row " + std::to_string(i));
        rep.confusion[truth[i]][preds[i]]++;
    }

    uint64_t hits = 0;
    for (size_t c = 0; c < classes; ++c) hits += rep.confusion[c][c];
    rep.hit_rate = rep.samples == 0 ? 0.0 : static_cast<double>(hits) / rep.samples;

    double acc = 0.0, prec = 0.0, rec = 0.0;
    for (size_t c = 0; c < classes; ++c) {
        uint64_t tp = rep.confusion[c][c];
        uint64_t fn = 0, fp = 0;
        for (size_t j = 0; j < classes; ++j) {
            if (j != c) {
                fn += rep.confusion[c][j];
                fp += rep.confusion[j][c];
            }
        }
        uint64_t tn = rep.samples - tp - fn - fp;
        uint64_t denom = tp + tn + fp + fn;
        acc += denom == 0 ? 0.0 : static_cast<double>(tp + tn) / denom;
        prec += tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
        rec += tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    }
    rep.accuracy = acc / classes;
    rep.macro_precision = prec / classes;
    rep.macro_recall = rec / classes;

    // per-class accuracy is inflated by TN, so it can never undercut the hit rate
    if (rep.samples > 0 && rep.accuracy + 1e-12 < rep.hit_rate)
        throw Error("evaluate: internal metric cross-check failed");
    return rep;
}

std::string MetricsReport::to_text() const {
    std::ostringstream out;
    out.precision(6);
    out << "samples=" << samples << "\n";
    out << "classes=" << classes << "\n";
    out << "accuracy=" << accuracy << "\n";
    out << "precision=" << macro_precision << "\n";
    out << "recall=" << macro_recall << "\n";
    out << "hit_rate=" << hit_rate << "\n";
    return out.str();
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["samples"] = samples;
    j["classes"] = classes;
    j["accuracy"] = accuracy;
    j["precision"] = macro_precision;
    j["recall"] = macro_recall;
    j["hit_rate"] = hit_rate;
    j["confusion"] = confusion;
    return j.dump(2);
}

} // namespace hetrain::data
