#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hetrain::data {

/// C x C confusion counts and the macro-averaged metrics derived from them.
/// Accuracy is the macro per-class accuracy (TP+TN over all four cells),
/// not the plain hit rate; classes with an empty denominator contribute 0.
struct MetricsReport {
    std::vector<std::vector<uint64_t>> confusion; // [truth][pred]
    size_t classes = 0;
    uint64_t samples = 0;
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double hit_rate = 0.0;

    std::string to_text() const;
    std::string to_json() const;
};

MetricsReport evaluate(std::span<const size_t> preds, std::span<const size_t> truth,
                       size_t classes);

} // namespace hetrain::data
