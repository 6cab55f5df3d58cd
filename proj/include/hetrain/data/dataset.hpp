#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hetrain/he/context.hpp"
#include "hetrain/nn/train.hpp"
#include "hetrain/pack/packing.hpp"

namespace hetrain::data {

/// Feature rows with one-hot labels plus the min/max scaling fitted on the
/// training portion.
struct Dataset {
    std::vector<std::vector<double>> features; // rows x F
    std::vector<std::vector<double>> labels;   // rows x C, one-hot
    std::vector<std::string> class_names;
    std::vector<double> scale_min; // per-feature, empty until scaled
    std::vector<double> scale_max;

    size_t rows() const { return features.size(); }
    size_t feature_count() const { return features.empty() ? 0 : features[0].size(); }
    size_t class_count() const { return class_names.size(); }
    size_t label_index(size_t row) const;
};

struct CsvSchema {
    std::vector<std::string> class_names;
    size_t feature_count = 21;
};

/// Parses a comma-separated file with a header row, feature_count feature
/// columns and one trailing label column. Errors carry the line number.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

/// Writes features plus the label class name, invertible by load_csv.
void save_csv(const std::string& path, const Dataset& d);

/// Stratified downsample to per_class rows per class, stratified 80:20
/// split, then min-max scaling to [0,1] fitted on the training portion only
/// (degenerate min==max columns map to 0; test rows are clamped).
std::pair<Dataset, Dataset> preprocess(const Dataset& d, size_t per_class,
                                       uint64_t split_seed);

struct SynthSpec {
    size_t classes = 5;
    size_t features = 21;
    size_t per_class = 200;
    double spread = 0.08; // cluster standard deviation
    uint64_t seed = 42;
    std::vector<std::string> class_names; // empty: class_0..class_{C-1}
};

/// Seeded Gaussian class clusters inside [0,1]^F; the desk-scale stand-in
/// for captured traffic data.
Dataset synth_generate(const SynthSpec& spec);

struct EncryptedDataset {
    std::vector<nn::EncryptedSample> samples;
    pack::VecLayout x_layout;
    pack::VecLayout y_layout;
};

/// Per-row Pack1D + encrypt: features on axis 0, one-hot labels on the axis
/// required by the model depth (1 - axis(K)).
EncryptedDataset encrypt_dataset(const he::Context& ctx, const Dataset& d,
                                 const he::PublicKey& pk, pack::Axis y_axis);

// "HEDATA01" container: count, layouts, serialized ciphertext pairs.
std::vector<uint8_t> dataset_serialize(const EncryptedDataset& d);
EncryptedDataset dataset_deserialize(std::span<const uint8_t> bytes);

} // namespace hetrain::data
