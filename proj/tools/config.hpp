#pragma once

#include <optional>
#include <string>

#include "hetrain/data/dataset.hpp"
#include "hetrain/nn/train.hpp"

namespace hetrain::cli {

/// Everything the toolkit reads from its config file: training and backend
/// parameters plus the dataset schema and the synthetic-source knobs.
struct AppConfig {
    nn::TrainConfig train;
    data::CsvSchema schema{{"class_0", "class_1", "class_2", "class_3", "class_4"}, 21};
    data::SynthSpec synth;
    size_t per_class = 200;
    uint64_t split_seed = 7;
    std::optional<uint64_t> key_seed;
};

/// Line-oriented key=value format with [section] headers and '#' comments.
AppConfig parse_config_text(const std::string& text, const std::string& origin);
AppConfig load_config(const std::string& path);

/// Resolves the config: explicit --config path, else the HETRAIN_CONFIG
/// environment variable, else built-in defaults.
AppConfig resolve_config(const std::string& cli_path);

} // namespace hetrain::cli
