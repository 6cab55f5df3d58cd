#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hetrain::cli {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

uint64_t to_u64(const std::string& v, const std::string& where) {
    try {
        size_t used = 0;
        uint64_t x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument("junk");
        return x;
    } catch (const std::exception&) {
        throw ParseError(where + ": expected an integer, got '" + v + "'");
    }
}

double to_f64(const std::string& v, const std::string& where) {
    try {
        size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("junk");
        return x;
    } catch (const std::exception&) {
        throw ParseError(where + ": expected a number, got '" + v + "'");
    }
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

} // namespace

AppConfig parse_config_text(const std::string& text, const std::string& origin) {
    AppConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(where + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (value.empty()) continue; // blank value keeps the default

        auto& tr = cfg.train;
        if (section == "he") {
            if (key == "ring_dim") tr.he.ring_dim = static_cast<uint32_t>(to_u64(value, where));
            else if (key == "ct_size") tr.he.ct_size = static_cast<uint32_t>(to_u64(value, where));
            else if (key == "slot_size") tr.he.slot_size = static_cast<uint32_t>(to_u64(value, where));
            else if (key == "level_budget") tr.he.level_budget = static_cast<uint32_t>(to_u64(value, where));
            else if (key == "noise_sigma") tr.he.noise_sigma = to_f64(value, where);
            else throw ParseError(where + ": unknown [he] key '" + key + "'");
        } else if (section == "train") {
            if (key == "rounds") tr.rounds = static_cast<uint32_t>(to_u64(value, where));
            else if (key == "batch") tr.batch = static_cast<uint32_t>(to_u64(value, where));
            else if (key == "lr") tr.lr = to_f64(value, where);
            else if (key == "workers") tr.workers = static_cast<uint32_t>(to_u64(value, where));
            else if (key == "local_epochs") tr.local_epochs = static_cast<uint32_t>(to_u64(value, where));
            else if (key == "init_seed") tr.init_seed = to_u64(value, where);
            else if (key == "shuffle_seed") tr.shuffle_seed = to_u64(value, where);
            else if (key == "partition_seed") tr.partition_seed = to_u64(value, where);
            else if (key == "round_deadline_ms") tr.round_deadline_ms = static_cast<uint32_t>(to_u64(value, where));
            else throw ParseError(where + ": unknown [train] key '" + key + "'");
        } else if (section == "model") {
            if (key == "layers") {
                tr.layer_dims.clear();
                for (const std::string& d : split_list(value))
                    tr.layer_dims.push_back(static_cast<uint32_t>(to_u64(d, where)));
                if (tr.layer_dims.size() < 2)
                    throw ParseError(where + ": layers needs at least two dims");
            } else if (key == "activation_degree") {
                tr.act_degree = static_cast<uint32_t>(to_u64(value, where));
            } else if (key == "activation_domain") {
                auto parts = split_list(value);
                if (parts.size() != 2)
                    throw ParseError(where + ": activation_domain must be 'lo,hi'");
                tr.act_lo = to_f64(parts[0], where);
                tr.act_hi = to_f64(parts[1], where);
            } else {
                throw ParseError(where + ": unknown [model] key '" + key + "'");
            }
        } else if (section == "data") {
            if (key == "features") {
                cfg.schema.feature_count = to_u64(value, where);
                cfg.synth.features = cfg.schema.feature_count;
            } else if (key == "classes") {
                cfg.schema.class_names = split_list(value);
                cfg.synth.classes = cfg.schema.class_names.size();
                cfg.synth.class_names = cfg.schema.class_names;
            } else if (key == "per_class") {
                cfg.per_class = to_u64(value, where);
                cfg.synth.per_class = cfg.per_class;
            } else if (key == "split_seed") {
                cfg.split_seed = to_u64(value, where);
            } else if (key == "synth_seed") {
                cfg.synth.seed = to_u64(value, where);
            } else if (key == "synth_spread") {
                cfg.synth.spread = to_f64(value, where);
            } else {
                throw ParseError(where + ": unknown [data] key '" + key + "'");
            }
        } else if (section == "keys") {
            if (key == "seed") cfg.key_seed = to_u64(value, where);
            else throw ParseError(where + ": unknown [keys] key '" + key + "'");
        } else {
            throw ParseError(where + ": unknown section [" + section + "]");
        }
    }
    return cfg;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

AppConfig resolve_config(const std::string& cli_path) {
    if (!cli_path.empty()) return load_config(cli_path);
    if (const char* env = std::getenv("HETRAIN_CONFIG"); env && *env)
        return load_config(env);
    return AppConfig{};
}

} // namespace hetrain::cli
