#include "hetrain/data/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "hetrain/common/bytes.hpp"
#include "hetrain/common/rng.hpp"
#include "hetrain/he/serialize.hpp"

namespace hetrain::data {

size_t Dataset::label_index(size_t row) const {
    const auto& onehot = labels[row];
    return static_cast<size_t>(std::max_element(onehot.begin(), onehot.end()) -
                               onehot.begin());
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // trim surrounding whitespace
        size_t a = field.find_first_not_of(" \t\r");
        size_t b = field.find_last_not_of(" \t\r");
        fields.push_back(a == std::string::npos ? "" : field.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

} // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
    if (schema.class_names.empty()) throw SchemaError("csv schema: no classes declared");
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);

    Dataset d;
    d.class_names = schema.class_names;
    std::string line;
    size_t line_no = 0;
    if (!std::getline(in, line))
        throw ParseError(path + ":1: missing header row");
    ++line_no;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != schema.feature_count + 1)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(schema.feature_count + 1) + " columns, got " +
                             std::to_string(fields.size()));
        std::vector<double> row(schema.feature_count);
        for (size_t i = 0; i < schema.feature_count; ++i) {
            try {
                size_t used = 0;
                row[i] = std::stod(fields[i], &used);
                if (used != fields[i].size()) throw std::invalid_argument("junk");
            } catch (const std::exception&) {
                throw ParseError(path + ":" + std::to_string(line_no) +
                                 ": bad numeric value '" + fields[i] + "'");
            }
        }
        auto cls = std::find(schema.class_names.begin(), schema.class_names.end(),
                             fields.back());
        if (cls == schema.class_names.end())
            throw SchemaError(path + ":" + std::to_string(line_no) + ": unknown label '" +
                              fields.back() + "'");
        std::vector<double> onehot(schema.class_names.size(), 0.0);
        onehot[static_cast<size_t>(cls - schema.class_names.begin())] = 1.0;
        d.features.push_back(std::move(row));
        d.labels.push_back(std::move(onehot));
    }
    return d;
}

void save_csv(const std::string& path, const Dataset& d) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    for (size_t i = 0; i < d.feature_count(); ++i) out << "f" << i << ",";
    out << "label\n";
    out.precision(17);
    for (size_t r = 0; r < d.rows(); ++r) {
        for (double v : d.features[r]) out << v << ",";
        out << d.class_names[d.label_index(r)] << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

namespace {

Dataset subset(const Dataset& d, const std::vector<size_t>& rows) {
    Dataset out;
    out.class_names = d.class_names;
    for (size_t r : rows) {
        out.features.push_back(d.features[r]);
        out.labels.push_back(d.labels[r]);
    }
    return out;
}

} // namespace

std::pair<Dataset, Dataset> preprocess(const Dataset& d, size_t per_class,
                                       uint64_t split_seed) {
    const size_t classes = d.class_count();
    if (per_class == 0) throw SamplingError("preprocess: per_class must be >= 1");

    std::vector<std::vector<size_t>> by_class(classes);
    for (size_t r = 0; r < d.rows(); ++r) by_class[d.label_index(r)].push_back(r);

    std::mt19937_64 rng(split_seed);
    std::vector<size_t> train_rows, test_rows;
    const size_t test_per_class = per_class / 5; // 80:20
    for (size_t c = 0; c < classes; ++c) {
        if (by_class[c].size() < per_class)
            throw SamplingError("preprocess: class '" + d.class_names[c] + "' has " +
                                std::to_string(by_class[c].size()) + " rows, need " +
                                std::to_string(per_class));
        auto order = shuffled_indices(by_class[c].size(), rng);
        for (size_t i = 0; i < per_class; ++i) {
            size_t row = by_class[c][order[i]];
            (i < per_class - test_per_class ? train_rows : test_rows).push_back(row);
        }
    }
    auto train_order = shuffled_indices(train_rows.size(), rng);
    auto test_order = shuffled_indices(test_rows.size(), rng);
    std::vector<size_t> shuffled_train, shuffled_test;
    for (size_t i : train_order) shuffled_train.push_back(train_rows[i]);
    for (size_t i : test_order) shuffled_test.push_back(test_rows[i]);

    Dataset train = subset(d, shuffled_train);
    Dataset test = subset(d, shuffled_test);

    // min-max fitted on the training portion only
    const size_t f = train.feature_count();
    train.scale_min.assign(f, 0.0);
    train.scale_max.assign(f, 0.0);
    for (size_t j = 0; j < f; ++j) {
        double lo = train.features[0][j], hi = train.features[0][j];
        for (const auto& row : train.features) {
            lo = std::min(lo, row[j]);
            hi = std::max(hi, row[j]);
        }
        train.scale_min[j] = lo;
        train.scale_max[j] = hi;
    }
    test.scale_min = train.scale_min;
    test.scale_max = train.scale_max;
    auto apply = [&](Dataset& ds) {
        for (auto& row : ds.features)
            for (size_t j = 0; j < f; ++j) {
                double span = train.scale_max[j] - train.scale_min[j];
                row[j] = span == 0.0 ? 0.0 : (row[j] - train.scale_min[j]) / span;
                row[j] = std::clamp(row[j], 0.0, 1.0);
            }
    };
    apply(train);
    apply(test);
    return {std::move(train), std::move(test)};
}

Dataset synth_generate(const SynthSpec& spec) {
    if (spec.classes == 0 || spec.features == 0 || spec.per_class == 0)
        throw ParamError("synth_generate: parameters must be positive");
    if (!spec.class_names.empty() && spec.class_names.size() != spec.classes)
        throw ParamError("synth_generate: class name count does not match class count");
    std::mt19937_64 rng(spec.seed);
    Dataset d;
    if (spec.class_names.empty()) {
        for (size_t c = 0; c < spec.classes; ++c)
            d.class_names.push_back("class_" + std::to_string(c));
    } else {
        d.class_names = spec.class_names;
    }

    // Each class drives its own signature subset of features high against a
    // low baseline, echoing per-class traffic counters; jitter keeps the
    // clusters from being axis-exact.
    std::vector<std::vector<double>> means(spec.classes,
                                           std::vector<double>(spec.features, 0.0));
    for (size_t c = 0; c < spec.classes; ++c)
        for (size_t j = 0; j < spec.features; ++j) {
            double base = j % spec.classes == c ? 0.75 : 0.12;
            means[c][j] = std::clamp(base + uniform(rng, -0.03, 0.03), 0.0, 1.0);
        }

    for (size_t c = 0; c < spec.classes; ++c) {
        for (size_t i = 0; i < spec.per_class; ++i) {
            std::vector<double> row(spec.features);
            for (size_t j = 0; j < spec.features; ++j)
                row[j] = std::clamp(gaussian(rng, means[c][j], spec.spread), 0.0, 1.0);
            std::vector<double> onehot(spec.classes, 0.0);
            onehot[c] = 1.0;
            d.features.push_back(std::move(row));
            d.labels.push_back(std::move(onehot));
        }
    }
    return d;
}

EncryptedDataset encrypt_dataset(const he::Context& ctx, const Dataset& d,
                                 const he::PublicKey& pk, pack::Axis y_axis) {
    const auto& p = ctx.params();
    EncryptedDataset out;
    out.x_layout = {d.feature_count(), pack::Axis::Row, p.slot_size, p.ct_size};
    out.y_layout = {d.class_count(), y_axis, p.slot_size, p.ct_size};
    if (d.feature_count() > p.slot_size)
        throw CapacityError("encrypt_dataset: " + std::to_string(d.feature_count()) +
                            " features exceed segment width " + std::to_string(p.slot_size));
    for (size_t r = 0; r < d.rows(); ++r) {
        nn::EncryptedSample sample;
        sample.x = ctx.encrypt(
            pk, pack::pack1d(d.features[r], pack::Axis::Row, p.slot_size, p.ct_size));
        sample.y = ctx.encrypt(pk, pack::pack1d(d.labels[r], y_axis, p.slot_size, p.ct_size));
        out.samples.push_back(std::move(sample));
    }
    return out;
}

namespace {
constexpr std::string_view kDataMagic = "HEDATA01";
constexpr uint8_t kDataVersion = 1;

void layout_write(ByteWriter& w, const pack::VecLayout& l) {
    w.u8(static_cast<uint8_t>(pack::axis_index(l.axis)));
    w.u32(static_cast<uint32_t>(l.len));
    w.u32(l.slot_size);
    w.u32(l.ct_size);
}

pack::VecLayout layout_read(ByteReader& r) {
    pack::VecLayout l;
    l.axis = pack::axis_from(r.u8());
    l.len = r.u32();
    l.slot_size = r.u32();
    l.ct_size = r.u32();
    return l;
}
} // namespace

std::vector<uint8_t> dataset_serialize(const EncryptedDataset& d) {
    ByteWriter w;
    w.raw(kDataMagic);
    w.u8(kDataVersion);
    w.u32(static_cast<uint32_t>(d.samples.size()));
    layout_write(w, d.x_layout);
    layout_write(w, d.y_layout);
    for (const nn::EncryptedSample& s : d.samples) {
        w.blob(he::ct_serialize(s.x));
        w.blob(he::ct_serialize(s.y));
    }
    return w.take();
}

EncryptedDataset dataset_deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    r.expect(kDataMagic, "dataset file");
    uint8_t version = r.u8();
    if (version != kDataVersion)
        throw FormatError("dataset file: unsupported version " + std::to_string(version));
    EncryptedDataset d;
    uint32_t count = r.u32();
    d.x_layout = layout_read(r);
    d.y_layout = layout_read(r);
    for (uint32_t i = 0; i < count; ++i) {
        nn::EncryptedSample s;
        auto xb = r.blob();
        s.x = he::ct_deserialize(xb);
        auto yb = r.blob();
        s.y = he::ct_deserialize(yb);
        d.samples.push_back(std::move(s));
    }
    if (!r.done()) throw FormatError("dataset file: trailing bytes");
    return d;
}

} // namespace hetrain::data
