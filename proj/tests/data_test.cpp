#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "hetrain/data/dataset.hpp"
#include "hetrain/data/metrics.hpp"
#include "hetrain/nn/model.hpp"

using namespace hetrain;
using namespace hetrain::data;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        char buf[] = "/tmp/hetrain_test_XXXXXX";
        int fd = mkstemp(buf);
        REQUIRE(fd >= 0);
        path = buf;
        FILE* f = fdopen(fd, "w");
        fputs(contents.c_str(), f);
        fclose(f);
    }
    ~TempFile() { std::remove(path.c_str()); }
};

CsvSchema two_class_schema() {
    return CsvSchema{{"benign", "attack"}, 2};
}

} // namespace

TEST_CASE("load_csv: well-formed file parses") {
    TempFile f("a,b,label\n1,2,benign\n3,4,attack\n0.5,0.25,benign\n");
    auto d = load_csv(f.path, two_class_schema());
    REQUIRE(d.rows() == 3);
    CHECK(d.features[1] == std::vector<double>{3, 4});
    CHECK(d.label_index(0) == 0);
    CHECK(d.label_index(1) == 1);
}

TEST_CASE("load_csv: short row names the line") {
    TempFile f("a,b,label\n1,2,benign\n3,attack\n");
    try {
        load_csv(f.path, two_class_schema());
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("load_csv: unknown label and bad numerics are rejected") {
    TempFile unknown("a,b,label\n1,2,mystery\n");
    CHECK_THROWS_AS(load_csv(unknown.path, two_class_schema()), SchemaError);
    TempFile nan("a,b,label\n1,zzz,benign\n");
    CHECK_THROWS_AS(load_csv(nan.path, two_class_schema()), ParseError);
}

TEST_CASE("csv round-trip through save_csv") {
    SynthSpec spec;
    spec.classes = 3;
    spec.features = 4;
    spec.per_class = 10;
    auto d = synth_generate(spec);
    TempFile f("");
    save_csv(f.path, d);
    auto back = load_csv(f.path, CsvSchema{d.class_names, 4});
    REQUIRE(back.rows() == d.rows());
    for (size_t r = 0; r < d.rows(); ++r) {
        CHECK(back.features[r] == d.features[r]);
        CHECK(back.label_index(r) == d.label_index(r));
    }
}

TEST_CASE("preprocess: counts, stratification, scaling bounds") {
    SynthSpec spec;
    spec.per_class = 60;
    auto d = synth_generate(spec);
    auto [train, test] = preprocess(d, 50, 7);

    CHECK(train.rows() == 200); // 5 classes x 40
    CHECK(test.rows() == 50);   // 5 classes x 10

    std::vector<size_t> train_per_class(5, 0), test_per_class(5, 0);
    for (size_t r = 0; r < train.rows(); ++r) train_per_class[train.label_index(r)]++;
    for (size_t r = 0; r < test.rows(); ++r) test_per_class[test.label_index(r)]++;
    for (size_t c = 0; c < 5; ++c) {
        CHECK(train_per_class[c] == 40);
        CHECK(test_per_class[c] == 10);
    }
    for (const auto& row : train.features)
        for (double v : row) {
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }
}

TEST_CASE("preprocess: paper-scale split sizes") {
    SynthSpec spec;
    spec.per_class = 2000;
    auto d = synth_generate(spec);
    auto [train, test] = preprocess(d, 2000, 1);
    CHECK(train.rows() + test.rows() == 10'000);
    CHECK(train.rows() == 8'000);
    CHECK(test.rows() == 2'000);
}

TEST_CASE("preprocess: scaler is fitted on train only") {
    // Hand-built data where one class has an outlier that must land in test
    // or train without leaking statistics: check scale params come from the
    // train rows alone.
    Dataset d;
    d.class_names = {"a", "b"};
    std::mt19937_64 rng(3);
    for (int i = 0; i < 40; ++i) {
        double base = i % 2 == 0 ? 10.0 : 20.0;
        d.features.push_back({base + (i % 5), static_cast<double>(i % 3)});
        std::vector<double> onehot{0.0, 0.0};
        onehot[i % 2] = 1.0;
        d.labels.push_back(onehot);
    }
    auto [train, test] = preprocess(d, 20, 11);
    REQUIRE(train.scale_min.size() == 2);
    double lo = train.scale_min[0], hi = train.scale_max[0];
    // recover original values from train rows only: all scaled values in [0,1]
    for (const auto& row : train.features) CHECK((row[0] >= 0.0 && row[0] <= 1.0));
    CHECK(lo < hi);

    SUBCASE("constant column maps to zero") {
        Dataset flat;
        flat.class_names = {"a", "b"};
        for (int i = 0; i < 10; ++i) {
            flat.features.push_back({5.0, static_cast<double>(i)});
            std::vector<double> onehot{0.0, 0.0};
            onehot[i % 2] = 1.0;
            flat.labels.push_back(onehot);
        }
        auto [tr, te] = preprocess(flat, 5, 1);
        for (const auto& row : tr.features) CHECK(row[0] == 0.0);
        for (const auto& row : te.features) CHECK(row[0] == 0.0);
    }
}

TEST_CASE("preprocess: class deficit raises a sampling error") {
    SynthSpec spec;
    spec.per_class = 3;
    auto d = synth_generate(spec);
    CHECK_THROWS_AS(preprocess(d, 4, 1), SamplingError);
}

TEST_CASE("synth_generate: deterministic, right shape") {
    SynthSpec spec;
    spec.per_class = 200;
    auto a = synth_generate(spec);
    auto b = synth_generate(spec);
    CHECK(a.rows() == 1000);
    CHECK(a.feature_count() == 21);
    CHECK(a.class_count() == 5);
    CHECK(a.features == b.features);

    spec.seed = 43;
    auto c = synth_generate(spec);
    CHECK(a.features != c.features);
    for (const auto& row : a.features)
        for (double v : row) REQUIRE((v >= 0.0 && v <= 1.0));
}

TEST_CASE("encrypt_dataset: round-trip and padding arithmetic") {
    he::HeParams params; // B=1024, S=32
    he::Context ctx(params);
    std::mt19937_64 rng(5);
    auto kp = he::keygen(params, rng);

    SynthSpec spec;
    spec.per_class = 20;
    auto d = synth_generate(spec);
    auto enc = encrypt_dataset(ctx, d, kp.pk, pack::Axis::Col);
    REQUIRE(enc.samples.size() == d.rows());
    CHECK(enc.x_layout.len == 21);
    CHECK(enc.y_layout.axis == pack::Axis::Col);

    for (size_t r = 0; r < d.rows(); ++r) {
        auto x = pack::unpack1d(ctx.decrypt(kp.sk, enc.samples[r].x), enc.x_layout);
        auto y = pack::unpack1d(ctx.decrypt(kp.sk, enc.samples[r].y), enc.y_layout);
        REQUIRE(x == d.features[r]);
        REQUIRE(y == d.labels[r]);
        // F=21 with S=32 leaves 11 zero slots at the tail of each segment
        auto slots = ctx.decrypt(kp.sk, enc.samples[r].x);
        for (uint32_t j = 21; j < 32; ++j) REQUIRE(slots[j] == 0.0);
    }

    SUBCASE("too many features") {
        SynthSpec fat;
        fat.features = 40;
        fat.per_class = 2;
        auto wide = synth_generate(fat);
        CHECK_THROWS_AS(encrypt_dataset(ctx, wide, kp.pk, pack::Axis::Col), CapacityError);
    }

    SUBCASE("file round-trip") {
        auto bytes = dataset_serialize(enc);
        auto back = dataset_deserialize(bytes);
        REQUIRE(back.samples.size() == enc.samples.size());
        CHECK(dataset_serialize(back) == bytes);
        bytes[0] = 'X';
        CHECK_THROWS_AS(dataset_deserialize(bytes), FormatError);
    }
}

TEST_CASE("evaluate: perfect predictions") {
    std::vector<size_t> truth{0, 1, 2, 3, 4, 0, 1};
    auto rep = evaluate(truth, truth, 5);
    CHECK(rep.accuracy == 1.0);
    CHECK(rep.macro_precision == 1.0);
    CHECK(rep.macro_recall == 1.0);
    CHECK(rep.hit_rate == 1.0);
}

TEST_CASE("evaluate: hand-counted two-class example") {
    std::vector<size_t> truth{0, 0, 1, 1};
    std::vector<size_t> preds{0, 1, 1, 1};
    auto rep = evaluate(preds, truth, 2);
    CHECK(rep.accuracy == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(rep.macro_precision == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(rep.macro_recall == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(rep.confusion[0][0] == 1);
    CHECK(rep.confusion[0][1] == 1);
    CHECK(rep.confusion[1][1] == 2);
}

TEST_CASE("evaluate: collapsed predictor on balanced truth") {
    std::vector<size_t> truth{0, 1, 2, 3, 4, 0, 1, 2, 3, 4};
    std::vector<size_t> preds(10, 0);
    auto rep = evaluate(preds, truth, 5);
    CHECK(rep.macro_recall == doctest::Approx(0.2).epsilon(1e-15)); // 1/C
}

TEST_CASE("evaluate: macro accuracy never undercuts the hit rate") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        size_t classes = 2 + rng() % 5;
        std::vector<size_t> truth(50), preds(50);
        for (size_t i = 0; i < truth.size(); ++i) {
            truth[i] = rng() % classes;
            preds[i] = rng() % classes;
        }
        auto rep = evaluate(preds, truth, classes);
        REQUIRE(rep.accuracy >= rep.hit_rate - 1e-12);
        REQUIRE(rep.accuracy >= 0.0);
        REQUIRE(rep.accuracy <= 1.0);
    }
}

TEST_CASE("evaluate: length mismatch is rejected") {
    std::vector<size_t> truth{0, 1};
    std::vector<size_t> preds{0};
    CHECK_THROWS_AS(evaluate(preds, truth, 2), ParamError);
}

TEST_CASE("metrics report renders text and json") {
    std::vector<size_t> truth{0, 0, 1, 1};
    std::vector<size_t> preds{0, 1, 1, 1};
    auto rep = evaluate(preds, truth, 2);
    auto text = rep.to_text();
    CHECK(text.find("accuracy=0.75") != std::string::npos);
    auto json = rep.to_json();
    CHECK(json.find("\"accuracy\": 0.75") != std::string::npos);
}
