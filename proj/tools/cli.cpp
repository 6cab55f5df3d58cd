#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "config.hpp"
#include "hetrain/common/bytes.hpp"
#include "hetrain/data/metrics.hpp"
#include "hetrain/fed/fed.hpp"
#include "hetrain/he/serialize.hpp"
#include "hetrain/nn/model.hpp"

namespace hetrain::cli {

namespace {

namespace fs = std::filesystem;

/// Command misuse that CLI11 cannot catch (mode/flag combinations).
class UsageError : public Error {
public:
    using Error::Error;
};

int exit_code_for(const Error& e) {
    if (dynamic_cast<const UsageError*>(&e)) return 1;
    if (dynamic_cast<const LevelExhaustedError*>(&e)) return 4;
    if (dynamic_cast<const ProtocolError*>(&e) || dynamic_cast<const TimeoutError*>(&e))
        return 3;
    return 2;
}

struct TraceRow {
    uint32_t round = 0;
    std::optional<uint64_t> iterations;
    std::optional<double> wall_ms;
    std::optional<double> loss;
    std::optional<double> accuracy;
};

void write_trace(const std::string& path, const std::vector<TraceRow>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    out << "round,iterations,wall_ms,loss,accuracy\n";
    out.precision(10);
    for (const TraceRow& r : rows) {
        out << r.round << ",";
        if (r.iterations) out << *r.iterations;
        out << ",";
        if (r.wall_ms) out << *r.wall_ms;
        out << ",";
        if (r.loss) out << *r.loss;
        out << ",";
        if (r.accuracy) out << *r.accuracy;
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

he::SecretKey load_sk(const std::string& path) { return he::sk_deserialize(read_file(path)); }
he::PublicKey load_pk(const std::string& path) { return he::pk_deserialize(read_file(path)); }

std::vector<size_t> read_index_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<size_t> out;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        try {
            out.push_back(std::stoull(line));
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected a class index");
        }
    }
    return out;
}

// Feature rows for inference: header plus F numeric columns; one extra
// trailing column (the label) is tolerated and ignored.
std::vector<std::vector<double>> read_feature_csv(const std::string& path, size_t features) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    size_t line_no = 0;
    if (!std::getline(in, line)) return rows; // empty file: no samples
    ++line_no;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != features && fields.size() != features + 1)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(features) + " feature columns, got " +
                             std::to_string(fields.size()));
        std::vector<double> row(features);
        for (size_t i = 0; i < features; ++i) {
            try {
                row[i] = std::stod(fields[i]);
            } catch (const std::exception&) {
                throw ParseError(path + ":" + std::to_string(line_no) +
                                 ": bad numeric value '" + fields[i] + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void require_new_file(const std::string& path, bool force) {
    if (!force && fs::exists(path))
        throw IoError(path + " exists; pass --force to overwrite");
}

// ------------------------------------------------------------------ keygen

struct KeygenOpts {
    std::string config;
    std::string out = "hetrain";
    bool force = false;
    std::optional<uint64_t> seed;
};

void cmd_keygen(const KeygenOpts& opt) {
    AppConfig cfg = resolve_config(opt.config);
    he::validate(cfg.train.he);

    uint64_t seed;
    if (opt.seed)
        seed = *opt.seed;
    else if (cfg.key_seed)
        seed = *cfg.key_seed;
    else {
        std::random_device rd;
        seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
    }

    const std::string sk_path = opt.out + ".sk";
    const std::string pk_path = opt.out + ".pk";
    require_new_file(sk_path, opt.force);
    require_new_file(pk_path, opt.force);

    std::mt19937_64 rng(seed);
    he::KeyPair kp = he::keygen(cfg.train.he, rng);
    write_file(sk_path, he::sk_serialize(kp.sk));
    write_file(pk_path, he::pk_serialize(kp.pk));
    std::cout << "fingerprint " << kp.sk.fp.hex() << "\n";
    std::cout << "wrote " << sk_path << " and " << pk_path << "\n";
}

// ------------------------------------------------------------ encrypt-data

struct EncryptDataOpts {
    std::string config;
    std::string csv;
    bool synth = false;
    std::string pk;
    std::string out;
    std::string test_csv;
    std::string test_truth;
};

void cmd_encrypt_data(const EncryptDataOpts& opt) {
    if (opt.synth == !opt.csv.empty())
        throw UsageError("encrypt-data: pass exactly one of --csv or --synth");
    AppConfig cfg = resolve_config(opt.config);
    he::PublicKey pk = load_pk(opt.pk);
    he::Context ctx(cfg.train.he);

    data::Dataset source = opt.synth ? data::synth_generate(cfg.synth)
                                     : data::load_csv(opt.csv, cfg.schema);
    auto [train_set, test_set] = data::preprocess(source, cfg.per_class, cfg.split_seed);

    nn::NetworkSpec spec = cfg.train.network();
    if (train_set.feature_count() != spec.input_dim())
        throw SchemaError("encrypt-data: dataset has " +
                          std::to_string(train_set.feature_count()) +
                          " features but the model expects " +
                          std::to_string(spec.input_dim()));
    if (train_set.class_count() != spec.output_dim())
        throw SchemaError("encrypt-data: dataset has " +
                          std::to_string(train_set.class_count()) +
                          " classes but the model expects " +
                          std::to_string(spec.output_dim()));

    auto enc = data::encrypt_dataset(ctx, train_set, pk, nn::label_axis(spec));
    write_file(opt.out, data::dataset_serialize(enc));
    std::cout << "wrote " << opt.out << ": " << enc.samples.size() << " encrypted pairs, x axis "
              << pack::axis_index(enc.x_layout.axis) << " (" << enc.x_layout.len
              << " features), y axis " << pack::axis_index(enc.y_layout.axis) << " ("
              << enc.y_layout.len << " classes)\n";

    if (!opt.test_csv.empty()) {
        data::save_csv(opt.test_csv, test_set);
        std::cout << "wrote " << opt.test_csv << ": " << test_set.rows() << " test rows\n";
    }
    if (!opt.test_truth.empty()) {
        std::ofstream truth(opt.test_truth, std::ios::trunc);
        if (!truth) throw IoError("cannot create " + opt.test_truth);
        for (size_t r = 0; r < test_set.rows(); ++r) truth << test_set.label_index(r) << "\n";
    }
}

// ------------------------------------------------------------------- train

struct TrainOpts {
    std::string config;
    std::string mode = "centralized";
    std::string data;
    std::string pk;
    std::string out;
    std::string workers;
    std::string probe_sk;
    std::string probe_csv;
    std::string trace;
};

struct Probe {
    std::optional<he::SecretKey> sk;
    data::Dataset rows;

    bool active() const { return sk.has_value() && rows.rows() > 0; }

    void fill(const he::Context& ctx, const nn::EncryptedModel& model, TraceRow& row) const {
        if (!active()) return;
        nn::PlainModel pm = nn::decrypt_model(ctx, *sk, model);
        double se = 0.0;
        size_t hits = 0;
        for (size_t r = 0; r < rows.rows(); ++r) {
            auto out = nn::forward_plain(pm, rows.features[r]);
            for (size_t c = 0; c < out.size(); ++c) {
                double d = rows.labels[r][c] - out[c];
                se += d * d;
            }
            size_t pred = static_cast<size_t>(
                std::max_element(out.begin(), out.end()) - out.begin());
            if (pred == rows.label_index(r)) ++hits;
        }
        row.loss = se / static_cast<double>(rows.rows());
        row.accuracy = static_cast<double>(hits) / static_cast<double>(rows.rows());
    }
};

void cmd_train(const TrainOpts& opt) {
    if (opt.mode != "centralized" && opt.mode != "distributed")
        throw UsageError("train: --mode must be centralized or distributed");
    const bool distributed = opt.mode == "distributed";
    if (distributed && opt.workers.empty())
        throw UsageError("train: distributed mode requires --workers endpoints");

    AppConfig app = resolve_config(opt.config);
    nn::TrainConfig cfg = app.train;
    cfg.validate();
    he::Context ctx(cfg.he);
    he::PublicKey pk = load_pk(opt.pk);

    auto dataset = data::dataset_deserialize(read_file(opt.data));
    if (dataset.samples.empty()) throw ParamError("train: dataset file holds no samples");
    nn::NetworkSpec spec = cfg.network();
    if (dataset.x_layout.len != spec.input_dim())
        throw LayoutError("train: dataset features " + std::to_string(dataset.x_layout.len) +
                          " do not match the model input " + std::to_string(spec.input_dim()));
    if (dataset.y_layout.len != spec.output_dim() ||
        dataset.y_layout.axis != nn::label_axis(spec))
        throw LayoutError("train: dataset labels were packed for a different model depth");

    nn::ActivationPoly act = nn::cheb_fit_silu(cfg.act_degree, cfg.act_lo, cfg.act_hi);
    nn::PlainModel plain = nn::init_model(spec, act, cfg.init_seed);
    nn::EncryptedModel model = nn::encrypt_model(ctx, plain, pk);

    Probe probe;
    if (!opt.probe_sk.empty()) {
        probe.sk = load_sk(opt.probe_sk);
        if (!opt.probe_csv.empty()) probe.rows = data::load_csv(opt.probe_csv, app.schema);
    }

    std::vector<TraceRow> trace;
    nn::EncryptedModel final_model{};

    if (!distributed) {
        auto parts = fed::partition(dataset.samples.size(), 1, cfg.partition_seed);
        std::vector<nn::EncryptedSample> ordered;
        ordered.reserve(parts[0].sample_indices.size());
        for (size_t idx : parts[0].sample_indices) ordered.push_back(dataset.samples[idx]);

        auto t_prev = std::chrono::steady_clock::now();
        auto result = nn::train(
            ctx, std::move(model), ordered, cfg,
            [&](const nn::RoundStat& stat, const nn::EncryptedModel& m) {
                auto now = std::chrono::steady_clock::now();
                TraceRow row{stat.round, stat.iterations, {}, {}, {}};
                row.wall_ms = std::chrono::duration<double, std::milli>(now - t_prev).count();
                t_prev = now;
                probe.fill(ctx, m, row);
                trace.push_back(row);
            });
        final_model = std::move(result.model);
    } else {
        std::optional<fed::InprocWorkers> inproc;
        std::vector<std::unique_ptr<fed::Connection>> conns;
        if (opt.workers.rfind("inproc:", 0) == 0) {
            int n = std::stoi(opt.workers.substr(7));
            if (n < 1) throw UsageError("train: inproc worker count must be >= 1");
            inproc.emplace(static_cast<size_t>(n));
            auto result = fed::master_run(
                ctx, cfg, std::move(model), dataset, inproc->connections(),
                [&](const fed::MasterRound& mr, const nn::EncryptedModel& m) {
                    TraceRow row{mr.round, {}, mr.wall_ms, {}, {}};
                    probe.fill(ctx, m, row);
                    trace.push_back(row);
                });
            final_model = std::move(result.model);
        } else {
            std::stringstream ss(opt.workers);
            std::string endpoint;
            while (std::getline(ss, endpoint, ',')) {
                if (endpoint.empty()) continue;
                auto [host, port] = fed::parse_endpoint(endpoint);
                conns.push_back(fed::tcp_connect(host, port, cfg.round_deadline_ms));
            }
            if (conns.empty()) throw UsageError("train: no usable worker endpoints");
            auto result = fed::master_run(
                ctx, cfg, std::move(model), dataset, conns,
                [&](const fed::MasterRound& mr, const nn::EncryptedModel& m) {
                    TraceRow row{mr.round, {}, mr.wall_ms, {}, {}};
                    probe.fill(ctx, m, row);
                    trace.push_back(row);
                });
            final_model = std::move(result.model);
        }
    }

    write_file(opt.out, nn::model_serialize(final_model));
    const std::string trace_path = opt.trace.empty() ? opt.out + ".trace.csv" : opt.trace;
    write_trace(trace_path, trace);
    std::cout << "wrote " << opt.out << " after " << cfg.rounds << " rounds; trace in "
              << trace_path << "\n";
}

// ------------------------------------------------------------------ worker

struct WorkerOpts {
    std::string listen = "127.0.0.1:0";
};

void cmd_worker(const WorkerOpts& opt) {
    auto [host, port] = fed::parse_endpoint(opt.listen);
    fed::worker_run(host, port, std::cout);
    std::cout << "session finished\n";
}

// ------------------------------------------------------------------- infer

struct InferOpts {
    std::string model;
    std::string sk;
    std::string pk;
    std::string input;
    std::string out;
    bool encrypted = false;
};

void cmd_infer(const InferOpts& opt) {
    auto loaded = nn::model_deserialize(read_file(opt.model));
    he::SecretKey sk = load_sk(opt.sk);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!opt.out.empty()) {
        file.open(opt.out, std::ios::trunc);
        if (!file) throw IoError("cannot create " + opt.out);
        out = &file;
    }

    he::Context ctx(sk.params);
    nn::PlainModel plain;
    if (auto* enc = std::get_if<nn::EncryptedModel>(&loaded))
        plain = nn::decrypt_model(ctx, sk, *enc);
    else
        plain = std::get<nn::PlainModel>(loaded);

    auto rows = read_feature_csv(opt.input, plain.spec.input_dim());

    if (!opt.encrypted) {
        for (const auto& row : rows) *out << nn::predict_plain(plain, row) << "\n";
        return;
    }

    if (opt.pk.empty()) throw UsageError("infer: encrypted mode requires --pk");
    he::PublicKey pk = load_pk(opt.pk);
    nn::EncryptedModel model;
    if (auto* enc = std::get_if<nn::EncryptedModel>(&loaded))
        model = std::move(*enc);
    else
        model = nn::encrypt_model_unchecked(ctx, plain, pk); // inference needs no step audit

    const auto& p = ctx.params();
    pack::VecLayout out_layout{model.spec.output_dim(), nn::label_axis(model.spec),
                               p.slot_size, p.ct_size};
    for (const auto& row : rows) {
        auto x_ct = ctx.encrypt(pk, pack::pack1d(row, pack::Axis::Row, p.slot_size, p.ct_size));
        auto logits = pack::unpack1d(ctx.decrypt(sk, nn::forward(ctx, model, x_ct).output()),
                                     out_layout);
        *out << (std::max_element(logits.begin(), logits.end()) - logits.begin()) << "\n";
    }
}

// -------------------------------------------------------------------- eval

struct EvalOpts {
    std::string preds;
    std::string truth;
    size_t classes = 5;
    std::string out;
};

void cmd_eval(const EvalOpts& opt) {
    auto preds = read_index_file(opt.preds);
    auto truth = read_index_file(opt.truth);
    auto rep = data::evaluate(preds, truth, opt.classes);
    std::cout << rep.to_text();
    if (!opt.out.empty()) {
        auto json = rep.to_json();
        write_file(opt.out, std::span(reinterpret_cast<const uint8_t*>(json.data()),
                                      json.size()));
    }
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"encrypted-training toolkit: SIMD-packed homomorphic MLP training,\n"
                 "federated averaging over encrypted models, and traffic classification"};
    app.require_subcommand(1);

    KeygenOpts keygen_opts;
    auto* keygen = app.add_subcommand("keygen", "generate a key pair");
    keygen->add_option("--config", keygen_opts.config, "config file");
    keygen->add_option("--out", keygen_opts.out, "output path prefix (.sk/.pk appended)");
    keygen->add_flag("--force", keygen_opts.force, "overwrite existing key files");
    uint64_t seed_flag = 0;
    auto* seed_opt = keygen->add_option("--seed", seed_flag, "deterministic key seed");

    EncryptDataOpts enc_opts;
    auto* encd = app.add_subcommand("encrypt-data", "preprocess and encrypt a dataset");
    encd->add_option("--config", enc_opts.config, "config file");
    encd->add_option("--csv", enc_opts.csv, "source CSV (header, features, label column)");
    encd->add_flag("--synth", enc_opts.synth, "use the synthetic traffic generator");
    encd->add_option("--pk", enc_opts.pk, "public key file")->required();
    encd->add_option("--out", enc_opts.out, "encrypted dataset output")->required();
    encd->add_option("--test-csv", enc_opts.test_csv, "write the held-out test rows here");
    encd->add_option("--test-truth", enc_opts.test_truth, "write test class indices here");

    TrainOpts train_opts;
    auto* train = app.add_subcommand("train", "train the encrypted model");
    train->add_option("--config", train_opts.config, "config file");
    train->add_option("--mode", train_opts.mode, "centralized | distributed");
    train->add_option("--data", train_opts.data, "encrypted dataset file")->required();
    train->add_option("--pk", train_opts.pk, "public key file")->required();
    train->add_option("--out", train_opts.out, "model output file")->required();
    train->add_option("--workers", train_opts.workers,
                      "comma-separated host:port list, or inproc:N");
    train->add_option("--probe-sk", train_opts.probe_sk,
                      "secret key for per-round plaintext evaluation (testing only; "
                      "this breaks the privacy model)");
    train->add_option("--probe-csv", train_opts.probe_csv, "scaled rows to probe against");
    train->add_option("--trace", train_opts.trace, "trace output path");

    WorkerOpts worker_opts;
    auto* worker = app.add_subcommand("worker", "run a training worker");
    worker->add_option("--listen", worker_opts.listen, "host:port (port 0 picks one)");

    InferOpts infer_opts;
    auto* infer = app.add_subcommand("infer", "classify feature rows");
    infer->add_option("--model", infer_opts.model, "model file")->required();
    infer->add_option("--sk", infer_opts.sk, "secret key file")->required();
    infer->add_option("--pk", infer_opts.pk, "public key (encrypted mode)");
    infer->add_option("--input", infer_opts.input, "feature CSV")->required();
    infer->add_option("--out", infer_opts.out, "predictions output (default stdout)");
    infer->add_flag("--encrypted", infer_opts.encrypted,
                    "run the forward pass on encrypted inputs");

    EvalOpts eval_opts;
    auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
    eval->add_option("--preds", eval_opts.preds, "predictions file")->required();
    eval->add_option("--truth", eval_opts.truth, "ground truth file")->required();
    eval->add_option("--classes", eval_opts.classes, "class count");
    eval->add_option("--out", eval_opts.out, "metrics JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (keygen->parsed()) {
            if (!seed_opt->empty()) keygen_opts.seed = seed_flag;
            cmd_keygen(keygen_opts);
        } else if (encd->parsed()) {
            cmd_encrypt_data(enc_opts);
        } else if (train->parsed()) {
            cmd_train(train_opts);
        } else if (worker->parsed()) {
            cmd_worker(worker_opts);
        } else if (infer->parsed()) {
            cmd_infer(infer_opts);
        } else if (eval->parsed()) {
            cmd_eval(eval_opts);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace hetrain::cli
