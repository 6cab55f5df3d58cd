#include "hetrain/fed/fed.hpp"

#include <atomic>
#include <chrono>
#include <ostream>
#include <random>

#include "hetrain/common/rng.hpp"
#include "hetrain/nn/model.hpp"

namespace hetrain::fed {

std::vector<Partition> partition(size_t dataset_size, uint32_t workers, uint64_t seed) {
    if (workers < 1) throw PartitionError("partition: need at least one worker");
    if (dataset_size < workers)
        throw PartitionError("partition: " + std::to_string(workers) + " workers but only " +
                             std::to_string(dataset_size) + " samples");
    std::mt19937_64 rng(seed);
    auto order = shuffled_indices(dataset_size, rng);
    std::vector<Partition> parts(workers);
    for (uint32_t w = 0; w < workers; ++w) parts[w].worker_index = w;
    for (size_t i = 0; i < order.size(); ++i)
        parts[i % workers].sample_indices.push_back(order[i]);
    return parts;
}

nn::EncryptedModel fedavg(const he::Context& ctx,
                          std::span<const nn::EncryptedModel> models) {
    if (models.empty()) throw ParamError("fedavg: no models to aggregate");
    const nn::EncryptedModel& first = models[0];
    for (const nn::EncryptedModel& m : models) {
        if (!(m.spec == first.spec) || m.act.coeffs != first.act.coeffs)
            throw IncompatibleError("fedavg: models disagree on spec or activation");
    }
    const double inv_m = 1.0 / static_cast<double>(models.size());
    nn::EncryptedModel out = first;
    for (size_t k = 0; k < first.layers.size(); ++k) {
        he::Ciphertext w_sum = first.layers[k].w_ct;
        he::Ciphertext b_sum = first.layers[k].b_ct;
        for (size_t m = 1; m < models.size(); ++m) {
            w_sum = ctx.add(w_sum, models[m].layers[k].w_ct);
            b_sum = ctx.add(b_sum, models[m].layers[k].b_ct);
        }
        out.layers[k].w_ct = ctx.bootstrap(ctx.mult_plain(w_sum, inv_m));
        out.layers[k].b_ct = ctx.bootstrap(ctx.mult_plain(b_sum, inv_m));
    }
    return out;
}

namespace {

nn::EncryptedModel decode_model(std::span<const uint8_t> bytes, const char* who) {
    auto loaded = nn::model_deserialize(bytes);
    auto* enc = std::get_if<nn::EncryptedModel>(&loaded);
    if (!enc) throw ProtocolError(std::string(who) + ": expected an encrypted model payload");
    return std::move(*enc);
}

data::EncryptedDataset select(const data::EncryptedDataset& dataset,
                              const std::vector<size_t>& rows) {
    data::EncryptedDataset out;
    out.x_layout = dataset.x_layout;
    out.y_layout = dataset.y_layout;
    for (size_t r : rows) out.samples.push_back(dataset.samples[r]);
    return out;
}

} // namespace

MasterResult master_run(const he::Context& ctx, const nn::TrainConfig& cfg,
                        nn::EncryptedModel model, const data::EncryptedDataset& dataset,
                        std::span<const std::unique_ptr<Connection>> workers,
                        const MasterProbeFn& probe) {
    cfg.validate();
    const uint32_t m = static_cast<uint32_t>(workers.size());
    if (m == 0) throw ParamError("master: no worker connections");
    if (dataset.samples.empty()) throw ParamError("master: empty dataset");
    const uint32_t local_batch = cfg.batch / m;
    if (local_batch == 0)
        throw ParamError("master: batch " + std::to_string(cfg.batch) +
                         " cannot be split across " + std::to_string(m) + " workers");

    auto parts = partition(dataset.samples.size(), m, cfg.partition_seed);
    auto model_bytes = nn::model_serialize(model);

    auto abort_all = [&](const std::string& text) {
        for (const auto& conn : workers) {
            try {
                conn->send(ErrorMsg{0, ErrCode::Protocol, text});
            } catch (const Error&) {
            }
        }
    };

    try {
        for (uint32_t w = 0; w < m; ++w) {
            workers[w]->send(Hello{0, kProtocolVersion});
            Message reply = workers[w]->recv(cfg.round_deadline_ms);
            auto* hello = std::get_if<Hello>(&reply);
            if (!hello)
                throw ProtocolError("master: worker " + workers[w]->peer() + " sent " +
                                    type_name(type_of(reply)) + " instead of HELLO");
            if (hello->version != kProtocolVersion)
                throw ProtocolError("master: worker " + workers[w]->peer() +
                                    " speaks protocol v" + std::to_string(hello->version));

            Assign assign;
            assign.round = 0;
            assign.worker_index = w;
            assign.worker_count = m;
            assign.cfg = cfg;
            assign.cfg.batch = local_batch;
            assign.cfg.workers = m;
            assign.model = model_bytes;
            assign.dataset = data::dataset_serialize(select(dataset, parts[w].sample_indices));
            workers[w]->send(std::move(assign));
        }

        MasterResult result{std::move(model), {}};
        for (uint32_t round = 1; round <= cfg.rounds; ++round) {
            auto t0 = std::chrono::steady_clock::now();
            auto bytes = nn::model_serialize(result.model);
            for (const auto& conn : workers) conn->send(Aggregated{round, bytes});

            std::vector<nn::EncryptedModel> reports;
            reports.reserve(m);
            for (const auto& conn : workers) {
                Message msg;
                try {
                    msg = conn->recv(cfg.round_deadline_ms);
                } catch (const TimeoutError&) {
                    throw TimeoutError("master: worker " + conn->peer() +
                                       " missed the round " + std::to_string(round) +
                                       " deadline of " +
                                       std::to_string(cfg.round_deadline_ms) + " ms");
                }
                if (auto* err = std::get_if<ErrorMsg>(&msg))
                    throw ProtocolError("master: worker " + conn->peer() +
                                        " reported: " + err->text);
                auto* done = std::get_if<RoundDone>(&msg);
                if (!done)
                    throw ProtocolError("master: worker " + conn->peer() + " sent " +
                                        type_name(type_of(msg)) + " instead of ROUND_DONE");
                if (done->round != round)
                    throw ProtocolError("master: worker " + conn->peer() +
                                        " answered for stale round " +
                                        std::to_string(done->round));
                reports.push_back(decode_model(done->model, "master"));
            }
            result.model = fedavg(ctx, reports);
            double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
            result.trace.push_back({round, ms});
            if (probe) probe(result.trace.back(), result.model);
        }
        for (const auto& conn : workers) conn->send(Finish{cfg.rounds});
        return result;
    } catch (const ProtocolError& e) {
        abort_all(e.what());
        throw;
    } catch (const TimeoutError& e) {
        abort_all(e.what());
        throw;
    }
}

namespace {

// recv that answers malformed frames with an ERROR before giving up
Message recv_checked(Connection& conn, uint32_t round) {
    try {
        return conn.recv(0);
    } catch (const FormatError& e) {
        try {
            conn.send(ErrorMsg{round, ErrCode::Malformed, e.what()});
        } catch (const Error&) {
        }
        throw ProtocolError(std::string("worker: malformed frame: ") + e.what());
    }
}

} // namespace

void worker_serve(Connection& conn) {
    Message first = recv_checked(conn, 0);
    if (!std::holds_alternative<Hello>(first)) {
        conn.send(ErrorMsg{0, ErrCode::Protocol, "expected HELLO"});
        throw ProtocolError("worker: expected HELLO, got " +
                            std::string(type_name(type_of(first))));
    }
    conn.send(Hello{0, kProtocolVersion});

    Message second = recv_checked(conn, 0);
    auto* assign = std::get_if<Assign>(&second);
    if (!assign) {
        conn.send(ErrorMsg{0, ErrCode::Protocol, "expected ASSIGN"});
        throw ProtocolError("worker: expected ASSIGN, got " +
                            std::string(type_name(type_of(second))));
    }

    nn::TrainConfig cfg = assign->cfg;
    cfg.validate();
    he::Context ctx(cfg.he, seed_mix(cfg.shuffle_seed, assign->worker_index));
    nn::EncryptedModel model = decode_model(assign->model, "worker");
    data::EncryptedDataset shard = data::dataset_deserialize(assign->dataset);
    if (shard.samples.empty()) {
        conn.send(ErrorMsg{0, ErrCode::Protocol, "empty partition"});
        throw ProtocolError("worker: assigned an empty partition");
    }

    nn::TrainConfig local = cfg;
    local.rounds = cfg.local_epochs;
    local.shuffle_seed = cfg.shuffle_seed + assign->worker_index;

    uint32_t expected_round = 1;
    while (true) {
        Message msg = recv_checked(conn, expected_round);
        if (std::holds_alternative<Finish>(msg)) return;
        if (auto* err = std::get_if<ErrorMsg>(&msg))
            throw ProtocolError("worker: master reported: " + err->text);
        auto* agg = std::get_if<Aggregated>(&msg);
        if (!agg) {
            conn.send(ErrorMsg{expected_round, ErrCode::Protocol, "expected AGGREGATED"});
            throw ProtocolError("worker: expected AGGREGATED, got " +
                                std::string(type_name(type_of(msg))));
        }
        if (agg->round != expected_round) {
            conn.send(ErrorMsg{expected_round, ErrCode::StaleRound,
                               "expected round " + std::to_string(expected_round) + ", got " +
                                   std::to_string(agg->round)});
            throw ProtocolError("worker: round mismatch");
        }

        model = decode_model(agg->model, "worker");
        local.round_offset = (agg->round - 1) * cfg.local_epochs;
        auto result = nn::train(ctx, std::move(model), shard.samples, local);
        model = std::move(result.model);
        conn.send(RoundDone{agg->round, nn::model_serialize(model)});
        ++expected_round;
    }
}

void worker_run(const std::string& host, uint16_t port, std::ostream& announce) {
    TcpListener listener(host, port);
    announce << "listening " << host << ":" << listener.port() << std::endl;
    auto session = listener.accept(0);

    // single-session worker: refuse stray masters while this session is live
    std::atomic<bool> done{false};
    std::thread refuser([&] {
        while (!done.load()) {
            if (!listener.pending(50)) continue;
            try {
                auto extra = listener.accept(0);
                extra->send(ErrorMsg{0, ErrCode::Busy, "worker busy with another master"});
            } catch (const Error&) {
            }
        }
    });
    try {
        worker_serve(*session);
    } catch (...) {
        done.store(true);
        refuser.join();
        throw;
    }
    done.store(true);
    refuser.join();
}

InprocWorkers::InprocWorkers(size_t count) {
    for (size_t i = 0; i < count; ++i) {
        auto [master_end, worker_end] = loopback_pair();
        master_ends_.push_back(std::move(master_end));
        threads_.emplace_back(
            [conn = std::shared_ptr<Connection>(std::move(worker_end))]() mutable {
                try {
                    worker_serve(*conn);
                } catch (const Error&) {
                    // session aborted; the master side reports the failure
                }
            });
    }
}

InprocWorkers::~InprocWorkers() {
    for (auto& conn : master_ends_) conn->close();
    for (auto& t : threads_)
        if (t.joinable()) t.join();
}

} // namespace hetrain::fed
