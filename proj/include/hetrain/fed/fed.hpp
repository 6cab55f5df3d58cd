#pragma once

#include <functional>
#include <memory>
#include <thread>
#include <vector>

#include "hetrain/data/dataset.hpp"
#include "hetrain/fed/transport.hpp"
#include "hetrain/nn/train.hpp"

namespace hetrain::fed {

struct Partition {
    uint32_t worker_index = 0;
    std::vector<size_t> sample_indices;
};

/// Seeded shuffle followed by a round-robin split: partitions are disjoint,
/// cover every sample and differ in size by at most one.
std::vector<Partition> partition(size_t dataset_size, uint32_t workers, uint64_t seed);

/// Encrypted FedAvg: parameter-wise ciphertext sum, plaintext multiply by
/// 1/M, then a bootstrap of every aggregated parameter.
nn::EncryptedModel fedavg(const he::Context& ctx,
                          std::span<const nn::EncryptedModel> models);

struct MasterRound {
    uint32_t round = 0;
    double wall_ms = 0.0;
};

struct MasterResult {
    nn::EncryptedModel model;
    std::vector<MasterRound> trace;
};

using MasterProbeFn = std::function<void(const MasterRound&, const nn::EncryptedModel&)>;

/// Synchronous FedAvg master over already-connected workers: per round it
/// broadcasts the current model, blocks for every ROUND_DONE (timeout =
/// cfg.round_deadline_ms), aggregates and proceeds; ends with FINISH.
MasterResult master_run(const he::Context& ctx, const nn::TrainConfig& cfg,
                        nn::EncryptedModel model, const data::EncryptedDataset& dataset,
                        std::span<const std::unique_ptr<Connection>> workers,
                        const MasterProbeFn& probe = {});

/// Serves one master session on an established connection: HELLO handshake,
/// ASSIGN, then one local training pass per AGGREGATED round until FINISH.
void worker_serve(Connection& conn);

/// Binds host:port (0 picks a free port), announces "listening host:port" on
/// the stream, serves exactly one master session and returns. Connection
/// attempts during an active session are refused with an ERROR frame.
void worker_run(const std::string& host, uint16_t port, std::ostream& announce);

/// In-process worker pool: each worker thread serves one loopback session.
class InprocWorkers {
public:
    explicit InprocWorkers(size_t count);
    ~InprocWorkers();

    std::span<const std::unique_ptr<Connection>> connections() const { return master_ends_; }

private:
    std::vector<std::unique_ptr<Connection>> master_ends_;
    std::vector<std::thread> threads_;
};

} // namespace hetrain::fed
