#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "salso/labels.hpp"
#include "salso/losses.hpp"

namespace salso {

struct SalsoConfig {
    std::size_t n_runs = 16;
    double p_sa = 0.5;                  // probability of sequential-allocation initialization
    std::optional<int> max_clusters;    // k_d; empty means the largest cluster count among the draws
    std::size_t n_max_zealous = 10;
    std::size_t max_scans = 1000;       // cap on sweetening scans per call
    std::uint64_t seed = 0;
    std::size_t n_workers = 1;          // 0 uses every hardware thread

    void validate() const;
    // k_d clamped to [1, n]. Throws InputError for a non-positive request.
    int resolve_max_clusters(const DrawsMatrix& draws) const;
};

// The preset that reduces the search to the plain one-item-at-a-time greedy
// scheme: random initialization, no zealous updates, a single run.
SalsoConfig rastelli_friel_mode(std::uint64_t seed, std::optional<int> max_clusters = std::nullopt);

enum class InitMethod { Sequential, Random };
const char* to_string(InitMethod method);

struct RunDiagnostics {
    InitMethod init = InitMethod::Random;
    std::uint64_t seed = 0;
    std::size_t scans = 0;
    bool hit_max_scans = false;
    std::size_t zealous_attempts = 0;
    std::size_t zealous_accepted = 0;
    double wall_ms = 0.0;
    double loss = 0.0;
};

struct RunOutcome {
    ClusterLabels estimate;
    double loss = 0.0;
    RunDiagnostics diagnostics;
};

struct SalsoResult {
    ClusterLabels estimate;
    double expected_loss = 0.0;
    LossSpec spec;
    int max_clusters = 0;  // resolved k_d
    std::size_t best_run_index = 0;
    std::vector<RunDiagnostics> runs;
    double wall_ms = 0.0;
};

enum class Phase { Initialization, Sweetening, Zealous };

// One greedy placement. `labels` are the working 0-based column labels with
// the item still unallocated (-1); only valid inside the callback.
struct AllocationEvent {
    Phase phase;
    std::size_t item;
    std::span<const int> labels;
    std::span<const double> scores;
    std::size_t chosen;
    bool allow_new;
};
using AllocationObserver = std::function<void(const AllocationEvent&)>;

// Deterministic per-run seed from the master seed.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index);

class Objective;

// Working state of a single run: the candidate partition, the incremental
// structures that score placements against all draws, and the run's random
// stream. Not thread-safe; one per worker.
class RunState {
public:
    RunState(const LossEvaluator& evaluator, int max_clusters, std::uint64_t seed);
    ~RunState();
    RunState(const RunState&) = delete;
    RunState& operator=(const RunState&) = delete;

    int max_clusters() const { return max_clusters_; }
    std::size_t num_items() const { return n_; }
    std::mt19937_64& rng() { return rng_; }
    void set_observer(AllocationObserver observer) { observer_ = std::move(observer); }

    // Places the items one at a time, in uniformly random order, each at the
    // placement minimizing the expected loss over the items placed so far.
    void initialize_sequential();
    // Labels drawn independently and uniformly from {1..k_d}, then compacted.
    // Returns the raw (pre-compaction) 1-based labels.
    std::vector<int> initialize_random();
    void assign(const ClusterLabels& labels);

    struct SweetenStats {
        std::size_t scans = 0;
        bool hit_max_scans = false;
    };
    // Repeated full scans of remove-and-reallocate in fresh random order,
    // until a scan leaves the partition unchanged.
    SweetenStats sweeten(std::size_t max_scans);

    struct ZealousStats {
        std::size_t attempts = 0;
        std::size_t accepted = 0;
    };
    // Destroys up to `n_max_zealous` clusters in random order, reallocating
    // their items sequentially; each update is kept only on strict improvement.
    ZealousStats zealous_phase(std::size_t n_max_zealous);

    ClusterLabels labels() const;
    int num_clusters() const;
    // Objective of the current (fully allocated) candidate.
    double current_loss() const;
    // Incremental structures agree with a rebuild from the labels.
    bool verify() const;

private:
    void place(std::size_t item, Phase phase);
    std::vector<int> canonical_snapshot() const;

    const LossEvaluator* evaluator_;
    int max_clusters_;
    std::size_t n_;
    std::mt19937_64 rng_;
    std::unique_ptr<Objective> objective_;
    std::vector<std::size_t> order_;
    std::vector<double> scores_;
    AllocationObserver observer_;
};

// One iteration of the outer loop: initialize, sweeten, zealous updates,
// sweeten again if a zealous update was accepted, record.
RunOutcome run_once(const LossEvaluator& evaluator, const SalsoConfig& config, std::size_t run_index,
                    const AllocationObserver& observer = {});
RunOutcome run_once(const DrawsMatrix& draws, const LossSpec& spec, const SalsoConfig& config, std::size_t run_index);

// n_runs independent runs across the workers; the smallest loss wins, ties go
// to the lowest run index. The result does not depend on the worker count.
SalsoResult salso(const DrawsMatrix& draws, const LossSpec& spec, const SalsoConfig& config);

} // namespace salso
