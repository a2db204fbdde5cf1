#include "salso/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "salso/allocation.hpp"
#include "salso/contingency.hpp"
#include "salso/errors.hpp"

namespace salso {

// Candidate partition plus whatever incremental state scores placements.
class Objective {
public:
    virtual ~Objective() = default;
    virtual std::span<const int> labels() const = 0;
    virtual int num_clusters() const = 0;
    virtual void clear() = 0;
    virtual void assign(std::span<const int> labels) = 0;
    virtual void allocate(std::size_t item, int col) = 0;
    virtual void deallocate(std::size_t item) = 0;
    virtual void scores(std::size_t item, bool allow_new, std::vector<double>& out) = 0;
    virtual bool verify() const = 0;
};

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Contingency-table objective for every draw-based loss.
class TableObjective final : public Objective {
public:
    TableObjective(const DrawsMatrix& draws, const LossSpec& spec, int max_clusters)
        : cache_(draws, max_clusters), scorer_(spec, draws.num_items()) {}

    std::span<const int> labels() const override { return cache_.labels(); }
    int num_clusters() const override { return cache_.num_columns(); }
    void clear() override { cache_.clear(); }
    void assign(std::span<const int> labels) override { cache_.assign(labels); }
    void allocate(std::size_t item, int col) override { cache_.allocate(item, col); }
    void deallocate(std::size_t item) override { cache_.deallocate(item); }
    void scores(std::size_t item, bool allow_new, std::vector<double>& out) override {
        scorer_.scores(cache_, item, allow_new, out);
    }
    bool verify() const override { return cache_.verify(); }

private:
    TableCache cache_;
    AllocationScorer scorer_;
};

// Jensen lower bound of the expected VI, scored on the similarity matrix.
// mass_[i] = sum of pi_ij over allocated j in i's cluster (including i).
class PsmObjective final : public Objective {
public:
    PsmObjective(const SimilarityMatrix& psm, int max_clusters)
        : psm_(&psm), max_clusters_(max_clusters), labels_(psm.size(), TableCache::kUnallocated),
          mass_(psm.size(), 0.0), xlogx_(psm.size() + 1) {}

    std::span<const int> labels() const override { return labels_; }
    int num_clusters() const override { return static_cast<int>(sizes_.size()); }

    void clear() override {
        std::fill(labels_.begin(), labels_.end(), TableCache::kUnallocated);
        std::fill(mass_.begin(), mass_.end(), 0.0);
        sizes_.clear();
    }

    void assign(std::span<const int> labels) override {
        clear();
        std::vector<int> remap;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == TableCache::kUnallocated) continue;
            if (static_cast<std::size_t>(labels[i]) >= remap.size()) remap.resize(labels[i] + 1, -1);
            if (remap[labels[i]] < 0) remap[labels[i]] = num_clusters();
            allocate(i, remap[labels[i]]);
        }
    }

    void allocate(std::size_t item, int col) override {
        if (labels_[item] != TableCache::kUnallocated) throw std::logic_error("allocate: item already allocated");
        if (col == num_clusters()) {
            if (num_clusters() >= max_clusters_) throw std::logic_error("allocate: column limit reached");
            sizes_.push_back(0);
        }
        const auto row = psm_->row(item);
        double own = 1.0;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] != col) continue;
            mass_[i] += row[i];
            own += row[i];
        }
        mass_[item] = own;
        labels_[item] = col;
        ++sizes_[col];
    }

    void deallocate(std::size_t item) override {
        const int col = labels_[item];
        if (col == TableCache::kUnallocated) throw std::logic_error("deallocate: item is not allocated");
        labels_[item] = TableCache::kUnallocated;
        mass_[item] = 0.0;
        const auto row = psm_->row(item);
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == col) mass_[i] -= row[i];
        if (--sizes_[col] == 0) {
            const int last = num_clusters() - 1;
            if (col != last) {
                sizes_[col] = sizes_[last];
                for (int& l : labels_)
                    if (l == last) l = col;
            }
            sizes_.pop_back();
        }
    }

    void scores(std::size_t item, bool allow_new, std::vector<double>& out) override {
        if (labels_[item] != TableCache::kUnallocated)
            throw std::logic_error("allocation_scores: item is still allocated");
        const int q = num_clusters();
        out.assign(q + (allow_new ? 1 : 0), 0.0);
        if (out.size() == 1) return;
        sum_pi_.assign(q, 0.0);
        sum_log_.assign(q, 0.0);
        const auto row = psm_->row(item);
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            const int c = labels_[i];
            if (c == TableCache::kUnallocated || row[i] == 0.0) continue;
            sum_pi_[c] += row[i];
            sum_log_[c] += std::log2(mass_[i] + row[i]) - std::log2(mass_[i]);
        }
        for (int j = 0; j < q; ++j) {
            const double size_term = xlogx_.f(sizes_[j] + 1);
            out[j] = size_term - 2.0 * (sum_log_[j] + std::log2(1.0 + sum_pi_[j]));
        }
        if (allow_new) out[q] = 0.0;
    }

    bool verify() const override {
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] == TableCache::kUnallocated) continue;
            double m = 0.0;
            for (std::size_t j = 0; j < labels_.size(); ++j)
                if (labels_[j] == labels_[i]) m += (*psm_)(i, j);
            if (std::abs(m - mass_[i]) > 1e-9) return false;
        }
        return true;
    }

private:
    const SimilarityMatrix* psm_;
    int max_clusters_;
    std::vector<int> labels_;
    std::vector<double> mass_;
    std::vector<std::size_t> sizes_;
    XLogXTable xlogx_;
    std::vector<double> sum_pi_, sum_log_;
};

std::vector<int> canonical_of(std::span<const int> labels) {
    std::vector<int> remap;
    std::vector<int> out(labels.size());
    int next = 1;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int l = labels[i];
        if (static_cast<std::size_t>(l) >= remap.size()) remap.resize(l + 1, 0);
        if (remap[l] == 0) remap[l] = next++;
        out[i] = remap[l];
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

void SalsoConfig::validate() const {
    if (n_runs == 0) throw InputError("the number of runs must be positive");
    if (!(p_sa >= 0.0 && p_sa <= 1.0)) throw InputError("p_sa must lie in [0, 1]");
    if (max_clusters && *max_clusters < 1) throw InputError("the maximum number of clusters must be positive");
}

int SalsoConfig::resolve_max_clusters(const DrawsMatrix& draws) const {
    validate();
    const int n = static_cast<int>(draws.num_items());
    return std::min(max_clusters.value_or(draws.max_clusters()), n);
}

SalsoConfig rastelli_friel_mode(std::uint64_t seed, std::optional<int> max_clusters) {
    SalsoConfig c;
    c.n_runs = 1;
    c.p_sa = 0.0;
    c.n_max_zealous = 0;
    c.seed = seed;
    c.max_clusters = max_clusters;
    return c;
}

const char* to_string(InitMethod method) { return method == InitMethod::Sequential ? "sequential" : "random"; }

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t run_seed(std::uint64_t master_seed, std::size_t run_index) {
    return mix64(master_seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(run_index) + 1)));
}

// ---------------------------------------------------------------------------
// RunState

RunState::RunState(const LossEvaluator& evaluator, int max_clusters, std::uint64_t seed)
    : evaluator_(&evaluator), max_clusters_(max_clusters), n_(evaluator.draws().num_items()), rng_(seed),
      order_(n_) {
    if (max_clusters_ < 1 || static_cast<std::size_t>(max_clusters_) > n_)
        throw InputError("the maximum number of clusters must lie in [1, n]");
    if (evaluator.spec().kind == LossKind::VILB)
        objective_ = std::make_unique<PsmObjective>(*evaluator.psm(), max_clusters_);
    else
        objective_ = std::make_unique<TableObjective>(evaluator.draws(), evaluator.spec(), max_clusters_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
}

RunState::~RunState() = default;

void RunState::place(std::size_t item, Phase phase) {
    const int q = objective_->num_clusters();
    const bool allow_new = q < max_clusters_;
    objective_->scores(item, allow_new, scores_);
    const std::size_t chosen = argmin(scores_);
    if (observer_) observer_({phase, item, objective_->labels(), scores_, chosen, allow_new});
    objective_->allocate(item, static_cast<int>(chosen));
}

void RunState::initialize_sequential() {
    objective_->clear();
    std::shuffle(order_.begin(), order_.end(), rng_);
    for (std::size_t item : order_) place(item, Phase::Initialization);
}

std::vector<int> RunState::initialize_random() {
    std::uniform_int_distribution<int> label(0, max_clusters_ - 1);
    std::vector<int> raw(n_);
    for (int& l : raw) l = label(rng_);
    objective_->assign(raw);
    for (int& l : raw) ++l;
    return raw;
}

void RunState::assign(const ClusterLabels& labels) {
    if (labels.size() != n_) throw InputError("candidate length does not match the draws");
    if (labels.num_clusters() > max_clusters_) throw InputError("candidate exceeds the maximum number of clusters");
    std::vector<int> zero_based(labels.values().begin(), labels.values().end());
    for (int& l : zero_based) --l;
    objective_->assign(zero_based);
}

std::vector<int> RunState::canonical_snapshot() const { return canonical_of(objective_->labels()); }

RunState::SweetenStats RunState::sweeten(std::size_t max_scans) {
    SweetenStats stats;
    while (true) {
        if (stats.scans == max_scans) {
            stats.hit_max_scans = true;
            break;
        }
        ++stats.scans;
        const std::vector<int> before = canonical_snapshot();
        std::shuffle(order_.begin(), order_.end(), rng_);
        for (std::size_t item : order_) {
            objective_->deallocate(item);
            place(item, Phase::Sweetening);
        }
        if (canonical_snapshot() == before) break;
    }
    return stats;
}

RunState::ZealousStats RunState::zealous_phase(std::size_t n_max_zealous) {
    ZealousStats stats;
    if (n_max_zealous == 0) return stats;

    // Clusters are snapshotted as item sets in random order. Each target is
    // re-resolved at its turn to the current cluster of its smallest item.
    std::vector<std::vector<std::size_t>> targets(objective_->num_clusters());
    const auto labels = objective_->labels();
    for (std::size_t i = 0; i < n_; ++i) targets[labels[i]].push_back(i);
    std::shuffle(targets.begin(), targets.end(), rng_);
    if (targets.size() > n_max_zealous) targets.resize(n_max_zealous);

    double loss = current_loss();
    std::vector<std::size_t> members;
    for (const auto& target : targets) {
        const std::vector<int> snapshot(objective_->labels().begin(), objective_->labels().end());
        const int col = snapshot[target.front()];
        members.clear();
        for (std::size_t i = 0; i < n_; ++i)
            if (snapshot[i] == col) members.push_back(i);
        for (std::size_t i : members) objective_->deallocate(i);
        std::shuffle(members.begin(), members.end(), rng_);
        for (std::size_t i : members) place(i, Phase::Zealous);
        ++stats.attempts;

        const double candidate_loss = current_loss();
        if (candidate_loss < loss && canonical_snapshot() != canonical_of(snapshot)) {
            loss = candidate_loss;
            ++stats.accepted;
        } else {
            objective_->assign(snapshot);
        }
    }
    return stats;
}

ClusterLabels RunState::labels() const { return ClusterLabels::from_canonical(canonical_snapshot()); }

int RunState::num_clusters() const { return objective_->num_clusters(); }

double RunState::current_loss() const { return (*evaluator_)(labels()); }

bool RunState::verify() const { return objective_->verify(); }

// ---------------------------------------------------------------------------

RunOutcome run_once(const LossEvaluator& evaluator, const SalsoConfig& config, std::size_t run_index,
                    const AllocationObserver& observer) {
    const auto start = Clock::now();
    const int k_d = config.resolve_max_clusters(evaluator.draws());
    RunOutcome out;
    out.diagnostics.seed = run_seed(config.seed, run_index);
    RunState state(evaluator, k_d, out.diagnostics.seed);
    if (observer) state.set_observer(observer);

    if (uniform01(state.rng()) < config.p_sa) {
        out.diagnostics.init = InitMethod::Sequential;
        state.initialize_sequential();
    } else {
        out.diagnostics.init = InitMethod::Random;
        state.initialize_random();
    }

    auto sweet = state.sweeten(config.max_scans);
    out.diagnostics.scans = sweet.scans;
    out.diagnostics.hit_max_scans = sweet.hit_max_scans;

    const auto zealous = state.zealous_phase(config.n_max_zealous);
    out.diagnostics.zealous_attempts = zealous.attempts;
    out.diagnostics.zealous_accepted = zealous.accepted;
    if (zealous.accepted > 0) {
        sweet = state.sweeten(config.max_scans);
        out.diagnostics.scans += sweet.scans;
        out.diagnostics.hit_max_scans = out.diagnostics.hit_max_scans || sweet.hit_max_scans;
    }

    out.estimate = state.labels();
    out.loss = evaluator(out.estimate);
    out.diagnostics.loss = out.loss;
    out.diagnostics.wall_ms = elapsed_ms(start);
    return out;
}

RunOutcome run_once(const DrawsMatrix& draws, const LossSpec& spec, const SalsoConfig& config, std::size_t run_index) {
    const LossEvaluator evaluator(draws, spec);
    return run_once(evaluator, config, run_index);
}

SalsoResult salso(const DrawsMatrix& draws, const LossSpec& spec, const SalsoConfig& config) {
    const auto start = Clock::now();
    config.validate();
    if (spec.kind == LossKind::OneZero)
        throw UsageError("0-1 loss is minimized over the draws by map_estimate, not by search");
    const LossEvaluator evaluator(draws, spec);
    const int k_d = config.resolve_max_clusters(draws);

    std::size_t workers = config.n_workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.n_workers;
    workers = std::min(workers, config.n_runs);

    std::vector<RunOutcome> outcomes(config.n_runs);
    std::vector<std::exception_ptr> errors(workers);
    std::atomic<std::size_t> next{0};
    auto work = [&](std::size_t worker) {
        try {
            for (std::size_t r = next++; r < config.n_runs; r = next++) outcomes[r] = run_once(evaluator, config, r);
        } catch (...) {
            errors[worker] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    SalsoResult result;
    result.spec = spec;
    result.max_clusters = k_d;
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        if (outcomes[r].loss < outcomes[result.best_run_index].loss) result.best_run_index = r;
        result.runs.push_back(outcomes[r].diagnostics);
    }
    result.estimate = outcomes[result.best_run_index].estimate;
    result.expected_loss = outcomes[result.best_run_index].loss;
    result.wall_ms = elapsed_ms(start);
    return result;
}

} // namespace salso
