#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "salso/contingency.hpp"
#include "salso/losses.hpp"

namespace salso {

// x log2 x and its forward difference f(k) = k log2 k - (k-1) log2(k-1),
// tabulated for k = 0..n with 0 log2 0 = 0.
class XLogXTable {
public:
    explicit XLogXTable(std::size_t n);
    double xlogx(std::size_t k) const { return xlogx_[k]; }
    double f(std::size_t k) const { return diff_[k]; }
    std::size_t size() const { return xlogx_.size(); }

private:
    std::vector<double> xlogx_;
    std::vector<double> diff_;
};

// Scores every placement of a deallocated item: the q existing columns of the
// cache, then (if allowed) a new column last. The minimum identifies the
// placement with the smallest Monte Carlo expected loss over the allocated
// items plus this one. Scores may differ from those expected losses by a
// constant shared by all placements.
//
// Binder:  b H n_.j - (a+b) sum_h n_{c_h j}
// GVI/VI:  b H f(n_.j + 1) - (a+b) sum_h f(n_{c_h j} + 1)
// Other kinds evaluate the loss of every per-draw table after the placement
// from its sufficient statistics.
class AllocationScorer {
public:
    AllocationScorer(LossSpec spec, std::size_t num_items);

    const LossSpec& spec() const { return spec_; }
    bool has_fast_path() const;

    void scores(const TableCache& cache, std::size_t item, bool allow_new, std::vector<double>& out);

private:
    void binder_scores(const TableCache& cache, std::size_t item, bool allow_new, std::vector<double>& out);
    void gvi_scores(const TableCache& cache, std::size_t item, bool allow_new, std::vector<double>& out);
    void generic_scores(const TableCache& cache, std::size_t item, bool allow_new, std::vector<double>& out);

    LossSpec spec_;
    XLogXTable table_;
    std::vector<std::int64_t> int_acc_;
    std::vector<double> acc_;
};

std::vector<double> allocation_scores(const TableCache& cache, std::size_t item, const LossSpec& spec, bool allow_new);

// Lowest index among the minima.
std::size_t argmin(std::span<const double> scores);

} // namespace salso
