#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "salso/labels.hpp"

namespace salso {

// Cross-tabulation of a "truth" partition (rows) against an "estimate"
// partition (columns). Indices are 0-based.
class ContingencyTable {
public:
    static constexpr std::size_t kNewColumn = std::numeric_limits<std::size_t>::max();

    ContingencyTable() = default;
    ContingencyTable(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return row_sums_.size(); }
    std::size_t cols() const { return col_sums_.size(); }
    std::int64_t count(std::size_t r, std::size_t c) const { return counts_[r * cols() + c]; }
    std::int64_t row_sum(std::size_t r) const { return row_sums_[r]; }
    std::int64_t col_sum(std::size_t c) const { return col_sums_[c]; }
    std::int64_t total() const { return total_; }

    void add(std::size_t r, std::size_t c, std::int64_t k = 1);

    // Moves one item of truth row `r` from column `from` to column `to`
    // (kNewColumn appends an empty column first). Touches exactly four counts.
    // Returns the destination column. An emptied column is kept.
    std::size_t apply_move(std::size_t r, std::size_t from, std::size_t to);

    // Drops an empty column by moving the last column into its slot.
    void remove_empty_column(std::size_t c);

    // Margins agree with the cells.
    bool consistent() const;

    friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;

private:
    void append_column();

    std::vector<std::int64_t> counts_;  // row-major
    std::vector<std::int64_t> row_sums_;
    std::vector<std::int64_t> col_sums_;
    std::int64_t total_ = 0;
};

ContingencyTable build_contingency(const ClusterLabels& truth, const ClusterLabels& estimate);

// Value-returning form of ContingencyTable::apply_move.
ContingencyTable apply_move(ContingencyTable table, std::size_t truth_row, std::size_t from_col, std::size_t to_col);

// One contingency table per draw against a shared working candidate. The
// candidate is held here as 0-based column labels; unallocated items carry
// kUnallocated and are absent from every table, so row sums count only the
// allocated items. When a column empties it is compacted immediately: the
// last column takes over the vacated index.
//
// Single writer. The referenced DrawsMatrix must outlive the cache.
class TableCache {
public:
    static constexpr int kUnallocated = -1;

    TableCache(const DrawsMatrix& draws, int max_columns);

    const DrawsMatrix& draws() const { return *draws_; }
    int max_columns() const { return max_columns_; }
    int num_columns() const { return num_cols_; }
    std::size_t num_allocated() const { return num_allocated_; }

    int label(std::size_t item) const { return labels_[item]; }
    std::span<const int> labels() const { return labels_; }
    std::int64_t col_sum(int col) const { return col_sums_[col]; }

    // Counts n_{r,0..q-1} for truth cluster `r` of draw `h`.
    std::span<const std::uint32_t> row(std::size_t h, int r) const {
        return {counts_.data() + offsets_[h] + static_cast<std::size_t>(r) * capacity_,
                static_cast<std::size_t>(num_cols_)};
    }
    std::int64_t row_sum(std::size_t h, int r) const { return row_sums_[row_offsets_[h] + r]; }
    int num_rows(std::size_t h) const { return draws_->row(h).num_clusters(); }

    // Removes every item.
    void clear();
    // Replaces the candidate. Labels are 0-based; kUnallocated is allowed;
    // column ids are compacted in order of first appearance.
    void assign(std::span<const int> labels);
    // `col` may equal num_columns() to open a new column.
    void allocate(std::size_t item, int col);
    // Returns the item's former column. Compacts if that column empties.
    int deallocate(std::size_t item);

    ContingencyTable table(std::size_t h) const;
    // Every cached table equals a rebuild from the current labels.
    bool verify() const;

private:
    void ensure_capacity(int cols);
    std::uint32_t& cell(std::size_t h, int r, int c) {
        return counts_[offsets_[h] + static_cast<std::size_t>(r) * capacity_ + c];
    }

    const DrawsMatrix* draws_;
    int max_columns_;
    int capacity_ = 0;
    int num_cols_ = 0;
    std::size_t num_allocated_ = 0;
    std::vector<int> labels_;
    std::vector<std::int64_t> col_sums_;
    std::vector<std::size_t> offsets_;      // per draw, into counts_
    std::vector<std::size_t> row_offsets_;  // per draw, into row_sums_
    std::vector<std::uint32_t> counts_;
    std::vector<std::int64_t> row_sums_;
};

// Posterior similarity matrix: fraction of draws placing i and j together.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    SimilarityMatrix(std::size_t n, std::size_t num_draws, std::vector<double> values)
        : n_(n), num_draws_(num_draws), values_(std::move(values)) {}

    std::size_t size() const { return n_; }
    std::size_t num_draws() const { return num_draws_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const { return {values_.data() + i * n_, n_}; }

private:
    std::size_t n_ = 0;
    std::size_t num_draws_ = 0;
    std::vector<double> values_;
};

SimilarityMatrix build_psm(const DrawsMatrix& draws);

} // namespace salso
