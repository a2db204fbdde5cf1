#include "salso/contingency.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "salso/errors.hpp"

namespace salso {

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols)
    : counts_(rows * cols, 0), row_sums_(rows, 0), col_sums_(cols, 0) {}

void ContingencyTable::add(std::size_t r, std::size_t c, std::int64_t k) {
    counts_[r * cols() + c] += k;
    row_sums_[r] += k;
    col_sums_[c] += k;
    total_ += k;
}

void ContingencyTable::append_column() {
    const std::size_t old_cols = cols();
    std::vector<std::int64_t> grown(rows() * (old_cols + 1), 0);
    for (std::size_t r = 0; r < rows(); ++r)
        std::copy_n(counts_.begin() + r * old_cols, old_cols, grown.begin() + r * (old_cols + 1));
    counts_ = std::move(grown);
    col_sums_.push_back(0);
}

std::size_t ContingencyTable::apply_move(std::size_t r, std::size_t from, std::size_t to) {
    if (r >= rows() || from >= cols()) throw std::out_of_range("apply_move: index out of range");
    if (to == kNewColumn) {
        append_column();
        to = cols() - 1;
    } else if (to >= cols()) {
        throw std::out_of_range("apply_move: destination column out of range");
    }
    std::int64_t& source = counts_[r * cols() + from];
    if (source < 1) throw std::logic_error("apply_move: moving an item out of an empty cell");
    --source;
    --col_sums_[from];
    ++counts_[r * cols() + to];
    ++col_sums_[to];
    return to;
}

void ContingencyTable::remove_empty_column(std::size_t c) {
    if (c >= cols()) throw std::out_of_range("remove_empty_column: column out of range");
    if (col_sums_[c] != 0) throw std::logic_error("remove_empty_column: column is not empty");
    const std::size_t last = cols() - 1;
    std::vector<std::int64_t> shrunk(rows() * last, 0);
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t j = 0; j < last; ++j)
            shrunk[r * last + j] = counts_[r * cols() + (j == c ? last : j)];
    }
    col_sums_[c] = col_sums_[last];
    col_sums_.pop_back();
    counts_ = std::move(shrunk);
}

bool ContingencyTable::consistent() const {
    std::int64_t grand = 0;
    for (std::size_t r = 0; r < rows(); ++r) {
        std::int64_t s = 0;
        for (std::size_t c = 0; c < cols(); ++c) {
            if (count(r, c) < 0) return false;
            s += count(r, c);
        }
        if (s != row_sums_[r]) return false;
        grand += s;
    }
    for (std::size_t c = 0; c < cols(); ++c) {
        std::int64_t s = 0;
        for (std::size_t r = 0; r < rows(); ++r) s += count(r, c);
        if (s != col_sums_[c]) return false;
    }
    return grand == total_;
}

ContingencyTable build_contingency(const ClusterLabels& truth, const ClusterLabels& estimate) {
    if (truth.size() != estimate.size())
        throw InputError("contingency table needs equal lengths, got " + std::to_string(truth.size()) + " and " +
                         std::to_string(estimate.size()));
    ContingencyTable table(truth.num_clusters(), estimate.num_clusters());
    for (std::size_t i = 0; i < truth.size(); ++i) table.add(truth[i] - 1, estimate[i] - 1);
    return table;
}

ContingencyTable apply_move(ContingencyTable table, std::size_t truth_row, std::size_t from_col, std::size_t to_col) {
    table.apply_move(truth_row, from_col, to_col);
    return table;
}

// ---------------------------------------------------------------------------
// TableCache

TableCache::TableCache(const DrawsMatrix& draws, int max_columns) : draws_(&draws), max_columns_(max_columns) {
    if (max_columns < 1) throw InputError("table cache needs at least one column");
    const std::size_t num_draws = draws.num_draws();
    labels_.assign(draws.num_items(), kUnallocated);
    col_sums_.assign(max_columns_, 0);
    offsets_.resize(num_draws + 1);
    row_offsets_.resize(num_draws + 1);
    row_offsets_[0] = 0;
    for (std::size_t h = 0; h < num_draws; ++h) row_offsets_[h + 1] = row_offsets_[h] + num_rows(h);
    row_sums_.assign(row_offsets_[num_draws], 0);
    ensure_capacity(std::min(max_columns_, draws.max_clusters() + 1));
}

void TableCache::ensure_capacity(int cols) {
    if (cols <= capacity_) return;
    const int new_capacity = std::min(max_columns_, std::max(cols, 2 * capacity_));
    const std::size_t num_draws = draws_->num_draws();
    std::vector<std::size_t> new_offsets(num_draws + 1);
    new_offsets[0] = 0;
    for (std::size_t h = 0; h < num_draws; ++h)
        new_offsets[h + 1] = new_offsets[h] + static_cast<std::size_t>(num_rows(h)) * new_capacity;
    std::vector<std::uint32_t> grown(new_offsets[num_draws], 0);
    if (capacity_ > 0) {
        for (std::size_t h = 0; h < num_draws; ++h)
            for (int r = 0; r < num_rows(h); ++r)
                std::copy_n(counts_.begin() + offsets_[h] + static_cast<std::size_t>(r) * capacity_, num_cols_,
                            grown.begin() + new_offsets[h] + static_cast<std::size_t>(r) * new_capacity);
    }
    counts_ = std::move(grown);
    offsets_ = std::move(new_offsets);
    capacity_ = new_capacity;
}

void TableCache::clear() {
    std::fill(counts_.begin(), counts_.end(), 0u);
    std::fill(row_sums_.begin(), row_sums_.end(), 0);
    std::fill(col_sums_.begin(), col_sums_.end(), 0);
    std::fill(labels_.begin(), labels_.end(), kUnallocated);
    num_cols_ = 0;
    num_allocated_ = 0;
}

void TableCache::assign(std::span<const int> labels) {
    if (labels.size() != labels_.size()) throw InputError("candidate length does not match the draws");
    clear();
    std::vector<int> remap;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int raw = labels[i];
        if (raw == kUnallocated) continue;
        if (raw < 0) throw InputError("negative column label in candidate");
        if (static_cast<std::size_t>(raw) >= remap.size()) remap.resize(raw + 1, -1);
        if (remap[raw] < 0) {
            if (num_cols_ >= max_columns_) throw InputError("candidate has more clusters than the cache allows");
            remap[raw] = num_cols_;
        }
        allocate(i, remap[raw]);
    }
}

void TableCache::allocate(std::size_t item, int col) {
    if (labels_[item] != kUnallocated) throw std::logic_error("allocate: item is already allocated");
    if (col < 0 || col > num_cols_) throw std::logic_error("allocate: column out of range");
    if (col == num_cols_) {
        if (num_cols_ == max_columns_) throw std::logic_error("allocate: column limit reached");
        ensure_capacity(num_cols_ + 1);
        ++num_cols_;
    }
    const auto rows = draws_->item_labels(item);
    for (std::size_t h = 0; h < rows.size(); ++h) {
        ++cell(h, rows[h], col);
        ++row_sums_[row_offsets_[h] + rows[h]];
    }
    ++col_sums_[col];
    labels_[item] = col;
    ++num_allocated_;
}

int TableCache::deallocate(std::size_t item) {
    const int col = labels_[item];
    if (col == kUnallocated) throw std::logic_error("deallocate: item is not allocated");
    const auto rows = draws_->item_labels(item);
    for (std::size_t h = 0; h < rows.size(); ++h) {
        std::uint32_t& c = cell(h, rows[h], col);
        if (c == 0) throw std::logic_error("deallocate: empty cell, table cache is corrupt");
        --c;
        --row_sums_[row_offsets_[h] + rows[h]];
    }
    --col_sums_[col];
    labels_[item] = kUnallocated;
    --num_allocated_;

    if (col_sums_[col] == 0) {
        const int last = num_cols_ - 1;
        if (col != last) {
            for (std::size_t h = 0; h < draws_->num_draws(); ++h) {
                for (int r = 0; r < num_rows(h); ++r) {
                    cell(h, r, col) = cell(h, r, last);
                    cell(h, r, last) = 0;
                }
            }
            col_sums_[col] = col_sums_[last];
            col_sums_[last] = 0;
            for (int& l : labels_)
                if (l == last) l = col;
        }
        --num_cols_;
    }
    return col;
}

ContingencyTable TableCache::table(std::size_t h) const {
    ContingencyTable t(num_rows(h), num_cols_);
    for (int r = 0; r < num_rows(h); ++r) {
        const auto counts = row(h, r);
        for (int c = 0; c < num_cols_; ++c)
            if (counts[c] > 0) t.add(r, c, counts[c]);
    }
    return t;
}

bool TableCache::verify() const {
    std::vector<std::int64_t> sizes(num_cols_, 0);
    std::size_t allocated = 0;
    for (int l : labels_) {
        if (l == kUnallocated) continue;
        if (l < 0 || l >= num_cols_) return false;
        ++sizes[l];
        ++allocated;
    }
    if (allocated != num_allocated_) return false;
    for (int c = 0; c < num_cols_; ++c)
        if (sizes[c] == 0 || sizes[c] != col_sums_[c]) return false;
    for (std::size_t h = 0; h < draws_->num_draws(); ++h) {
        ContingencyTable rebuilt(num_rows(h), num_cols_);
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] != kUnallocated) rebuilt.add(draws_->row(h)[i] - 1, labels_[i]);
        if (!(rebuilt == table(h))) return false;
        for (int r = 0; r < num_rows(h); ++r)
            if (rebuilt.row_sum(r) != row_sum(h, r)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

SimilarityMatrix build_psm(const DrawsMatrix& draws) {
    const std::size_t n = draws.num_items();
    std::vector<std::uint32_t> together(n * n, 0);
    std::vector<std::vector<std::size_t>> members;
    for (const auto& row : draws.rows()) {
        members.assign(row.num_clusters(), {});
        for (std::size_t i = 0; i < n; ++i) members[row[i] - 1].push_back(i);
        for (const auto& m : members)
            for (std::size_t i : m)
                for (std::size_t j : m) ++together[i * n + j];
    }
    const double num_draws = static_cast<double>(draws.num_draws());
    std::vector<double> values(n * n);
    std::transform(together.begin(), together.end(), values.begin(),
                   [num_draws](std::uint32_t c) { return static_cast<double>(c) / num_draws; });
    return SimilarityMatrix(n, draws.num_draws(), std::move(values));
}

} // namespace salso
