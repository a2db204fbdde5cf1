#include "salso/allocation.hpp"

#include <cmath>
#include <stdexcept>

#include "salso/errors.hpp"

namespace salso {

XLogXTable::XLogXTable(std::size_t n) : xlogx_(n + 1, 0.0), diff_(n + 1, 0.0) {
    for (std::size_t k = 1; k <= n; ++k) {
        const double x = static_cast<double>(k);
        xlogx_[k] = x * std::log2(x);
        diff_[k] = xlogx_[k] - xlogx_[k - 1];
    }
}

AllocationScorer::AllocationScorer(LossSpec spec, std::size_t num_items) : spec_(spec), table_(num_items + 1) {
    if (spec_.kind == LossKind::VILB || spec_.kind == LossKind::OneZero)
        throw UsageError(std::string("no table-based allocation scores for loss ") +
                         std::string(to_string(spec_.kind)));
    if (spec_.weighted()) spec_.validate();
    if (spec_.kind == LossKind::VI) spec_.a = spec_.b = 1.0;
}

bool AllocationScorer::has_fast_path() const {
    return spec_.kind == LossKind::Binder || spec_.kind == LossKind::GVI || spec_.kind == LossKind::VI;
}

void AllocationScorer::scores(const TableCache& cache, std::size_t item, bool allow_new, std::vector<double>& out) {
    if (cache.label(item) != TableCache::kUnallocated)
        throw std::logic_error("allocation_scores: item " + std::to_string(item) + " is still allocated");
    const int q = cache.num_columns();
    if (allow_new && q >= cache.max_columns())
        throw std::logic_error("allocation_scores: a new column would exceed the cluster limit");
    if (q == 0 && !allow_new) throw std::logic_error("allocation_scores: no placement available");
    out.assign(q + (allow_new ? 1 : 0), 0.0);
    if (out.size() == 1) return;  // forced placement
    switch (spec_.kind) {
    case LossKind::Binder:
        binder_scores(cache, item, allow_new, out);
        break;
    case LossKind::GVI:
    case LossKind::VI:
        gvi_scores(cache, item, allow_new, out);
        break;
    default:
        generic_scores(cache, item, allow_new, out);
        break;
    }
}

void AllocationScorer::binder_scores(const TableCache& cache, std::size_t item, bool allow_new,
                                     std::vector<double>& out) {
    const int q = cache.num_columns();
    const auto rows = cache.draws().item_labels(item);
    int_acc_.assign(q, 0);
    for (std::size_t h = 0; h < rows.size(); ++h) {
        const auto counts = cache.row(h, rows[h]);
        for (int j = 0; j < q; ++j) int_acc_[j] += counts[j];
    }
    const double bh = spec_.b * static_cast<double>(rows.size());
    const double ab = spec_.a + spec_.b;
    for (int j = 0; j < q; ++j)
        out[j] = bh * static_cast<double>(cache.col_sum(j)) - ab * static_cast<double>(int_acc_[j]);
    if (allow_new) out[q] = 0.0;
}

void AllocationScorer::gvi_scores(const TableCache& cache, std::size_t item, bool allow_new, std::vector<double>& out) {
    const int q = cache.num_columns();
    const auto rows = cache.draws().item_labels(item);
    acc_.assign(q, 0.0);
    for (std::size_t h = 0; h < rows.size(); ++h) {
        const auto counts = cache.row(h, rows[h]);
        for (int j = 0; j < q; ++j) acc_[j] += table_.f(counts[j] + 1);
    }
    const double bh = spec_.b * static_cast<double>(rows.size());
    const double ab = spec_.a + spec_.b;
    for (int j = 0; j < q; ++j) out[j] = bh * table_.f(cache.col_sum(j) + 1) - ab * acc_[j];
    // f(1) = 0, so a fresh singleton scores exactly zero.
    if (allow_new) out[q] = 0.0;
}

void AllocationScorer::generic_scores(const TableCache& cache, std::size_t item, bool allow_new,
                                      std::vector<double>& out) {
    const int q = cache.num_columns();
    const int placements = q + (allow_new ? 1 : 0);
    const auto rows = cache.draws().item_labels(item);
    const double n_after = static_cast<double>(cache.num_allocated() + 1);

    double col_sq = 0.0, col_xlx = 0.0;
    for (int j = 0; j < q; ++j) {
        const double c = static_cast<double>(cache.col_sum(j));
        col_sq += c * c;
        col_xlx += table_.xlogx(cache.col_sum(j));
    }

    acc_.assign(placements, 0.0);
    std::vector<double> col_cell_xlx(q);
    for (std::size_t h = 0; h < rows.size(); ++h) {
        double row_sq = 0.0, row_xlx = 0.0, cell_sq = 0.0, cell_xlx = 0.0, row_cond = 0.0;
        std::fill(col_cell_xlx.begin(), col_cell_xlx.end(), 0.0);
        for (int r = 0; r < cache.num_rows(h); ++r) {
            const auto counts = cache.row(h, r);
            double row_cells = 0.0;
            for (int j = 0; j < q; ++j) {
                const double g = table_.xlogx(counts[j]);
                const double x = static_cast<double>(counts[j]);
                cell_sq += x * x;
                row_cells += g;
                col_cell_xlx[j] += g;
            }
            const std::int64_t rs = cache.row_sum(h, r);
            row_sq += static_cast<double>(rs * rs);
            row_xlx += table_.xlogx(rs);
            cell_xlx += row_cells;
            row_cond += table_.xlogx(rs) - row_cells;
        }
        double col_cond = 0.0;
        for (int j = 0; j < q; ++j) col_cond += table_.xlogx(cache.col_sum(j)) - col_cell_xlx[j];

        const int r = rows[h];
        const std::int64_t rs = cache.row_sum(h, r);
        const double d_row = table_.f(rs + 1);
        const auto counts = cache.row(h, r);
        for (int j = 0; j < placements; ++j) {
            const std::int64_t x = j < q ? counts[j] : 0;
            const std::int64_t c = j < q ? cache.col_sum(j) : 0;
            const double d_cell = table_.f(x + 1);
            const double d_col = table_.f(c + 1);
            TableSums s;
            s.n = n_after;
            s.row_sq = row_sq + static_cast<double>(2 * rs + 1);
            s.col_sq = col_sq + static_cast<double>(2 * c + 1);
            s.cell_sq = cell_sq + static_cast<double>(2 * x + 1);
            s.row_xlx = row_xlx + d_row;
            s.col_xlx = col_xlx + d_col;
            s.cell_xlx = cell_xlx + d_cell;
            s.row_cond_xlx = std::max(0.0, row_cond + d_row - d_cell);
            s.col_cond_xlx = std::max(0.0, col_cond + d_col - d_cell);
            acc_[j] += loss_from_sums(s, spec_);
        }
    }
    const double num_draws = static_cast<double>(rows.size());
    for (int j = 0; j < placements; ++j) out[j] = acc_[j] / num_draws;
}

std::vector<double> allocation_scores(const TableCache& cache, std::size_t item, const LossSpec& spec, bool allow_new) {
    AllocationScorer scorer(spec, cache.draws().num_items());
    std::vector<double> out;
    scorer.scores(cache, item, allow_new, out);
    return out;
}

std::size_t argmin(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < scores.size(); ++j)
        if (scores[j] < scores[best]) best = j;
    return best;
}

} // namespace salso
