#include "salso/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "salso/errors.hpp"

namespace salso {

namespace {

constexpr std::array<std::pair<std::string_view, LossKind>, 9> kLossNames{{
    {"binder", LossKind::Binder},
    {"omari", LossKind::OMARI},
    {"vi", LossKind::VI},
    {"gvi", LossKind::GVI},
    {"nvi", LossKind::NVI},
    {"nid", LossKind::NID},
    {"id", LossKind::ID},
    {"vi-lb", LossKind::VILB},
    {"0-1", LossKind::OneZero},
}};

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// Fills the sufficient statistics from a dense p x q count block.
// `count(r, c)` returns n_rc; margins are recomputed here.
template <class CountFn>
TableSums sums_from_counts(std::size_t p, std::size_t q, CountFn count) {
    TableSums s;
    std::vector<double> col(q, 0.0), col_cell_xlx(q, 0.0);
    for (std::size_t r = 0; r < p; ++r) {
        double row = 0.0, row_cell_xlx = 0.0;
        for (std::size_t c = 0; c < q; ++c) {
            const double x = static_cast<double>(count(r, c));
            if (x == 0.0) continue;
            const double g = xlog2x(x);
            row += x;
            col[c] += x;
            s.cell_sq += x * x;
            row_cell_xlx += g;
            col_cell_xlx[c] += g;
        }
        const double g_row = xlog2x(row);
        s.n += row;
        s.row_sq += row * row;
        s.row_xlx += g_row;
        s.cell_xlx += row_cell_xlx;
        s.row_cond_xlx += std::max(0.0, g_row - row_cell_xlx);
    }
    for (std::size_t c = 0; c < q; ++c) {
        const double g_col = xlog2x(col[c]);
        s.col_sq += col[c] * col[c];
        s.col_xlx += g_col;
        s.col_cond_xlx += std::max(0.0, g_col - col_cell_xlx[c]);
    }
    return s;
}

double entropy_from_xlx(double n, double xlx) { return std::max(0.0, std::log2(n) - xlx / n); }

void require_same_length(std::size_t n, const ClusterLabels& candidate) {
    if (candidate.size() != n)
        throw InputError("candidate has " + std::to_string(candidate.size()) + " items but the draws have " +
                         std::to_string(n));
}

bool is_one_to_one(const ContingencyTable& table) {
    std::vector<int> nonzero_in_col(table.cols(), 0);
    for (std::size_t r = 0; r < table.rows(); ++r) {
        int nonzero = 0;
        for (std::size_t c = 0; c < table.cols(); ++c) {
            if (table.count(r, c) > 0) {
                ++nonzero;
                ++nonzero_in_col[c];
            }
        }
        if (nonzero > 1) return false;
    }
    return std::all_of(nonzero_in_col.begin(), nonzero_in_col.end(), [](int k) { return k <= 1; });
}

} // namespace

std::string_view to_string(LossKind kind) {
    for (const auto& [name, k] : kLossNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<LossKind> parse_loss_kind(std::string_view name) {
    for (const auto& [n, k] : kLossNames)
        if (n == name) return k;
    return std::nullopt;
}

void LossSpec::validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw InputError("loss weights must be positive and finite");
}

std::string LossSpec::describe() const {
    std::ostringstream out;
    out << to_string(kind);
    if (weighted()) out << "(a=" << a << ", b=" << b << ")";
    return out.str();
}

TableSums table_sums(const ContingencyTable& table) {
    return sums_from_counts(table.rows(), table.cols(),
                            [&](std::size_t r, std::size_t c) { return table.count(r, c); });
}

double loss_from_sums(const TableSums& s, const LossSpec& spec) {
    const double n = s.n;
    switch (spec.kind) {
    case LossKind::Binder:
        // a (sum rows^2 - sum cells^2) + b (sum cols^2 - sum cells^2); both
        // differences are exact integers, so equal partitions give exactly 0.
        return (spec.a * (s.row_sq - s.cell_sq) + spec.b * (s.col_sq - s.cell_sq)) / (n * n);
    case LossKind::VI:
        return (s.row_cond_xlx + s.col_cond_xlx) / n;
    case LossKind::GVI:
        return (spec.a * s.row_cond_xlx + spec.b * s.col_cond_xlx) / n;
    case LossKind::NVI: {
        const double vi = (s.row_cond_xlx + s.col_cond_xlx) / n;
        if (vi <= 0.0) return 0.0;
        return vi / entropy_from_xlx(n, s.cell_xlx);
    }
    case LossKind::NID: {
        const double id = std::max(s.row_cond_xlx, s.col_cond_xlx) / n;
        if (id <= 0.0) return 0.0;
        return id / std::max(entropy_from_xlx(n, s.row_xlx), entropy_from_xlx(n, s.col_xlx));
    }
    case LossKind::ID:
        return std::max(s.row_cond_xlx, s.col_cond_xlx) / n;
    case LossKind::OMARI: {
        if (n < 2.0) throw InputError("omARI needs at least two items");
        const double pairs = n * (n - 1.0) / 2.0;
        const double rows = (s.row_sq - n) / 2.0;
        const double cols = (s.col_sq - n) / 2.0;
        const double cells = (s.cell_sq - n) / 2.0;
        // Zero denominator only when both partitions are all-singletons or
        // both are a single cluster; they are then equal.
        if (rows == cols && (rows == 0.0 || rows == pairs)) return 0.0;
        const double expected = rows * cols / pairs;
        const double ar = (cells - expected) / (0.5 * (rows + cols) - expected);
        return 1.0 - ar;
    }
    case LossKind::VILB:
    case LossKind::OneZero:
        break;
    }
    throw UsageError(std::string("loss ") + std::string(to_string(spec.kind)) +
                     " is not a function of contingency-table sums");
}

EntropySummary entropy_summary(const ContingencyTable& table) {
    const TableSums s = table_sums(table);
    EntropySummary e;
    e.h_rho = entropy_from_xlx(s.n, s.row_xlx);
    e.h_rhohat = entropy_from_xlx(s.n, s.col_xlx);
    e.h_joint = entropy_from_xlx(s.n, s.cell_xlx);
    e.mutual_info = e.h_rho + e.h_rhohat - e.h_joint;
    return e;
}

double binder_loss(const ContingencyTable& table, double a, double b) {
    return loss_from_sums(table_sums(table), {LossKind::Binder, a, b});
}

double gvi_loss(const ContingencyTable& table, double a, double b) {
    return loss_from_sums(table_sums(table), {LossKind::GVI, a, b});
}

InfoDistances info_distance_losses(const ContingencyTable& table) {
    const TableSums s = table_sums(table);
    return {loss_from_sums(s, {LossKind::NVI}), loss_from_sums(s, {LossKind::NID}),
            loss_from_sums(s, {LossKind::ID})};
}

double omari_loss(const ContingencyTable& table) { return loss_from_sums(table_sums(table), {LossKind::OMARI}); }

double loss(const ContingencyTable& table, const LossSpec& spec) {
    if (spec.kind == LossKind::OneZero) return is_one_to_one(table) ? 0.0 : 1.0;
    return loss_from_sums(table_sums(table), spec);
}

double expected_loss(const DrawsMatrix& draws, const ClusterLabels& candidate, const LossSpec& spec) {
    require_same_length(draws.num_items(), candidate);
    if (spec.kind == LossKind::VILB)
        throw UsageError("vi-lb is not a Monte Carlo expected loss; use vi_criteria or LossEvaluator");
    if (spec.weighted()) spec.validate();
    const std::size_t num_draws = draws.num_draws();
    if (spec.kind == LossKind::OneZero) {
        std::size_t equal = 0;
        for (const auto& row : draws.rows())
            if (row == candidate) ++equal;
        return 1.0 - static_cast<double>(equal) / static_cast<double>(num_draws);
    }
    const std::size_t q = candidate.num_clusters();
    std::vector<std::int64_t> counts;
    double total = 0.0;
    for (const auto& row : draws.rows()) {
        const std::size_t p = row.num_clusters();
        counts.assign(p * q, 0);
        for (std::size_t i = 0; i < row.size(); ++i) ++counts[(row[i] - 1) * q + (candidate[i] - 1)];
        total += loss_from_sums(
            sums_from_counts(p, q, [&](std::size_t r, std::size_t c) { return counts[r * q + c]; }), spec);
    }
    return total / static_cast<double>(num_draws);
}

double expected_loss(const TableCache& cache, const LossSpec& spec) {
    if (spec.kind == LossKind::VILB)
        throw UsageError("vi-lb is not a Monte Carlo expected loss; use vi_criteria or LossEvaluator");
    const std::size_t num_draws = cache.draws().num_draws();
    double total = 0.0;
    for (std::size_t h = 0; h < num_draws; ++h) {
        if (spec.kind == LossKind::OneZero) {
            total += loss(cache.table(h), spec);
            continue;
        }
        const std::size_t q = cache.num_columns();
        total += loss_from_sums(sums_from_counts(cache.num_rows(h), q,
                                                 [&](std::size_t r, std::size_t c) {
                                                     return cache.row(h, static_cast<int>(r))[c];
                                                 }),
                                spec);
    }
    return total / static_cast<double>(num_draws);
}

namespace {

std::vector<double> cluster_sizes(const ClusterLabels& candidate) {
    std::vector<double> sizes(candidate.num_clusters(), 0.0);
    for (int l : candidate.values()) sizes[l - 1] += 1.0;
    return sizes;
}

// sum_i log2 sum_{j ~ i} pi_ij over items i, with j ranging over i's cluster.
double log_psm_mass(const SimilarityMatrix& psm, const ClusterLabels& candidate) {
    std::vector<std::vector<std::size_t>> members(candidate.num_clusters());
    for (std::size_t i = 0; i < candidate.size(); ++i) members[candidate[i] - 1].push_back(i);
    double total = 0.0;
    for (const auto& m : members) {
        for (std::size_t i : m) {
            const auto row = psm.row(i);
            double mass = 0.0;
            for (std::size_t j : m) mass += row[j];
            total += std::log2(mass);
        }
    }
    return total;
}

} // namespace

ViCriteria vi_criteria(const DrawsMatrix& draws, const SimilarityMatrix& psm, const ClusterLabels& candidate) {
    require_same_length(draws.num_items(), candidate);
    if (psm.size() != draws.num_items()) throw InputError("similarity matrix does not match the draws");
    double size_term = 0.0;
    for (double s : cluster_sizes(candidate)) size_term += xlog2x(s);

    // sum_i log2 #{j : c_j = c_i, chat_j = chat_i} = sum over cells of x log2 x
    const std::size_t q = candidate.num_clusters();
    std::vector<std::int64_t> counts;
    double expected_cell_term = 0.0;
    for (const auto& row : draws.rows()) {
        counts.assign(static_cast<std::size_t>(row.num_clusters()) * q, 0);
        for (std::size_t i = 0; i < row.size(); ++i) ++counts[(row[i] - 1) * q + (candidate[i] - 1)];
        double cells = 0.0;
        for (std::int64_t c : counts) cells += xlog2x(static_cast<double>(c));
        expected_cell_term += cells;
    }
    expected_cell_term /= static_cast<double>(draws.num_draws());

    return {size_term - 2.0 * expected_cell_term, size_term - 2.0 * log_psm_mass(psm, candidate)};
}

double mean_draw_entropy(const DrawsMatrix& draws) {
    const double n = static_cast<double>(draws.num_items());
    double total = 0.0;
    for (const auto& row : draws.rows()) {
        double xlx = 0.0;
        for (double s : cluster_sizes(row)) xlx += xlog2x(s);
        total += entropy_from_xlx(n, xlx);
    }
    return total / static_cast<double>(draws.num_draws());
}

double vilb_loss(const SimilarityMatrix& psm, const ClusterLabels& candidate, double mean_entropy) {
    if (psm.size() != candidate.size()) throw InputError("similarity matrix does not match the candidate");
    const double n = static_cast<double>(candidate.size());
    double size_term = 0.0;
    for (double s : cluster_sizes(candidate)) size_term += xlog2x(s);
    const double lower = size_term - 2.0 * log_psm_mass(psm, candidate);
    return lower / n - mean_entropy + std::log2(n);
}

double psm_criterion(const SimilarityMatrix& psm, const ClusterLabels& candidate, const PsmCriterion& criterion) {
    if (psm.size() != candidate.size()) throw InputError("similarity matrix does not match the candidate");
    const std::size_t n = candidate.size();
    double total = 0.0;
    if (criterion.kind == PsmCriterionKind::LauGreen) {
        LossSpec{LossKind::Binder, criterion.a, criterion.b}.validate();
        const double threshold = criterion.b / (criterion.a + criterion.b);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (candidate[i] == candidate[j]) total += psm(i, j) - threshold;
        return total;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = (candidate[i] == candidate[j] ? 1.0 : 0.0) - psm(i, j);
            total += d * d;
        }
    }
    return total;
}

LossEvaluator::LossEvaluator(const DrawsMatrix& draws, LossSpec spec) : draws_(&draws), spec_(spec) {
    if (spec_.weighted()) spec_.validate();
    if (spec_.kind == LossKind::VILB) {
        psm_ = build_psm(draws);
        mean_entropy_ = mean_draw_entropy(draws);
    }
}

double LossEvaluator::operator()(const ClusterLabels& candidate) const {
    if (spec_.kind == LossKind::VILB) {
        require_same_length(draws_->num_items(), candidate);
        return vilb_loss(*psm_, candidate, mean_entropy_);
    }
    return expected_loss(*draws_, candidate, spec_);
}

} // namespace salso
