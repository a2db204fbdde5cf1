#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "salso/contingency.hpp"
#include "salso/labels.hpp"

namespace salso {

enum class LossKind { Binder, OMARI, VI, GVI, NVI, NID, ID, VILB, OneZero };

std::string_view to_string(LossKind kind);
std::optional<LossKind> parse_loss_kind(std::string_view name);

// A loss and its misclassification weights. `a` prices splitting items that
// belong together, `b` prices merging items that belong apart. The weights
// are only read by Binder and GVI.
struct LossSpec {
    LossKind kind = LossKind::Binder;
    double a = 1.0;
    double b = 1.0;

    // Throws InputError unless a > 0 and b > 0.
    void validate() const;
    bool weighted() const { return kind == LossKind::Binder || kind == LossKind::GVI; }
    std::string describe() const;
};

// Entropies in bits of the row partition, the column partition and the
// joint cross-classification, with 0 log 0 taken as 0.
struct EntropySummary {
    double h_rho = 0.0;
    double h_rhohat = 0.0;
    double h_joint = 0.0;
    double mutual_info = 0.0;

    double h_rho_given_rhohat() const { return h_joint - h_rhohat; }
    double h_rhohat_given_rho() const { return h_joint - h_rho; }
};

// Sufficient statistics of a contingency table for every count-based loss:
// sums of squares and of x*log2(x) over row margins, column margins and cells.
// The two conditional terms are accumulated per row (per column) so that they
// are exactly zero when every row (column) falls into a single cell:
//   row_cond_xlx = n H(rhohat | rho),  col_cond_xlx = n H(rho | rhohat).
struct TableSums {
    double n = 0.0;
    double row_sq = 0.0, col_sq = 0.0, cell_sq = 0.0;
    double row_xlx = 0.0, col_xlx = 0.0, cell_xlx = 0.0;
    double row_cond_xlx = 0.0, col_cond_xlx = 0.0;
};

TableSums table_sums(const ContingencyTable& table);

// Loss for Binder, GVI, VI, NVI, NID, ID and OMARI from the sufficient
// statistics. OneZero and VILB cannot be expressed this way (UsageError).
double loss_from_sums(const TableSums& sums, const LossSpec& spec);

EntropySummary entropy_summary(const ContingencyTable& table);

// n-invariant generalized Binder loss: (2 / n^2) times the pairwise form.
double binder_loss(const ContingencyTable& table, double a = 1.0, double b = 1.0);

// Generalized variation of information, in bits.
double gvi_loss(const ContingencyTable& table, double a = 1.0, double b = 1.0);

struct InfoDistances {
    double nvi = 0.0;
    double nid = 0.0;
    double id = 0.0;
};
InfoDistances info_distance_losses(const ContingencyTable& table);

// One minus the adjusted Rand index. Requires n >= 2.
double omari_loss(const ContingencyTable& table);

// Loss of the column partition as an estimate of the row partition.
// OneZero is 0 when the table is a permutation pattern and 1 otherwise.
double loss(const ContingencyTable& table, const LossSpec& spec);

// Monte Carlo posterior expected loss: mean over draws of L(draw, candidate),
// summed in draw order.
double expected_loss(const DrawsMatrix& draws, const ClusterLabels& candidate, const LossSpec& spec);

// Same quantity for the candidate currently held by `cache`, restricted to
// its allocated items.
double expected_loss(const TableCache& cache, const LossSpec& spec);

// Terms of the criterion whose minimizer is the expected-VI minimizer,
// evaluated exactly (per-draw log counts) and through the Jensen bound on the
// similarity matrix. lower_bound <= exact_criterion.
struct ViCriteria {
    double exact_criterion = 0.0;
    double lower_bound = 0.0;
};
ViCriteria vi_criteria(const DrawsMatrix& draws, const SimilarityMatrix& psm, const ClusterLabels& candidate);

// The Jensen lower bound rescaled onto the expected-VI scale,
//   lower_bound / n - mean_h H(rho_h) + log2(n),
// which never exceeds the exact expected VI. This is the value SALSO reports
// and minimizes for LossKind::VILB. `mean_draw_entropy` is mean_h H(rho_h).
double vilb_loss(const SimilarityMatrix& psm, const ClusterLabels& candidate, double mean_draw_entropy);
double mean_draw_entropy(const DrawsMatrix& draws);

enum class PsmCriterionKind { LauGreen, LeastSquares };
struct PsmCriterion {
    PsmCriterionKind kind = PsmCriterionKind::LauGreen;
    double a = 1.0;
    double b = 1.0;
};

// LauGreen: sum_{i<j} 1{same}(pi_ij - b/(a+b)), to be maximized.
// LeastSquares: sum_{i,j} (1{same} - pi_ij)^2, to be minimized.
double psm_criterion(const SimilarityMatrix& psm, const ClusterLabels& candidate, const PsmCriterion& criterion);

// Scores whole candidates for any loss kind, including VILB (through a
// similarity matrix built on construction) and OneZero. Read-only after
// construction; safe to share between threads.
class LossEvaluator {
public:
    LossEvaluator(const DrawsMatrix& draws, LossSpec spec);

    const LossSpec& spec() const { return spec_; }
    const DrawsMatrix& draws() const { return *draws_; }
    const SimilarityMatrix* psm() const { return psm_ ? &*psm_ : nullptr; }
    double operator()(const ClusterLabels& candidate) const;

private:
    const DrawsMatrix* draws_;
    LossSpec spec_;
    std::optional<SimilarityMatrix> psm_;
    double mean_entropy_ = 0.0;
};

} // namespace salso
