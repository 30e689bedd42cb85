#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crcg {

// Per-graph node representations with ground-truth and predicted classes.
struct RepBatch {
    std::vector<Eigen::MatrixXd> reps;
    std::vector<int> labels;
    std::vector<int> preds;
};

struct Origin {
    int graph = 0;
    int node = 0;
};

struct StackedReps {
    Eigen::MatrixXd rows;
    std::vector<Origin> origins;
};

// S family keys on ground truth, I family on prediction:
// s_plus: y = c and yhat = c; s_minus: y = c and yhat != c;
// i_plus: yhat = c and y = c; i_minus: yhat = c and y != c.
struct ClassPartition {
    StackedReps s_plus;
    StackedReps s_minus;
    StackedReps i_plus;
    StackedReps i_minus;
};

std::vector<ClassPartition> partition_representations(const RepBatch& batch, int num_classes);

// Entry t is 1/||row t||, or 0 when the norm is below 1e-12.
Eigen::VectorXd row_norm_reciprocals(const Eigen::MatrixXd& s);

// (P Q^T) elementwise-scaled by u(P) u(Q)^T; entry (t, r) is the cosine
// similarity of P row t and Q row r, 0 where a zero row is involved.
Eigen::MatrixXd cross_cosine_matrix(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q);

// Origins of both endpoints of every entry strictly greater than tau.
std::set<std::pair<int, int>> mark_above_threshold(const Eigen::MatrixXd& m, double tau,
                                                   const std::vector<Origin>& row_origins,
                                                   const std::vector<Origin>& col_origins);

// Per-graph sorted node index lists.
struct MarkSet {
    std::vector<std::vector<int>> anchors;
    std::vector<std::vector<int>> deceptive;
};

struct RcamConfig {
    double tau = 0.8;
    double lambda = 1.0;
    enum class Scope { PerBatch, PerEpoch };
    Scope scope = Scope::PerBatch;
};

std::string_view to_string(RcamConfig::Scope scope);
RcamConfig::Scope rcam_scope_from_string(std::string_view name);

// Anchors come from the (S+, S-) cosine matrices, deceptive marks from the
// (I+, I-) matrices, per class.
MarkSet compute_marks(const RepBatch& batch, int num_classes, double tau);

double cosine_value(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b);

// L_a = -sum over graphs with anchors of cos(mean anchor row, mean row).
double emphasis_loss(const RepBatch& batch, const MarkSet& marks);

// L_i = +sum over graphs with deceptive marks of cos(mean deceptive row, mean row).
double ignoring_loss(const RepBatch& batch, const MarkSet& marks);

struct CausalLoss {
    double l_c = 0.0;
    double l_a = 0.0;
    double l_i = 0.0;
    MarkSet marks;
};

CausalLoss causal_loss(const RepBatch& batch, int num_classes, const RcamConfig& cfg);

}  // namespace crcg
