#include "crcg/rcam.hpp"

#include <algorithm>
#include <stdexcept>

namespace crcg {

namespace {

void reserve_rows(StackedReps& into, Eigen::Index rows, Eigen::Index cols) {
    into.rows.resize(rows, cols);
    into.origins.reserve(static_cast<std::size_t>(rows));
}

void append_graph_rows(StackedReps& into, const Eigen::MatrixXd& reps, int graph) {
    const auto start = static_cast<Eigen::Index>(into.origins.size());
    into.rows.middleRows(start, reps.rows()) = reps;
    for (Eigen::Index r = 0; r < reps.rows(); ++r) {
        into.origins.push_back({graph, static_cast<int>(r)});
    }
}

}  // namespace

std::vector<ClassPartition> partition_representations(const RepBatch& batch, int num_classes) {
    if (batch.reps.empty()) throw std::invalid_argument("partition_representations: empty batch");
    if (batch.reps.size() != batch.labels.size() || batch.reps.size() != batch.preds.size()) {
        throw std::invalid_argument("partition_representations: ragged batch");
    }
    std::vector<ClassPartition> parts(static_cast<std::size_t>(num_classes));
    const Eigen::Index width = batch.reps.front().cols();
    std::vector<Eigen::Index> plus_rows(parts.size(), 0);
    std::vector<Eigen::Index> s_minus_rows(parts.size(), 0);
    std::vector<Eigen::Index> i_minus_rows(parts.size(), 0);
    for (std::size_t i = 0; i < batch.reps.size(); ++i) {
        const int y = batch.labels[i];
        const int yhat = batch.preds[i];
        if (y < 0 || y >= num_classes || yhat < 0 || yhat >= num_classes) {
            throw std::invalid_argument("partition_representations: class index out of range");
        }
        if (y == yhat) {
            plus_rows[static_cast<std::size_t>(y)] += batch.reps[i].rows();
        } else {
            s_minus_rows[static_cast<std::size_t>(y)] += batch.reps[i].rows();
            i_minus_rows[static_cast<std::size_t>(yhat)] += batch.reps[i].rows();
        }
    }
    for (std::size_t c = 0; c < parts.size(); ++c) {
        reserve_rows(parts[c].s_plus, plus_rows[c], width);
        reserve_rows(parts[c].i_plus, plus_rows[c], width);
        reserve_rows(parts[c].s_minus, s_minus_rows[c], width);
        reserve_rows(parts[c].i_minus, i_minus_rows[c], width);
    }
    for (std::size_t i = 0; i < batch.reps.size(); ++i) {
        const int y = batch.labels[i];
        const int yhat = batch.preds[i];
        const int graph = static_cast<int>(i);
        if (y == yhat) {
            append_graph_rows(parts[static_cast<std::size_t>(y)].s_plus, batch.reps[i], graph);
            append_graph_rows(parts[static_cast<std::size_t>(y)].i_plus, batch.reps[i], graph);
        } else {
            append_graph_rows(parts[static_cast<std::size_t>(y)].s_minus, batch.reps[i], graph);
            append_graph_rows(parts[static_cast<std::size_t>(yhat)].i_minus, batch.reps[i], graph);
        }
    }
    return parts;
}

Eigen::VectorXd row_norm_reciprocals(const Eigen::MatrixXd& s) {
    if (s.rows() == 0) throw std::invalid_argument("row_norm_reciprocals: empty matrix");
    Eigen::VectorXd out(s.rows());
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
        const double norm = s.row(r).norm();
        out(r) = norm < 1e-12 ? 0.0 : 1.0 / norm;
    }
    return out;
}

Eigen::MatrixXd cross_cosine_matrix(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
    if (p.cols() != q.cols()) throw std::invalid_argument("cross_cosine_matrix: width mismatch");
    const Eigen::VectorXd up = row_norm_reciprocals(p);
    const Eigen::VectorXd uq = row_norm_reciprocals(q);
    return (p * q.transpose()).cwiseProduct(up * uq.transpose());
}

std::set<std::pair<int, int>> mark_above_threshold(const Eigen::MatrixXd& m, double tau,
                                                   const std::vector<Origin>& row_origins,
                                                   const std::vector<Origin>& col_origins) {
    if (static_cast<Eigen::Index>(row_origins.size()) != m.rows() ||
        static_cast<Eigen::Index>(col_origins.size()) != m.cols()) {
        throw std::invalid_argument("mark_above_threshold: origins do not align with the matrix");
    }
    std::set<std::pair<int, int>> marked;
    if (m.size() == 0) return marked;
    // An above-tau entry marks both of its origins, so a row or column is
    // marked exactly when its maximum exceeds tau. Column sweeps keep the
    // reductions contiguous.
    Eigen::VectorXd row_max = m.col(0);
    Eigen::RowVectorXd col_max(m.cols());
    col_max(0) = m.col(0).maxCoeff();
    for (Eigen::Index c = 1; c < m.cols(); ++c) {
        row_max = row_max.cwiseMax(m.col(c));
        col_max(c) = m.col(c).maxCoeff();
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        if (row_max(r) > tau) {
            const auto& ro = row_origins[static_cast<std::size_t>(r)];
            marked.emplace(ro.graph, ro.node);
        }
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (col_max(c) > tau) {
            const auto& co = col_origins[static_cast<std::size_t>(c)];
            marked.emplace(co.graph, co.node);
        }
    }
    return marked;
}

std::string_view to_string(RcamConfig::Scope scope) {
    switch (scope) {
        case RcamConfig::Scope::PerBatch: return "per_batch";
        case RcamConfig::Scope::PerEpoch: return "per_epoch";
    }
    throw std::logic_error("bad rcam scope");
}

RcamConfig::Scope rcam_scope_from_string(std::string_view name) {
    if (name == "per_batch") return RcamConfig::Scope::PerBatch;
    if (name == "per_epoch") return RcamConfig::Scope::PerEpoch;
    throw std::invalid_argument("unknown rcam scope: " + std::string(name));
}

namespace {

// Marks both origins of every above-tau cross-cosine entry without
// materializing the full matrix. A row or column is marked exactly when its
// maximum exceeds tau, and maxima fold tile by tile, so memory stays bounded
// by the tile size however large the two sides grow.
void mark_cross_pairs(const StackedReps& plus, const StackedReps& minus, double tau,
                      std::vector<std::vector<int>>& per_graph) {
    const Eigen::VectorXd up = row_norm_reciprocals(plus.rows);
    const Eigen::VectorXd uq = row_norm_reciprocals(minus.rows);
    Eigen::VectorXd row_max = Eigen::VectorXd::Constant(plus.rows.rows(), -2.0);
    Eigen::VectorXd col_max = Eigen::VectorXd::Constant(minus.rows.rows(), -2.0);
    constexpr Eigen::Index kTile = 2048;
    for (Eigen::Index r0 = 0; r0 < plus.rows.rows(); r0 += kTile) {
        const Eigen::Index nr = std::min(kTile, plus.rows.rows() - r0);
        for (Eigen::Index c0 = 0; c0 < minus.rows.rows(); c0 += kTile) {
            const Eigen::Index nc = std::min(kTile, minus.rows.rows() - c0);
            const Eigen::MatrixXd tile =
                (plus.rows.middleRows(r0, nr) * minus.rows.middleRows(c0, nc).transpose())
                    .cwiseProduct(up.segment(r0, nr) * uq.segment(c0, nc).transpose());
            row_max.segment(r0, nr) = row_max.segment(r0, nr).cwiseMax(tile.rowwise().maxCoeff());
            col_max.segment(c0, nc) = col_max.segment(c0, nc).cwiseMax(tile.colwise().maxCoeff().transpose());
        }
    }
    for (Eigen::Index r = 0; r < row_max.size(); ++r) {
        if (row_max(r) > tau) {
            const auto& o = plus.origins[static_cast<std::size_t>(r)];
            per_graph[static_cast<std::size_t>(o.graph)].push_back(o.node);
        }
    }
    for (Eigen::Index c = 0; c < col_max.size(); ++c) {
        if (col_max(c) > tau) {
            const auto& o = minus.origins[static_cast<std::size_t>(c)];
            per_graph[static_cast<std::size_t>(o.graph)].push_back(o.node);
        }
    }
}

}  // namespace

MarkSet compute_marks(const RepBatch& batch, int num_classes, double tau) {
    const auto parts = partition_representations(batch, num_classes);
    MarkSet marks;
    marks.anchors.resize(batch.reps.size());
    marks.deceptive.resize(batch.reps.size());
    for (const auto& part : parts) {
        if (part.s_plus.rows.rows() > 0 && part.s_minus.rows.rows() > 0) {
            mark_cross_pairs(part.s_plus, part.s_minus, tau, marks.anchors);
        }
        if (part.i_plus.rows.rows() > 0 && part.i_minus.rows.rows() > 0) {
            mark_cross_pairs(part.i_plus, part.i_minus, tau, marks.deceptive);
        }
    }
    const auto tidy = [](std::vector<std::vector<int>>& lists) {
        for (auto& list : lists) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
    };
    tidy(marks.anchors);
    tidy(marks.deceptive);
    return marks;
}

double cosine_value(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na < 1e-12 || nb < 1e-12) return 0.0;
    return a.dot(b) / (na * nb);
}

namespace {

double marked_pool_similarity_sum(const RepBatch& batch, const std::vector<std::vector<int>>& marked) {
    double total = 0.0;
    for (std::size_t i = 0; i < batch.reps.size(); ++i) {
        const auto& nodes = marked[i];
        if (nodes.empty()) continue;
        const auto& reps = batch.reps[i];
        Eigen::RowVectorXd pooled = Eigen::RowVectorXd::Zero(reps.cols());
        for (int node : nodes) pooled += reps.row(node);
        pooled /= static_cast<double>(nodes.size());
        const Eigen::RowVectorXd readout = reps.colwise().mean();
        total += cosine_value(pooled, readout);
    }
    return total;
}

}  // namespace

double emphasis_loss(const RepBatch& batch, const MarkSet& marks) {
    return -marked_pool_similarity_sum(batch, marks.anchors);
}

double ignoring_loss(const RepBatch& batch, const MarkSet& marks) {
    return marked_pool_similarity_sum(batch, marks.deceptive);
}

CausalLoss causal_loss(const RepBatch& batch, int num_classes, const RcamConfig& cfg) {
    if (cfg.tau <= -1.0 || cfg.tau > 1.0) throw std::invalid_argument("tau must lie in (-1, 1]");
    CausalLoss out;
    out.marks = compute_marks(batch, num_classes, cfg.tau);
    out.l_a = emphasis_loss(batch, out.marks);
    out.l_i = ignoring_loss(batch, out.marks);
    out.l_c = out.l_a + out.l_i;
    return out;
}

}  // namespace crcg
