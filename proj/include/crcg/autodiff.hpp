#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

namespace crcg::ad {

// One value in a dynamically built reverse-mode graph. Gradients accumulate
// into `grad` for nodes with requires_grad; `pull` pushes this node's grad
// into its parents.
struct Node {
    Eigen::MatrixXd value;
    Eigen::MatrixXd grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(const Node&)> pull;
};

class Var {
public:
    Var() = default;
    explicit Var(std::shared_ptr<Node> n) : node(std::move(n)) {}

    const Eigen::MatrixXd& value() const { return node->value; }
    const Eigen::MatrixXd& grad() const { return node->grad; }
    bool requires_grad() const { return node && node->requires_grad; }
    bool defined() const { return static_cast<bool>(node); }

    std::shared_ptr<Node> node;
};

Var constant(Eigen::MatrixXd value);
Var parameter(Eigen::MatrixXd value);

// Value copy with no parents; gradients never flow through.
Var detach(const Var& a);

Var matmul(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var relu(const Var& a);
Var cwise_mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var sum(const Var& a);

// Column means over all rows (1 x cols).
Var row_mean(const Var& a);
// Column means over the listed rows (1 x cols).
Var rows_mean(const Var& a, std::vector<int> rows);

// Cosine similarity of two 1 x h rows as a 1 x 1 scalar; 0 with a zero
// gradient when either norm is below 1e-12.
Var cosine(const Var& a, const Var& b);

// -log softmax(logits)[label] for a 1 x k logits row, max-subtracted.
Var softmax_cross_entropy(const Var& logits, int label);

// Accumulates gradients of a 1 x 1 root into every reachable parameter.
void backward(const Var& root);

}  // namespace crcg::ad
