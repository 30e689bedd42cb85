#include "crcg/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace crcg::ad {

namespace {

std::shared_ptr<Node> make_leaf(Eigen::MatrixXd value, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    if (requires_grad) n->grad = Eigen::MatrixXd::Zero(n->value.rows(), n->value.cols());
    return n;
}

Var make_op(Eigen::MatrixXd value, std::vector<std::shared_ptr<Node>> parents,
            std::function<void(const Node&)> pull) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    for (const auto& p : parents) n->requires_grad = n->requires_grad || p->requires_grad;
    if (n->requires_grad) {
        n->grad = Eigen::MatrixXd::Zero(n->value.rows(), n->value.cols());
        n->parents = std::move(parents);
        n->pull = std::move(pull);
    }
    return Var(n);
}

void check_defined(const Var& v) {
    if (!v.defined()) throw std::invalid_argument("undefined Var");
}

}  // namespace

Var constant(Eigen::MatrixXd value) {
    return Var(make_leaf(std::move(value), false));
}

Var parameter(Eigen::MatrixXd value) {
    return Var(make_leaf(std::move(value), true));
}

Var detach(const Var& a) {
    check_defined(a);
    return constant(a.value());
}

Var matmul(const Var& a, const Var& b) {
    check_defined(a);
    check_defined(b);
    if (a.value().cols() != b.value().rows()) throw std::invalid_argument("matmul: shape mismatch");
    Node* pa = a.node.get();
    Node* pb = b.node.get();
    return make_op(a.value() * b.value(), {a.node, b.node}, [pa, pb](const Node& self) {
        if (pa->requires_grad) pa->grad += self.grad * pb->value.transpose();
        if (pb->requires_grad) pb->grad += pa->value.transpose() * self.grad;
    });
}

Var add(const Var& a, const Var& b) {
    check_defined(a);
    check_defined(b);
    if (a.value().rows() != b.value().rows() || a.value().cols() != b.value().cols()) {
        throw std::invalid_argument("add: shape mismatch");
    }
    Node* pa = a.node.get();
    Node* pb = b.node.get();
    return make_op(a.value() + b.value(), {a.node, b.node}, [pa, pb](const Node& self) {
        if (pa->requires_grad) pa->grad += self.grad;
        if (pb->requires_grad) pb->grad += self.grad;
    });
}

Var relu(const Var& a) {
    check_defined(a);
    Node* pa = a.node.get();
    return make_op(a.value().cwiseMax(0.0), {a.node}, [pa](const Node& self) {
        if (!pa->requires_grad) return;
        pa->grad += (pa->value.array() > 0.0).cast<double>().matrix().cwiseProduct(self.grad);
    });
}

Var cwise_mul(const Var& a, const Var& b) {
    check_defined(a);
    check_defined(b);
    if (a.value().rows() != b.value().rows() || a.value().cols() != b.value().cols()) {
        throw std::invalid_argument("cwise_mul: shape mismatch");
    }
    Node* pa = a.node.get();
    Node* pb = b.node.get();
    return make_op(a.value().cwiseProduct(b.value()), {a.node, b.node}, [pa, pb](const Node& self) {
        if (pa->requires_grad) pa->grad += self.grad.cwiseProduct(pb->value);
        if (pb->requires_grad) pb->grad += self.grad.cwiseProduct(pa->value);
    });
}

Var scale(const Var& a, double s) {
    check_defined(a);
    Node* pa = a.node.get();
    return make_op(a.value() * s, {a.node}, [pa, s](const Node& self) {
        if (pa->requires_grad) pa->grad += s * self.grad;
    });
}

Var sum(const Var& a) {
    check_defined(a);
    Eigen::MatrixXd v(1, 1);
    v(0, 0) = a.value().sum();
    Node* pa = a.node.get();
    return make_op(std::move(v), {a.node}, [pa](const Node& self) {
        if (pa->requires_grad) pa->grad.array() += self.grad(0, 0);
    });
}

Var row_mean(const Var& a) {
    check_defined(a);
    if (a.value().rows() == 0) throw std::invalid_argument("row_mean: empty matrix");
    Node* pa = a.node.get();
    const double inv = 1.0 / static_cast<double>(a.value().rows());
    Eigen::MatrixXd v = a.value().colwise().mean();
    return make_op(std::move(v), {a.node}, [pa, inv](const Node& self) {
        if (!pa->requires_grad) return;
        const Eigen::RowVectorXd spread = inv * self.grad.row(0);
        pa->grad.rowwise() += spread;
    });
}

Var rows_mean(const Var& a, std::vector<int> rows) {
    check_defined(a);
    if (rows.empty()) throw std::invalid_argument("rows_mean: empty row list");
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(1, a.value().cols());
    for (int r : rows) {
        if (r < 0 || r >= a.value().rows()) throw std::invalid_argument("rows_mean: row out of range");
        v += a.value().row(r);
    }
    v /= static_cast<double>(rows.size());
    Node* pa = a.node.get();
    const double inv = 1.0 / static_cast<double>(rows.size());
    return make_op(std::move(v), {a.node}, [pa, rows = std::move(rows), inv](const Node& self) {
        if (!pa->requires_grad) return;
        for (int r : rows) pa->grad.row(r) += inv * self.grad.row(0);
    });
}

Var cosine(const Var& a, const Var& b) {
    check_defined(a);
    check_defined(b);
    if (a.value().rows() != 1 || b.value().rows() != 1 || a.value().cols() != b.value().cols()) {
        throw std::invalid_argument("cosine: expects matching 1 x h rows");
    }
    const double na = a.value().norm();
    const double nb = b.value().norm();
    Eigen::MatrixXd v(1, 1);
    if (na < 1e-12 || nb < 1e-12) {
        v(0, 0) = 0.0;
        return make_op(std::move(v), {a.node, b.node}, [](const Node&) {});
    }
    const double c = a.value().cwiseProduct(b.value()).sum() / (na * nb);
    v(0, 0) = c;
    Node* pa = a.node.get();
    Node* pb = b.node.get();
    return make_op(std::move(v), {a.node, b.node}, [pa, pb, c, na, nb](const Node& self) {
        const double g = self.grad(0, 0);
        if (pa->requires_grad) {
            pa->grad += g * (pb->value / (na * nb) - c * pa->value / (na * na));
        }
        if (pb->requires_grad) {
            pb->grad += g * (pa->value / (na * nb) - c * pb->value / (nb * nb));
        }
    });
}

Var softmax_cross_entropy(const Var& logits, int label) {
    check_defined(logits);
    if (logits.value().rows() != 1) throw std::invalid_argument("softmax_cross_entropy: expects a 1 x k row");
    if (label < 0 || label >= logits.value().cols()) {
        throw std::invalid_argument("softmax_cross_entropy: label out of range");
    }
    const Eigen::RowVectorXd row = logits.value().row(0);
    const double mx = row.maxCoeff();
    const Eigen::RowVectorXd ex = (row.array() - mx).exp();
    const double z = ex.sum();
    Eigen::RowVectorXd probs = ex / z;
    Eigen::MatrixXd v(1, 1);
    v(0, 0) = std::log(z) - (row(label) - mx);
    Node* pl = logits.node.get();
    return make_op(std::move(v), {logits.node},
                   [pl, probs = std::move(probs), label](const Node& self) {
                       if (!pl->requires_grad) return;
                       Eigen::RowVectorXd d = probs;
                       d(label) -= 1.0;
                       pl->grad.row(0) += self.grad(0, 0) * d;
                   });
}

void backward(const Var& root) {
    check_defined(root);
    if (root.value().rows() != 1 || root.value().cols() != 1) {
        throw std::invalid_argument("backward: root must be 1 x 1");
    }
    if (!root.node->requires_grad) return;

    // Iterative post-order walk; reversing it yields a topological order.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(root.node.get(), 0);
    seen.insert(root.node.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* parent = node->parents[next].get();
            ++next;
            if (parent->requires_grad && !seen.count(parent)) {
                seen.insert(parent);
                stack.emplace_back(parent, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    root.node->grad(0, 0) = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if ((*it)->pull) (*it)->pull(**it);
    }
}

}  // namespace crcg::ad
