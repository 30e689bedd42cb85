#include "crcg/nn.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "crcg/jsonl.hpp"

namespace crcg {

namespace {

double process_cpu_seconds() {
    rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    const auto seconds = [](const timeval& t) {
        return static_cast<double>(t.tv_sec) + static_cast<double>(t.tv_usec) * 1e-6;
    };
    return seconds(usage.ru_utime) + seconds(usage.ru_stime);
}

Eigen::MatrixXd glorot_uniform(int rows, int cols, Rng& rng) {
    const double bound = std::sqrt(6.0 / (rows + cols));
    Eigen::MatrixXd w(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) w(r, c) = rng.uniform(-bound, bound);
    }
    return w;
}

std::vector<Eigen::MatrixXd*> flatten(ModelParams& params) {
    std::vector<Eigen::MatrixXd*> mats;
    mats.reserve(params.layers.size() + 2);
    for (auto& w : params.layers) mats.push_back(&w);
    mats.push_back(&params.cls_w);
    mats.push_back(&params.cls_b);
    return mats;
}

void check_widths(const Eigen::MatrixXd& features, const ModelParams& params) {
    Eigen::Index width = features.cols();
    for (const auto& w : params.layers) {
        if (w.rows() != width) throw std::invalid_argument("forward: feature width mismatch");
        width = w.cols();
    }
    if (params.cls_w.rows() != width || params.cls_b.cols() != params.cls_w.cols() ||
        params.cls_b.rows() != 1) {
        throw std::invalid_argument("forward: classifier width mismatch");
    }
}

ad::Var zero_scalar() { return ad::constant(Eigen::MatrixXd::Zero(1, 1)); }

}  // namespace

ModelParams init_params(int feature_dim, int hidden_width, int layer_count, int num_classes,
                        Rng& rng) {
    if (feature_dim < 1 || hidden_width < 1 || layer_count < 0 || num_classes < 1) {
        throw std::invalid_argument("init_params: nonpositive dimension");
    }
    ModelParams params;
    int width = feature_dim;
    for (int l = 0; l < layer_count; ++l) {
        params.layers.push_back(glorot_uniform(width, hidden_width, rng));
        width = hidden_width;
    }
    params.cls_w = glorot_uniform(width, num_classes, rng);
    params.cls_b = Eigen::MatrixXd::Zero(1, num_classes);
    return params;
}

Forward forward(const Graph& g, const ModelParams& params) {
    check_widths(g.features, params);
    const Eigen::MatrixXd ahat = normalized_adjacency(g);
    Eigen::MatrixXd h = g.features;
    for (const auto& w : params.layers) h = (ahat * h * w).cwiseMax(0.0);
    const Eigen::RowVectorXd pooled = h.colwise().mean();
    Eigen::RowVectorXd logits = pooled * params.cls_w + params.cls_b.row(0);
    return {std::move(h), std::move(logits)};
}

double cross_entropy(const Eigen::RowVectorXd& logits, int label) {
    if (label < 0 || label >= logits.size()) throw std::invalid_argument("cross_entropy: label out of range");
    const double mx = logits.maxCoeff();
    const double z = (logits.array() - mx).exp().sum();
    return std::log(z) - (logits(label) - mx);
}

int argmax_class(const Eigen::RowVectorXd& logits) {
    if (logits.size() == 0) throw std::invalid_argument("argmax_class: empty logits");
    int best = 0;
    for (int c = 1; c < logits.size(); ++c) {
        if (logits(c) > logits(best)) best = c;
    }
    return best;
}

ParamVars lift_params(const ModelParams& params) {
    ParamVars vars;
    vars.layers.reserve(params.layers.size());
    for (const auto& w : params.layers) vars.layers.push_back(ad::parameter(w));
    vars.cls_w = ad::parameter(params.cls_w);
    vars.cls_b = ad::parameter(params.cls_b);
    return vars;
}

std::vector<Eigen::MatrixXd> collect_grads(const ParamVars& vars) {
    std::vector<Eigen::MatrixXd> grads;
    grads.reserve(vars.layers.size() + 2);
    for (const auto& w : vars.layers) grads.push_back(w.grad());
    grads.push_back(vars.cls_w.grad());
    grads.push_back(vars.cls_b.grad());
    return grads;
}

ForwardVars forward_vars(const Graph& g, const ParamVars& params) {
    const ad::Var ahat = ad::constant(normalized_adjacency(g));
    ad::Var h = ad::constant(g.features);
    for (const auto& w : params.layers) h = ad::relu(ad::matmul(ad::matmul(ahat, h), w));
    ad::Var readout = ad::row_mean(h);
    ad::Var logits = ad::add(ad::matmul(readout, params.cls_w), params.cls_b);
    return {h, readout, logits};
}

PooledMarks pool_marks(const std::vector<ForwardVars>& fwd, const MarkSet& marks) {
    if (marks.anchors.size() != fwd.size() || marks.deceptive.size() != fwd.size()) {
        throw std::invalid_argument("pool_marks: mark list count mismatch");
    }
    const auto pool = [](const Eigen::MatrixXd& reps, const std::vector<int>& nodes)
        -> std::optional<Eigen::RowVectorXd> {
        if (nodes.empty()) return std::nullopt;
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(reps.cols());
        for (int n : nodes) {
            if (n < 0 || n >= reps.rows()) throw std::invalid_argument("pool_marks: node out of range");
            sum += reps.row(n);
        }
        return sum / static_cast<double>(nodes.size());
    };
    PooledMarks pools;
    pools.anchors.reserve(fwd.size());
    pools.deceptive.reserve(fwd.size());
    for (std::size_t i = 0; i < fwd.size(); ++i) {
        pools.anchors.push_back(pool(fwd[i].reps.value(), marks.anchors[i]));
        pools.deceptive.push_back(pool(fwd[i].reps.value(), marks.deceptive[i]));
    }
    return pools;
}

RcamTerms rcam_loss_vars(const std::vector<ForwardVars>& fwd, const PooledMarks& pools,
                         bool detach_readout) {
    if (pools.anchors.size() != fwd.size() || pools.deceptive.size() != fwd.size()) {
        throw std::invalid_argument("rcam_loss_vars: pool count mismatch");
    }
    ad::Var anchor_sum = zero_scalar();
    ad::Var deceptive_sum = zero_scalar();
    for (std::size_t i = 0; i < fwd.size(); ++i) {
        if (!pools.anchors[i] && !pools.deceptive[i]) continue;
        const ad::Var readout = detach_readout ? ad::detach(fwd[i].readout) : fwd[i].readout;
        if (pools.anchors[i]) {
            const ad::Var pool = ad::constant(*pools.anchors[i]);
            anchor_sum = ad::add(anchor_sum, ad::cosine(pool, readout));
        }
        if (pools.deceptive[i]) {
            const ad::Var pool = ad::constant(*pools.deceptive[i]);
            deceptive_sum = ad::add(deceptive_sum, ad::cosine(pool, readout));
        }
    }
    RcamTerms terms;
    terms.l_a = -anchor_sum.value()(0, 0);
    terms.l_i = deceptive_sum.value()(0, 0);
    terms.loss = ad::add(ad::scale(anchor_sum, -1.0), deceptive_sum);
    return terms;
}

void adam_step(ModelParams& params, const std::vector<Eigen::MatrixXd>& grads, AdamState& state,
               double learning_rate, double beta1, double beta2, double eps) {
    const auto mats = flatten(params);
    if (grads.size() != mats.size()) throw std::invalid_argument("adam_step: gradient count mismatch");
    if (state.m.empty()) {
        for (const auto* w : mats) {
            state.m.push_back(Eigen::MatrixXd::Zero(w->rows(), w->cols()));
            state.v.push_back(Eigen::MatrixXd::Zero(w->rows(), w->cols()));
        }
    }
    if (state.m.size() != mats.size() || state.v.size() != mats.size()) {
        throw std::invalid_argument("adam_step: state count mismatch");
    }
    state.step += 1;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < mats.size(); ++i) {
        Eigen::MatrixXd& w = *mats[i];
        const Eigen::MatrixXd& g = grads[i];
        if (g.rows() != w.rows() || g.cols() != w.cols()) {
            throw std::invalid_argument("adam_step: gradient shape mismatch");
        }
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g;
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g.cwiseProduct(g);
        const Eigen::ArrayXXd m_hat = state.m[i].array() / c1;
        const Eigen::ArrayXXd v_hat = state.v[i].array() / c2;
        w.array() -= learning_rate * m_hat / (v_hat.sqrt() + eps);
    }
}

std::string_view to_string(TrainMethod method) {
    switch (method) {
        case TrainMethod::Erm: return "erm";
        case TrainMethod::ErmRcam: return "erm+rcam";
    }
    throw std::invalid_argument("unknown TrainMethod");
}

TrainMethod train_method_from_string(std::string_view name) {
    if (name == "erm") return TrainMethod::Erm;
    if (name == "erm+rcam") return TrainMethod::ErmRcam;
    throw std::invalid_argument("unknown training method: " + std::string(name));
}

std::string_view method_slug(TrainMethod method) {
    return method == TrainMethod::Erm ? "erm" : "erm_rcam";
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) {
    if (data.graphs.empty()) throw std::invalid_argument("train: empty dataset");
    if (cfg.epochs < 0 || cfg.batch_size < 1 || cfg.learning_rate <= 0.0) {
        throw std::invalid_argument("train: invalid config");
    }
    if (cfg.rcam.tau <= -1.0 || cfg.rcam.tau > 1.0 || cfg.rcam.lambda < 0.0) {
        throw std::invalid_argument("train: invalid rcam config");
    }
    const Eigen::Index feature_dim = data.graphs.front().features.cols();
    for (const auto& g : data.graphs) {
        if (!g.label) throw std::invalid_argument("train: unlabeled graph");
        if (g.features.cols() != feature_dim) throw std::invalid_argument("train: feature width mismatch");
        if (g.node_count < 1) throw std::invalid_argument("train: empty graph");
    }
    const int num_classes = data.num_classes;
    const bool rcam_on = cfg.method == TrainMethod::ErmRcam;

    Rng rng = Rng::stream(cfg.seed, "train", 0);
    TrainResult result;
    result.params = init_params(static_cast<int>(feature_dim), cfg.hidden_width, cfg.layer_count,
                                num_classes, rng);
    AdamState state;
    const double cpu_start = process_cpu_seconds();

    std::vector<int> order(data.graphs.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }

        std::optional<MarkSet> epoch_marks;
        if (rcam_on && cfg.rcam.scope == RcamConfig::Scope::PerEpoch) {
            RepBatch frozen;
            for (const auto& g : data.graphs) {
                Forward f = forward(g, result.params);
                frozen.preds.push_back(argmax_class(f.logits));
                frozen.reps.push_back(std::move(f.reps));
                frozen.labels.push_back(*g.label);
            }
            epoch_marks = compute_marks(frozen, num_classes, cfg.rcam.tau);
        }

        EpochLog log;
        log.epoch = epoch;
        int batches = 0;
        int correct = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            const std::size_t batch = stop - start;

            const ParamVars vars = lift_params(result.params);
            std::vector<ForwardVars> fwd;
            std::vector<int> labels;
            std::vector<int> preds;
            fwd.reserve(batch);
            labels.reserve(batch);
            preds.reserve(batch);
            ad::Var ce_sum = zero_scalar();
            for (std::size_t b = start; b < stop; ++b) {
                const Graph& g = data.graphs[order[b]];
                ForwardVars f = forward_vars(g, vars);
                ce_sum = ad::add(ce_sum, ad::softmax_cross_entropy(f.logits, *g.label));
                preds.push_back(argmax_class(f.logits.value().row(0)));
                labels.push_back(*g.label);
                fwd.push_back(std::move(f));
            }
            ad::Var loss = ad::scale(ce_sum, 1.0 / static_cast<double>(batch));
            const double ce_value = loss.value()(0, 0);

            double l_a = 0.0;
            double l_i = 0.0;
            if (rcam_on) {
                MarkSet marks;
                if (cfg.rcam.scope == RcamConfig::Scope::PerBatch) {
                    RepBatch reps;
                    reps.labels = labels;
                    reps.preds = preds;
                    for (const auto& f : fwd) reps.reps.push_back(f.reps.value());
                    marks = compute_marks(reps, num_classes, cfg.rcam.tau);
                } else {
                    for (std::size_t b = start; b < stop; ++b) {
                        marks.anchors.push_back(epoch_marks->anchors[order[b]]);
                        marks.deceptive.push_back(epoch_marks->deceptive[order[b]]);
                    }
                }
                const RcamTerms terms = rcam_loss_vars(fwd, pool_marks(fwd, marks));
                loss = ad::add(loss, ad::scale(terms.loss, cfg.rcam.lambda));
                l_a = terms.l_a;
                l_i = terms.l_i;
            }

            ad::backward(loss);
            adam_step(result.params, collect_grads(vars), state, cfg.learning_rate, cfg.beta1,
                      cfg.beta2, cfg.eps);

            for (std::size_t b = 0; b < batch; ++b) correct += preds[b] == labels[b];
            log.train_loss += loss.value()(0, 0);
            log.l_ce += ce_value;
            log.l_a += l_a;
            log.l_i += l_i;
            log.l_c += l_a + l_i;
            batches += 1;
        }
        log.train_loss /= batches;
        log.l_ce /= batches;
        log.l_a /= batches;
        log.l_i /= batches;
        log.l_c /= batches;
        log.train_acc = static_cast<double>(correct) / static_cast<double>(order.size());
        log.cpu_seconds = process_cpu_seconds() - cpu_start;
        result.log.push_back(log);
    }
    result.cpu_seconds = process_cpu_seconds() - cpu_start;
    return result;
}

double evaluate(const Dataset& data, const ModelParams& params) {
    if (data.graphs.empty()) throw std::invalid_argument("evaluate: empty dataset");
    int correct = 0;
    for (const auto& g : data.graphs) {
        if (!g.label) throw std::invalid_argument("evaluate: unlabeled graph");
        correct += argmax_class(forward(g, params).logits) == *g.label;
    }
    return static_cast<double>(correct) / static_cast<double>(data.graphs.size());
}

void write_epoch_csv(const std::string& path, const std::vector<EpochLog>& log) {
    std::string out = "epoch,train_loss,train_acc,l_ce,l_a,l_i,l_c,cpu_seconds\n";
    for (const auto& row : log) {
        out += std::to_string(row.epoch);
        for (double v : {row.train_loss, row.train_acc, row.l_ce, row.l_a, row.l_i, row.l_c,
                         row.cpu_seconds}) {
            out += ',';
            jsonl::append_double(out, v);
        }
        out += '\n';
    }
    std::ofstream sink(path, std::ios::binary | std::ios::trunc);
    if (!sink) throw std::runtime_error("cannot open for writing: " + path);
    sink << out;
    if (!sink) throw std::runtime_error("write failed: " + path);
}

}  // namespace crcg
