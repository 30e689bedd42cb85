#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crcg/autodiff.hpp"
#include "crcg/graph.hpp"
#include "crcg/rcam.hpp"
#include "crcg/rng.hpp"

namespace crcg {

struct ModelParams {
    std::vector<Eigen::MatrixXd> layers;
    Eigen::MatrixXd cls_w;
    Eigen::MatrixXd cls_b;
};

// Glorot-uniform weights with bound sqrt(6/(fan_in+fan_out)), zero classifier
// bias; widths chain feature_dim -> hidden_width (layer_count times) ->
// num_classes.
ModelParams init_params(int feature_dim, int hidden_width, int layer_count, int num_classes,
                        Rng& rng);

struct Forward {
    Eigen::MatrixXd reps;
    Eigen::RowVectorXd logits;
};

// H^(0) = features; H^(l+1) = ReLU(Ahat H^(l) W^(l)); reps = H^(L); logits =
// mean over rep rows through the linear classifier.
Forward forward(const Graph& g, const ModelParams& params);

// -log softmax(logits)[label] with max subtraction.
double cross_entropy(const Eigen::RowVectorXd& logits, int label);

// Ties resolve to the lowest class index.
int argmax_class(const Eigen::RowVectorXd& logits);

struct ParamVars {
    std::vector<ad::Var> layers;
    ad::Var cls_w;
    ad::Var cls_b;
};

ParamVars lift_params(const ModelParams& params);

// Gradients in the order layers..., cls_w, cls_b.
std::vector<Eigen::MatrixXd> collect_grads(const ParamVars& vars);

struct ForwardVars {
    ad::Var reps;
    ad::Var readout;
    ad::Var logits;
};

ForwardVars forward_vars(const Graph& g, const ParamVars& params);

// Mean anchor/deceptive rep rows per graph; nullopt where the mark list is
// empty.
struct PooledMarks {
    std::vector<std::optional<Eigen::RowVectorXd>> anchors;
    std::vector<std::optional<Eigen::RowVectorXd>> deceptive;
};

PooledMarks pool_marks(const std::vector<ForwardVars>& fwd, const MarkSet& marks);

struct RcamTerms {
    ad::Var loss;
    double l_a = 0.0;
    double l_i = 0.0;
};

// loss = l_a + l_i where l_a = -sum cos(anchor pool, readout) and l_i =
// +sum cos(deceptive pool, readout). Pools enter as constants; gradients flow
// only through each graph's readout. detach_readout freezes that path too.
RcamTerms rcam_loss_vars(const std::vector<ForwardVars>& fwd, const PooledMarks& pools,
                         bool detach_readout = false);

struct AdamState {
    std::vector<Eigen::MatrixXd> m;
    std::vector<Eigen::MatrixXd> v;
    long step = 0;
};

// Bias-corrected Adam over the flattened order layers..., cls_w, cls_b. An
// empty state initializes itself to zero moments.
void adam_step(ModelParams& params, const std::vector<Eigen::MatrixXd>& grads, AdamState& state,
               double learning_rate, double beta1, double beta2, double eps);

enum class TrainMethod { Erm, ErmRcam };

std::string_view to_string(TrainMethod method);
TrainMethod train_method_from_string(std::string_view name);
// Filename-safe form: "erm" / "erm_rcam".
std::string_view method_slug(TrainMethod method);

struct TrainConfig {
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 0;
    TrainMethod method = TrainMethod::Erm;
    RcamConfig rcam;
    int hidden_width = 32;
    int layer_count = 2;
};

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double l_ce = 0.0;
    double l_a = 0.0;
    double l_i = 0.0;
    double l_c = 0.0;
    double cpu_seconds = 0.0;
};

struct TrainResult {
    ModelParams params;
    std::vector<EpochLog> log;
    double cpu_seconds = 0.0;
};

// Seeded minibatch Adam. ErmRcam adds lambda * (l_a + l_i) per batch with
// marks from the configured scope; evaluation never applies it. Logged loss
// components are means over the epoch's batches; cpu_seconds is process CPU
// time since the start of training.
TrainResult train(const Dataset& data, const TrainConfig& cfg);

// Fraction of argmax-correct predictions.
double evaluate(const Dataset& data, const ModelParams& params);

// Header epoch,train_loss,train_acc,l_ce,l_a,l_i,l_c,cpu_seconds.
void write_epoch_csv(const std::string& path, const std::vector<EpochLog>& log);

}  // namespace crcg
