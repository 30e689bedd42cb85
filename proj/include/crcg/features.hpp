#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <string_view>

#include "crcg/rng.hpp"

namespace crcg {

enum class FeatureMethod {
    Normal,
    Uniform,
    Exponential,
    LogNormal,
    Gamma,
    Beta,
    Weibull,
    Laplace,
    Logistic,
    Rayleigh,
    Pareto,
    Cauchy,
    NegativeBinomial,
    Gumbel,
    Gompertz,
    Arithmetic,
    Geometric,
    Fibonacci,
    Square,
    Cubic,
    Prime,
    Triangular,
    Rectangular,
    BinomialCoefficient,
    Hamiltonian,
};

inline constexpr int kFeatureMethodCount = 25;

std::string_view to_string(FeatureMethod method);
FeatureMethod feature_method_from_string(std::string_view name);
bool is_sequence_method(FeatureMethod method);

struct FeatureSpec {
    FeatureMethod method = FeatureMethod::Normal;
    double mean = 0.0;
    double stddev = 1.0;
    int dim = 8;
    // Sequence parameters (start, step, ratio) and distribution shape
    // parameters (shape, alpha, a, b, r, p); absent keys take documented defaults.
    std::map<std::string, double> seq_params;
};

// Row t (0-based) of a sequence method carries term t+1 broadcast across dim.
// Distribution methods are standardized so large-sample mean/std converge to
// (mean, stddev); stddev 0 yields the constant mean. Cauchy and Pareto with
// alpha <= 2 treat (mean, stddev) as location/scale instead (moments diverge).
Eigen::MatrixXd generate_features(const FeatureSpec& spec, int n, Rng& rng);

// 1-based term of a sequence method.
double sequence_term(FeatureMethod method, int t, const std::map<std::string, double>& seq_params);

// Raw mean and std of the unstandardized sampler, if finite.
struct RawMoments {
    double mean = 0.0;
    double stddev = 1.0;
};
RawMoments raw_moments(FeatureMethod method, const std::map<std::string, double>& params);

}  // namespace crcg
