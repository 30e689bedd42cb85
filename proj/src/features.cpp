#include "crcg/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace crcg {

namespace {

constexpr std::array<std::string_view, kFeatureMethodCount> kMethodNames = {
    "normal",     "uniform",   "exponential", "log_normal", "gamma",
    "beta",       "weibull",   "laplace",     "logistic",   "rayleigh",
    "pareto",     "cauchy",    "negative_binomial", "gumbel", "gompertz",
    "arithmetic", "geometric", "fibonacci",   "square",     "cubic",
    "prime",      "triangular", "rectangular", "binomial_coefficient", "hamiltonian",
};

constexpr double kEulerGamma = 0.57721566490153286;

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

// Uniform draw kept strictly inside (0, 1) so log/logit transforms stay finite.
double u01_open(Rng& rng) {
    return std::clamp(rng.uniform(), 0x1.0p-53, 1.0 - 0x1.0p-53);
}

double sample_gamma(double shape, Rng& rng) {
    if (shape <= 0.0) throw std::invalid_argument("gamma shape must be positive");
    if (shape < 1.0) {
        const double u = u01_open(rng);
        return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = u01_open(rng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_poisson(double lambda, Rng& rng) {
    if (lambda <= 0.0) return 0.0;
    if (lambda > 256.0) {
        return std::max(0.0, std::round(rng.normal(lambda, std::sqrt(lambda))));
    }
    const double limit = std::exp(-lambda);
    double prod = 1.0;
    double count = -1.0;
    do {
        prod *= rng.uniform();
        count += 1.0;
    } while (prod > limit);
    return count;
}

struct GompertzMoments {
    double mean;
    double stddev;
};

// Raw moments of Gompertz(eta=1, b=1). With t = e^x - 1 the k-th moment is
// the integral over t >= 0 of ln(1+t)^k e^(-t); Simpson on [0, 60] leaves a
// tail below 1e-24.
GompertzMoments gompertz_moments() {
    static const GompertzMoments cached = [] {
        const int intervals = 60000;
        const double hi = 60.0;
        const double h = hi / intervals;
        double m1 = 0.0;
        double m2 = 0.0;
        for (int i = 0; i <= intervals; ++i) {
            const double t = i * h;
            const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double l = std::log1p(t);
            const double f = std::exp(-t) * w;
            m1 += l * f;
            m2 += l * l * f;
        }
        m1 *= h / 3.0;
        m2 *= h / 3.0;
        return GompertzMoments{m1, std::sqrt(m2 - m1 * m1)};
    }();
    return cached;
}

double sample_raw(FeatureMethod method, const std::map<std::string, double>& params, Rng& rng) {
    switch (method) {
        case FeatureMethod::Normal:
            return rng.normal();
        case FeatureMethod::Uniform:
            return rng.uniform();
        case FeatureMethod::Exponential:
            return -std::log(1.0 - rng.uniform());
        case FeatureMethod::LogNormal:
            return std::exp(rng.normal());
        case FeatureMethod::Gamma:
            return sample_gamma(param_or(params, "shape", 2.0), rng);
        case FeatureMethod::Beta: {
            const double a = param_or(params, "a", 2.0);
            const double b = param_or(params, "b", 2.0);
            if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("beta parameters must be positive");
            const double x = sample_gamma(a, rng);
            const double y = sample_gamma(b, rng);
            return x / (x + y);
        }
        case FeatureMethod::Weibull: {
            const double k = param_or(params, "shape", 1.5);
            if (k <= 0.0) throw std::invalid_argument("weibull shape must be positive");
            return std::pow(-std::log(1.0 - rng.uniform()), 1.0 / k);
        }
        case FeatureMethod::Laplace: {
            const double u = u01_open(rng);
            return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
        }
        case FeatureMethod::Logistic: {
            const double u = u01_open(rng);
            return std::log(u / (1.0 - u));
        }
        case FeatureMethod::Rayleigh:
            return std::sqrt(-2.0 * std::log(1.0 - rng.uniform()));
        case FeatureMethod::Pareto: {
            const double alpha = param_or(params, "alpha", 3.0);
            if (alpha <= 0.0) throw std::invalid_argument("pareto alpha must be positive");
            return std::pow(1.0 - rng.uniform(), -1.0 / alpha);
        }
        case FeatureMethod::Cauchy:
            return std::tan(std::numbers::pi * (u01_open(rng) - 0.5));
        case FeatureMethod::NegativeBinomial: {
            const double r = param_or(params, "r", 5.0);
            const double p = param_or(params, "p", 0.5);
            if (r <= 0.0 || p <= 0.0 || p >= 1.0) {
                throw std::invalid_argument("negative_binomial needs r > 0 and p in (0,1)");
            }
            const double lambda = sample_gamma(r, rng) * (1.0 - p) / p;
            return sample_poisson(lambda, rng);
        }
        case FeatureMethod::Gumbel:
            return -std::log(-std::log(u01_open(rng)));
        case FeatureMethod::Gompertz:
            // Inverse CDF of 1 - exp(-(e^x - 1)).
            return std::log1p(-std::log(1.0 - rng.uniform()));
        default:
            throw std::logic_error("sample_raw called with a sequence method");
    }
}

}  // namespace

std::string_view to_string(FeatureMethod method) {
    return kMethodNames[static_cast<std::size_t>(method)];
}

FeatureMethod feature_method_from_string(std::string_view name) {
    for (int i = 0; i < kFeatureMethodCount; ++i) {
        if (kMethodNames[static_cast<std::size_t>(i)] == name) return static_cast<FeatureMethod>(i);
    }
    throw std::invalid_argument("unknown feature method: " + std::string(name));
}

bool is_sequence_method(FeatureMethod method) {
    return static_cast<int>(method) >= static_cast<int>(FeatureMethod::Arithmetic);
}

RawMoments raw_moments(FeatureMethod method, const std::map<std::string, double>& params) {
    switch (method) {
        case FeatureMethod::Normal:
            return {0.0, 1.0};
        case FeatureMethod::Uniform:
            return {0.5, std::sqrt(1.0 / 12.0)};
        case FeatureMethod::Exponential:
            return {1.0, 1.0};
        case FeatureMethod::LogNormal: {
            const double e = std::numbers::e;
            return {std::sqrt(e), std::sqrt((e - 1.0) * e)};
        }
        case FeatureMethod::Gamma: {
            const double k = param_or(params, "shape", 2.0);
            return {k, std::sqrt(k)};
        }
        case FeatureMethod::Beta: {
            const double a = param_or(params, "a", 2.0);
            const double b = param_or(params, "b", 2.0);
            const double s = a + b;
            return {a / s, std::sqrt(a * b / (s * s * (s + 1.0)))};
        }
        case FeatureMethod::Weibull: {
            const double k = param_or(params, "shape", 1.5);
            const double m1 = std::tgamma(1.0 + 1.0 / k);
            const double m2 = std::tgamma(1.0 + 2.0 / k);
            return {m1, std::sqrt(m2 - m1 * m1)};
        }
        case FeatureMethod::Laplace:
            return {0.0, std::sqrt(2.0)};
        case FeatureMethod::Logistic:
            return {0.0, std::numbers::pi / std::sqrt(3.0)};
        case FeatureMethod::Rayleigh:
            return {std::sqrt(std::numbers::pi / 2.0), std::sqrt(2.0 - std::numbers::pi / 2.0)};
        case FeatureMethod::Pareto: {
            const double alpha = param_or(params, "alpha", 3.0);
            if (alpha <= 2.0) throw std::invalid_argument("pareto raw moments need alpha > 2");
            const double m = alpha / (alpha - 1.0);
            return {m, std::sqrt(alpha / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0)))};
        }
        case FeatureMethod::NegativeBinomial: {
            const double r = param_or(params, "r", 5.0);
            const double p = param_or(params, "p", 0.5);
            return {r * (1.0 - p) / p, std::sqrt(r * (1.0 - p)) / p};
        }
        case FeatureMethod::Gumbel:
            return {kEulerGamma, std::numbers::pi / std::sqrt(6.0)};
        case FeatureMethod::Gompertz: {
            const auto m = gompertz_moments();
            return {m.mean, m.stddev};
        }
        case FeatureMethod::Cauchy:
            throw std::invalid_argument("cauchy has no finite moments");
        default:
            throw std::invalid_argument("sequence methods have no sampling moments");
    }
}

double sequence_term(FeatureMethod method, int t, const std::map<std::string, double>& seq_params) {
    if (t < 1) throw std::invalid_argument("sequence terms are 1-based");
    switch (method) {
        case FeatureMethod::Arithmetic: {
            const double start = param_or(seq_params, "start", 1.0);
            const double step = param_or(seq_params, "step", 1.0);
            return start + (t - 1) * step;
        }
        case FeatureMethod::Geometric: {
            const double start = param_or(seq_params, "start", 1.0);
            const double ratio = param_or(seq_params, "ratio", 2.0);
            if (ratio == 0.0 && start != 0.0 && t > 1) {
                throw std::invalid_argument("geometric ratio 0 is undefined beyond term 1");
            }
            return start * std::pow(ratio, t - 1);
        }
        case FeatureMethod::Fibonacci: {
            double a = 1.0;
            double b = 1.0;
            for (int i = 2; i < t; ++i) {
                const double next = a + b;
                a = b;
                b = next;
            }
            return t == 1 ? 1.0 : b;
        }
        case FeatureMethod::Square:
            return static_cast<double>(t) * t;
        case FeatureMethod::Cubic:
            return static_cast<double>(t) * t * t;
        case FeatureMethod::Prime: {
            int count = 0;
            int candidate = 1;
            while (count < t) {
                ++candidate;
                bool prime = candidate >= 2;
                for (int d = 2; d * d <= candidate; ++d) {
                    if (candidate % d == 0) {
                        prime = false;
                        break;
                    }
                }
                if (prime) ++count;
            }
            return candidate;
        }
        case FeatureMethod::Triangular:
            return static_cast<double>(t) * (t + 1) / 2.0;
        case FeatureMethod::Rectangular:
            return static_cast<double>(t) * (t + 1);
        case FeatureMethod::BinomialCoefficient: {
            // Central coefficient C(2t, t) as the running product of (t+j)/j.
            double c = 1.0;
            for (int j = 1; j <= t; ++j) c = c * (t + j) / j;
            return c;
        }
        case FeatureMethod::Hamiltonian: {
            double h = 0.0;
            for (int j = 1; j <= t; ++j) h += 1.0 / j;
            return h;
        }
        default:
            throw std::invalid_argument("not a sequence method");
    }
}

Eigen::MatrixXd generate_features(const FeatureSpec& spec, int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("generate_features needs n >= 1");
    if (spec.dim < 1) throw std::invalid_argument("generate_features needs dim >= 1");
    Eigen::MatrixXd out(n, spec.dim);
    if (is_sequence_method(spec.method)) {
        for (int r = 0; r < n; ++r) {
            out.row(r).setConstant(sequence_term(spec.method, r + 1, spec.seq_params));
        }
        return out;
    }
    if (spec.stddev < 0.0) throw std::invalid_argument("stddev must be non-negative");
    if (spec.stddev == 0.0) {
        out.setConstant(spec.mean);
        return out;
    }
    const bool location_scale =
        spec.method == FeatureMethod::Cauchy ||
        (spec.method == FeatureMethod::Pareto && param_or(spec.seq_params, "alpha", 3.0) <= 2.0);
    double shift = 0.0;
    double scale = 1.0;
    if (location_scale) {
        // Median-centered shift; quantile spread is set by stddev directly.
        if (spec.method == FeatureMethod::Pareto) {
            shift = std::pow(2.0, 1.0 / param_or(spec.seq_params, "alpha", 3.0));
        }
    } else {
        const auto rm = raw_moments(spec.method, spec.seq_params);
        shift = rm.mean;
        scale = rm.stddev;
    }
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < spec.dim; ++c) {
            const double raw = sample_raw(spec.method, spec.seq_params, rng);
            out(r, c) = spec.mean + spec.stddev * (raw - shift) / scale;
        }
    }
    return out;
}

}  // namespace crcg
