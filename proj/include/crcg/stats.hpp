#pragma once

#include <string>
#include <vector>

namespace crcg {

struct RunResult {
    std::string method;
    std::string scenario;
    int seed = 0;
    double accuracy = 0.0;
    double cpu_seconds = 0.0;
};

struct ComparisonRow {
    std::string method;
    std::string scenario;
    int runs = 0;
    double mean = 0.0;
    double std_dev = 0.0;
    double delta = 0.0;
};

struct ComparisonTable {
    std::string baseline;
    std::vector<ComparisonRow> rows;
};

// Sample mean and n-1 std per (method, scenario); deltas against the baseline
// mean on the same scenario. Rows sorted by scenario, baseline method first
// within each. Throws when a scenario lacks the baseline.
ComparisonTable summarize(const std::vector<RunResult>& results, const std::string& baseline);

struct FriedmanResult {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 0.0;
};

// matrix[j][b] holds method j's accuracy in block b. Within-block ranks
// ascend with the value; ties share the average rank. statistic =
// 12/(n k (k+1)) * sum R_j^2 - 3 n (k+1), df = k-1.
FriedmanResult friedman(const std::vector<std::vector<double>>& matrix);

// Regularized upper incomplete gamma Q(df/2, x/2); series below x = df+1,
// continued fraction above.
double chi_square_sf(double x, int df);

// Header method,scenario,runs,mean,std,delta.
std::string comparison_csv(const ComparisonTable& table);

// Aligned text, methods by row and scenarios by column; non-baseline cells
// carry a signed delta.
std::string comparison_text(const ComparisonTable& table);

}  // namespace crcg
