#include "crcg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "crcg/jsonl.hpp"

namespace crcg {

ComparisonTable summarize(const std::vector<RunResult>& results, const std::string& baseline) {
    if (results.empty()) throw std::invalid_argument("summarize: no results");
    std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
    for (const auto& r : results) groups[{r.scenario, r.method}].push_back(r.accuracy);

    std::map<std::string, double> baseline_means;
    for (const auto& [key, accs] : groups) {
        if (key.second != baseline) continue;
        double mean = 0.0;
        for (double a : accs) mean += a;
        baseline_means[key.first] = mean / static_cast<double>(accs.size());
    }

    ComparisonTable table;
    table.baseline = baseline;
    for (const auto& [key, accs] : groups) {
        const auto base = baseline_means.find(key.first);
        if (base == baseline_means.end()) {
            throw std::runtime_error("missing baseline \"" + baseline + "\" for scenario \"" +
                                     key.first + "\"");
        }
        ComparisonRow row;
        row.scenario = key.first;
        row.method = key.second;
        row.runs = static_cast<int>(accs.size());
        for (double a : accs) row.mean += a;
        row.mean /= row.runs;
        if (row.runs > 1) {
            double ss = 0.0;
            for (double a : accs) ss += (a - row.mean) * (a - row.mean);
            row.std_dev = std::sqrt(ss / (row.runs - 1));
        }
        row.delta = row.mean - base->second;
        table.rows.push_back(std::move(row));
    }
    std::sort(table.rows.begin(), table.rows.end(), [&](const auto& a, const auto& b) {
        if (a.scenario != b.scenario) return a.scenario < b.scenario;
        if ((a.method == baseline) != (b.method == baseline)) return a.method == baseline;
        return a.method < b.method;
    });
    return table;
}

namespace {

std::vector<double> block_ranks(const std::vector<double>& values) {
    const int k = static_cast<int>(values.size());
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
    std::vector<double> ranks(k);
    int i = 0;
    while (i < k) {
        int j = i;
        while (j + 1 < k && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double avg = 0.5 * (i + j) + 1.0;
        for (int t = i; t <= j; ++t) ranks[idx[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

FriedmanResult friedman(const std::vector<std::vector<double>>& matrix) {
    const int k = static_cast<int>(matrix.size());
    if (k < 2) throw std::invalid_argument("friedman: needs at least 2 methods");
    const int n = static_cast<int>(matrix[0].size());
    for (const auto& row : matrix) {
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("friedman: ragged matrix");
    }
    if (n < 2) throw std::invalid_argument("friedman: needs at least 2 blocks");

    std::vector<double> rank_sums(k, 0.0);
    std::vector<double> column(k);
    for (int b = 0; b < n; ++b) {
        for (int j = 0; j < k; ++j) column[j] = matrix[j][b];
        const std::vector<double> ranks = block_ranks(column);
        for (int j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    }
    double sum_sq = 0.0;
    for (double r : rank_sums) sum_sq += r * r;

    FriedmanResult result;
    result.statistic = 12.0 / (static_cast<double>(n) * k * (k + 1)) * sum_sq - 3.0 * n * (k + 1);
    result.degrees_of_freedom = k - 1;
    result.p_value = chi_square_sf(std::max(0.0, result.statistic), result.degrees_of_freedom);
    return result;
}

double chi_square_sf(double x, int df) {
    if (x < 0.0) throw std::invalid_argument("chi_square_sf: negative statistic");
    if (df < 1) throw std::invalid_argument("chi_square_sf: degrees of freedom below 1");
    if (x == 0.0) return 1.0;
    const double a = 0.5 * df;
    const double z = 0.5 * x;
    const double log_prefix = a * std::log(z) - z - std::lgamma(a);

    if (x < df + 1.0) {
        double term = 1.0 / a;
        double sum = term;
        for (int i = 1; i < 10000; ++i) {
            term *= z / (a + i);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - std::exp(log_prefix) * sum;
    }

    const double tiny = 1e-300;
    double b = z + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefix) * h;
}

std::string comparison_csv(const ComparisonTable& table) {
    std::string out = "method,scenario,runs,mean,std,delta\n";
    for (const auto& row : table.rows) {
        out += row.method;
        out += ',';
        out += row.scenario;
        out += ',';
        out += std::to_string(row.runs);
        out += ',';
        jsonl::append_double(out, row.mean);
        out += ',';
        jsonl::append_double(out, row.std_dev);
        out += ',';
        jsonl::append_double(out, row.delta);
        out += '\n';
    }
    return out;
}

std::string comparison_text(const ComparisonTable& table) {
    std::vector<std::string> scenarios;
    std::vector<std::string> methods;
    for (const auto& row : table.rows) {
        if (std::find(scenarios.begin(), scenarios.end(), row.scenario) == scenarios.end()) {
            scenarios.push_back(row.scenario);
        }
        if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
            methods.push_back(row.method);
        }
    }
    std::stable_sort(methods.begin(), methods.end(), [&](const auto& a, const auto& b) {
        if ((a == table.baseline) != (b == table.baseline)) return a == table.baseline;
        return a < b;
    });

    const auto cell = [&](const std::string& method, const std::string& scenario) -> std::string {
        for (const auto& row : table.rows) {
            if (row.method != method || row.scenario != scenario) continue;
            char buf[96];
            if (method == table.baseline) {
                std::snprintf(buf, sizeof(buf), "%.4f(%.4f)", row.mean, row.std_dev);
            } else {
                std::snprintf(buf, sizeof(buf), "%.4f(%.4f) %+.4f", row.mean, row.std_dev,
                              row.delta);
            }
            return buf;
        }
        return "-";
    };

    std::vector<std::size_t> widths(scenarios.size() + 1, 0);
    widths[0] = std::string("method").size();
    for (const auto& m : methods) widths[0] = std::max(widths[0], m.size());
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        widths[s + 1] = scenarios[s].size();
        for (const auto& m : methods) widths[s + 1] = std::max(widths[s + 1], cell(m, scenarios[s]).size());
    }

    const auto pad = [](const std::string& text, std::size_t width) {
        return text + std::string(width - text.size(), ' ');
    };
    std::string out = pad("method", widths[0]);
    for (std::size_t s = 0; s < scenarios.size(); ++s) out += "  " + pad(scenarios[s], widths[s + 1]);
    out += '\n';
    for (const auto& m : methods) {
        out += pad(m, widths[0]);
        for (std::size_t s = 0; s < scenarios.size(); ++s) {
            out += "  " + pad(cell(m, scenarios[s]), widths[s + 1]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace crcg
