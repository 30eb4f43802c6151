#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rou/estimate.hpp"
#include "rou/model.hpp"
#include "rou/simulate.hpp"

namespace rou::cli {

/// Bad flags, malformed config or malformed input data (exit code 2).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

struct ExperimentConfig {
    ROUParams true_params{1.0, 1.0, 0.5};
    double h = 0.5;
    std::vector<std::size_t> n_list{2000, 3000, 4000, 5000, 6000, 8000};
    int substeps = 200;
    int N = 12;
    SigmaInterval D_sigma;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
    std::string output_dir = ".";

    void validate() const;
};

/// Parse a JSON document whose keys mirror ExperimentConfig; missing keys
/// keep their defaults, unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Locale-independent, 10 significant digits.
std::string format_number(double x);

void write_path_csv(std::ostream& out, const Path& path);

/// Values column of a CSV (header optional; column `value` if present,
/// otherwise the last column). Throws UsageError naming the offending line.
std::vector<double> read_values_csv(std::istream& in);

/// Flat JSON report of one estimation.
std::string estimation_report_json(const EstimationResult& r);

struct Table1Row {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::optional<EstimationResult> result;
    std::string error;
};

struct Table1Summary {
    std::size_t n = 0;
    double kappa_median = 0.0;
    double theta_median = 0.0;
    double sigma_median = 0.0;
    double sigma_c_median = 0.0;
    std::size_t failures = 0;
};

/// One path per seed (length max(n_list)); each n estimates on the first n
/// observations of that path. Rows come back sorted by (n, seed).
std::vector<Table1Row> run_table1(const ExperimentConfig& cfg, unsigned threads = 0);
std::vector<Table1Summary> summarize_table1(const std::vector<Table1Row>& rows);
void write_table1_csv(std::ostream& out, const std::vector<Table1Row>& rows,
                      const std::vector<Table1Summary>& summary);
/// Estimators as rows, n as columns (the layout of the published table).
void write_table1_pivot(std::ostream& out, const std::vector<Table1Summary>& summary);

struct CurvePoint {
    double sigma;
    double deriv;  ///< (1/h) d g3 / d sigma^2
};

std::vector<CurvePoint> deriv_curve(double u, double v, double h, const std::vector<double>& sigma_grid,
                                    int truncation = 12);

/// Inclusive grid lo, lo + step, ..., hi (empty when lo > hi).
std::vector<double> make_grid(double lo, double hi, double step);

/// Entry point shared by the `rou` executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rou::cli
