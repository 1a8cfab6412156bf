#pragma once

#include <string>
#include <vector>

#include "kdebench/common.hpp"
#include "kdebench/estimator.hpp"
#include "kdebench/evaluation.hpp"

namespace kdebench {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

// Dataset CSV: one row per point, d float columns, header "x1,...,xd".
void write_points_csv(const std::string& path, const PointSet& X,
                      bool header = true);

// Header row is auto-detected. Ragged or non-numeric rows raise data_error.
// An empty file (or header only) yields a 0 x 0 set.
PointSet read_points_csv(const std::string& path);

// Single "density" column.
void write_density_csv(const std::string& path, const Vector& densities);

// Model container (JSON): {format_version, kind, d, gamma, ...} with
// kind-specific payload. Loading reproduces estimates to 1e-15.
void save_model(const std::string& path, const FittedEstimator& estimator);
FittedEstimator load_model(const std::string& path);

// Report files. CSV column order:
// dataset,estimator,n_train,n_test,gamma,rff_d,rank,mae,mae_std,
// predict_time_ms,time_std_ms,repeats,seed,error
void write_report_csv(const std::string& path,
                      const std::vector<EvalReport>& reports);
void write_report_jsonl(const std::string& path,
                        const std::vector<EvalReport>& reports);

// Plot aggregation: dataset,estimator,n,mae_median,time_median over
// attempts (failed cells excluded).
void write_aggregate_csv(const std::string& path,
                         const std::vector<EvalReport>& reports);

}  // namespace kdebench
