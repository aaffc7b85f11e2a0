#pragma once

// Result files and the report derived from them.
//
// A run directory holds rounds.csv, summary.csv, summary.json and config.json;
// a sweep directory holds sweep.csv. `emit_report` reads either (or both) and
// writes the table, per-learner curve files and the sweep surface.

#include <filesystem>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monotone/harness.hpp"

namespace monotone {

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Columns: run,learner,round,true_error,update,p_value,val_error_candidate,val_error_incumbent
void write_rounds_csv(const ExperimentResult& result, std::ostream& out);
/// Columns: learner,aulc_mean,aulc_std,fraction_mean,fraction_std
void write_summary_csv(const ExperimentResult& result, std::ostream& out);
/// Experiment name plus one CurveStats object per learner.
[[nodiscard]] std::string summary_json(const ExperimentResult& result);
/// Columns: alpha,nv,learner,aulc,fraction,zero
void write_sweep_csv(std::span<const SweepCell> cells, std::ostream& out);
[[nodiscard]] std::string verify_json(const RunBoundReport& bound,
                                      std::span<const ConsistencyEntry> consistency);

/// Writers for whole directories; create `dir` if needed. Return files written.
std::vector<std::filesystem::path> write_run_outputs(const ExperimentResult& result,
                                                     const std::filesystem::path& dir);
std::vector<std::filesystem::path> write_sweep_outputs(std::span<const SweepCell> cells,
                                                       const std::filesystem::path& dir);

/// Reads a results directory and writes table.txt, table.csv, curve_<LEARNER>.csv
/// and sweep_surface.csv, as applicable. Throws ReportError when the input has
/// no results; nothing is written in that case.
std::vector<std::filesystem::path> emit_report(const std::filesystem::path& in,
                                               const std::filesystem::path& out);

/// Shortest round-tripping decimal form used in every CSV.
[[nodiscard]] std::string format_number(double value);

}  // namespace monotone
