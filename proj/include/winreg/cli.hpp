#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "winreg/experiment.hpp"

namespace winreg {

/// Process exit codes.
enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

/// Entry point for the `winreg` executable. Never throws; errors map to ExitCode.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

nlohmann::json params_to_json(const std::vector<TrainedParams>& params);
std::vector<TrainedParams> params_from_json(const nlohmann::json& doc);

nlohmann::json report_to_json(const ExperimentConfig& config, const EstimatorReport& report);

/// Error table as CSV: one row per (R, window kind), one column per estimator and split.
std::string table_csv(const EstimatorReport& report);

}  // namespace winreg
