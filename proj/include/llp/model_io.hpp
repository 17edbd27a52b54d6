#pragma once

#include <string>
#include <vector>

#include "llp/eval.hpp"
#include "llp/predict.hpp"
#include "llp/sampler.hpp"

namespace llp {

/// Model persistence: JSON-lines with a versioned header record followed
/// by one record per retained sample. Serialization is deterministic, so
/// identical sample lists produce byte-identical files.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

void save_chain_report(const ChainReport& report, const std::string& path);

/// Multi-chain variant: {"chains": [...]} in chain order.
void save_chain_reports(const std::vector<ChainReport>& reports,
                        const std::string& path);

std::string eval_report_json(const EvalReport& report);

/// id,prob CSV.
void save_scores(const std::vector<long>& ids,
                 const std::vector<double>& probs, const std::string& path);

/// Row-major probability raster (rows with ascending y, columns with
/// ascending x).
void save_grid_csv(const PredictiveGrid& grid, const std::string& path);

/// Binary 8-bit PGM with pixel = round(255 * p), half up; written with
/// the top image row at the highest y so the raster views naturally.
void save_grid_pgm(const PredictiveGrid& grid, const std::string& path);

}  // namespace llp
