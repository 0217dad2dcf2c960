#pragma once

#include <string>
#include <vector>

#include "blockout/training.hpp"

namespace blockout {

// Training-log CSV: header "iteration,train_loss,train_acc,eval_acc", one row
// per iteration, the eval_acc field filled only on iterations that scored the
// eval split. Doubles are rendered with 17 significant digits, so a re-read
// reproduces the log exactly and identical runs produce identical bytes.
void write_log_csv(const std::string& path, const TrainingLog& log);
TrainingLog read_log_csv(const std::string& path);  // snapshots left empty

// Probability snapshots, little-endian:
//   magic "BSNP" | u16 version=1 | u64 record count | records of
//   (u64 iteration, u32 interface_id, u32 rows, u32 cols, f64 data row-major).
void write_snapshots(const std::string& path, const std::vector<ProbabilitySnapshot>& snapshots);
std::vector<ProbabilitySnapshot> read_snapshots(const std::string& path);

// 17-significant-digit decimal rendering used by every CSV artifact.
std::string format_double(double v);

}  // namespace blockout
