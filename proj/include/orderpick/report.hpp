#pragma once

#include <string>
#include <vector>

#include "orderpick/trainer.hpp"

namespace orderpick {

// CSV payloads; the first line embeds the config hash so outputs are
// traceable to the exact (config, seed) pair that produced them.
std::string episodes_csv(const std::vector<MetricsReport>& episodes, uint64_t config_hash);
std::string aggregate_csv(const EvalReport& report, uint64_t config_hash);
std::string curve_csv(const std::vector<CurvePoint>& curve, uint64_t config_hash);

void write_file(const std::string& path, const std::string& content);

}  // namespace orderpick
