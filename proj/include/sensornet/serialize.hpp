#pragma once

#include <string>

#include <json.hpp>

#include "sensornet/events.hpp"
#include "sensornet/graph.hpp"
#include "sensornet/leadtime.hpp"
#include "sensornet/paradox.hpp"

namespace sensornet {

nlohmann::json to_json(const LeadTimeSummary& summary);
nlohmann::json to_json(const NullSummary& summary);
nlohmann::json to_json(const DetectionReport& report);
nlohmann::json to_json(const ActivityProfile& profile);
nlohmann::json to_json(const ComponentReport& report);

void save_json(const std::string& path, const nlohmann::json& doc);

// CSV `k,probability`.
void save_distribution(const std::string& path, const DegreeDistribution& dist);

// JSON header on a `#` line, then one node id per line.
void save_sample(const std::string& path, const NodeSample& sample);

// CSV `day,sensor_cum,control_cum,sensor_daily,control_daily,p_value`.
void save_detection_csv(const std::string& path, const DetectionReport& report);

} // namespace sensornet
