#include "sensornet/serialize.hpp"

#include <fstream>
#include <stdexcept>

#include "sensornet/io_util.hpp"

namespace sensornet {

nlohmann::json to_json(const LeadTimeSummary& summary)
{
    return {
        {"mean", summary.mean},
        {"sem", summary.sem},
        {"fraction_negative", summary.fraction_negative},
        {"replicates", summary.replicates},
        {"skipped", summary.skipped},
        {"deltas", summary.deltas},
        {"control_sizes", summary.control_sizes},
        {"sensor_sizes", summary.sensor_sizes},
        {"control_infected", summary.control_infected},
        {"sensor_infected", summary.sensor_infected},
    };
}

nlohmann::json to_json(const NullSummary& summary)
{
    return {
        {"mean", summary.mean},
        {"sem", summary.sem},
        {"replicates", summary.replicates},
        {"skipped", summary.skipped},
        {"observed_mean", summary.observed_mean},
        {"percentile", summary.percentile},
        {"two_sided_p", summary.two_sided_p},
        {"q025", summary.q025},
        {"q975", summary.q975},
        {"deltas", summary.deltas},
    };
}

nlohmann::json to_json(const DetectionReport& report)
{
    nlohmann::json doc{
        {"sensor_cum", report.sensor_cum},
        {"control_cum", report.control_cum},
        {"sensor_daily", report.sensor_daily},
        {"control_daily", report.control_daily},
        {"p_value", report.p_value},
        {"peak_incidence_day", report.peak_incidence_day},
    };
    doc["detection_day"] =
        report.detection_day ? nlohmann::json(*report.detection_day) : nlohmann::json();
    doc["control_catch_up_day"] = report.control_catch_up_day
                                      ? nlohmann::json(*report.control_catch_up_day)
                                      : nlohmann::json();
    return doc;
}

namespace {

nlohmann::json to_json(const GroupStat& stat)
{
    return {{"mean", stat.mean}, {"sem", stat.sem}};
}

} // namespace

nlohmann::json to_json(const ActivityProfile& profile)
{
    nlohmann::json buckets = nlohmann::json::array();
    for (const ActivityBucket& b : profile.diversity_by_activity)
        buckets.push_back({{"low", b.low},
                           {"high", b.high},
                           {"user_count", b.user_count},
                           {"unique_tags", to_json(b.unique_tags)}});
    return {
        {"users", profile.rows.size()},
        {"absent_users", profile.absent_users},
        {"total_messages", to_json(profile.total_messages)},
        {"tagged_messages", to_json(profile.tagged_messages)},
        {"tag_uses", to_json(profile.tag_uses)},
        {"unique_tags", to_json(profile.unique_tags)},
        {"uses_per_unique_tag", to_json(profile.uses_per_unique_tag)},
        {"diversity_by_activity", buckets},
    };
}

nlohmann::json to_json(const ComponentReport& report)
{
    return {
        {"component_count", report.component_count},
        {"giant_fraction", report.giant_fraction},
        {"largest", report.component_sizes.empty() ? 0 : report.component_sizes.front()},
    };
}

void save_json(const std::string& path, const nlohmann::json& doc)
{
    write_text_file(path, doc.dump(2) + "\n");
}

void save_distribution(const std::string& path, const DegreeDistribution& dist)
{
    std::string out = "k,probability\n";
    for (std::size_t i = 0; i < dist.support().size(); ++i) {
        out += std::to_string(dist.support()[i]);
        out += ',';
        out += format_double(dist.mass()[i]);
        out += '\n';
    }
    write_text_file(path, out);
}

void save_sample(const std::string& path, const NodeSample& sample)
{
    nlohmann::json header{
        {"origin", sample.origin == SampleOrigin::control ? "control" : "sensor"},
        {"policy", sample.policy},
        {"gamma", sample.gamma},
        {"seed", sample.seed},
        {"size", sample.members.size()},
        {"skipped_isolated", sample.skipped_isolated},
    };
    std::string out = "# " + header.dump() + "\n";
    for (NodeId u : sample.members) {
        out += std::to_string(u);
        out += '\n';
    }
    write_text_file(path, out);
}

void save_detection_csv(const std::string& path, const DetectionReport& report)
{
    std::string out = "day,sensor_cum,control_cum,sensor_daily,control_daily,p_value\n";
    for (std::size_t d = 0; d < report.p_value.size(); ++d) {
        out += std::to_string(d);
        out += ',';
        out += format_double(report.sensor_cum[d]);
        out += ',';
        out += format_double(report.control_cum[d]);
        out += ',';
        out += std::to_string(report.sensor_daily[d]);
        out += ',';
        out += std::to_string(report.control_daily[d]);
        out += ',';
        out += format_double(report.p_value[d]);
        out += '\n';
    }
    write_text_file(path, out);
}

} // namespace sensornet
