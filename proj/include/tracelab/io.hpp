#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>

#include <json.hpp>

#include "tracelab/model.hpp"
#include "tracelab/sim.hpp"

namespace tracelab {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double value);

/// Columnar code export: a header line "length n", then one line per segment
/// "p_i x_1i ... x_ni".
void write_code_text(std::ostream& out, const BiasVector& bias, const CodeMatrix& code);
std::pair<BiasVector, CodeMatrix> read_code_text(std::istream& in);

/// trial,user,segment,kind,overshoot
void write_events_csv(std::ostream& out, std::span<const TrialResult> results);

/// trial,catch_all_time,false_positives,false_negatives,segments_generated,mean_overshoot
/// catch_all_time is "NA" when some colluder was never accused.
void write_trials_csv(std::ostream& out, std::span<const TrialResult> results);

nlohmann::json to_json(const AggregateStats& stats);
nlohmann::json to_json(const ExperimentConfig& config);

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

}  // namespace tracelab
