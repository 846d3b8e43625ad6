#pragma once

#include <json.hpp>
#include <string>

#include "rwlab/estimators.hpp"

namespace rwlab {

// Non-finite doubles are written as the strings "inf", "-inf", "nan".
nlohmann::json number_to_json(double v);
double number_from_json(const nlohmann::json& j);

nlohmann::json sequence_to_json(const asymptotic_sequence& s);
asymptotic_sequence sequence_from_json(const nlohmann::json& j);

// Schema: quantity, estimate, lower, upper, sequence (headline), sequences, method, params,
// seed, flags, diagnostics. metadata is attached separately and ignored on comparison.
nlohmann::json report_to_json(const estimate_report& r);
estimate_report report_from_json(const nlohmann::json& j);

bool same_report(const estimate_report& a, const estimate_report& b);

// run metadata: timestamp, tool version, thread count, cache dir echo
nlohmann::json run_metadata(int threads);

std::string emit_json(const estimate_report& r, const nlohmann::json& metadata = nullptr);
estimate_report parse_report_text(const std::string& text);

// header index,value; values with %.17g
std::string sequence_csv(const asymptotic_sequence& s);
std::string format_value(double v);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rwlab
