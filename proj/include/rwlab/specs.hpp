#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "rwlab/groups.hpp"
#include "rwlab/measures.hpp"
#include "rwlab/weights.hpp"

namespace rwlab {

// "free:2", "abelian:1", "cyclic:6", "lamplighter:1", or the JSON object form
group parse_group_spec(const std::string& text);
group group_from_json(const nlohmann::json& j);
nlohmann::json group_to_json(const group& g);

// "preset:srw", "preset:lazy-srw:hold=0.5", "preset:dirac", inline JSON, or "@path" to a JSON file.
// fallback supplies the group when the spec does not name one.
sparse_measure parse_measure_spec(const std::string& text, const std::optional<group>& fallback = std::nullopt);
sparse_measure measure_from_json(const nlohmann::json& j, const std::optional<group>& fallback = std::nullopt);
nlohmann::json measure_to_json(const sparse_measure& mu);

// "const:1", "poly:d=2", "exp:a=1.5", "invseries:N=12[,exp=3]", products joined by '*'.
// invseries needs the step measure.
weight parse_weight_spec(const std::string& text, const sparse_measure* mu = nullptr);

std::string read_text_file(const std::string& path);

}  // namespace rwlab
