#pragma once

#include "aclrisk/config.hpp"
#include "json.hpp"

namespace aclrisk::detail {

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& doc, const RunConfig& base);
nlohmann::json matrix_to_json(const JudgmentMatrix& matrix);
JudgmentMatrix matrix_from_json(const nlohmann::json& rows);

}  // namespace aclrisk::detail
