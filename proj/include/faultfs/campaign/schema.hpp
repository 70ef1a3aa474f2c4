// SPDX-License-Identifier: Apache-2.0
#pragma once

// Validator for the JSON Schema subset the shipped config schema uses:
// type, enum, const, required, properties, additionalProperties, items,
// minItems/maxItems, minLength, minimum/maximum and their exclusive forms,
// and local "#/..." $ref.

#include <string>
#include <vector>

#include "json.hpp"

namespace faultfs::campaign {

/// One message per violation, each prefixed with the JSON pointer of the
/// offending value. Empty when `doc` conforms.
std::vector<std::string> validate_against(const nlohmann::json& schema, const nlohmann::json& doc);

/// The campaign schema compiled into the tool (docs/campaign.schema.json).
const nlohmann::json& campaign_schema();

}  // namespace faultfs::campaign
