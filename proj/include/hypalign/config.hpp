#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hypalign/trainer.hpp"

namespace hypalign {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Flat `key = value` text; blank lines and '#' comments ignored. Later keys
/// override earlier ones when applied in order.
KeyValues parse_config_text(std::string_view text);

/// Sets one training option by name. Throws UsageError for an unknown key or
/// a value that does not parse.
void set_option(TrainConfig& cfg, const std::string& key, const std::string& value);

/// Every option with its effective value, in a fixed order.
KeyValues describe(const TrainConfig& cfg);

/// Names accepted by set_option.
std::vector<std::string> option_names();

}  // namespace hypalign
