#pragma once

#include <string>
#include <string_view>

#include "hypalign/objective.hpp"

namespace hypalign {

inline constexpr int kModelFormatVersion = 1;

/// Tab-separated text; every real is written with 17 significant digits so
/// that parse_model(format_model(m)) reproduces m bit for bit.
std::string format_model(const JointModel& model);
JointModel parse_model(std::string_view text);

void save_model(const JointModel& model, const std::string& path);
/// Throws DataError naming the path when the file is missing or malformed.
JointModel load_model(const std::string& path);

}  // namespace hypalign
