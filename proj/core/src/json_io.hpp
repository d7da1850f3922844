#pragma once

// nlohmann/json conversions shared by the library sources. Not installed.

#include <json.hpp>

#include "robosnn/nn.hpp"

namespace robosnn::detail {

inline constexpr const char* kNetworkFormat = "robosnn.network";
inline constexpr int kNetworkVersion = 1;

nlohmann::json network_json(const Network& net);
Network network_from(const nlohmann::json& doc);

}  // namespace robosnn::detail
