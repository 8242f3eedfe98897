#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "mprflow/topology.hpp"

namespace mprflow {

/// Parses a JSON scenario document:
///
///   {
///     "channel": {"alpha": 4, "v_default": 1.0},
///     "interference_policy": "path_nodes",
///     "nodes": [{"id": 0, "x_m": 0, "y_m": 0, "tx_power_w": 0.1, "noise_w": 7e-11,
///                "sinr_threshold": 0.5, "role": "source", "q": 0}],
///     "flows": [{"id": 1, "source": 0, "path": [0, 5, 10, 15]}]
///   }
///
/// `interference_policy` defaults to path_nodes and `channel.v_default` to 1.
/// Unknown keys are rejected. Throws ScenarioError.
Scenario load_scenario(std::string_view document);

/// Reads and parses a scenario file. Unreadable files raise ScenarioError::Kind::parse.
Scenario load_scenario_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// JSON text that load_scenario maps back to an equal scenario.
std::string serialize(const Scenario& scenario);

/// FNV-1a 64-bit digest, rendered as 16 hex digits.
std::string content_hash(std::string_view bytes);

} // namespace mprflow
