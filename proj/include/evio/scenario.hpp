#pragma once

#include <filesystem>
#include <string>

#include "evio/simulator.hpp"

namespace evio {

/// A simulation recipe: DVS model parameters plus the motion script.
struct Scenario {
    SimConfig config;
    MotionScript script;
};

/// Parses scenario JSON of the form
///   { "config": { "width": 80, ... },
///     "script": [ { "kind": "pursuit", "duration_ms": 2000,
///                   "amplitude_px": 20, "frequency_hz": 1.0 }, ... ] }
/// Unknown kinds or malformed JSON raise ParseError.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace evio
