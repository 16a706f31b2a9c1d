#pragma once

#include <filesystem>

#include "evio/events.hpp"

namespace evio::cli {

/// Writes the trajectory report SVG: ground truth vs prediction in sensor
/// space plus per-axis time series. Plain polylines and text only, with
/// pinned number formatting so repeated runs are byte-identical.
void write_trajectory_svg(const Trajectory& pred, const LabelTrack& gt,
                          std::uint16_t sensor_width, std::uint16_t sensor_height,
                          const std::filesystem::path& path);

}  // namespace evio::cli
