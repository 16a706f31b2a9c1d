#pragma once

#include <filesystem>
#include <string>

#include "evio/events.hpp"

namespace evio {

// File formats
//
//   event CSV      header `t_us,x,y,p`, one event per line, p in {0,1}
//                  (0 -> Negative, 1 -> Positive)
//   event binary   little-endian; 16-byte header = magic "EVIO", version
//                  u16=1, sensor_width u16, sensor_height u16, record_count
//                  u32, reserved u16=0; then 14 bytes per event: t_us u64,
//                  x u16, y u16, p u8 (0/1), reserved u8=0
//   label CSV      header `idx,x,y,blink`, x/y with >= 4 fractional digits,
//                  blink in {0,1}
//   trajectory CSV header `idx,x,y`

/// Shortest decimal form that parses back to the same double, padded to at
/// least four fractional digits. Used for every coordinate column.
std::string format_coord(double v);

/// Parses an event CSV recorded on a width x height sensor. Rows out of
/// order are fixed with a stable sort by t_us; malformed rows raise
/// ParseError naming the line, out-of-bounds coordinates raise BoundsError.
EventStream read_events_csv(const std::filesystem::path& path,
                            std::uint16_t sensor_width, std::uint16_t sensor_height);

void write_events_csv(const EventStream& stream, const std::filesystem::path& path);

/// Reads the EVIO binary container. Bad magic/version or a payload whose
/// length is not record_count * 14 raises FormatError.
EventStream read_events_bin(const std::filesystem::path& path);

void write_events_bin(const EventStream& stream, const std::filesystem::path& path);

/// Index continuity is enforced (gap -> FormatError); the first index may be
/// nonzero so that temporally shifted tracks survive a round trip.
LabelTrack read_labels_csv(const std::filesystem::path& path);

void write_labels_csv(const LabelTrack& track, const std::filesystem::path& path);

Trajectory read_trajectory_csv(const std::filesystem::path& path);

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path,
                          std::uint32_t start_index = 0);

}  // namespace evio
