// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#ifndef OPDAD_STREAM_IO_HPP
#define OPDAD_STREAM_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "opdad/scenario.hpp"

namespace opdad {

/// Observation stream file: 16-byte header (magic "OPDD", version u16,
/// M u16, L u32, reserved u32), then one record per block of M interleaved
/// (re, im) little-endian float32 pairs.
inline constexpr char kStreamMagic[4] = {'O', 'P', 'D', 'D'};
inline constexpr std::uint16_t kStreamVersion = 1;

struct ObservationStream {
  int antennas = 0;
  std::vector<Eigen::VectorXcd> blocks;
};

void write_observation_stream(std::ostream& out, const std::vector<Observation>& blocks,
                              int antennas);
void write_observation_stream(const std::string& path,
                              const std::vector<Observation>& blocks, int antennas);

ObservationStream read_observation_stream(std::istream& in);
ObservationStream read_observation_stream(const std::string& path);

}  // namespace opdad

#endif  // OPDAD_STREAM_IO_HPP
