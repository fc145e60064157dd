// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include "opdad/stream_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace opdad {
namespace {

void put_u16(std::ostream& out, std::uint16_t v) {
  const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  out.write(bytes, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 4);
}

void put_f32(std::ostream& out, float v) {
  static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559);
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

std::uint16_t get_u16(std::istream& in) {
  unsigned char bytes[2];
  in.read(reinterpret_cast<char*>(bytes), 2);
  return static_cast<std::uint16_t>(bytes[0] | (bytes[1] << 8));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

float get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }

}  // namespace

void write_observation_stream(std::ostream& out, const std::vector<Observation>& blocks,
                              int antennas) {
  require(antennas >= 1 && antennas <= 0xffff, "antenna count out of range for stream header");
  out.write(kStreamMagic, 4);
  put_u16(out, kStreamVersion);
  put_u16(out, static_cast<std::uint16_t>(antennas));
  put_u32(out, static_cast<std::uint32_t>(blocks.size()));
  put_u32(out, 0u);  // reserved
  for (const Observation& obs : blocks) {
    require(obs.signal.size() == antennas, "observation dimension mismatch in stream");
    for (int i = 0; i < antennas; ++i) {
      put_f32(out, static_cast<float>(obs.signal(i).real()));
      put_f32(out, static_cast<float>(obs.signal(i).imag()));
    }
  }
  if (!out) throw NumericalError("failed to write observation stream");
}

void write_observation_stream(const std::string& path,
                              const std::vector<Observation>& blocks, int antennas) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open stream file for writing: " + path);
  write_observation_stream(out, blocks, antennas);
}

ObservationStream read_observation_stream(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kStreamMagic, 4) != 0) {
    throw ValidationError("not an observation stream file (bad magic)");
  }
  const std::uint16_t version = get_u16(in);
  if (version != kStreamVersion) {
    throw ValidationError("unsupported observation stream version");
  }
  const int antennas = get_u16(in);
  const std::uint32_t blocks = get_u32(in);
  get_u32(in);  // reserved
  require(antennas >= 1, "stream header carries zero antennas");

  ObservationStream stream;
  stream.antennas = antennas;
  stream.blocks.reserve(blocks);
  for (std::uint32_t l = 0; l < blocks; ++l) {
    Eigen::VectorXcd block(antennas);
    for (int i = 0; i < antennas; ++i) {
      const float re = get_f32(in);
      const float im = get_f32(in);
      block(i) = {static_cast<double>(re), static_cast<double>(im)};
    }
    if (!in) throw ValidationError("observation stream truncated");
    stream.blocks.push_back(std::move(block));
  }
  return stream;
}

ObservationStream read_observation_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open stream file: " + path);
  return read_observation_stream(in);
}

}  // namespace opdad
