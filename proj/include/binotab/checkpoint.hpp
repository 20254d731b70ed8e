#pragma once

// Network checkpoints. Binary layout, all integers and floats little-endian:
//
//   magic   "BNTB"  4 bytes
//   version u16     currently 1
//   layers  u16
//   per layer: in_units u32, out_units u32, activation u8,
//              weights f64[out*in] row-major, bias f64[out]
//
// Load rejects unknown magic or version, unknown activation tags and
// truncated files.

#include "binotab/network.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace binotab {

inline constexpr char kCheckpointMagic[4] = {'B', 'N', 'T', 'B'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

namespace detail {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const char byte = static_cast<char>((value >> (8 * i)) & 0xff);
    out.put(byte);
  }
}

template <typename T>
T read_le(std::istream& in) {
  static_assert(std::is_integral_v<T>);
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int byte = in.get();
    if (byte == std::char_traits<char>::eof()) {
      throw std::runtime_error("checkpoint: truncated file");
    }
    value |= static_cast<T>(static_cast<unsigned char>(byte)) << (8 * i);
  }
  return value;
}

inline void write_f64(std::ostream& out, double v) {
  write_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
}

inline double read_f64(std::istream& in) {
  return std::bit_cast<double>(read_le<std::uint64_t>(in));
}

}  // namespace detail

inline void save_checkpoint(const Network& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
  out.write(kCheckpointMagic, 4);
  detail::write_le<std::uint16_t>(out, kCheckpointVersion);
  detail::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(net.layer_count()));
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    const DenseLayer& layer = net.layer(i);
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(layer.in_units()));
    detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(layer.out_units()));
    detail::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(net.activation(i)));
    const double* w = layer.weights.data();
    for (std::size_t j = 0; j < layer.weights.size(); ++j) detail::write_f64(out, w[j]);
    const double* b = layer.bias.data();
    for (std::size_t j = 0; j < layer.bias.size(); ++j) detail::write_f64(out, b[j]);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

inline Network load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path);
  }
  const auto version = detail::read_le<std::uint16_t>(in);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto layer_count = detail::read_le<std::uint16_t>(in);
  if (layer_count == 0) throw std::runtime_error("checkpoint: no layers");
  Network net;
  for (std::size_t i = 0; i < layer_count; ++i) {
    const auto in_units = detail::read_le<std::uint32_t>(in);
    const auto out_units = detail::read_le<std::uint32_t>(in);
    const auto act_tag = detail::read_le<std::uint8_t>(in);
    if (in_units == 0 || out_units == 0) {
      throw std::runtime_error("checkpoint: zero-sized layer");
    }
    if (act_tag > static_cast<std::uint8_t>(Activation::identity)) {
      throw std::runtime_error("checkpoint: unknown activation tag " +
                               std::to_string(act_tag));
    }
    DenseLayer layer;
    layer.weights = Matrix(out_units, in_units);
    layer.bias = Matrix(1, out_units);
    double* w = layer.weights.data();
    for (std::size_t j = 0; j < layer.weights.size(); ++j) w[j] = detail::read_f64(in);
    double* b = layer.bias.data();
    for (std::size_t j = 0; j < layer.bias.size(); ++j) b[j] = detail::read_f64(in);
    net.add(std::move(layer), static_cast<Activation>(act_tag));
  }
  return net;
}

}  // namespace binotab
