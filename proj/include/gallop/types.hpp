#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gallop {

using NodeId = std::uint32_t;
using Channel = int;

// Data-slot index inside a frame (t0, t1, ...).
using DataSlot = int;

inline constexpr NodeId kController = 1;
inline constexpr double kSlotUs = 200.0;

enum class FrameKind { Downlink, Uplink, Retransmission };

std::string to_string(FrameKind k);

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InconsistentSpec : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace gallop
