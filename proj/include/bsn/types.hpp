#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bsn {

/// Simulation time in integer ticks of one microsecond.
using SimTime = std::uint64_t;

inline constexpr SimTime kTimeMax = std::numeric_limits<SimTime>::max();

constexpr SimTime microseconds(std::uint64_t v) { return v; }
constexpr SimTime milliseconds(std::uint64_t v) { return v * 1000; }
constexpr SimTime seconds(std::uint64_t v) { return v * 1000000; }

/// Index of a simulated entity. Sensor nodes are 0..n-1, the coordinator is n.
using EntityId = std::uint32_t;

/// What a MAC state machine wants its radio to do right now.
enum class MacAction : std::uint8_t {
    Sleep,
    Transmit,
    Receive,
    IdleListen,
    Contend,
    Backoff,
    AccessFailure,
};

std::string_view to_string(MacAction a);

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on a numeric domain was violated (e.g. non-positive distance).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A configuration value violates a documented invariant.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace bsn
