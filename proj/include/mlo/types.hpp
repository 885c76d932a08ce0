#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mlo {

enum class Band : std::uint8_t { B2G4 = 0, B5G = 1, B6G = 2 };

inline constexpr std::size_t kNumBands = 3;

// Fixed band order; also the tie-break order used by every allocator.
inline constexpr std::array<Band, kNumBands> kAllBands{Band::B2G4, Band::B5G, Band::B6G};

constexpr std::size_t index_of(Band b) noexcept { return static_cast<std::size_t>(b); }

inline std::string_view to_string(Band b) noexcept {
  switch (b) {
    case Band::B2G4: return "B2G4";
    case Band::B5G: return "B5G";
    case Band::B6G: return "B6G";
  }
  return "?";
}

/// Small value-type set of bands.
class BandSet {
 public:
  constexpr BandSet() = default;
  constexpr BandSet(std::initializer_list<Band> bands) {
    for (Band b : bands) insert(b);
  }

  constexpr void insert(Band b) noexcept { bits_ |= bit(b); }
  constexpr void erase(Band b) noexcept { bits_ &= static_cast<std::uint8_t>(~bit(b)); }
  constexpr bool contains(Band b) const noexcept { return (bits_ & bit(b)) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr std::size_t size() const noexcept {
    std::size_t n = 0;
    for (Band b : kAllBands) n += contains(b) ? 1 : 0;
    return n;
  }
  constexpr bool is_subset_of(BandSet other) const noexcept { return (bits_ & ~other.bits_) == 0; }
  constexpr std::uint8_t bits() const noexcept { return bits_; }

  friend constexpr bool operator==(BandSet, BandSet) = default;

 private:
  static constexpr std::uint8_t bit(Band b) noexcept {
    return static_cast<std::uint8_t>(1u << index_of(b));
  }
  std::uint8_t bits_ = 0;
};

enum class PolicyKind : std::uint8_t { MLSA, SLCI, MCAA, VDS, SL, MBSL };

inline std::string_view to_string(PolicyKind p) noexcept {
  switch (p) {
    case PolicyKind::MLSA: return "mlsa";
    case PolicyKind::SLCI: return "slci";
    case PolicyKind::MCAA: return "mcaa";
    case PolicyKind::VDS: return "vds";
    case PolicyKind::SL: return "sl";
    case PolicyKind::MBSL: return "mbsl";
  }
  return "?";
}

enum class FlowKind : std::uint8_t { Video, Data };

inline std::string_view to_string(FlowKind k) noexcept {
  return k == FlowKind::Video ? "video" : "data";
}

// Errors

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct PlacementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mlo
