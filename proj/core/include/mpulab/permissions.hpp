//
// Copyright © 2026 The mpulab Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace mpulab {

/// One past the last byte of the 32-bit physical address space.
inline constexpr std::uint64_t kAddressSpaceEnd = std::uint64_t{1} << 32;

/// Half-open byte range [base, base + size). Held in 64 bits so that the end
/// of a range touching the top of the 32-bit space is representable.
struct AddressRange {
  std::uint64_t base = 0;
  std::uint64_t size = 0;

  [[nodiscard]] constexpr std::uint64_t end() const { return base + size; }
  [[nodiscard]] constexpr std::uint64_t last() const { return base + size - 1; }
  [[nodiscard]] constexpr bool contains(std::uint64_t address) const {
    return address >= base && address < end();
  }
  [[nodiscard]] constexpr bool overlaps(const AddressRange& other) const {
    return base < other.end() && other.base < end();
  }
  /// size > 0 and the range does not wrap past 2^32.
  [[nodiscard]] constexpr bool valid() const {
    return size > 0 && base < kAddressSpaceEnd && size <= kAddressSpaceEnd - base;
  }

  friend constexpr bool operator==(const AddressRange&, const AddressRange&) = default;
};

enum class Mode : std::uint8_t { Privileged, Unprivileged };
enum class AccessKind : std::uint8_t { Read, Write, Execute };

inline constexpr Mode kModes[] = {Mode::Privileged, Mode::Unprivileged};
inline constexpr AccessKind kAccessKinds[] = {AccessKind::Read, AccessKind::Write,
                                              AccessKind::Execute};

std::string_view to_string(Mode mode) noexcept;
std::string_view to_string(AccessKind kind) noexcept;
/// Accepts "Privileged"/"privileged"/"priv"/"p" and the unprivileged spellings.
std::optional<Mode> parse_mode(std::string_view text);
/// Accepts "Read"/"read"/"r" and likewise for write and execute.
std::optional<AccessKind> parse_access_kind(std::string_view text);

/// A subset of {read, write, execute}.
class Rights {
 public:
  static constexpr std::uint8_t kRead = 1U << 0;
  static constexpr std::uint8_t kWrite = 1U << 1;
  static constexpr std::uint8_t kExecute = 1U << 2;
  static constexpr std::uint8_t kAll = kRead | kWrite | kExecute;

  constexpr Rights() = default;
  constexpr explicit Rights(std::uint8_t bits) : bits_(bits & kAll) {}

  static constexpr Rights none() { return Rights{}; }
  static constexpr Rights all() { return Rights{kAll}; }
  static constexpr Rights of(AccessKind kind) { return Rights{bit(kind)}; }

  [[nodiscard]] constexpr std::uint8_t bits() const { return bits_; }
  [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
  [[nodiscard]] constexpr bool allows(AccessKind kind) const { return (bits_ & bit(kind)) != 0; }
  [[nodiscard]] constexpr bool read() const { return (bits_ & kRead) != 0; }
  [[nodiscard]] constexpr bool write() const { return (bits_ & kWrite) != 0; }
  [[nodiscard]] constexpr bool execute() const { return (bits_ & kExecute) != 0; }
  [[nodiscard]] constexpr bool subset_of(Rights other) const { return (bits_ & ~other.bits_) == 0; }
  /// Bits present here but absent from `other`.
  [[nodiscard]] constexpr Rights minus(Rights other) const {
    return Rights{static_cast<std::uint8_t>(bits_ & ~other.bits_)};
  }
  [[nodiscard]] constexpr int count() const {
    return (read() ? 1 : 0) + (write() ? 1 : 0) + (execute() ? 1 : 0);
  }

  constexpr Rights operator|(Rights other) const {
    return Rights{static_cast<std::uint8_t>(bits_ | other.bits_)};
  }
  constexpr Rights operator&(Rights other) const {
    return Rights{static_cast<std::uint8_t>(bits_ & other.bits_)};
  }
  constexpr Rights& operator|=(Rights other) { return *this = *this | other; }

  /// Fixed-width "rwx" form with '-' for absent rights.
  [[nodiscard]] std::string str() const;
  /// Inverse of str(); also accepts unordered letter sets like "xr" and "".
  static std::optional<Rights> parse(std::string_view text);

  friend constexpr bool operator==(Rights, Rights) = default;

 private:
  static constexpr std::uint8_t bit(AccessKind kind) {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(kind));
  }

  std::uint8_t bits_ = 0;
};

/// Access rights for each privilege mode.
struct PermissionSet {
  Rights privileged;
  Rights unprivileged;

  [[nodiscard]] constexpr Rights of(Mode mode) const {
    return mode == Mode::Privileged ? privileged : unprivileged;
  }
  [[nodiscard]] constexpr PermissionSet operator|(const PermissionSet& other) const {
    return {privileged | other.privileged, unprivileged | other.unprivileged};
  }
  /// Six-bit vector: privileged rwx in bits 0..2, unprivileged rwx in bits 3..5.
  [[nodiscard]] constexpr std::uint8_t packed() const {
    return static_cast<std::uint8_t>(privileged.bits() | (unprivileged.bits() << 3));
  }

  friend constexpr bool operator==(const PermissionSet&, const PermissionSet&) = default;
};

/// Lowercase hex with a 0x prefix, zero-padded to eight digits.
std::string hex32(std::uint64_t value);

}  // namespace mpulab
