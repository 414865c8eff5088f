#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "msdc/error.hpp"
#include "msdc/memory.hpp"

namespace msdc {

inline constexpr std::uint16_t kSnapshotVersion = 1;

/// Why a snapshot could not be loaded.
enum class SnapshotFault { bad_magic, version_mismatch, truncated, checksum_mismatch, malformed };

class SnapshotError : public Error {
public:
    SnapshotError(SnapshotFault fault, const std::string& what) : Error(what), fault_(fault) {}
    [[nodiscard]] SnapshotFault fault() const noexcept { return fault_; }

private:
    SnapshotFault fault_;
};

/// Binary snapshot layout (all integers little-endian):
///
///   "MSDC" | u16 version
///   geometry: u32 width, height, S, Q, K
///   params:   f64 eta_max, steepness, midpoint, g_floor, g_exponent
///   u64 stored_count
///   rng:      u32 length + engine state text
///   weights:  u32 quantum + ceil(P*Q*K/8) packed bytes
///   ledger:   u8 present [+ u32 count + entries]
///             entry = u32 len + label | u32 n + n*u32 pixels | u32 q + q*u32 winners
///   u32 CRC-32 of everything above
std::vector<std::uint8_t> encode_snapshot(const MemoryModel& model);
MemoryModel decode_snapshot(std::span<const std::uint8_t> bytes);

/// Writes to a temporary sibling and renames it over `path`.
void save_model(const MemoryModel& model, const std::filesystem::path& path);
MemoryModel load_model(const std::filesystem::path& path);

}  // namespace msdc
