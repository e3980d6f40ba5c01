#pragma once

#include <cstddef>
#include <cstdint>

namespace apc {

// CRC-32 (IEEE 802.3 polynomial, reflected), as used by zip/png.
uint32_t crc32(const void* data, size_t length, uint32_t seed = 0);

}  // namespace apc
