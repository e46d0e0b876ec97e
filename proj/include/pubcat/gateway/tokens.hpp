#pragma once

#include <string>

namespace pubcat {

/// 128 bits from the kernel CSPRNG, base64url without padding (22 chars).
/// Throws StorageUnavailable if no entropy source is available.
std::string generate_token();

std::string base64url(const unsigned char* data, std::size_t size);

}  // namespace pubcat
