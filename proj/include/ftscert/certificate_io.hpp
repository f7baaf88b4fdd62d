#pragma once

#include <string>

#include "ftscert/certify.hpp"

namespace ftscert {

// JSON round trip for certificates. Serialization is deterministic: equal
// certificates produce byte-identical output, and every exact quantity
// (rational coefficients, mu, gamma) survives the round trip unchanged.
std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);

void save_certificate(const Certificate& cert, const std::string& path);
Certificate load_certificate(const std::string& path);

}  // namespace ftscert
