#pragma once

#include <string>

#include "spiky/matrix.hpp"
#include "spiky/types.hpp"

namespace spiky {

/// JSON certificate for a decomposition: kind, dims, field, terms (blocks
/// plus coeff or u/v), metadata, and a content hash of the target matrix so
/// verification can detect target drift.
std::string certificate_to_json(const Decomposition& d, const std::string& target_hash);

struct Certificate {
    Decomposition decomposition;
    std::string target_hash;
};

Certificate certificate_from_json(const std::string& text);

void save_certificate(const Decomposition& d, const std::string& target_hash,
                      const std::string& path);
Certificate load_certificate(const std::string& path);

} // namespace spiky
