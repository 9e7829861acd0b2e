#pragma once

#include <iosfwd>
#include <string>

#include "tuckergrid/tucker.hpp"

namespace tuckergrid {

/// JSON dump of a tensor: {"shape", "ranks", "factors" (column-major flat,
/// one array per mode), "core" (flat, first index fastest)}.
void save_tensor_json(const TuckerTensor& t, std::ostream& out);
void save_tensor_json(const TuckerTensor& t, const std::string& path);
TuckerTensor load_tensor_json(std::istream& in);
TuckerTensor load_tensor_json(const std::string& path);

/// Write `contents` to `path` atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& contents);

}  // namespace tuckergrid
