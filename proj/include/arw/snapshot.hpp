#pragma once

#include <iosfwd>
#include <string>

#include "arw/configuration.hpp"

namespace arw {

// Snapshot text format: a header line
//   arw d=<d> L=<L1,...,Ld> boundary=<torus|absorbing>
// followed by one token per site in raster order: 0, s, or a positive
// integer.

std::string snapshot_dump(const Configuration& config);
Configuration snapshot_parse(const std::string& text);

void snapshot_save(const Configuration& config, const std::string& path);
Configuration snapshot_load(const std::string& path);

}  // namespace arw
