#pragma once

#include <iosfwd>
#include <string>

#include "jumpstop/grid.hpp"

namespace jumpstop {

/// CSV schema: header `t,x1..xd,value,control_index,stop`, one row per node,
/// time-major then lexicographic in space. Oracle surfaces carry an extra
/// constant `source` column. Numeric formatting is fixed so identical
/// surfaces serialize byte-identically.
void write_surface_csv(std::ostream& os, const ValueSurface& surface,
                       const std::string& source = "");
void write_surface_csv_file(const std::string& path, const ValueSurface& surface,
                            const std::string& source = "");

/// Rebuilds the grid from the row coordinates; accepts both plain and
/// `source`-tagged files.
ValueSurface read_surface_csv(std::istream& is);
ValueSurface read_surface_csv_file(const std::string& path);

/// Shared numeric formatting for artifacts (shortest round-trip decimal).
std::string format_real(double v);

}  // namespace jumpstop
