#pragma once

// GridFunction serialization.
//
// CSV: optional '#'-prefixed metadata lines, a header "x,y,value", then one
// row per active node in row-major order (x fastest). The grid is rebuilt
// from the rows: n from the node count of the y == 0 row, the mask from the
// total row count.
//
// Binary: 8-byte little-endian header (uint32 n, uint32 mask flag) followed
// by (n+1)^2 float64 values in row-major order, masked nodes stored as 0.

#include <iosfwd>
#include <string>
#include <vector>

#include "plap/grid.hpp"

namespace plap {

void write_csv(std::ostream& os, const GridFunction& u, const std::vector<std::string>& metadata = {});
GridFunction read_csv(std::istream& is);

void write_csv_file(const std::string& path, const GridFunction& u,
                    const std::vector<std::string>& metadata = {});
GridFunction read_csv_file(const std::string& path);

void write_binary(std::ostream& os, const GridFunction& u);
GridFunction read_binary(std::istream& is);

}  // namespace plap
