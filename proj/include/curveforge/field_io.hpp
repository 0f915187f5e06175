// Field serialization.
//
// CSV: a comment line "# torus dim=<m> points=<N> nodes=<k>", a header row,
// then one row per sample: the grid coordinates (and the time for space-time
// fields) followed by the value, full double precision.
//
// Binary (little-endian, x86 native):
//   u32 dim, u32 points_per_axis, u32 node_count   (node_count 0: plain field)
//   node_count f64 time nodes                      (space-time fields only)
//   max(node_count,1) * N^dim f64 samples, node-major, row-major within a node
#pragma once

#include <string>

#include "curveforge/grid_field.hpp"

namespace curveforge {

void write_csv(const std::string& path, const GridField& f);
void write_csv(const std::string& path, const SpaceTimeField& f);
GridField read_grid_csv(const std::string& path);
SpaceTimeField read_spacetime_csv(const std::string& path);

void write_binary(const std::string& path, const GridField& f);
void write_binary(const std::string& path, const SpaceTimeField& f);
GridField read_grid_binary(const std::string& path);
SpaceTimeField read_spacetime_binary(const std::string& path);

// True if the binary file at path holds a space-time field (node_count > 0).
bool binary_is_spacetime(const std::string& path);

}  // namespace curveforge
