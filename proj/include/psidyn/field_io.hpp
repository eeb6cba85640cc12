#pragma once

#include <string>

#include "psidyn/field.hpp"

namespace psidyn {

// Binary field file: 16-byte magic "PSIDYN-FIELD" padded with NULs, then
// little-endian u32 dim, u32 n, u32 side flag (0 physical, 1 frequency),
// f64 extent, then n^d complex128 pairs in row-major lattice order. Only
// plain fields (no magnitude shift, no overflow mask) are written; shifted
// trajectories record their shift in the accompanying manifest instead.
void dump_field(const Field& f, const std::string& path);
Field load_field(const std::string& path);

// CSV with a mandatory header, '.' decimal separator and ',' field
// separator: one row per lattice point, columns i0[,i1[,i2]],re,im.
std::string field_csv(const Field& f);
void dump_field_csv(const Field& f, const std::string& path);

} // namespace psidyn
