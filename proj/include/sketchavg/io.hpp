#pragma once

#include <string>

#include "sketchavg/types.hpp"

namespace sketchavg {

// Two on-disk formats, detected by content when reading:
//  - CSV: one matrix row per line, comma separated, '.' decimal, no header.
//  - DSKM: magic "DSKM", then rows and cols as little-endian u64, then
//    row-major doubles (little-endian IEEE 754).
// When writing, paths ending in ".csv" get CSV, everything else DSKM.

Matrix read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Matrix& m);

// Vectors are stored as single-column matrices (a 1 x n CSV row also reads
// back as a vector).
Vector read_vector(const std::string& path);
void write_vector(const std::string& path, const Vector& v);

// Shortest decimal form that round-trips the double exactly. All CSV output
// goes through this so reruns are byte-identical.
std::string format_double(double v);

}  // namespace sketchavg
