#pragma once

#include <iosfwd>
#include <string>

#include "fractlab/gridset.hpp"
#include "fractlab/measure.hpp"

namespace fractlab {

// Text formats. Blank lines and lines starting with '#' are skipped.
//
// GridSet:        "d N"  then one line per point with d integers
//                 (d=1: "j"; d=2: "jx jy", both in [0, 2^N)).
// DyadicMeasure:  "d N"  then lines "code mass" with code the depth-N
//                 interleaved index in decimal and mass a positive float.
//
// Parse errors carry "<origin>:<line>:".

GridSet read_gridset(std::istream& in, const std::string& origin = "<stream>");
GridSet load_gridset(const std::string& path);
void write_gridset(std::ostream& out, const GridSet& a);
void save_gridset(const std::string& path, const GridSet& a);

DyadicMeasure read_measure(std::istream& in, const std::string& origin = "<stream>");
DyadicMeasure load_measure(const std::string& path);
void write_measure(std::ostream& out, const DyadicMeasure& mu);
void save_measure(const std::string& path, const DyadicMeasure& mu);

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// RFC-4180 quoting, applied only when the field needs it.
std::string csv_field(const std::string& s);

}  // namespace fractlab
