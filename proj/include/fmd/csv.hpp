#pragma once

#include "fmd/grid.hpp"

#include <iosfwd>
#include <string>

namespace fmd {

// Curve CSV format shared by every command:
//   header  t,<t_1>,...,<t_p>[,label]
//   rows    id,<v_1>,...,<v_p>[,label]
// Numbers are written with 17 significant digits so values round-trip
// bit-exactly.

FunctionalSample read_curves_csv(std::istream& in);
FunctionalSample read_curves_csv_file(const std::string& path);

void write_curves_csv(std::ostream& out, const FunctionalSample& sample);
void write_curves_csv_file(const std::string& path, const FunctionalSample& sample);

/// "%.17g" formatting used for every numeric cell.
std::string format_double(double value);

}  // namespace fmd
