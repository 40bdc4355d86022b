#pragma once

#include "hmgh/tensorcore.hpp"

#include <iosfwd>
#include <string>

namespace hmgh {

// JSON layout: {"dims": [d1, ...], "re": [[...], ...], "im": [[...], ...]}.
DensityMatrix read_density_json(std::istream& in);
DensityMatrix load_density(const std::string& path);
void write_density_json(std::ostream& out, const DensityMatrix& rho);
void save_density(const std::string& path, const DensityMatrix& rho);

// 17 significant digits, '.' decimal point regardless of locale.
std::string format_double(double x);

}  // namespace hmgh
