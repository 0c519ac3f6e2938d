#pragma once

#include <string>

namespace vesseltop {

/// `%.6g` rendering used by every text output.
std::string format_number(double value);

/// Value rounded to the 6 significant digits `format_number` prints.
double round6(double value);

}  // namespace vesseltop
