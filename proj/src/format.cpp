#include "vesseltop/format.hpp"

#include <cstdio>
#include <cstdlib>

namespace vesseltop {

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

double round6(double value) {
    return std::strtod(format_number(value).c_str(), nullptr);
}

}  // namespace vesseltop
