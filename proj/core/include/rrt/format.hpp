#pragma once

#include <string>

namespace rrt {

// Shortest form that prints 17 significant digits ("%.17g").
std::string format_double(double value);

// Shortest text that reads back to the same double, for labels.
std::string format_short(double value);

}  // namespace rrt
