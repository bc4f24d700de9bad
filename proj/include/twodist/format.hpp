#pragma once

#include <string>

namespace twodist {

/// %.17g, with "inf", "-inf" and "nan" spelled out.
std::string fmt17(double v);

}  // namespace twodist
