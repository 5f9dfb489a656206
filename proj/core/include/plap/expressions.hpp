#pragma once

#include <functional>
#include <string>
#include <vector>

#include "plap/grid.hpp"

namespace plap {

using ScalarExpr = std::function<double(const Vec2&)>;

/// Named analytic fields used for sources and boundary data.
///
///   const:c        c
///   zero           0
///   affine:a,b,c   a + b x + c y
///   sinsin         sin(pi x) sin(pi y)
///   sincos         sin(x) cos(y)
///   saddle         x + (x^2 - y^2)/4
///   bump           max(0, 1 - 4|x|^2)
///   sign           sign(x), a bounded discontinuous source
///
/// Throws ConfigError for anything else.
ScalarExpr parse_expression(const std::string& spec);

/// Names accepted by parse_expression, for help text.
std::vector<std::string> expression_names();

}  // namespace plap
