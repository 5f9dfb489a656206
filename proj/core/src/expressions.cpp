#include "plap/expressions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "plap/errors.hpp"

namespace plap {

namespace {

std::vector<double> parse_numbers(const std::string& text, const std::string& spec) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError("expression '" + spec + "': cannot parse number '" + item + "'");
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw ConfigError("expression '" + spec + "': cannot parse number '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

ScalarExpr parse_expression(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (head == "const") {
    const auto v = parse_numbers(tail, spec);
    if (v.size() != 1) throw ConfigError("expression '" + spec + "': const takes one value");
    const double c = v[0];
    return [c](const Vec2&) { return c; };
  }
  if (head == "affine") {
    const auto v = parse_numbers(tail, spec);
    if (v.size() != 3) throw ConfigError("expression '" + spec + "': affine takes a,b,c");
    const double a = v[0], b = v[1], c = v[2];
    return [a, b, c](const Vec2& x) { return a + b * x.x() + c * x.y(); };
  }
  if (colon != std::string::npos) throw ConfigError("unknown expression '" + spec + "'");

  using std::numbers::pi;
  if (head == "zero") return [](const Vec2&) { return 0.0; };
  if (head == "sinsin") return [](const Vec2& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); };
  if (head == "sincos") return [](const Vec2& x) { return std::sin(x.x()) * std::cos(x.y()); };
  if (head == "saddle") return [](const Vec2& x) { return x.x() + 0.25 * (x.x() * x.x() - x.y() * x.y()); };
  if (head == "bump") return [](const Vec2& x) { return std::max(0.0, 1.0 - 4.0 * x.squaredNorm()); };
  if (head == "sign") return [](const Vec2& x) { return x.x() > 0.0 ? 1.0 : (x.x() < 0.0 ? -1.0 : 0.0); };
  throw ConfigError("unknown expression '" + spec + "'");
}

std::vector<std::string> expression_names() {
  return {"const:c", "zero", "affine:a,b,c", "sinsin", "sincos", "saddle", "bump", "sign"};
}

}  // namespace plap
