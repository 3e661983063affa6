#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dirbreak/geom.hpp"
#include "dirbreak/measure.hpp"

namespace dirbreak::io {

/// Malformed or unreadable user input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double degrees_to_radians(double deg) { return deg * kPi / 180.0; }
inline double radians_to_degrees(double rad) { return rad * 180.0 / kPi; }

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Strict parse of a whole field as a finite double.
inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// One angle per row (circle) or x,y,z per row (sphere, normalized on load).
/// A single leading header row is skipped when it does not parse as numbers.
/// Blank lines are ignored.
inline std::vector<Direction> read_sample_csv(std::istream& in, bool degrees) {
  std::vector<Direction> out;
  std::string line;
  int line_no = 0;
  std::size_t columns = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto fields = split(row, ',');
    std::vector<double> values;
    bool numeric = true;
    for (auto f : fields) {
      const auto v = parse_double(f);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!numeric) {
      if (!seen_row) {
        seen_row = true;  // header
        continue;
      }
      throw InputError("line " + std::to_string(line_no) + ": malformed row '" + std::string(row) + "'");
    }
    seen_row = true;
    if (columns == 0) {
      if (values.size() != 1 && values.size() != 3)
        throw InputError("line " + std::to_string(line_no) + ": expected 1 (angle) or 3 (x,y,z) columns");
      columns = values.size();
    } else if (values.size() != columns) {
      throw InputError("line " + std::to_string(line_no) + ": inconsistent column count");
    }
    if (columns == 1) {
      out.push_back(Direction::circle(degrees ? degrees_to_radians(values[0]) : values[0]));
    } else {
      const Vec3 v{values[0], values[1], values[2]};
      if (norm(v) == 0.0) throw InputError("line " + std::to_string(line_no) + ": zero vector");
      out.push_back(Direction::sphere(v));
    }
  }
  if (out.empty()) throw InputError("no data rows");
  return out;
}

inline std::vector<Direction> read_sample_file(const std::string& path, bool degrees) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  return read_sample_csv(in, degrees);
}

/// Parametric measure specs:
///   vm:mu=0,kappa=2   uniform   uniform:sphere   pointmass:theta=0   pointmass:x=0,y=0,z=1
/// Angles (mu, theta) are in degrees when `degrees` is set.
inline Measure parse_dist_spec(std::string_view spec, bool degrees) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  const std::string_view name = trim(spec.substr(0, colon));
  std::map<std::string, double, std::less<>> params;
  std::string_view flag;
  if (colon != std::string_view::npos) {
    for (auto kv : split(spec.substr(colon + 1), ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) {
        if (!flag.empty() || kv.empty()) throw InputError("malformed distribution parameter '" + std::string(kv) + "'");
        flag = kv;
        continue;
      }
      const auto value = parse_double(kv.substr(eq + 1));
      if (!value) throw InputError("non-numeric value in '" + std::string(kv) + "'");
      params.emplace(std::string(trim(kv.substr(0, eq))), *value);
    }
  }
  auto angle = [&](double v) { return degrees ? degrees_to_radians(v) : v; };
  auto take = [&](std::string_view key, double fallback) {
    const auto it = params.find(key);
    if (it == params.end()) return fallback;
    const double v = it->second;
    params.erase(it);
    return v;
  };
  auto finish = [&](Measure m) {
    if (!params.empty()) throw InputError("unknown parameter '" + params.begin()->first + "' for " + std::string(name));
    return m;
  };

  if (name == "vm" || name == "vonmises" || name == "von_mises") {
    if (!flag.empty()) throw InputError("unexpected flag '" + std::string(flag) + "'");
    const double mu = angle(take("mu", 0.0));
    if (!params.contains("kappa")) throw InputError("von Mises spec needs kappa");
    const double kappa = take("kappa", 0.0);
    if (kappa < 0.0) throw InputError("kappa must be >= 0");
    return finish(Measure::von_mises(mu, kappa));
  }
  if (name == "uniform") {
    if (flag.empty() || flag == "circle") return finish(Measure::uniform(Space::Circle));
    if (flag == "sphere") return finish(Measure::uniform(Space::Sphere));
    throw InputError("uniform space must be circle or sphere");
  }
  if (name == "pointmass" || name == "point_mass") {
    if (!flag.empty()) throw InputError("unexpected flag '" + std::string(flag) + "'");
    if (params.contains("x") || params.contains("y") || params.contains("z")) {
      const Vec3 v{take("x", 0.0), take("y", 0.0), take("z", 0.0)};
      if (norm(v) == 0.0) throw InputError("point mass vector must be nonzero");
      return finish(Measure::point_mass(Direction::sphere(v)));
    }
    return finish(Measure::point_mass(Direction::circle(angle(take("theta", 0.0)))));
  }
  throw InputError("unknown distribution '" + std::string(name) + "'");
}

}  // namespace dirbreak::io
