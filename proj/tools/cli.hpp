#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bergman/ellipsoid.hpp"

namespace bergman::cli {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_threshold = 2;

constexpr const char* schema_version = "bergman-lab/1";
constexpr const char* out_dir_env = "BERGMAN_LAB_OUT_DIR";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Resolved settings of one run: every option of the subcommand as text, in
/// declaration order. Serialized verbatim into the JSON summary.
struct RunConfig {
  std::string command;
  std::vector<std::pair<std::string, std::string>> values;

  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const;
};

/// Entry point; args excludes the program name. Returns 0 on success, 1 on usage
/// errors, 2 when a check misses its threshold.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Flat "key = value" lines ('#' comments) or a JSON summary from a previous run.
std::vector<std::pair<std::string, std::string>> load_config(const std::string& path, std::string& command);

// Field parsers; errors name the field.
double parse_real(const std::string& field, const std::string& text);
long long parse_integer(const std::string& field, const std::string& text);
std::vector<double> parse_real_list(const std::string& field, const std::string& text);
std::vector<int> parse_int_list(const std::string& field, const std::string& text);
/// "0.5", "0.5+0.25i", "-1e-3-2i", "i".
cplx parse_complex(const std::string& field, const std::string& text);
/// Comma-separated coordinates.
ComplexPoint parse_point(const std::string& field, const std::string& text);
/// Points separated by ';'.
std::vector<ComplexPoint> parse_points(const std::string& field, const std::string& text);

} // namespace bergman::cli
