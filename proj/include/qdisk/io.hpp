#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "qdisk/modes.hpp"

namespace qdisk {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Round-trip exact decimal form of a double.
std::string format_double(double x);

/// Weight table with header "k,w".
std::map<Index, double> read_weight_table(const std::filesystem::path& path);

/// Mode vector with header "k,re,im".
ModeVector read_mode_vector(const std::filesystem::path& path);
void write_mode_vector(const std::filesystem::path& path, const ModeVector& g);
void write_mode_vector(const std::filesystem::path& path, const WindowedVector& v);

}  // namespace qdisk
