#include "qdisk/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace qdisk {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos ? "" : field.substr(first, last - first + 1));
  }
  return fields;
}

template <class T>
T parse_field(const std::string& s, const std::filesystem::path& path, int line_no) {
  T x{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + s + "'");
  }
  return x;
}

// Reads rows after a required header; calls fn(fields, line_no) per row.
template <class Fn>
void read_rows(const std::filesystem::path& path, const std::vector<std::string>& header, Fn fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  int line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto fields = split_csv(line);
    if (!seen_header) {
      if (fields != header) throw IoError(path.string() + ": unexpected header '" + line + "'");
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(header.size()) + " columns");
    }
    fn(fields, line_no);
  }
  if (!seen_header) throw IoError(path.string() + ": empty file");
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::map<Index, double> read_weight_table(const std::filesystem::path& path) {
  std::map<Index, double> table;
  read_rows(path, {"k", "w"}, [&](const std::vector<std::string>& f, int line_no) {
    const auto k = parse_field<Index>(f[0], path, line_no);
    if (!table.emplace(k, parse_field<double>(f[1], path, line_no)).second) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": duplicate k");
    }
  });
  return table;
}

ModeVector read_mode_vector(const std::filesystem::path& path) {
  ModeVector g;
  read_rows(path, {"k", "re", "im"}, [&](const std::vector<std::string>& f, int line_no) {
    const auto k = parse_field<Index>(f[0], path, line_no);
    g.set(k, g(k) + cplx(parse_field<double>(f[1], path, line_no), parse_field<double>(f[2], path, line_no)));
  });
  return g;
}

void write_mode_vector(const std::filesystem::path& path, const ModeVector& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "k,re,im\n";
  for (const auto& [k, v] : g.entries()) {
    out << k << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
  }
}

void write_mode_vector(const std::filesystem::path& path, const WindowedVector& v) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "k,re,im\n";
  for (Index k = v.window.k_min(); k <= v.window.k_max(); ++k) {
    out << k << ',' << format_double(v.at(k).real()) << ',' << format_double(v.at(k).imag()) << '\n';
  }
}

}  // namespace qdisk
