#include "crossci/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace crossci::csvio {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

Writer::Writer(const std::string& path) : os_(path, std::ios::binary), path_(path) {
  if (!os_) throw std::runtime_error("cannot open " + path + " for writing");
}

void Writer::header(const std::vector<std::string>& names) { row(names); }

void Writer::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ',';
    os_ << fields[i];
  }
  os_ << '\n';
}

void Writer::close() {
  os_.close();
  if (!os_) throw std::runtime_error("write to " + path_ + " failed");
}

} // namespace crossci::csvio
