#ifndef CROSSCI_CSV_HPP
#define CROSSCI_CSV_HPP

#include <fstream>
#include <string>
#include <vector>

namespace crossci::csvio {

/// Fixed %.15g formatting so reruns produce identical bytes.
std::string format_number(double v);

/// Comma-separated, '.' decimal, LF endings, UTF-8.
class Writer {
public:
  explicit Writer(const std::string& path);

  void header(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& fields);
  void close();

private:
  std::ofstream os_;
  std::string path_;
};

} // namespace crossci::csvio

#endif
