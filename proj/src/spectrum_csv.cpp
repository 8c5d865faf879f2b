#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sgdphase/errors.hpp"
#include "sgdphase/spectrum.hpp"

namespace sgdphase {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!s.empty() && s.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end || cell.empty())
    fail(ErrorKind::parse_error,
         "line " + std::to_string(line) + ": '" + cell + "' is not a number");
  return v;
}

void append_number(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

Spectrum parse_spectrum_csv(const std::string& text) {
  std::stringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool seen_data = false;
  std::vector<double> lam, w;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto cells = split(line);
    if (!seen_data && columns == 0 && std::isalpha(static_cast<unsigned char>(line[0]))) {
      if (cells == std::vector<std::string>{"k", "lambda", "lambda_c"}) {
        columns = 3;
      } else if (cells == std::vector<std::string>{"lambda", "lambda_c"}) {
        columns = 2;
      } else {
        fail(ErrorKind::parse_error, "line " + std::to_string(line_no) +
                                         ": unknown header '" + line + "'");
      }
      continue;
    }
    if (columns == 0) columns = cells.size();
    if (columns != 2 && columns != 3)
      fail(ErrorKind::parse_error,
           "line " + std::to_string(line_no) + ": expected 2 or 3 columns");
    if (cells.size() != columns)
      fail(ErrorKind::parse_error, "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(columns) + " columns, got " +
                                       std::to_string(cells.size()));
    const double l = parse_number(cells[columns - 2], line_no);
    const double lc = parse_number(cells[columns - 1], line_no);
    if (!(l > 0.0) || !std::isfinite(l))
      fail(ErrorKind::parse_error,
           "line " + std::to_string(line_no) + ": eigenvalue must be positive");
    if (!(lc >= 0.0) || !std::isfinite(lc))
      fail(ErrorKind::parse_error,
           "line " + std::to_string(line_no) + ": lambda_c must be non-negative");
    lam.push_back(l);
    w.push_back(lc);
    seen_data = true;
  }
  if (lam.empty()) fail(ErrorKind::empty_spectrum, "spectrum file has no data rows");

  std::vector<std::size_t> order(lam.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lam[a] > lam[b]; });
  Spectrum s;
  for (std::size_t i : order) {
    s.lambdas.push_back(lam[i]);
    s.weights.push_back(w[i]);
  }
  return s;
}

Spectrum load_spectrum_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::parse_error, "cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_spectrum_csv(buf.str());
}

void save_spectrum_csv(const Spectrum& spectrum, const std::string& path) {
  std::string out = "k,lambda,lambda_c\n";
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    out += std::to_string(k + 1);
    out += ',';
    append_number(out, spectrum.lambdas[k]);
    out += ',';
    append_number(out, spectrum.weights[k]);
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::parse_error, "cannot write " + path);
  f << out;
}

}  // namespace sgdphase
