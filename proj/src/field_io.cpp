#include "sns/field_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sns/errors.hpp"

namespace sns {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError("cannot parse number '" + std::string(text) + "'");
  return value;
}

void write_field_csv(std::ostream& out, const SpectralField& w) {
  const Lattice& lat = w.lattice();
  out << "# kmax=" << lat.kmax() << " n_forced=" << lat.n_forced() << "\n";
  out << "k1,k2,re,im\n";
  const auto h = w.half();
  for (std::size_t i = 0; i < h.size(); ++i) {
    const Mode k = lat.mode(i);
    out << k.k1 << ',' << k.k2 << ',' << format_double(h[i].real()) << ',' << format_double(h[i].imag()) << '\n';
  }
}

namespace {

int parse_int(std::string_view text) {
  int value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ConfigError("cannot parse integer '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    parts.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

SpectralField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw ConfigError("field csv: missing header line");
  int kmax = -1;
  int n_forced = -1;
  for (std::string_view tok : split(std::string_view(line).substr(2), ' ')) {
    if (tok.rfind("kmax=", 0) == 0) kmax = parse_int(tok.substr(5));
    else if (tok.rfind("n_forced=", 0) == 0) n_forced = parse_int(tok.substr(9));
  }
  if (kmax < 0 || n_forced < 0) throw ConfigError("field csv: header must carry kmax and n_forced");
  SpectralField w(Lattice(kmax, n_forced));
  if (!std::getline(in, line) || line != "k1,k2,re,im") throw ConfigError("field csv: missing column header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 4) throw ConfigError("field csv: expected 4 columns in '" + line + "'");
    const Mode k{parse_int(cols[0]), parse_int(cols[1])};
    if (!Lattice::in_upper_half(k)) throw ConfigError("field csv: row for a lower-half mode");
    w.set(k, {parse_double(cols[2]), parse_double(cols[3])});
  }
  return w;
}

}  // namespace sns
