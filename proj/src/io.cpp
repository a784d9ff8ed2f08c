#include "qcc/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace qcc {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::uint64_t h = 14695981039346656037ULL;
  std::vector<unsigned char> buf(1 << 16);
  while (in) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    h = fnv1a64(std::span(buf.data(), static_cast<std::size_t>(in.gcount())), h);
  }
  return h;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

namespace {

constexpr const char* kColumns =
    "t,meanX,meanP,centralX2,centralX3,centralX4,centralP2,centralP3,centralP4,crossXP,energy";

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

double parse_field(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw ConfigError("malformed number '" + s + "'");
  return v;
}

}  // namespace

void write_moments_csv(const std::filesystem::path& path, std::span<const MomentRecord> series) {
  std::string out = std::string(kColumns) + "\n";
  for (const MomentRecord& r : series) {
    const double row[] = {r.t,          r.mean_x,     r.mean_p,     r.central_x2,
                          r.central_x3, r.central_x4, r.central_p2, r.central_p3,
                          r.central_p4, r.cross_xp,   r.energy};
    for (std::size_t i = 0; i < std::size(row); ++i) {
      if (i) out += ',';
      append_double(out, row[i]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

MomentSeries read_moments_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kColumns) {
    throw ConfigError(path.string() + ": unexpected moment CSV header");
  }
  MomentSeries out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(parse_field(cell));
    if (v.size() != 11) throw ConfigError(path.string() + ": expected 11 columns");
    out.push_back(MomentRecord{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]});
  }
  return out;
}

namespace {

std::vector<unsigned char> payload_bytes(const PhaseField& f) {
  std::vector<unsigned char> bytes(f.values.size() * 8);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    std::uint64_t u = std::bit_cast<std::uint64_t>(f.values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + static_cast<std::size_t>(b)] = static_cast<unsigned char>(u >> (8 * b));
  }
  return bytes;
}

std::string header_value(const std::string& line, const std::string& key) {
  const std::string prefix = key + " = ";
  if (line.rfind(prefix, 0) != 0) throw NumericalError("snapshot header: expected '" + key + "'");
  return line.substr(prefix.size());
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const PhaseField& field,
                    const std::string& backend, const std::string& digest) {
  field.check_shape();
  const std::vector<unsigned char> bytes = payload_bytes(field);
  std::string head = "qcc-snapshot 1\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "x = %.17g %.17g %zu\n", field.x_axis.minimum(),
                field.x_axis.maximum(), field.x_axis.count());
  head += buf;
  std::snprintf(buf, sizeof buf, "p = %.17g %.17g %zu\n", field.p_axis.minimum(),
                field.p_axis.maximum(), field.p_axis.count());
  head += buf;
  std::snprintf(buf, sizeof buf, "time = %.17g\n", field.time);
  head += buf;
  head += "backend = " + backend + "\n";
  head += "config = " + digest + "\n";
  head += "checksum = " + hex64(fnv1a64(bytes)) + "\n";
  head += "end\n";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << head;
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line) && line != "end") {
    lines.push_back(line);
    if (lines.size() > 16) break;
  }
  if (line != "end" || lines.size() != 7 || lines[0] != "qcc-snapshot 1") {
    throw NumericalError(path.string() + ": malformed snapshot header");
  }
  Snapshot s;
  SnapshotHeader& h = s.header;
  {
    std::istringstream xs(header_value(lines[1], "x"));
    std::istringstream ps(header_value(lines[2], "p"));
    if (!(xs >> h.x_min >> h.x_max >> h.x_count) || !(ps >> h.p_min >> h.p_max >> h.p_count)) {
      throw NumericalError(path.string() + ": malformed grid line");
    }
  }
  h.time = parse_field(header_value(lines[3], "time"));
  h.backend = header_value(lines[4], "backend");
  h.config_digest = header_value(lines[5], "config");
  h.checksum = header_value(lines[6], "checksum");

  s.field = PhaseField(build_axis(h.x_min, h.x_max, h.x_count), build_axis(h.p_min, h.p_max, h.p_count), h.time);
  std::vector<unsigned char> bytes(s.field.values.size() * 8);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) {
    throw NumericalError(path.string() + ": truncated payload");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw NumericalError(path.string() + ": trailing bytes after payload");
  }
  if (hex64(fnv1a64(bytes)) != h.checksum) {
    throw NumericalError(path.string() + ": payload checksum does not match the header");
  }
  for (std::size_t i = 0; i < s.field.values.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(bytes[i * 8 + static_cast<std::size_t>(b)]) << (8 * b);
    s.field.values[i] = std::bit_cast<double>(u);
  }
  return s;
}

void write_contour_text(const std::filesystem::path& path, const PhaseField& field, double hbar) {
  field.check_shape();
  if (!(hbar > 0.0)) throw ConfigError("contour export needs hbar > 0");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  const AxisGrid& x = field.x_axis;
  const AxisGrid& p = field.p_axis;
  // Box of area 4 hbar with the aspect ratio of the plot window, inset from
  // the lower-left corner.
  const double area = 4.0 * hbar;
  const double wx = std::sqrt(area * x.length() / p.length());
  const double wp = area / wx;
  const double x0 = x.minimum() + 0.05 * x.length();
  const double p0 = p.minimum() + 0.05 * p.length();
  char buf[256];
  out << "# columns: x p f\n";
  std::snprintf(buf, sizeof buf, "# time = %.17g\n# hbar = %.17g\n", field.time, hbar);
  out << buf;
  std::snprintf(buf, sizeof buf,
                "# reference box area = %.17g: x %.9g %.9g p %.9g %.9g\n", area, x0, x0 + wx, p0,
                p0 + wp);
  out << buf;
  for (std::size_t ix = 0; ix < field.nx(); ++ix) {
    for (std::size_t ip = 0; ip < field.np(); ++ip) {
      std::snprintf(buf, sizeof buf, "%.9g %.9g %.9g\n", x.node(ix), p.node(ip), field.at(ix, ip));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace qcc
