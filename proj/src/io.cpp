#include "gcpreg/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace gcpreg::io {

namespace {

constexpr long long kMaxDimension = 1 << 20;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool is_skippable(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename F>
auto at_line(std::size_t line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const MalformedLineError&) {
    throw;
  } catch (const Error& e) {
    throw MalformedLineError(line, e.what());
  }
}

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, std::ios::in | mode);
  if (!in) {
    throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  }
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out) {
    throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  }
  return out;
}

void check_written(const std::ostream& out, const fs::path& path) {
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

// Ordered "key value" entries with their line numbers.
struct KvEntry {
  std::string key;
  std::string value;
  std::size_t line;
};

std::vector<KvEntry> parse_kv(std::istream& in) {
  std::vector<KvEntry> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (is_skippable(line)) continue;
    const auto t = trim(line);
    const auto sp = t.find_first_of(" \t");
    if (sp == std::string_view::npos) {
      throw MalformedLineError(n, "expected 'key value'");
    }
    out.push_back({std::string(t.substr(0, sp)),
                   std::string(trim(t.substr(sp + 1))), n});
  }
  return out;
}

std::string coeff_key(char axis, int i, int j) {
  return fmt::format("{}_{}_{}", axis, i, j);
}

// Consumes the model keys from `kv`; leaves the others in `rest`.
WarpModel model_from_kv(const std::vector<KvEntry>& kv,
                        std::vector<KvEntry>* rest) {
  std::map<std::string, const KvEntry*> seen;
  for (const auto& e : kv) {
    if (!seen.emplace(e.key, &e).second) {
      throw MalformedLineError(e.line, "duplicate key '" + e.key + "'");
    }
  }
  std::set<std::string> used;
  auto get = [&](const std::string& key) -> const KvEntry& {
    auto it = seen.find(key);
    if (it == seen.end()) {
      throw MalformedLineError(kv.empty() ? 0 : kv.back().line,
                               "missing key '" + key + "'");
    }
    used.insert(key);
    return *it->second;
  };
  auto real = [&](const std::string& key) {
    const auto& e = get(key);
    return at_line(e.line, [&] { return parse_double(e.value); });
  };

  const auto& deg_entry = get("degree");
  const int degree = static_cast<int>(
      at_line(deg_entry.line, [&] { return parse_int(deg_entry.value); }));
  if (degree < kMinDegree || degree > kMaxDegree) {
    throw MalformedLineError(deg_entry.line, "degree must be in 1..4");
  }
  Normalization norm;
  norm.scan_center = real("scan_center");
  norm.scan_scale = real("scan_scale");
  norm.pixel_center = real("pixel_center");
  norm.pixel_scale = real("pixel_scale");

  std::vector<double> a;
  std::vector<double> b;
  for (auto [i, j] : monomial_exponents(degree)) {
    a.push_back(real(coeff_key('a', i, j)));
  }
  for (auto [i, j] : monomial_exponents(degree)) {
    b.push_back(real(coeff_key('b', i, j)));
  }
  WarpModel model = at_line(deg_entry.line, [&] {
    return WarpModel(degree, norm, std::move(a), std::move(b));
  });
  if (seen.count("domain_scan_min")) {
    model.set_domain({real("domain_scan_min"), real("domain_pixel_min")},
                     {real("domain_scan_max"), real("domain_pixel_max")});
  }

  for (const auto& e : kv) {
    if (used.count(e.key)) continue;
    if (rest) {
      rest->push_back(e);
    } else {
      throw MalformedLineError(e.line, "unknown key '" + e.key + "'");
    }
  }
  return model;
}

std::string fixed(double v, int digits = 4) {
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.{}f}", v, digits);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "not a number: '" + std::string(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s) {
  s = trim(s);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

// ---------------------------------------------------------------- images

std::string encode_pgm(const RasterImage& img) {
  std::string out = fmt::format("P5\n{} {}\n{}\n", img.width(), img.height(),
                                img.max_value());
  const bool wide = img.max_value() > 255;
  out.reserve(out.size() + img.samples().size() * (wide ? 2 : 1));
  for (Sample s : img.samples()) {
    if (wide) {
      out.push_back(static_cast<char>(s >> 8));
      out.push_back(static_cast<char>(s & 0xFF));
    } else {
      out.push_back(static_cast<char>(s));
    }
  }
  return out;
}

RasterImage decode_pgm(std::string_view bytes) {
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&](const char* what) -> long long {
    skip_space();
    const std::size_t start = pos;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') ++pos;
    if (pos == start || pos - start > 12) {
      throw Error(ErrorCode::MalformedHeader,
                  std::string("MalformedHeader: bad ") + what);
    }
    return parse_int(bytes.substr(start, pos - start));
  };

  if (bytes.size() < 2 || bytes.substr(0, 2) != "P5") {
    throw Error(ErrorCode::MalformedHeader, "MalformedHeader: magic is not P5");
  }
  pos = 2;
  const long long width = number("width");
  const long long height = number("height");
  const long long maxval = number("max value");
  if (width < 1 || height < 1 || width > kMaxDimension ||
      height > kMaxDimension) {
    throw Error(ErrorCode::MalformedHeader, "MalformedHeader: bad dimensions");
  }
  if (maxval < 1) {
    throw Error(ErrorCode::MalformedHeader, "MalformedHeader: max value is 0");
  }
  if (maxval > 65535) {
    throw Error(ErrorCode::UnsupportedMaxValue,
                "UnsupportedMaxValue: " + std::to_string(maxval));
  }
  if (pos >= bytes.size() ||
      !(bytes[pos] == ' ' || bytes[pos] == '\t' || bytes[pos] == '\r' ||
        bytes[pos] == '\n')) {
    throw Error(ErrorCode::MalformedHeader,
                "MalformedHeader: no whitespace after max value");
  }
  ++pos;

  const bool wide = maxval > 255;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  const std::size_t need = count * (wide ? 2 : 1);
  if (bytes.size() - pos < need) {
    throw Error(ErrorCode::TruncatedData,
                fmt::format("TruncatedData: need {} sample bytes, found {}",
                            need, bytes.size() - pos));
  }
  std::vector<Sample> samples(count);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < count; ++i) {
    samples[i] = wide ? static_cast<Sample>((data[2 * i] << 8) | data[2 * i + 1])
                      : data[i];
  }
  return RasterImage(static_cast<int>(width), static_cast<int>(height),
                     static_cast<Sample>(maxval), std::move(samples));
}

std::string encode_raw(const RasterImage& img) {
  std::string out;
  out.reserve(img.samples().size() * 2);
  for (Sample s : img.samples()) {
    out.push_back(static_cast<char>(s & 0xFF));
    out.push_back(static_cast<char>(s >> 8));
  }
  return out;
}

std::string encode_raw_sidecar(const RasterImage& img) {
  return fmt::format(
      "# gcpreg raw image metadata\nwidth {}\nheight {}\nmax_value {}\n"
      "sample_bits 16\nbyte_order little\n",
      img.width(), img.height(), img.max_value());
}

RasterImage decode_raw(std::string_view bytes, std::string_view sidecar) {
  std::istringstream in{std::string(sidecar)};
  std::map<std::string, std::string> meta;
  try {
    for (auto& e : parse_kv(in)) meta[e.key] = e.value;
  } catch (const MalformedLineError& e) {
    throw Error(ErrorCode::MalformedHeader, std::string("MalformedHeader: ") + e.what());
  }
  auto field = [&](const char* key) -> long long {
    auto it = meta.find(key);
    if (it == meta.end()) {
      throw Error(ErrorCode::MalformedHeader,
                  std::string("MalformedHeader: sidecar lacks ") + key);
    }
    try {
      return parse_int(it->second);
    } catch (const Error&) {
      throw Error(ErrorCode::MalformedHeader,
                  std::string("MalformedHeader: bad ") + key);
    }
  };
  const long long width = field("width");
  const long long height = field("height");
  const long long maxval = field("max_value");
  if (width < 1 || height < 1 || width > kMaxDimension ||
      height > kMaxDimension || maxval < 1) {
    throw Error(ErrorCode::MalformedHeader, "MalformedHeader: bad sidecar values");
  }
  if (maxval > 65535) {
    throw Error(ErrorCode::UnsupportedMaxValue,
                "UnsupportedMaxValue: " + std::to_string(maxval));
  }
  if (auto it = meta.find("byte_order"); it != meta.end() && it->second != "little") {
    throw Error(ErrorCode::MalformedHeader, "MalformedHeader: byte_order must be little");
  }
  if (auto it = meta.find("sample_bits"); it != meta.end() && it->second != "16") {
    throw Error(ErrorCode::MalformedHeader, "MalformedHeader: sample_bits must be 16");
  }
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() < count * 2) {
    throw Error(ErrorCode::TruncatedData,
                fmt::format("TruncatedData: need {} bytes, found {}", count * 2,
                            bytes.size()));
  }
  if (bytes.size() > count * 2) {
    throw Error(ErrorCode::MalformedHeader,
                "MalformedHeader: raw file longer than the sidecar declares");
  }
  std::vector<Sample> samples(count);
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  for (std::size_t i = 0; i < count; ++i) {
    samples[i] = static_cast<Sample>(data[2 * i] | (data[2 * i + 1] << 8));
  }
  return RasterImage(static_cast<int>(width), static_cast<int>(height),
                     static_cast<Sample>(maxval), std::move(samples));
}

fs::path sidecar_path(const fs::path& raw_path) {
  return fs::path(raw_path.string() + ".meta");
}

std::string read_file(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  auto out = open_out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  check_written(out, path);
}

RasterImage read_image(const fs::path& path) {
  if (path.extension() == ".raw") {
    return decode_raw(read_file(path), read_file(sidecar_path(path)));
  }
  return decode_pgm(read_file(path));
}

void write_image(const RasterImage& img, const fs::path& path) {
  if (path.extension() == ".raw") {
    write_file(path, encode_raw(img));
    write_file(sidecar_path(path), encode_raw_sidecar(img));
    return;
  }
  write_file(path, encode_pgm(img));
}

// ---------------------------------------------------------------- GCPs

std::vector<GroundControlPoint> parse_gcps(std::istream& in) {
  std::vector<GroundControlPoint> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (is_skippable(line)) continue;
    const auto fields = split(line, ',');
    // Spreadsheet exports often keep the column names uncommented.
    if (out.empty() && fields.size() == 3 && fields[0] == "id" &&
        fields[1] == "ref_scan" && fields[2] == "ref_pixel") {
      continue;
    }
    if (fields.size() != 3) {
      throw MalformedLineError(n, "expected 'id,ref_scan,ref_pixel'");
    }
    if (fields[0].empty()) throw MalformedLineError(n, "empty id");
    GroundControlPoint g;
    g.id = std::string(fields[0]);
    g.ref_coord.scan = static_cast<int>(at_line(n, [&] { return parse_int(fields[1]); }));
    g.ref_coord.pixel = static_cast<int>(at_line(n, [&] { return parse_int(fields[2]); }));
    if (!ids.insert(g.id).second) {
      throw MalformedLineError(n, "duplicate id '" + g.id + "'");
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GroundControlPoint> read_gcps(const fs::path& path) {
  auto in = open_in(path);
  return parse_gcps(in);
}

void format_gcps(std::ostream& out, const std::vector<GroundControlPoint>& g) {
  out << "# id,ref_scan,ref_pixel\n";
  for (const auto& p : g) {
    out << p.id << ',' << p.ref_coord.scan << ',' << p.ref_coord.pixel << '\n';
  }
}

void write_gcps(const std::vector<GroundControlPoint>& g, const fs::path& path) {
  auto out = open_out(path);
  format_gcps(out, g);
  check_written(out, path);
}

// ---------------------------------------------------------------- matches

void format_matches(std::ostream& out, const std::vector<MatchResult>& m) {
  out << "# " << kMatchHeader << '\n';
  for (const auto& r : m) {
    out << r.gcp_id << ',' << r.ref_coord.scan << ',' << r.ref_coord.pixel
        << ',' << r.sensed_coord.scan << ',' << r.sensed_coord.pixel << ','
        << r.offset.scan << ',' << r.offset.pixel << ','
        << format_double(r.ncc_score) << ',' << format_double(r.ssd_score)
        << ',' << format_double(r.score) << ',' << to_string(r.status) << '\n';
  }
}

std::vector<MatchResult> parse_matches(std::istream& in) {
  std::vector<MatchResult> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (is_skippable(line)) continue;
    const auto f = split(line, ',');
    if (f.size() != 11) {
      throw MalformedLineError(n, fmt::format("expected 11 columns, got {}", f.size()));
    }
    MatchResult r;
    at_line(n, [&] {
      r.gcp_id = std::string(f[0]);
      r.ref_coord = {static_cast<int>(parse_int(f[1])), static_cast<int>(parse_int(f[2]))};
      r.sensed_coord = {static_cast<int>(parse_int(f[3])), static_cast<int>(parse_int(f[4]))};
      r.offset = {static_cast<int>(parse_int(f[5])), static_cast<int>(parse_int(f[6]))};
      r.ncc_score = parse_double(f[7]);
      r.ssd_score = parse_double(f[8]);
      r.score = parse_double(f[9]);
      r.status = parse_match_status(f[10]);
      return 0;
    });
    if (r.gcp_id.empty()) throw MalformedLineError(n, "empty id");
    if (!ids.insert(r.gcp_id).second) {
      throw MalformedLineError(n, "duplicate id '" + r.gcp_id + "'");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_matches(const std::vector<MatchResult>& m, const fs::path& path) {
  auto out = open_out(path);
  format_matches(out, m);
  check_written(out, path);
}

std::vector<MatchResult> read_matches(const fs::path& path) {
  auto in = open_in(path);
  return parse_matches(in);
}

// ---------------------------------------------------------------- models

void format_model(std::ostream& out, const WarpModel& model) {
  const auto& n = model.normalization();
  out << "degree " << model.degree() << '\n'
      << "scan_center " << format_double(n.scan_center) << '\n'
      << "scan_scale " << format_double(n.scan_scale) << '\n'
      << "pixel_center " << format_double(n.pixel_center) << '\n'
      << "pixel_scale " << format_double(n.pixel_scale) << '\n';
  const auto exps = monomial_exponents(model.degree());
  for (std::size_t k = 0; k < exps.size(); ++k) {
    out << coeff_key('a', exps[k].first, exps[k].second) << ' '
        << format_double(model.scan_coeffs()[k]) << '\n';
  }
  for (std::size_t k = 0; k < exps.size(); ++k) {
    out << coeff_key('b', exps[k].first, exps[k].second) << ' '
        << format_double(model.pixel_coeffs()[k]) << '\n';
  }
  if (const auto& d = model.domain()) {
    out << "domain_scan_min " << format_double(d->first.scan) << '\n'
        << "domain_pixel_min " << format_double(d->first.pixel) << '\n'
        << "domain_scan_max " << format_double(d->second.scan) << '\n'
        << "domain_pixel_max " << format_double(d->second.pixel) << '\n';
  }
}

WarpModel parse_model(std::istream& in) {
  return model_from_kv(parse_kv(in), nullptr);
}

void write_model(const WarpModel& model, const fs::path& path) {
  auto out = open_out(path);
  out << "# gcpreg warp model (reference -> sensed)\n";
  format_model(out, model);
  check_written(out, path);
}

WarpModel read_model(const fs::path& path) {
  auto in = open_in(path);
  return parse_model(in);
}

void format_spec(std::ostream& out, const DistortionSpec& spec) {
  out << "kind " << to_string(spec.kind) << '\n';
  format_model(out, spec.forward);
  out << "noise_sigma " << format_double(spec.noise_sigma) << '\n'
      << "seed " << spec.seed << '\n'
      << "max_displacement " << format_double(spec.max_displacement) << '\n';
  for (const auto& o : spec.occlusions) {
    out << "occlusion " << format_double(o.center.scan) << ' '
        << format_double(o.center.pixel) << ' ' << format_double(o.radius)
        << ' ' << o.value << '\n';
  }
}

DistortionSpec parse_spec(std::istream& in) {
  const auto kv = parse_kv(in);
  std::vector<KvEntry> model_kv;
  std::vector<KvEntry> spec_kv;
  for (const auto& e : kv) {
    if (e.key == "kind" || e.key == "noise_sigma" || e.key == "seed" ||
        e.key == "max_displacement" || e.key == "occlusion") {
      spec_kv.push_back(e);
    } else {
      model_kv.push_back(e);
    }
  }
  DistortionSpec spec;
  spec.forward = model_from_kv(model_kv, nullptr);
  bool have_kind = false;
  for (const auto& e : spec_kv) {
    at_line(e.line, [&] {
      if (e.key == "kind") {
        spec.kind = parse_distortion_kind(e.value);
        have_kind = true;
      } else if (e.key == "noise_sigma") {
        spec.noise_sigma = parse_double(e.value);
      } else if (e.key == "seed") {
        spec.seed = static_cast<std::uint64_t>(parse_int(e.value));
      } else if (e.key == "max_displacement") {
        spec.max_displacement = parse_double(e.value);
      } else {
        const auto parts = split_ws(e.value);
        if (parts.size() != 4) {
          throw Error(ErrorCode::InvalidArgument,
                      "occlusion needs 'scan pixel radius value'");
        }
        const long long value = parse_int(parts[3]);
        if (value < 0 || value > 65535) {
          throw Error(ErrorCode::InvalidArgument, "occlusion value out of range");
        }
        spec.occlusions.push_back({{parse_double(parts[0]), parse_double(parts[1])},
                                   parse_double(parts[2]),
                                   static_cast<Sample>(value)});
      }
      return 0;
    });
  }
  if (!have_kind) throw MalformedLineError(0, "missing key 'kind'");
  return spec;
}

void write_spec(const DistortionSpec& spec, const fs::path& path) {
  auto out = open_out(path);
  out << "# gcpreg distortion spec\n";
  format_spec(out, spec);
  check_written(out, path);
}

DistortionSpec read_spec(const fs::path& path) {
  auto in = open_in(path);
  return parse_spec(in);
}

// ---------------------------------------------------------------- reports

void format_fit_report_text(std::ostream& out, const FitReport& rep,
                            bool with_timing) {
  out << "Polynomial warp fit\n"
      << fmt::format("  degree             : {}\n", rep.degree)
      << fmt::format("  input GCPs         : {}\n", rep.input_count)
      << fmt::format("  fit points         : {}\n", rep.matched_count)
      << fmt::format("  RMSE (scan, pixel) : ({}, {})\n", fixed(rep.rmse_scan),
                     fixed(rep.rmse_pixel))
      << fmt::format("  condition number   : {:.3e}\n", rep.condition_number);
  if (rep.holdout_count > 0) {
    out << fmt::format("  hold-out RMSE      : ({}, {}) over {} points\n",
                       fixed(*rep.holdout_rmse_scan),
                       fixed(*rep.holdout_rmse_pixel), rep.holdout_count);
  }
  if (with_timing) out << fmt::format("  fit time           : {:.6f} s\n", rep.seconds);
  out << "Residuals (observed - predicted)\n";
  for (const auto& r : rep.residuals) {
    out << fmt::format("  {:<12} {:>10} {:>10}\n", r.id, fixed(r.scan),
                       fixed(r.pixel));
  }
}

void format_fit_report_kv(std::ostream& out, const FitReport& rep,
                          bool with_timing) {
  out << "degree " << rep.degree << '\n'
      << "input_count " << rep.input_count << '\n'
      << "matched_count " << rep.matched_count << '\n'
      << "rmse_scan " << format_double(rep.rmse_scan) << '\n'
      << "rmse_pixel " << format_double(rep.rmse_pixel) << '\n'
      << "condition_number " << format_double(rep.condition_number) << '\n';
  if (rep.holdout_count > 0) {
    out << "holdout_count " << rep.holdout_count << '\n'
        << "holdout_rmse_scan " << format_double(*rep.holdout_rmse_scan) << '\n'
        << "holdout_rmse_pixel " << format_double(*rep.holdout_rmse_pixel) << '\n';
  }
  if (with_timing) out << "seconds " << format_double(rep.seconds) << '\n';
  for (const auto& r : rep.residuals) {
    out << "residual " << r.id << ' ' << format_double(r.scan) << ' '
        << format_double(r.pixel) << '\n';
  }
}

void format_degree_sweep(std::ostream& out,
                         const std::vector<DegreeOutcome>& sweep) {
  out << fmt::format("{:<8}{:>8}{:>12}{:>12}  {}\n", "degree", "points",
                     "rmse_scan", "rmse_pixel", "note");
  for (const auto& d : sweep) {
    if (d.report) {
      out << fmt::format("{:<8}{:>8}{:>12}{:>12}\n", d.degree,
                         d.report->matched_count, fixed(d.report->rmse_scan),
                         fixed(d.report->rmse_pixel));
    } else {
      out << fmt::format("{:<8}{:>8}{:>12}{:>12}  {}\n", d.degree, "-", "-",
                         "-", d.error);
    }
  }
}

void format_radiometry(std::ostream& out, const RadiometryReport& rep) {
  out << "tv_distance " << format_double(rep.tv_distance) << '\n'
      << "new_value_count " << rep.new_value_count << '\n'
      << "compared_pixels " << rep.compared_pixels << '\n'
      << "fill_pixels " << rep.fill_pixels << '\n';
}

void format_scorecards_text(std::ostream& out,
                            const std::vector<Scorecard>& rows,
                            bool with_timing) {
  out << fmt::format("{:<10}{:>12}{:>10}{:>24}{:>12}\n", "measure",
                     "input GCPs", "matched", "RMSE (scan,pixel)", "time (s)");
  for (const auto& r : rows) {
    const std::string rmse =
        "(" + fixed(r.rmse_scan, 3) + ", " + fixed(r.rmse_pixel, 3) + ")";
    const std::string t = with_timing ? fmt::format("{:.3f}", r.seconds) : "-";
    out << fmt::format("{:<10}{:>12}{:>10}{:>24}{:>12}\n", r.measure,
                       r.input_gcps, r.matched, rmse, t);
  }
}

void format_scorecards_tsv(std::ostream& out,
                           const std::vector<Scorecard>& rows,
                           bool with_timing) {
  out << "measure\tinput_gcps\tmatched\trmse_scan\trmse_pixel\ttime_s\n";
  for (const auto& r : rows) {
    out << r.measure << '\t' << r.input_gcps << '\t' << r.matched << '\t'
        << format_double(r.rmse_scan) << '\t' << format_double(r.rmse_pixel)
        << '\t' << (with_timing ? format_double(r.seconds) : std::string("-"))
        << '\n';
  }
}

// ---------------------------------------------------------------- boundaries

BoundaryPolyline parse_polylines(std::istream& in) {
  BoundaryPolyline out;
  std::optional<std::vector<Point2>> current;
  std::size_t started_at = 0;
  auto close = [&] {
    if (!current) return;
    if (current->size() < 2) {
      throw MalformedLineError(started_at, "polyline has fewer than 2 vertices");
    }
    out.lines.push_back(std::move(*current));
    current.reset();
  };
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto t = trim(line);
    if (t.empty()) {
      close();
      continue;
    }
    if (t.front() == '#') continue;
    if (t == "P") {
      close();
      current.emplace();
      started_at = n;
      continue;
    }
    const auto parts = split_ws(t);
    if (parts.size() == 2 && parts[0] == "frame") {
      out.frame = std::string(parts[1]);
      continue;
    }
    if (!current) throw MalformedLineError(n, "vertex outside a 'P' block");
    if (parts.size() != 2) throw MalformedLineError(n, "expected 'scan pixel'");
    const Point2 v = at_line(n, [&] {
      return Point2{parse_double(parts[0]), parse_double(parts[1])};
    });
    if (!std::isfinite(v.scan) || !std::isfinite(v.pixel)) {
      throw MalformedLineError(n, "non-finite vertex");
    }
    current->push_back(v);
  }
  close();
  return out;
}

void format_polylines(std::ostream& out, const BoundaryPolyline& lines) {
  if (!lines.frame.empty()) out << "frame " << lines.frame << '\n';
  for (const auto& l : lines.lines) {
    out << "P\n";
    for (const auto& v : l) {
      out << format_double(v.scan) << ' ' << format_double(v.pixel) << '\n';
    }
    out << '\n';
  }
}

BoundaryPolyline read_polylines(const fs::path& path) {
  auto in = open_in(path);
  return parse_polylines(in);
}

void write_polylines(const BoundaryPolyline& lines, const fs::path& path) {
  auto out = open_out(path);
  format_polylines(out, lines);
  check_written(out, path);
}

std::vector<ManualPair> parse_pairs(std::istream& in) {
  std::vector<ManualPair> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (is_skippable(line)) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) {
      throw MalformedLineError(
          n, "expected 'target_scan,target_pixel,source_scan,source_pixel'");
    }
    out.push_back(at_line(n, [&] {
      return ManualPair{{parse_double(f[0]), parse_double(f[1])},
                        {parse_double(f[2]), parse_double(f[3])}};
    }));
  }
  return out;
}

std::vector<ManualPair> read_pairs(const fs::path& path) {
  auto in = open_in(path);
  return parse_pairs(in);
}

void write_pairs(const std::vector<ManualPair>& pairs, const fs::path& path) {
  auto out = open_out(path);
  out << "# target_scan,target_pixel,source_scan,source_pixel\n";
  for (const auto& p : pairs) {
    out << format_double(p.target.scan) << ',' << format_double(p.target.pixel)
        << ',' << format_double(p.source.scan) << ','
        << format_double(p.source.pixel) << '\n';
  }
  check_written(out, path);
}

}  // namespace gcpreg::io
