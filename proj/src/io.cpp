#include "star/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace star {

namespace {

using nlohmann::json;

static_assert(std::numeric_limits<float>::is_iec559);

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

std::uint32_t get_u32(std::string_view s, std::size_t off) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[off + b])) << (8 * b);
  }
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("short write to '" + path.string() + "'");
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

double number_field(const json& stage, const char* key, std::size_t idx) {
  auto it = stage.find(key);
  if (it == stage.end()) {
    throw ScheduleParseError("stage " + std::to_string(idx) + ": missing \"" + key + "\"");
  }
  if (!it->is_number()) {
    throw ScheduleParseError("stage " + std::to_string(idx) + ": \"" + key +
                             "\" is not a number");
  }
  return it->get<double>();
}

Matrix matrix_field(const json& dicts, const char* key, std::size_t idx) {
  auto it = dicts.find(key);
  if (it == dicts.end() || !it->is_array() || it->empty()) {
    throw ScheduleParseError("stage " + std::to_string(idx) + ": dictionary \"" + key +
                             "\" must be a non-empty array of rows");
  }
  std::vector<std::vector<double>> rows;
  for (const json& row : *it) {
    if (!row.is_array()) {
      throw ScheduleParseError("stage " + std::to_string(idx) + ": dictionary \"" + key +
                               "\" rows must be arrays");
    }
    std::vector<double> r;
    for (const json& v : row) {
      if (!v.is_number()) {
        throw ScheduleParseError("stage " + std::to_string(idx) + ": dictionary \"" + key +
                                 "\" has a non-numeric entry");
      }
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }
  try {
    return Matrix::from_rows(rows);
  } catch (const DimsError& e) {
    throw ScheduleParseError("stage " + std::to_string(idx) + ": dictionary \"" + key +
                             "\": " + e.what());
  }
}

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

// ---------------------------------------------------------------- cubes

std::string encode_cube(const Cube& c) {
  const Dims& d = c.dims();
  for (std::size_t n : {d.n1, d.n2, d.n3}) {
    if (n > std::numeric_limits<std::uint32_t>::max()) throw FormatError("cube too large");
  }
  std::string out = "HTC1";
  out.reserve(kHtcHeaderBytes + 4 * c.size());
  put_u32(out, static_cast<std::uint32_t>(d.n1));
  put_u32(out, static_cast<std::uint32_t>(d.n2));
  put_u32(out, static_cast<std::uint32_t>(d.n3));
  for (double v : c.data()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

Cube decode_cube(std::string_view bytes) {
  if (bytes.size() < kHtcHeaderBytes) throw FormatError("truncated header");
  if (bytes.substr(0, 4) != "HTC1") throw FormatError("bad magic, expected HTC1");
  const Dims d{get_u32(bytes, 4), get_u32(bytes, 8), get_u32(bytes, 12)};
  if (d.n1 == 0 || d.n2 == 0 || d.n3 == 0) throw FormatError("zero extent in header");
  const std::size_t expect = kHtcHeaderBytes + 4 * d.size();
  if (bytes.size() < expect) {
    throw FormatError("truncated payload: " + std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(expect));
  }
  if (bytes.size() > expect) throw FormatError("trailing bytes after payload");
  std::vector<double> data(d.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    const float f = std::bit_cast<float>(get_u32(bytes, kHtcHeaderBytes + 4 * n));
    if (!std::isfinite(f)) throw NumericError("non-finite sample at index " + std::to_string(n));
    data[n] = f;
  }
  return Cube(d, std::move(data));
}

Cube read_cube(const std::filesystem::path& path) { return decode_cube(slurp(path)); }

void write_cube(const std::filesystem::path& path, const Cube& c) { spit(path, encode_cube(c)); }

// ---------------------------------------------------------------- schedules

Schedule parse_schedule(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ScheduleParseError("line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ScheduleParseError("line 1: schedule must be a JSON object");
  if (!doc.contains("model") || !doc["model"].is_string()) {
    throw ScheduleParseError("missing string field \"model\"");
  }
  if (!doc.contains("stages") || !doc["stages"].is_array()) {
    throw ScheduleParseError("missing array field \"stages\"");
  }

  Schedule s;
  try {
    s.model = parse_model(doc["model"].get<std::string>());
  } catch (const ParamError& e) {
    throw ScheduleParseError(e.what());
  }
  std::size_t idx = 0;
  for (const json& stage : doc["stages"]) {
    if (!stage.is_object()) {
      throw ScheduleParseError("stage " + std::to_string(idx) + " is not an object");
    }
    StageParams p;
    p.lambda = number_field(stage, "lambda", idx);
    p.gamma1 = number_field(stage, "gamma1", idx);
    p.gamma2 = number_field(stage, "gamma2", idx);
    p.beta = number_field(stage, "beta", idx);
    p.lipschitz = number_field(stage, "lipschitz", idx);
    if (s.model == Model::StarS || stage.contains("mu")) p.mu = number_field(stage, "mu", idx);
    if (auto it = stage.find("dictionaries"); it != stage.end() && !it->is_null()) {
      if (!it->is_object()) {
        throw ScheduleParseError("stage " + std::to_string(idx) +
                                 ": \"dictionaries\" must be an object");
      }
      p.dictionaries = DictionarySet{matrix_field(*it, "d1", idx), matrix_field(*it, "d2", idx),
                                     matrix_field(*it, "d3", idx)};
    }
    s.stages.push_back(std::move(p));
    ++idx;
  }
  s.validate();
  return s;
}

Schedule load_schedule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open schedule '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_schedule(ss.str());
}

std::string schedule_to_json(const Schedule& s) {
  json doc;
  doc["model"] = std::string(to_string(s.model));
  doc["stages"] = json::array();
  for (const StageParams& p : s.stages) {
    json st = {{"lambda", p.lambda}, {"gamma1", p.gamma1},       {"gamma2", p.gamma2},
               {"beta", p.beta},     {"mu", p.mu},               {"lipschitz", p.lipschitz}};
    if (p.dictionaries) {
      st["dictionaries"] = {{"d1", matrix_rows(p.dictionaries->d1)},
                            {"d2", matrix_rows(p.dictionaries->d2)},
                            {"d3", matrix_rows(p.dictionaries->d3)}};
    }
    doc["stages"].push_back(std::move(st));
  }
  return doc.dump(2) + "\n";
}

void save_schedule(const std::filesystem::path& path, const Schedule& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << schedule_to_json(s);
}

// ---------------------------------------------------------------- reports

std::string report_to_json(const SolveReport& r) {
  json doc = {{"iterations", r.iterations},
              {"residuals", r.residuals},
              {"objective", r.objective},
              {"wall_ms", r.wall_ms},
              {"converged", r.converged},
              {"degenerate_a_updates", r.degenerate_a_updates},
              {"lipschitz", r.lipschitz}};
  return doc.dump(2) + "\n";
}

std::string metrics_to_json(const MetricReport& m) {
  json doc = {{"psnr", m.psnr},
              {"ssim", m.ssim},
              {"sam", m.sam},
              {"ergas", m.ergas},
              {"ssim_full_image_window", m.ssim_full_image_window},
              {"sam_skipped", m.sam_skipped},
              {"ergas_skipped", m.ergas_skipped}};
  return doc.dump();
}

}  // namespace star
