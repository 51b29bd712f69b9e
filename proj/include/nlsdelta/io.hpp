#pragma once

// Snapshots (JSON), CSV writers and the content hash stamped into outputs.

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/evolution.hpp"
#include "nlsdelta/grid.hpp"
#include "nlsdelta/model.hpp"
#include "nlsdelta/state.hpp"
#include "nlsdelta/virial.hpp"

namespace nlsdelta {

/// Shortest decimal that parses back to the same double; nan/inf spelled out.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) fail(ErrorKind::io, "format_double: conversion failed");
  return std::string(buf, end);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::io, "write failed for " + path);
}

/// git's blob id: SHA-1 over "blob <size>\0" followed by the content.
inline std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) fail(ErrorKind::io, "git_blob_hash: no digest context");
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 && EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) fail(ErrorKind::io, "git_blob_hash: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

/// Comment lines every output file starts with.
struct OutputHeader {
  std::string manifest_hash;
  double lambda_ref = 0.0;

  std::string text() const {
    return "# manifest_hash=" + manifest_hash + "\n# lambda_ref=" + format_double(lambda_ref) + "\n";
  }
};

// ---------------------------------------------------------------- snapshots

struct Snapshot {
  int version = 1;
  double alpha = 0.0;
  double lambda = 0.0;
  double p = 0.0;
  std::size_t n_points = 0;
  double r_max = 0.0;
  cplx q{0.0, 0.0};
  Field phi;
  std::string manifest_hash;
};

inline constexpr int snapshot_version = 1;

inline Snapshot make_snapshot(const DecomposedState& s, double p) {
  if (!s.kernel->real_shift()) fail(ErrorKind::parameter, "snapshot: needs a real decomposition shift");
  Snapshot snap;
  snap.version = snapshot_version;
  snap.alpha = s.alpha();
  snap.lambda = s.lambda();
  snap.p = p;
  snap.n_points = s.grid().size();
  snap.r_max = s.grid().r_max();
  snap.q = s.q;
  snap.phi = s.phi;
  return snap;
}

inline std::string snapshot_to_json(const Snapshot& snap) {
  nlohmann::ordered_json j;
  j["version"] = snap.version;
  j["alpha"] = snap.alpha;
  j["lambda"] = snap.lambda;
  j["p"] = snap.p;
  j["n_points"] = snap.n_points;
  j["r_max"] = snap.r_max;
  j["q_re"] = snap.q.real();
  j["q_im"] = snap.q.imag();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& v : snap.phi) arr.push_back({v.real(), v.imag()});
  j["phi"] = std::move(arr);
  if (!snap.manifest_hash.empty()) j["manifest_hash"] = snap.manifest_hash;
  return j.dump(1) + "\n";
}

inline Snapshot snapshot_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, std::string("snapshot: malformed JSON: ") + e.what());
  }
  Snapshot snap;
  try {
    snap.version = j.at("version").get<int>();
    if (snap.version != snapshot_version)
      fail(ErrorKind::io, "snapshot: unsupported version " + std::to_string(snap.version));
    snap.alpha = j.at("alpha").get<double>();
    snap.lambda = j.at("lambda").get<double>();
    snap.p = j.at("p").get<double>();
    snap.n_points = j.at("n_points").get<std::size_t>();
    snap.r_max = j.at("r_max").get<double>();
    snap.q = {j.at("q_re").get<double>(), j.at("q_im").get<double>()};
    const auto& arr = j.at("phi");
    snap.phi.reserve(arr.size());
    for (const auto& pair : arr) {
      if (!pair.is_array() || pair.size() != 2) fail(ErrorKind::io, "snapshot: phi entries must be [re, im] pairs");
      snap.phi.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    if (j.contains("manifest_hash")) snap.manifest_hash = j["manifest_hash"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::io, std::string("snapshot: ") + e.what());
  }
  if (snap.phi.size() != snap.n_points) fail(ErrorKind::io, "snapshot: phi length differs from n_points");
  return snap;
}

inline void write_snapshot(const std::string& path, const Snapshot& snap) { write_text_file(path, snapshot_to_json(snap)); }

inline Snapshot read_snapshot(const std::string& path) { return snapshot_from_json(read_text_file(path)); }

/// Rebuilds the state; a model on the same grid and alpha is reused when given.
inline DecomposedState snapshot_to_state(const Snapshot& snap, ModelPtr model = nullptr) {
  if (!model) model = make_model(make_grid(snap.n_points, snap.r_max), snap.alpha);
  if (model->grid().size() != snap.n_points || model->grid().r_max() != snap.r_max || model->alpha() != snap.alpha)
    fail(ErrorKind::parameter, "snapshot: grid or alpha differs from the target model");
  return make_state(make_workspace(model, snap.lambda), snap.phi, snap.q);
}

// ---------------------------------------------------------------- CSV

inline const std::vector<std::string>& evolution_columns() {
  static const std::vector<std::string> cols{"t",        "mass", "energy",           "F",
                                             "pohozaev", "V",    "Vprime",           "Vsecond_analytic",
                                             "h1_alpha", "q_re", "q_im",             "sup_field"};
  return cols;
}

inline const std::vector<std::string>& virial_columns() {
  static const std::vector<std::string> cols{"t",        "four_P", "rem_p1", "rem_uHu",   "rem_grad",
                                             "rem_cross", "rem_GG", "total",  "V_fd_second"};
  return cols;
}

inline const std::vector<std::string>& inequality_columns() {
  static const std::vector<std::string> cols{"family", "params", "grid", "ratio", "empirical_C", "refinement_flag"};
  return cols;
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      out += '"';
      for (char ch : c) {
        if (ch == '"') out += '"';
        out += ch;
      }
      out += '"';
    } else {
      out += c;
    }
  }
  return out + "\n";
}

/// Three-point second derivative on a possibly non-uniform mesh; NaN at the ends.
inline std::vector<double> second_difference(const std::vector<double>& t, const std::vector<double>& v) {
  std::vector<double> out(v.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    const double h1 = t[k] - t[k - 1], h2 = t[k + 1] - t[k];
    if (!(h1 > 0.0) || !(h2 > 0.0)) continue;
    out[k] = 2.0 * (h1 * v[k + 1] - (h1 + h2) * v[k] + h2 * v[k - 1]) / (h1 * h2 * (h1 + h2));
  }
  return out;
}

inline std::vector<double> virial_fd_second(const std::vector<TimeSeriesRecord>& series) {
  std::vector<double> t, v;
  for (const auto& r : series) {
    t.push_back(r.t);
    v.push_back(r.V);
  }
  return second_difference(t, v);
}

inline std::string evolution_csv(const std::vector<TimeSeriesRecord>& series, const OutputHeader& header) {
  std::string out = header.text() + csv_row(evolution_columns());
  for (const auto& r : series)
    out += csv_row({format_double(r.t), format_double(r.mass), format_double(r.energy), format_double(r.F),
                    format_double(r.pohozaev), format_double(r.V), format_double(r.Vprime),
                    format_double(r.Vsecond_analytic), format_double(r.h1_alpha), format_double(r.q.real()),
                    format_double(r.q.imag()), format_double(r.sup_field)});
  return out;
}

inline std::string virial_csv(const std::vector<TimeSeriesRecord>& series, const std::vector<VirialBreakdown>& parts,
                              const OutputHeader& header) {
  if (parts.size() != series.size()) fail(ErrorKind::shape, "virial_csv: breakdown and series lengths differ");
  const auto fd = virial_fd_second(series);
  std::string out = header.text() + csv_row(virial_columns());
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& b = parts[k];
    out += csv_row({format_double(series[k].t), format_double(b.four_P), format_double(b.rem_p1),
                    format_double(b.rem_uHu), format_double(b.rem_grad), format_double(b.rem_cross),
                    format_double(b.rem_GG), format_double(b.total), format_double(fd[k])});
  }
  return out;
}

/// Minimal reader for the files written above: skips '#' lines, returns the header and numeric rows.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    fail(ErrorKind::io, "csv: no column " + name);
  }
  double number(std::size_t row, const std::string& name) const {
    const std::string& cell = rows.at(row).at(column(name));
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (cell == "inf") return std::numeric_limits<double>::infinity();
    if (cell == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) fail(ErrorKind::io, "csv: not a number: " + cell);
    return v;
  }
};

inline CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cur += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        cells.push_back(std::move(cur));
        cur.clear();
      } else {
        cur += ch;
      }
    }
    cells.push_back(std::move(cur));
    if (!have_header) {
      t.columns = std::move(cells);
      have_header = true;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

}  // namespace nlsdelta
