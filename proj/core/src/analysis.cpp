// Copyright 2026 The acbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acb/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "acb/error.hpp"
#include "json.hpp"

namespace acb {

namespace fs = std::filesystem;

void MetricTable::set(const std::string& codec, const std::string& metric,
                      double value, Provenance provenance) {
  if (codec.empty() || metric.empty())
    throw ValidationError("metric table: empty codec or metric name");
  if (!std::isfinite(value))
    throw ValidationError("metric table: non-finite value for " + codec +
                          " / " + metric);
  auto& row = rows[codec];
  if (row.count(metric))
    throw ValidationError("metric table: duplicate cell " + codec + " / " +
                          metric);
  row[metric] = MetricCell{value, provenance};
}

bool MetricTable::has(const std::string& codec,
                      const std::string& metric) const {
  auto it = rows.find(codec);
  return it != rows.end() && it->second.count(metric) > 0;
}

double MetricTable::get(const std::string& codec,
                        const std::string& metric) const {
  auto it = rows.find(codec);
  if (it != rows.end()) {
    auto jt = it->second.find(metric);
    if (jt != it->second.end()) return jt->second.value;
  }
  throw ValidationError("metric table: no cell " + codec + " / " + metric);
}

std::vector<std::string> MetricTable::codecs() const {
  std::vector<std::string> out;
  for (const auto& [name, row] : rows) out.push_back(name);
  return out;
}

std::vector<std::string> MetricTable::metrics() const {
  std::set<std::string> ids;
  for (const auto& [name, row] : rows)
    for (const auto& [metric, cell] : row) ids.insert(metric);
  return {ids.begin(), ids.end()};
}

MetricId parse_metric_id(const std::string& id) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t slash = id.find('/', start);
    if (slash == std::string::npos) {
      parts.push_back(id.substr(start));
      break;
    }
    parts.push_back(id.substr(start, slash - start));
    start = slash + 1;
  }
  MetricId out;
  if (parts.size() == 1) {
    out.name = parts[0];
  } else if (parts.size() == 2) {
    out.dataset_type = parts[0];
    out.name = parts[1];
  } else {
    out.task = parts[0];
    out.dataset_type = parts[1];
    out.name = parts[2];
    for (size_t i = 3; i < parts.size(); ++i) out.name += "/" + parts[i];
  }
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw ValidationError("pearson: series lengths differ");
  if (x.size() < 2)
    throw ValidationError("pearson: need at least 2 points");
  size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw ValidationError("pearson: constant series has undefined r");
  double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

CorrelationReport correlate_against_ppl(const MetricTable& table) {
  // Dataset type -> id of its overall perplexity series.
  std::map<std::string, std::string> anchors;
  std::vector<std::string> all_metrics = table.metrics();
  for (const auto& id : all_metrics) {
    MetricId parsed = parse_metric_id(id);
    if (parsed.task == "ppl" && parsed.name == "overall")
      anchors[parsed.dataset_type] = id;
  }

  CorrelationReport report;
  bool any_candidate = false;
  bool any_overlap = false;
  std::vector<std::string> codecs = table.codecs();
  for (const auto& id : all_metrics) {
    MetricId parsed = parse_metric_id(id);
    if (parsed.task == "ppl") continue;
    any_candidate = true;

    std::string anchor;
    auto it = anchors.find(parsed.dataset_type);
    if (it != anchors.end()) {
      anchor = it->second;
    } else if (anchors.size() == 1) {
      anchor = anchors.begin()->second;
    } else {
      report.notes.push_back(id + " skipped: no perplexity anchor for '" +
                             parsed.dataset_type + "'");
      continue;
    }

    std::vector<double> xs, ys;
    uint64_t missing = 0;
    for (const auto& codec : codecs) {
      if (table.has(codec, id) && table.has(codec, anchor)) {
        xs.push_back(table.get(codec, anchor));
        ys.push_back(table.get(codec, id));
      } else {
        ++missing;
      }
    }
    if (xs.size() < 2) {
      report.notes.push_back(id + " skipped: insufficient pairs (n=" +
                             std::to_string(xs.size()) + ")");
      continue;
    }
    any_overlap = true;
    if (missing > 0)
      report.notes.push_back(id + ": " + std::to_string(missing) +
                             " codec(s) missing a value, skipped");

    double sxx = 0.0, syy = 0.0, mx = 0.0, my = 0.0;
    for (double v : xs) mx += v;
    for (double v : ys) my += v;
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(ys.size());
    for (size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
      report.notes.push_back(id + " skipped: constant series");
      continue;
    }

    CorrelationRow row;
    row.metric = id;
    row.task = parsed.task;
    row.dataset_type = parsed.dataset_type;
    row.name = parsed.name;
    row.r = pearson(xs, ys);
    row.n = xs.size();
    report.rows.push_back(std::move(row));
  }
  if (any_candidate && !any_overlap)
    throw ValidationError(
        "correlate: no metric shares two codecs with a perplexity anchor");
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const CorrelationRow& a, const CorrelationRow& b) {
                     double fa = std::fabs(a.r), fb = std::fabs(b.r);
                     if (fa != fb) return fa > fb;
                     return a.metric < b.metric;
                   });
  return report;
}

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  if (s == "markdown" || s == "md") return ReportFormat::kMarkdown;
  if (s == "svg") return ReportFormat::kSvg;
  throw ValidationError("unknown report format: " + s);
}

std::string to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::kCsv: return "csv";
    case ReportFormat::kJson: return "json";
    case ReportFormat::kMarkdown: return "markdown";
    case ReportFormat::kSvg: return "svg";
  }
  throw ValidationError("unknown report format");
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Rounds through the %.6g text form so JSON numbers match the text reports.
double fmt_round(double v) { return std::strtod(fmt(v).c_str(), nullptr); }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string sanitize_filename(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
            c == '_')
               ? c
               : '_';
  return out.empty() ? std::string("unnamed") : out;
}

void write_text(const fs::path& path, const std::string& content,
                std::vector<std::string>* written) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("short write to " + path.string());
  written->push_back(path.string());
}

// Column order per task. Reconstruction and perplexity tables keep the
// published layouts; other tasks sort alphabetically.
std::vector<std::string> ordered_columns(const std::string& task,
                                         const std::set<std::string>& names) {
  std::vector<std::string> out;
  std::set<std::string> left = names;
  auto take = [&](const std::string& n) {
    if (left.erase(n)) out.push_back(n);
  };
  if (task == "recon") {
    for (const char* n : {"pesq", "spk_sim", "wer_gt", "wer_rec", "cer_gt",
                          "cer_rec", "stoi", "si_snr", "mcd"})
      take(n);
  } else if (task == "ppl") {
    take("overall");
    std::vector<std::pair<int, std::string>> cbs;
    for (const auto& n : left)
      if (n.size() > 2 && n.compare(0, 2, "cb") == 0 &&
          n.find_first_not_of("0123456789", 2) == std::string::npos)
        cbs.emplace_back(std::stoi(n.substr(2)), n);
    std::sort(cbs.begin(), cbs.end());
    for (auto& [idx, n] : cbs) take(n);
  }
  for (const auto& n : left) out.push_back(n);
  return out;
}

struct Group {
  std::string task;
  std::string dataset_type;
  // Column name -> full metric id, so lookups never re-derive the id.
  std::map<std::string, std::string> columns;
  std::set<std::string> names() const {
    std::set<std::string> out;
    for (const auto& [name, id] : columns) out.insert(name);
    return out;
  }
};

std::map<std::string, Group> group_metrics(const MetricTable& table) {
  std::map<std::string, Group> groups;
  for (const auto& id : table.metrics()) {
    MetricId parsed = parse_metric_id(id);
    std::string task = parsed.task.empty() ? "misc" : parsed.task;
    std::string key = task;
    if (!parsed.dataset_type.empty()) key += "_" + parsed.dataset_type;
    Group& g = groups[key];
    g.task = task;
    g.dataset_type = parsed.dataset_type;
    g.columns[parsed.name] = id;
  }
  return groups;
}

std::string cell_text(const MetricTable& t, const std::string& codec,
                      const std::string& id) {
  return t.has(codec, id) ? fmt(t.get(codec, id)) : std::string("-");
}

const char* kPalette[8] = {"#4363d8", "#e6194b", "#3cb44b", "#f58231",
                           "#911eb4", "#46f0f0", "#808000", "#000075"};

// 640x400 canvas with a fixed plot box; y is always the [0, 1] ratio axis.
constexpr double kW = 640.0, kH = 400.0;
constexpr double kLeft = 60.0, kRight = 620.0, kTop = 40.0, kBottom = 360.0;

double map_y(double ratio) {
  return kBottom - std::clamp(ratio, 0.0, 1.0) * (kBottom - kTop);
}

void svg_header(std::ostringstream& s, const std::string& title) {
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
    << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
    << "\">\n"
    << "<rect width=\"" << kW << "\" height=\"" << kH
    << "\" fill=\"white\"/>\n"
    << "<text x=\"" << (kW / 2)
    << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"14\">"
    << xml_escape(title) << "</text>\n";
}

void svg_axes(std::ostringstream& s, const std::string& x_label) {
  s << "<line x1=\"" << kLeft << "\" y1=\"" << kBottom << "\" x2=\"" << kRight
    << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
    << "\" y2=\"" << kBottom << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double ratio = i / 4.0;
    double y = map_y(ratio);
    s << "<line x1=\"" << (kLeft - 4) << "\" y1=\"" << fmt(y) << "\" x2=\""
      << kLeft << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << (kLeft - 8) << "\" y=\"" << fmt(y + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">"
      << fmt(ratio) << "</text>\n";
  }
  s << "<text x=\"" << ((kLeft + kRight) / 2) << "\" y=\"" << (kBottom + 32)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\">"
    << xml_escape(x_label) << "</text>\n"
    << "<text x=\"16\" y=\"" << ((kTop + kBottom) / 2)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\" transform=\"rotate(-90 16 "
    << ((kTop + kBottom) / 2) << ")\">same-ID ratio</text>\n";
}

std::string round_curve_svg(const std::string& codec,
                            const std::vector<StabilityCurve>& curves) {
  std::ostringstream s;
  svg_header(s, codec + ": same-ID ratio across re-encoding rounds");
  svg_axes(s, "round");
  size_t max_pts = 0;
  for (const auto& c : curves) max_pts = std::max(max_pts, c.ratios.size());
  double span = max_pts > 1 ? static_cast<double>(max_pts - 1) : 1.0;
  auto map_x = [&](size_t i) {
    return kLeft + static_cast<double>(i) / span * (kRight - kLeft);
  };
  for (size_t i = 0; i < max_pts; ++i)
    s << "<text x=\"" << fmt(map_x(i)) << "\" y=\"" << (kBottom + 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">"
      << (i + 2) << "</text>\n";
  for (size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % 8];
    if (curves[c].ratios.size() > 1) {
      s << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
      for (size_t i = 0; i < curves[c].ratios.size(); ++i) {
        if (i) s << " ";
        s << fmt(map_x(i)) << "," << fmt(map_y(curves[c].ratios[i]));
      }
      s << "\"/>\n";
    }
    for (size_t i = 0; i < curves[c].ratios.size(); ++i)
      s << "<circle cx=\"" << fmt(map_x(i)) << "\" cy=\""
        << fmt(map_y(curves[c].ratios[i])) << "\" r=\"2.5\" fill=\"" << color
        << "\"/>\n";
    s << "<text x=\"" << (kRight - 70) << "\" y=\"" << (kTop + 14 * c + 10)
      << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
      << "\">cb" << (curves[c].codebook_index + 1)
      << " slope=" << fmt(curves[c].slope) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string shift_bar_svg(const std::string& codec,
                          const std::vector<ShiftStability>& bars) {
  std::ostringstream s;
  double shift_ms = bars.empty() ? 0.0 : bars.front().shift_ms;
  svg_header(s, codec + ": same-ID ratio after " + fmt(shift_ms) +
                    " ms shift");
  svg_axes(s, "codebook");
  double slot = (kRight - kLeft) / std::max<size_t>(bars.size(), 1);
  for (size_t c = 0; c < bars.size(); ++c) {
    double x0 = kLeft + slot * static_cast<double>(c) + slot * 0.15;
    double y = map_y(bars[c].ratio);
    s << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y) << "\" width=\""
      << fmt(slot * 0.7) << "\" height=\"" << fmt(kBottom - y) << "\" fill=\""
      << kPalette[c % 8] << "\"/>\n"
      << "<text x=\"" << fmt(x0 + slot * 0.35) << "\" y=\"" << (kBottom + 16)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">cb"
      << (bars[c].codebook_index + 1) << "</text>\n"
      << "<text x=\"" << fmt(x0 + slot * 0.35) << "\" y=\"" << fmt(y - 4)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"10\">"
      << fmt(bars[c].ratio) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace

namespace {

// Splits one CSV record; understands the quoting csv_escape produces.
std::vector<std::string> parse_csv_line(const std::string& line,
                                        const std::string& where) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ValidationError(where + ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

MetricTable load_metric_table_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  MetricTable table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string where = path + ":" + std::to_string(line_no);
    std::vector<std::string> f = parse_csv_line(line, where);
    if (line_no == 1 && !f.empty() && f[0] == "codec") continue;  // header
    if (f.size() != 3 && f.size() != 4)
      throw ValidationError(where + ": expected codec,metric,value[,provenance]");
    char* end = nullptr;
    double v = std::strtod(f[2].c_str(), &end);
    if (end == f[2].c_str() || *end != '\0')
      throw ValidationError(where + ": bad value '" + f[2] + "'");
    Provenance prov = Provenance::kInternal;
    if (f.size() == 4) {
      if (f[3] == "external-ingested") {
        prov = Provenance::kExternalIngested;
      } else if (f[3] != "internal") {
        throw ValidationError(where + ": bad provenance '" + f[3] + "'");
      }
    }
    table.set(f[0], f[1], v, prov);
  }
  return table;
}

std::vector<std::string> emit_report(const ReportInputs& in,
                                     const std::string& out_dir,
                                     const std::vector<ReportFormat>& formats) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  fs::path dir(out_dir);
  std::vector<std::string> written;

  std::vector<std::string> codecs = in.metrics.codecs();
  std::map<std::string, Group> groups = group_metrics(in.metrics);

  bool want_csv = false, want_json = false, want_md = false, want_svg = false;
  for (ReportFormat f : formats) {
    want_csv |= f == ReportFormat::kCsv;
    want_json |= f == ReportFormat::kJson;
    want_md |= f == ReportFormat::kMarkdown;
    want_svg |= f == ReportFormat::kSvg;
  }

  if (want_csv) {
    std::ostringstream all;
    all << "codec,metric,value,provenance\n";
    for (const auto& [codec, row] : in.metrics.rows)
      for (const auto& [metric, cell] : row)
        all << csv_escape(codec) << "," << csv_escape(metric) << ","
            << fmt(cell.value) << ","
            << (cell.provenance == Provenance::kInternal ? "internal"
                                                         : "external-ingested")
            << "\n";
    write_text(dir / "metrics.csv", all.str(), &written);

    for (const auto& [key, g] : groups) {
      std::vector<std::string> cols = ordered_columns(g.task, g.names());
      std::ostringstream s;
      s << "codec";
      for (const auto& c : cols) s << "," << csv_escape(c);
      s << "\n";
      for (const auto& codec : codecs) {
        bool any = false;
        for (const auto& c : cols)
          any |= in.metrics.has(codec, g.columns.at(c));
        if (!any) continue;
        s << csv_escape(codec);
        for (const auto& c : cols)
          s << "," << cell_text(in.metrics, codec, g.columns.at(c));
        s << "\n";
      }
      write_text(dir / (sanitize_filename(key) + ".csv"), s.str(), &written);
    }

    std::ostringstream corr;
    corr << "task,dataset_type,metric,r,n\n";
    for (const auto& row : in.correlations.rows)
      corr << csv_escape(row.task) << "," << csv_escape(row.dataset_type)
           << "," << csv_escape(row.name) << "," << fmt(row.r) << "," << row.n
           << "\n";
    write_text(dir / "correlations.csv", corr.str(), &written);
  }

  if (want_json) {
    nlohmann::ordered_json root;
    for (const auto& [codec, row] : in.metrics.rows) {
      nlohmann::ordered_json entry;
      for (const auto& [metric, cell] : row)
        entry[metric] = fmt_round(cell.value);
      root[codec] = std::move(entry);
    }
    nlohmann::ordered_json corrs = nlohmann::json::array();
    for (const auto& row : in.correlations.rows)
      corrs.push_back({{"metric", row.metric},
                       {"r", fmt_round(row.r)},
                       {"n", row.n}});
    root["correlations"] = std::move(corrs);
    nlohmann::ordered_json notes = nlohmann::json::array();
    for (const auto& n : in.notes) notes.push_back(n);
    for (const auto& n : in.correlations.notes) notes.push_back(n);
    root["notes"] = std::move(notes);
    write_text(dir / "report.json", root.dump(2) + "\n", &written);
  }

  if (want_md) {
    std::ostringstream md;
    md << "# Evaluation report\n";
    for (const auto& [key, g] : groups) {
      std::vector<std::string> cols = ordered_columns(g.task, g.names());
      md << "\n## " << key << "\n\n| codec |";
      for (const auto& c : cols) md << " " << c << " |";
      md << "\n|---|";
      for (size_t i = 0; i < cols.size(); ++i) md << "---|";
      md << "\n";
      for (const auto& codec : codecs) {
        bool any = false;
        for (const auto& c : cols)
          any |= in.metrics.has(codec, g.columns.at(c));
        if (!any) continue;
        md << "| " << codec << " |";
        for (const auto& c : cols)
          md << " " << cell_text(in.metrics, codec, g.columns.at(c)) << " |";
        md << "\n";
      }
    }
    if (!in.correlations.rows.empty()) {
      md << "\n## correlations\n\n| task | dataset type | metric | r | n "
            "|\n|---|---|---|---|---|\n";
      for (const auto& row : in.correlations.rows)
        md << "| " << row.task << " | " << row.dataset_type << " | "
           << row.name << " | " << fmt(row.r) << " | " << row.n << " |\n";
    }
    if (!in.notes.empty() || !in.correlations.notes.empty()) {
      md << "\n## notes\n\n";
      for (const auto& n : in.notes) md << "- " << n << "\n";
      for (const auto& n : in.correlations.notes) md << "- " << n << "\n";
    }
    write_text(dir / "report.md", md.str(), &written);
  }

  if (want_svg) {
    for (const auto& [codec, curves] : in.round_curves)
      write_text(dir / ("multiround_" + sanitize_filename(codec) + ".svg"),
                 round_curve_svg(codec, curves), &written);
    for (const auto& [codec, bars] : in.shift_bars)
      write_text(dir / ("timeshift_" + sanitize_filename(codec) + ".svg"),
                 shift_bar_svg(codec, bars), &written);
  }

  std::sort(written.begin(), written.end());
  return written;
}

}  // namespace acb
