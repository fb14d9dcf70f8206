// SPDX-License-Identifier: Apache-2.0
#include "offsim_cli/report.hpp"

#include <charconv>

#include <fmt/format.h>

#include "offsim/errors.hpp"
#include "offsim/units.hpp"

namespace offsim::cli {

ReportRow to_row(const CostReport& r) {
  using units::s_to_ms;
  return ReportRow{r.plan.exit,
                   r.plan.split,
                   r.accuracy,
                   s_to_ms(r.delay.t_prep),
                   s_to_ms(r.delay.t_local),
                   s_to_ms(r.delay.t_mec),
                   s_to_ms(r.delay.t_ul),
                   s_to_ms(r.delay.t_dl),
                   s_to_ms(r.delay.t_total),
                   r.energy.e_idle,
                   r.energy.e_prep,
                   r.energy.e_comp,
                   r.energy.e_comm,
                   r.energy.e_total,
                   r.offload_active};
}

std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back().push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back().push_back(c);
    }
  }
  return fields;
}

std::string csv_line(const ReportRow& r) {
  return fmt::format("{},{},{:.4f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f},{:.4f},{:.4f},{:.4f},{:.4f},{:.4f},{}",
                     r.exit, r.split, r.accuracy, r.t_prep_ms, r.t_local_ms, r.t_mec_ms, r.t_ul_ms, r.t_dl_ms,
                     r.t_total_ms, r.e_idle_j, r.e_prep_j, r.e_comp_j, r.e_comm_j, r.e_total_j,
                     r.offload_active ? "true" : "false");
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << csv_line(r) << '\n';
}

namespace {

template <typename T>
T parse_field(const std::string& text, int line, const char* column) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(fmt::format("invalid {} '{}'", column, text), line);
  }
  return v;
}

}  // namespace

std::vector<ReportRow> read_csv(std::istream& in) {
  std::string line;
  int lineno = 1;
  if (!std::getline(in, line)) throw ParseError("missing CSV header", lineno);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ParseError("unexpected CSV header", lineno);

  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = csv_split(line);
    if (f.size() != 15) throw ParseError(fmt::format("expected 15 columns, got {}", f.size()), lineno);
    ReportRow r;
    r.exit = parse_field<int>(f[0], lineno, "exit");
    r.split = parse_field<int>(f[1], lineno, "split");
    r.accuracy = parse_field<double>(f[2], lineno, "accuracy");
    r.t_prep_ms = parse_field<double>(f[3], lineno, "t_prep_ms");
    r.t_local_ms = parse_field<double>(f[4], lineno, "t_local_ms");
    r.t_mec_ms = parse_field<double>(f[5], lineno, "t_mec_ms");
    r.t_ul_ms = parse_field<double>(f[6], lineno, "t_ul_ms");
    r.t_dl_ms = parse_field<double>(f[7], lineno, "t_dl_ms");
    r.t_total_ms = parse_field<double>(f[8], lineno, "t_total_ms");
    r.e_idle_j = parse_field<double>(f[9], lineno, "e_idle_j");
    r.e_prep_j = parse_field<double>(f[10], lineno, "e_prep_j");
    r.e_comp_j = parse_field<double>(f[11], lineno, "e_comp_j");
    r.e_comm_j = parse_field<double>(f[12], lineno, "e_comm_j");
    r.e_total_j = parse_field<double>(f[13], lineno, "e_total_j");
    if (f[14] == "true") {
      r.offload_active = true;
    } else if (f[14] != "false") {
      throw ParseError("invalid offload_active '" + f[14] + "'", lineno);
    }
    rows.push_back(r);
  }
  return rows;
}

nlohmann::ordered_json to_json(const ReportRow& r) {
  nlohmann::ordered_json j;
  j["exit"] = r.exit;
  j["split"] = r.split;
  j["accuracy"] = r.accuracy;
  j["t_prep_ms"] = r.t_prep_ms;
  j["t_local_ms"] = r.t_local_ms;
  j["t_mec_ms"] = r.t_mec_ms;
  j["t_ul_ms"] = r.t_ul_ms;
  j["t_dl_ms"] = r.t_dl_ms;
  j["t_total_ms"] = r.t_total_ms;
  j["e_idle_j"] = r.e_idle_j;
  j["e_prep_j"] = r.e_prep_j;
  j["e_comp_j"] = r.e_comp_j;
  j["e_comm_j"] = r.e_comm_j;
  j["e_total_j"] = r.e_total_j;
  j["offload_active"] = r.offload_active;
  return j;
}

}  // namespace offsim::cli
