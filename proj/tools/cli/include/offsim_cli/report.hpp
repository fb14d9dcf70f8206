// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "offsim/cost_model.hpp"

namespace offsim::cli {

/// Flat, unit-suffixed view of a CostReport, in output column order.
struct ReportRow {
  int exit = 0;
  int split = 0;
  double accuracy = 0.0;
  double t_prep_ms = 0.0;
  double t_local_ms = 0.0;
  double t_mec_ms = 0.0;
  double t_ul_ms = 0.0;
  double t_dl_ms = 0.0;
  double t_total_ms = 0.0;
  double e_idle_j = 0.0;
  double e_prep_j = 0.0;
  double e_comp_j = 0.0;
  double e_comm_j = 0.0;
  double e_total_j = 0.0;
  bool offload_active = false;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "exit,split,accuracy,t_prep_ms,t_local_ms,t_mec_ms,t_ul_ms,t_dl_ms,t_total_ms,"
    "e_idle_j,e_prep_j,e_comp_j,e_comm_j,e_total_j,offload_active";

ReportRow to_row(const CostReport& report);

/// Delays with 3 decimals, energies and accuracy with 4.
std::string csv_line(const ReportRow& row);
void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);

/// Inverse of write_csv. Throws ParseError on a bad header or field.
std::vector<ReportRow> read_csv(std::istream& in);

/// Full-precision JSON.
nlohmann::ordered_json to_json(const ReportRow& row);

/// RFC 4180 field quoting (only when needed) and line splitting.
std::string csv_quote(std::string_view field);
std::vector<std::string> csv_split(std::string_view line);

}  // namespace offsim::cli
