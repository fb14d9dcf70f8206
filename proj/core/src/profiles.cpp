// SPDX-License-Identifier: Apache-2.0
#include "offsim/profiles.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "offsim/config.hpp"
#include "offsim/errors.hpp"

namespace offsim {

// ---------------------------------------------------------------------------
// Types

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kMeasured: return "measured";
    case Provenance::kApproximate: return "approximate";
    case Provenance::kInterpolated: return "interpolated";
  }
  return "measured";
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "measured") return Provenance::kMeasured;
  if (s == "approximate") return Provenance::kApproximate;
  if (s == "interpolated") return Provenance::kInterpolated;
  return std::nullopt;
}

AccuracyProfile::AccuracyProfile(int num_exits, int num_splits, double fill, Provenance provenance)
    : num_exits_(num_exits),
      num_splits_(num_splits),
      values_(static_cast<std::size_t>(num_exits) * static_cast<std::size_t>(num_splits + 1), fill),
      provenance_(values_.size(), provenance) {}

std::size_t AccuracyProfile::index(int exit, int split) const {
  if (exit < 1 || exit > num_exits_ || split < 0 || split > num_splits_) {
    throw DomainError(fmt::format("accuracy cell (exit {}, split {}) out of range", exit, split));
  }
  return static_cast<std::size_t>(exit - 1) * static_cast<std::size_t>(num_splits_ + 1) +
         static_cast<std::size_t>(split);
}

void AccuracyProfile::set(int exit, int split, double value, Provenance p) {
  auto i = index(exit, split);
  values_[i] = value;
  provenance_[i] = p;
}

void AccuracyProfile::set_row(int exit, double value, Provenance p) {
  for (int s = 0; s <= num_splits_; ++s) set(exit, s, value, p);
}

const SplitPointEntry& SplitProfile::at(int split) const {
  if (split < 0 || split > max_split()) {
    throw DomainError(fmt::format("split {} out of range 0..{}", split, max_split()));
  }
  return entries[static_cast<std::size_t>(split)];
}

double SplitProfile::segment_flop(int i) const {
  return units::gflop_to_flop(at(i - 1).segment_demand_gflop);
}

double compression_ratio(double d_orig_kb, double d_comp_kb) {
  if (d_comp_kb == 0.0) throw DomainError("compression ratio undefined for zero compressed volume");
  return d_orig_kb / d_comp_kb;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

void require_positive(double v, const std::string& field) {
  require(std::isfinite(v) && v > 0.0, field, fmt::format("must be a finite value > 0 (got {})", v));
}

void require_nonnegative(double v, const std::string& field) {
  require(std::isfinite(v) && v >= 0.0, field, fmt::format("must be a finite value >= 0 (got {})", v));
}

}  // namespace

void CnnTopology::validate() const {
  require(num_blocks >= 1, "topology.num_blocks", "must be >= 1");
  require(num_exits >= 1, "topology.num_exits", "must be >= 1");
  require(num_splits >= 1, "topology.num_splits", "must be >= 1");
  if (allow_unequal_exits) {
    require(num_exits <= num_splits, "topology.num_exits", "must not exceed num_splits");
  } else {
    require(num_exits == num_splits, "topology.num_exits",
            "must equal num_splits (set allow_unequal_exits to relax)");
  }
}

void SystemProfile::validate() const {
  topology.validate();

  const auto expected = static_cast<std::size_t>(topology.num_splits) + 1;
  require(splits.entries.size() == expected, "splits",
          fmt::format("expected {} entries (split 0..{}), got {}", expected, topology.num_splits,
                      splits.entries.size()));
  for (std::size_t i = 0; i < splits.entries.size(); ++i) {
    const auto& e = splits.entries[i];
    const std::string base = fmt::format("splits[{}]", i);
    require(e.split_index == static_cast<int>(i), base + ".split_index",
            fmt::format("entries must be dense and sorted; expected {}, got {}", i, e.split_index));
    require_nonnegative(e.d_orig_kb, base + ".d_orig");
    require_nonnegative(e.d_comp_kb, base + ".d_comp");
    require_nonnegative(e.d_ul_kb, base + ".d_ul");
    require_nonnegative(e.d_dl_kb, base + ".d_dl");
    require_nonnegative(e.segment_demand_gflop, base + ".segment_demand");
    if (e.compressor) {
      require(e.d_comp_kb <= e.d_orig_kb, base + ".d_comp", "must not exceed d_orig with a compressor");
    } else {
      require(e.d_comp_kb == e.d_orig_kb, base + ".d_comp", "must equal d_orig without a compressor");
    }
    if (e.compression_ratio) require_positive(*e.compression_ratio, base + ".ratio");
    if (static_cast<int>(i) == topology.num_splits) {
      require(e.d_ul_kb == 0.0, base + ".d_ul", "must be 0 at the full-local split");
      require(e.d_dl_kb == 0.0, base + ".d_dl", "must be 0 at the full-local split");
    }
  }

  require_positive(network.b_ul_mbps, "network.b_ul");
  require_positive(network.b_dl_mbps, "network.b_dl");
  require_nonnegative(network.d_ul_ms, "network.d_ul");
  require_nonnegative(network.d_dl_ms, "network.d_dl");

  require_positive(compute.c_dev_gflops, "compute.c_dev");
  require_positive(compute.c_mec_gflops, "compute.c_mec");
  require_nonnegative(compute.d_dev_ms, "compute.d_dev");
  require_nonnegative(compute.d_mec_ms, "compute.d_mec");
  require_nonnegative(compute.d_prep_ms, "compute.d_prep");
  if (compute.prep_model == PrepModel::kDivide) {
    // +inf is accepted: volume-dependent preprocessing vanishes.
    require(!std::isnan(compute.k_prep) && compute.k_prep > 0.0, "compute.k_prep",
            fmt::format("must be > 0 for prep_model = divide (got {})", compute.k_prep));
  } else {
    require_nonnegative(compute.k_prep, "compute.k_prep");
  }
  if (compute.c_cpu_gflops) require_nonnegative(*compute.c_cpu_gflops, "compute.c_cpu");
  if (compute.c_gpu_gflops) require_nonnegative(*compute.c_gpu_gflops, "compute.c_gpu");

  require_nonnegative(power.p_idle_w, "power.p_idle");
  require_nonnegative(power.p_prep_w, "power.p_prep");
  require_nonnegative(power.p_proc_w, "power.p_proc");
  require_nonnegative(power.p_comm_w, "power.p_comm");

  require(accuracy.num_exits() == topology.num_exits && accuracy.num_splits() == topology.num_splits,
          "accuracy",
          fmt::format("matrix is {}x{}, topology needs {}x{}", accuracy.num_exits(), accuracy.num_splits() + 1,
                      topology.num_exits, topology.num_splits + 1));
  for (int e = 1; e <= topology.num_exits; ++e) {
    for (int s = 0; s <= topology.num_splits; ++s) {
      double a = accuracy.at(e, s);
      require(a >= 0.0 && a <= 1.0, fmt::format("accuracy.exit_{}", e),
              fmt::format("value at split {} must lie in [0, 1] (got {})", s, a));
    }
  }
}

void SystemProfile::validate_plan(const ExecutionPlan& plan) const {
  require(plan.exit >= 1 && plan.exit <= topology.num_exits, "plan.exit",
          fmt::format("exit out of range 1..{}", topology.num_exits));
  require(plan.split >= 0 && plan.split <= topology.num_splits, "plan.split",
          fmt::format("split out of range 0..{}", topology.num_splits));
}

// ---------------------------------------------------------------------------
// Built-in profile

const SystemProfile& default_profile() {
  static const SystemProfile profile = [] {
    SystemProfile p;
    p.topology = CnnTopology{5, 5, 5, false};

    struct Row {
      double orig, comp, ul, dl, demand;
      bool compressor;
      std::optional<double> ratio;
    };
    const Row rows[] = {
        {10.10, 10.10, 1749.8, 1.6, 0.145, false, 1.0},
        {56.25, 7.03, 1206.4, 1.6, 0.226, true, 8.0},
        {3.52, 0.44, 625.1, 1.6, 0.358, true, 8.0},
        {1.53, 0.19, 279.4, 1.6, 0.311, true, 8.0},
        {0.56, 0.07, 100.6, 1.6, 0.080, true, 8.0},
        {0.0, 0.0, 0.0, 0.0, 0.0, false, std::nullopt},
    };
    int idx = 0;
    for (const auto& r : rows) {
      p.splits.entries.push_back(
          SplitPointEntry{idx++, r.orig, r.comp, r.ul, r.dl, r.demand, r.compressor, r.ratio});
    }

    p.network = NetworkProfile{12.36, 9.81, 22.81, 7.19};

    p.compute.c_dev_gflops = 3.62;
    p.compute.c_mec_gflops = 365.94;
    p.compute.d_dev_ms = 43.69;
    p.compute.d_mec_ms = 1.12;
    p.compute.d_prep_ms = 12.18;
    p.compute.k_prep = 2.33;
    p.compute.c_cpu_gflops = 20.4;
    p.compute.c_gpu_gflops = 52000.0;

    p.power = PowerProfile{4.62, 4.92, 5.17, 0.79};

    p.accuracy = AccuracyProfile(5, 5);
    p.accuracy.set_row(1, 0.32, Provenance::kMeasured);
    p.accuracy.set_row(2, 0.60, Provenance::kInterpolated);
    p.accuracy.set_row(3, 0.82, Provenance::kApproximate);
    p.accuracy.set_row(4, 0.88, Provenance::kInterpolated);
    p.accuracy.set_row(5, 0.93, Provenance::kMeasured);

    p.validate();
    return p;
  }();
  return profile;
}

// ---------------------------------------------------------------------------
// Configuration mapping

namespace {

using config::Document;
using config::Table;
using config::Value;

Value number(double v, bool integer = false) {
  Value out;
  out.data = v;
  out.integer = integer;
  return out;
}

Value string_value(std::string s) {
  Value out;
  out.data = std::move(s);
  return out;
}

Value bool_value(bool b) {
  Value out;
  out.data = b;
  return out;
}

Value array_value(config::Array a) {
  Value out;
  out.data = std::move(a);
  return out;
}

std::string_view prep_model_name(PrepModel m) { return m == PrepModel::kDivide ? "divide" : "multiply"; }
std::string_view prep_volume_name(PrepVolume v) { return v == PrepVolume::kCompressed ? "comp" : "ul"; }

Document to_document(const SystemProfile& p) {
  Document doc;

  Table& topo = doc.tables["topology"];
  topo.set("num_blocks", number(p.topology.num_blocks, true));
  topo.set("num_exits", number(p.topology.num_exits, true));
  topo.set("num_splits", number(p.topology.num_splits, true));
  topo.set("allow_unequal_exits", bool_value(p.topology.allow_unequal_exits));

  Table& net = doc.tables["network"];
  net.set("b_ul", number(p.network.b_ul_mbps));
  net.set("b_dl", number(p.network.b_dl_mbps));
  net.set("d_ul", number(p.network.d_ul_ms));
  net.set("d_dl", number(p.network.d_dl_ms));

  Table& comp = doc.tables["compute"];
  comp.set("c_dev", number(p.compute.c_dev_gflops));
  comp.set("c_mec", number(p.compute.c_mec_gflops));
  comp.set("d_dev", number(p.compute.d_dev_ms));
  comp.set("d_mec", number(p.compute.d_mec_ms));
  comp.set("d_prep", number(p.compute.d_prep_ms));
  comp.set("k_prep", number(p.compute.k_prep));
  comp.set("c_cpu", p.compute.c_cpu_gflops ? number(*p.compute.c_cpu_gflops) : string_value("none"));
  comp.set("c_gpu", p.compute.c_gpu_gflops ? number(*p.compute.c_gpu_gflops) : string_value("none"));
  comp.set("prep_model", string_value(std::string(prep_model_name(p.compute.prep_model))));
  comp.set("prep_volume", string_value(std::string(prep_volume_name(p.compute.prep_volume))));

  Table& power = doc.tables["power"];
  power.set("p_idle", number(p.power.p_idle_w));
  power.set("p_prep", number(p.power.p_prep_w));
  power.set("p_proc", number(p.power.p_proc_w));
  power.set("p_comm", number(p.power.p_comm_w));

  auto& splits = doc.table_arrays["splits"];
  for (const auto& e : p.splits.entries) {
    Table t;
    t.set("split_index", number(e.split_index, true));
    t.set("d_orig", number(e.d_orig_kb));
    t.set("d_comp", number(e.d_comp_kb));
    t.set("d_ul", number(e.d_ul_kb));
    t.set("d_dl", number(e.d_dl_kb));
    t.set("segment_demand", number(e.segment_demand_gflop));
    t.set("compressor", bool_value(e.compressor));
    if (e.compression_ratio) t.set("ratio", number(*e.compression_ratio));
    splits.push_back(std::move(t));
  }

  Table& acc = doc.tables["accuracy"];
  for (int ex = 1; ex <= p.accuracy.num_exits(); ++ex) {
    config::Array values;
    config::Array prov;
    for (int s = 0; s <= p.accuracy.num_splits(); ++s) {
      values.push_back(number(p.accuracy.at(ex, s)));
      prov.push_back(string_value(std::string(to_string(p.accuracy.provenance(ex, s)))));
    }
    acc.set(fmt::format("exit_{}", ex), array_value(std::move(values)));
    acc.set(fmt::format("exit_{}_provenance", ex), array_value(std::move(prov)));
  }
  return doc;
}

// Overlay `user` onto `base`: scalar tables merge key by key, [[splits]]
// replaces wholesale.
void merge_into(Document& base, const Document& user) {
  for (const auto& [k, v] : user.root.entries()) base.root.set(k, v);
  for (const auto& [name, table] : user.tables) {
    Table& dst = base.tables[name];
    if (dst.line == 0) dst.line = table.line;
    for (const auto& [k, v] : table.entries()) {
      // A user-supplied accuracy row carries its own provenance (measured
      // unless stated), not the built-in one.
      if (name == "accuracy" && !k.ends_with("_provenance") && !table.contains(k + "_provenance")) {
        dst.erase(k + "_provenance");
      }
      dst.set(k, v);
    }
  }
  for (const auto& [name, arr] : user.table_arrays) base.table_arrays[name] = arr;
}

void apply_override(Document& doc, const std::string& key, const std::string& text) {
  std::vector<std::string> parts;
  {
    std::size_t start = 0;
    while (true) {
      auto dot = key.find('.', start);
      parts.push_back(key.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
  }
  Value value = config::parse_value(text, /*allow_bare=*/true);

  if (parts.size() == 2 && parts[0] != "splits") {
    auto it = doc.tables.find(parts[0]);
    if (it == doc.tables.end()) throw UnknownKeyError(key);
    if (parts[0] == "accuracy" && !parts[1].ends_with("_provenance")) it->second.erase(parts[1] + "_provenance");
    it->second.set(parts[1], std::move(value));
    return;
  }
  if (parts.size() == 3 && parts[0] == "splits") {
    auto& arr = doc.table_arrays["splits"];
    for (auto& t : arr) {
      const Value* idx = t.find("split_index");
      if (idx && idx->is_number() && fmt::format("{}", static_cast<long long>(idx->as_number())) == parts[1]) {
        t.set(parts[2], std::move(value));
        return;
      }
    }
    throw UnknownKeyError("splits." + parts[1]);
  }
  throw UnknownKeyError(key);
}

class TableReader {
 public:
  TableReader(const Table& table, std::string prefix) : table_(table), prefix_(std::move(prefix)) {}

  std::string field(std::string_view key) const { return prefix_ + "." + std::string(key); }

  const Value* get(std::string_view key) {
    seen_.emplace_back(key);
    return table_.find(key);
  }

  double number(std::string_view key, double fallback) {
    const Value* v = get(key);
    if (!v) return fallback;
    if (!v->is_number()) throw ValidationError(field(key), "expected a number");
    return v->as_number();
  }

  std::optional<double> optional_number(std::string_view key, std::optional<double> fallback) {
    const Value* v = get(key);
    if (!v) return fallback;
    if (v->is_string() && v->as_string() == "none") return std::nullopt;
    if (!v->is_number()) throw ValidationError(field(key), "expected a number or \"none\"");
    return v->as_number();
  }

  int integer(std::string_view key, int fallback) {
    const Value* v = get(key);
    if (!v) return fallback;
    if (!v->is_number() || !v->integer) throw ValidationError(field(key), "expected an integer");
    double d = v->as_number();
    if (d < -1e9 || d > 1e9) throw ValidationError(field(key), "integer out of range");
    return static_cast<int>(d);
  }

  bool boolean(std::string_view key, bool fallback) {
    const Value* v = get(key);
    if (!v) return fallback;
    if (!v->is_bool()) throw ValidationError(field(key), "expected true or false");
    return v->as_bool();
  }

  std::optional<std::string> string(std::string_view key) {
    const Value* v = get(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) throw ValidationError(field(key), "expected a string");
    return v->as_string();
  }

  void reject_unknown() const {
    for (const auto& [k, _] : table_.entries()) {
      bool known = false;
      for (const auto& s : seen_) known = known || s == k;
      if (!known) throw UnknownKeyError(field(k));
    }
  }

 private:
  const Table& table_;
  std::string prefix_;
  std::vector<std::string> seen_;
};

const Table& table_or_empty(const Document& doc, std::string_view name) {
  static const Table empty;
  auto it = doc.tables.find(name);
  return it == doc.tables.end() ? empty : it->second;
}

SystemProfile from_document(const Document& doc) {
  for (const auto& [k, _] : doc.root.entries()) throw UnknownKeyError(k);
  for (const auto& [name, _] : doc.tables) {
    if (name != "topology" && name != "network" && name != "compute" && name != "power" && name != "accuracy") {
      throw UnknownKeyError(name);
    }
  }
  for (const auto& [name, _] : doc.table_arrays) {
    if (name != "splits") throw UnknownKeyError(name);
  }

  SystemProfile p;

  {
    TableReader r(table_or_empty(doc, "topology"), "topology");
    p.topology.num_blocks = r.integer("num_blocks", 0);
    p.topology.num_exits = r.integer("num_exits", 0);
    p.topology.num_splits = r.integer("num_splits", 0);
    p.topology.allow_unequal_exits = r.boolean("allow_unequal_exits", false);
    r.reject_unknown();
  }
  {
    TableReader r(table_or_empty(doc, "network"), "network");
    p.network.b_ul_mbps = r.number("b_ul", 0.0);
    p.network.b_dl_mbps = r.number("b_dl", 0.0);
    p.network.d_ul_ms = r.number("d_ul", 0.0);
    p.network.d_dl_ms = r.number("d_dl", 0.0);
    r.reject_unknown();
  }
  {
    TableReader r(table_or_empty(doc, "compute"), "compute");
    p.compute.c_dev_gflops = r.number("c_dev", 0.0);
    p.compute.c_mec_gflops = r.number("c_mec", 0.0);
    p.compute.d_dev_ms = r.number("d_dev", 0.0);
    p.compute.d_mec_ms = r.number("d_mec", 0.0);
    p.compute.d_prep_ms = r.number("d_prep", 0.0);
    p.compute.k_prep = r.number("k_prep", 0.0);
    p.compute.c_cpu_gflops = r.optional_number("c_cpu", std::nullopt);
    p.compute.c_gpu_gflops = r.optional_number("c_gpu", std::nullopt);
    if (auto m = r.string("prep_model")) {
      if (*m == "divide") {
        p.compute.prep_model = PrepModel::kDivide;
      } else if (*m == "multiply") {
        p.compute.prep_model = PrepModel::kMultiply;
      } else {
        throw ValidationError("compute.prep_model", "expected 'divide' or 'multiply'");
      }
    }
    if (auto v = r.string("prep_volume")) {
      if (*v == "comp") {
        p.compute.prep_volume = PrepVolume::kCompressed;
      } else if (*v == "ul") {
        p.compute.prep_volume = PrepVolume::kUplink;
      } else {
        throw ValidationError("compute.prep_volume", "expected 'comp' or 'ul'");
      }
    }
    r.reject_unknown();
  }
  {
    TableReader r(table_or_empty(doc, "power"), "power");
    p.power.p_idle_w = r.number("p_idle", 0.0);
    p.power.p_prep_w = r.number("p_prep", 0.0);
    p.power.p_proc_w = r.number("p_proc", 0.0);
    p.power.p_comm_w = r.number("p_comm", 0.0);
    r.reject_unknown();
  }

  if (auto it = doc.table_arrays.find("splits"); it != doc.table_arrays.end()) {
    std::size_t i = 0;
    for (const auto& t : it->second) {
      TableReader r(t, fmt::format("splits[{}]", i++));
      SplitPointEntry e;
      if (!t.contains("split_index")) throw ValidationError(r.field("split_index"), "missing");
      e.split_index = r.integer("split_index", -1);
      e.d_orig_kb = r.number("d_orig", 0.0);
      e.d_comp_kb = r.number("d_comp", e.d_orig_kb);
      e.d_ul_kb = r.number("d_ul", 0.0);
      e.d_dl_kb = r.number("d_dl", 0.0);
      e.segment_demand_gflop = r.number("segment_demand", 0.0);
      e.compressor = r.boolean("compressor", e.d_comp_kb != e.d_orig_kb);
      e.compression_ratio = r.optional_number("ratio", std::nullopt);
      r.reject_unknown();
      p.splits.entries.push_back(e);
    }
  }

  {
    const Table& acc = table_or_empty(doc, "accuracy");
    TableReader r(acc, "accuracy");
    const int rows = std::max(p.topology.num_exits, 0);
    const int cols = std::max(p.topology.num_splits, 0);
    p.accuracy = AccuracyProfile(rows, cols);
    for (int ex = 1; ex <= rows; ++ex) {
      const std::string key = fmt::format("exit_{}", ex);
      const Value* v = r.get(key);
      const std::string field = "accuracy." + key;
      if (!v) throw ValidationError(field, "missing accuracy row");
      if (v->is_number()) {
        p.accuracy.set_row(ex, v->as_number(), Provenance::kMeasured);
      } else if (v->is_array()) {
        const auto& arr = v->as_array();
        if (static_cast<int>(arr.size()) != cols + 1) {
          throw ValidationError(field, fmt::format("expected {} values (split 0..{}), got {}", cols + 1, cols,
                                                   arr.size()));
        }
        for (int s = 0; s <= cols; ++s) {
          if (!arr[static_cast<std::size_t>(s)].is_number()) throw ValidationError(field, "expected numbers");
          p.accuracy.set(ex, s, arr[static_cast<std::size_t>(s)].as_number(), Provenance::kMeasured);
        }
      } else {
        throw ValidationError(field, "expected a number or an array of numbers");
      }

      const std::string pkey = key + "_provenance";
      const std::string pfield = "accuracy." + pkey;
      if (const Value* pv = r.get(pkey)) {
        auto parse_one = [&](const Value& item) {
          if (!item.is_string()) throw ValidationError(pfield, "expected a string");
          auto prov = provenance_from_string(item.as_string());
          if (!prov) throw ValidationError(pfield, "expected measured, approximate or interpolated");
          return *prov;
        };
        if (pv->is_array()) {
          const auto& arr = pv->as_array();
          if (static_cast<int>(arr.size()) != cols + 1) {
            throw ValidationError(pfield, fmt::format("expected {} entries", cols + 1));
          }
          for (int s = 0; s <= cols; ++s) {
            p.accuracy.set(ex, s, p.accuracy.at(ex, s), parse_one(arr[static_cast<std::size_t>(s)]));
          }
        } else {
          Provenance prov = parse_one(*pv);
          for (int s = 0; s <= cols; ++s) p.accuracy.set(ex, s, p.accuracy.at(ex, s), prov);
        }
      }
    }
    // Rows beyond num_exits, e.g. left over from the defaults after shrinking
    // the topology, are ignored; anything else is unknown.
    for (const auto& [k, _] : acc.entries()) {
      int ex = 0;
      if (std::sscanf(k.c_str(), "exit_%d", &ex) == 1 &&
          (k == fmt::format("exit_{}", ex) || k == fmt::format("exit_{}_provenance", ex)) && ex > rows) {
        continue;
      }
      bool known = false;
      for (int e2 = 1; e2 <= rows; ++e2) {
        known = known || k == fmt::format("exit_{}", e2) || k == fmt::format("exit_{}_provenance", e2);
      }
      if (!known) throw UnknownKeyError("accuracy." + k);
    }
  }

  p.validate();
  return p;
}

}  // namespace

std::pair<std::string, std::string> parse_override(std::string_view text) {
  auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ValidationError("override", "expected key=value, got '" + std::string(text) + "'");
  }
  return {std::string(text.substr(0, eq)), std::string(text.substr(eq + 1))};
}

SystemProfile parse_profile(std::string_view text, const Overrides& overrides) {
  Document user = config::parse(text);
  Document doc = to_document(default_profile());
  merge_into(doc, user);
  for (const auto& [k, v] : overrides) apply_override(doc, k, v);
  return from_document(doc);
}

SystemProfile load_profile(const std::optional<std::filesystem::path>& path, const Overrides& overrides) {
  if (!path) return parse_profile("", overrides);
  std::ifstream in(*path, std::ios::binary);
  if (!in) throw ParseError("cannot open profile '" + path->string() + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_profile(buf.str(), overrides);
}

std::string serialize_profile(const SystemProfile& profile) {
  Document doc = to_document(profile);
  std::string out = "# offsim system profile\n";
  for (const char* name : {"topology", "network", "compute", "power"}) {
    out += fmt::format("\n[{}]\n", name);
    for (const auto& [k, v] : doc.tables.at(name).entries()) out += fmt::format("{} = {}\n", k, config::format_value(v));
  }
  for (const auto& t : doc.table_arrays.at("splits")) {
    out += "\n[[splits]]\n";
    for (const auto& [k, v] : t.entries()) out += fmt::format("{} = {}\n", k, config::format_value(v));
  }
  out += "\n[accuracy]\n";
  for (const auto& [k, v] : doc.tables.at("accuracy").entries()) out += fmt::format("{} = {}\n", k, config::format_value(v));
  return out;
}

}  // namespace offsim
