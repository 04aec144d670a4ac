#pragma once

// File formats.
//
//   points CSV   one row per point, d numeric columns, optional final integer
//                label column. An optional header row (first row with a
//                non-numeric field) names the columns; a last column named
//                "label" marks the file as labelled.
//   assignments  "index,cluster" header, one row per point.
//   key-value    "key = value" per line; '#' starts a comment. Used for the
//                metrics record and for config files.
//   trace JSON   see write_trace_json.
//
// Floating-point values are written with 17 significant digits.

#include "mslab/clusters.hpp"
#include "mslab/engine.hpp"
#include "mslab/experiments.hpp"
#include "mslab/state.hpp"
#include "mslab/synthdata.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mslab {

class FormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline std::string fmt17(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split_fields(const std::string& line)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ','))
    out.push_back(trim(field));
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

inline bool parse_double(const std::string& s, double& out)
{
  if (s.empty())
    return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

inline std::ofstream open_out(const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

} // namespace detail

enum class LabelColumn
{
  auto_detect, // labelled iff the header's last column is "label"
  present,
  absent
};

inline LabeledData read_points_csv(std::istream& in, LabelColumn labels = LabelColumn::auto_detect)
{
  std::vector<double> coords;
  std::vector<int> truth;
  std::size_t columns = 0;
  bool labelled = labels == LabelColumn::present;
  std::string line;
  std::size_t row = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty())
      continue;
    const auto fields = detail::split_fields(line);
    if (first_content) {
      first_content = false;
      double probe = 0.0;
      bool header = false;
      for (const auto& f : fields)
        header = header || !detail::parse_double(f, probe);
      columns = fields.size();
      if (header) {
        if (labels == LabelColumn::auto_detect)
          labelled = fields.back() == "label";
        continue;
      }
    }
    if (fields.size() != columns)
      throw FormatError("row " + std::to_string(row) + ": expected " + std::to_string(columns) +
                        " fields, found " + std::to_string(fields.size()));
    const std::size_t dims = labelled ? columns - 1 : columns;
    if (dims == 0)
      throw FormatError("row " + std::to_string(row) + ": no coordinate columns");
    for (std::size_t c = 0; c < dims; ++c) {
      double v = 0.0;
      if (!detail::parse_double(fields[c], v))
        throw FormatError("row " + std::to_string(row) + ", column " + std::to_string(c + 1) +
                          ": '" + fields[c] + "' is not a finite number");
      coords.push_back(v);
    }
    if (labelled) {
      double v = 0.0;
      if (!detail::parse_double(fields.back(), v) || v != std::floor(v) || std::abs(v) > 1e9)
        throw FormatError("row " + std::to_string(row) + ": label '" + fields.back() +
                          "' is not an integer");
      truth.push_back(static_cast<int>(v));
    }
  }
  if (coords.empty())
    throw FormatError("no data rows");
  const std::size_t dims = labelled ? columns - 1 : columns;
  return {State(dims, std::move(coords)), std::move(truth)};
}

inline LabeledData read_points_csv(const std::string& path, LabelColumn labels = LabelColumn::auto_detect)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  try {
    return read_points_csv(in, labels);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

/// Header "x0,...,x{d-1}[,label]" followed by one row per point.
inline void write_points_csv(std::ostream& out, const State& s, const std::vector<int>& labels = {})
{
  for (std::size_t k = 0; k < s.dim(); ++k)
    out << (k ? "," : "") << 'x' << k;
  out << (labels.empty() ? "" : ",label") << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto p = s.point(i);
    for (std::size_t k = 0; k < s.dim(); ++k)
      out << (k ? "," : "") << fmt17(p[k]);
    if (!labels.empty())
      out << ',' << labels[i];
    out << '\n';
  }
}

inline void write_points_csv(const std::string& path, const State& s, const std::vector<int>& labels = {})
{
  auto out = detail::open_out(path);
  write_points_csv(out, s, labels);
}

inline void write_assignments_csv(std::ostream& out, const Clustering& c)
{
  out << "index,cluster\n";
  for (std::size_t i = 0; i < c.labels.size(); ++i)
    out << i << ',' << c.labels[i] << '\n';
}

inline std::vector<std::size_t> read_assignments_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  std::vector<std::size_t> labels;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 || detail::trim(line).empty())
      continue;
    const auto fields = detail::split_fields(line);
    double idx = 0.0;
    double cluster = 0.0;
    if (fields.size() != 2 || !detail::parse_double(fields[0], idx) ||
        !detail::parse_double(fields[1], cluster) || idx != static_cast<double>(labels.size()) ||
        cluster < 0 || cluster != std::floor(cluster))
      throw FormatError(path + ": row " + std::to_string(row) + ": expected '" +
                        std::to_string(labels.size()) + ",<cluster id>'");
    labels.push_back(static_cast<std::size_t>(cluster));
  }
  return labels;
}

using KeyValues = std::map<std::string, std::string>;

inline KeyValues read_key_values(std::istream& in, const std::string& origin = "config")
{
  KeyValues kv;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (detail::trim(line).empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(origin + ": line " + std::to_string(row) + ": expected 'key = value'");
    std::string key = detail::trim(std::string_view(line).substr(0, eq));
    if (key.empty())
      throw FormatError(origin + ": line " + std::to_string(row) + ": empty key");
    kv[std::move(key)] = detail::trim(std::string_view(line).substr(eq + 1));
  }
  return kv;
}

inline KeyValues read_key_values(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open '" + path + "'");
  return read_key_values(in, path);
}

inline void write_metrics(std::ostream& out, const Clustering& c, const std::vector<int>& truth)
{
  out << "cluster_count = " << c.count() << '\n';
  if (truth.empty())
    return;
  const ClusterMetrics m = evaluate(c, truth);
  out << "acp = " << fmt17(m.acp) << '\n';
  out << "alp = " << fmt17(m.alp) << '\n';
  out << "k = " << fmt17(m.k) << '\n';
}

namespace detail {

inline void json_optional(std::ostream& out, const char* key, const std::optional<double>& v)
{
  if (v)
    out << ",\"" << key << "\":" << fmt17(*v);
}

} // namespace detail

/// {"algorithm", "stop_reason", "iterations_used", "n", "d", "config": {...},
///  "isolated": [...], "steps": [{"k","i","h","shift","weight_sum",
///  ["L_before","L_after","grad_norm"]}], "final_state": [[...], ...]}
inline void write_trace_json(std::ostream& out, const RunTrace& t, const RunConfig& cfg)
{
  out << "{\"algorithm\":\"" << to_string(t.algorithm) << "\",";
  out << "\"stop_reason\":\"" << to_string(t.stop_reason) << "\",";
  out << "\"iterations_used\":" << t.iterations_used << ',';
  out << "\"n\":" << t.final_state.size() << ",\"d\":" << t.final_state.dim() << ',';
  out << "\"config\":{\"kernel\":\"" << cfg.profile.name() << "\",\"h\":" << fmt17(cfg.bandwidth)
      << ",\"hmin\":" << fmt17(cfg.schedule.h_min) << ",\"hmax\":" << fmt17(cfg.schedule.h_max)
      << ",\"hinit\":" << fmt17(cfg.schedule.h_init) << ",\"nu\":\"" << cfg.schedule.nu.str()
      << "\",\"max_iter\":" << cfg.max_iterations << ",\"tol\":" << fmt17(cfg.convergence_threshold)
      << ",\"seed\":" << cfg.seed << ",\"trace\":\"" << to_string(cfg.trace_level) << "\"},";
  out << "\"isolated\":[";
  for (std::size_t i = 0; i < t.isolated.size(); ++i)
    out << (i ? "," : "") << t.isolated[i];
  out << "],\n\"steps\":[";
  for (std::size_t s = 0; s < t.steps.size(); ++s) {
    const StepRecord& r = t.steps[s];
    out << (s ? ",\n" : "\n") << "{\"k\":" << r.step << ",\"i\":";
    if (r.index == no_index)
      out << "null";
    else
      out << r.index;
    out << ",\"h\":" << fmt17(r.bandwidth) << ",\"shift\":" << fmt17(r.shift_norm)
        << ",\"weight_sum\":" << fmt17(r.weight_sum);
    detail::json_optional(out, "L_before", r.objective_before);
    detail::json_optional(out, "L_after", r.objective_after);
    detail::json_optional(out, "grad_norm", r.gradient_norm);
    out << '}';
  }
  out << "],\n\"final_state\":[";
  for (std::size_t i = 0; i < t.final_state.size(); ++i) {
    out << (i ? "," : "") << '[';
    const auto p = t.final_state.point(i);
    for (std::size_t k = 0; k < p.size(); ++k)
      out << (k ? "," : "") << fmt17(p[k]);
    out << ']';
  }
  out << "]}\n";
}

/// Columns: sweep_var, algo, metric, mean, ci_lo, ci_hi, reps.
inline void write_sweep_csv(std::ostream& out, const SweepResult& r)
{
  out << "sweep_var,algo,metric,mean,ci_lo,ci_hi,reps\n";
  for (const SweepRow& row : r.rows)
    out << fmt17(row.sweep_value) << ',' << row.algo << ',' << row.metric << ',' << fmt17(row.ci.mean)
        << ',' << fmt17(row.ci.lo) << ',' << fmt17(row.ci.hi) << ',' << row.reps << '\n';
}

/// Long format: figure, sweep_var_name, sweep_var, algo, metric, rep, value.
inline void write_plotdata_csv(std::ostream& out, const SweepResult& r)
{
  out << "figure,sweep_var_name,sweep_var,algo,metric,rep,value\n";
  for (const auto& [key, values] : r.samples) {
    const auto& [v, algo, metric] = key;
    for (std::size_t rep = 0; rep < values.size(); ++rep)
      out << r.kind << ',' << r.sweep_var << ',' << fmt17(v) << ',' << algo << ',' << metric << ','
          << rep << ',' << fmt17(values[rep]) << '\n';
  }
}

} // namespace mslab
