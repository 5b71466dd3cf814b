#include "sgmod/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

namespace sgmod {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text == "inf" || text == "+inf") return kInf;
  if (text == "-inf") return -kInf;
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw IoError("not a number: '" + text + "'");
  return v;
}

json json_double(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double json_to_double(const json& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  if (j.is_number()) return j.get<double>();
  throw IoError("expected a number, got " + j.dump());
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw IoError("csv: missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

namespace {

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

json double_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(json_double(x));
  return a;
}

}  // namespace

std::string to_csv(const CsvTable& table) {
  std::string out;
  append_row(out, table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw IoError("csv: row width does not match header");
    append_row(out, row);
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream ss(text);
  std::string line;
  bool first = true;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (first) {
      t.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != t.header.size()) throw IoError("csv: row width does not match header");
    t.rows.push_back(std::move(cells));
  }
  if (first) throw IoError("csv: empty input");
  return t;
}

CsvTable de_trajectory_table(const DeTrajectory& traj) {
  CsvTable t;
  t.header = {"iteration", "t", "x", "z"};
  for (const auto& p : traj.profiles) {
    for (std::size_t i = 0; i < p.z.size(); ++i) {
      const double x = p.has_variance() ? p.x[i] : std::numeric_limits<double>::quiet_NaN();
      t.rows.push_back({std::to_string(p.iteration), format_double(p.grid.at(i)), format_double(x),
                        format_double(p.z[i])});
    }
  }
  return t;
}

json de_summary_json(const DeTrajectory& traj) {
  json j;
  j["receiver"] = to_string(traj.receiver);
  j["alpha"] = traj.params.alpha;
  j["sigma2"] = traj.params.sigma2;
  j["w"] = traj.params.w;
  j["theta"] = json_double(traj.params.theta.value());
  if (!traj.profiles.empty()) {
    const auto& g = traj.profiles.front().grid;
    j["model"] = to_string(g.model);
    j["t_min"] = g.t0;
    j["t_max"] = g.back();
    j["dt"] = g.dt;
  }
  j["iterations"] = traj.iterations;
  j["converged"] = traj.converged;
  j["stalled_at"] = traj.stalled_at ? json(*traj.stalled_at) : json(nullptr);
  j["front"] = double_array(traj.front);
  j["speed"] = double_array(traj.speed);
  return j;
}

json de_trajectory_json(const DeTrajectory& traj) {
  json j = de_summary_json(traj);
  json profiles = json::array();
  for (const auto& p : traj.profiles) {
    json e;
    e["iteration"] = p.iteration;
    std::vector<double> t(p.z.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = p.grid.at(i);
    e["t"] = double_array(t);
    e["x"] = double_array(p.x);
    e["z"] = double_array(p.z);
    profiles.push_back(std::move(e));
  }
  j["profiles"] = std::move(profiles);
  return j;
}

namespace {

std::vector<CurvePoint> export_order(const CurveTable& table) {
  auto rows = table.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return std::make_tuple(std::string(to_string(a.receiver)), a.alpha, a.ebn0.db()) <
           std::make_tuple(std::string(to_string(b.receiver)), b.alpha, b.ebn0.db());
  });
  return rows;
}

}  // namespace

CsvTable curve_table_csv(const CurveTable& table) {
  CsvTable t;
  t.header = {"receiver", "alpha", "s", "sigma2", "ebn0_db", "spectral_efficiency"};
  for (const auto& r : export_order(table)) {
    t.rows.push_back({to_string(r.receiver), format_double(r.alpha), format_double(r.s), format_double(r.sigma2),
                      format_double(r.ebn0.db()), format_double(r.spectral_efficiency.bits())});
  }
  return t;
}

json curve_table_json(const CurveTable& table) {
  json rows = json::array();
  for (const auto& r : export_order(table)) {
    rows.push_back({{"receiver", to_string(r.receiver)},
                    {"alpha", r.alpha},
                    {"s", r.s},
                    {"sigma2", r.sigma2},
                    {"ebn0_db", r.ebn0.db()},
                    {"spectral_efficiency", r.spectral_efficiency.bits()}});
  }
  return {{"rows", rows}, {"skipped", table.skipped}};
}

CurveTable parse_curve_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  const auto rc = t.column("receiver"), ac = t.column("alpha"), sc = t.column("s"), nc = t.column("sigma2"),
             ec = t.column("ebn0_db"), fc = t.column("spectral_efficiency");
  CurveTable out;
  for (const auto& row : t.rows) {
    out.rows.push_back(CurvePoint{curve_receiver_from_string(row[rc]), parse_double(row[ac]), parse_double(row[sc]),
                                  parse_double(row[nc]), CapacityValue(parse_double(row[fc])),
                                  EbN0::from_db(parse_double(row[ec]))});
  }
  return out;
}

json link_sim_config_json(const LinkSimConfig& c) {
  return {{"n_dims", c.n_dims},
          {"m_substreams", c.m_substreams},
          {"k_streams", c.k_streams},
          {"w", c.w},
          {"l_bits", c.l_bits},
          {"slots", c.slots},
          {"sigma2", c.sigma2},
          {"power", c.power},
          {"seed", c.seed},
          {"iterations", c.iterations},
          {"receiver", to_string(c.receiver)},
          {"theta", json_double(c.theta.value())},
          {"load", c.load()}};
}

json link_sim_json(const LinkSimResult& r) {
  json j;
  j["config"] = link_sim_config_json(r.config);
  json cws = json::array();
  for (const auto& c : r.codewords) {
    cws.push_back({{"stream", c.stream}, {"start_slot", c.start_slot}, {"centre_slot", c.centre_slot}});
  }
  j["codewords"] = std::move(cws);
  json iters = json::array();
  for (std::size_t i = 0; i < r.x_hat.size(); ++i) {
    json e;
    e["iteration"] = i;
    e["x_hat"] = double_array(r.x_hat[i]);
    e["sinr"] = i < r.sinr.size() ? double_array(r.sinr[i]) : json::array();
    e["decoded"] = i < r.decoded.size() ? json(r.decoded[i]) : json::array();
    e["mean_abs_error"] = i < r.mean_abs_error.size() ? json_double(r.mean_abs_error[i]) : json(nullptr);
    iters.push_back(std::move(e));
  }
  j["iterations"] = std::move(iters);
  return j;
}

CsvTable de_comparison_table(const DeComparison& c) {
  CsvTable t;
  t.header = {"iteration", "slot", "de_x", "sim_x", "rel_error"};
  for (std::size_t i = 0; i < c.de_x.size(); ++i) {
    for (std::size_t s = 0; s < c.de_x[i].size(); ++s) {
      const double rel = std::abs(c.sim_x[i][s] - c.de_x[i][s]) / c.de_x[i][s];
      t.rows.push_back({std::to_string(i), std::to_string(s + 1), format_double(c.de_x[i][s]),
                        format_double(c.sim_x[i][s]), format_double(rel)});
    }
  }
  return t;
}

json de_comparison_json(const DeComparison& c) {
  json j;
  j["seeds"] = c.seeds;
  json its = json::array();
  for (std::size_t i = 0; i < c.de_x.size(); ++i) {
    its.push_back({{"iteration", i},
                   {"de_x", double_array(c.de_x[i])},
                   {"sim_x", double_array(c.sim_x[i])},
                   {"max_rel_error", json_double(c.max_rel_error[i])}});
  }
  j["iterations"] = std::move(its);
  return j;
}

}  // namespace sgmod
