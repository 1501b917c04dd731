#include "uavdc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <thread>

#include "uavdc/errors.hpp"

namespace uavdc {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::string fmt(double v, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

const char* value_column(SweepVariable v) {
  switch (v) {
    case SweepVariable::d_th: return "d_th_m";
    case SweepVariable::battery_mah: return "battery_mah";
    case SweepVariable::deadline_s: return "deadline_s";
  }
  return "value";
}

SweepRow run_cell(const SweepSpec& spec, double value, std::uint64_t seed, const SweepAlgorithm& alg) {
  SweepRow row;
  row.value = value;
  row.seed = seed;
  row.algorithm = alg.label;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const MissionConfig cfg = with_value(spec.base, spec.variable, value);
    const SensorField field = generate_field(spec.area, spec.sensors, spec.dock, seed);
    PipelineOptions opt = alg.options;
    opt.cluster_seed = seed;
    opt.solver.seed = seed;
    opt.route = spec.route;
    if (spec.route) {
      // Rollout adds nothing to the swept metrics; stop after solving.
      const Clustering c = cluster_field(field, cfg, opt);
      row.clusters = static_cast<int>(c.size());
      const MissionGraph g(c, field.dock, cfg, opt.hover);
      const MissionPlan plan = solve(g, cfg.fleet_max, cfg.battery.mission_budget_j(), opt.solver);
      row.total_energy_kj = plan_energy(plan, g) / 1e3;
      row.visited_chs = plan.visited();
      row.deployed_uavs = plan.deployed();
    } else {
      row.clusters = static_cast<int>(cluster_field(field, cfg, opt).size());
    }
  } catch (const InvalidInput& e) {
    row.error = std::string("invalid: ") + e.what();
  } catch (const Infeasible& e) {
    row.error = std::string("infeasible: ") + e.what();
  } catch (const std::exception& e) {
    row.error = std::string("error: ") + e.what();
  }
  row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

}  // namespace

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::d_th: return "d_th";
    case SweepVariable::battery_mah: return "battery_mah";
    case SweepVariable::deadline_s: return "deadline_s";
  }
  return "?";
}

SweepVariable sweep_variable_from_string(const std::string& s) {
  if (s == "d_th" || s == "d_th_m") return SweepVariable::d_th;
  if (s == "battery_mah" || s == "battery") return SweepVariable::battery_mah;
  if (s == "deadline_s" || s == "deadline") return SweepVariable::deadline_s;
  throw InvalidInput("unknown sweep variable '" + s + "' (expected d_th, battery_mah or deadline_s)");
}

SweepAlgorithm parse_sweep_algorithm(const std::string& s, const SolverConfig& base) {
  const auto parts = split(s, ':');
  if (parts.empty() || parts[0].empty()) throw InvalidInput("empty sweep algorithm");
  SweepAlgorithm a;
  a.label = s;
  a.options.solver = base;
  std::string cl = parts[0];
  const std::string noshift = "-noshift";
  if (cl.size() > noshift.size() && cl.compare(cl.size() - noshift.size(), noshift.size(), noshift) == 0) {
    a.options.shift = false;
    cl.resize(cl.size() - noshift.size());
  }
  if (cl == "algo1-literal") {
    a.options.clustering = ClusteringAlgorithm::algo1;
    a.options.literal = true;
  } else {
    a.options.clustering = clustering_algorithm_from_string(cl);
  }
  if (parts.size() > 1) a.options.solver.algorithm = solver_from_string(parts[1]);
  if (parts.size() > 2) {
    std::string hover = parts[2];
    for (std::size_t k = 3; k < parts.size(); ++k) hover += ":" + parts[k];
    a.options.hover = hover_policy_from_string(hover);
  }
  return a;
}

void SweepSpec::validate() const {
  if (values.empty()) throw InvalidInput("sweep needs at least one value");
  for (std::size_t k = 1; k < values.size(); ++k)
    if (!(values[k] > values[k - 1])) throw InvalidInput("sweep values must be strictly increasing");
  if (repetitions < 1) throw InvalidInput("sweep repetitions must be at least 1");
  if (algorithms.empty()) throw InvalidInput("sweep needs at least one algorithm");
  if (sensors < 1) throw InvalidInput("sweep needs at least one sensor");
  if (workers < 0) throw InvalidInput("worker count must be non-negative");
  for (double v : values) with_value(base, variable, v).validate();
}

MissionConfig with_value(const MissionConfig& base, SweepVariable v, double value) {
  MissionConfig cfg = base;
  switch (v) {
    case SweepVariable::d_th: cfg.comm_range_m = value; break;
    case SweepVariable::battery_mah: cfg.battery.capacity_mah = value; break;
    case SweepVariable::deadline_s: cfg.deadline_s = value; break;
  }
  return cfg;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t nv = spec.values.size();
  const std::size_t ns = static_cast<std::size_t>(spec.repetitions);
  const std::size_t na = spec.algorithms.size();
  std::vector<SweepRow> rows(nv * ns * na);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= rows.size()) return;
      const std::size_t vi = k / (ns * na);
      const std::size_t si = (k / na) % ns;
      const std::size_t ai = k % na;
      rows[k] = run_cell(spec, spec.values[vi], spec.first_seed + si, spec.algorithms[ai]);
    }
  };
  unsigned n = spec.workers > 0 ? static_cast<unsigned>(spec.workers)
                                : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, rows.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<SweepRow>& rows) {
  std::vector<AggregateRow> out;
  std::map<std::pair<double, std::string>, std::size_t> index;
  std::vector<std::vector<const SweepRow*>> groups;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.value, r.algorithm);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      AggregateRow a;
      a.value = r.value;
      a.algorithm = r.algorithm;
      out.push_back(a);
      groups.emplace_back();
    }
    groups[it->second].push_back(&r);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    std::vector<double> k, e, v, d;
    for (const SweepRow* r : groups[g]) {
      if (!r->error.empty()) {
        ++out[g].errors;
        continue;
      }
      k.push_back(r->clusters);
      e.push_back(r->total_energy_kj);
      v.push_back(r->visited_chs);
      d.push_back(r->deployed_uavs);
    }
    auto& a = out[g];
    a.samples = static_cast<int>(k.size());
    mean_std(k, a.clusters_mean, a.clusters_std);
    mean_std(e, a.energy_mean, a.energy_std);
    mean_std(v, a.visited_mean, a.visited_std);
    mean_std(d, a.deployed_mean, a.deployed_std);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  return out;
}

void write_rows_csv(std::ostream& out, const std::vector<SweepRow>& rows, SweepVariable v,
                    const std::string& fingerprint) {
  out << "# uavdc-sweep-rows v1 config=" << fingerprint << '\n';
  out << value_column(v) << ",seed,algorithm,clusters,total_energy_kj,visited_chs,deployed_uavs,error\n";
  for (const auto& r : rows)
    out << fmt(r.value) << ',' << r.seed << ',' << csv_field(r.algorithm) << ',' << r.clusters << ','
        << fmt(r.total_energy_kj, "%.6f") << ',' << r.visited_chs << ',' << r.deployed_uavs << ','
        << csv_field(r.error) << '\n';
}

void write_timing_csv(std::ostream& out, const std::vector<SweepRow>& rows, SweepVariable v) {
  out << value_column(v) << ",seed,algorithm,runtime_s\n";
  for (const auto& r : rows)
    out << fmt(r.value) << ',' << r.seed << ',' << csv_field(r.algorithm) << ',' << fmt(r.runtime_s, "%.4f")
        << '\n';
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows, SweepVariable v,
                         const std::string& fingerprint) {
  out << "# uavdc-sweep-aggregate v1 config=" << fingerprint << '\n';
  out << value_column(v)
      << ",algorithm,samples,errors,clusters_mean,clusters_std,energy_kj_mean,energy_kj_std,"
         "visited_mean,visited_std,deployed_mean,deployed_std\n";
  for (const auto& a : rows)
    out << fmt(a.value) << ',' << csv_field(a.algorithm) << ',' << a.samples << ',' << a.errors << ','
        << fmt(a.clusters_mean, "%.6f") << ',' << fmt(a.clusters_std, "%.6f") << ','
        << fmt(a.energy_mean, "%.6f") << ',' << fmt(a.energy_std, "%.6f") << ','
        << fmt(a.visited_mean, "%.6f") << ',' << fmt(a.visited_std, "%.6f") << ','
        << fmt(a.deployed_mean, "%.6f") << ',' << fmt(a.deployed_std, "%.6f") << '\n';
}

std::vector<AggregateRow> read_aggregate_csv(std::istream& in, std::string* variable) {
  std::vector<AggregateRow> out;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, ',');
    if (!header) {
      if (f.size() != 12 || f[1] != "algorithm") throw ParseError(lineno, "unexpected aggregate header");
      if (variable) *variable = f[0];
      header = true;
      continue;
    }
    if (f.size() != 12) throw ParseError(lineno, "expected 12 fields");
    try {
      AggregateRow a;
      a.value = std::stod(f[0]);
      a.algorithm = f[1];
      a.samples = std::stoi(f[2]);
      a.errors = std::stoi(f[3]);
      a.clusters_mean = std::stod(f[4]);
      a.clusters_std = std::stod(f[5]);
      a.energy_mean = std::stod(f[6]);
      a.energy_std = std::stod(f[7]);
      a.visited_mean = std::stod(f[8]);
      a.visited_std = std::stod(f[9]);
      a.deployed_mean = std::stod(f[10]);
      a.deployed_std = std::stod(f[11]);
      out.push_back(a);
    } catch (const std::logic_error&) {
      throw ParseError(lineno, "malformed number");
    }
  }
  if (!header) throw ParseError(lineno, "missing aggregate header");
  return out;
}

const char* to_string(PlotMetric m) {
  switch (m) {
    case PlotMetric::clusters: return "clusters";
    case PlotMetric::energy: return "energy";
    case PlotMetric::visited: return "visited";
    case PlotMetric::deployed: return "deployed";
  }
  return "?";
}

PlotMetric plot_metric_from_string(const std::string& s) {
  for (auto m : {PlotMetric::clusters, PlotMetric::energy, PlotMetric::visited, PlotMetric::deployed})
    if (s == to_string(m)) return m;
  throw InvalidInput("unknown plot metric '" + s + "' (expected clusters, energy, visited or deployed)");
}

std::string render_svg(const std::vector<AggregateRow>& rows, PlotMetric metric, const std::string& x_label) {
  const auto pick = [&](const AggregateRow& a, double& m, double& s) {
    switch (metric) {
      case PlotMetric::clusters: m = a.clusters_mean, s = a.clusters_std; break;
      case PlotMetric::energy: m = a.energy_mean, s = a.energy_std; break;
      case PlotMetric::visited: m = a.visited_mean, s = a.visited_std; break;
      case PlotMetric::deployed: m = a.deployed_mean, s = a.deployed_std; break;
    }
  };
  const char* y_label = metric == PlotMetric::clusters  ? "clusters"
                        : metric == PlotMetric::energy  ? "total energy (kJ)"
                        : metric == PlotMetric::visited ? "visited CHs"
                                                        : "deployed UAVs";
  std::vector<std::string> series;
  for (const auto& a : rows)
    if (std::find(series.begin(), series.end(), a.algorithm) == series.end()) series.push_back(a.algorithm);

  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& a : rows) {
    if (a.samples == 0) continue;
    double m = 0, s = 0;
    pick(a, m, s);
    x0 = std::min(x0, a.value);
    x1 = std::max(x1, a.value);
    y0 = std::min(y0, m - s);
    y1 = std::max(y1, m + s);
  }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 1, x1 += 1;
  y0 = std::min(y0, 0.0);
  if (y1 <= y0) y1 = y0 + 1;
  y1 += 0.05 * (y1 - y0);

  const double W = 640, H = 420, L = 70, R = 170, T = 20, B = 50;
  const auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0, yv = y0 + (y1 - y0) * k / 5.0;
    o << "<text x=\"" << fmt(px(xv), "%.1f") << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">"
      << fmt(xv, "%.4g") << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << fmt(py(yv) + 4, "%.1f") << "\" text-anchor=\"end\">"
      << fmt(yv, "%.4g") << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << fmt(py(yv), "%.1f") << "\" x2=\"" << W - R << "\" y2=\""
      << fmt(py(yv), "%.1f") << "\" stroke=\"#ddd\"/>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label
    << "</text>\n";
  o << "<text transform=\"translate(16," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << y_label << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* c = colors[k % 7];
    std::string pts;
    for (const auto& a : rows) {
      if (a.algorithm != series[k] || a.samples == 0) continue;
      double m = 0, s = 0;
      pick(a, m, s);
      const std::string x = fmt(px(a.value), "%.1f");
      pts += x + "," + fmt(py(m), "%.1f") + " ";
      o << "<line x1=\"" << x << "\" y1=\"" << fmt(py(m - s), "%.1f") << "\" x2=\"" << x << "\" y2=\""
        << fmt(py(m + s), "%.1f") << "\" stroke=\"" << c << "\"/>\n";
      o << "<circle cx=\"" << x << "\" cy=\"" << fmt(py(m), "%.1f") << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    }
    o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
    const double ly = T + 16 + 18.0 * static_cast<double>(k);
    o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 32 << "\" y2=\"" << ly - 4
      << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 38 << "\" y=\"" << ly << "\">" << series[k] << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace uavdc
