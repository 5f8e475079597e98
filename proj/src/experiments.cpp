#include "privgame/experiments.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "privgame/errors.hpp"

namespace privgame {

EquilibriumSolution solve_scenario(const GaussianModel& model, PrivacyRatio delta) {
  return model.dims().n_y == 1 ? solve_scalar(model, delta) : solve_general(model, delta);
}

namespace {

void check_grid(std::span<const double> grid, const char* name) {
  if (grid.empty()) throw ContractViolation(std::string(name) + ": grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0)) throw ContractViolation(std::string(name) + ": negative privacy ratio");
    if (i > 0 && grid[i] < grid[i - 1]) {
      throw ContractViolation(std::string(name) + ": grid must be ascending");
    }
  }
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream is(line);
  while (std::getline(is, item, sep)) parts.push_back(item);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ScenarioIoError("bad number '" + s + "'");
  return v;
}

std::optional<double> to_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return to_double(s);
}

std::string format(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string format(const std::optional<double>& v) { return v ? format(*v) : std::string(); }

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

constexpr const char* kSweepHeader =
    "delta,v_xw,receiver_mse_closed,malicious_mse_closed,receiver_mse_mc,malicious_mse_mc,"
    "sender_cost,active_rank";
constexpr const char* kGridHeader = "delta,v_xw,receiver_mse_closed,feasible";

}  // namespace

std::vector<SweepRecord> run_delta_sweep(const Scenario& scenario,
                                         std::span<const double> delta_grid, bool simulate,
                                         const SimulationConfig& config) {
  check_grid(delta_grid, "run_delta_sweep");
  require_valid(scenario.model);
  std::vector<SweepRecord> records;
  records.reserve(delta_grid.size());
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    const PrivacyRatio delta(delta_grid[i]);
    const EquilibriumSolution s = solve_scenario(scenario.model, delta);
    SweepRecord r;
    r.delta = delta.value();
    r.v_xw = scenario.model.V_xw()(0, 0);
    r.receiver_mse_closed = s.receiver_mse;
    r.malicious_mse_closed = s.malicious_mse;
    r.sender_cost = s.sender_cost;
    r.active_rank = s.diagnostics.active_rank;
    if (simulate) {
      SimulationConfig point = config;
      point.seed = config.seed + i;
      const MonteCarloResult mc =
          monte_carlo_costs(scenario.model, s.sender, s.receiver, s.malicious, delta, point);
      r.receiver_mse_mc = mc.empirical.receiver_mse;
      r.malicious_mse_mc = mc.empirical.malicious_mse;
    }
    records.push_back(r);
  }
  return records;
}

std::vector<GridRecord> run_correlation_grid(const Scenario& scenario_template,
                                             std::span<const double> delta_grid,
                                             std::span<const double> v_xw_grid,
                                             const SimulationConfig& /*config*/) {
  check_grid(delta_grid, "run_correlation_grid");
  const Dimensions& d = scenario_template.model.dims();
  std::vector<GridRecord> records;
  records.reserve(delta_grid.size() * v_xw_grid.size());
  for (const double delta : delta_grid) {
    for (const double v : v_xw_grid) {
      GridRecord r;
      r.delta = delta;
      r.v_xw = v;
      const GaussianModel model = scenario_template.model.with_V_xw(Matrix::Constant(d.n_x, d.n_w, v));
      r.feasible = validate_model(model).ok();
      if (r.feasible) r.receiver_mse_closed = solve_scenario(model, PrivacyRatio(delta)).receiver_mse;
      records.push_back(r);
    }
  }
  return records;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const double a = to_double(parts[0]), b = to_double(parts[1]), step = to_double(parts[2]);
    if (!(step > 0.0) || b < a) throw ScenarioIoError("grid '" + text + "': need a <= b, step > 0");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) grid.push_back(a + static_cast<double>(i) * step);
    return grid;
  }
  if (parts.size() != 1) throw ScenarioIoError("grid '" + text + "': expected a:b:step or a list");
  for (const auto& item : split(text, ',')) grid.push_back(to_double(item));
  if (grid.empty()) throw ScenarioIoError("empty grid");
  return grid;
}

std::vector<double> default_delta_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.1 * i);
  grid.insert(grid.end(), {20.0, 50.0, 100.0});
  return grid;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records) {
  out << kSweepHeader << '\n';
  for (const auto& r : records) {
    out << format(r.delta) << ',' << format(r.v_xw) << ',' << format(r.receiver_mse_closed) << ','
        << format(r.malicious_mse_closed) << ',' << format(r.receiver_mse_mc) << ','
        << format(r.malicious_mse_mc) << ',' << format(r.sender_cost) << ',' << r.active_rank
        << '\n';
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kSweepHeader) {
    throw ScenarioIoError("sweep CSV: unexpected header");
  }
  std::vector<SweepRecord> records;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) throw ScenarioIoError("sweep CSV: expected 8 fields");
    SweepRecord r;
    r.delta = to_double(f[0]);
    r.v_xw = to_double(f[1]);
    r.receiver_mse_closed = to_double(f[2]);
    r.malicious_mse_closed = to_double(f[3]);
    r.receiver_mse_mc = to_optional(f[4]);
    r.malicious_mse_mc = to_optional(f[5]);
    r.sender_cost = to_double(f[6]);
    r.active_rank = static_cast<int>(to_double(f[7]));
    records.push_back(r);
  }
  return records;
}

void write_grid_csv(std::ostream& out, std::span<const GridRecord> records) {
  out << kGridHeader << '\n';
  for (const auto& r : records) {
    out << format(r.delta) << ',' << format(r.v_xw) << ',' << format(r.receiver_mse_closed) << ','
        << (r.feasible ? "true" : "false") << '\n';
  }
}

std::vector<GridRecord> read_grid_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kGridHeader) {
    throw ScenarioIoError("grid CSV: unexpected header");
  }
  std::vector<GridRecord> records;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4 || (f[3] != "true" && f[3] != "false")) {
      throw ScenarioIoError("grid CSV: malformed line '" + line + "'");
    }
    GridRecord r;
    r.delta = to_double(f[0]);
    r.v_xw = to_double(f[1]);
    r.receiver_mse_closed = to_optional(f[2]);
    r.feasible = f[3] == "true";
    records.push_back(r);
  }
  return records;
}

}  // namespace privgame
