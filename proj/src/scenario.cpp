#include "cnprop/scenario.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "cnprop/abc.hpp"
#include "cnprop/error.hpp"

namespace cnprop {
namespace {

using json = nlohmann::json;

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigError, message);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    config_error(std::string(key) + ": expected a finite number, got '" + std::string(text) + "'");
  }
  return v;
}

std::size_t parse_count(std::string_view key, std::string_view text) {
  std::size_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    config_error(std::string(key) + ": expected a non-negative integer, got '" +
                 std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true") return true;
  if (text == "false") return false;
  config_error(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

std::optional<double> parse_optional(std::string_view key, std::string_view text,
                                     std::string_view empty_word) {
  if (text == empty_word) return std::nullopt;
  return parse_double(key, text);
}

std::string format_optional(const std::optional<double>& v, std::string_view empty_word) {
  return v ? format_double(*v) : std::string(empty_word);
}

struct KeyDef {
  std::string_view name;
  bool numeric;  // sweepable
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view, std::string_view)> set;
};

#define CNPROP_DOUBLE_KEY(NAME, FIELD)                                              \
  KeyDef {                                                                          \
    NAME, true, [](const RunConfig& c) { return format_double(c.FIELD); },          \
        [](RunConfig& c, std::string_view k, std::string_view v) {                  \
          c.FIELD = parse_double(k, v);                                             \
        }                                                                           \
  }
#define CNPROP_COUNT_KEY(NAME, FIELD)                                               \
  KeyDef {                                                                          \
    NAME, true, [](const RunConfig& c) { return std::to_string(c.FIELD); },         \
        [](RunConfig& c, std::string_view k, std::string_view v) {                  \
          c.FIELD = parse_count(k, v);                                              \
        }                                                                           \
  }
#define CNPROP_BOOL_KEY(NAME, FIELD)                                                \
  KeyDef {                                                                          \
    NAME, false, [](const RunConfig& c) { return std::string(c.FIELD ? "true" : "false"); }, \
        [](RunConfig& c, std::string_view k, std::string_view v) {                  \
          c.FIELD = parse_bool(k, v);                                               \
        }                                                                           \
  }
#define CNPROP_OPTIONAL_KEY(NAME, FIELD, WORD)                                      \
  KeyDef {                                                                          \
    NAME, true, [](const RunConfig& c) { return format_optional(c.FIELD, WORD); },  \
        [](RunConfig& c, std::string_view k, std::string_view v) {                  \
          c.FIELD = parse_optional(k, v, WORD);                                     \
        }                                                                           \
  }

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = {
      CNPROP_DOUBLE_KEY("grid.x_min", x_min),
      CNPROP_DOUBLE_KEY("grid.x_max", x_max),
      CNPROP_COUNT_KEY("grid.n_sites", n_sites),
      CNPROP_DOUBLE_KEY("time.t0", t0),
      CNPROP_DOUBLE_KEY("time.dt", dt),
      CNPROP_COUNT_KEY("time.n_steps", n_steps),
      KeyDef{"boundary.mode", false,
             [](const RunConfig& c) {
               return std::string(c.boundary == BoundaryMode::Abc ? "abc" : "dirichlet");
             },
             [](RunConfig& c, std::string_view k, std::string_view v) {
               if (v == "abc") {
                 c.boundary = BoundaryMode::Abc;
               } else if (v == "dirichlet") {
                 c.boundary = BoundaryMode::Dirichlet;
               } else {
                 config_error(std::string(k) + ": expected dirichlet or abc");
               }
             }},
      CNPROP_DOUBLE_KEY("abc.alpha1", abc_alpha1),
      CNPROP_DOUBLE_KEY("abc.alpha2", abc_alpha2),
      CNPROP_BOOL_KEY("packet.enabled", packet_enabled),
      CNPROP_DOUBLE_KEY("packet.x0", packet.x0),
      CNPROP_DOUBLE_KEY("packet.p0", packet.p0),
      CNPROP_DOUBLE_KEY("packet.sigma0", packet.sigma0),
      KeyDef{"potential.kind", false,
             [](const RunConfig& c) {
               switch (c.potential) {
                 case PotentialKind::SquareBarrier: return std::string("barrier");
                 case PotentialKind::SquareWell: return std::string("well");
                 default: return std::string("free");
               }
             },
             [](RunConfig& c, std::string_view k, std::string_view v) {
               if (v == "free") {
                 c.potential = PotentialKind::Free;
               } else if (v == "barrier") {
                 c.potential = PotentialKind::SquareBarrier;
               } else if (v == "well") {
                 c.potential = PotentialKind::SquareWell;
               } else {
                 config_error(std::string(k) + ": expected free, barrier or well");
               }
             }},
      CNPROP_OPTIONAL_KEY("potential.v0", potential_v0, "matched"),
      CNPROP_DOUBLE_KEY("potential.xb", potential_xb),
      CNPROP_BOOL_KEY("source.enabled", source_enabled),
      CNPROP_DOUBLE_KEY("source.s0", source.s0),
      CNPROP_OPTIONAL_KEY("source.ramp", source.ramp, "none"),
      CNPROP_OPTIONAL_KEY("source.omega", source.omega, "auto"),
      CNPROP_DOUBLE_KEY("source.p0", source.p0),
      CNPROP_DOUBLE_KEY("source.x", source.x),
      KeyDef{"run.strategy", false,
             [](const RunConfig& c) {
               return std::string(c.strategy == Strategy::DenseInverse ? "dense" : "solve");
             },
             [](RunConfig& c, std::string_view k, std::string_view v) {
               if (v == "dense") {
                 c.strategy = Strategy::DenseInverse;
               } else if (v == "solve") {
                 c.strategy = Strategy::TridiagonalSolve;
               } else {
                 config_error(std::string(k) + ": expected dense or solve");
               }
             }},
      CNPROP_COUNT_KEY("run.frame_stride", frame_stride),
      KeyDef{"run.output", false, [](const RunConfig& c) { return c.output; },
             [](RunConfig& c, std::string_view, std::string_view v) { c.output = v; }},
      CNPROP_OPTIONAL_KEY("analysis.interval_a", interval_a, "none"),
      CNPROP_OPTIONAL_KEY("analysis.interval_b", interval_b, "none"),
      CNPROP_OPTIONAL_KEY("analysis.steady_a", steady_a, "none"),
      CNPROP_OPTIONAL_KEY("analysis.steady_b", steady_b, "none"),
      CNPROP_DOUBLE_KEY("analysis.steady_exclusion", steady_exclusion),
      CNPROP_BOOL_KEY("analysis.transmission", transmission),
      CNPROP_OPTIONAL_KEY("analysis.monitor_x", monitor_x, "auto"),
      CNPROP_COUNT_KEY("analysis.settle_max_steps", settle_max_steps),
      KeyDef{"sweep.key", false,
             [](const RunConfig& c) { return c.sweep ? c.sweep->key : std::string("none"); },
             [](RunConfig& c, std::string_view, std::string_view v) {
               if (v == "none") {
                 c.sweep.reset();
               } else {
                 if (!c.sweep) c.sweep.emplace();
                 c.sweep->key = v;
               }
             }},
      KeyDef{"sweep.start", false,
             [](const RunConfig& c) { return format_double(c.sweep ? c.sweep->start : 0.0); },
             [](RunConfig& c, std::string_view k, std::string_view v) {
               const double x = parse_double(k, v);
               if (c.sweep) c.sweep->start = x;
             }},
      KeyDef{"sweep.stop", false,
             [](const RunConfig& c) { return format_double(c.sweep ? c.sweep->stop : 0.0); },
             [](RunConfig& c, std::string_view k, std::string_view v) {
               const double x = parse_double(k, v);
               if (c.sweep) c.sweep->stop = x;
             }},
      KeyDef{"sweep.count", false,
             [](const RunConfig& c) { return std::to_string(c.sweep ? c.sweep->count : 1); },
             [](RunConfig& c, std::string_view k, std::string_view v) {
               const std::size_t x = parse_count(k, v);
               if (c.sweep) c.sweep->count = x;
             }},
  };
  return table;
}

#undef CNPROP_DOUBLE_KEY
#undef CNPROP_COUNT_KEY
#undef CNPROP_BOOL_KEY
#undef CNPROP_OPTIONAL_KEY

const KeyDef& find_key(std::string_view key) {
  for (const auto& def : key_table()) {
    if (def.name == key) return def;
  }
  config_error("unknown config key '" + std::string(key) + "'");
}

json typed_value(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (!text.empty() && res.ec == std::errc() && res.ptr == text.data() + text.size()) return v;
  return text;
}

json config_json(const RunConfig& config) {
  json obj = json::object();
  for (const auto& def : key_table()) obj[std::string(def.name)] = typed_value(def.get(config));
  return obj;
}

// ---------------------------------------------------------------------------
// Simulation

struct Setup {
  SpatialGrid grid;
  RealVector potential;
  EvolutionOperator op;
  std::optional<SourceSpec> source;
};

RealVector build_potential(const SpatialGrid& grid, const RunConfig& c) {
  PotentialSpec spec;
  spec.kind = c.potential;
  spec.height = resolved_v0(c);
  spec.xb = c.potential_xb;
  return sample_potential(grid, spec, 0.0);
}

Setup make_setup(const RunConfig& c) {
  SpatialGrid grid(c.x_min, c.x_max, c.n_sites);
  RealVector v = build_potential(grid, c);
  EvolutionOperator op =
      c.boundary == BoundaryMode::Abc
          ? build_abc(grid, v, c.dt, abc_coefficients(c.abc_alpha1, c.abc_alpha2, Side::Left),
                      abc_coefficients(c.abc_alpha1, c.abc_alpha2, Side::Right))
          : build_dirichlet(grid, v, c.dt);
  op = with_strategy(std::move(op), c.strategy);
  std::optional<SourceSpec> source;
  if (c.source_enabled) {
    SourceSpec s;
    s.s0 = c.source.s0;
    s.ramp = c.source.ramp;
    s.omega = resolved_omega(c);
    s.site = grid.nearest_site(c.source.x);
    source = s;
  }
  return {grid, std::move(v), std::move(op), source};
}

double barrier_edge(const RunConfig& c) {
  return c.source.x < 0.0 ? c.potential_xb : -c.potential_xb;
}

double default_monitor(const RunConfig& c) {
  const double edge = barrier_edge(c);
  return edge > 0.0 ? 0.5 * (edge + c.x_max) : 0.5 * (edge + c.x_min);
}

std::optional<double> analytic_transmission_for(const RunConfig& c) {
  const double energy = 0.5 * c.source.p0 * c.source.p0;
  double v0 = 0.0;
  if (c.potential == PotentialKind::SquareBarrier) v0 = resolved_v0(c);
  if (c.potential == PotentialKind::SquareWell) v0 = -resolved_v0(c);
  if (!(energy > 0.0) || !(c.potential_xb > 0.0)) return std::nullopt;
  return analytic_barrier_transmission(energy, v0, 2.0 * c.potential_xb);
}

RunReport run_single(const RunConfig& c, RecordSink* sink) {
  Setup setup = make_setup(c);
  const SpatialGrid& grid = setup.grid;
  RunReport report;
  if (setup.op.mode() == BoundaryMode::Abc && !setup.op.boundary_potential_uniform()) {
    report.warnings.push_back("potential is not uniform next to an absorbing boundary");
  }

  WaveFunction psi(grid);
  if (c.packet_enabled) {
    SampledPacket packet = gaussian_packet(grid, c.packet);
    if (!packet.clear_of_boundaries) {
      report.warnings.push_back("packet lies within 6 sigma0 of the grid boundary");
    }
    psi = std::move(packet.psi);
  }
  if (setup.source) report.omega = setup.source->omega;

  Stepper stepper(setup.op, setup.source, c.t0);
  const auto record_frame = [&](std::size_t step) {
    ++report.frame_count;
    const double t = c.t0 + static_cast<double>(step) * c.dt;
    if (c.interval_a && c.interval_b) {
      report.interval_probability.emplace_back(t,
                                               probability_in_interval(psi, *c.interval_a,
                                                                       *c.interval_b));
    }
    if (sink) sink->frame(step, t, psi);
  };

  report.initial_norm = norm(psi);
  report.norms.reserve(c.n_steps + 1);
  report.norms.push_back(report.initial_norm);
  record_frame(0);

  using clock = std::chrono::steady_clock;
  clock::duration stepping{};
  std::size_t n = 0;
  const auto advance = [&]() {
    const auto start = clock::now();
    try {
      stepper.advance(psi.amplitudes(), n);
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(n) + ": " + e.what());
    }
    stepping += clock::now() - start;
    ++n;
    if (!psi.all_finite()) {
      throw Error(ErrorCode::InvalidArgument,
                  "step " + std::to_string(n) + ": wavefunction became non-finite");
    }
  };

  for (; n < c.n_steps;) {
    advance();
    const double nrm = norm(psi);
    report.max_step_drift = std::max(report.max_step_drift, std::abs(nrm - report.norms.back()));
    report.norms.push_back(nrm);
    if (n % c.frame_stride == 0) record_frame(n);
  }

  if (c.transmission) {
    const double omega = setup.source->omega;
    const auto period =
        std::max<std::size_t>(1, std::llround(2.0 * std::numbers::pi / omega / std::abs(c.dt)));
    const double monitor = c.monitor_x.value_or(default_monitor(c));
    for (;;) {
      WaveFunction earlier = psi;
      for (std::size_t k = 0; k < period; ++k) advance();
      try {
        report.transmission = estimate_transmission(psi, earlier, c.source.s0, omega,
                                                    barrier_edge(c), monitor, n);
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NotSettled) throw;
        if (n >= c.settle_max_steps) {
          throw Error(e.code(), "step " + std::to_string(n) + ": " + e.what());
        }
      }
    }
    report.transmission_analytic = analytic_transmission_for(c);
  }

  if (c.steady_a && c.steady_b && setup.source) {
    SteadyStateRegion region;
    region.a = *c.steady_a;
    region.b = *c.steady_b;
    region.source_x = grid.position(setup.source->site);
    region.exclusion = c.steady_exclusion * grid.dx();
    report.steady_state_error =
        steady_state_error(psi, c.source.s0, setup.source->omega,
                           c.t0 + static_cast<double>(n) * c.dt, region);
  }

  report.steps_run = n;
  report.final_norm = norm(psi);
  report.cumulative_drift = std::abs(report.final_norm - report.initial_norm);
  report.step_seconds = std::chrono::duration<double>(stepping).count();
  report.seconds_per_step = n ? report.step_seconds / static_cast<double>(n) : 0.0;
  return report;
}

RunReport run_sweep(const RunConfig& c, RecordSink* sink) {
  const SweepSpec& sweep = *c.sweep;
  std::vector<RunConfig> points;
  std::vector<double> values;
  for (std::size_t i = 0; i < sweep.count; ++i) {
    const double value =
        sweep.count == 1 ? sweep.start
                         : sweep.start + (sweep.stop - sweep.start) * static_cast<double>(i) /
                                             static_cast<double>(sweep.count - 1);
    RunConfig point = c;
    point.sweep.reset();
    set_config_value(point, sweep.key, format_double(value));
    points.push_back(std::move(point));
    values.push_back(value);
  }

  const auto solve_point = [](const RunConfig& point) { return run_single(point, nullptr); };
  std::vector<RunReport> results(points.size());
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t begin = 0; begin < points.size(); begin += workers) {
    const std::size_t end = std::min(points.size(), begin + workers);
    if (workers == 1) {
      results[begin] = solve_point(points[begin]);
      continue;
    }
    std::vector<std::future<RunReport>> futures;
    for (std::size_t i = begin; i < end; ++i) {
      futures.push_back(std::async(std::launch::async, solve_point, std::cref(points[i])));
    }
    for (std::size_t i = begin; i < end; ++i) results[i] = futures[i - begin].get();
  }

  RunReport report;
  for (std::size_t i = 0; i < points.size(); ++i) {
    SweepPoint p;
    p.value = values[i];
    p.t_numeric = results[i].transmission->t_numeric;
    p.t_analytic = results[i].transmission_analytic;
    p.settle_steps = results[i].transmission->settle_steps;
    if (sink) sink->sweep_point(points[i], p);
    report.sweep.push_back(p);
    report.steps_run += results[i].steps_run;
    report.step_seconds += results[i].step_seconds;
    report.omega = results[i].omega;
    for (auto& w : results[i].warnings) report.warnings.push_back(std::move(w));
  }
  if (report.steps_run) {
    report.seconds_per_step = report.step_seconds / static_cast<double>(report.steps_run);
  }
  return report;
}

RunConfig packet_base() {
  RunConfig c;
  c.x_min = -20.0;
  c.x_max = 20.0;
  c.n_sites = 1000;
  c.t0 = 0.0;
  c.dt = 0.002;
  c.n_steps = 2000;
  c.packet_enabled = true;
  c.packet = PacketSpec{-10.0, 7.0, 1.0};
  c.potential_xb = 2.0;
  c.frame_stride = 250;
  c.interval_a = -2.0;
  c.interval_b = 2.0;
  c.abc_alpha1 = 24.0;
  c.abc_alpha2 = 25.0;
  return c;
}

RunConfig source_base() {
  RunConfig c;
  c.x_min = -10.0;
  c.x_max = 10.0;
  c.n_sites = 1000;
  c.t0 = 0.0;
  c.dt = 0.001;
  c.boundary = BoundaryMode::Abc;
  c.abc_alpha1 = 12.0;
  c.abc_alpha2 = 13.0;
  c.source_enabled = true;
  c.source.s0 = 5.0;
  c.source.p0 = 5.0;
  c.source.x = 0.0;
  return c;
}

std::vector<Preset> make_presets() {
  std::vector<Preset> presets;

  RunConfig fig1 = packet_base();
  fig1.potential = PotentialKind::SquareBarrier;
  presets.push_back({"fig1", "Gaussian packet on a square barrier, fixed (Dirichlet) ends", fig1});

  RunConfig fig2 = packet_base();
  fig2.potential = PotentialKind::SquareWell;
  presets.push_back({"fig2", "Gaussian packet on a square well, fixed (Dirichlet) ends", fig2});

  RunConfig fig3 = fig2;
  fig3.boundary = BoundaryMode::Abc;
  presets.push_back({"fig3", "Gaussian packet on a square well, absorbing ends", fig3});

  RunConfig fig4 = fig1;
  fig4.boundary = BoundaryMode::Abc;
  presets.push_back({"fig4", "Gaussian packet on a square barrier, absorbing ends", fig4});

  RunConfig fig5 = source_base();
  fig5.source.ramp = 4.0;
  fig5.n_steps = 40000;
  fig5.frame_stride = 4000;
  fig5.steady_a = -8.0;
  fig5.steady_b = 8.0;
  fig5.steady_exclusion = 2.0;
  presets.push_back({"fig5", "Constant-amplitude point source against the free-space plane wave",
                     fig5});

  RunConfig fig6 = source_base();
  fig6.source.ramp = 2.0;
  fig6.n_steps = 12000;
  fig6.frame_stride = 500;
  presets.push_back({"fig6", "Point source filling the domain while its amplitude ramps up", fig6});

  RunConfig fig7 = source_base();
  fig7.source.ramp = 2.0;
  fig7.source.x = -5.0;
  fig7.potential = PotentialKind::SquareBarrier;
  fig7.potential_v0 = 0.0;
  fig7.potential_xb = 0.5;
  fig7.n_steps = 15000;
  fig7.frame_stride = 15000;
  fig7.transmission = true;
  fig7.settle_max_steps = 100000;
  fig7.sweep = SweepSpec{"potential.v0", 0.0, 25.0, 15};
  presets.push_back({"fig7", "Plane-wave transmission through a square barrier versus V0", fig7});

  return presets;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config text

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& def : key_table()) keys.emplace_back(def.name);
  return keys;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  find_key(key).set(config, key, value);
}

std::string get_config_value(const RunConfig& config, std::string_view key) {
  return find_key(key).get(config);
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  // sweep.start/stop/count only apply once sweep.key is known, so keys are applied in
  // table order rather than file order.
  std::vector<std::pair<std::string, std::string>> entries;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      config_error("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    find_key(key);
    if (!seen.emplace(key).second) {
      config_error("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
    }
    entries.emplace_back(key, value);
  }
  for (const auto& def : key_table()) {
    for (const auto& [key, value] : entries) {
      if (key == def.name) def.set(base, key, value);
    }
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), std::move(base));
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& def : key_table()) {
    out += def.name;
    out += " = ";
    out += def.get(config);
    out += '\n';
  }
  return out;
}

void validate(const RunConfig& c) {
  if (!(c.x_max > c.x_min)) config_error("grid.x_max must exceed grid.x_min");
  if (c.n_sites < 3) config_error("grid.n_sites must be at least 3");
  if (!(c.dt > 0.0)) config_error("time.dt must be positive");
  if (c.frame_stride < 1) config_error("run.frame_stride must be at least 1");
  if (!c.packet_enabled && !c.source_enabled) {
    config_error("empty run: enable packet and/or source");
  }
  if (c.packet_enabled && !(c.packet.sigma0 > 0.0)) config_error("packet.sigma0 must be positive");
  if (c.boundary == BoundaryMode::Abc) {
    if (!(c.abc_alpha1 > 0.0) || !(c.abc_alpha2 > 0.0) || c.abc_alpha1 == c.abc_alpha2) {
      config_error("abc.alpha1 and abc.alpha2 must be positive and distinct");
    }
  }
  if (c.potential != PotentialKind::Free && !(c.potential_xb > 0.0)) {
    config_error("potential.xb must be positive");
  }
  if (c.strategy == Strategy::DenseInverse && c.n_sites > kDenseCap) {
    config_error("run.strategy = dense is limited to " + std::to_string(kDenseCap) + " sites");
  }
  if (c.source_enabled) {
    if (c.source.x < c.x_min || c.source.x > c.x_max) config_error("source.x lies outside the grid");
    if (c.source.ramp && !(*c.source.ramp > 0.0)) config_error("source.ramp must be positive");
    if (c.source.omega && !(*c.source.omega > 0.0)) config_error("source.omega must be positive");
  }
  if (c.interval_a.has_value() != c.interval_b.has_value() ||
      (c.interval_a && !(*c.interval_a < *c.interval_b))) {
    config_error("analysis.interval_a/b must both be set with a < b");
  }
  if (c.steady_a.has_value() != c.steady_b.has_value() ||
      (c.steady_a && !(*c.steady_a < *c.steady_b))) {
    config_error("analysis.steady_a/b must both be set with a < b");
  }
  if ((c.steady_a || c.transmission) && !c.source_enabled) {
    config_error("steady-state and transmission analysis require an enabled source");
  }
  if (c.transmission && !(resolved_omega(c) > 0.0)) {
    config_error("transmission analysis requires a positive drive frequency");
  }
  if (c.transmission && c.source.s0 == 0.0) config_error("transmission requires source.s0 != 0");
  if (c.sweep) {
    const KeyDef& def = find_key(c.sweep->key);
    if (!def.numeric || def.name.starts_with("sweep.")) {
      config_error("sweep.key must name a numeric key");
    }
    if (c.sweep->count < 1) config_error("sweep.count must be at least 1");
    if (!c.transmission) config_error("sweeps report transmission; set analysis.transmission");
  }
}

double resolved_omega(const RunConfig& c) {
  if (c.source.omega) return *c.source.omega;
  if (c.boundary == BoundaryMode::Abc) {
    return source_omega(c.source.p0,
                        abc_coefficients(c.abc_alpha1, c.abc_alpha2, Side::Right));
  }
  return 0.5 * c.source.p0 * c.source.p0;
}

double resolved_v0(const RunConfig& c) {
  if (c.potential_v0) return *c.potential_v0;
  const double p0 = c.packet_enabled ? c.packet.p0 : c.source.p0;
  return 0.5 * p0 * p0;
}

// ---------------------------------------------------------------------------
// Presets

const std::vector<Preset>& list_presets() {
  static const std::vector<Preset> presets = make_presets();
  return presets;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : list_presets()) {
    if (p.name == name) return p;
  }
  config_error("unknown preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Records

void JsonLinesWriter::header(const RunConfig& config) {
  out_ << json{{"type", "header"}, {"config", config_json(config)}}.dump() << '\n';
}

void JsonLinesWriter::frame(std::size_t step, double time, const WaveFunction& psi) {
  const auto& grid = psi.grid();
  std::vector<double> x(psi.size()), re(psi.size()), im(psi.size()), abs2(psi.size());
  for (std::size_t j = 0; j < psi.size(); ++j) {
    x[j] = grid.position(j);
    re[j] = psi[j].real();
    im[j] = psi[j].imag();
    abs2[j] = std::norm(psi[j]);
  }
  out_ << json{{"type", "frame"}, {"step", step}, {"time", time}, {"x", x},
               {"re", re},        {"im", im},     {"abs2", abs2}}
              .dump()
       << '\n';
}

void JsonLinesWriter::sweep_point(const RunConfig& config, const SweepPoint& point) {
  json rec{{"type", "sweep_point"},
           {"value", point.value},
           {"t_numeric", point.t_numeric},
           {"settle_steps", point.settle_steps}};
  if (config.potential != PotentialKind::Free) rec["v0"] = resolved_v0(config);
  rec["t_analytic"] = point.t_analytic ? json(*point.t_analytic) : json(nullptr);
  out_ << rec.dump() << '\n';
}

void JsonLinesWriter::summary(const RunReport& r) {
  json rec{{"type", "summary"},
           {"steps", r.steps_run},
           {"frames", r.frame_count},
           {"initial_norm", r.initial_norm},
           {"final_norm", r.final_norm},
           {"max_step_drift", r.max_step_drift},
           {"cumulative_drift", r.cumulative_drift},
           {"step_seconds", r.step_seconds},
           {"seconds_per_step", r.seconds_per_step},
           {"warnings", r.warnings}};
  if (r.omega) rec["omega"] = *r.omega;
  if (!r.interval_probability.empty()) {
    json series = json::array();
    for (const auto& [t, p] : r.interval_probability) series.push_back({t, p});
    rec["interval_probability"] = series;
  }
  if (r.steady_state_error) rec["steady_state_error"] = *r.steady_state_error;
  if (r.transmission) {
    rec["transmission"] = {{"t_numeric", r.transmission->t_numeric},
                           {"monitor_x", r.transmission->monitor_x},
                           {"settle_steps", r.transmission->settle_steps},
                           {"overshoot", r.transmission->overshoot}};
    if (r.transmission_analytic) rec["transmission"]["t_analytic"] = *r.transmission_analytic;
  }
  if (!r.sweep.empty()) rec["sweep_points"] = r.sweep.size();
  out_ << rec.dump() << '\n';
  out_.flush();
}

void JsonLinesWriter::error(std::string_view code, std::string_view message) {
  out_ << json{{"type", "error"}, {"code", code}, {"message", message}}.dump() << '\n';
  out_.flush();
}

RunReport run(const RunConfig& config, RecordSink* sink) {
  validate(config);
  if (sink) sink->header(config);
  RunReport report = config.sweep ? run_sweep(config, sink) : run_single(config, sink);
  if (sink) sink->summary(report);
  return report;
}

}  // namespace cnprop
