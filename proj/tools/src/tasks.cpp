#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "params.hpp"
#include "qds/cli/cli.hpp"
#include "qds/propagation.hpp"
#include "qds/serialization.hpp"
#include "qds/thermo.hpp"
#include "qds/unraveling.hpp"

namespace qds::cli {

namespace {

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

const std::vector<double>& require_grid(const Scenario& s) {
  if (!s.grid) throw ValidationError("task " + task_name(s.task) + " needs a grid");
  if (s.grid->front() < 0.0) throw ValidationError("grid times must be >= 0");
  return *s.grid;
}

const GklsGenerator& require_generator(const Model& m, Task task) {
  if (!m.generator) {
    throw ValidationError("task " + task_name(task) + " is not available for preset \"" + m.preset + "\"");
  }
  return *m.generator;
}

std::string extension(Format f) { return f == Format::kCsv ? "csv" : "json"; }

void check_task_fits(const Scenario& s, const Model& m) {
  switch (s.task) {
    case Task::kEvolve:
      if (!m.generator && !m.bloch_boltzmann) require_generator(m, s.task);
      require_grid(s);
      break;
    case Task::kUnravel:
    case Task::kThermoLedger:
      require_generator(m, s.task);
      require_grid(s);
      break;
    case Task::kDaviesBuild:
      if (!m.davies) throw ValidationError("task davies-build needs a Davies preset (davies-qubit)");
      break;
    case Task::kCpCheck:
      if (!s.options.contains("superoperator")) {
        require_generator(m, s.task);
        require_grid(s);
      }
      break;
    case Task::kSpinBosonReport:
      if (!m.spin_boson) throw ValidationError("task spinboson-report needs the spin-boson preset");
      break;
  }
}

// --- observables and states ---------------------------------------------------

Operator projector(Index d, Index i, Index j) {
  Operator a = Operator::Zero(d, d);
  a(i, j) = 1.0;
  return a;
}

NamedObservable named_observable(const std::string& name, Index d) {
  static const std::regex population("p([0-9]+)");
  static const std::regex coherence("coherence_([0-9])([0-9])");
  std::smatch match;
  if (name == "sigma1" || name == "sigma2" || name == "sigma3") {
    if (d != 2) throw ValidationError("observable " + name + " needs a two-level model");
    const Operator op = name == "sigma1" ? qubit::sigma1() : name == "sigma2" ? qubit::sigma2() : qubit::sigma3();
    return {name, op, false};
  }
  if (name == "n") return {name, fock::number(d), false};
  if (name == "trace") return {name, Operator::Identity(d, d), false};
  if (std::regex_match(name, match, population)) {
    const Index k = std::stol(match[1]);
    if (k < 1 || k > d) throw ValidationError("observable " + name + " is outside the model's levels");
    return {name, projector(d, k - 1, k - 1), false};
  }
  if (std::regex_match(name, match, coherence)) {
    const Index i = std::stol(match[1]);
    const Index j = std::stol(match[2]);
    if (i < 1 || j < 1 || i > d || j > d) {
      throw ValidationError("observable " + name + " is outside the model's levels");
    }
    // Tr(rho |j><i|) = <i|rho|j>
    return {name, projector(d, j - 1, i - 1), i != j};
  }
  throw ValidationError("unknown observable \"" + name + "\"");
}

std::complex<double> expectation(const Operator& rho, const Operator& a) { return (rho * a).trace(); }

// --- output -------------------------------------------------------------------

std::filesystem::path resolve_output(const Scenario& s, const RunOptions& options) {
  std::filesystem::path p = s.output.path.empty()
                                ? std::filesystem::path(task_name(s.task) + "." + extension(s.output.format))
                                : std::filesystem::path(s.output.path);
  if (p.is_relative()) p = options.out_dir / p;
  return p;
}

void write_artifact(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::json real_matrix_json(const RealMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

struct Artifact {
  std::string content;
  nlohmann::json summary = nlohmann::json::object();
};

// --- task options -------------------------------------------------------------

struct EvolveOptions {
  std::string method;
  double step = 0.0;
};

EvolveOptions evolve_options(const Scenario& s) {
  Params opt(s.options, "options of task evolve");
  EvolveOptions o{opt.text("method", "exact"), opt.number("step", 1e-3)};
  opt.finish();
  if (o.method != "exact" && o.method != "rk4") throw ValidationError("options.method must be \"exact\" or \"rk4\"");
  if (!(o.step > 0.0)) throw ValidationError("options.step must be > 0");
  return o;
}

TrajectoryConfig unravel_options(const Scenario& s) {
  Params opt(s.options, "options of task unravel");
  TrajectoryConfig cfg;
  cfg.dt = opt.number("dt", 1e-3);
  const Index n_traj = opt.integer("n_traj", 1000);
  const Index threads = opt.integer("threads", 0);
  opt.finish();
  if (!(cfg.dt > 0.0)) throw ValidationError("options.dt must be > 0");
  if (n_traj < 1) throw ValidationError("options.n_traj must be >= 1");
  if (threads < 0) throw ValidationError("options.threads must be >= 0");
  cfg.n_traj = static_cast<std::size_t>(n_traj);
  cfg.threads = static_cast<unsigned>(threads);
  return cfg;
}

struct CpCheckOptions {
  double tol = 0.0;
  std::optional<Superoperator> map;
};

CpCheckOptions cp_check_options(const Scenario& s) {
  Params opt(s.options, "options of task cp-check");
  CpCheckOptions o;
  o.tol = opt.number("tol", 1e-10);
  if (const nlohmann::json* user = opt.raw("superoperator")) o.map = Superoperator(matrix_from_json(*user));
  opt.finish();
  if (!(o.tol >= 0.0)) throw ValidationError("options.tol must be >= 0");
  return o;
}

struct LedgerSetup {
  LedgerOptions options;
  std::function<GklsGenerator(double)> generator;
};

LedgerSetup thermo_ledger_options(const Scenario& s, const Model& m) {
  Params opt(s.options, "options of task thermo-ledger");
  LedgerSetup setup;
  LedgerOptions& lo = setup.options;
  lo.step = opt.number("step", 1e-3);
  if (!(lo.step > 0.0)) throw ValidationError("options.step must be > 0");
  if (auto temperature = opt.optional_number("temperature")) {
    lo.temperature = *temperature;
  } else if (m.beta) {
    lo.temperature = 1.0 / *m.beta;
  }
  const nlohmann::json* drive = opt.raw("drive");
  opt.finish();

  if (drive == nullptr) {
    const GklsGenerator g = require_generator(m, s.task);
    setup.generator = [g](double) { return g; };
    lo.hamiltonian_derivative = [d = m.dim](double) { return Operator(Operator::Zero(d, d)); };
    return setup;
  }
  if (!drive->is_object()) throw ValidationError("options.drive must be an object");
  Params dp(*drive, "options.drive");
  const std::string parameter = dp.text("parameter", "");
  const double to = dp.number("to", 0.0);
  const double duration = dp.number("duration", 1.0);
  if (!m.params.contains(parameter) || !m.params[parameter].is_number()) {
    throw ValidationError("options.drive.parameter must name a numeric parameter of the preset");
  }
  const double from = dp.number("from", m.params[parameter].get<double>());
  dp.finish();
  if (!drive->contains("to")) throw ValidationError("options.drive needs \"to\"");
  if (!(duration > 0.0)) throw ValidationError("options.drive.duration must be > 0");
  for (double value : {from, to}) {
    nlohmann::json p = m.params;
    p[parameter] = value;
    require_generator(build_model(m.preset, p), s.task);
  }
  // cosine ramp from -> to over [0, duration], then held
  setup.generator = [preset = m.preset, params = m.params, parameter, from, to, duration](double t) {
    const double x = std::clamp(t / duration, 0.0, 1.0);
    nlohmann::json p = params;
    p[parameter] = from + 0.5 * (to - from) * (1.0 - std::cos(M_PI * x));
    return *build_model(preset, p).generator;
  };
  return setup;
}

double spinboson_options(const Scenario& s) {
  Params opt(s.options, "options of task spinboson-report");
  const double quad_tol = opt.number("quad_tol", 1e-8);
  opt.finish();
  if (!(quad_tol > 0.0)) throw ValidationError("options.quad_tol must be > 0");
  return quad_tol;
}

// --- tasks --------------------------------------------------------------------

Artifact run_evolve(const Scenario& s, const Model& m) {
  const auto [method, step] = evolve_options(s);

  const auto& grid = require_grid(s);
  const auto observables = resolve_observables(s.observables, m);
  const DensityMatrix rho0 = resolve_initial_state(s.initial_state, m);

  std::vector<Operator> states;
  double worst_leakage = 0.0;
  if (m.bloch_boltzmann) {
    const auto& bb = *m.bloch_boltzmann;
    const double share = 1.0 / (static_cast<double>(bb.velocities.size()) * bb.dv);
    models::VelocityState v(bb.velocities.size(), rho0.matrix() * share);
    double now = 0.0;
    for (double t : grid) {
      const double span = t - now;
      const auto n = static_cast<long>(std::ceil(span / step - 1e-12));
      for (long k = 0; k < n; ++k) v = models::bloch_boltzmann_step(bb, v, span / static_cast<double>(n));
      now = t;
      Operator reduced = Operator::Zero(bb.n_levels, bb.n_levels);
      for (const auto& block : v) reduced += block * bb.dv;
      states.push_back(reduced);
    }
  } else {
    const Superoperator l = generator_superoperator(*m.generator);
    DensityMatrix rho = rho0;
    double now = 0.0;
    for (double t : grid) {
      if (method == "exact") {
        rho = evolve_exact(l, t, rho0);
      } else {
        rho = evolve_rk4(l, t - now, rho, step);
        now = t;
      }
      if (m.preset == "oscillator") {
        worst_leakage = std::max(worst_leakage, models::truncation_leakage(rho).top_population);
      }
      states.push_back(rho.matrix());
    }
  }

  Artifact a;
  if (s.output.format == Format::kCsv) {
    std::ostringstream csv;
    csv << "t,observable_name,value\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
      for (const auto& o : observables) {
        const Complex v = expectation(states[k], o.matrix);
        if (o.complex_valued) {
          csv << num(grid[k]) << ',' << o.name << ".re," << num(v.real()) << '\n';
          csv << num(grid[k]) << ',' << o.name << ".im," << num(v.imag()) << '\n';
        } else {
          csv << num(grid[k]) << ',' << o.name << ',' << num(v.real()) << '\n';
        }
      }
    }
    a.content = csv.str();
  } else {
    nlohmann::json j;
    j["times"] = grid;
    nlohmann::json obs = nlohmann::json::object();
    for (const auto& o : observables) {
      std::vector<double> re;
      std::vector<double> im;
      for (const auto& rho : states) {
        const Complex v = expectation(rho, o.matrix);
        re.push_back(v.real());
        im.push_back(v.imag());
      }
      obs[o.name] = o.complex_valued ? nlohmann::json{{"re", re}, {"im", im}} : nlohmann::json(re);
    }
    j["observables"] = obs;
    a.content = j.dump(2) + "\n";
  }
  a.summary["points"] = grid.size();
  a.summary["method"] = m.bloch_boltzmann ? "rk4" : method;
  if (m.preset == "oscillator") {
    a.summary["max_truncation_leakage"] = worst_leakage;
    a.summary["truncation_valid"] = worst_leakage <= models::kLeakageLimit;
  }
  return a;
}

Artifact run_unravel(const Scenario& s, const Model& m, std::uint64_t seed) {
  TrajectoryConfig cfg = unravel_options(s);
  cfg.seed = seed;

  const auto& grid = require_grid(s);
  const EnsembleEstimate est =
      ensemble_density(require_generator(m, s.task), resolve_initial_state(s.initial_state, m), grid, cfg);
  const Index d = m.dim;

  Artifact a;
  if (s.output.format == Format::kCsv) {
    std::ostringstream csv;
    csv << 't';
    for (Index i = 1; i <= d; ++i)
      for (Index j = 1; j <= d; ++j) {
        const std::string ij = std::to_string(i) + "_" + std::to_string(j);
        csv << ",entry_re_" << ij << ",entry_im_" << ij << ",se_" << ij;
      }
    csv << '\n';
    for (std::size_t k = 0; k < est.times.size(); ++k) {
      csv << num(est.times[k]);
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
          csv << ',' << num(est.mean[k](i, j).real()) << ',' << num(est.mean[k](i, j).imag()) << ','
              << num(est.standard_error[k](i, j));
        }
      csv << '\n';
    }
    a.content = csv.str();
  } else {
    nlohmann::json j;
    j["times"] = est.times;
    j["mean"] = nlohmann::json::array();
    j["standard_error"] = nlohmann::json::array();
    for (std::size_t k = 0; k < est.times.size(); ++k) {
      j["mean"].push_back(matrix_to_json(est.mean[k]));
      j["standard_error"].push_back(real_matrix_json(est.standard_error[k]));
    }
    a.content = j.dump(2) + "\n";
  }
  a.summary["points"] = est.times.size();
  a.summary["n_traj"] = cfg.n_traj;
  a.summary["seed"] = seed;
  return a;
}

Artifact run_davies_build(const Scenario& s, const Model& m) {
  Params(s.options, "options of task davies-build").finish();
  const DaviesGenerator& dg = *m.davies;
  const BlockSplitReport split =
      decoherence_block_split(generator_superoperator(dg.generator), dg.generator.hamiltonian(), m.beta);
  const ErgodicityReport ergodic = ergodicity_check(dg.decomposition);

  Artifact a;
  if (s.output.format == Format::kCsv) {
    std::ostringstream csv;
    csv << "from,to,rate\n";
    for (Index b = 0; b < split.rates.cols(); ++b)
      for (Index r = 0; r < split.rates.rows(); ++r) {
        if (r != b) csv << b + 1 << ',' << r + 1 << ',' << num(split.rates(r, b)) << '\n';
      }
    a.content = csv.str();
  } else {
    nlohmann::json j;
    j["generator"] = generator_to_json(dg.generator);
    j["channels"] = nlohmann::json::array();
    for (const auto& c : dg.channels) {
      j["channels"].push_back({{"omega", c.omega}, {"pure_decoherence", c.pure_decoherence}, {"rate", c.rate}});
    }
    j["bohr_frequencies"] = dg.decomposition.frequencies;
    j["ergodic"] = ergodic.ergodic;
    j["commutant_dimension"] = ergodic.commutant_dimension;
    j["populations_decoupled"] = split.decoupled;
    j["pauli_rates"] = real_matrix_json(split.rates);
    j["stationary_populations"] = std::vector<double>(split.stationary_populations.data(),
                                                      split.stationary_populations.data() +
                                                          split.stationary_populations.size());
    if (split.detailed_balance) j["detailed_balance"] = *split.detailed_balance;
    a.content = j.dump(2) + "\n";
  }
  a.summary["channels"] = dg.channels.size();
  a.summary["ergodic"] = ergodic.ergodic;
  if (split.detailed_balance) a.summary["detailed_balance"] = *split.detailed_balance;
  return a;
}

struct CpRow {
  std::optional<double> t;
  CpReport report;
};

Artifact run_cp_check(const Scenario& s, const Model& m) {
  const CpCheckOptions o = cp_check_options(s);
  const double tol = o.tol;

  std::vector<CpRow> rows;
  if (o.map) {
    rows.push_back({std::nullopt, is_completely_positive(*o.map, tol)});
  } else {
    const Superoperator l = generator_superoperator(require_generator(m, s.task));
    for (double t : require_grid(s)) rows.push_back({t, is_completely_positive(propagator_exact(l, t), tol)});
  }

  Artifact a;
  if (s.output.format == Format::kCsv) {
    std::ostringstream csv;
    csv << "t,min_eigenvalue,choi_norm,completely_positive\n";
    for (const auto& r : rows) {
      csv << (r.t ? num(*r.t) : "") << ',' << num(r.report.min_eigenvalue) << ',' << num(r.report.choi_norm)
          << ',' << (r.report.completely_positive ? "true" : "false") << '\n';
    }
    a.content = csv.str();
  } else {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : rows) {
      j.push_back({{"t", r.t ? nlohmann::json(*r.t) : nlohmann::json()},
                   {"min_eigenvalue", r.report.min_eigenvalue},
                   {"choi_norm", r.report.choi_norm},
                   {"completely_positive", r.report.completely_positive}});
    }
    a.content = nlohmann::json{{"checks", j}}.dump(2) + "\n";
  }
  const auto worst = std::min_element(rows.begin(), rows.end(), [](const CpRow& x, const CpRow& y) {
    return x.report.min_eigenvalue / std::max(1.0, x.report.choi_norm) <
           y.report.min_eigenvalue / std::max(1.0, y.report.choi_norm);
  });
  a.summary["checks"] = rows.size();
  a.summary["min_eigenvalue"] = worst->report.min_eigenvalue;
  a.summary["choi_norm"] = worst->report.choi_norm;
  a.summary["completely_positive"] =
      std::all_of(rows.begin(), rows.end(), [](const CpRow& r) { return r.report.completely_positive; });
  if (worst->t) a.summary["worst_t"] = *worst->t;
  return a;
}

Artifact run_thermo_ledger(const Scenario& s, const Model& m) {
  LedgerSetup setup = thermo_ledger_options(s, m);
  const auto& grid = require_grid(s);
  const DensityMatrix rho0 = resolve_initial_state(s.initial_state, m);
  const Schedule schedule(setup.generator, {0.0}, ScheduleMode::kContinuous);
  const ThermoLedger ledger = first_law_ledger(schedule, rho0, grid, setup.options);

  Artifact a;
  if (s.output.format == Format::kCsv) {
    std::ostringstream csv;
    ledger.write_csv(csv);
    a.content = csv.str();
  } else {
    auto column = [](const std::vector<double>& v) {
      nlohmann::json c = nlohmann::json::array();
      for (double x : v) c.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json());
      return c;
    };
    nlohmann::json j = {{"t", column(ledger.t)},         {"E", column(ledger.E)}, {"W", column(ledger.W)},
                        {"Q", column(ledger.Q)},         {"S", column(ledger.S)}, {"sigma", column(ledger.sigma)},
                        {"closure_defect", column(ledger.closure_defect)}};
    a.content = j.dump(2) + "\n";
  }
  a.summary["points"] = ledger.t.size();
  a.summary["max_closure_defect"] = ledger.max_closure_defect();
  a.summary["work"] = ledger.W.back();
  a.summary["heat"] = ledger.Q.back();
  return a;
}

Artifact run_spinboson_report(const Scenario& s, const Model& m) {
  const models::DephasingFeasibility r = models::dephasing_feasibility(*m.spin_boson, spinboson_options(s));
  nlohmann::json j;
  j["norm_g_sq"] = r.overlap.norm_g_sq ? nlohmann::json(*r.overlap.norm_g_sq) : nlohmann::json();
  j["overlap"] = r.overlap.overlap;
  j["error_estimate"] = std::isfinite(r.overlap.error_estimate) ? nlohmann::json(r.overlap.error_estimate)
                                                                 : nlohmann::json();
  j["markov_dephasing_rate"] = r.markov_dephasing_rate;
  j["cloud_norm_finite"] = r.cloud_norm_finite;
  j["markovian_dephasing"] = r.markovian_dephasing;
  j["incompatible"] = r.incompatible;
  j["verdict"] = r.verdict;

  Artifact a;
  if (s.output.format == Format::kCsv) {
    std::ostringstream csv;
    csv << "key,value\n";
    csv << "norm_g_sq," << (r.overlap.norm_g_sq ? num(*r.overlap.norm_g_sq) : "inf") << '\n';
    csv << "overlap," << num(r.overlap.overlap) << '\n';
    csv << "error_estimate," << num(r.overlap.error_estimate) << '\n';
    csv << "markov_dephasing_rate," << num(r.markov_dephasing_rate) << '\n';
    csv << "cloud_norm_finite," << (r.cloud_norm_finite ? "true" : "false") << '\n';
    csv << "markovian_dephasing," << (r.markovian_dephasing ? "true" : "false") << '\n';
    csv << "incompatible," << (r.incompatible ? "true" : "false") << '\n';
    csv << "verdict,\"" << r.verdict << "\"\n";
    a.content = csv.str();
  } else {
    a.content = j.dump(2) + "\n";
  }
  a.summary["incompatible"] = r.incompatible;
  a.summary["cloud_norm_finite"] = r.cloud_norm_finite;
  return a;
}

}  // namespace

std::vector<NamedObservable> resolve_observables(const nlohmann::json& spec, const Model& m) {
  const Index d = m.dim;
  std::vector<NamedObservable> out;
  if (spec.is_null() || spec.empty()) {
    if (d == 2) {
      for (const char* name : {"p1", "p2", "coherence_12"}) out.push_back(named_observable(name, d));
    } else {
      out.push_back(named_observable("n", d));
    }
    return out;
  }
  if (!spec.is_array()) throw ValidationError("observables must be an array");
  for (const auto& item : spec) {
    if (item.is_string()) {
      out.push_back(named_observable(item.get<std::string>(), d));
      continue;
    }
    if (!item.is_object() || !item.contains("name") || !item["name"].is_string() || !item.contains("matrix")) {
      throw ValidationError("custom observables need {\"name\": ..., \"matrix\": ...}");
    }
    const Operator a = matrix_from_json(item["matrix"]);
    if (a.rows() != d) throw DimensionError("observable " + item["name"].get<std::string>() + " has the wrong dimension");
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) {
      throw ValidationError("observable " + item["name"].get<std::string>() + " is not hermitian");
    }
    out.push_back({item["name"].get<std::string>(), a, false});
  }
  return out;
}

DensityMatrix resolve_initial_state(const nlohmann::json& spec, const Model& m) {
  const Index d = m.dim;
  if (spec.is_null()) return DensityMatrix::basis_state(d, 0);
  if (spec.is_string()) {
    const auto name = spec.get<std::string>();
    if (name == "ground") return DensityMatrix::basis_state(d, 0);
    if (name == "excited") return DensityMatrix::basis_state(d, d - 1);
    if (name == "maximally-mixed") return DensityMatrix::maximally_mixed(d);
    if (name == "plus") return DensityMatrix(Operator(Operator::Constant(d, d, 1.0 / static_cast<double>(d))));
    throw ValidationError("unknown initial state \"" + name + "\"");
  }
  if (!spec.is_object()) throw ValidationError("initial_state must be a name or an object");
  if (spec.contains("level")) {
    if (!spec["level"].is_number_integer()) throw ValidationError("initial_state.level must be an integer");
    const Index k = spec["level"].get<Index>();
    if (k < 1 || k > d) throw ValidationError("initial_state.level is outside the model's levels");
    return DensityMatrix::basis_state(d, k - 1);
  }
  if (spec.contains("coherent") || spec.contains("thermal")) {
    if (m.preset != "oscillator") throw ValidationError("coherent and thermal states need the oscillator preset");
    if (spec.contains("coherent")) {
      const auto& c = spec["coherent"];
      if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
        throw ValidationError("initial_state.coherent must be [re, im]");
      }
      return models::OscillatorInitialState::coherent({c[0].get<double>(), c[1].get<double>()}).truncated(d);
    }
    if (!spec["thermal"].is_number()) throw ValidationError("initial_state.thermal must be a number");
    return models::OscillatorInitialState::thermal(spec["thermal"].get<double>()).truncated(d);
  }
  const Operator rho = matrix_from_json(spec);
  if (rho.rows() != d) throw DimensionError("initial_state has the wrong dimension");
  return DensityMatrix(rho);
}

void validate_scenario(const Scenario& s) {
  const Model m = build_model(s.preset, s.params);
  check_task_fits(s, m);
  if (s.task == Task::kEvolve || s.task == Task::kUnravel || s.task == Task::kThermoLedger) {
    resolve_initial_state(s.initial_state, m);
  }
  switch (s.task) {
    case Task::kEvolve:
      evolve_options(s);
      resolve_observables(s.observables, m);
      break;
    case Task::kUnravel: unravel_options(s); break;
    case Task::kDaviesBuild: Params(s.options, "options of task davies-build").finish(); break;
    case Task::kCpCheck: cp_check_options(s); break;
    case Task::kThermoLedger: thermo_ledger_options(s, m); break;
    case Task::kSpinBosonReport: spinboson_options(s); break;
  }
}

RunResult run_scenario(const Scenario& s, const RunOptions& options) {
  const Model m = build_model(s.preset, s.params);
  check_task_fits(s, m);
  const std::uint64_t seed = options.seed.value_or(s.seed.value_or(0));

  Artifact a;
  switch (s.task) {
    case Task::kEvolve: a = run_evolve(s, m); break;
    case Task::kUnravel: a = run_unravel(s, m, seed); break;
    case Task::kDaviesBuild: a = run_davies_build(s, m); break;
    case Task::kCpCheck: a = run_cp_check(s, m); break;
    case Task::kThermoLedger: a = run_thermo_ledger(s, m); break;
    case Task::kSpinBosonReport: a = run_spinboson_report(s, m); break;
  }

  RunResult result;
  result.artifact = resolve_output(s, options);
  write_artifact(result.artifact, a.content);
  result.summary = a.summary;
  result.summary["status"] = "ok";
  result.summary["task"] = task_name(s.task);
  result.summary["preset"] = s.preset;
  result.summary["output"] = result.artifact.string();

  if (s.task == Task::kCpCheck && !a.summary["completely_positive"].get<bool>()) {
    nlohmann::json details = a.summary;
    details["output"] = result.artifact.string();
    throw ReportedViolation("map is not completely positive", details);
  }
  return result;
}

std::pair<int, nlohmann::json> describe_error(const std::exception& e) {
  auto object = [&](int code, const char* kind) {
    return std::make_pair(code, nlohmann::json{{"status", "error"}, {"kind", kind}, {"exit_code", code},
                                               {"message", e.what()}});
  };
  if (const auto* r = dynamic_cast<const ReportedViolation*>(&e)) {
    auto out = object(kExitContract, "contract");
    out.second["details"] = r->details();
    return out;
  }
  if (dynamic_cast<const UnknownPreset*>(&e)) return object(kExitUnknownPreset, "unknown-preset");
  if (dynamic_cast<const IoError*>(&e)) return object(kExitIo, "io");
  if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const nlohmann::json::exception*>(&e)) {
    return object(kExitValidation, "validation");
  }
  if (dynamic_cast<const PreconditionError*>(&e)) return object(kExitValidation, "precondition");
  if (dynamic_cast<const ContractViolation*>(&e)) return object(kExitContract, "contract");
  return object(kExitIo, "internal");
}

}  // namespace qds::cli
