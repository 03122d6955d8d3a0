#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "params.hpp"
#include "qds/cli/cli.hpp"
#include "qds/serialization.hpp"

namespace qds::cli {

namespace {

Model two_level(const nlohmann::json& given) {
  Params p(given, "preset \"two-level\"");
  models::TwoLevelParams tl;
  tl.omega = p.number("omega", 1.0);
  tl.gamma_down = p.number("gamma_down", 1.0);
  tl.gamma_up = p.number("gamma_up", 0.0);
  tl.delta = p.number("delta", 0.0);
  const std::string conv = p.text("convention", "coherence-rate");
  if (conv == "coherence-rate") {
    tl.convention = models::DephasingConvention::kCoherenceRate;
  } else if (conv == "double-commutator") {
    tl.convention = models::DephasingConvention::kDoubleCommutator;
  } else {
    throw p.error("convention", "must be \"coherence-rate\" or \"double-commutator\"");
  }
  Model m;
  m.params = p.finish();
  m.dim = 2;
  m.generator = models::two_level_generator(tl);
  return m;
}

Model oscillator(const nlohmann::json& given) {
  Params p(given, "preset \"oscillator\"");
  models::OscillatorParams op;
  op.omega = p.number("omega", 1.0);
  op.gamma_down = p.number("gamma_down", 1.0);
  op.gamma_up = p.number("gamma_up", 0.0);
  op.n_trunc = p.integer("n_trunc", 40);
  Model m;
  m.params = p.finish();
  m.dim = op.n_trunc;
  m.generator = models::oscillator_generator(op);
  return m;
}

Model kick_ring(const nlohmann::json& given) {
  Params p(given, "preset \"kick-ring\"");
  models::KickModelParams kp;
  kp.lattice_size = p.integer("lattice_size", 8);
  if (const auto* rates = p.raw("kick_rates")) {
    if (!rates->is_object()) throw p.error("kick_rates", "must map momentum index m to a rate");
    for (const auto& [key, value] : rates->items()) {
      int m = 0;
      try {
        std::size_t used = 0;
        m = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw p.error("kick_rates", "keys must be integers, got \"" + key + "\"");
      }
      if (!value.is_number()) throw p.error("kick_rates", "values must be numbers");
      kp.kick_rates[m] = value.get<double>();
    }
  } else {
    kp.kick_rates = {{1, 0.5}, {-1, 0.5}};
  }
  nlohmann::json rates_json = nlohmann::json::object();
  for (const auto& [m, rate] : kp.kick_rates) rates_json[std::to_string(m)] = rate;
  p.store("kick_rates", rates_json);
  if (auto mass = p.optional_number("mass")) kp.mass = *mass;
  if (const auto* pot = p.raw("potential")) {
    if (!pot->is_array()) throw p.error("potential", "must be an array of numbers");
    RealVector v(static_cast<Index>(pot->size()));
    for (std::size_t k = 0; k < pot->size(); ++k) {
      if (!(*pot)[k].is_number()) throw p.error("potential", "must be an array of numbers");
      v(static_cast<Index>(k)) = (*pot)[k].get<double>();
    }
    kp.potential = v;
    p.store("potential", *pot);
  }
  Model m;
  m.params = p.finish();
  m.dim = kp.lattice_size;
  m.generator = models::kick_decoherence_generator(kp);
  return m;
}

Model davies_qubit(const nlohmann::json& given) {
  Params p(given, "preset \"davies-qubit\"");
  const double omega = p.number("omega", 1.0);
  const double lambda = p.number("lambda", 0.5);
  const double beta = p.number("beta", 1.0);
  const std::string spectral = p.text("spectral", "lorentzian");
  std::map<std::string, double> sp;
  if (const auto* given_sp = p.raw("spectral_params")) {
    if (!given_sp->is_object()) throw p.error("spectral_params", "must be an object");
    for (const auto& [key, value] : given_sp->items()) {
      if (!value.is_number()) throw p.error("spectral_params", "values must be numbers");
      sp[key] = value.get<double>();
    }
  } else if (spectral == "lorentzian") {
    sp = {{"amplitude", 1.0}, {"tau", 1.0}};
  } else if (spectral == "ohmic-cubed-exp") {
    sp = {{"amplitude", 1.0}, {"omega_c", 1.0}};
  } else if (spectral == "flat") {
    sp = {{"value", 1.0}};
  }
  p.store("spectral_params", sp);
  if (!(beta > 0.0)) throw p.error("beta", "must be > 0");
  auto with_beta = sp;
  with_beta["beta"] = beta;
  SpectralFunction r = [&] {
    try {
      return spectral_preset(spectral, with_beta);
    } catch (const std::out_of_range&) {
      throw UnknownPreset("unknown spectral preset \"" + spectral + "\"");
    }
  }();
  const Operator h = 0.5 * omega * qubit::sigma3();
  Model m;
  m.params = p.finish();
  m.dim = 2;
  m.beta = beta;
  m.davies = build_davies(h, {qubit::sigma1()}, r, lambda);
  m.generator = m.davies->generator;
  return m;
}

std::vector<Operator> bb_basis(const nlohmann::json* spec, Index n, Params& p) {
  if (spec != nullptr && !spec->is_string()) {
    if (!spec->is_array() || spec->empty()) throw p.error("basis", "must be a name or a non-empty array of matrices");
    std::vector<Operator> out;
    for (const auto& mj : *spec) {
      out.push_back(matrix_from_json(mj));
      if (out.back().rows() != n) throw DimensionError("basis operators must be n_levels x n_levels");
    }
    p.store("basis", *spec);
    return out;
  }
  const std::string name = spec ? spec->get<std::string>() : (n == 2 ? "pauli" : "matrix-units");
  p.store("basis", name);
  if (name == "matrix-units") return models::matrix_unit_basis(n);
  if (name == "pauli") {
    if (n != 2) throw p.error("basis", "\"pauli\" needs n_levels = 2");
    return {qubit::sigma1(), qubit::sigma2(), qubit::sigma3()};
  }
  throw p.error("basis", "must be \"pauli\", \"matrix-units\" or an array of matrices");
}

Model bloch_boltzmann(const nlohmann::json& given) {
  Params p(given, "preset \"bloch-boltzmann-discrete\"");
  models::BlochBoltzmannDiscrete bb;
  bb.n_levels = p.integer("n_levels", 2);
  if (bb.n_levels < 1) throw p.error("n_levels", "must be >= 1");
  bb.dv = p.number("dv", 1.0);
  if (!(bb.dv > 0.0)) throw p.error("dv", "must be > 0");
  if (const auto* v = p.raw("velocities")) {
    if (!v->is_array() || v->empty()) throw p.error("velocities", "must be a non-empty array");
    for (const auto& x : *v) {
      if (!x.is_number()) throw p.error("velocities", "must contain numbers");
      bb.velocities.push_back(x.get<double>());
    }
  } else {
    bb.velocities = {0.0, 1.0};
  }
  p.store("velocities", bb.velocities);
  bb.basis = bb_basis(p.raw("basis"), bb.n_levels, p);
  const std::size_t nv = bb.velocities.size();
  const auto nb = static_cast<Index>(bb.basis.size());

  if (const auto* d = p.raw("drift")) {
    if (!d->is_array() || d->size() != nv) throw p.error("drift", "needs one row per velocity");
    for (const auto& row : *d) {
      if (!row.is_array() || static_cast<Index>(row.size()) != nb) {
        throw p.error("drift", "rows need one coefficient per basis operator");
      }
      std::vector<double> r;
      for (const auto& x : row) {
        if (!x.is_number()) throw p.error("drift", "must contain numbers");
        r.push_back(x.get<double>());
      }
      bb.drift.push_back(r);
    }
  } else {
    bb.drift.assign(nv, std::vector<double>(static_cast<std::size_t>(nb), 0.0));
  }
  p.store("drift", bb.drift);

  if (const auto* k = p.raw("kernel")) {
    if (!k->is_array() || k->size() != nv) throw p.error("kernel", "needs one row per velocity");
    bb.kernel.assign(nv, std::vector<Matrix>(nv, Matrix::Zero(nb, nb)));
    for (std::size_t i = 0; i < nv; ++i) {
      const auto& row = (*k)[i];
      if (!row.is_array() || row.size() != nv) throw p.error("kernel", "rows need one block per velocity");
      for (std::size_t j = 0; j < nv; ++j) {
        if (!row[j].is_null()) bb.kernel[i][j] = matrix_from_json(row[j]);
      }
    }
    p.store("kernel", *k);
  } else {
    bb.kernel.assign(nv, std::vector<Matrix>(nv, Matrix::Zero(nb, nb)));
    nlohmann::json kj = nlohmann::json::array();
    for (std::size_t i = 0; i < nv; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t j = 0; j < nv; ++j) {
        if (i != j) bb.kernel[i][j] = 0.2 * Matrix::Identity(nb, nb);
        row.push_back(matrix_to_json(bb.kernel[i][j]));
      }
      kj.push_back(row);
    }
    p.store("kernel", kj);
  }
  bb.validate();
  Model m;
  m.params = p.finish();
  m.dim = bb.n_levels;
  m.bloch_boltzmann = std::move(bb);
  return m;
}

Model spin_boson(const nlohmann::json& given) {
  Params p(given, "preset \"spin-boson\"");
  models::SpinBosonCoupling c;
  c.lambda = p.number("lambda", 0.5);
  c.s = p.number("s", 2.0);
  c.omega_c = p.number("omega_c", 1.0);
  const double s = c.s;
  const double wc = c.omega_c;
  // |f|^2 = omega^s e^{-2 omega / omega_c}
  c.f = [s, wc](double w) { return Complex(std::pow(w, 0.5 * s) * std::exp(-w / wc)); };
  Model m;
  m.params = p.finish();
  m.dim = 2;
  m.spin_boson = std::move(c);
  return m;
}

struct Entry {
  std::string doc;
  std::function<Model(const nlohmann::json&)> build;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> r = {
      {"bloch-boltzmann-discrete",
       {"discrete-velocity Bloch-Boltzmann equation; params {n_levels=2, velocities=[0,1], dv=1, "
        "basis=pauli|matrix-units|[matrices], drift=[[h_a]], kernel=[[matrix|null]]}",
        bloch_boltzmann}},
      {"davies-qubit",
       {"weak-coupling qubit H = (omega/2) sigma3, coupling sigma1; params {omega=1, lambda=0.5, "
        "beta=1, spectral=lorentzian, spectral_params={amplitude=1, tau=1}}",
        davies_qubit}},
      {"kick-ring",
       {"momentum-kick decoherence on an L-site ring; params {lattice_size=8, "
        "kick_rates={\"1\":0.5,\"-1\":0.5}, mass?, potential?}",
        kick_ring}},
      {"oscillator",
       {"damped and pumped oscillator on a truncated Fock space; params {omega=1, gamma_down=1, "
        "gamma_up=0, n_trunc=40}",
        oscillator}},
      {"spin-boson",
       {"pure-dephasing spin-boson with |f|^2 = omega^s e^{-2 omega/omega_c}; params {lambda=0.5, s=2, "
        "omega_c=1}",
        spin_boson}},
      {"two-level",
       {"two-level system with damping, pumping and dephasing; params {omega=1, gamma_down=1, "
        "gamma_up=0, delta=0, convention=coherence-rate|double-commutator}",
        two_level}},
  };
  return r;
}

}  // namespace

std::vector<PresetInfo> model_preset_catalog() {
  std::vector<PresetInfo> out;
  for (const auto& [name, entry] : registry()) out.push_back({name, entry.doc});
  return out;
}

Model build_model(const std::string& preset, const nlohmann::json& params) {
  const auto it = registry().find(preset);
  if (it == registry().end()) throw UnknownPreset("unknown model preset \"" + preset + "\"");
  if (!params.is_object()) throw ValidationError("model.params must be an object");
  Model m = it->second.build(params);
  m.preset = preset;
  return m;
}

}  // namespace qds::cli
