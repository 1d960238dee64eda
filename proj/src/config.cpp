#include "mbloch/config.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

#include "mbloch/errors.hpp"

namespace mbloch::cli {
namespace {

using nlohmann::json;

void only_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ValidationError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ValidationError(std::string(where) + ": unknown key '" + key + "'");
  }
}

double number(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key)) throw ValidationError(std::string(where) + ": missing '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(std::string(where) + ": '" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(std::string(where) + ": '" + key + "' must be finite");
  return x;
}

double number_or(const json& obj, const char* key, std::string_view where, double fallback) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

int integer_or(const json& obj, const char* key, std::string_view where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(std::string(where) + ": '" + key + "' must be an integer");
  return v.get<int>();
}

std::string text(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key) || !obj.at(key).is_string())
    throw ValidationError(std::string(where) + ": '" + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

std::vector<double> number_list(const json& v, std::string_view where) {
  if (!v.is_array()) throw ValidationError(std::string(where) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ValidationError(std::string(where) + " must contain only numbers");
    out.push_back(e.get<double>());
    if (!std::isfinite(out.back())) throw ValidationError(std::string(where) + " must contain finite numbers");
  }
  if (out.empty()) throw ValidationError(std::string(where) + " must not be empty");
  return out;
}

Grid parse_grid(const json& v, std::string_view where) {
  if (v.is_array()) return number_list(v, where);
  only_keys(v, where, {"start", "stop", "points"});
  LinearGrid g{number(v, "start", where), number(v, "stop", where), integer_or(v, "points", where, 0)};
  if (g.points < 1) throw ValidationError(std::string(where) + ": 'points' must be >= 1");
  return g;
}

json grid_to_json(const Grid& g) {
  if (const auto* lin = std::get_if<LinearGrid>(&g)) return {{"start", lin->start}, {"stop", lin->stop}, {"points", lin->points}};
  return std::get<std::vector<double>>(g);
}

std::complex<double> complex_value(const json& v, std::string_view where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ValidationError(std::string(where) + " must be a number or [re, im]");
}

SystemParams<double> parse_system(const json& v) {
  only_keys(v, "system", {"m", "k", "kappa", "gamma"});
  SystemParams<double> p{number(v, "m", "system"), number(v, "k", "system"), number(v, "kappa", "system"),
                         number_or(v, "gamma", "system", 0.0)};
  try {
    validate(p);
  } catch (const ParameterError& e) {
    throw ValidationError(std::string("system: ") + e.what());
  }
  return p;
}

DetuningSpec<double> parse_detuning(const json& v) {
  const std::string kind = text(v, "kind", "detuning");
  if (kind == "constant") {
    only_keys(v, "detuning", {"kind", "dk"});
    return ConstantDetuning<double>{number_or(v, "dk", "detuning", 0.0)};
  }
  if (kind == "harmonic") {
    only_keys(v, "detuning", {"kind", "A", "omega_drive", "phase"});
    return HarmonicDetuning<double>{number(v, "A", "detuning"), number(v, "omega_drive", "detuning"),
                                    number_or(v, "phase", "detuning", 0.0)};
  }
  throw ValidationError("detuning: kind must be 'constant' or 'harmonic'");
}

ForceSpec<double> parse_force(const json& v) {
  const std::string kind = text(v, "kind", "force");
  if (kind == "none") {
    only_keys(v, "force", {"kind"});
    return NoForce<double>{};
  }
  if (kind == "sinusoid") {
    only_keys(v, "force", {"kind", "amplitude", "omega", "phase", "t_off"});
    SinusoidForce<double> f{number(v, "amplitude", "force"), number(v, "omega", "force"),
                            number_or(v, "phase", "force", 0.0), number(v, "t_off", "force")};
    if (f.tOff < 0) throw ValidationError("force: t_off must be >= 0");
    return f;
  }
  throw ValidationError("force: kind must be 'none' or 'sinusoid'");
}

InitialCondition parse_initial(const json& v) {
  if (v.contains("a") || v.contains("b")) {
    only_keys(v, "initial", {"a", "b"});
    EnvelopeInitial e{};
    e.a = v.contains("a") ? complex_value(v.at("a"), "initial.a") : std::complex<double>{};
    e.b = v.contains("b") ? complex_value(v.at("b"), "initial.b") : std::complex<double>{};
    return e;
  }
  only_keys(v, "initial", {"t", "xA", "vA", "xB", "vB"});
  return NewtonState<double>{number_or(v, "t", "initial", 0.0), number_or(v, "xA", "initial", 0.0),
                             number_or(v, "vA", "initial", 0.0), number_or(v, "xB", "initial", 0.0),
                             number_or(v, "vB", "initial", 0.0)};
}

HahnFinalPulse parse_final_pulse(const std::string& s) {
  if (s == "three_halves_pi") return HahnFinalPulse::ThreeHalvesPi;
  if (s == "negated_half_pi") return HahnFinalPulse::NegatedHalfPi;
  throw ValidationError("hahn: final_pulse must be 'three_halves_pi' or 'negated_half_pi'");
}

Protocol parse_protocol(const json& v) {
  const std::string type = text(v, "type", "protocol");
  if (type == "spectrum") {
    only_keys(v, "protocol", {"type", "dk"});
    if (!v.contains("dk")) throw ValidationError("spectrum: missing 'dk' grid");
    return SpectrumProtocol{parse_grid(v.at("dk"), "spectrum.dk")};
  }
  if (type == "simulate") {
    only_keys(v, "protocol", {"type", "detuning", "force", "initial", "t_end", "steps_per_period", "stride"});
    SimulateProtocol s;
    if (v.contains("detuning")) s.detuning = parse_detuning(v.at("detuning"));
    if (v.contains("force")) s.force = parse_force(v.at("force"));
    if (v.contains("initial")) s.initial = parse_initial(v.at("initial"));
    s.tEnd = number(v, "t_end", "simulate");
    s.stepsPerCarrierPeriod = integer_or(v, "steps_per_period", "simulate", 200);
    s.stride = integer_or(v, "stride", "simulate", 1);
    if (s.stepsPerCarrierPeriod < 20) throw ValidationError("simulate: steps_per_period must be >= 20");
    if (s.stride < 1) throw ValidationError("simulate: stride must be >= 1");
    return s;
  }
  if (type == "rabi") {
    only_keys(v, "protocol", {"type", "t_max", "samples"});
    RabiProtocol r{number(v, "t_max", "rabi"), integer_or(v, "samples", "rabi", 401)};
    if (!(r.tMax > 0)) throw ValidationError("rabi: t_max must be positive");
    if (r.samples < 2) throw ValidationError("rabi: samples must be >= 2");
    return r;
  }
  if (type == "ramsey" || type == "hahn") {
    if (type == "ramsey")
      only_keys(v, "protocol", {"type", "T"});
    else
      only_keys(v, "protocol", {"type", "T", "final_pulse"});
    if (!v.contains("T")) throw ValidationError(type + ": missing waiting-time grid 'T'");
    Grid waits = parse_grid(v.at("T"), type + ".T");
    for (double T : expand(waits))
      if (T < 0) throw ValidationError(type + ": waiting times must be non-negative");
    if (type == "ramsey") return RamseyProtocol{waits};
    return HahnProtocol{waits, v.contains("final_pulse") ? parse_final_pulse(text(v, "final_pulse", "hahn"))
                                                         : HahnFinalPulse::ThreeHalvesPi};
  }
  if (type == "compare") {
    only_keys(v, "protocol", {"type", "ratios", "samples", "delta"});
    if (!v.contains("ratios")) throw ValidationError("compare: missing 'ratios'");
    CompareProtocol c{number_list(v.at("ratios"), "compare.ratios"), integer_or(v, "samples", "compare", 401),
                      number_or(v, "delta", "compare", 0.0)};
    for (double r : c.ratios)
      if (r < 0) throw ValidationError("compare: ratios must be >= 0");
    if (c.samples < 2) throw ValidationError("compare: samples must be >= 2");
    return c;
  }
  throw ValidationError("protocol: unknown type '" + type + "'");
}

json protocol_to_json(const Protocol& protocol) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SpectrumProtocol>) {
          return {{"type", "spectrum"}, {"dk", grid_to_json(p.dk)}};
        } else if constexpr (std::is_same_v<T, SimulateProtocol>) {
          json j{{"type", "simulate"}, {"t_end", p.tEnd}, {"steps_per_period", p.stepsPerCarrierPeriod},
                 {"stride", p.stride}};
          if (const auto* c = std::get_if<ConstantDetuning<double>>(&p.detuning)) {
            j["detuning"] = {{"kind", "constant"}, {"dk", c->dk}};
          } else {
            const auto& h = std::get<HarmonicDetuning<double>>(p.detuning);
            j["detuning"] = {{"kind", "harmonic"}, {"A", h.amplitude}, {"omega_drive", h.omegaDrive}, {"phase", h.phase}};
          }
          if (const auto* f = std::get_if<SinusoidForce<double>>(&p.force)) {
            j["force"] = {{"kind", "sinusoid"}, {"amplitude", f->amplitude}, {"omega", f->omega},
                          {"phase", f->phase}, {"t_off", f->tOff}};
          } else {
            j["force"] = {{"kind", "none"}};
          }
          if (const auto* e = std::get_if<EnvelopeInitial>(&p.initial)) {
            j["initial"] = {{"a", {e->a.real(), e->a.imag()}}, {"b", {e->b.real(), e->b.imag()}}};
          } else {
            const auto& s = std::get<NewtonState<double>>(p.initial);
            j["initial"] = {{"t", s.t}, {"xA", s.xA}, {"vA", s.vA}, {"xB", s.xB}, {"vB", s.vB}};
          }
          return j;
        } else if constexpr (std::is_same_v<T, RabiProtocol>) {
          return {{"type", "rabi"}, {"t_max", p.tMax}, {"samples", p.samples}};
        } else if constexpr (std::is_same_v<T, RamseyProtocol>) {
          return {{"type", "ramsey"}, {"T", grid_to_json(p.waits)}};
        } else if constexpr (std::is_same_v<T, HahnProtocol>) {
          return {{"type", "hahn"},
                  {"T", grid_to_json(p.waits)},
                  {"final_pulse", p.finalPulse == HahnFinalPulse::ThreeHalvesPi ? "three_halves_pi" : "negated_half_pi"}};
        } else {
          return {{"type", "compare"}, {"ratios", p.ratios}, {"samples", p.samples}, {"delta", p.delta}};
        }
      },
      protocol);
}

}  // namespace

std::vector<double> expand(const Grid& grid) {
  if (const auto* values = std::get_if<std::vector<double>>(&grid)) return *values;
  const auto& g = std::get<LinearGrid>(grid);
  std::vector<double> out(static_cast<std::size_t>(g.points));
  if (g.points == 1) {
    out[0] = g.start;
    return out;
  }
  for (int i = 0; i < g.points; ++i)
    out[static_cast<std::size_t>(i)] =
        i == g.points - 1 ? g.stop : g.start + (g.stop - g.start) * static_cast<double>(i) / (g.points - 1);
  return out;
}

std::string_view protocol_name(const Protocol& p) {
  static constexpr std::string_view names[] = {"spectrum", "simulate", "rabi", "ramsey", "hahn", "compare"};
  return names[p.index()];
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ValidationError("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

std::string_view format_name(OutputFormat f) { return f == OutputFormat::Json ? "json" : "csv"; }

RunConfig parse_config(const json& doc) {
  only_keys(doc, "config", {"system", "drive", "protocol", "model", "newton", "output"});
  RunConfig cfg;
  if (!doc.contains("system")) throw ValidationError("config: missing 'system'");
  cfg.system = parse_system(doc.at("system"));
  if (!doc.contains("protocol")) throw ValidationError("config: missing 'protocol'");
  cfg.protocol = parse_protocol(doc.at("protocol"));

  const bool needsDrive = std::holds_alternative<RabiProtocol>(cfg.protocol) ||
                          std::holds_alternative<RamseyProtocol>(cfg.protocol) ||
                          std::holds_alternative<HahnProtocol>(cfg.protocol);
  if (doc.contains("drive")) {
    const auto& d = doc.at("drive");
    only_keys(d, "drive", {"A", "delta"});
    cfg.driveA = number(d, "A", "drive");
    cfg.driveDelta = number_or(d, "delta", "drive", 0.0);
  } else if (needsDrive) {
    throw ValidationError("config: protocol '" + std::string(protocol_name(cfg.protocol)) + "' needs a 'drive'");
  }

  if (doc.contains("model")) {
    if (!doc.at("model").is_string()) throw ValidationError("config: 'model' must be a string");
    cfg.model = parse_model(doc.at("model").get<std::string>());
  }
  if (doc.contains("newton")) {
    const auto& n = doc.at("newton");
    only_keys(n, "newton", {"steps_per_period", "window_periods"});
    cfg.newton.stepsPerCarrierPeriod = integer_or(n, "steps_per_period", "newton", 200);
    cfg.newton.windowPeriods = integer_or(n, "window_periods", "newton", 1);
    if (cfg.newton.stepsPerCarrierPeriod < 20) throw ValidationError("newton: steps_per_period must be >= 20");
    if (cfg.newton.windowPeriods < 0) throw ValidationError("newton: window_periods must be >= 0");
  }
  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    only_keys(o, "output", {"path", "format"});
    if (o.contains("path")) cfg.output.path = text(o, "path", "output");
    if (o.contains("format")) cfg.output.format = parse_format(text(o, "format", "output"));
  }
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["system"] = {{"m", cfg.system.m}, {"k", cfg.system.k}, {"kappa", cfg.system.kappa}, {"gamma", cfg.system.gamma}};
  j["drive"] = {{"A", cfg.driveA}, {"delta", cfg.driveDelta}};
  j["protocol"] = protocol_to_json(cfg.protocol);
  j["model"] = std::string(model_name(cfg.model));
  j["newton"] = {{"steps_per_period", cfg.newton.stepsPerCarrierPeriod}, {"window_periods", cfg.newton.windowPeriods}};
  j["output"] = {{"path", cfg.output.path}, {"format", std::string(format_name(cfg.output.format))}};
  return j;
}

}  // namespace mbloch::cli
