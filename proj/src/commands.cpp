#include "mbloch/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mbloch/errors.hpp"
#include "mbloch/model_core.hpp"
#include "mbloch/newton_sim.hpp"
#include "mbloch/protocol_runner.hpp"

namespace mbloch::cli {
namespace {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename P>
const P& protocol_as(const RunConfig& cfg) {
  const auto* p = std::get_if<P>(&cfg.protocol);
  if (!p) throw ValidationError("config protocol is '" + std::string(protocol_name(cfg.protocol)) + "'");
  return *p;
}

std::optional<NewtonRealization> realization_for(const RunConfig& cfg) {
  if (cfg.model != Model::NewtonFull) return std::nullopt;
  return cfg.realization();
}

Table population_table(std::string command, std::string timeColumn, const std::vector<double>& t,
                       const std::vector<double>& popA, const std::vector<double>& popB,
                       const std::vector<BlochVector<double>>& bloch, Model model) {
  Table table{std::move(command), {std::move(timeColumn), "popA", "popB", "sx", "sy", "sz"}, {}, {}};
  table.meta["model"] = std::string(model_name(model));
  table.rows.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    table.rows.push_back({t[i], popA[i], popB[i], bloch[i].x(), bloch[i].y(), bloch[i].z()});
  return table;
}

std::string read_file(const std::string& path) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) throw IoError("config path '" + path + "' is a directory");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return ss.str();
}

}  // namespace

Table cmd_spectrum(const RunConfig& cfg) {
  const auto& spec = protocol_as<SpectrumProtocol>(cfg);
  const auto& p = cfg.system;
  Table table{"spectrum", {"dk", "omega_plus", "omega_minus", "omega_a_uncoupled", "omega_b_uncoupled"}, {}, {}};
  for (double dk : expand(spec.dk)) {
    const auto eig = eigenfrequencies(p, dk);
    const double radA = (p.k + p.kappa - dk) / p.m;
    const double radB = (p.k + p.kappa + dk) / p.m;
    if (radA < 0 || radB < 0) throw DomainError("uncoupled branch imaginary at dk = " + format_number(dk));
    table.rows.push_back({dk, eig.plus, eig.minus, std::sqrt(radA), std::sqrt(radB)});
  }
  return table;
}

Table cmd_simulate(const RunConfig& cfg) {
  const auto& sim = protocol_as<SimulateProtocol>(cfg);
  NewtonState<double> initial;
  if (const auto* e = std::get_if<EnvelopeInitial>(&sim.initial))
    initial = prepare_state(cfg.system, e->a, e->b, 0.0);
  else
    initial = std::get<NewtonState<double>>(sim.initial);
  const auto traj = integrate(cfg.system, sim.detuning, sim.force, initial, sim.tEnd, sim.stepsPerCarrierPeriod);

  Table table{"simulate", {"t", "xA", "vA", "xB", "vB"}, {}, {}};
  const std::size_t n = traj.samples.size();
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(sim.stride)) {
    const auto& s = traj.samples[i];
    table.rows.push_back({s.t, s.xA, s.vA, s.xB, s.vB});
  }
  if ((n - 1) % static_cast<std::size_t>(sim.stride) != 0) {
    const auto& s = traj.samples.back();
    table.rows.push_back({s.t, s.xA, s.vA, s.xB, s.vB});
  }
  return table;
}

Table cmd_rabi(const RunConfig& cfg) {
  const auto& rabi = protocol_as<RabiProtocol>(cfg);
  const auto r = rabi_scan(cfg.drive(), rabi.tMax, rabi.samples, cfg.model, realization_for(cfg));
  return population_table("rabi", "t", r.t, r.popA, r.popB, r.bloch, r.model);
}

Table cmd_ramsey(const RunConfig& cfg) {
  const auto& ramsey = protocol_as<RamseyProtocol>(cfg);
  const auto waits = expand(ramsey.waits);
  const auto r = ramsey_scan(cfg.drive(), waits, cfg.model, realization_for(cfg));
  return population_table("ramsey", "T", r.T, r.popA, r.popB, r.bloch, r.model);
}

Table cmd_hahn(const RunConfig& cfg) {
  const auto& hahn = protocol_as<HahnProtocol>(cfg);
  const auto waits = expand(hahn.waits);
  const auto r = hahn_scan(cfg.drive(), waits, cfg.model, realization_for(cfg), hahn.finalPulse);
  return population_table("hahn", "T", r.T, r.popA, r.popB, r.bloch, r.model);
}

Table cmd_compare(const RunConfig& cfg) {
  const auto& cmp = protocol_as<CompareProtocol>(cfg);
  const CompareOptions options{cfg.newton.stepsPerCarrierPeriod, cfg.newton.windowPeriods, cmp.samples, cmp.delta};
  const auto report = compare_layers(cfg.system, cmp.ratios, options);
  Table table{"compare", {"ratio", "A", "duration", "max_discrepancy"}, {}, {}};
  for (const auto& e : report.entries) table.rows.push_back({e.ratio, e.A, e.duration, e.maxDiscrepancy});
  table.meta["monotonic_increasing"] = report.monotonicIncreasing;
  return table;
}

Table run_protocol(const RunConfig& cfg) {
  return std::visit(
      [&](const auto& p) -> Table {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SpectrumProtocol>) return cmd_spectrum(cfg);
        else if constexpr (std::is_same_v<T, SimulateProtocol>) return cmd_simulate(cfg);
        else if constexpr (std::is_same_v<T, RabiProtocol>) return cmd_rabi(cfg);
        else if constexpr (std::is_same_v<T, RamseyProtocol>) return cmd_ramsey(cfg);
        else if constexpr (std::is_same_v<T, HahnProtocol>) return cmd_hahn(cfg);
        else return cmd_compare(cfg);
      },
      cfg.protocol);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coupled-oscillator two-level system simulator", "mbloch"};
  app.require_subcommand(1);

  std::string configPath, outPath, format, model;
  const char* names[] = {"spectrum", "simulate", "rabi", "ramsey", "hahn", "compare"};
  const char* help[] = {"eigenfrequency branches versus constant detuning",
                        "raw lab-frame Newtonian trajectory",
                        "continuous-drive Rabi oscillation",
                        "Ramsey fringes versus waiting time",
                        "Hahn echo versus waiting time",
                        "Newtonian versus Bloch discrepancy over A/Omega0"};
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--config", configPath, "JSON run configuration")->required();
    sub->add_option("--out", outPath, "output file (default: stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--model", model, "bloch, rwa or newton")->check(CLI::IsMember({"bloch", "rwa", "newton"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const std::string raw = read_file(configPath);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg = parse_config(doc);
    if (protocol_name(cfg.protocol) != command)
      throw ValidationError("subcommand '" + command + "' does not match config protocol '" +
                            std::string(protocol_name(cfg.protocol)) + "'");
    if (!model.empty()) cfg.model = parse_model(model);
    if (!format.empty()) cfg.output.format = parse_format(format);
    if (!outPath.empty()) cfg.output.path = outPath;
    for (const auto& w : validation_warnings(cfg.system)) err << "warning: " << w << '\n';

    const Table table = run_protocol(cfg);
    std::ostringstream buffer;
    write_table(buffer, table, cfg.output.format);

    if (cfg.output.path.empty()) {
      out << buffer.str();
      out.flush();
      if (!out) throw IoError("failed writing to standard output");
    } else {
      std::ofstream file(cfg.output.path, std::ios::binary | std::ios::trunc);
      if (!file) throw IoError("cannot open output file '" + cfg.output.path + "'");
      file << buffer.str();
      file.close();
      if (!file) throw IoError("failed writing '" + cfg.output.path + "'");
    }
    return kExitOk;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace mbloch::cli
