#include "graspsim/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace graspsim {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct RawEntry {
  int line = 0;
  std::string value;
  bool consumed = false;
};

using RawSection = std::map<std::string, RawEntry>;

struct RawScenario {
  std::map<std::string, RawSection> sections;
  std::map<std::string, int> section_lines;
};

RawScenario tokenize(const std::string& text) {
  static const std::vector<std::string> kSections = {
      "scenario", "model",       "controller", "trajectory",
      "sim",      "disturbance", "output"};
  RawScenario raw;
  std::istringstream in(text);
  std::string line;
  std::string current;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError(lineno, line, "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (std::find(kSections.begin(), kSections.end(), current) ==
          kSections.end())
        throw ParseError(lineno, current, "unknown section [" + current + "]");
      if (raw.sections.count(current))
        throw ParseError(lineno, current,
                         "duplicate section [" + current + "]");
      raw.sections[current];
      raw.section_lines[current] = lineno;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, line, "expected key = value");
    if (current.empty())
      throw ParseError(lineno, line, "key outside any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, line, "empty key");
    auto [it, inserted] =
        raw.sections[current].emplace(key, RawEntry{lineno, value, false});
    if (!inserted)
      throw ParseError(lineno, key,
                       "duplicate key '" + key + "' in [" + current + "]");
  }
  return raw;
}

double parse_double(const RawEntry& e, const std::string& key) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    throw ParseError(e.line, key, "value '" + e.value + "' is not a number");
  }
  if (trim(e.value.substr(pos)) != "")
    throw ParseError(e.line, key, "trailing junk in value '" + e.value + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) parts.push_back(trim(item));
  if (parts.empty()) parts.push_back("");
  return parts;
}

Eigen::VectorXd parse_vector(const RawEntry& e, const std::string& key,
                             int n_expected) {
  const auto parts = split_list(e.value);
  if (n_expected > 0 && static_cast<int>(parts.size()) != n_expected &&
      parts.size() != 1) {
    std::ostringstream os;
    os << "'" << key << "' has " << parts.size() << " entries, expected "
       << n_expected;
    throw ParseError(e.line, key, os.str());
  }
  Eigen::VectorXd v(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) {
    RawEntry sub{e.line, parts[i], false};
    v[static_cast<long>(i)] = parse_double(sub, key);
  }
  if (n_expected > 0 && v.size() == 1 && n_expected != 1)
    return Eigen::VectorXd::Constant(n_expected, v[0]);
  return v;
}

class SectionReader {
 public:
  SectionReader(RawScenario& raw, const std::string& name)
      : name_(name), section_(nullptr) {
    auto it = raw.sections.find(name);
    if (it != raw.sections.end()) section_ = &it->second;
  }

  bool present() const { return section_ != nullptr; }

  const RawEntry* find(const std::string& key) const {
    if (!section_) return nullptr;
    auto it = section_->find(key);
    if (it == section_->end()) return nullptr;
    it->second.consumed = true;
    return &it->second;
  }

  double number(const std::string& key, double fallback) const {
    const RawEntry* e = find(key);
    return e ? parse_double(*e, key) : fallback;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const RawEntry* e = find(key);
    return e ? e->value : fallback;
  }

  void reject_unconsumed() const {
    if (!section_) return;
    for (const auto& [key, entry] : *section_)
      if (!entry.consumed)
        throw ParseError(entry.line, key,
                         "unknown key '" + key + "' in [" + name_ + "]");
  }

 private:
  std::string name_;
  RawSection* section_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (long i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text,
                        const std::string& fallback_name) {
  RawScenario raw = tokenize(text);
  for (const char* required : {"controller", "trajectory"})
    if (!raw.sections.count(required))
      throw ParseError(0, required,
                       std::string("missing required section [") + required +
                           "]");

  Scenario sc;

  SectionReader meta(raw, "scenario");
  sc.name = meta.text("name", fallback_name);

  // Model first: it fixes the joint count for everything else.
  SectionReader model(raw, "model");
  {
    const ManipulatorModel stock = stock_two_link();
    Eigen::VectorXd def_mass(2), def_len(2), def_com(2), def_izz(2);
    for (int i = 0; i < 2; ++i) {
      def_mass[i] = stock.links[i].mass;
      def_len[i] = stock.links[i].length;
      def_com[i] = stock.links[i].com_distance;
      def_izz[i] = stock.links[i].inertia_zz;
    }
    int n = 2;
    if (const RawEntry* e = model.find("mass")) {
      Eigen::VectorXd m = parse_vector(*e, "mass", 0);
      n = static_cast<int>(m.size());
      def_mass = m;
      if (n != 2) {
        def_len = Eigen::VectorXd::Constant(n, 1.0);
        def_com = Eigen::VectorXd::Constant(n, 0.5);
        def_izz = Eigen::VectorXd::Constant(n, 1.0 / 12.0);
      }
    }
    auto vec = [&](const char* key, const Eigen::VectorXd& fallback) {
      const RawEntry* e = model.find(key);
      return e ? parse_vector(*e, key, n) : fallback;
    };
    const Eigen::VectorXd len = vec("length", def_len);
    const Eigen::VectorXd com = vec("com", def_com);
    const Eigen::VectorXd izz = vec("inertia", def_izz);
    sc.model.links.clear();
    for (int i = 0; i < n; ++i)
      sc.model.links.push_back(
          LinkParams{def_mass[i], len[i], com[i], izz[i]});
    sc.model.joint_types.assign(static_cast<size_t>(n), JointType::revolute);
    sc.model.gravity = model.number("gravity", stock.gravity);

    const RawEntry* gl1 = model.find("grasper_l1");
    const RawEntry* gl2 = model.find("grasper_l2");
    if (static_cast<bool>(gl1) != static_cast<bool>(gl2))
      throw ParseError(gl1 ? gl1->line : gl2->line,
                       gl1 ? "grasper_l1" : "grasper_l2",
                       "grasper_l1 and grasper_l2 must be given together");
    if (gl1 && gl2)
      sc.grasper = GrasperChain{parse_double(*gl1, "grasper_l1"),
                                parse_double(*gl2, "grasper_l2")};
    try {
      validate_model(sc.model);
      certify_inertia_bounds(sc.model);
    } catch (const InvalidInputError& err) {
      throw ParseError(raw.section_lines.count("model")
                           ? raw.section_lines["model"]
                           : 0,
                       "model", err.what());
    }
  }
  const int n = sc.model.n();

  SectionReader controller(raw, "controller");
  {
    const std::string type = controller.text("type", "id_integral");
    if (type == "pd")
      sc.controller.kind = ControllerKind::pd;
    else if (type == "id_integral")
      sc.controller.kind = ControllerKind::id_integral;
    else {
      const RawEntry* e = controller.find("type");
      throw ParseError(e ? e->line : raw.section_lines["controller"], "type",
                       "controller type must be 'pd' or 'id_integral'");
    }
    auto gain = [&](const char* key, bool required) {
      const RawEntry* e = controller.find(key);
      if (!e) {
        if (required)
          throw ParseError(raw.section_lines["controller"], key,
                           std::string("missing gain '") + key + "'");
        return Eigen::VectorXd::Zero(n).eval();
      }
      return parse_vector(*e, key, n);
    };
    sc.controller.gains.kp = gain("kp", true);
    sc.controller.gains.kd = gain("kd", true);
    sc.controller.gains.ki =
        gain("ki", sc.controller.kind == ControllerKind::id_integral);
    try {
      validate_gains(sc.controller.gains);
    } catch (const InvalidInputError& err) {
      throw ParseError(raw.section_lines["controller"], "gains", err.what());
    }
  }

  SectionReader trajectory(raw, "trajectory");
  {
    auto traj_vec = [&](const char* key, double fallback) {
      const RawEntry* e = trajectory.find(key);
      if (!e) return Eigen::VectorXd::Constant(n, fallback).eval();
      return parse_vector(*e, key, n);
    };
    const Eigen::VectorXd amplitude = traj_vec("amplitude", 0.0);
    const Eigen::VectorXd frequency = traj_vec("frequency", 1.0);
    const Eigen::VectorXd phase = traj_vec("phase", 0.0);
    const Eigen::VectorXd offset = traj_vec("offset", 0.0);
    std::vector<std::string> shapes(static_cast<size_t>(n), "sin");
    if (const RawEntry* e = trajectory.find("shape")) {
      auto parts = split_list(e->value);
      if (parts.size() == 1)
        shapes.assign(static_cast<size_t>(n), parts[0]);
      else if (static_cast<int>(parts.size()) == n)
        shapes.assign(parts.begin(), parts.end());
      else {
        std::ostringstream os;
        os << "'shape' has " << parts.size() << " entries, expected " << n;
        throw ParseError(e->line, "shape", os.str());
      }
      for (const std::string& s : shapes)
        if (s != "sin" && s != "cos")
          throw ParseError(e->line, "shape",
                           "shape entries must be 'sin' or 'cos'");
    }
    sc.trajectory.joints.clear();
    for (int i = 0; i < n; ++i)
      sc.trajectory.joints.push_back(JointWave{
          amplitude[i], frequency[i], phase[i], offset[i],
          shapes[static_cast<size_t>(i)] == "cos" ? WaveShape::cosine
                                                  : WaveShape::sine});
  }

  SectionReader disturbance(raw, "disturbance");
  {
    const std::string kind = disturbance.text("kind", "zero");
    if (kind == "zero") {
      sc.disturbance = DisturbanceSpec::zero(n);
    } else if (kind == "constant") {
      const RawEntry* e = disturbance.find("value");
      if (!e)
        throw ParseError(raw.section_lines.count("disturbance")
                             ? raw.section_lines["disturbance"]
                             : 0,
                         "value", "constant disturbance needs 'value'");
      sc.disturbance = DisturbanceSpec::constant(parse_vector(*e, "value", n));
    } else if (kind == "sinusoid") {
      const RawEntry* ea = disturbance.find("amplitude");
      const RawEntry* ef = disturbance.find("frequency");
      if (!ea || !ef)
        throw ParseError(raw.section_lines.count("disturbance")
                             ? raw.section_lines["disturbance"]
                             : 0,
                         ea ? "frequency" : "amplitude",
                         "sinusoid disturbance needs 'amplitude' and "
                         "'frequency'");
      sc.disturbance = DisturbanceSpec::sinusoid(
          parse_vector(*ea, "amplitude", n), parse_double(*ef, "frequency"));
    } else {
      const RawEntry* e = disturbance.find("kind");
      throw ParseError(e ? e->line : 0, "kind",
                       "disturbance kind must be zero, constant or sinusoid");
    }
  }

  SectionReader sim(raw, "sim");
  {
    sc.sim.dt = sim.number("dt", 1e-3);
    sc.sim.duration = sim.number("duration", 60.0);
    const double stride = sim.number("stride", 1.0);
    if (stride < 1.0 || stride != std::floor(stride)) {
      const RawEntry* e = sim.find("stride");
      throw ParseError(e ? e->line : 0, "stride",
                       "stride must be a positive integer");
    }
    sc.sim.record_stride = static_cast<int>(stride);
    if (const RawEntry* e = sim.find("q0"))
      sc.sim.q0 = parse_vector(*e, "q0", n);
    if (const RawEntry* e = sim.find("qdot0"))
      sc.sim.qdot0 = parse_vector(*e, "qdot0", n);
    if (!(sc.sim.dt > 0.0)) {
      const RawEntry* e = sim.find("dt");
      throw ParseError(e ? e->line : 0, "dt", "dt must be positive");
    }
    if (sc.sim.duration < sc.sim.dt) {
      const RawEntry* e = sim.find("duration");
      throw ParseError(e ? e->line : 0, "duration",
                       "duration must be at least dt");
    }
  }

  SectionReader output(raw, "output");
  sc.output.dir = output.text("dir", "out");
  sc.output.basename = output.text("basename", sc.name);

  meta.reject_unconsumed();
  model.reject_unconsumed();
  controller.reject_unconsumed();
  trajectory.reject_unconsumed();
  disturbance.reject_unconsumed();
  sim.reject_unconsumed();
  output.reject_unconsumed();
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError(0, path, "cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(),
                        std::filesystem::path(path).stem().string());
}

std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream os;
  os << "[scenario]\nname = " << sc.name << "\n\n";

  os << "[model]\n";
  Eigen::VectorXd mass(sc.model.n()), len(sc.model.n()), com(sc.model.n()),
      izz(sc.model.n());
  for (int i = 0; i < sc.model.n(); ++i) {
    mass[i] = sc.model.links[i].mass;
    len[i] = sc.model.links[i].length;
    com[i] = sc.model.links[i].com_distance;
    izz[i] = sc.model.links[i].inertia_zz;
  }
  os << "mass = " << format_vector(mass) << "\n";
  os << "length = " << format_vector(len) << "\n";
  os << "com = " << format_vector(com) << "\n";
  os << "inertia = " << format_vector(izz) << "\n";
  os << "gravity = " << format_double(sc.model.gravity) << "\n";
  if (sc.grasper) {
    os << "grasper_l1 = " << format_double(sc.grasper->L1) << "\n";
    os << "grasper_l2 = " << format_double(sc.grasper->L2) << "\n";
  }
  os << "\n[controller]\n";
  os << "type = "
     << (sc.controller.kind == ControllerKind::pd ? "pd" : "id_integral")
     << "\n";
  os << "kp = " << format_vector(sc.controller.gains.kp) << "\n";
  os << "kd = " << format_vector(sc.controller.gains.kd) << "\n";
  os << "ki = " << format_vector(sc.controller.gains.ki) << "\n";

  os << "\n[trajectory]\n";
  std::string shapes;
  Eigen::VectorXd amp(sc.trajectory.n()), freq(sc.trajectory.n()),
      phase(sc.trajectory.n()), offset(sc.trajectory.n());
  for (int i = 0; i < sc.trajectory.n(); ++i) {
    const JointWave& w = sc.trajectory.joints[static_cast<size_t>(i)];
    if (i) shapes += ", ";
    shapes += (w.shape == WaveShape::cosine) ? "cos" : "sin";
    amp[i] = w.amplitude;
    freq[i] = w.omega;
    phase[i] = w.phase;
    offset[i] = w.offset;
  }
  os << "shape = " << shapes << "\n";
  os << "amplitude = " << format_vector(amp) << "\n";
  os << "frequency = " << format_vector(freq) << "\n";
  os << "phase = " << format_vector(phase) << "\n";
  os << "offset = " << format_vector(offset) << "\n";

  os << "\n[disturbance]\n";
  switch (sc.disturbance.kind) {
    case DisturbanceKind::zero:
      os << "kind = zero\n";
      break;
    case DisturbanceKind::constant:
      os << "kind = constant\n";
      os << "value = " << format_vector(sc.disturbance.value) << "\n";
      break;
    case DisturbanceKind::sinusoid:
      os << "kind = sinusoid\n";
      os << "amplitude = " << format_vector(sc.disturbance.amplitude) << "\n";
      os << "frequency = " << format_double(sc.disturbance.omega) << "\n";
      break;
  }

  os << "\n[sim]\n";
  os << "dt = " << format_double(sc.sim.dt) << "\n";
  os << "duration = " << format_double(sc.sim.duration) << "\n";
  os << "stride = " << sc.sim.record_stride << "\n";
  if (sc.sim.q0) os << "q0 = " << format_vector(*sc.sim.q0) << "\n";
  if (sc.sim.qdot0) os << "qdot0 = " << format_vector(*sc.sim.qdot0) << "\n";

  os << "\n[output]\n";
  os << "dir = " << sc.output.dir << "\n";
  os << "basename = " << sc.output.basename << "\n";
  return os.str();
}

std::optional<Scenario> preset(const std::string& id) {
  auto base = [](const char* name) {
    Scenario sc;
    sc.name = name;
    sc.model = stock_two_link();
    sc.trajectory = stock_trajectory();
    sc.sim = SimConfig{};
    sc.output.basename = name;
    return sc;
  };
  if (id == "fig6") {
    // PD tracking without disturbance, gains as printed for the PD run.
    Scenario sc = base("fig6");
    sc.controller.kind = ControllerKind::pd;
    sc.controller.gains = uniform_gains(2, 4.2, 2.4, 0.0);
    sc.disturbance = DisturbanceSpec::zero(2);
    return sc;
  }
  if (id == "fig7") {
    // Integral action under constant tremor, low gains.
    Scenario sc = base("fig7");
    sc.controller.kind = ControllerKind::id_integral;
    sc.controller.gains = uniform_gains(2, 2.4, 4.2, 1.0);
    sc.disturbance = DisturbanceSpec::constant(Eigen::Vector2d(1.0, 0.5));
    return sc;
  }
  if (id == "fig8") {
    // Same loop with the increased gain set.
    Scenario sc = base("fig8");
    sc.controller.kind = ControllerKind::id_integral;
    sc.controller.gains = uniform_gains(2, 12.0, 21.0, 5.0);
    sc.disturbance = DisturbanceSpec::constant(Eigen::Vector2d(1.0, 0.5));
    return sc;
  }
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"fig6", "fig7", "fig8"}; }

RunReport run_scenario(const Scenario& sc, bool write_outputs) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;
  report.scenario = sc.name;
  report.verdict = closed_loop_stability(sc.controller.gains);
  SimResult result =
      simulate(sc.model, sc.controller, sc.trajectory, sc.disturbance, sc.sim);
  report.metrics = result.metrics;
  if (write_outputs) {
    std::filesystem::create_directories(sc.output.dir);
    const std::string path =
        (std::filesystem::path(sc.output.dir) / (sc.output.basename + ".csv"))
            .string();
    write_series_csv(path, result);
    report.output_paths.push_back(path);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

void write_series_csv(const std::string& path, const SimResult& result) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot open '" + path + "' for writing");
  const int n = result.q.empty() ? 0 : static_cast<int>(result.q[0].size());
  out << "t";
  for (const char* base : {"q", "qd", "e", "u", "d"})
    for (int i = 1; i <= n; ++i) out << "," << base << i;
  out << "\n";
  char buf[64];
  auto emit = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    out << "," << buf;
  };
  for (size_t k = 0; k < result.t.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.15g", result.t[k]);
    out << buf;
    for (const auto* series :
         {&result.q, &result.q_d, &result.error, &result.u, &result.d})
      for (int i = 0; i < n; ++i) emit((*series)[k][i]);
    out << "\n";
  }
}

std::string format_run_report(const RunReport& r) {
  std::ostringstream os;
  os << "scenario: " << r.scenario << "\n";
  os << "stability: " << (r.verdict.stable ? "stable" : "unstable")
     << " (margin " << r.verdict.margin << ")\n";
  os << "rms_error_tail: " << r.metrics.rms_error_tail << " rad\n";
  os << "settling_time: ";
  if (r.metrics.settling_time)
    os << *r.metrics.settling_time << " s\n";
  else
    os << "none\n";
  os << "control_energy: " << r.metrics.control_energy << " N^2 m^2 s\n";
  for (const std::string& p : r.output_paths) os << "wrote: " << p << "\n";
  os << "wall_time: " << r.wall_seconds << " s\n";
  return os.str();
}

}  // namespace graspsim
