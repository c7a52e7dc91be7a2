#include "chargedamp/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace chargedamp {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>, std::less<>> kSchema{
    {"particle", {"charge", "position", "velocity"}},
    {"mass_model", {"kind", "m0", "tau", "k"}},
    {"fields", {"B0", "kappa0", "f", "Ex", "Ey", "g"}},
    {"packet", {"width"}},
    {"integration", {"t_start", "t_end", "output_stride", "method", "rel_tol", "abs_tol", "max_step", "fixed_step"}},
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

class Reader {
 public:
  Reader(std::string_view text, pt::ptree tree) : text_(text), tree_(std::move(tree)) {}

  void check_schema() const {
    for (const auto& [section, body] : tree_) {
      const auto it = kSchema.find(section);
      if (it == kSchema.end()) fail(section, fmt::format("unknown section [{}]", section));
      if (!body.data().empty()) fail(section, fmt::format("'{}' must be a section", section));
      for (const auto& [key, value] : body) {
        if (!it->second.contains(key)) fail(section + "." + key, fmt::format("unknown key '{}' in [{}]", key, section));
      }
    }
  }

  bool has(const std::string& key) const { return tree_.get_optional<std::string>(pt::ptree::path_type(key, '.')).has_value(); }

  std::string text(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) fail(key, fmt::format("missing required key '{}'", key));
    return trim(*v);
  }

  double number(const std::string& key) const { return parse_number(key, text(key)); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  Vec2 vec(const std::string& key, Vec2 fallback) const {
    if (!has(key)) return fallback;
    const auto parts = split(text(key), ',');
    if (parts.size() != 2) fail(key, fmt::format("'{}' needs two comma-separated numbers", key));
    return {parse_number(key, parts[0]), parse_number(key, parts[1])};
  }

  Profile profile(const std::string& key, Profile fallback) const {
    if (!has(key)) return fallback;
    const auto parts = words(text(key));
    if (parts.empty()) fail(key, fmt::format("'{}' is empty", key));
    const std::string& kind = parts[0];
    auto args = [&](std::size_t n) {
      if (parts.size() != n + 1) fail(key, fmt::format("'{}' profile '{}' takes {} parameter(s)", key, kind, n));
      std::vector<double> v;
      for (std::size_t i = 1; i <= n; ++i) v.push_back(parse_number(key, parts[i]));
      return v;
    };
    if (kind == "constant") return ConstantProfile{args(1)[0]};
    if (kind == "exponential") {
      const auto v = args(2);
      return ExponentialProfile{v[0], v[1]};
    }
    if (kind == "sinusoidal") {
      const auto v = args(4);
      return SinusoidalProfile{v[0], v[1], v[2], v[3]};
    }
    if (kind == "linear_ramp") {
      const auto v = args(2);
      return LinearRampProfile{v[0], v[1]};
    }
    fail(key, fmt::format("unknown profile '{}' (constant|exponential|sinusoidal|linear_ramp)", kind));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const int line = line_of(key);
    throw ConfigError(line > 0 ? fmt::format("line {}: {}", line, what) : what, key, line);
  }

 private:
  double parse_number(const std::string& key, const std::string& s) const {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty()) fail(key, fmt::format("'{}' is not a number: '{}'", key, s));
    return v;
  }

  // Best-effort line lookup of "section.key" in the original text.
  int line_of(const std::string& key) const {
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot);
    const std::string name = dot == std::string::npos ? std::string() : key.substr(dot + 1);
    std::istringstream in{std::string(text_)};
    std::string raw;
    std::string current;
    for (int n = 1; std::getline(in, raw); ++n) {
      const std::string l = trim(raw);
      if (l.empty() || l[0] == ';' || l[0] == '#') continue;
      if (l.front() == '[' && l.back() == ']') {
        current = trim(std::string_view(l).substr(1, l.size() - 2));
        if (name.empty() && current == section) return n;
        continue;
      }
      const auto eq = l.find('=');
      if (current == section && eq != std::string::npos && trim(std::string_view(l).substr(0, eq)) == name) return n;
    }
    return 0;
  }

  std::string_view text_;
  pt::ptree tree_;
};

MassModel read_mass_model(const Reader& r) {
  const std::string kind = r.text("mass_model.kind");
  const double m0 = r.number("mass_model.m0");
  if (kind == "constant") return ConstantMass{m0};
  if (kind == "kanai_caldirola") return KanaiCaldirolaMass{m0, r.number("mass_model.tau")};
  if (kind == "linear") return LinearMass{m0, r.number("mass_model.tau"), r.number("mass_model.k", 1.0)};
  if (kind == "log_interp") return LogInterpMass{m0, r.number("mass_model.tau")};
  r.fail("mass_model.kind", fmt::format("unknown mass model '{}' (constant|kanai_caldirola|linear|log_interp)", kind));
}

std::string format_profile(const Profile& p) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantProfile>) return fmt::format("constant {:.17g}", v.value);
        else if constexpr (std::is_same_v<T, ExponentialProfile>) return fmt::format("exponential {:.17g} {:.17g}", v.scale, v.tau);
        else if constexpr (std::is_same_v<T, SinusoidalProfile>)
          return fmt::format("sinusoidal {:.17g} {:.17g} {:.17g} {:.17g}", v.offset, v.amplitude, v.angular_frequency, v.phase);
        else return fmt::format("linear_ramp {:.17g} {:.17g}", v.offset, v.slope);
      },
      p);
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()), "", static_cast<int>(e.line()));
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const std::string key = trim(std::string_view(o).substr(0, eq));
    if (eq == std::string::npos || key.find('.') == std::string::npos) {
      throw ConfigError(fmt::format("override '{}' must look like section.key=value", o), key);
    }
    tree.put(pt::ptree::path_type(key, '.'), trim(std::string_view(o).substr(eq + 1)));
  }

  const Reader r(text, std::move(tree));
  r.check_schema();

  Scenario s;
  s.q = r.number("particle.charge");
  s.initial_position = r.vec("particle.position", {});
  s.initial_velocity = r.vec("particle.velocity", {});
  s.mass_model = read_mass_model(r);

  s.fields.B0 = r.number("fields.B0", 0.0);
  s.fields.kappa0 = r.number("fields.kappa0", 0.0);
  s.fields.f = r.profile("fields.f", ConstantProfile{1.0});
  s.fields.Ex = r.profile("fields.Ex", ConstantProfile{0.0});
  s.fields.Ey = r.profile("fields.Ey", ConstantProfile{0.0});
  s.fields.g = r.profile("fields.g", ConstantProfile{1.0});

  s.packet_width = r.number("packet.width", s.packet_width);

  s.t_start = r.number("integration.t_start", 0.0);
  s.t_end = r.number("integration.t_end");
  s.output_stride = r.number("integration.output_stride");
  if (r.has("integration.method")) {
    const std::string m = r.text("integration.method");
    if (m == "rk45") s.integrator.method = IntegratorConfig::Method::rk45_adaptive;
    else if (m == "rk4") s.integrator.method = IntegratorConfig::Method::rk4_fixed;
    else r.fail("integration.method", fmt::format("unknown method '{}' (rk45|rk4)", m));
  }
  s.integrator.rel_tol = r.number("integration.rel_tol", s.integrator.rel_tol);
  s.integrator.abs_tol = r.number("integration.abs_tol", s.integrator.abs_tol);
  s.integrator.max_step = r.number("integration.max_step", s.integrator.max_step);
  s.integrator.fixed_step = r.number("integration.fixed_step", s.integrator.fixed_step);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open scenario file '{}'", path.string()), "");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), overrides);
}

std::string format_scenario(const Scenario& s) {
  std::string out;
  auto line = [&out](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  auto num = [](double v) { return fmt::format("{:.17g}", v); };
  auto vec = [](Vec2 v) { return fmt::format("{:.17g}, {:.17g}", v.x, v.y); };

  out += "[particle]\n";
  line("charge", num(s.q));
  line("position", vec(s.initial_position));
  line("velocity", vec(s.initial_velocity));

  out += "\n[mass_model]\n";
  line("kind", std::string(model_name(s.mass_model)));
  line("m0", num(reference_mass(s.mass_model)));
  if (!std::holds_alternative<ConstantMass>(s.mass_model)) line("tau", num(decay_time(s.mass_model)));
  if (const auto* lin = std::get_if<LinearMass>(&s.mass_model)) line("k", num(lin->k));

  out += "\n[fields]\n";
  line("B0", num(s.fields.B0));
  line("f", format_profile(s.fields.f));
  line("Ex", format_profile(s.fields.Ex));
  line("Ey", format_profile(s.fields.Ey));
  line("kappa0", num(s.fields.kappa0));
  line("g", format_profile(s.fields.g));

  out += "\n[packet]\n";
  line("width", num(s.packet_width));

  out += "\n[integration]\n";
  line("t_start", num(s.t_start));
  line("t_end", num(s.t_end));
  line("output_stride", num(s.output_stride));
  line("method", s.integrator.method == IntegratorConfig::Method::rk4_fixed ? "rk4" : "rk45");
  line("rel_tol", num(s.integrator.rel_tol));
  line("abs_tol", num(s.integrator.abs_tol));
  line("max_step", num(s.integrator.max_step));
  line("fixed_step", num(s.integrator.fixed_step));
  return out;
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write scenario file '{}'", path.string()), "");
  out << format_scenario(s);
}

}  // namespace chargedamp
