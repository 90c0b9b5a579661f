#include "chiralvdw/molecule_io.hpp"

#include "chiralvdw/errors.hpp"

namespace chiralvdw {

namespace {

struct Conversion {
  double omega = 1.0;
  double dipole = 1.0;
  double magnetic = 1.0;
};

Conversion conversion_for(const std::string& units, const UnitScale& scale, const std::string& origin) {
  if (units == "internal") return {};
  if (units == "atomic") {
    return {si::atomic_frequency / scale.omega_ref,
            si::elementary_charge * si::bohr_radius / scale.electric_dipole(),
            si::bohr_magneton / scale.magnetic_dipole()};
  }
  if (units == "SI" || units == "si") {
    return {1.0 / scale.omega_ref, 1.0 / scale.electric_dipole(), 1.0 / scale.magnetic_dipole()};
  }
  throw ConfigError(origin + ": unknown units '" + units + "' (expected atomic, SI or internal)");
}

}  // namespace

PolarizabilityModel parse_molecule(const TextDocument& doc, const UnitScale& scale) {
  const Conversion conv = conversion_for(doc.get_string("units", "atomic"), scale, doc.origin());
  const std::string name = doc.get_string("name", "molecule");
  const int handedness = doc.get_int("handedness", 1);
  if (handedness != 1 && handedness != -1) throw ConfigError(doc.origin() + ": key 'handedness' must be +1 or -1");
  std::vector<Transition> transitions;
  for (const TextDocument* block : doc.blocks("transition")) {
    Transition t;
    t.omega = block->get_double("omega") * conv.omega;
    t.d = block->has("d") ? Vector3(block->get_vector3("d") * conv.dipole) : Vector3::Zero();
    t.m_imag = block->has("m_imag") ? Vector3(block->get_vector3("m_imag") * conv.magnetic) : Vector3::Zero();
    if (!(t.omega > 0.0)) throw ConfigError(doc.origin() + ": key 'omega' must be positive");
    transitions.push_back(t);
  }
  if (transitions.empty()) throw ConfigError(doc.origin() + ": missing key 'transition'");
  return PolarizabilityModel(name, std::move(transitions), handedness, doc.get_bool("isotropic", true));
}

PolarizabilityModel load_molecule(const std::string& path, const UnitScale& scale) {
  return parse_molecule(TextDocument::load(path), scale);
}

std::string preset_molecule_text(const std::string& name) {
  if (name == "rb-like") {
    return "units = atomic\n"
           "name = \"Rb-like\"\n"
           "handedness = +1\n"
           "transition { omega = 1.0, d = [1, 0, 0], m_imag = [0, 0, 0] }\n";
  }
  if (name == "3mcp-like") {
    return "units = atomic\n"
           "name = \"3MCP-like\"\n"
           "handedness = +1\n"
           "transition { omega = 1.0, d = [1, 0, 0], m_imag = [1, 0, 0] }\n";
  }
  throw ConfigError("unknown preset molecule '" + name + "' (expected rb-like or 3mcp-like)");
}

PolarizabilityModel resolve_molecule(const std::string& ref, const UnitScale& scale) {
  const std::string prefix = "preset:";
  if (ref.rfind(prefix, 0) == 0) {
    const std::string name = ref.substr(prefix.size());
    return parse_molecule(TextDocument::parse(preset_molecule_text(name), ref), scale);
  }
  return load_molecule(ref, scale);
}

}  // namespace chiralvdw
