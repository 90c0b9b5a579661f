#pragma once

#include <string>

#include "chiralvdw/polarizability.hpp"
#include "chiralvdw/structured_text.hpp"
#include "chiralvdw/units.hpp"

namespace chiralvdw {

// Molecule definition file:
//
//   units = atomic            # atomic | SI | internal
//   name = "3MCP-like"
//   handedness = +1
//   isotropic = true          # optional
//   transition { omega = 1.0, d = [1, 0, 0], m_imag = [1, 0, 0] }
//
// atomic: omega in hartree/hbar, d in e*a0, m_imag in Bohr magnetons.
// SI: omega in rad/s, d in C*m, m_imag in A*m^2.
// internal: already in internal units (m_imag includes the 1/c).
PolarizabilityModel parse_molecule(const TextDocument& doc, const UnitScale& scale);
PolarizabilityModel load_molecule(const std::string& path, const UnitScale& scale);

// "rb-like" and "3mcp-like": single-transition calibration models with
// |d| = 1 e*a0, |m| = 1 Bohr magneton, omega = 1 hartree/hbar. Magnitudes are
// placeholders, not literature data.
std::string preset_molecule_text(const std::string& name);
// Path, or "preset:<name>".
PolarizabilityModel resolve_molecule(const std::string& ref, const UnitScale& scale);

}  // namespace chiralvdw
