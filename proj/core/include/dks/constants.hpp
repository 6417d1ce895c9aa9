#pragma once

namespace dks::constants {

inline constexpr double hbar = 1.054571817e-34; // J s
inline constexpr double pi = 3.14159265358979323846;

// Rb-87-like defaults used by the CLI config; not tied to any published dataset.
inline constexpr double default_mass_kg = 1.44e-25;
inline constexpr double default_scattering_length_m = 5.2e-9;
inline constexpr double default_wavelength_m = 780e-9;

} // namespace dks::constants
