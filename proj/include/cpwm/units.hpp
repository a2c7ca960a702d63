#pragma once

// Hartree atomic units throughout: hbar = 1, energies in hartree,
// lengths in bohr, mass in electron masses.
namespace cpwm {

inline constexpr double hbar = 1.0;
inline constexpr double default_mass = 2000.0;

// 1 cm^-1 in hartree.
inline constexpr double cm1_to_hartree = 4.5563352529e-6;

} // namespace cpwm
