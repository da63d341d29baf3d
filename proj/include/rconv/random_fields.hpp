#pragma once

#include <cstdint>

#include "rconv/grid.hpp"

namespace rconv {

// Counter-based generator: the value at a lattice site depends only on
// (seed, site), so fields are reproducible independent of traversal order.
std::uint64_t splitmix64(std::uint64_t x);
double uniform01(std::uint64_t seed, std::uint64_t counter);
Complex gaussian_pair(std::uint64_t seed, std::uint64_t counter);

// Band-limited Gaussian-enveloped random-phase spectrum: modes with every
// per-axis signed index |m_a| <= band get coefficient
// exp(-|xi|^2 / 2) * (complex standard normal).  band must satisfy
// band <= N/2 - 1; for m-linear use cap it at N/(2 L m) lattice units times L
// (i.e. pass band_cap_modes(spec, m)).
Spectrum random_band_spectrum(const GridSpec& spec, std::uint64_t seed, int band);
GridFunction random_band_field(const GridSpec& spec, std::uint64_t seed, int band);

// largest admissible band (in mode units) for m-linear interactions without
// wrap-around: the sum of m in-band frequencies must stay inside the window
int band_cap_modes(const GridSpec& spec, int m);

} // namespace rconv
