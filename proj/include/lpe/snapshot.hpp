#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "lpe/grid.hpp"

namespace lpe {

/// Field snapshot file.
///
/// Layout (all little-endian):
///   char[4]  magic "LPSF"
///   u32      format version (1)
///   u32      transform convention tag (kConventionTag)
///   i32      d, i32 N, f64 M, f64 dealias cutoff, i32 components
///   complex64 coefficients (f32 re, f32 im), component-major, then row-major
///   over frequencies with every axis ascending from m = -N/2 to N/2 - 1.
void write_snapshot(std::ostream& os, const SpectralField& f);
void write_snapshot(const std::string& path, const SpectralField& f);
SpectralField read_snapshot(std::istream& is);
SpectralField read_snapshot(const std::string& path);

}  // namespace lpe
