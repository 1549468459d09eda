#pragma once

#include <iosfwd>
#include <string>

#include "sns/spectral_field.hpp"

namespace sns {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

/// Flat CSV record of a field:
///
///   # kmax=<K> n_forced=<N>
///   k1,k2,re,im
///   <one row per stored half-plane mode>
///
/// The conjugate half is omitted. Values are written in shortest round-trip
/// form, so write -> read reproduces the field bit for bit.
void write_field_csv(std::ostream& out, const SpectralField& w);
SpectralField read_field_csv(std::istream& in);

}  // namespace sns
