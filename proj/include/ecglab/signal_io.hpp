#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "ecglab/signal.hpp"

namespace ecglab::io {

// Text layout: a header line `fs=<int>` followed by one decimal amplitude (mV)
// per line. Values are written with 17 significant digits so they round-trip.
//
// Binary layout: magic "ECG1", uint32 LE sampling rate, then IEEE-754 float64 LE
// samples until end of file.

void write_text(std::ostream& os, const Signal& s);
Signal read_text(std::istream& is);

void write_binary(std::ostream& os, const Signal& s);
Signal read_binary(std::istream& is);

/// Chooses the binary layout when the extension is `.bin` or `.ecg1`, text otherwise.
void save(const std::filesystem::path& path, const Signal& s);

/// Sniffs the magic bytes, so either layout loads regardless of extension.
Signal load(const std::filesystem::path& path);

// Little-endian helpers shared with the model file formats.
void put_u32(std::ostream& os, std::uint32_t v);
void put_f64(std::ostream& os, double v);
std::uint32_t get_u32(std::istream& is);
double get_f64(std::istream& is);

}  // namespace ecglab::io
