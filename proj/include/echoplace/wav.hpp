#pragma once

#include <string>

#include "echoplace/audio.hpp"

namespace echoplace {

// Mono PCM WAV reader (16/24/32-bit int, 32-bit float). Throws IoError on
// anything else, ParseError on malformed files.
AudioClip read_wav(const std::string& path);

// 32-bit float mono writer.
void write_wav(const std::string& path, const std::vector<double>& samples, double sample_rate);

// RIR export/import: WAV plus a text sidecar carrying t0 and provenance.
void write_rir(const std::string& wav_path, const ImpulseResponse& h,
               const std::string& provenance);
ImpulseResponse read_rir(const std::string& wav_path);

}  // namespace echoplace
