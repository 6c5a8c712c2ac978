#include "echoplace/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "echoplace/errors.hpp"

namespace echoplace {

namespace {

uint32_t rd_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t rd_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<char*>(b), 4);
}
void wr_u16(std::ostream& os, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<char*>(b), 2);
}

std::string sidecar_path(const std::string& wav_path) { return wav_path + ".meta"; }

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open WAV file: " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 44 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw ParseError("not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char* pcm = nullptr;
  size_t pcm_len = 0;

  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const char* id = reinterpret_cast<const char*>(data.data() + pos);
    const uint32_t len = rd_u32(data.data() + pos + 4);
    const unsigned char* body = data.data() + pos + 8;
    if (pos + 8 + len > data.size()) throw ParseError("truncated WAV chunk in " + path);
    if (std::memcmp(id, "fmt ", 4) == 0 && len >= 16) {
      format = rd_u16(body);
      channels = rd_u16(body + 2);
      rate = rd_u32(body + 4);
      bits = rd_u16(body + 14);
    } else if (std::memcmp(id, "data", 4) == 0) {
      pcm = body;
      pcm_len = len;
    }
    pos += 8 + len + (len & 1);
  }
  if (!pcm || rate == 0) throw ParseError("WAV missing fmt/data chunk: " + path);
  if (channels != 1) throw IoError("WAV must be mono: " + path);

  AudioClip clip;
  clip.sample_rate = rate;
  if (format == 3 && bits == 32) {
    const size_t n = pcm_len / 4;
    clip.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      float v;
      std::memcpy(&v, pcm + 4 * i, 4);
      clip.samples[i] = v;
    }
  } else if (format == 1 && bits == 16) {
    const size_t n = pcm_len / 2;
    clip.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      int16_t v;
      std::memcpy(&v, pcm + 2 * i, 2);
      clip.samples[i] = v / 32768.0;
    }
  } else if (format == 1 && bits == 24) {
    const size_t n = pcm_len / 3;
    clip.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const unsigned char* b = pcm + 3 * i;
      int32_t v = (b[0] << 8) | (b[1] << 16) | (static_cast<int32_t>(b[2]) << 24);
      clip.samples[i] = (v >> 8) / 8388608.0;
    }
  } else if (format == 1 && bits == 32) {
    const size_t n = pcm_len / 4;
    clip.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      int32_t v;
      std::memcpy(&v, pcm + 4 * i, 4);
      clip.samples[i] = v / 2147483648.0;
    }
  } else {
    throw IoError("unsupported WAV encoding (" + std::to_string(format) + "/" +
                  std::to_string(bits) + " bit) in " + path);
  }
  return clip;
}

void write_wav(const std::string& path, const std::vector<double>& samples, double sample_rate) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write WAV file: " + path);
  const uint32_t n = static_cast<uint32_t>(samples.size());
  const uint32_t data_len = n * 4;
  f.write("RIFF", 4);
  wr_u32(f, 36 + data_len);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  wr_u32(f, 16);
  wr_u16(f, 3);  // IEEE float
  wr_u16(f, 1);
  wr_u32(f, static_cast<uint32_t>(sample_rate));
  wr_u32(f, static_cast<uint32_t>(sample_rate) * 4);
  wr_u16(f, 4);
  wr_u16(f, 32);
  f.write("data", 4);
  wr_u32(f, data_len);
  for (double s : samples) {
    const float v = static_cast<float>(s);
    f.write(reinterpret_cast<const char*>(&v), 4);
  }
}

void write_rir(const std::string& wav_path, const ImpulseResponse& h,
               const std::string& provenance) {
  write_wav(wav_path, h.samples, h.sample_rate);
  std::ofstream meta(sidecar_path(wav_path));
  if (!meta) throw IoError("cannot write sidecar: " + sidecar_path(wav_path));
  meta << "t0_s=" << h.t0_s << "\n";
  meta << "provenance=" << provenance << "\n";
}

ImpulseResponse read_rir(const std::string& wav_path) {
  const AudioClip clip = read_wav(wav_path);
  ImpulseResponse h;
  h.samples = clip.samples;
  h.sample_rate = clip.sample_rate;
  std::ifstream meta(sidecar_path(wav_path));
  if (meta) {
    std::string line;
    while (std::getline(meta, line)) {
      if (line.rfind("t0_s=", 0) == 0) {
        try {
          h.t0_s = std::stod(line.substr(5));
        } catch (const std::exception&) {
          throw ParseError("bad t0_s in sidecar " + sidecar_path(wav_path));
        }
      }
    }
  }
  return h;
}

}  // namespace echoplace
