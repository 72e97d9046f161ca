#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srb/audio/buffer.hpp"

namespace srb::audio {

enum class WavEncoding { Pcm16, Float32 };

// Reads RIFF/WAVE with PCM16 or IEEE float32 data (plain or EXTENSIBLE
// format tag). Multichannel input is downmixed by channel mean.
AudioBuffer read_wav(const std::string& path);
AudioBuffer decode_wav(const std::vector<std::uint8_t>& bytes);

// PCM16 export saturates to [-32768, 32767]; float32 export is unclipped.
void write_wav(const std::string& path, const AudioBuffer& audio,
               WavEncoding encoding = WavEncoding::Pcm16);
std::vector<std::uint8_t> encode_wav(const AudioBuffer& audio,
                                     WavEncoding encoding = WavEncoding::Pcm16);

}  // namespace srb::audio
