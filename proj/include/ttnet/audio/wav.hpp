#pragma once

#include <ttnet/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ttnet::audio {

struct Waveform {
    std::vector<double> samples;
    int sample_rate = 16000;

    std::size_t size() const { return samples.size(); }
    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

inline void validate(const Waveform& w) {
    if (w.sample_rate <= 0) throw ValueError("waveform sample rate must be positive");
    for (double s : w.samples) {
        if (!std::isfinite(s)) throw ValueError("waveform contains non-finite samples");
    }
}

namespace detail {

inline std::uint32_t get_le(std::span<const unsigned char> b, std::size_t pos, std::size_t n) {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(b[pos + i]) << (8 * i);
    return v;
}

inline void put_le(std::vector<unsigned char>& out, std::uint32_t v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

inline void put_tag(std::vector<unsigned char>& out, std::string_view tag) { out.insert(out.end(), tag.begin(), tag.end()); }

} // namespace detail

inline std::int16_t quantize_pcm16(double x) {
    const double scaled = std::round(std::clamp(x, -1.0, 1.0) * 32768.0);
    return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

// Parses a RIFF/WAVE image holding 16-bit PCM (plain or WAVE_FORMAT_EXTENSIBLE). One Waveform per channel.
inline std::vector<Waveform> parse_wav(std::span<const unsigned char> bytes) {
    using detail::get_le;
    auto tag_at = [&](std::size_t pos) { return std::string_view(reinterpret_cast<const char*>(bytes.data()) + pos, 4); };
    if (bytes.size() < 12 || tag_at(0) != "RIFF" || tag_at(8) != "WAVE") throw FormatError("malformed WAV header");

    bool have_fmt = false;
    std::uint32_t channels = 0, rate = 0, bits = 0, block_align = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::string_view id = tag_at(pos);
        const std::size_t len = get_le(bytes, pos + 4, 4);
        const std::size_t body = pos + 8;
        if (len > bytes.size() - body) {
            // tolerate a data chunk whose size field overruns (streamed writers), nothing else
            if (id != "data") throw FormatError("WAV chunk overruns file");
        }
        if (id == "fmt ") {
            if (len < 16) throw FormatError("malformed WAV fmt chunk");
            std::uint32_t format = get_le(bytes, body, 2);
            channels = get_le(bytes, body + 2, 2);
            rate = get_le(bytes, body + 4, 4);
            block_align = get_le(bytes, body + 12, 2);
            bits = get_le(bytes, body + 14, 2);
            if (format == 0xFFFE && len >= 40) format = get_le(bytes, body + 24, 2);
            if (format != 1 || bits != 16) throw FormatError("unsupported WAV encoding (only 16-bit PCM)");
            if (channels == 0 || rate == 0 || block_align != 2 * channels) throw FormatError("malformed WAV fmt chunk");
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) throw FormatError("WAV data chunk precedes fmt chunk");
            const std::size_t avail = std::min(len, bytes.size() - body);
            const std::size_t frames = avail / block_align;
            std::vector<Waveform> out(channels);
            for (auto& w : out) {
                w.sample_rate = static_cast<int>(rate);
                w.samples.resize(frames);
            }
            for (std::size_t f = 0; f < frames; ++f) {
                for (std::size_t c = 0; c < channels; ++c) {
                    const auto raw = static_cast<std::uint16_t>(get_le(bytes, body + f * block_align + 2 * c, 2));
                    out[c].samples[f] = static_cast<std::int16_t>(raw) / 32768.0;
                }
            }
            return out;
        }
        pos = body + len + (len & 1);
    }
    throw FormatError(have_fmt ? "WAV file has no data chunk" : "malformed WAV header");
}

inline std::vector<unsigned char> encode_wav(std::span<const Waveform> channels) {
    if (channels.empty()) throw ValueError("write_wav needs at least one channel");
    const std::size_t frames = channels[0].size();
    const int rate = channels[0].sample_rate;
    for (const auto& c : channels) {
        validate(c);
        if (c.size() != frames || c.sample_rate != rate) throw ValueError("write_wav channels differ in length or rate");
    }
    const auto nch = static_cast<std::uint32_t>(channels.size());
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * nch * 2);

    std::vector<unsigned char> out;
    out.reserve(44 + data_bytes);
    detail::put_tag(out, "RIFF");
    detail::put_le(out, 36 + data_bytes, 4);
    detail::put_tag(out, "WAVE");
    detail::put_tag(out, "fmt ");
    detail::put_le(out, 16, 4);
    detail::put_le(out, 1, 2);
    detail::put_le(out, nch, 2);
    detail::put_le(out, static_cast<std::uint32_t>(rate), 4);
    detail::put_le(out, static_cast<std::uint32_t>(rate) * nch * 2, 4);
    detail::put_le(out, nch * 2, 2);
    detail::put_le(out, 16, 2);
    detail::put_tag(out, "data");
    detail::put_le(out, data_bytes, 4);
    for (std::size_t f = 0; f < frames; ++f) {
        for (const auto& c : channels) detail::put_le(out, static_cast<std::uint16_t>(quantize_pcm16(c.samples[f])), 2);
    }
    return out;
}

inline std::vector<Waveform> read_wav(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    try {
        return parse_wav(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

inline Waveform read_wav_mono(const std::string& path) {
    auto ch = read_wav(path);
    if (ch.size() != 1) throw FormatError(path + ": expected a mono file, found " + std::to_string(ch.size()) + " channels");
    return std::move(ch[0]);
}

inline void write_wav(const std::string& path, std::span<const Waveform> channels) {
    const auto bytes = encode_wav(channels);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open '" + path + "' for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw FormatError("failed writing '" + path + "'");
}

inline void write_wav(const std::string& path, const Waveform& w) { write_wav(path, std::span<const Waveform>(&w, 1)); }

} // namespace ttnet::audio
