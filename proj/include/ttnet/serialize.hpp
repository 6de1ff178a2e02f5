#pragma once

#include <ttnet/nn.hpp>
#include <ttnet/tt_matrix.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

// Binary records: a 4-byte tag, a little-endian u32 format version, then the payload. Integers are u64
// little-endian and reals are IEEE-754 doubles stored bit-for-bit (little-endian), so loads are exact.
namespace ttnet::io {

inline constexpr std::uint32_t format_version = 1;

class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}

    void tag(std::string_view t) {
        if (t.size() != 4) throw ValueError("record tags are four characters");
        os_.write(t.data(), 4);
        u32(format_version);
    }
    void u8(std::uint8_t v) { os_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) { le(v); }
    void u64(std::uint64_t v) { le(v); }
    void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
    void sizes(std::span<const std::size_t> v) {
        u64(v.size());
        for (std::size_t x : v) u64(x);
    }
    void reals(std::span<const double> v) {
        for (double x : v) f64(x);
    }
    void string(std::string_view s) {
        u64(s.size());
        os_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

private:
    template <typename T>
    void le(T v) {
        std::array<char, sizeof(T)> buf{};
        for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
        os_.write(buf.data(), buf.size());
    }

    std::ostream& os_;
};

class Reader {
public:
    explicit Reader(std::istream& is) : is_(is) {}

    void expect_tag(std::string_view t) {
        std::array<char, 4> buf{};
        read(buf.data(), 4);
        if (std::string_view(buf.data(), 4) != t) {
            throw FormatError("expected record '" + std::string(t) + "', found '" + std::string(buf.data(), 4) + "'");
        }
        const std::uint32_t version = u32();
        if (version != format_version) {
            throw FormatError("unsupported record version " + std::to_string(version) + " for '" + std::string(t) + "'");
        }
    }
    std::uint8_t u8() {
        char c = 0;
        read(&c, 1);
        return static_cast<std::uint8_t>(c);
    }
    std::uint32_t u32() { return le<std::uint32_t>(); }
    std::uint64_t u64() { return le<std::uint64_t>(); }
    double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
    std::vector<std::size_t> sizes(std::size_t max_count = 1u << 20) {
        const std::uint64_t n = u64();
        if (n > max_count) throw FormatError("implausible list length in record");
        std::vector<std::size_t> v(n);
        for (auto& x : v) x = static_cast<std::size_t>(u64());
        return v;
    }
    void reals(std::span<double> out) {
        for (double& x : out) x = f64();
    }
    std::string string(std::size_t max_len = 1u << 20) {
        const std::uint64_t n = u64();
        if (n > max_len) throw FormatError("implausible string length in record");
        std::string s(n, '\0');
        read(s.data(), n);
        return s;
    }

private:
    void read(char* dst, std::size_t n) {
        is_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n) throw FormatError("unexpected end of record");
    }
    template <typename T>
    T le() {
        std::array<unsigned char, sizeof(T)> buf{};
        read(reinterpret_cast<char*>(buf.data()), buf.size());
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
        return v;
    }

    std::istream& is_;
};

constexpr std::size_t max_elements = std::size_t{1} << 32;

inline void write_tensor(Writer& w, const DenseTensor& t) {
    w.tag("TNSR");
    w.sizes(t.shape());
    w.reals(t.data());
}

inline DenseTensor read_tensor(Reader& r) {
    r.expect_tag("TNSR");
    Shape shape = r.sizes(64);
    if (shape.empty()) throw FormatError("tensor record has an empty shape");
    std::size_t n = 1;
    for (std::size_t s : shape) {
        if (s == 0 || n > max_elements / s) throw FormatError("tensor record has an invalid shape");
        n *= s;
    }
    std::vector<double> data(n);
    r.reals(data);
    return DenseTensor(std::move(shape), std::move(data));
}

inline void write_tt(Writer& w, const TTMatrix& tt) {
    w.tag("TTMX");
    w.u64(tt.order());
    w.sizes(tt.input_modes());
    w.sizes(tt.output_modes());
    w.sizes(tt.ranks());
    for (const auto& c : tt.cores()) w.reals(c.data());
}

inline TTMatrix read_tt(Reader& r) {
    r.expect_tag("TTMX");
    const std::uint64_t order = r.u64();
    const auto in = r.sizes(4096);
    const auto out = r.sizes(4096);
    const auto ranks = r.sizes(4097);
    if (order == 0 || in.size() != order || out.size() != order || ranks.size() != order + 1) {
        throw FormatError("TT record has inconsistent mode lists");
    }
    std::vector<DenseTensor> cores;
    for (std::size_t k = 0; k < order; ++k) {
        const Shape shape{ranks[k], in[k], out[k], ranks[k + 1]};
        std::size_t n = 1;
        for (std::size_t s : shape) {
            if (s == 0 || n > max_elements / s) throw FormatError("TT record has an invalid core shape");
            n *= s;
        }
        std::vector<double> data(n);
        r.reals(data);
        cores.emplace_back(shape, std::move(data));
    }
    try {
        return TTMatrix(std::move(cores));
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("TT record: ") + e.what());
    }
}

inline void write_network(Writer& w, const Network& net) {
    w.tag("TTNW");
    w.u64(net.layers().size());
    for (const auto& layer : net.layers()) {
        if (const auto* d = std::get_if<DenseLayer>(&layer)) {
            w.u8(0);
            w.u8(d->bias ? 1 : 0);
            write_tensor(w, d->weights);
            if (d->bias) write_tensor(w, *d->bias);
        } else if (const auto* t = std::get_if<TTLayer>(&layer)) {
            w.u8(1);
            write_tt(w, t->tt);
            write_tensor(w, t->bias);
        } else {
            w.u8(2);
            w.u8(std::get<ActivationLayer>(layer).kind == ActivationKind::relu ? 0 : 1);
        }
    }
}

inline Network read_network(Reader& r) {
    r.expect_tag("TTNW");
    const std::uint64_t count = r.u64();
    if (count > 4096) throw FormatError("network record has an implausible layer count");
    std::vector<Layer> layers;
    for (std::uint64_t i = 0; i < count; ++i) {
        switch (r.u8()) {
        case 0: {
            const bool has_bias = r.u8() != 0;
            DenseLayer d{read_tensor(r), std::nullopt};
            if (has_bias) d.bias = read_tensor(r);
            layers.emplace_back(std::move(d));
            break;
        }
        case 1: {
            TTMatrix tt = read_tt(r);
            layers.emplace_back(TTLayer{std::move(tt), read_tensor(r)});
            break;
        }
        case 2:
            layers.emplace_back(ActivationLayer{r.u8() == 0 ? ActivationKind::relu : ActivationKind::identity});
            break;
        default:
            throw FormatError("network record has an unknown layer kind");
        }
    }
    try {
        return Network(std::move(layers));
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("network record: ") + e.what());
    }
}

template <typename Fn>
void write_file(const std::string& path, Fn&& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open '" + path + "' for writing");
    Writer w(os);
    body(w);
    if (!os) throw FormatError("failed writing '" + path + "'");
}

template <typename Fn>
auto read_file(const std::string& path, Fn&& body) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open '" + path + "'");
    Reader r(is);
    return body(r);
}

inline void save_tt(const std::string& path, const TTMatrix& tt) {
    write_file(path, [&](Writer& w) { write_tt(w, tt); });
}
inline TTMatrix load_tt(const std::string& path) {
    return read_file(path, [](Reader& r) { return read_tt(r); });
}
inline void save_network(const std::string& path, const Network& net) {
    write_file(path, [&](Writer& w) { write_network(w, net); });
}
inline Network load_network(const std::string& path) {
    return read_file(path, [](Reader& r) { return read_network(r); });
}
inline void save_tensor(const std::string& path, const DenseTensor& t) {
    write_file(path, [&](Writer& w) { write_tensor(w, t); });
}
inline DenseTensor load_tensor(const std::string& path) {
    return read_file(path, [](Reader& r) { return read_tensor(r); });
}

} // namespace ttnet::io
