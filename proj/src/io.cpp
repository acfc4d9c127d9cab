#include "speckle/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>
#include <vector>

namespace speckle {
namespace {

constexpr char kMagic[6] = {'S', 'P', 'K', 'L', '1', '\0'};

class ByteWriter {
public:
    template <typename U>
    void put_uint(U v) {
        for (std::size_t i = 0; i < sizeof(U); ++i)
            bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void put_u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
    void put_f64(double v) { put_uint(std::bit_cast<std::uint64_t>(v)); }
    void put_f32(float v) { put_uint(std::bit_cast<std::uint32_t>(v)); }
    void put_raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
    const std::vector<char>& bytes() const { return bytes_; }

private:
    std::vector<char> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

    template <typename U>
    U get_uint() {
        need(sizeof(U));
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(U);
        return v;
    }
    std::uint8_t get_u8() { return get_uint<std::uint8_t>(); }
    double get_f64() { return std::bit_cast<double>(get_uint<std::uint64_t>()); }
    float get_f32() { return std::bit_cast<float>(get_uint<std::uint32_t>()); }
    void get_raw(char* out, std::size_t n) {
        need(n);
        std::memcpy(out, bytes_.data() + pos_, n);
        pos_ += n;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) fail(ErrorKind::format, "unexpected end of file");
    }
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
};

std::vector<char> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const fs::path& path, const std::vector<char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::io, "short write to " + path.string());
}

}  // namespace

void write_bundle(const fs::path& path, const MeasurementSet& ms) {
    ms.validate();
    const ApertureMask& ap = ms.aperture;
    ByteWriter w;
    w.put_raw(kMagic, sizeof(kMagic));
    w.put_uint(static_cast<std::uint32_t>(ms.height()));
    w.put_uint(static_cast<std::uint32_t>(ms.width()));
    w.put_uint(static_cast<std::uint32_t>(ms.looks()));
    w.put_f64(ms.sigma_z);
    w.put_u8(static_cast<std::uint8_t>(ap.spec().kind));
    w.put_f64(ap.center_h());
    w.put_f64(ap.center_w());
    w.put_f64(ap.spec().radius);
    w.put_f64(ap.spec().inner_radius);
    w.put_uint(ms.seed);
    for (const auto& y : ms.measurements) {
        for (const cplx& v : y) {
            w.put_f64(v.real());
            w.put_f64(v.imag());
        }
    }
    if (ap.spec().kind == ApertureKind::custom)
        for (double v : ap.centered()) w.put_u8(v != 0.0 ? 1 : 0);
    dump(path, w.bytes());
}

MeasurementSet read_bundle(const fs::path& path) {
    ByteReader r(slurp(path));
    char magic[6];
    r.get_raw(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        fail(ErrorKind::format, path.string() + " is not a measurement bundle");
    const auto H = static_cast<int>(r.get_uint<std::uint32_t>());
    const auto W = static_cast<int>(r.get_uint<std::uint32_t>());
    const auto L = static_cast<int>(r.get_uint<std::uint32_t>());
    if (H < 1 || W < 1 || L < 1) fail(ErrorKind::format, "bundle has empty dimensions");

    MeasurementSet ms;
    ms.sigma_z = r.get_f64();
    const std::uint8_t kind = r.get_u8();
    if (kind > static_cast<std::uint8_t>(ApertureKind::custom))
        fail(ErrorKind::format, "unknown aperture kind in bundle");
    ApertureSpec spec;
    spec.kind = static_cast<ApertureKind>(kind);
    spec.center_h = r.get_f64();
    spec.center_w = r.get_f64();
    spec.radius = r.get_f64();
    spec.inner_radius = r.get_f64();
    ms.seed = r.get_uint<std::uint64_t>();

    const std::size_t n = static_cast<std::size_t>(H) * W;
    if (r.remaining() < n * L * 16) fail(ErrorKind::format, "bundle is truncated");
    for (int l = 0; l < L; ++l) {
        ComplexField y(H, W);
        for (std::size_t i = 0; i < n; ++i) {
            const double re = r.get_f64();
            const double im = r.get_f64();
            y[i] = cplx(re, im);
        }
        ms.measurements.push_back(std::move(y));
    }
    if (spec.kind == ApertureKind::custom) {
        RealGrid mask(H, W);
        for (std::size_t i = 0; i < n; ++i) mask[i] = r.get_u8() != 0 ? 1.0 : 0.0;
        ms.aperture = make_custom_aperture(mask);
    } else {
        ms.aperture = make_aperture(H, W, spec);
    }
    if (r.remaining() != 0) fail(ErrorKind::format, "trailing bytes in bundle");
    return ms;
}

RealGrid read_pgm(const fs::path& path) {
    const std::vector<char> bytes = slurp(path);
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
        std::string tok;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])))
            tok.push_back(bytes[pos++]);
        if (tok.empty()) fail(ErrorKind::format, "truncated PGM header in " + path.string());
        return tok;
    };
    const std::string magic = next_token();
    if (magic != "P5" && magic != "P2") fail(ErrorKind::format, path.string() + " is not a PGM");
    int W = 0, H = 0, maxval = 0;
    try {
        W = std::stoi(next_token());
        H = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::logic_error&) {
        fail(ErrorKind::format, "bad PGM header in " + path.string());
    }
    if (W < 1 || H < 1 || maxval < 1 || maxval > 65535)
        fail(ErrorKind::format, "bad PGM header in " + path.string());

    RealGrid out(H, W);
    const double rescale = kDisplayPeak / maxval;
    if (magic == "P2") {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::stoi(next_token()) * rescale;
        return out;
    }
    ++pos;  // single whitespace after maxval
    const std::size_t sample = maxval < 256 ? 1 : 2;
    if (bytes.size() < pos + out.size() * sample) fail(ErrorKind::format, "truncated PGM data");
    for (std::size_t i = 0; i < out.size(); ++i) {
        unsigned v = static_cast<unsigned char>(bytes[pos + i * sample]);
        if (sample == 2) v = (v << 8) | static_cast<unsigned char>(bytes[pos + i * sample + 1]);
        out[i] = v * rescale;
    }
    return out;
}

void write_pgm(const fs::path& path, const RealGrid& display) {
    std::ostringstream header;
    header << "P5\n" << display.width() << ' ' << display.height() << "\n255\n";
    const std::string h = header.str();
    std::vector<char> bytes(h.begin(), h.end());
    for (double v : display) {
        const double c = std::clamp(std::round(v), 0.0, 255.0);
        bytes.push_back(static_cast<char>(static_cast<unsigned char>(c)));
    }
    dump(path, bytes);
}

fs::path sidecar_path(const fs::path& raw) { return fs::path(raw.string() + ".json"); }

void write_raw(const fs::path& path, const RealGrid& values, double scale) {
    ByteWriter w;
    for (double v : values) w.put_f32(static_cast<float>(v));
    dump(path, w.bytes());
    nlohmann::json side = {{"height", values.height()},
                           {"width", values.width()},
                           {"dtype", "f32"},
                           {"scale", scale}};
    std::ofstream out(sidecar_path(path));
    if (!out) fail(ErrorKind::io, "cannot write sidecar for " + path.string());
    out << side.dump(2) << '\n';
}

RawImage read_raw(const fs::path& path, int expected_height, int expected_width) {
    int H = expected_height, W = expected_width;
    RawImage img;
    const fs::path side = sidecar_path(path);
    if (fs::exists(side)) {
        try {
            std::ifstream in(side);
            const auto j = nlohmann::json::parse(in);
            H = j.at("height").get<int>();
            W = j.at("width").get<int>();
            if (j.value("dtype", std::string("f32")) != "f32")
                fail(ErrorKind::format, "unsupported raw dtype in " + side.string());
            img.scale = j.value("scale", 1.0);
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::format, "bad sidecar " + side.string() + ": " + e.what());
        }
        if ((expected_height != 0 && H != expected_height) ||
            (expected_width != 0 && W != expected_width))
            fail(ErrorKind::dimension_mismatch, "raw image shape differs from the expected one");
    }
    if (H < 1 || W < 1) fail(ErrorKind::format, "raw image without sidecar needs a known shape");
    ByteReader r(slurp(path));
    if (r.remaining() != static_cast<std::size_t>(H) * W * 4)
        fail(ErrorKind::format, "raw image size does not match " + std::to_string(H) + "x" +
                                    std::to_string(W) + " f32");
    img.values = RealGrid(H, W);
    for (double& v : img.values) v = r.get_f32();
    return img;
}

void write_estimate(const fs::path& raw_path, const ReflectivityImage& normalized) {
    write_raw(raw_path, normalized.grid(), kDisplayPeak);
    fs::path preview = raw_path;
    preview.replace_extension(".pgm");
    write_pgm(preview, scaled(normalized.grid(), kDisplayPeak));
}

RealGrid read_display_image(const fs::path& path) {
    if (path.extension() == ".pgm") return read_pgm(path);
    RawImage raw = read_raw(path);
    return scaled(raw.values, raw.scale);
}

}  // namespace speckle
