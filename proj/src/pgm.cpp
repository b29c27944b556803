#include "lathresh/pgm.hpp"

#include <fstream>
#include <iterator>

namespace lathresh {

namespace {

std::string offset_message(const std::string& what, std::size_t offset) {
    return "pgm: " + what + " at byte " + std::to_string(offset);
}

// Header tokenizer: skips whitespace and '#' comments, tracks the offset.
class Cursor {
  public:
    explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t pos() const { return pos_; }
    bool eof() const { return pos_ >= bytes_.size(); }

    void skip_separators() {
        while (!eof()) {
            std::uint8_t c = bytes_[pos_];
            if (c == '#') {
                while (!eof() && bytes_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else {
                break;
            }
        }
    }

    // Unsigned decimal token; overflow beyond 8 digits is already invalid
    // for any PGM field we accept.
    long next_int(const char* field) {
        skip_separators();
        if (eof()) throw PgmParseError(std::string("missing ") + field, pos_);
        if (bytes_[pos_] < '0' || bytes_[pos_] > '9')
            throw PgmParseError(std::string("invalid ") + field, pos_);
        long value = 0;
        int digits = 0;
        while (!eof() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            value = value * 10 + (bytes_[pos_] - '0');
            if (++digits > 8)
                throw PgmParseError(std::string(field) + " out of range", pos_);
            ++pos_;
        }
        return value;
    }

    std::uint8_t byte_at(std::size_t i) const { return bytes_[i]; }
    void advance(std::size_t n) { pos_ += n; }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

PgmParseError::PgmParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(offset_message(what, offset)), offset_(offset) {}

GrayImage read_pgm(std::span<const std::uint8_t> bytes) {
    Cursor cur(bytes);
    if (bytes.size() < 2)
        throw PgmParseError("truncated magic number", 0);
    const char m0 = static_cast<char>(bytes[0]);
    const char m1 = static_cast<char>(bytes[1]);
    if (m0 != 'P' || (m1 != '2' && m1 != '5'))
        throw PgmParseError("malformed magic number", 0);
    const bool binary = (m1 == '5');
    cur.advance(2);

    const long width = cur.next_int("width");
    const long height = cur.next_int("height");
    cur.skip_separators();
    const std::size_t maxval_at = cur.pos();  // start of the maxval token
    const long maxval = cur.next_int("maxval");
    if (width <= 0 || height <= 0)
        throw PgmParseError("zero image dimension", 2);
    if (maxval > 255) throw PgmParseError("maxval exceeds 255", maxval_at);
    if (maxval <= 0) throw PgmParseError("invalid maxval", maxval_at);

    GrayImage img;
    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    const std::size_t count = static_cast<std::size_t>(width) * height;
    img.pixels.reserve(count);

    if (binary) {
        // Exactly one whitespace byte separates the header from the raster.
        if (cur.eof()) throw PgmParseError("truncated pixel data", cur.pos());
        cur.advance(1);
        if (cur.pos() + count > bytes.size())
            throw PgmParseError("truncated pixel data", bytes.size());
        for (std::size_t i = 0; i < count; ++i) {
            std::uint8_t v = cur.byte_at(cur.pos() + i);
            if (v > maxval)
                throw PgmParseError("pixel exceeds maxval", cur.pos() + i);
            img.pixels.push_back(v);
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::size_t at = cur.pos();
            long v = cur.next_int("pixel");
            if (v > maxval) throw PgmParseError("pixel exceeds maxval", at);
            img.pixels.push_back(static_cast<std::uint8_t>(v));
        }
    }
    return img;
}

GrayImage read_pgm_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return read_pgm(bytes);
}

std::vector<std::uint8_t> write_pgm(const GrayImage& img) {
    if (img.width <= 0 || img.height <= 0)
        throw std::invalid_argument("pgm: refusing to write empty image");
    if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
        throw std::invalid_argument("pgm: pixel buffer does not match dimensions");
    std::string header = "P5\n" + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

void write_pgm_file(const GrayImage& img, const std::filesystem::path& path) {
    auto bytes = write_pgm(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

GrayImage render_segmentation(const GrayImage& img, std::span<const int> thresholds,
                              std::span<const std::uint8_t> labels) {
    if (labels.size() != thresholds.size() + 1)
        throw std::invalid_argument("render: labels must be one longer than thresholds");
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (thresholds[i] <= thresholds[i - 1])
            throw std::invalid_argument("render: thresholds not strictly ascending");

    GrayImage out;
    out.width = img.width;
    out.height = img.height;
    out.pixels.resize(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        std::size_t c = 0;
        while (c < thresholds.size() && thresholds[c] <= img.pixels[i]) ++c;
        out.pixels[i] = labels[c];
    }
    return out;
}

}  // namespace lathresh
