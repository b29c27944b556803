#ifndef LATHRESH_PGM_HPP
#define LATHRESH_PGM_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lathresh {

inline constexpr int kGrayLevels = 256;

// 8-bit grayscale raster, row-major. Immutable by convention once built.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    std::size_t pixel_count() const { return pixels.size(); }
    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
};

// Parse failure; the message names the byte offset of the offending data.
class PgmParseError : public std::runtime_error {
  public:
    PgmParseError(const std::string& what, std::size_t offset);
    std::size_t byte_offset() const { return offset_; }

  private:
    std::size_t offset_;
};

// Reads binary (P5) or ASCII (P2) PGM with maxval <= 255. Header comments
// ('#' to end of line) are skipped. Zero-dimension images are rejected.
GrayImage read_pgm(std::span<const std::uint8_t> bytes);
GrayImage read_pgm_file(const std::filesystem::path& path);

// Emits binary P5 with header "P5\n<w> <h>\n255\n". Pixel values are kept
// verbatim regardless of the maxval the image was read with.
std::vector<std::uint8_t> write_pgm(const GrayImage& img);
void write_pgm_file(const GrayImage& img, const std::filesystem::path& path);

// Maps pixel p to labels[c] with c = number of thresholds <= p, i.e. a pixel
// equal to a threshold belongs to the higher class. thresholds must be
// strictly ascending with labels one entry longer.
GrayImage render_segmentation(const GrayImage& img, std::span<const int> thresholds,
                              std::span<const std::uint8_t> labels);

}  // namespace lathresh

#endif
