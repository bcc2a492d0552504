#pragma once

// File formats.
//
// Generator-set file (text):
//     GBPD-GENERATORS dim=<d> count=<n>
//     # free-form comment / provenance lines
//     <d> <s_1..s_d> <M upper triangle, row by row> <w>      (one per generator)
// Reals are written with 17 significant digits, so a write/read cycle is
// exact.
//
// Label image (binary, little-endian):
//     offset  0  char[8]  "GBPDIMG1"
//             8  u8       dim
//             9  u8[3]    zero
//            12  u32[4]   counts per axis (unused axes 0)
//            28  u32      number of generators
//            32  u64      number of points
//            40  u8[24]   zero
//            64  f64[dim] origin, then f64[dim] spacing
//            ..  u32[N]   labels, axis 0 fastest (0xFFFFFFFF = no label)

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gbpd/geometry.hpp"
#include "gbpd/poisson.hpp"
#include "gbpd/render.hpp"

namespace gbpd {

// Shortest decimal text that parses back to the same double (17 digits).
std::string format_real(double v);
// Full-string parse; throws Parse with `what` in the message.
double parse_real(const std::string& text, const std::string& what);

struct GeneratorFile {
    GeneratorSet set;
    std::vector<std::string> comments;  // without the leading "# "
};

void write_generator_set(std::ostream& out, const GeneratorSet& set, const std::vector<std::string>& comments = {});
GeneratorFile read_generator_set(std::istream& in);
void save_generator_set(const std::string& path, const GeneratorSet& set,
                        const std::vector<std::string>& comments = {});
GeneratorFile load_generator_set(const std::string& path);

inline constexpr char kImageMagic[8] = {'G', 'B', 'P', 'D', 'I', 'M', 'G', '1'};
inline constexpr std::size_t kImageHeaderBytes = 64;

void write_label_image(std::ostream& out, const LabelImage& image, std::size_t generators);
struct ImageFile {
    LabelImage image;  // best_dist left empty
    std::size_t generators = 0;
};
ImageFile read_label_image(std::istream& in);

// RGB for label i: hue frac(i * 0.618034), fixed saturation and value.
std::array<std::uint8_t, 3> label_color(std::uint32_t label);

// Binary PPM of the labels. 3D and 4D images show the plane through the
// middle index of every axis beyond the second.
void write_preview_ppm(std::ostream& out, const LabelImage& image);
// Binary PGM mask, 255 where mask[p] != 0, same slicing as the PPM.
void write_mask_pgm(std::ostream& out, const GridSpec& grid, const std::vector<std::uint32_t>& mask);

void write_stats_csv_header(std::ostream& out);
void write_stats_csv_row(std::ostream& out, const RenderStats& stats);

void write_report_csv_header(std::ostream& out);
void write_report_csv_row(std::ostream& out, const ComplexityReport& report);
void write_report_table(std::ostream& out, const std::vector<ComplexityReport>& reports);

}  // namespace gbpd
