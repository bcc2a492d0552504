#include "gbpd/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <type_traits>

namespace gbpd {

std::string format_real(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_real(const std::string& text, const std::string& what) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || text.empty())
        fail(ErrorCode::Parse, what + ": cannot parse '" + text + "' as a real number");
    return v;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

long parse_header_int(const std::string& tok, const std::string& key, std::size_t line) {
    const std::string prefix = key + "=";
    if (tok.rfind(prefix, 0) != 0)
        fail(ErrorCode::Parse, "line " + std::to_string(line) + ": expected '" + prefix + "...' in header");
    long v = 0;
    const char* first = tok.data() + prefix.size();
    const char* last = tok.data() + tok.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        fail(ErrorCode::Parse, "line " + std::to_string(line) + ": bad integer in '" + tok + "'");
    return v;
}

template <class T>
void put_le(std::ostream& out, T v) {
    unsigned char bytes[sizeof(T)];
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, double>) {
        std::memcpy(&bits, &v, sizeof v);
    } else {
        bits = static_cast<std::uint64_t>(v);
    }
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) fail(ErrorCode::Io, "label image is truncated");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    if constexpr (std::is_same_v<T, double>) {
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    } else {
        return static_cast<T>(bits);
    }
}

}  // namespace

void write_generator_set(std::ostream& out, const GeneratorSet& set, const std::vector<std::string>& comments) {
    const int d = set.dim();
    out << "GBPD-GENERATORS dim=" << d << " count=" << set.size() << '\n';
    for (const auto& c : comments) out << "# " << c << '\n';
    for (const auto& g : set) {
        out << d;
        for (int i = 0; i < d; ++i) out << ' ' << format_real(g.seed[i]);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) out << ' ' << format_real(g.aniso(i, j));
        out << ' ' << format_real(g.weight) << '\n';
    }
}

GeneratorFile read_generator_set(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) fail(ErrorCode::Parse, "generator file is empty");
    ++lineno;
    const auto head = split_ws(line);
    if (head.size() != 3 || head[0] != "GBPD-GENERATORS")
        fail(ErrorCode::Parse, "line 1: expected 'GBPD-GENERATORS dim=<d> count=<n>'");
    const long dim = parse_header_int(head[1], "dim", lineno);
    const long count = parse_header_int(head[2], "count", lineno);
    if (dim < 1 || dim > kMaxDim) fail(ErrorCode::Parse, "line 1: unsupported dim " + std::to_string(dim));
    if (count < 1) fail(ErrorCode::Parse, "line 1: count must be positive");

    GeneratorFile file;
    std::vector<Generator> items;
    const int d = static_cast<int>(dim);
    const std::size_t expected = 2 + static_cast<std::size_t>(d + d * (d + 1) / 2);
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            file.comments.push_back(trim(t.substr(1)));
            continue;
        }
        const auto tok = split_ws(t);
        const std::string where = "line " + std::to_string(lineno);
        if (tok.size() != expected)
            fail(ErrorCode::Parse, where + ": expected " + std::to_string(expected) + " fields, found " +
                                       std::to_string(tok.size()));
        if (tok[0] != std::to_string(d)) fail(ErrorCode::Parse, where + ": record dimension differs from header");
        std::size_t k = 1;
        Vec s(d);
        for (int i = 0; i < d; ++i) s[i] = parse_real(tok[k++], where + " seed");
        Mat m(d);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                m(i, j) = parse_real(tok[k++], where + " matrix");
                m(j, i) = m(i, j);
            }
        const double w = parse_real(tok[k], where + " weight");
        try {
            items.emplace_back(s, SpdMatrix(m), w);
        } catch (const Error& e) {
            fail(ErrorCode::Parse, where + ": " + e.what());
        }
    }
    if (items.size() != static_cast<std::size_t>(count))
        fail(ErrorCode::Parse, "header announces " + std::to_string(count) + " generators, file has " +
                                   std::to_string(items.size()));
    file.set = GeneratorSet(std::move(items));
    return file;
}

void save_generator_set(const std::string& path, const GeneratorSet& set, const std::vector<std::string>& comments) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path);
    write_generator_set(out, set, comments);
    if (!out) fail(ErrorCode::Io, "error writing " + path);
}

GeneratorFile load_generator_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + path);
    return read_generator_set(in);
}

void write_label_image(std::ostream& out, const LabelImage& image, std::size_t generators) {
    const GridSpec& grid = image.grid;
    const int d = grid.dim();
    out.write(kImageMagic, sizeof kImageMagic);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(d));
    for (int i = 0; i < 3; ++i) put_le<std::uint8_t>(out, 0);
    for (int a = 0; a < kMaxDim; ++a)
        put_le<std::uint32_t>(out, a < d ? static_cast<std::uint32_t>(grid.count(a)) : 0u);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(generators));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(grid.total()));
    for (int i = 0; i < 24; ++i) put_le<std::uint8_t>(out, 0);
    for (int a = 0; a < d; ++a) put_le<double>(out, grid.origin()[a]);
    for (int a = 0; a < d; ++a) put_le<double>(out, grid.spacing()[a]);
    for (std::uint32_t l : image.labels) put_le<std::uint32_t>(out, l);
}

ImageFile read_label_image(std::istream& in) {
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::string(magic, 8) != std::string(kImageMagic, 8))
        fail(ErrorCode::Io, "not a GBPDIMG1 file");
    const int d = get_le<std::uint8_t>(in);
    check_dim(d);
    for (int i = 0; i < 3; ++i) get_le<std::uint8_t>(in);
    std::vector<std::size_t> counts;
    for (int a = 0; a < kMaxDim; ++a) {
        const auto c = get_le<std::uint32_t>(in);
        if (a < d) counts.push_back(c);
    }
    ImageFile file;
    file.generators = get_le<std::uint32_t>(in);
    const auto total = get_le<std::uint64_t>(in);
    for (int i = 0; i < 24; ++i) get_le<std::uint8_t>(in);
    Vec origin(d), spacing(d);
    for (int a = 0; a < d; ++a) origin[a] = get_le<double>(in);
    for (int a = 0; a < d; ++a) spacing[a] = get_le<double>(in);
    file.image.grid = GridSpec(origin, spacing, counts);
    if (total != file.image.grid.total()) fail(ErrorCode::Io, "point count does not match axis counts");
    file.image.labels.resize(total);
    for (auto& l : file.image.labels) l = get_le<std::uint32_t>(in);
    return file;
}

std::array<std::uint8_t, 3> label_color(std::uint32_t label) {
    double hue = std::fmod(static_cast<double>(label) * 0.618034, 1.0) * 6.0;
    const double s = 0.65, v = 0.95;
    const int sector = static_cast<int>(hue) % 6;
    const double f = hue - std::floor(hue);
    const double p = v * (1 - s), q = v * (1 - s * f), r = v * (1 - s * (1 - f));
    double rgb[3];
    switch (sector) {
        case 0: rgb[0] = v, rgb[1] = r, rgb[2] = p; break;
        case 1: rgb[0] = q, rgb[1] = v, rgb[2] = p; break;
        case 2: rgb[0] = p, rgb[1] = v, rgb[2] = r; break;
        case 3: rgb[0] = p, rgb[1] = q, rgb[2] = v; break;
        case 4: rgb[0] = r, rgb[1] = p, rgb[2] = v; break;
        default: rgb[0] = v, rgb[1] = p, rgb[2] = q; break;
    }
    return {static_cast<std::uint8_t>(std::lround(rgb[0] * 255.0)),
            static_cast<std::uint8_t>(std::lround(rgb[1] * 255.0)),
            static_cast<std::uint8_t>(std::lround(rgb[2] * 255.0))};
}

namespace {

// Linear indices of the displayed plane, row-major (row = axis 1).
struct PreviewPlane {
    std::size_t width = 1, height = 1;
    std::vector<std::size_t> points;
};

PreviewPlane preview_plane(const GridSpec& grid) {
    PreviewPlane plane;
    plane.width = grid.count(0);
    plane.height = grid.dim() >= 2 ? grid.count(1) : 1;
    std::size_t base = 0, stride = grid.count(0) * plane.height;
    for (int a = 2; a < grid.dim(); ++a) {
        base += (grid.count(a) / 2) * stride;
        stride *= grid.count(a);
    }
    plane.points.reserve(plane.width * plane.height);
    for (std::size_t y = 0; y < plane.height; ++y)
        for (std::size_t x = 0; x < plane.width; ++x) plane.points.push_back(base + y * plane.width + x);
    return plane;
}

}  // namespace

void write_preview_ppm(std::ostream& out, const LabelImage& image) {
    const PreviewPlane plane = preview_plane(image.grid);
    out << "P6\n" << plane.width << ' ' << plane.height << "\n255\n";
    for (std::size_t p : plane.points) {
        const std::uint32_t l = image.labels[p];
        const auto c = l == kNoLabel ? std::array<std::uint8_t, 3>{0, 0, 0} : label_color(l);
        out.write(reinterpret_cast<const char*>(c.data()), 3);
    }
}

void write_mask_pgm(std::ostream& out, const GridSpec& grid, const std::vector<std::uint32_t>& mask) {
    const PreviewPlane plane = preview_plane(grid);
    out << "P5\n" << plane.width << ' ' << plane.height << "\n255\n";
    for (std::size_t p : plane.points) out.put(static_cast<char>(mask[p] != 0 ? 255 : 0));
}

void write_stats_csv_header(std::ostream& out) { out << "n,N,t,step1_evals,step2_evals,step2_points\n"; }

void write_stats_csv_row(std::ostream& out, const RenderStats& s) {
    out << s.generators << ',' << s.points << ',' << format_real(s.t) << ',' << s.step1_evals << ','
        << s.step2_evals << ',' << s.step2_points << '\n';
}

void write_report_csv_header(std::ostream& out) {
    out << "t,reps,intensity,erosion,measured_points,nR,n1,n2,n,void_probability,"
           "n1_emp,n1_se,uncovered_emp,uncovered_se,n2_emp,n2_se,n_emp,n_se,n_box_emp,n_box_se,"
           "brute_emp,c,completed_bound,optimal_bound\n";
}

void write_report_csv_row(std::ostream& out, const ComplexityReport& r) {
    out << format_real(r.t) << ',' << r.reps << ',' << format_real(r.intensity) << ',' << format_real(r.erosion)
        << ',' << r.measured_points;
    for (double v : {r.nR, r.n1, r.n2, r.n, r.void_probability, r.n1_emp, r.n1_se, r.uncovered_emp, r.uncovered_se,
                     r.n2_emp, r.n2_se, r.n_emp, r.n_se, r.n_box_emp, r.n_box_se, r.brute_emp, r.c,
                     r.completed_bound, r.optimal_bound})
        out << ',' << format_real(v);
    out << '\n';
}

void write_report_table(std::ostream& out, const std::vector<ComplexityReport>& reports) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%12s %9s %9s %9s %9s %9s %9s %9s %9s %9s %7s\n", "t", "n1_pred", "n1_emp",
                  "void_pred", "void_emp", "n_pred", "n_emp", "n_box", "brute", "bound", "c");
    out << buf;
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%12.6g %9.4f %9.4f %9.5f %9.5f %9.3f %9.3f %9.3f %9.2f %9.3f %7.4f\n", r.t,
                      r.n1, r.n1_emp, r.void_probability, r.uncovered_emp, r.n, r.n_emp, r.n_box_emp, r.brute_emp,
                      r.completed_bound, r.c);
        out << buf;
    }
    if (!reports.empty()) {
        std::snprintf(buf, sizeof buf, "n_R (predicted) = %.4f, reps = %zu, measured points per realization = %zu\n",
                      reports.front().nR, reports.front().reps, reports.front().measured_points);
        out << buf;
        for (const auto& note : reports.front().notes) out << "note: " << note << '\n';
    }
}

}  // namespace gbpd
