#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "gbpd/config.hpp"
#include "gbpd/geometry.hpp"
#include "gbpd/io.hpp"
#include "gbpd/poisson.hpp"
#include "gbpd/render.hpp"
#include "gbpd/section.hpp"
#include "gbpd/transform.hpp"

namespace gbpd::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string input;
    std::string config;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string t = "auto";
    std::string algorithm = "improved";
    std::string grid;
    std::string flat;
    bool t_given = false;
    bool algorithm_given = false;
};

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::Parse, what); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::size_t parse_count(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (...) {
        config_error(what + ": bad integer '" + s + "'");
    }
    if (pos != s.size() || v == 0) config_error(what + ": expected a positive integer, got '" + s + "'");
    return static_cast<std::size_t>(v);
}

unsigned resolve_threads(const Options& opt) {
    if (opt.threads) return std::max(1u, *opt.threads);
    if (const char* env = std::getenv("GBPD_THREADS")) {
        const auto n = parse_count(env, "GBPD_THREADS");
        return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// "N1xN2[xN3]@spacing" where spacing is one value or one per axis
// (comma-separated).
GridSpec parse_grid(const std::string& text, const std::optional<Vec>& origin) {
    const auto at = text.find('@');
    if (at == std::string::npos) config_error("--grid: expected N1xN2[xN3]@spacing, got '" + text + "'");
    std::vector<std::size_t> counts;
    for (const auto& c : split(text.substr(0, at), 'x')) counts.push_back(parse_count(trim(c), "--grid count"));
    const int d = static_cast<int>(counts.size());
    if (d < 1 || d > kMaxDim) config_error("--grid: unsupported dimension " + std::to_string(d));
    const auto parts = split(text.substr(at + 1), ',');
    Vec spacing(d);
    if (parts.size() == 1) {
        const double s = parse_real(trim(parts[0]), "--grid spacing");
        for (int a = 0; a < d; ++a) spacing[a] = s;
    } else if (static_cast<int>(parts.size()) == d) {
        for (int a = 0; a < d; ++a) spacing[a] = parse_real(trim(parts[static_cast<std::size_t>(a)]), "--grid spacing");
    } else {
        config_error("--grid: give one spacing or one per axis");
    }
    Vec o = origin ? *origin : Vec(d);
    if (o.dim() != d) config_error("grid origin dimension does not match --grid");
    return GridSpec(o, spacing, counts);
}

// "k=INDEX,h=FLOAT[;...]", 1-based axis indices.
FlatSpec parse_flat(const std::string& text, int dim) {
    std::vector<int> axes;
    std::vector<double> values;
    for (const auto& part : split(text, ';')) {
        if (trim(part).empty()) continue;
        std::optional<int> k;
        std::optional<double> h;
        for (const auto& kv : split(part, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) config_error("--flat: expected key=value in '" + part + "'");
            const std::string key = trim(kv.substr(0, eq));
            const std::string val = trim(kv.substr(eq + 1));
            if (key == "k")
                k = static_cast<int>(parse_count(val, "--flat k"));
            else if (key == "h")
                h = parse_real(val, "--flat h");
            else
                config_error("--flat: unknown key '" + key + "'");
        }
        if (!k || !h) config_error("--flat: each entry needs k=INDEX and h=VALUE");
        axes.push_back(*k - 1);
        values.push_back(*h);
    }
    if (axes.empty()) config_error("--flat: no entries");
    return FlatSpec(dim, axes, values);
}

Mat parse_matrix(const std::vector<double>& values, int dim, const std::string& what) {
    if (values.size() != static_cast<std::size_t>(dim * dim))
        config_error(what + ": expected " + std::to_string(dim * dim) + " row-major entries");
    return Mat::from_row_major(dim, values);
}

std::string join_reals(std::span<const double> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_real(v[i]);
    return s;
}

std::string describe_matrix(const Mat& m) {
    std::vector<double> v;
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) v.push_back(m(i, j));
    return join_reals(v);
}

fs::path prepare_out(const Options& opt) {
    fs::path dir(opt.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create output directory " + dir.string());
    return dir;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) fail(ErrorCode::Io, "cannot write " + p.string());
    return f;
}

std::optional<Config> load_config(const Options& opt, bool required) {
    if (opt.config.empty()) {
        if (required) config_error("--config is required for this command");
        return std::nullopt;
    }
    return Config::load(opt.config);
}

Generator parse_generator_record(const Config& cfg, const Config::Entry& e) {
    std::istringstream first(e.value);
    int d = 0;
    first >> d;
    std::istringstream ss("GBPD-GENERATORS dim=" + std::to_string(d) + " count=1\n" + e.value + "\n");
    try {
        return read_generator_set(ss).set[0];
    } catch (const Error& err) {
        fail(ErrorCode::Parse, cfg.where(e) + ": " + err.what());
    }
}

// ';' starts a comment in config files, so each flat entry goes on its own
// "flat = k=..,h=.." line.
std::string config_flat(const std::optional<Config>& cfg, const std::string& section) {
    std::string text;
    if (!cfg) return text;
    for (const auto& e : cfg->all(section, "flat")) text += (text.empty() ? "" : ";") + e.value;
    return text;
}

AxisBox window_from(const Config& cfg) {
    const auto lo = cfg.get_reals("poisson", "window_lower");
    const auto hi = cfg.get_reals("poisson", "window_upper");
    if (lo.size() != hi.size() || lo.empty() || lo.size() > static_cast<std::size_t>(kMaxDim))
        config_error(cfg.source() + ": window_lower/window_upper must have equal length 1..4");
    return AxisBox(Vec::from_span(lo), Vec::from_span(hi));
}

MarkModel marks_from(const Config& cfg) {
    MarkModel m;
    m.r_min = cfg.get_real("marks", "r_min");
    m.r_max = cfg.get_real("marks", "r_max", m.r_min);
    m.w_max = cfg.get_real("marks", "w_max", 0.0);
    m.validate();
    return m;
}

std::optional<Vec> grid_origin_from(const std::optional<Config>& cfg) {
    if (cfg && cfg->has("grid", "origin")) return Vec::from_span(cfg->get_reals("grid", "origin"));
    return std::nullopt;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const Options& opt, std::ostream& out) {
    const Config cfg = *load_config(opt, true);
    std::vector<std::string> comments;
    GeneratorSet set;
    if (cfg.has_section("generators")) {
        std::vector<Generator> items;
        for (const auto& e : cfg.all("generators", "generator")) items.push_back(parse_generator_record(cfg, e));
        if (items.empty()) config_error(cfg.source() + ": [generators] has no 'generator' entries");
        set = GeneratorSet(std::move(items));
        comments.push_back("source explicit");
    } else {
        PoissonConfig pc;
        pc.intensity = cfg.get_real("poisson", "intensity");
        pc.window = window_from(cfg);
        pc.halo = cfg.get_real("poisson", "halo", 0.0);
        pc.seed = opt.seed ? *opt.seed : cfg.get_u64("poisson", "seed", 0);
        const MarkModel marks = marks_from(cfg);
        set = sample_generators(pc, marks);
        comments.push_back("source poisson intensity=" + format_real(pc.intensity) + " halo=" + format_real(pc.halo) +
                           " seed=" + std::to_string(pc.seed));
        comments.push_back("window " + join_reals(pc.window.lower.values()) + " / " +
                           join_reals(pc.window.upper.values()));
        comments.push_back("marks r_min=" + format_real(marks.r_min) + " r_max=" + format_real(marks.r_max) +
                           " w_max=" + format_real(marks.w_max));
    }
    const fs::path dir = prepare_out(opt);
    save_generator_set((dir / "generators.txt").string(), set, comments);
    out << "wrote " << set.size() << " generators (dim " << set.dim() << ") to " << (dir / "generators.txt").string()
        << '\n';
    return kExitOk;
}

// --------------------------------------------------------------- transform

int cmd_transform(const Options& opt, std::ostream& out) {
    if (opt.input.empty()) config_error("transform: missing input generator file");
    const Config cfg = *load_config(opt, true);
    GeneratorFile file = load_generator_set(opt.input);
    GeneratorSet set = file.set;
    const int d = set.dim();
    std::vector<std::string> comments = file.comments;
    const auto steps = cfg.all("transform", "step");
    if (steps.empty()) config_error(cfg.source() + ": [transform] needs at least one 'step = <op> ...' line");
    for (const auto& e : steps) {
        std::istringstream ss(e.value);
        std::string op;
        ss >> op;
        std::vector<std::string> words;
        for (std::string w; ss >> w;) words.push_back(w);
        auto reals = [&](std::size_t from) {
            std::vector<double> v;
            for (std::size_t i = from; i < words.size(); ++i) v.push_back(parse_real(words[i], cfg.where(e)));
            return v;
        };
        auto one = [&](const std::vector<double>& v) {
            if (v.size() != 1) config_error(cfg.where(e) + ": '" + op + "' takes one number");
            return v[0];
        };
        if (op == "translate") {
            const auto v = reals(0);
            if (static_cast<int>(v.size()) != d) config_error(cfg.where(e) + ": translate needs " + std::to_string(d) + " values");
            set = translate(set, Vec::from_span(v));
        } else if (op == "rotate") {
            set = rotate(set, parse_matrix(reals(0), d, cfg.where(e)));
        } else if (op == "distort") {
            set = distort(set, parse_matrix(reals(0), d, cfg.where(e)));
        } else if (op == "scale") {
            if (words.empty() || (words[0] != "matrix" && words[0] != "weight"))
                config_error(cfg.where(e) + ": scale needs 'matrix' or 'weight' then a factor");
            set = scale(set, one(reals(1)), words[0] == "matrix" ? ScaleForm::Matrix : ScaleForm::Weight);
        } else if (op == "shift_weights") {
            set = shift_weights(set, one(reals(0)));
        } else if (op == "scale_weights") {
            set = scale_weights(set, one(reals(0)));
        } else if (op == "normalize") {
            set = normalize_nonnegative(set);
        } else {
            config_error(cfg.where(e) + ": unknown transform '" + op + "'");
        }
        comments.push_back("transform " + e.value);
    }
    const fs::path dir = prepare_out(opt);
    save_generator_set((dir / "generators.txt").string(), set, comments);
    out << "applied " << steps.size() << " transform step(s); wrote " << (dir / "generators.txt").string() << '\n';
    return kExitOk;
}

// ----------------------------------------------------------------- section

int cmd_section(const Options& opt, std::ostream& out) {
    if (opt.input.empty()) config_error("section: missing input generator file");
    const auto cfg = load_config(opt, false);
    const GeneratorFile file = load_generator_set(opt.input);
    const int d = file.set.dim();
    std::string flat_text = opt.flat;
    if (flat_text.empty()) flat_text = config_flat(cfg, "section");
    if (flat_text.empty()) config_error("section: give --flat or [section] flat");
    const FlatSpec flat = parse_flat(flat_text, d);

    GeneratorSet set = file.set;
    Mat rotation = Mat::identity(d);
    if (cfg && cfg->has("section", "rotation")) {
        rotation = parse_matrix(cfg->get_reals("section", "rotation"), d, cfg->source() + " [section] rotation");
        set = rotate(set, rotation);
    }
    const GeneratorSet reduced = section_set(set, flat);

    std::vector<std::string> comments = file.comments;
    std::vector<double> axes1;
    for (int k : flat.axes()) axes1.push_back(k + 1);
    comments.push_back("section original_dim=" + std::to_string(d));
    comments.push_back("section K=" + join_reals(axes1));
    comments.push_back("section h=" + join_reals(flat.values()));
    comments.push_back("section rotation=" + describe_matrix(rotation));
    const fs::path dir = prepare_out(opt);
    save_generator_set((dir / "section.txt").string(), reduced, comments);
    out << "sectioned " << reduced.size() << " generators to dimension " << reduced.dim() << "; wrote "
        << (dir / "section.txt").string() << '\n';
    return kExitOk;
}

// ------------------------------------------------------------------ render

// Seeds-per-volume estimate for a realized set: count over the volume of the
// box spanned by the seeds and the render window.
double estimate_intensity(const GeneratorSet& set, const std::optional<AxisBox>& window) {
    const int d = set.dim();
    Vec lo = set[0].seed, hi = set[0].seed;
    for (const auto& g : set)
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], g.seed[a]);
            hi[a] = std::max(hi[a], g.seed[a]);
        }
    if (window && window->dim() == d)
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], window->lower[a]);
            hi[a] = std::max(hi[a], window->upper[a]);
        }
    double v = AxisBox(lo, hi).volume();
    if (!(v > 0.0)) v = window && window->dim() == d ? window->volume() : 1.0;
    return static_cast<double>(set.size()) / v;
}

int cmd_render(const Options& opt, std::ostream& out) {
    if (opt.input.empty()) config_error("render: missing input generator file");
    const auto cfg = load_config(opt, false);
    const GeneratorFile file = load_generator_set(opt.input);
    const GeneratorSet& original = file.set;

    std::string grid_text = opt.grid;
    if (grid_text.empty() && cfg) grid_text = cfg->get_string("grid", "size", "");
    if (grid_text.empty()) config_error("render: give --grid or [grid] size");
    const GridSpec grid = parse_grid(grid_text, grid_origin_from(cfg));

    const std::string algorithm =
        opt.algorithm_given || !cfg ? opt.algorithm : cfg->get_string("render", "algorithm", opt.algorithm);
    if (algorithm != "brute" && algorithm != "improved") config_error("--algorithm must be 'brute' or 'improved'");
    const std::string t_text = opt.t_given || !cfg ? opt.t : cfg->get_string("render", "t", opt.t);
    std::string flat_text = opt.flat;
    if (flat_text.empty()) flat_text = config_flat(cfg, "render");

    std::optional<FlatSpec> flat;
    if (!flat_text.empty()) flat = parse_flat(flat_text, original.dim());
    const int expected_dim = flat ? flat->reduced_dim() : original.dim();
    if (grid.dim() != expected_dim)
        config_error("render: grid has dimension " + std::to_string(grid.dim()) + ", expected " +
                     std::to_string(expected_dim));

    RenderOptions ropt;
    ropt.threads = resolve_threads(opt);
    RenderResult res;
    if (algorithm == "brute") {
        res = render_brute_force(grid, flat ? section_set(original, *flat) : original, ropt);
    } else {
        const GeneratorSet set = normalize_nonnegative(original);
        double t = 0.0;
        if (t_text == "auto") {
            const double intensity =
                cfg && cfg->has("render", "intensity")
                    ? cfg->get_real("render", "intensity")
                    : estimate_intensity(set, flat ? std::nullopt : std::optional<AxisBox>(grid.window()));
            const double nR = static_cast<double>(set.size());
            const double n1 = optimal_n1(nR);
            t = solve_t_for_n1(n1, set, intensity);
            out << "auto t: intensity=" << format_real(intensity) << " n_R=" << format_real(nR)
                << " n1=" << format_real(n1) << " t=" << format_real(t) << '\n';
        } else {
            t = parse_real(t_text, "--t");
        }
        ropt.record_trace = true;
        if (flat && flat->axes().size() == 1) {
            res = render_section_improved(grid, set, flat->axes()[0], flat->values()[0], t, ropt);
        } else if (flat) {
            res = render_improved(grid, normalize_nonnegative(section_set(set, *flat)), t, ropt);
        } else {
            res = render_improved(grid, set, t, ropt);
        }
    }

    const fs::path dir = prepare_out(opt);
    {
        auto f = open_out(dir / "labels.gbpdimg");
        write_label_image(f, res.image, res.stats.generators);
    }
    {
        auto f = open_out(dir / "preview.ppm");
        write_preview_ppm(f, res.image);
    }
    if (!res.trace.hits.empty()) {
        auto f = open_out(dir / "coverage.pgm");
        write_mask_pgm(f, grid, res.trace.hits);
    }
    {
        auto f = open_out(dir / "stats.csv");
        write_stats_csv_header(f);
        write_stats_csv_row(f, res.stats);
    }
    out << "rendered " << res.stats.points << " points, " << res.stats.generators << " generators ("
        << algorithm << "): step1_evals=" << res.stats.step1_evals << " step2_evals=" << res.stats.step2_evals
        << " step2_points=" << res.stats.step2_points << '\n';
    return kExitOk;
}

// --------------------------------------------------------------- benchmark

int cmd_benchmark(const Options& opt, std::ostream& out) {
    const Config cfg = *load_config(opt, true);
    PoissonConfig pc;
    pc.intensity = cfg.get_real("poisson", "intensity");
    pc.window = window_from(cfg);
    pc.seed = opt.seed ? *opt.seed : cfg.get_u64("poisson", "seed", 0);
    const MarkModel marks = marks_from(cfg);
    if (cfg.get_string("poisson", "halo", "0") == "auto") {
        // R = sqrt(t_max + w_max) r_max covers every E_{t_max} reaching W.
        const double t_max = cfg.get_real("benchmark", "t_max");
        pc.halo = std::sqrt(t_max + marks.w_max) * marks.r_max;
    } else {
        pc.halo = cfg.get_real("poisson", "halo", 0.0);
    }
    pc.validate();

    std::string grid_text = opt.grid.empty() ? cfg.get_string("grid", "size") : opt.grid;
    std::optional<Vec> origin = grid_origin_from(cfg);
    if (!origin) origin = pc.window.lower;
    const GridSpec grid = parse_grid(grid_text, origin);
    const std::size_t reps = cfg.get_u64("benchmark", "reps", 10);

    std::vector<std::string> t_words = cfg.get_words("benchmark", "t_values");
    if (opt.t_given) t_words = {opt.t};
    std::vector<double> ts;
    std::optional<double> auto_t;
    for (const auto& w : t_words) {
        if (w == "auto") {
            if (!auto_t) {
                PoissonConfig pilot = pc;
                pilot.seed = derive_seed(pc.seed, 0);
                const GeneratorSet set = sample_generators(pilot, marks);
                const double n1 = optimal_n1(mean_nR(pc.intensity, pc.window, pc.halo));
                auto_t = solve_t_for_n1(n1, set, pc.intensity);
                out << "auto t: n_R=" << format_real(mean_nR(pc.intensity, pc.window, pc.halo))
                    << " n1=" << format_real(n1) << " t=" << format_real(*auto_t) << '\n';
            }
            ts.push_back(*auto_t);
        } else {
            ts.push_back(parse_real(w, cfg.source() + " [benchmark] t_values"));
        }
    }
    if (ts.empty()) config_error(cfg.source() + ": [benchmark] t_values is empty");
    if (cfg.get_string("poisson", "halo", "0") == "auto")
        for (double t : ts)
            if (t > cfg.get_real("benchmark", "t_max"))
                config_error(cfg.source() + ": t=" + format_real(t) + " exceeds [benchmark] t_max used for the halo");

    RenderOptions ropt;
    ropt.threads = resolve_threads(opt);
    std::vector<ComplexityReport> reports;
    for (double t : ts) reports.push_back(verify_complexity(pc, marks, grid, t, reps, ropt));

    const fs::path dir = prepare_out(opt);
    {
        auto f = open_out(dir / "report.csv");
        write_report_csv_header(f);
        for (const auto& r : reports) write_report_csv_row(f, r);
    }
    {
        auto f = open_out(dir / "report.txt");
        write_report_table(f, reports);
    }
    write_report_table(out, reports);
    return kExitOk;
}

void add_common(CLI::App* sub, Options& opt, bool with_input) {
    if (with_input) sub->add_option("input", opt.input, "Generator-set file")->required();
    sub->add_option("--config", opt.config, "Configuration file");
    sub->add_option("--out", opt.out_dir, "Output directory");
    sub->add_option("--seed", opt.seed, "RNG seed (overrides the config)");
    sub->add_option("--threads", opt.threads, "Worker threads (default: GBPD_THREADS or all cores)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalised balanced power diagrams: generate, transform, section, render, benchmark"};
    app.require_subcommand(1);
    Options opt;

    auto* gen = app.add_subcommand("generate", "Write a generator set from a config (explicit or Poisson)");
    add_common(gen, opt, false);

    auto* tr = app.add_subcommand("transform", "Apply affine/weight transforms to a generator set");
    add_common(tr, opt, true);

    auto* sec = app.add_subcommand("section", "Reduce a generator set to an axis-aligned flat");
    add_common(sec, opt, true);
    sec->add_option("--flat", opt.flat, "Flat, e.g. \"k=3,h=0.5\" (1-based axis)");

    auto* ren = app.add_subcommand("render", "Rasterize a generator set");
    add_common(ren, opt, true);
    ren->add_option("--grid", opt.grid, "Grid \"N1xN2[xN3]@spacing\"");
    ren->add_option("--flat", opt.flat, "Render the section by this flat");
    ren->add_option("--t", opt.t, "Step-1 threshold: auto or a positive number");
    ren->add_option("--algorithm", opt.algorithm, "brute or improved");

    auto* ben = app.add_subcommand("benchmark", "Compare renderer cost with the Poisson complexity model");
    add_common(ben, opt, false);
    ben->add_option("--grid", opt.grid, "Grid \"N1xN2[xN3]@spacing\" (overrides the config)");
    ben->add_option("--t", opt.t, "Single threshold instead of the configured sweep");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    opt.t_given = ren->count("--t") > 0 || ben->count("--t") > 0;
    opt.algorithm_given = ren->count("--algorithm") > 0;

    try {
        if (*gen) return cmd_generate(opt, out);
        if (*tr) return cmd_transform(opt, out);
        if (*sec) return cmd_section(opt, out);
        if (*ren) return cmd_render(opt, out);
        if (*ben) return cmd_benchmark(opt, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_input_error() ? kExitConfig : kExitNumeric;
    }
    return kExitConfig;
}

}  // namespace gbpd::cli
