#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gbpd/error.hpp"
#include "gbpd/io.hpp"
#include "gbpd/poisson.hpp"
#include "gbpd/render.hpp"
#include "gbpd/section.hpp"
#include "gbpd/transform.hpp"

namespace py = pybind11;
using namespace gbpd;

namespace {

using Rows = std::vector<std::vector<double>>;

Vec to_vec(const std::vector<double>& v) { return Vec::from_span(v); }

Mat to_mat(const Rows& rows) {
    const int d = static_cast<int>(rows.size());
    std::vector<double> flat;
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != d) fail(ErrorCode::DimensionMismatch, "matrix must be square");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return Mat::from_row_major(d, flat);
}

std::vector<double> from_vec(const Vec& v) { return {v.values().begin(), v.values().end()}; }

Rows from_mat(const Mat& m) {
    Rows out(static_cast<std::size_t>(m.dim()));
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
    return out;
}

// numpy view in (N_d, ..., N_1) order, so arr[..., i1] walks axis 0.
template <class T>
py::array_t<T> image_array(const GridSpec& grid, const std::vector<T>& data) {
    std::vector<py::ssize_t> shape;
    for (int a = grid.dim() - 1; a >= 0; --a) shape.push_back(static_cast<py::ssize_t>(grid.count(a)));
    py::array_t<T> arr(shape);
    std::copy(data.begin(), data.end(), arr.mutable_data());
    return arr;
}

py::dict stats_dict(const RenderStats& s) {
    py::dict d;
    d["n"] = s.generators;
    d["N"] = s.points;
    d["t"] = s.t;
    d["step1_evals"] = s.step1_evals;
    d["step1_hits"] = s.step1_hits;
    d["step2_evals"] = s.step2_evals;
    d["step2_points"] = s.step2_points;
    d["skipped_generators"] = s.skipped_generators;
    return d;
}

py::dict result_dict(const RenderResult& r) {
    py::dict d;
    d["labels"] = image_array(r.image.grid, r.image.labels);
    d["best_dist"] = image_array(r.image.grid, r.image.best_dist);
    d["stats"] = stats_dict(r.stats);
    if (!r.trace.hits.empty()) d["hits"] = image_array(r.image.grid, r.trace.hits);
    return d;
}

RenderOptions options(unsigned threads, bool trace) {
    RenderOptions o;
    o.threads = std::max(1u, threads);
    o.record_trace = trace;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Generalised balanced power diagrams";

    py::register_exception<Error>(m, "GbpdError", PyExc_ValueError);

    py::class_<Generator>(m, "Generator")
        .def(py::init([](const std::vector<double>& seed, const Rows& matrix, double weight) {
                 return Generator(to_vec(seed), SpdMatrix(to_mat(matrix)), weight);
             }),
             py::arg("seed"), py::arg("matrix"), py::arg("weight") = 0.0)
        .def_property_readonly("dim", &Generator::dim)
        .def_property_readonly("seed", [](const Generator& g) { return from_vec(g.seed); })
        .def_property_readonly("matrix", [](const Generator& g) { return from_mat(g.aniso.entries()); })
        .def_readonly("weight", &Generator::weight)
        .def("__repr__", [](const Generator& g) {
            return "Generator(dim=" + std::to_string(g.dim()) + ", weight=" + format_real(g.weight) + ")";
        });

    py::class_<GeneratorSet>(m, "GeneratorSet")
        .def(py::init<std::vector<Generator>>(), py::arg("generators"))
        .def_property_readonly("dim", &GeneratorSet::dim)
        .def("__len__", &GeneratorSet::size)
        .def("__getitem__",
             [](const GeneratorSet& s, std::size_t i) {
                 if (i >= s.size()) throw py::index_error();
                 return s[i];
             })
        .def_property_readonly("min_weight", &GeneratorSet::min_weight)
        .def_property_readonly("max_weight", &GeneratorSet::max_weight);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](const std::vector<double>& origin, const std::vector<double>& spacing,
                         const std::vector<std::size_t>& counts) { return GridSpec(to_vec(origin), to_vec(spacing), counts); }),
             py::arg("origin"), py::arg("spacing"), py::arg("counts"))
        .def_property_readonly("dim", &GridSpec::dim)
        .def_property_readonly("total", &GridSpec::total)
        .def_property_readonly("counts", &GridSpec::counts)
        .def("point", [](const GridSpec& g, std::size_t i) { return from_vec(g.point(i)); });

    m.def("dist", [](const std::vector<double>& x, const Generator& g) { return dist(to_vec(x), g); });
    m.def("nearest_generator", [](const std::vector<double>& x, const GeneratorSet& s) { return nearest_generator(to_vec(x), s); });
    m.def("ellipsoid_volume", &ellipsoid_volume, py::arg("generator"), py::arg("t"));
    m.def("bounding_box", [](const Generator& g, double t) {
        const AxisBox b = bounding_box(g, t);
        return py::make_tuple(from_vec(b.lower), from_vec(b.upper));
    });

    m.def("render_brute_force",
          [](const GridSpec& grid, const GeneratorSet& set, unsigned threads) {
              py::gil_scoped_release release;
              auto r = render_brute_force(grid, set, options(threads, false));
              py::gil_scoped_acquire acquire;
              return result_dict(r);
          },
          py::arg("grid"), py::arg("generators"), py::arg("threads") = 1);
    m.def("render_improved",
          [](const GridSpec& grid, const GeneratorSet& set, double t, unsigned threads, bool trace) {
              py::gil_scoped_release release;
              auto r = render_improved(grid, set, t, options(threads, trace));
              py::gil_scoped_acquire acquire;
              return result_dict(r);
          },
          py::arg("grid"), py::arg("generators"), py::arg("t"), py::arg("threads") = 1, py::arg("trace") = false);
    m.def("render_section_improved",
          [](const GridSpec& grid, const GeneratorSet& set, int axis, double h, double t, unsigned threads) {
              py::gil_scoped_release release;
              auto r = render_section_improved(grid, set, axis, h, t, options(threads, false));
              py::gil_scoped_acquire acquire;
              return result_dict(r);
          },
          py::arg("grid"), py::arg("generators"), py::arg("axis"), py::arg("h"), py::arg("t"), py::arg("threads") = 1);

    m.def("translate", [](const GeneratorSet& s, const std::vector<double>& y) { return translate(s, to_vec(y)); });
    m.def("rotate", [](const GeneratorSet& s, const Rows& u) { return rotate(s, to_mat(u)); });
    m.def("distort", [](const GeneratorSet& s, const Rows& a) { return distort(s, to_mat(a)); });
    m.def(
        "scale",
        [](const GeneratorSet& s, double a, const std::string& form) {
            if (form != "matrix" && form != "weight") fail(ErrorCode::InvalidArgument, "form must be 'matrix' or 'weight'");
            return scale(s, a, form == "matrix" ? ScaleForm::Matrix : ScaleForm::Weight);
        },
        py::arg("generators"), py::arg("factor"), py::arg("form") = "matrix");
    m.def("shift_weights", &shift_weights);
    m.def("scale_weights", &scale_weights);
    m.def("normalize_nonnegative", &normalize_nonnegative);
    m.def(
        "section_set",
        [](const GeneratorSet& s, const std::vector<int>& axes, const std::vector<double>& values) {
            return section_set(s, FlatSpec(s.dim(), axes, values));
        },
        py::arg("generators"), py::arg("axes"), py::arg("values"));

    m.def("mean_n1", &mean_n1, py::arg("generators"), py::arg("intensity"), py::arg("t"));
    m.def(
        "mean_nR",
        [](double intensity, const std::vector<double>& lower, const std::vector<double>& upper, double halo) {
            return mean_nR(intensity, AxisBox(to_vec(lower), to_vec(upper)), halo);
        },
        py::arg("intensity"), py::arg("lower"), py::arg("upper"), py::arg("halo"));
    m.def("mean_total", &mean_total, py::arg("n1"), py::arg("nR"));
    m.def("optimal_n1", &optimal_n1, py::arg("nR"));
    m.def(
        "optimal_n1_completed",
        [](double nR, double c) {
            const auto r = optimal_n1_completed(nR, c);
            py::dict d;
            d["n1"] = r.n1;
            d["n1_bound"] = r.n1_bound;
            d["total_bound"] = r.total_bound;
            d["feasible"] = r.feasible;
            return d;
        },
        py::arg("nR"), py::arg("c"));
    m.def("solve_t_for_n1", &solve_t_for_n1, py::arg("target"), py::arg("generators"), py::arg("intensity"));
    m.def("box_ellipsoid_ratio", &box_ellipsoid_ratio, py::arg("generators"), py::arg("t"));
    m.def(
        "sample_generators",
        [](double intensity, const std::vector<double>& lower, const std::vector<double>& upper, double halo,
           std::uint64_t seed, double r_min, double r_max, double w_max) {
            PoissonConfig cfg;
            cfg.intensity = intensity;
            cfg.window = AxisBox(to_vec(lower), to_vec(upper));
            cfg.halo = halo;
            cfg.seed = seed;
            MarkModel marks;
            marks.r_min = r_min;
            marks.r_max = r_max;
            marks.w_max = w_max;
            return sample_generators(cfg, marks);
        },
        py::arg("intensity"), py::arg("lower"), py::arg("upper"), py::arg("halo"), py::arg("seed"), py::arg("r_min"),
        py::arg("r_max"), py::arg("w_max") = 0.0);

    m.def("load_generator_set", [](const std::string& path) { return load_generator_set(path).set; });
    m.def(
        "save_generator_set",
        [](const std::string& path, const GeneratorSet& s, const std::vector<std::string>& comments) {
            save_generator_set(path, s, comments);
        },
        py::arg("path"), py::arg("generators"), py::arg("comments") = std::vector<std::string>{});
}
