#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gcpreg/io.hpp"
#include "gcpreg/pipeline.hpp"

namespace py = pybind11;
using namespace gcpreg;

namespace {

using U16Array = py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>;

RasterImage to_image(const U16Array& a, std::optional<int> max_value) {
  if (a.ndim() != 2) throw py::value_error("image must be a 2-D array");
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  const std::uint16_t* p = a.data();
  std::vector<Sample> s(p, p + a.size());
  Sample mv = 0;
  if (max_value) {
    mv = static_cast<Sample>(*max_value);
  } else {
    for (Sample v : s) mv = std::max(mv, v);
    mv = std::max<Sample>(mv, 1);
  }
  return RasterImage(w, h, mv, std::move(s));
}

U16Array to_array(const RasterImage& img) {
  U16Array out({img.height(), img.width()});
  std::copy(img.samples().begin(), img.samples().end(), out.mutable_data());
  return out;
}

Window to_window(const U16Array& a, std::optional<int> max_value) {
  const RasterImage img = to_image(a, max_value);
  if (img.width() != img.height() || img.width() % 2 == 0) {
    throw py::value_error("window must be square with an odd side");
  }
  return Window{img.width(), img.max_value(),
                std::vector<Sample>(img.samples().begin(), img.samples().end())};
}

std::vector<GroundControlPoint> to_gcps(const py::iterable& items) {
  std::vector<GroundControlPoint> out;
  for (const auto& it : items) {
    auto t = it.cast<py::tuple>();
    if (t.size() != 3) throw py::value_error("GCPs are (id, scan, pixel) tuples");
    out.push_back({t[0].cast<std::string>(), {t[1].cast<int>(), t[2].cast<int>()}});
  }
  return out;
}

MatchConfig make_config(const std::string& preset, const std::string& measure,
                        std::optional<int> target_size, std::optional<int> search_size,
                        bool edge, int bins, double ncc_threshold, unsigned threads) {
  MatchConfig cfg;
  if (preset == "ccd") {
    cfg.windows = WindowSpec::ccd();
  } else if (preset != "vhrr") {
    throw py::value_error("preset must be 'vhrr' or 'ccd'");
  }
  if (target_size) cfg.windows.target_size = *target_size;
  if (search_size) cfg.windows.search_size = *search_size;
  if (measure == "ncc+msd") {
    cfg.mode = MeasureMode::Combined;
  } else {
    cfg.mode = MeasureMode::Single;
    cfg.single_measure = parse_measure(measure);
  }
  cfg.edge_preprocess = edge;
  cfg.bins = bins;
  cfg.ncc_accept_threshold = ncc_threshold;
  cfg.threads = threads == 0 ? default_thread_count() : threads;
  cfg.validate();
  return cfg;
}

std::vector<PointPair> to_pairs(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(1) != 4) {
    throw py::value_error("pairs must be an (N, 4) array: ref_scan, ref_pixel, sensed_scan, sensed_pixel");
  }
  std::vector<PointPair> out;
  auto r = a.unchecked<2>();
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    out.push_back({{r(i, 0), r(i, 1)}, {r(i, 2), r(i, 3)}});
  }
  return out;
}

py::dict report_dict(const FitReport& rep) {
  py::dict d;
  d["degree"] = rep.degree;
  d["rmse_scan"] = rep.rmse_scan;
  d["rmse_pixel"] = rep.rmse_pixel;
  d["matched_count"] = rep.matched_count;
  d["input_count"] = rep.input_count;
  d["condition_number"] = rep.condition_number;
  py::list res;
  for (const auto& r : rep.residuals) res.append(py::make_tuple(r.id, r.scan, r.pixel));
  d["residuals"] = res;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gcpreg, m) {
  m.doc() = "GCP template matching, polynomial warp fitting and nearest-neighbour resampling.";

  static py::exception<Error> exc(m, "GcpregError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc, e.what());
    }
  });

  // Similarity measures on square windows.
  m.def("ssd", [](const U16Array& r, const U16Array& s) {
    return ssd(to_window(r, 65535), to_window(s, 65535));
  }, py::arg("ref"), py::arg("sensed"));
  m.def("ncc", [](const U16Array& r, const U16Array& s) {
    return ncc(to_window(r, 65535), to_window(s, 65535));
  }, py::arg("ref"), py::arg("sensed"));
  m.def("cra", [](const U16Array& r, const U16Array& s, int max_value, int bins) {
    return cra(to_window(r, max_value), to_window(s, max_value), bins);
  }, py::arg("ref"), py::arg("sensed"), py::arg("max_value"), py::arg("bins") = kDefaultBins);
  m.def("mutual_information", [](const U16Array& r, const U16Array& s, int max_value, int bins) {
    return mutual_information(to_window(r, max_value), to_window(s, max_value), bins);
  }, py::arg("ref"), py::arg("sensed"), py::arg("max_value"), py::arg("bins") = kDefaultBins);

  py::class_<MatchResult>(m, "MatchResult")
      .def_readonly("gcp_id", &MatchResult::gcp_id)
      .def_property_readonly("ref_coord", [](const MatchResult& r) {
        return py::make_tuple(r.ref_coord.scan, r.ref_coord.pixel);
      })
      .def_property_readonly("sensed_coord", [](const MatchResult& r) {
        return py::make_tuple(r.sensed_coord.scan, r.sensed_coord.pixel);
      })
      .def_property_readonly("offset", [](const MatchResult& r) {
        return py::make_tuple(r.offset.scan, r.offset.pixel);
      })
      .def_readonly("ncc_score", &MatchResult::ncc_score)
      .def_readonly("ssd_score", &MatchResult::ssd_score)
      .def_readonly("score", &MatchResult::score)
      .def_property_readonly("status", [](const MatchResult& r) {
        return std::string(to_string(r.status));
      })
      .def_property_readonly("matched", &MatchResult::matched)
      .def("__repr__", [](const MatchResult& r) {
        return "<MatchResult " + r.gcp_id + " " + std::string(to_string(r.status)) + " (" +
               std::to_string(r.offset.scan) + ", " + std::to_string(r.offset.pixel) + ")>";
      });

  m.def("match_all",
        [](const U16Array& ref, const U16Array& sensed, const py::iterable& gcps,
           std::optional<int> max_value, const std::string& preset, const std::string& measure,
           std::optional<int> target_size, std::optional<int> search_size, bool edge, int bins,
           double ncc_threshold, unsigned threads) {
          if (!max_value) {
            max_value = std::max(to_image(ref, std::nullopt).max_value(),
                                 to_image(sensed, std::nullopt).max_value());
          }
          const auto r = to_image(ref, max_value);
          const auto s = to_image(sensed, max_value);
          const auto g = to_gcps(gcps);
          const auto cfg = make_config(preset, measure, target_size, search_size, edge, bins,
                                       ncc_threshold, threads);
          py::gil_scoped_release release;
          return match_all(r, s, g, cfg).results;
        },
        py::arg("ref"), py::arg("sensed"), py::arg("gcps"), py::arg("max_value") = py::none(),
        py::arg("preset") = "vhrr", py::arg("measure") = "ncc+msd",
        py::arg("target_size") = py::none(), py::arg("search_size") = py::none(),
        py::arg("edge") = false, py::arg("bins") = kDefaultBins,
        py::arg("ncc_threshold") = 0.5, py::arg("threads") = 1);

  py::class_<WarpModel>(m, "WarpModel")
      .def(py::init<int>(), py::arg("degree") = kDefaultDegree)
      .def_static("from_raw", &WarpModel::from_raw, py::arg("degree"), py::arg("a"), py::arg("b"))
      .def_static("shift", &WarpModel::shift, py::arg("d_scan"), py::arg("d_pixel"))
      .def_property_readonly("degree", &WarpModel::degree)
      .def_property_readonly("a", &WarpModel::raw_scan_coeffs)
      .def_property_readonly("b", &WarpModel::raw_pixel_coeffs)
      .def("evaluate", [](const WarpModel& mdl, double scan, double pixel) {
        const Point2 q = mdl.evaluate(scan, pixel);
        return py::make_tuple(q.scan, q.pixel);
      }, py::arg("scan"), py::arg("pixel"))
      .def("evaluate_many",
           [](const WarpModel& mdl,
              const py::array_t<double, py::array::c_style | py::array::forcecast>& pts) {
             if (pts.ndim() != 2 || pts.shape(1) != 2) throw py::value_error("points must be (N, 2)");
             py::array_t<double> out({pts.shape(0), py::ssize_t{2}});
             auto in = pts.unchecked<2>();
             auto o = out.mutable_unchecked<2>();
             for (py::ssize_t i = 0; i < pts.shape(0); ++i) {
               const Point2 q = mdl.evaluate(in(i, 0), in(i, 1));
               o(i, 0) = q.scan;
               o(i, 1) = q.pixel;
             }
             return out;
           }, py::arg("points"))
      .def("to_text", [](const WarpModel& mdl) {
        std::ostringstream out;
        io::format_model(out, mdl);
        return out.str();
      })
      .def_static("from_text", [](const std::string& text) {
        std::istringstream in(text);
        return io::parse_model(in);
      })
      .def(py::self == py::self);

  m.def("fit_warp",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& pairs, int degree) {
          auto fit = fit_warp(to_pairs(pairs), degree);
          return py::make_tuple(fit.model, report_dict(fit.report));
        },
        py::arg("pairs"), py::arg("degree") = kDefaultDegree,
        "Least-squares fit from an (N, 4) array of ref_scan, ref_pixel, sensed_scan, "
        "sensed_pixel. Returns (model, report).");
  m.def("fit_matches",
        [](const std::vector<MatchResult>& matches, int degree) {
          auto fit = fit_warp(matches, degree);
          return py::make_tuple(fit.model, report_dict(fit.report));
        },
        py::arg("matches"), py::arg("degree") = kDefaultDegree);

  m.def("resample_nn",
        [](const U16Array& sensed, const WarpModel& model, int width, int height, int fill,
           std::optional<int> max_value, unsigned threads) {
          const auto s = to_image(sensed, max_value);
          RasterImage out;
          {
            py::gil_scoped_release release;
            out = resample_nn(s, model, width, height, static_cast<Sample>(fill),
                              threads == 0 ? default_thread_count() : threads);
          }
          return to_array(out);
        },
        py::arg("sensed"), py::arg("model"), py::arg("width"), py::arg("height"),
        py::arg("fill") = 0, py::arg("max_value") = 65535, py::arg("threads") = 1);

  m.def("register_image",
        [](const U16Array& ref, const U16Array& sensed, const py::iterable& gcps, int max_value,
           int degree, int fill, const std::string& preset, const std::string& measure,
           unsigned threads) {
          const auto r = to_image(ref, max_value);
          const auto s = to_image(sensed, max_value);
          RegisterOptions opts;
          opts.match = make_config(preset, measure, std::nullopt, std::nullopt, false,
                                   kDefaultBins, 0.5, threads);
          opts.degree = degree;
          opts.fill_value = static_cast<Sample>(fill);
          opts.threads = opts.match.threads;
          const auto g = to_gcps(gcps);
          Registration reg;
          {
            py::gil_scoped_release release;
            reg = register_image(r, s, g, opts);
          }
          py::dict d;
          d["registered"] = to_array(reg.registered);
          d["model"] = reg.fit.model;
          d["report"] = report_dict(reg.fit.report);
          d["matches"] = reg.matches.results;
          d["tv_distance"] = reg.radiometry.tv_distance;
          d["new_value_count"] = reg.radiometry.new_value_count;
          return d;
        },
        py::arg("ref"), py::arg("sensed"), py::arg("gcps"), py::arg("max_value"),
        py::arg("degree") = kDefaultDegree, py::arg("fill") = 0, py::arg("preset") = "vhrr",
        py::arg("measure") = "ncc+msd", py::arg("threads") = 1);

  m.def("edge_extract", [](const U16Array& img, std::optional<int> max_value) {
    return to_array(edge_extract(to_image(img, max_value)));
  }, py::arg("image"), py::arg("max_value") = py::none());

  // Synthetic scenes.
  m.def("textured_reference", [](int width, int height, int max_value, std::uint64_t seed) {
    return to_array(make_textured_reference(width, height, static_cast<Sample>(max_value), seed));
  }, py::arg("width"), py::arg("height"), py::arg("max_value") = 1023, py::arg("seed") = 1);
  m.def("synthesize",
        [](const U16Array& ref, int max_value, const std::string& kind,
           const std::vector<double>& params, double noise_sigma, std::uint64_t seed,
           const std::vector<std::tuple<double, double, double, int>>& occlusions) {
          DistortionSpec spec;
          if (kind == "shift" && params.size() == 2) {
            spec = DistortionSpec::shift(params[0], params[1]);
          } else if (kind == "affine" && params.size() == 6) {
            std::array<double, 6> a{};
            std::copy(params.begin(), params.end(), a.begin());
            spec = DistortionSpec::affine(a);
          } else if (kind == "quadratic" && params.size() == 12) {
            std::array<double, 12> a{};
            std::copy(params.begin(), params.end(), a.begin());
            spec = DistortionSpec::quadratic(a);
          } else {
            throw py::value_error("kind/params mismatch: shift takes 2, affine 6, quadratic 12");
          }
          spec.noise_sigma = noise_sigma;
          spec.seed = seed;
          for (const auto& [s, p, r, v] : occlusions)
            spec.occlusions.push_back({{s, p}, r, static_cast<Sample>(v)});
          auto scene = generate_sensed(to_image(ref, max_value), spec);
          return py::make_tuple(to_array(scene.sensed), scene.truth);
        },
        py::arg("ref"), py::arg("max_value"), py::arg("kind") = "shift",
        py::arg("params") = std::vector<double>{0, 0}, py::arg("noise_sigma") = 0.0,
        py::arg("seed") = 0,
        py::arg("occlusions") = std::vector<std::tuple<double, double, double, int>>{},
        "Returns (sensed, truth) where truth maps reference to sensed coordinates.");
  m.def("place_gcps",
        [](const U16Array& img, std::size_t count, int margin, int target_size) {
          py::list out;
          for (const auto& g : place_gcps(to_image(img, std::nullopt), count, margin, target_size))
            out.append(py::make_tuple(g.id, g.ref_coord.scan, g.ref_coord.pixel));
          return out;
        },
        py::arg("image"), py::arg("count"), py::arg("margin") = 16, py::arg("target_size") = 11);

  // Files.
  m.def("read_image", [](const std::filesystem::path& p) {
    const auto img = io::read_image(p);
    return py::make_tuple(to_array(img), img.max_value());
  }, py::arg("path"), "Returns (array, max_value).");
  m.def("write_image", [](const U16Array& img, const std::filesystem::path& p, int max_value) {
    io::write_image(to_image(img, max_value), p);
  }, py::arg("image"), py::arg("path"), py::arg("max_value"));
}
