#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "lila/autolabel.hpp"
#include "lila/cli/commands.hpp"
#include "lila/error.hpp"
#include "lila/evaluation.hpp"
#include "lila/io/scan_file.hpp"
#include "lila/label_space.hpp"
#include "lila/neural/checkpoint.hpp"
#include "lila/neural/training.hpp"
#include "lila/scan_projection.hpp"

namespace py = pybind11;

namespace {

using U8Array = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

template <typename T>
py::array_t<T> grid(const std::vector<T>& values, int rows, int cols) {
  py::array_t<T> out({rows, cols});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::span<const std::uint8_t> as_span(const U8Array& a) {
  return {a.data(), static_cast<std::size_t>(a.size())};
}

py::dict scan_dict(const lila::LidarScan& scan) {
  const std::size_t n = scan.points.size();
  py::array_t<std::uint16_t> ring(n);
  py::array_t<float> azimuth(n), range(n), reflectivity(n);
  py::array_t<std::int64_t> time(n);
  for (std::size_t i = 0; i < n; ++i) {
    const lila::LidarPoint& p = scan.points[i];
    ring.mutable_at(i) = p.ring;
    azimuth.mutable_at(i) = p.azimuth;
    range.mutable_at(i) = p.range;
    reflectivity.mutable_at(i) = p.reflectivity;
    time.mutable_at(i) = p.time.us;
  }
  py::dict d;
  d["rings"] = scan.rings;
  d["columns"] = scan.columns;
  d["revolution_start_us"] = scan.revolution_start.us;
  d["ring"] = ring;
  d["azimuth"] = azimuth;
  d["range"] = range;
  d["reflectivity"] = reflectivity;
  d["time_us"] = time;
  return d;
}

py::dict image_dict(const lila::LidarImage& image) {
  py::dict d;
  d["depth"] = grid(image.depth, image.rows, image.cols);
  d["reflectivity"] = grid(image.reflectivity, image.rows, image.cols);
  std::vector<bool> valid(image.valid.begin(), image.valid.end());
  py::array_t<bool> mask({image.rows, image.cols});
  std::copy(valid.begin(), valid.end(), mask.mutable_data());
  d["valid"] = mask;
  d["point_index"] = grid(image.point_index, image.rows, image.cols);
  return d;
}

}  // namespace

PYBIND11_MODULE(_lila, m) {
  m.doc() = "LiDAR semantic labeling: projection, autolabel evaluation and inference";

  py::register_exception<lila::Error>(m, "LilaError", PyExc_RuntimeError);

  m.attr("NUM_CLASSES") = lila::kNumLidarClasses;
  m.attr("UNLABELED") = lila::kUnlabeledId;

  m.def(
      "run",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "lila");
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = lila::cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI command; returns (exit_code, stdout, stderr).");

  m.def("class_name", [](int id) {
    if (!lila::is_lidar_class_id(static_cast<std::uint8_t>(id))) {
      throw lila::Error(lila::ErrorCode::kUnknownLabelId, "unknown class id " + std::to_string(id));
    }
    return std::string(lila::class_name(static_cast<lila::LidarClass>(id)));
  });
  m.def("class_id", [](const std::string& name) -> py::object {
    if (const auto c = lila::lidar_class_from_name(name)) return py::int_(static_cast<int>(*c));
    return py::none();
  });
  m.def("class_color", [](int id) {
    const lila::Rgb c = lila::class_color(static_cast<lila::LidarClass>(id));
    return py::make_tuple(c.r, c.g, c.b);
  });
  m.def("map_cityscapes", [](int id) {
    if (!lila::is_cityscapes_class_id(static_cast<std::uint8_t>(id))) {
      throw lila::Error(lila::ErrorCode::kUnknownLabelId, "unknown Cityscapes id " + std::to_string(id));
    }
    return static_cast<int>(lila::map_class(static_cast<lila::CityscapesClass>(id)));
  });

  m.def("read_scan", [](const std::filesystem::path& p) { return scan_dict(lila::io::read_scan(p)); },
        py::arg("path"));
  m.def("project_scan",
        [](const std::filesystem::path& p) { return image_dict(lila::scan_to_image(lila::io::read_scan(p))); },
        py::arg("path"), "Cylindrical projection of a scan file.");

  py::class_<lila::ConfusionMatrix>(m, "ConfusionMatrix")
      .def(py::init<>())
      .def("accumulate",
           [](lila::ConfusionMatrix& cm, const U8Array& prediction, const U8Array& truth) {
             cm.accumulate(as_span(prediction), as_span(truth));
           },
           py::arg("prediction"), py::arg("truth"))
      .def("count", &lila::ConfusionMatrix::count, py::arg("truth"), py::arg("predicted"))
      .def("total", &lila::ConfusionMatrix::total)
      .def("class_iou", [](const lila::ConfusionMatrix& cm, int c) { return lila::class_iou(cm, c); })
      .def("mean_iou", [](const lila::ConfusionMatrix& cm) { return lila::mean_iou(cm); })
      .def("report", [](const lila::ConfusionMatrix& cm) { return lila::iou_report_json(cm).dump(); });

  py::class_<lila::nn::LilaNet<float>>(m, "Network")
      .def_static("load", [](const std::filesystem::path& p) { return lila::nn::load_checkpoint(p); })
      .def("parameter_count", &lila::nn::LilaNet<float>::parameter_count)
      .def(
          "predict_scan",
          [](const lila::nn::LilaNet<float>& net, const std::filesystem::path& p) {
            const lila::LidarImage image = lila::scan_to_image(lila::io::read_scan(p));
            lila::nn::Prediction pred;
            {
              py::gil_scoped_release release;
              pred = lila::nn::infer(net, lila::nn::encode_image(image), image.valid);
            }
            return py::make_tuple(grid(pred.labels.ids, image.rows, image.cols),
                                  grid(pred.confidence, image.rows, image.cols));
          },
          py::arg("path"), "Per-cell (labels, confidence) for a scan file.");
}
