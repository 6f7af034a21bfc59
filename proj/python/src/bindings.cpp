// Python bindings: codecs, error metrics, Pareto fronts, the transfer model
// and the record store.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "ppress/error.hpp"
#include "ppress/pareto.hpp"
#include "ppress/perfmodel.hpp"
#include "ppress/records.hpp"
#include "ppress/reducers.hpp"
#include "ppress/tabular.hpp"

namespace py = pybind11;
using namespace ppress;

namespace {

// (n_obs, n_feat) array -> Dataset. float32 arrays keep the f32 dtype.
Dataset to_dataset(const py::array& a, std::optional<std::vector<std::string>> names) {
  if (a.ndim() != 2) throw ConfigError("expected a 2-D array (n_obs, n_feat)");
  const DType dt = a.dtype().is(py::dtype::of<float>()) ? DType::f32 : DType::f64;
  const auto arr = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(a);
  if (!arr) throw ConfigError("array is not convertible to float64");
  const auto n = static_cast<std::size_t>(arr.shape(0));
  const auto f = static_cast<std::size_t>(arr.shape(1));
  if (n == 0 || f == 0) throw DataError("empty array");
  std::vector<std::vector<double>> cols(f, std::vector<double>(n));
  const double* p = arr.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) cols[j][i] = p[i * f + j];
  }
  if (names) return Dataset(std::move(cols), std::move(*names), dt);
  return Dataset(std::move(cols), dt);
}

py::array to_array(const Dataset& d) {
  const auto n = static_cast<py::ssize_t>(d.n_obs()), f = static_cast<py::ssize_t>(d.n_feat());
  auto fill = [&](auto out) {
    auto m = out.template mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i) {
      for (py::ssize_t j = 0; j < f; ++j) m(i, j) = static_cast<typename decltype(out)::value_type>(d.at(i, j));
    }
    return py::array(out);
  };
  if (d.dtype() == DType::f32) return fill(py::array_t<float>({n, f}));
  return fill(py::array_t<double>({n, f}));
}

ReducerConfig make_config(const std::string& method, const std::string& mode, const py::object& bound,
                          const std::string& layout, int codec_level, std::uint64_t seed) {
  ReducerConfig c;
  c.method = parse_method(method);
  c.mode = parse_mode(mode);
  if (!bound.is_none()) {
    if (py::isinstance<py::sequence>(bound)) {
      c.bound = bound.cast<std::vector<double>>();
    } else {
      c.bound = {bound.cast<double>()};
    }
  }
  c.layout = parse_layout(layout);
  c.fixed.codec_level = codec_level;
  c.fixed.seed = seed;
  c.validate();
  return c;
}

py::object json_to_py(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_ppress, m) {
  m.doc() = "Error-bounded compression and evaluation of tabular training data";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ApplicationError>(m, "ApplicationError", base.ptr());
  py::register_exception<InfeasibleError>(m, "InfeasibleError", base.ptr());

  m.def(
      "compress",
      [](const py::array& data, const std::string& method, const std::string& mode, const py::object& bound,
         const std::string& layout, std::optional<std::vector<std::string>> names, int codec_level,
         std::uint64_t seed) {
        const Dataset d = to_dataset(data, std::move(names));
        const ReducerConfig c = make_config(method, mode, bound, layout, codec_level, seed);
        Bytes out;
        {
          py::gil_scoped_release release;
          out = serialize(compress(d, c).artifact);
        }
        return py::bytes(reinterpret_cast<const char*>(out.data()), out.size());
      },
      py::arg("data"), py::arg("method"), py::arg("mode") = "NONE", py::arg("bound") = py::none(),
      py::arg("layout") = "by_column", py::arg("names") = py::none(), py::arg("codec_level") = 1,
      py::arg("seed") = 0,
      "Compress a (n_obs, n_feat) array into a self-describing container.");

  m.def(
      "decompress",
      [](const py::bytes& blob) {
        const std::string s = blob;
        const ByteSpan span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
        std::optional<DecompressResult> r;
        {
          py::gil_scoped_release release;
          r.emplace(decompress(span));
        }
        return py::make_tuple(to_array(r->dataset), r->dataset.names());
      },
      py::arg("blob"), "Decode a container; returns (array, column names).");

  m.def(
      "container_info",
      [](const py::bytes& blob) {
        const std::string s = blob;
        const CompressedArtifact a =
            parse_artifact(ByteSpan(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
        py::dict d;
        d["method"] = std::string(to_string(a.method));
        d["mode"] = std::string(to_string(a.mode));
        d["bound"] = a.bound;
        d["layout"] = std::string(to_string(a.layout));
        d["dtype"] = std::string(to_string(a.dtype));
        d["n_obs"] = a.n_obs;
        d["n_feat"] = a.n_feat;
        d["orig_bytes"] = a.orig_bytes();
        d["comp_bytes"] = a.comp_bytes();
        d["ratio"] = a.ratio();
        return d;
      },
      py::arg("blob"));

  m.def(
      "error_report",
      [](const py::array& original, const py::array& reconstructed) {
        const ErrorReport e = error_report(to_dataset(original, std::nullopt), to_dataset(reconstructed, std::nullopt));
        py::dict d;
        d["max_abs_err"] = e.max_abs_err;
        d["max_rel_to_range_err"] = e.max_rel_to_range_err;
        d["column_max_abs_err"] = e.column_max_abs_err;
        d["column_max_rel_to_range_err"] = e.column_max_rel_to_range_err;
        d["mse"] = e.mse;
        d["psnr_db"] = e.psnr_db;
        d["value_range"] = e.value_range;
        return d;
      },
      py::arg("original"), py::arg("reconstructed"));

  m.def(
      "column_stats",
      [](const py::array& data) {
        py::list out;
        for (const auto& s : column_stats(to_dataset(data, std::nullopt))) {
          py::dict d;
          d["min"] = s.min;
          d["max"] = s.max;
          d["range"] = s.range;
          d["mean"] = s.mean;
          d["variance"] = s.variance;
          d["zero_range"] = s.zero_range;
          out.append(d);
        }
        return out;
      },
      py::arg("data"));

  m.def(
      "pareto_front",
      [](const std::vector<double>& cr, const std::vector<double>& q) {
        if (cr.size() != q.size()) throw ConfigError("cr and q differ in length");
        std::vector<ObjectivePoint> pts(cr.size());
        for (std::size_t i = 0; i < cr.size(); ++i) {
          char id[24];
          std::snprintf(id, sizeof id, "%020zu", i);  // zero-padded: string order = index order
          pts[i] = {cr[i], q[i], id, "", 0};
        }
        std::vector<std::size_t> idx;
        for (const auto& p : pareto_front(pts).points) idx.push_back(std::stoull(p.record_id));
        return idx;
      },
      py::arg("cr"), py::arg("q"),
      "Indices of the non-dominated points (maximize both), in increasing cr.");

  m.def(
      "hypervolume",
      [](const std::vector<double>& cr, const std::vector<double>& q, double ref_cr, double ref_q) {
        if (cr.size() != q.size()) throw ConfigError("cr and q differ in length");
        std::vector<ObjectivePoint> pts(cr.size());
        for (std::size_t i = 0; i < cr.size(); ++i) pts[i] = {cr[i], q[i], std::to_string(i), "", 0};
        return hypervolume2d(pareto_front(pts), ref_cr, ref_q);
      },
      py::arg("cr"), py::arg("q"), py::arg("ref_cr"), py::arg("ref_q"));

  m.attr("GB") = kGB;
  m.def("speedup", &speedup, py::arg("C"), py::arg("s_p"), py::arg("b_c"), py::arg("b_n"));
  m.def("core_threshold", &core_threshold, py::arg("C"), py::arg("b_c"), py::arg("b_n"));
  m.def("min_cores", &min_cores, py::arg("C"), py::arg("b_c"), py::arg("b_n"), py::arg("efficiency") = 1.0);
  m.def(
      "transfer_times",
      [](double size, double b_n, double b_c, double s_p, double C, double efficiency) {
        const TransferScenario s{size, b_n, b_c, s_p, C, efficiency};
        return py::make_tuple(time_uncompressed(s), time_compressed(s));
      },
      py::arg("size"), py::arg("b_n"), py::arg("b_c"), py::arg("s_p"), py::arg("C"), py::arg("efficiency") = 1.0,
      "(uncompressed, compressed) transfer times in seconds.");

  m.def(
      "load_records",
      [](const std::string& path) {
        py::list out;
        for (const auto& r : RecordStore::load(path)) out.append(json_to_py(to_json(r)));
        return out;
      },
      py::arg("path"), "Records of a JSON-lines store as dicts.");
}
