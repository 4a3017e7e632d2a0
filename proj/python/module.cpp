#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tvws/aggregator.hpp"
#include "tvws/bandplan.hpp"
#include "tvws/detect.hpp"
#include "tvws/error.hpp"
#include "tvws/frontend.hpp"
#include "tvws/scene.hpp"
#include "tvws/sweep.hpp"
#include "tvws/timeutil.hpp"

#include <sstream>

namespace py = pybind11;
using namespace tvws;

namespace {

py::array_t<double> powers(const SweepRecord& r) {
    py::array_t<double> out(static_cast<py::ssize_t>(r.samples.size()));
    auto view = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        view(static_cast<py::ssize_t>(i)) = r.samples[i].power_db;
    }
    return out;
}

py::array_t<std::int64_t> frequencies(const SweepRecord& r) {
    py::array_t<std::int64_t> out(static_cast<py::ssize_t>(r.samples.size()));
    auto view = out.mutable_unchecked<1>();
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        view(static_cast<py::ssize_t>(i)) = r.samples[i].f_center;
    }
    return out;
}

SweepRecord record_from_arrays(Hz f_min, Hz f_max, Hz step, const std::vector<double>& p_db,
                               double dwell_s) {
    SweepRecord r;
    r.config = {f_min, f_max, step, dwell_s};
    const std::size_t t = r.config.sample_count();
    if (p_db.size() != t) {
        throw ArgumentError("expected " + std::to_string(t) + " powers, got " +
                            std::to_string(p_db.size()));
    }
    for (std::size_t i = 0; i < t; ++i) {
        r.samples.push_back({f_min + static_cast<Hz>(i) * step, p_db[i]});
    }
    r.started_at = now_utc();
    return r;
}

} // namespace

PYBIND11_MODULE(_tvws, m) {
    m.doc() = "TV white-space sensing core";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<ArgumentError>(m, "ArgumentError", error.ptr());
    py::register_exception<OutOfBandError>(m, "OutOfBandError", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());
    py::register_exception<TuneError>(m, "TuneError", error.ptr());

    py::class_<BandPlan>(m, "BandPlan")
        .def_property_readonly("f_min", &BandPlan::f_min)
        .def_property_readonly("f_max", &BandPlan::f_max)
        .def_property_readonly("channel_width", &BandPlan::channel_width)
        .def_property_readonly("channel_count", &BandPlan::channel_count)
        .def("channel_start", &BandPlan::channel_start)
        .def("channel_end", &BandPlan::channel_end)
        .def("__len__", &BandPlan::channel_count);
    m.def("make_bandplan", &make_bandplan, py::arg("f_min"), py::arg("f_max"),
          py::arg("channel_width"));
    m.def("channel_of", &channel_of, py::arg("plan"), py::arg("f"));
    m.def("samples_per_channel", &samples_per_channel, py::arg("plan"), py::arg("step"));

    py::enum_<EmitterKind>(m, "EmitterKind")
        .value("wideband_tv", EmitterKind::wideband_tv)
        .value("narrowband_incumbent", EmitterKind::narrowband_incumbent);

    py::class_<Emitter>(m, "Emitter")
        .def(py::init([](Hz f_center, Hz bandwidth, double power_db, EmitterKind kind) {
                 return Emitter{f_center, bandwidth, power_db, kind};
             }),
             py::arg("f_center"), py::arg("bandwidth"), py::arg("power_db"),
             py::arg("kind") = EmitterKind::wideband_tv)
        .def_readwrite("f_center", &Emitter::f_center)
        .def_readwrite("bandwidth", &Emitter::bandwidth)
        .def_readwrite("power_db", &Emitter::power_db)
        .def_readwrite("kind", &Emitter::kind);

    py::class_<Scene>(m, "Scene")
        .def(py::init<>())
        .def_readwrite("label", &Scene::label)
        .def_readwrite("noise_psd_db_per_hz", &Scene::noise_psd_db_per_hz)
        .def_readwrite("emitters", &Scene::emitters)
        .def("only", &Scene::only)
        .def("to_json", &scene_to_json)
        .def_static("from_json", &parse_scene)
        .def_static("load", &load_scene_file);
    m.def("band_power", &band_power, py::arg("scene"), py::arg("f_lo"), py::arg("f_hi"));
    m.def(
        "generate_iq",
        [](const Scene& scene, Hz f_center, Hz sample_rate, std::size_t n, std::uint64_t seed) {
            IqBlock block;
            {
                py::gil_scoped_release release;
                block = generate_iq(scene, f_center, sample_rate, n, seed);
            }
            py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(block.size()));
            std::copy(block.begin(), block.end(), out.mutable_data());
            return out;
        },
        py::arg("scene"), py::arg("f_center"), py::arg("sample_rate"), py::arg("n"),
        py::arg("seed"));

    py::enum_<FrontEndMode>(m, "FrontEndMode")
        .value("analytic", FrontEndMode::analytic)
        .value("iq", FrontEndMode::iq);

    py::class_<FrontEndConfig>(m, "FrontEndConfig")
        .def(py::init<>())
        .def_readwrite("mode", &FrontEndConfig::mode)
        .def_readwrite("measurement_bandwidth", &FrontEndConfig::measurement_bandwidth)
        .def_readwrite("sample_rate", &FrontEndConfig::sample_rate)
        .def_readwrite("seed", &FrontEndConfig::seed)
        .def_readwrite("jitter_sigma_db", &FrontEndConfig::jitter_sigma_db);

    py::class_<SimulatedFrontEnd>(m, "SimulatedFrontEnd")
        .def(py::init([](const Scene& scene, const FrontEndConfig& config) {
                 return std::make_unique<SimulatedFrontEnd>(std::make_shared<const Scene>(scene),
                                                            config);
             }),
             py::arg("scene"), py::arg("config") = FrontEndConfig{})
        .def(
            "measure",
            [](SimulatedFrontEnd& fe, Hz f_center, double dwell_s) {
                return fe.measure(f_center, dwell_s).power_db;
            },
            py::arg("f_center"), py::arg("dwell_s") = kDefaultDwellSeconds)
        .def_property("measurement_bandwidth", &SimulatedFrontEnd::measurement_bandwidth,
                      &SimulatedFrontEnd::set_measurement_bandwidth);

    py::class_<SweepConfig>(m, "SweepConfig")
        .def(py::init([](Hz f_min, Hz f_max, Hz step, double dwell_s) {
                 return SweepConfig{f_min, f_max, step, dwell_s};
             }),
             py::arg("f_min") = SweepConfig{}.f_min, py::arg("f_max") = SweepConfig{}.f_max,
             py::arg("step") = SweepConfig{}.step, py::arg("dwell_s") = kDefaultDwellSeconds)
        .def_readwrite("f_min", &SweepConfig::f_min)
        .def_readwrite("f_max", &SweepConfig::f_max)
        .def_readwrite("step", &SweepConfig::step)
        .def_readwrite("dwell_s", &SweepConfig::dwell_s)
        .def("sample_count", &SweepConfig::sample_count);

    py::class_<SweepRecord>(m, "SweepRecord")
        .def_readonly("config", &SweepRecord::config)
        .def_readonly("sensor_id", &SweepRecord::sensor_id)
        .def_property_readonly("frequencies", &frequencies)
        .def_property_readonly("powers", &powers)
        .def_property_readonly("started_at",
                               [](const SweepRecord& r) { return format_rfc3339(r.started_at); })
        .def("to_csv", [](const SweepRecord& r) {
            std::ostringstream out;
            write_sweep_csv(out, r);
            return out.str();
        })
        .def_static("from_powers", &record_from_arrays, py::arg("f_min"), py::arg("f_max"),
                    py::arg("step"), py::arg("powers"), py::arg("dwell_s") = kDefaultDwellSeconds);
    m.def(
        "run_sweep",
        [](SimulatedFrontEnd& fe, const SweepConfig& config, const std::string& sensor_id) {
            py::gil_scoped_release release;
            return run_sweep(fe, config, sensor_id);
        },
        py::arg("frontend"), py::arg("config") = SweepConfig{}, py::arg("sensor_id") = "local");

    py::class_<Threshold>(m, "Threshold")
        .def_readonly("gamma_db", &Threshold::gamma_db)
        .def_readonly("min_db", &Threshold::min_db)
        .def_readonly("max_db", &Threshold::max_db);

    py::enum_<Verdict>(m, "Verdict").value("occupied", Verdict::occupied).value("free", Verdict::free);

    py::class_<ChannelDecision>(m, "ChannelDecision")
        .def_readonly("channel", &ChannelDecision::channel)
        .def_readonly("f_start", &ChannelDecision::f_start)
        .def_readonly("f_end", &ChannelDecision::f_end)
        .def_readonly("verdict", &ChannelDecision::verdict)
        .def_readonly("p_max_db", &ChannelDecision::p_max_db)
        .def_readonly("n_exceeding", &ChannelDecision::n_exceeding);

    m.def("compute_threshold", py::overload_cast<const SweepRecord&>(&compute_threshold),
          py::arg("record"));
    m.def("classify", &classify, py::arg("record"), py::arg("plan"), py::arg("threshold"));
    m.def(
        "white_spaces",
        [](const std::vector<ChannelDecision>& d) { return white_spaces(d); },
        py::arg("decisions"));

    py::class_<ComparisonReport>(m, "ComparisonReport")
        .def_readonly("detected_free", &ComparisonReport::detected_free)
        .def_readonly("reference_free", &ComparisonReport::reference_free)
        .def_readonly("agreeing", &ComparisonReport::agreeing)
        .def_readonly("match_ratio", &ComparisonReport::match_ratio)
        .def_readonly("only_detected", &ComparisonReport::only_detected)
        .def_readonly("only_reference", &ComparisonReport::only_reference);
    m.def("compare", &compare, py::arg("detected"), py::arg("reference"),
          py::arg("total_channels"));
}
