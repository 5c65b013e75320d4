#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "amprestore/amp.hpp"
#include "amprestore/audio.hpp"
#include "amprestore/fixed_amp.hpp"
#include "amprestore/linops.hpp"
#include "amprestore/metrics.hpp"
#include "amprestore/wav.hpp"

namespace py = pybind11;
using namespace amprestore;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Signal to_signal(const Array& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1-D array");
    return Signal(a.data(), a.data() + a.size());
}

Array to_array(const Signal& s) { return Array(static_cast<py::ssize_t>(s.size()), s.data()); }

std::shared_ptr<const DenseMatrix> to_matrix(const Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D matrix");
    return std::make_shared<DenseMatrix>(a.shape(0), a.shape(1), std::vector<double>(a.data(), a.data() + a.size()));
}

AudioBuffer to_audio(const Array& a, int sample_rate) {
    AudioBuffer buf;
    buf.sample_rate = sample_rate;
    if (a.ndim() == 1) {
        buf.channels.push_back(to_signal(a));
    } else if (a.ndim() == 2) {
        const auto frames = static_cast<std::size_t>(a.shape(1));
        for (py::ssize_t c = 0; c < a.shape(0); ++c)
            buf.channels.emplace_back(a.data() + c * frames, a.data() + (c + 1) * frames);
    } else {
        throw std::invalid_argument("audio must be 1-D (mono) or 2-D (channels x frames)");
    }
    buf.validate();
    return buf;
}

Array from_audio(const AudioBuffer& buf) {
    Array out({buf.channels.size(), buf.frames()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t c = 0; c < buf.channels.size(); ++c)
        for (std::size_t f = 0; f < buf.frames(); ++f) view(c, f) = buf.channels[c][f];
    return out;
}

py::list trace_rows(const Trace& trace) {
    py::list rows;
    for (const auto& r : trace) rows.append(py::make_tuple(r.t, r.residual_l2, r.lambda, r.support));
    return rows;
}

SolverConfig config_or_default(const std::optional<SolverConfig>& c) { return c.value_or(SolverConfig{}); }

}  // namespace

PYBIND11_MODULE(_amprestore, m) {
    m.doc() = "AMP sparse recovery and audio click removal";

    static py::exception<DivergenceError> divergence(m, "DivergenceError", PyExc_RuntimeError);
    static py::exception<WavError> wav_error(m, "WavError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DivergenceError& e) {
            py::set_error(divergence, e.what());
        } catch (const WavError& e) {
            py::set_error(wav_error, e.what());
        } catch (const ParseError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init([](int max_iters, double tolerance, const std::string& policy, std::optional<double> onsager_cap,
                         double damping) {
                 SolverConfig c;
                 c.max_iters = max_iters;
                 c.tolerance = tolerance;
                 c.policy = parse_threshold_policy(policy);
                 c.onsager_cap = onsager_cap;
                 c.damping = damping;
                 c.validate();
                 return c;
             }),
             py::arg("max_iters") = 28, py::arg("tolerance") = 1e-6, py::arg("policy") = "residual:1.5",
             py::arg("onsager_cap") = py::none(), py::arg("damping") = 0.0)
        .def_readwrite("max_iters", &SolverConfig::max_iters)
        .def_readwrite("tolerance", &SolverConfig::tolerance)
        .def_readwrite("onsager_cap", &SolverConfig::onsager_cap)
        .def_readwrite("damping", &SolverConfig::damping)
        .def_property(
            "policy", [](const SolverConfig& c) { return to_string(c.policy); },
            [](SolverConfig& c, const std::string& s) { c.policy = parse_threshold_policy(s); })
        .def("__repr__", [](const SolverConfig& c) {
            return "SolverConfig(max_iters=" + std::to_string(c.max_iters) + ", policy='" + to_string(c.policy) + "')";
        });

    m.def("dct_forward", [](const Array& x) { return to_array(dct_forward(to_signal(x))); }, py::arg("x"),
          "Orthonormal DCT-II.");
    m.def("dct_inverse", [](const Array& c) { return to_array(dct_inverse(to_signal(c))); }, py::arg("c"),
          "Orthonormal DCT-III (inverse of dct_forward).");
    m.def("soft_threshold", [](const Array& v, double lam) { return to_array(soft_threshold(to_signal(v), lam)); },
          py::arg("v"), py::arg("lam"));

    auto recover = [](bool ist) {
        return [ist](const Array& y, const Array& a, std::optional<SolverConfig> cfg) {
            const auto op = to_matrix(a);
            const Signal ys = to_signal(y);
            RecoveryResult r;
            {
                py::gil_scoped_release release;
                r = ist ? ist_recover(ys, *op, config_or_default(cfg)) : amp_recover(ys, *op, config_or_default(cfg));
            }
            return py::make_tuple(to_array(r.estimate), trace_rows(r.trace), r.converged);
        };
    };
    m.def("amp_recover", recover(false), py::arg("y"), py::arg("A"), py::arg("config") = py::none(),
          "AMP recovery of x from y = A x. Returns (estimate, trace, converged); trace rows are "
          "(t, residual_l2, lambda, support).");
    m.def("ist_recover", recover(true), py::arg("y"), py::arg("A"), py::arg("config") = py::none(),
          "Iterative soft thresholding: AMP without the Onsager term.");
    m.def(
        "amp_recover_fixed",
        [](const Array& y, const Array& a, std::optional<SolverConfig> cfg, const std::string& fmt) {
            const auto op = to_matrix(a);
            const RecoveryResult r =
                amp_recover_fixed(to_signal(y), *op, config_or_default(cfg), FixedPointFormat::parse(fmt));
            return py::make_tuple(to_array(r.estimate), trace_rows(r.trace), r.converged);
        },
        py::arg("y"), py::arg("A"), py::arg("config") = py::none(), py::arg("fmt") = "Q3.12");

    m.def("quantize", [](double x, const std::string& fmt) { return quantize(x, FixedPointFormat::parse(fmt)); },
          py::arg("x"), py::arg("fmt") = "Q3.12", "Raw Q-format word nearest to x (saturating).");
    m.def("dequantize", [](FixedRaw raw, const std::string& fmt) { return dequantize(raw, FixedPointFormat::parse(fmt)); },
          py::arg("raw"), py::arg("fmt") = "Q3.12");
    m.def("mac",
          [](FixedRaw acc, FixedRaw a, FixedRaw b, const std::string& fmt) {
              return mac(acc, a, b, FixedPointFormat::parse(fmt));
          },
          py::arg("acc"), py::arg("a"), py::arg("b"), py::arg("fmt") = "Q3.12");
    m.def("trsh",
          [](FixedRaw v, FixedRaw lam, const std::string& fmt) { return trsh(v, lam, FixedPointFormat::parse(fmt)); },
          py::arg("v"), py::arg("lam"), py::arg("fmt") = "Q3.12");

    m.def(
        "corrupt_clicks",
        [](const Array& audio, double rate, double amplitude, std::size_t width, std::uint64_t seed) {
            const CorruptionResult r = corrupt_clicks(to_audio(audio, 44100), ClickSpec{rate, amplitude, width, seed});
            py::object out = from_audio(r.corrupted);
            if (audio.ndim() == 1) out = to_array(r.corrupted.channels[0]);
            return py::make_tuple(out, r.positions);
        },
        py::arg("audio"), py::arg("rate"), py::arg("amplitude") = 0.5, py::arg("width") = 1, py::arg("seed") = 0);

    m.def("segment_blocks",
          [](const Array& x, std::size_t block_len, std::size_t hop) {
              std::vector<Array> out;
              for (const auto& b : segment_blocks(to_signal(x), block_len, hop)) out.push_back(to_array(b));
              return out;
          },
          py::arg("x"), py::arg("block_len") = 512, py::arg("hop") = 256);
    m.def("overlap_add",
          [](const std::vector<Array>& blocks, std::size_t block_len, std::size_t hop, std::size_t original_len) {
              std::vector<Signal> bs;
              for (const auto& b : blocks) bs.push_back(to_signal(b));
              return to_array(overlap_add(bs, block_len, hop, original_len));
          },
          py::arg("blocks"), py::arg("block_len"), py::arg("hop"), py::arg("original_len"));

    m.def(
        "restore",
        [](const Array& audio, int sample_rate, std::size_t block_len, std::size_t hop,
           std::optional<SolverConfig> cfg, std::optional<std::string> fixed, unsigned threads) {
            RestoreConfig rc;
            rc.block_len = block_len;
            rc.hop = hop;
            rc.solver = config_or_default(cfg);
            if (fixed) rc.fixed = FixedPointFormat::parse(*fixed);
            rc.threads = threads;
            const AudioBuffer in = to_audio(audio, sample_rate);
            RestoreResult r;
            {
                py::gil_scoped_release release;
                r = restore(in, rc);
            }
            py::list report;
            for (const auto& b : r.report) {
                py::dict d;
                d["block"] = b.block;
                d["channel"] = b.channel;
                d["iters"] = b.iters;
                d["final_residual"] = b.final_residual;
                d["support"] = b.support;
                d["flag"] = b.diverged ? "diverged" : "ok";
                report.append(d);
            }
            py::object out = from_audio(r.restored);
            if (audio.ndim() == 1) out = to_array(r.restored.channels[0]);
            return py::make_tuple(out, report);
        },
        py::arg("audio"), py::arg("sample_rate") = 44100, py::arg("block_len") = 512, py::arg("hop") = 256,
        py::arg("config") = py::none(), py::arg("fixed") = py::none(), py::arg("threads") = 0,
        "Remove clicks. audio is 1-D or (channels, frames). Returns (restored, report).");

    m.def("read_wav",
          [](const std::string& path) {
              const AudioBuffer b = read_wav(path);
              return py::make_tuple(from_audio(b), b.sample_rate);
          },
          py::arg("path"), "Returns ((channels, frames) float array, sample_rate).");
    m.def("write_wav",
          [](const std::string& path, const Array& audio, int sample_rate) {
              write_wav(path, to_audio(audio, sample_rate));
          },
          py::arg("path"), py::arg("audio"), py::arg("sample_rate") = 44100);

    m.def("rmse", [](const Array& a, const Array& b) { return rmse(to_signal(a), to_signal(b)); });
    m.def("snr_improvement", [](const Array& clean, const Array& corrupted, const Array& restored) {
        return snr_improvement(to_signal(clean), to_signal(corrupted), to_signal(restored));
    });
    m.def(
        "make_gaussian_instance",
        [](std::size_t rows, std::size_t cols, std::size_t k, double sigma, std::uint64_t seed) {
            const GaussianInstance g = make_gaussian_instance(rows, cols, k, sigma, seed);
            Array a({rows, cols});
            std::copy(g.matrix->data().begin(), g.matrix->data().end(), a.mutable_data());
            return py::make_tuple(a, to_array(g.truth), to_array(g.measurements));
        },
        py::arg("rows"), py::arg("cols"), py::arg("k"), py::arg("sigma") = 0.0, py::arg("seed") = 0,
        "Returns (A, x0, y) with unit-norm Gaussian columns and +-1 spikes.");
}
