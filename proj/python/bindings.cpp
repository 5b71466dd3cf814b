#include "sgmod/capacity_analysis.hpp"
#include "sgmod/core_math.hpp"
#include "sgmod/density_evolution.hpp"
#include "sgmod/link_sim.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

namespace py = pybind11;
using namespace sgmod;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

// Rows of equal length -> 2-D array.
py::array_t<double> to_matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  py::array_t<double> a({rows.size(), cols});
  auto m = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return a;
}

Receiver parse_receiver(const std::string& mode) {
  if (mode == "sic" || mode == "modified-sic") return Receiver::ModifiedSic;
  if (mode == "pic" || mode == "two-stage") return Receiver::TwoStagePic;
  throw ConfigError("unknown mode '" + mode + "' (expected 'pic' or 'sic')");
}

SystemParams system(double alpha, double sigma2, int w, double theta) {
  SystemParams p;
  p.alpha = alpha;
  p.sigma2 = sigma2;
  p.w = w;
  p.theta = Snr(theta);
  return p;
}

GridSpec grid_spec(const std::string& model, double t_min, double t_max, double dt) {
  GridSpec g;
  if (model == "continuous") {
    g.model = Model::Continuous;
  } else if (model == "discrete") {
    g.model = Model::Discrete;
  } else {
    throw ConfigError("unknown model '" + model + "'");
  }
  g.t_min = t_min;
  g.t_max = t_max;
  g.dt = dt;
  return g;
}

py::dict de_run(double alpha, double sigma2, const std::string& mode, double theta, int w, const std::string& model,
                double t_min, double t_max, double dt, int max_iter, double tolerance) {
  DeOptions opts;
  opts.max_iter = max_iter;
  opts.tolerance = tolerance;
  DeTrajectory traj;
  {
    py::gil_scoped_release release;
    traj = run_de(system(alpha, sigma2, w, theta), parse_receiver(mode), grid_spec(model, t_min, t_max, dt), opts);
  }
  std::vector<std::vector<double>> z, x;
  for (const auto& p : traj.profiles) {
    z.push_back(p.z);
    x.push_back(p.x);
  }
  const auto& g = traj.profiles.front().grid;
  std::vector<double> t(g.size);
  for (std::size_t i = 0; i < g.size; ++i) t[i] = g.at(i);

  py::dict d;
  d["t"] = to_array(t);
  d["z"] = to_matrix(z);
  d["x"] = to_matrix(x);
  d["front"] = to_array(traj.front);
  d["speed"] = to_array(traj.speed);
  d["iterations"] = traj.iterations;
  d["converged"] = traj.converged;
  d["stalled_at"] = traj.stalled_at ? py::object(py::int_(*traj.stalled_at)) : py::object(py::none());
  return d;
}

LinkSimConfig link_config(const py::kwargs& kw) {
  LinkSimConfig c;
  for (const auto& item : kw) {
    const auto key = item.first.cast<std::string>();
    const py::handle v = item.second;
    if (key == "n_dims") c.n_dims = v.cast<int>();
    else if (key == "m_substreams") c.m_substreams = v.cast<int>();
    else if (key == "k_streams") c.k_streams = v.cast<int>();
    else if (key == "w") c.w = v.cast<int>();
    else if (key == "l_bits") c.l_bits = v.cast<int>();
    else if (key == "slots") c.slots = v.cast<int>();
    else if (key == "sigma2") c.sigma2 = v.cast<double>();
    else if (key == "power") c.power = v.cast<double>();
    else if (key == "seed") c.seed = v.cast<std::uint64_t>();
    else if (key == "iterations") c.iterations = v.cast<int>();
    else if (key == "mode") c.receiver = parse_receiver(v.cast<std::string>());
    else if (key == "theta") c.theta = Snr(v.cast<double>());
    else throw ConfigError("unknown link-sim parameter '" + key + "'");
  }
  return c;
}

}  // namespace

PYBIND11_MODULE(_sgmod, m) {
  m.doc() = "Density evolution, capacity curves and link simulation for spatially coupled sparse-graph modulation";

  m.def("mse_g", py::overload_cast<double>(&mse_g), py::arg("a"),
        "Bit MSE of the tanh estimate at SINR a; accepts inf.");
  m.def("biawgn_capacity", py::overload_cast<double>(&biawgn_capacity), py::arg("gamma"),
        "BPSK capacity on the real AWGN channel, bits per use.");
  m.def(
      "biawgn_capacity_inverse", [](double r) { return biawgn_capacity_inverse(CapacityValue(r)).value(); },
      py::arg("rate"));
  m.def(
      "awgn_capacity_fixed_point", [](double e) { return awgn_capacity_fixed_point(EbN0(e)).bits(); },
      py::arg("ebn0"), "Spectral efficiency C solving C = 1/2 log2(1 + 2 C Eb/N0); Eb/N0 linear.");
  m.def(
      "c_eff", [](double alpha, double s) { return c_eff(alpha, s).bits(); }, py::arg("alpha"), py::arg("s"));
  m.def(
      "ebn0_of", [](double alpha, double s) { return ebn0_of(alpha, s).ratio(); }, py::arg("alpha"), py::arg("s"));
  m.def(
      "wave_threshold",
      [](double alpha, double sigma2, double delta) { return wave_threshold(alpha, sigma2, delta).value(); },
      py::arg("alpha"), py::arg("sigma2"), py::arg("delta") = 0.0);
  m.def(
      "wave_rate",
      [](double alpha, double sigma2, double delta) { return wave_rate(alpha, sigma2, delta).bits(); },
      py::arg("alpha"), py::arg("sigma2"), py::arg("delta") = 0.0);
  m.def("limit_efficiency", &limit_efficiency, py::arg("s"));
  m.def("limit_ebn0", &limit_ebn0, py::arg("s"));
  m.def(
      "s_for_ebn0", [](double alpha, double ebn0) { return s_for_ebn0(alpha, EbN0(ebn0)); }, py::arg("alpha"),
      py::arg("ebn0"));
  m.def("uncoupled_fixed_point", &uncoupled_fixed_point, py::arg("alpha"), py::arg("sigma2"),
        py::arg("max_iter") = 100000);

  m.def("run_de", &de_run, py::arg("alpha"), py::arg("sigma2"), py::arg("mode") = "pic",
        py::arg("theta") = std::numeric_limits<double>::infinity(), py::arg("w") = 1,
        py::arg("model") = "continuous", py::arg("t_min") = -1.0, py::arg("t_max") = 20.0, py::arg("dt") = 1e-2,
        py::arg("max_iter") = 50, py::arg("tolerance") = 1e-12,
        "Density evolution. Returns a dict with t, z and x (iteration x grid), front, speed.");

  m.def(
      "two_stage_max_rate",
      [](double alpha, double sigma2, double t_max, double dt, int max_iter) {
        py::gil_scoped_release release;
        const auto r = two_stage_max_rate(system(alpha, sigma2, 1, kInf), grid_spec("continuous", -1.0, t_max, dt),
                                          max_iter);
        return std::make_pair(r.efficiency.bits(), r.theta.value());
      },
      py::arg("alpha"), py::arg("sigma2"), py::arg("t_max") = 20.0, py::arg("dt") = 1e-2, py::arg("max_iter") = 200,
      "(spectral efficiency, threshold) of the two-stage receiver.");

  m.def(
      "sweep",
      [](std::vector<double> alphas, std::vector<double> s_values, std::vector<std::string> receivers) {
        SweepSpec spec;
        spec.alphas = std::move(alphas);
        spec.s_values = std::move(s_values);
        spec.receivers.clear();
        for (const auto& r : receivers) spec.receivers.push_back(curve_receiver_from_string(r));
        CurveTable table;
        {
          py::gil_scoped_release release;
          table = sweep_curves(spec);
        }
        py::list rows;
        for (const auto& r : table.rows) {
          py::dict d;
          d["receiver"] = to_string(r.receiver);
          d["alpha"] = r.alpha;
          d["s"] = r.s;
          d["sigma2"] = r.sigma2;
          d["ebn0_db"] = r.ebn0.db();
          d["spectral_efficiency"] = r.spectral_efficiency.bits();
          rows.append(d);
        }
        return rows;
      },
      py::arg("alphas"), py::arg("s_values"),
      py::arg("receivers") = std::vector<std::string>{"modified-sic", "awgn-capacity"},
      "Spectral-efficiency curve rows as a list of dicts, sorted by Eb/N0.");

  m.def(
      "run_link_sim",
      [](const py::kwargs& kw) {
        const auto cfg = link_config(kw);
        LinkSimResult r;
        {
          py::gil_scoped_release release;
          r = run_link_sim(cfg);
        }
        py::dict d;
        d["x_hat"] = to_matrix(r.x_hat);
        d["sinr"] = to_matrix(r.sinr);
        d["decoded"] = r.decoded;
        d["mean_abs_error"] = to_array(r.mean_abs_error);
        std::vector<int> centre;
        for (const auto& c : r.codewords) centre.push_back(c.centre_slot);
        d["centre_slot"] = centre;
        return d;
      },
      "Link simulation; keyword arguments mirror LinkSimConfig (mode='pic'|'sic').");

  m.def(
      "compare_with_de",
      [](int seeds, const py::kwargs& kw) {
        const auto cfg = link_config(kw);
        DeComparison c;
        {
          py::gil_scoped_release release;
          c = compare_with_de(cfg, seeds);
        }
        py::dict d;
        d["de_x"] = to_matrix(c.de_x);
        d["sim_x"] = to_matrix(c.sim_x);
        d["max_rel_error"] = to_array(c.max_rel_error);
        return d;
      },
      py::arg("seeds"), "Seed-averaged x_hat next to discrete density evolution.");
}
