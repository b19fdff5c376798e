#include "asqchain/tuneup.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <unsupported/Eigen/NonLinearOptimization>

#include <boost/math/tools/roots.hpp>

namespace asq {

namespace {

// Chain whose Etilde is exactly e_abs: one pinched ASQ at zero flux.
ChainConfig synthetic_chain(double e_abs) { return ChainConfig(e_abs, {AsqParams{}}, {0.0}); }

template <class F>
double solve_bracketed(F f, double a, double b, const char* what) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa < 0.0) == (fb < 0.0)) throw ConvergenceError(std::string(what) + ": root not bracketed");
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
  if (iters >= 200) throw ConvergenceError(std::string(what) + ": root finder did not converge");
  return 0.5 * (r.first + r.second);
}

// Generic dense least-squares functor with an analytic Jacobian.
struct LsqFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  int n_params = 0, n_values = 0;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd*)> eval;

  int inputs() const { return n_params; }
  int values() const { return n_values; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    eval(x, f, nullptr);
    return 0;
  }
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& j) const {
    Eigen::VectorXd f(n_values);
    eval(x, f, &j);
    return 0;
  }
};

struct FitOutcome {
  Eigen::VectorXd x;
  double ssr = 0.0;
  Eigen::MatrixXd cov;
};

FitOutcome least_squares(LsqFunctor fn, Eigen::VectorXd x0, const char* what) {
  Eigen::LevenbergMarquardt<LsqFunctor> lm(fn);
  lm.parameters.xtol = 1e-15;
  lm.parameters.ftol = 1e-15;
  lm.parameters.maxfev = 4000;
  const auto status = lm.minimize(x0);
  using namespace Eigen::LevenbergMarquardtSpace;
  if (status == ImproperInputParameters || status == TooManyFunctionEvaluation || status == NotStarted ||
      status == UserAsked)
    throw ConvergenceError(std::string(what) + ": least-squares fit failed (status " + std::to_string(status) + ")");
  FitOutcome out;
  out.x = x0;
  Eigen::VectorXd f(fn.n_values);
  Eigen::MatrixXd j(fn.n_values, fn.n_params);
  fn.eval(x0, f, &j);
  out.ssr = f.squaredNorm();
  const double dof = std::max(1, fn.n_values - fn.n_params);
  const Eigen::MatrixXd jtj = j.transpose() * j;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  out.cov = lu.isInvertible() ? Eigen::MatrixXd(lu.inverse() * (out.ssr / dof))
                              : Eigen::MatrixXd::Constant(fn.n_params, fn.n_params, std::numeric_limits<double>::infinity());
  return out;
}

struct Sample {
  double current;  // swept current (uA)
  int spin;
  double y;  // |Etilde|^2 (GHz^2)
  double w;  // 1 / (d|Etilde|^2 / df): residuals weighted back to frequency units
};

Sample make_sample(const ResponseInverter& inv, double current, int spin, double f) {
  const double e = inv.inverse(f);
  const double h = 1e-4 * e;
  const double slope = (inv.forward(e + h) - inv.forward(e - h)) / (2.0 * h);  // df/d|E|
  return {current, spin, e * e, std::abs(slope) / (2.0 * e)};
}

double probe(VirtualDevice& d, Probe p, const RVec& cur, const SpinConfiguration& spins) {
  return p == Probe::Transition ? d.measure_transition(cur, spins) : d.measure_resonator(cur, spins);
}

double circular_mean(const std::vector<double>& t) {
  cplx acc = 0.0;
  for (double v : t) acc += std::polar(1.0, kTwoPi * v);
  return std::arg(acc) / kTwoPi;
}

void require_only_open(const VirtualDevice& d, int i) {
  for (std::size_t k = 0; k < d.size(); ++k) {
    const bool want_open = static_cast<int>(k) == i;
    if (d.pinched(k) == want_open)
      throw ValidationError("qubit " + std::to_string(i + 1) + " must be the only open qubit (qubit " +
                            std::to_string(k + 1) + (want_open ? " is pinched)" : " is open)"));
  }
}

}  // namespace

VirtualDevice::VirtualDevice(ChainConfig truth, BiasModel bias, ReadoutCircuit circuit, ResonatorSpec resonator,
                             double noise, std::uint64_t seed, double nominal_slope)
    : truth_(std::move(truth)),
      bias_(std::move(bias)),
      circuit_(circuit),
      resonator_(resonator),
      noise_(noise),
      nominal_slope_(nominal_slope),
      pinched_(truth_.size(), 0),
      rng_(seed) {
  if (static_cast<std::size_t>(bias_.mutual().rows()) != truth_.size())
    throw ValidationError("bias model size does not match the chain");
  if (!(noise_ >= 0.0) || !std::isfinite(noise_)) throw ValidationError("measurement noise must be finite and >= 0");
  if (!(nominal_slope_ > 0.0) || !std::isfinite(nominal_slope_)) throw ValidationError("nominal slope must be > 0");
  circuit_.validate();
  resonator_.validate();
  if (circuit_.kind != CircuitKind::Transmon) throw ValidationError("tune-up simulation supports transmon readout only");
}

void VirtualDevice::set_pinched(std::size_t i, bool p) {
  if (i >= size()) throw ValidationError("pinch index out of range");
  pinched_[i] = p ? 1 : 0;
}

void VirtualDevice::pinch_all() { std::fill(pinched_.begin(), pinched_.end(), 1); }

bool VirtualDevice::all_pinched() const {
  return std::all_of(pinched_.begin(), pinched_.end(), [](char c) { return c != 0; });
}

ChainConfig VirtualDevice::effective_config(const RVec& currents) const {
  if (static_cast<std::size_t>(currents.size()) != size()) throw ValidationError("current vector has the wrong length");
  const RVec phi = bias_.fluxes(currents);
  std::vector<double> fl(phi.data(), phi.data() + phi.size());
  std::vector<AsqParams> asqs = truth_.asqs();
  for (std::size_t i = 0; i < size(); ++i)
    if (pinched_[i]) {
      asqs[i].e_j = 0.0;
      asqs[i].e_so = 0.0;
    }
  return ChainConfig(truth_.e_j_coupling(), std::move(asqs), std::move(fl));
}

void VirtualDevice::shift_offsets(const RVec& delta) {
  if (static_cast<std::size_t>(delta.size()) != size()) throw ValidationError("offset shift has the wrong length");
  bias_ = BiasModel(bias_.mutual(), bias_.offsets() + delta);
}

double VirtualDevice::noisy(double f) {
  if (noise_ == 0.0) return f;
  std::normal_distribution<double> nd(0.0, noise_);
  return f + nd(rng_);
}

double VirtualDevice::measure_resonator(const RVec& currents, const SpinConfiguration& spins) {
  return noisy(dressed_resonator_freq(circuit_, effective_config(currents), spins, resonator_));
}

double VirtualDevice::measure_transition(const RVec& currents, const SpinConfiguration& spins) {
  return noisy(circuit_levels(circuit_, effective_config(currents), spins).transitions.at(0));
}

std::string to_string(Probe p) { return p == Probe::Resonator ? "resonator" : "transition"; }

Probe probe_from_string(const std::string& s) {
  if (s == "resonator") return Probe::Resonator;
  if (s == "transition") return Probe::Transition;
  throw ValidationError("probe must be 'resonator' or 'transition'");
}

ResponseInverter::ResponseInverter(const ReadoutCircuit& circuit, const ResonatorSpec& resonator, double e_lo,
                                   double e_hi, int grid, Probe probe)
    : circuit_(circuit), resonator_(resonator), probe_(probe) {
  if (!(e_hi > e_lo && e_lo > 0.0) || grid < 3) throw ValidationError("invalid inversion range");
  for (int k = 0; k < grid; ++k) {
    const double x = e_lo + (e_hi - e_lo) * k / (grid - 1);
    x_.push_back(x);
    f_.push_back(forward(x));
  }
  const bool up = f_.back() > f_.front();
  for (int k = 0; k + 1 < grid; ++k)
    if ((f_[k + 1] > f_[k]) != up)
      throw ConvergenceError("probe response is not monotone in |E| near " + std::to_string(x_[k]) +
                             " GHz; cannot invert");
}

double ResponseInverter::forward(double e_abs) const {
  if (probe_ == Probe::Transition) return circuit_levels(circuit_, synthetic_chain(e_abs), {-1}).transitions.at(0);
  return dressed_resonator_freq(circuit_, synthetic_chain(e_abs), {-1}, resonator_);
}

double ResponseInverter::inverse(double f) const {
  const bool up = f_.back() > f_.front();
  const auto lo = std::min(f_.front(), f_.back()), hi = std::max(f_.front(), f_.back());
  if (!(f >= lo && f <= hi))
    throw ConvergenceError("probe reading " + std::to_string(f) + " GHz outside the invertible range");
  std::size_t k = 0;
  while (k + 2 < f_.size() && ((f_[k + 1] < f) == up)) ++k;
  return solve_bracketed([&](double x) { return forward(x) - f; }, x_[k], x_[k + 1], "resonator inversion");
}

double estimate_coupling_ej(VirtualDevice& device) {
  for (std::size_t k = 0; k < device.size(); ++k)
    if (!device.pinched(k))
      throw ValidationError("estimate_coupling_ej requires every qubit pinched; qubit " + std::to_string(k + 1) +
                            " is open");
  const RVec zero = RVec::Zero(static_cast<Eigen::Index>(device.size()));
  const double f = device.measure_transition(zero, SpinConfiguration(device.size(), -1));
  const double ec = device.circuit().e_c;
  auto f01 = [&](double x) { return circuit_levels(device.circuit(), synthetic_chain(x), {-1}).transitions.at(0) - f; };
  // transmon asymptote f01 ~ sqrt(8 E_J E_c) - E_c as the starting guess
  const double x0 = std::max(ec, (f + ec) * (f + ec) / (8.0 * ec));
  double a = x0 / 1.2, b = x0 * 1.2;
  for (int it = 0; it < 40 && f01(a) > 0.0; ++it) a /= 1.5;
  for (int it = 0; it < 40 && f01(b) < 0.0; ++it) b *= 1.5;
  return solve_bracketed(f01, a, b, "E_J estimate");
}

QubitCalibration calibrate_qubit(VirtualDevice& device, int i, double e_j, const RVec& base,
                                 const TuneupOptions& opt) {
  const int n = static_cast<int>(device.size());
  if (i < 0 || i >= n) throw ValidationError("qubit index out of range");
  if (!(e_j > 0.0)) throw ValidationError("E_J estimate must be > 0");
  if (base.size() != n) throw ValidationError("base current vector has the wrong length");
  if (opt.points_per_period < 8) throw ValidationError("need at least 8 points per period");
  require_only_open(device, i);

  const ResponseInverter inv(device.circuit(), device.resonator(), 0.6 * e_j, 1.4 * e_j, 241, opt.probe);
  const double period = 1.0 / device.nominal_slope();
  const int pts = opt.points_per_period;
  std::vector<Sample> data;
  for (int k = 0; k < pts; ++k) {
    RVec cur = base;
    cur(i) = base(i) + period * k / pts;
    for (int s : {1, -1}) {
      SpinConfiguration spins(n, -1);
      spins[i] = s;
      data.push_back(make_sample(inv, cur(i), s, probe(device, opt.probe, cur, spins)));
    }
  }
  const int nv = static_cast<int>(data.size());

  // Linear scan over the slope for a starting point.
  const double m_nom = device.nominal_slope();
  double best_ssr = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_coef;
  double best_m = m_nom;
  for (int g = 0; g <= 120; ++g) {
    const double m = m_nom * (0.7 + 0.6 * g / 120.0);
    Eigen::MatrixXd a(nv, 5);
    Eigen::VectorXd y(nv);
    for (int r = 0; r < nv; ++r) {
      const double u = kTwoPi * m * data[r].current;
      const double w = data[r].w;
      a.row(r) << w, w * std::cos(u), w * std::sin(u), w * data[r].spin * std::cos(u), w * data[r].spin * std::sin(u);
      y(r) = w * data[r].y;
    }
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
    const double ssr = (a * c - y).squaredNorm();
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best_coef = c;
      best_m = m;
    }
  }
  const double amp_j = std::hypot(best_coef(1), best_coef(2)) / (2.0 * e_j);
  const double amp_so = std::hypot(best_coef(3), best_coef(4)) / (2.0 * e_j);
  const double beta = amp_so >= amp_j ? std::atan2(best_coef(3), best_coef(4)) : std::atan2(best_coef(2), -best_coef(1));

  LsqFunctor fn;
  fn.n_params = 5;
  fn.n_values = nv;
  fn.eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd& f, Eigen::MatrixXd* jac) {
    for (int r = 0; r < nv; ++r) {
      const double u = kTwoPi * (p(3) * data[r].current + p(4));
      const double cu = std::cos(u), su = std::sin(u), s = data[r].spin;
      const double w = data[r].w;
      f(r) = w * (p(0) - 2.0 * e_j * p(1) * cu + 2.0 * e_j * s * p(2) * su - data[r].y);
      if (jac) {
        const double du = w * (2.0 * e_j * p(1) * su + 2.0 * e_j * s * p(2) * cu);
        (*jac)(r, 0) = w;
        (*jac)(r, 1) = -2.0 * e_j * cu * w;
        (*jac)(r, 2) = 2.0 * e_j * s * su * w;
        (*jac)(r, 3) = du * kTwoPi * data[r].current;
        (*jac)(r, 4) = du * kTwoPi;
      }
    }
  };
  Eigen::VectorXd p0(5);
  p0 << best_coef(0), amp_j, amp_so, best_m, beta / kTwoPi;
  const auto fit = least_squares(fn, p0, "qubit calibration");
  double A = fit.x(0), a = fit.x(1), e = fit.x(2), m = fit.x(3), b = fit.x(4);
  if (a < 0.0) {  // shift by half a period
    a = -a;
    e = -e;
    b += 0.5;
  }
  if (e < 0.0) {  // reflect theta -> -theta
    e = -e;
    m = -m;
    b = -b;
  }
  const double floor_abs = 1e-6 * e_j;
  const double sig_a = std::sqrt(std::max(0.0, fit.cov(1, 1))), sig_e = std::sqrt(std::max(0.0, fit.cov(2, 2)));
  const bool a_res = a > std::max(floor_abs, 3.0 * sig_a);
  const bool e_res = e > std::max(floor_abs, 3.0 * sig_e);
  if (!a_res && !e_res)
    throw ConvergenceError("fit failure, insufficient modulation");

  QubitCalibration q;
  q.index = i;
  q.spin_flagged = !e_res;
  if (q.spin_flagged) {
    e = 0.0;
    if (m < 0.0) {
      m = -m;
      b = -b;
    }
  }
  q.e_so = e;
  q.e_j = a;
  q.slope = m;
  q.offset = wrap_flux(b);
  q.mean_sq = A;
  q.fit_rms = std::sqrt(fit.ssr / nv);
  q.current_zero = (std::round(q.offset) - q.offset) / m;
  q.current_phi0 = q.current_zero + 1.0 / m;
  return q;
}

void remap_bias(VirtualDevice& device, Calibration& cal, const TuneupOptions& opt) {
  const int n = static_cast<int>(device.size());
  if (static_cast<int>(cal.qubits.size()) != n) throw ValidationError("calibration does not cover every qubit");
  const double e_j = cal.e_j;
  RVec base(n);
  for (int k = 0; k < n; ++k) base(k) = cal.qubits[k].current_zero;

  RMat c = RMat::Zero(n, n);
  RVec theta_base(n);
  const ResponseInverter inv(device.circuit(), device.resonator(), 0.6 * e_j, 1.4 * e_j, 241, opt.probe);
  const int pts = opt.points_per_period;
  for (int i = 0; i < n; ++i) {
    const auto& qi = cal.qubits[i];
    for (int k = 0; k < n; ++k) device.set_pinched(k, k != i);
    std::vector<double> t0s;
    // Every current, including qubit i's own, is swept over one period
    // around the sequential setpoints; the mappings may have moved since.
    for (int k = 0; k < n; ++k) {
      const double period = 1.0 / std::abs(cal.qubits[k].slope);
      std::vector<Sample> data;
      for (int p = 0; p < pts; ++p) {
        RVec cur = base;
        const double d = period * (static_cast<double>(p) / pts - 0.5);
        cur(k) += d;
        for (int s : {1, -1}) {
          SpinConfiguration spins(n, -1);
          spins[i] = s;
          data.push_back(make_sample(inv, d, s, probe(device, opt.probe, cur, spins)));
        }
      }
      LsqFunctor fn;
      fn.n_params = 2;
      fn.n_values = static_cast<int>(data.size());
      fn.eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd& f, Eigen::MatrixXd* jac) {
        for (std::size_t r = 0; r < data.size(); ++r) {
          const double u = kTwoPi * (p(0) * data[r].current + p(1));
          const double cu = std::cos(u), su = std::sin(u), s = data[r].spin;
          const double w = data[r].w;
          f(r) = w * (qi.mean_sq - 2.0 * e_j * qi.e_j * cu + 2.0 * e_j * s * qi.e_so * su - data[r].y);
          if (jac) {
            const double du = w * (2.0 * e_j * qi.e_j * su + 2.0 * e_j * s * qi.e_so * cu);
            (*jac)(r, 0) = du * kTwoPi * data[r].current;
            (*jac)(r, 1) = du * kTwoPi;
          }
        }
      };
      Eigen::VectorXd p0(2), f(fn.n_values);
      p0 << (k == i ? qi.slope : 0.0), 0.0;
      double best = std::numeric_limits<double>::infinity(), best_t = 0.0;
      for (int g = 0; g < 64; ++g) {
        p0(1) = g / 64.0;
        fn.eval(p0, f, nullptr);
        if (f.squaredNorm() < best) {
          best = f.squaredNorm();
          best_t = p0(1);
        }
      }
      p0(1) = best_t;
      const auto fit = least_squares(fn, p0, "bias remap");
      c(i, k) = fit.x(0);
      t0s.push_back(fit.x(1));
    }
    theta_base(i) = circular_mean(t0s);
  }
  for (int k = 0; k < n; ++k) device.set_pinched(k, false);

  Eigen::FullPivLU<RMat> lu(c);
  if (!lu.isInvertible()) throw ConvergenceError("recovered flux-response matrix is singular");
  const RVec d = theta_base - c * base;
  // Theta = L Phi with L lower-triangular ones.
  cal.mutual = RMat(n, n);
  cal.offsets = RVec(n);
  for (int j = 0; j < n; ++j) {
    cal.mutual.row(j) = j == 0 ? RVec(c.row(0).transpose()) : RVec((c.row(j) - c.row(j - 1)).transpose());
    cal.offsets(j) = wrap_flux(j == 0 ? d(0) : d(j) - d(j - 1));
  }
  RVec target(n);
  for (int j = 0; j < n; ++j) target(j) = std::round(theta_base(j));
  cal.currents_zero = base + lu.solve(RVec(target - theta_base));
  const RMat minv = cal.mutual.inverse();
  cal.currents_phi0 = RMat(n, n);
  for (int r = 0; r < n; ++r) cal.currents_phi0.row(r) = (cal.currents_zero + minv.col(r)).transpose();
  for (int r = 0; r < n; ++r) {
    cal.qubits[r].current_zero = cal.currents_zero(r);
    cal.qubits[r].current_phi0 = cal.currents_phi0(r, r);
  }
  cal.remapped = true;
}

TuneupResult run_tuneup(VirtualDevice& device, const TuneupOptions& opt) {
  const int n = static_cast<int>(device.size());
  std::vector<char> saved(n);
  for (int k = 0; k < n; ++k) saved[k] = device.pinched(k);
  auto restore = [&] {
    for (int k = 0; k < n; ++k) device.set_pinched(k, saved[k] != 0);
  };

  std::vector<std::string> failures;
  bool numeric = false;
  TuneupResult out;
  Calibration& cal = out.calibration;
  try {
    device.pinch_all();
    cal.e_j = estimate_coupling_ej(device);
  } catch (const ConvergenceError& e) {
    restore();
    throw ConvergenceError(std::string("E_J step: ") + e.what());
  }

  RVec base = RVec::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) device.set_pinched(k, k != i);
    try {
      auto q = calibrate_qubit(device, i, cal.e_j, base, opt);
      base(i) = q.current_zero;
      cal.qubits.push_back(q);
    } catch (const ConvergenceError& e) {
      numeric = true;
      failures.push_back(std::string("qubit ") + std::to_string(i + 1) + ": " + e.what());
      QubitCalibration q;
      q.index = i;
      cal.qubits.push_back(q);
    } catch (const ValidationError& e) {
      failures.push_back(std::string("qubit ") + std::to_string(i + 1) + ": " + e.what());
      QubitCalibration q;
      q.index = i;
      cal.qubits.push_back(q);
    }
  }

  if (failures.empty()) {
    if (opt.field_offset_shift.size() > 0) device.shift_offsets(opt.field_offset_shift);
    if (opt.remap) {
      try {
        remap_bias(device, cal, opt);
      } catch (const ConvergenceError& e) {
        numeric = true;
        failures.push_back(std::string("remap: ") + e.what());
      }
    } else {
      cal.currents_zero = base;
      cal.currents_phi0 = RMat(n, n);
      for (int r = 0; r < n; ++r) {
        RVec row = base;
        row(r) = cal.qubits[r].current_phi0;
        cal.currents_phi0.row(r) = row.transpose();
      }
    }
  }
  restore();
  if (!failures.empty()) {
    std::string msg = "tune-up failed:";
    for (const auto& f : failures) msg += "\n  " + f;
    if (numeric) throw ConvergenceError(msg);
    throw ValidationError(msg);
  }
  out.report = truth_report(device, cal);
  return out;
}

std::vector<TruthRow> truth_report(const VirtualDevice& device, const Calibration& cal) {
  std::vector<TruthRow> rows;
  auto add = [&](std::string name, double truth, double est, std::optional<double> err = std::nullopt) {
    TruthRow r{std::move(name), truth, est, err ? *err : std::abs(est - truth), 0.0};
    r.rel_error = truth != 0.0 ? r.abs_error / std::abs(truth) : r.abs_error;
    rows.push_back(r);
  };
  const auto& t = device.truth();
  const int n = static_cast<int>(device.size());
  add("e_j", t.e_j_coupling(), cal.e_j);
  for (int i = 0; i < n && i < static_cast<int>(cal.qubits.size()); ++i) {
    const auto s = std::to_string(i + 1);
    add("e_so_" + s, t.asq(i).e_so, cal.qubits[i].e_so);
    add("e_j_" + s, t.asq(i).e_j, cal.qubits[i].e_j);
  }
  if (cal.currents_zero.size() == n) {
    const RVec f0 = device.bias().fluxes(cal.currents_zero);
    for (int i = 0; i < n; ++i) {
      const double d = flux_distance(f0(i), 0.0);
      add("flux_zero_" + std::to_string(i + 1), 0.0, d, std::abs(d));
    }
    if (cal.currents_phi0.rows() == n) {
      for (int i = 0; i < n; ++i) {
        const RVec delta = device.bias().fluxes(cal.currents_phi0.row(i).transpose()) - f0;
        RVec want = RVec::Zero(n);
        want(i) = 1.0;
        add("flux_phi0_" + std::to_string(i + 1), 1.0, delta(i), (delta - want).cwiseAbs().maxCoeff());
      }
    }
  }
  if (cal.remapped) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        add("mutual_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), device.bias().mutual()(i, j),
            cal.mutual(i, j));
    for (int i = 0; i < n; ++i) {
      const double tr = wrap_flux(device.bias().offsets()(i));
      add("offset_" + std::to_string(i + 1), tr, cal.offsets(i), std::abs(flux_distance(cal.offsets(i), tr)));
    }
  }
  return rows;
}

}  // namespace asq
