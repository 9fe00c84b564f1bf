#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "plap/error.hpp"
#include "plap/perturbation.hpp"

namespace plap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Signed periodic offset of s from c in [-L/2, L/2).
double periodic_offset(double s, double c, double L) {
  double d = std::fmod(s - c + 0.5 * L, L);
  if (d < 0.0) d += L;
  return d - 0.5 * L;
}

double term_value(const TangentField::Term& t, double s, double L) {
  switch (t.kind) {
    case TangentField::Kind::constant:
      return t.amplitude;
    case TangentField::Kind::sine:
      return t.amplitude * std::sin(kTwoPi * t.k * s / L);
    case TangentField::Kind::cosine:
      return t.amplitude * std::cos(kTwoPi * t.k * s / L);
    case TangentField::Kind::bump: {
      const double z = periodic_offset(s, t.center, L) / t.width;
      if (std::abs(z) >= 1.0) return 0.0;
      return t.amplitude * std::exp(1.0 - 1.0 / (1.0 - z * z));
    }
  }
  return 0.0;
}

double term_derivative(const TangentField::Term& t, double s, double L) {
  switch (t.kind) {
    case TangentField::Kind::constant:
      return 0.0;
    case TangentField::Kind::sine: {
      const double w = kTwoPi * t.k / L;
      return t.amplitude * w * std::cos(w * s);
    }
    case TangentField::Kind::cosine: {
      const double w = kTwoPi * t.k / L;
      return -t.amplitude * w * std::sin(w * s);
    }
    case TangentField::Kind::bump: {
      const double z = periodic_offset(s, t.center, L) / t.width;
      if (std::abs(z) >= 1.0) return 0.0;
      const double g = 1.0 - z * z;
      return t.amplitude * std::exp(1.0 - 1.0 / g) * (-2.0 * z / (t.width * g * g));
    }
  }
  return 0.0;
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

TangentField::TangentField(std::vector<Term> terms, double period)
    : terms_(std::move(terms)), period_(period) {
  if (!(period_ > 0.0)) throw Error(ErrorCode::parameter_out_of_range, "field period must be positive");
  for (const auto& t : terms_) {
    if (t.kind == Kind::bump && !(t.width > 0.0 && t.width < 0.5 * period_)) {
      throw Error(ErrorCode::parameter_out_of_range, "bump width must lie in (0, L/2)");
    }
    if ((t.kind == Kind::sine || t.kind == Kind::cosine) && t.k < 1) {
      throw Error(ErrorCode::parameter_out_of_range, "harmonic index must be >= 1");
    }
  }
}

TangentField TangentField::constant(double value, double period) {
  return TangentField({Term{Kind::constant, value, 1, 0.0, 1.0}}, period);
}

TangentField TangentField::sine(int k, double period, double amplitude) {
  return TangentField({Term{Kind::sine, amplitude, k, 0.0, 1.0}}, period);
}

TangentField TangentField::cosine(int k, double period, double amplitude) {
  return TangentField({Term{Kind::cosine, amplitude, k, 0.0, 1.0}}, period);
}

TangentField TangentField::bump(double center, double width, double period, double amplitude) {
  return TangentField({Term{Kind::bump, amplitude, 1, center, width}}, period);
}

TangentField TangentField::parse(std::string_view spec, double period) {
  const std::string s(spec);
  auto bad = [&s](const std::string& why) {
    return Error(ErrorCode::config_invalid_value, "field '" + s + "': " + why);
  };
  const auto colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  auto to_double = [&](const std::string& text) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(text, &used);
    } catch (const std::exception&) {
      throw bad("expected a number, got '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(x)) throw bad("expected a number, got '" + text + "'");
    return x;
  };
  auto to_int = [&](const std::string& text) {
    const double x = to_double(text);
    if (x != std::floor(x) || x < 1.0) throw bad("harmonic index must be a positive integer");
    return static_cast<int>(x);
  };
  try {
    if (head == "constant") return constant(arg.empty() ? 1.0 : to_double(arg), period);
    if (head == "sin") return sine(arg.empty() ? 1 : to_int(arg), period);
    if (head == "cos") return cosine(arg.empty() ? 1 : to_int(arg), period);
    if (head == "bump") {
      const auto comma = arg.find(',');
      if (comma == std::string::npos) throw bad("expected bump:<center>,<width>");
      return bump(to_double(arg.substr(0, comma)), to_double(arg.substr(comma + 1)), period);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parameter_out_of_range) throw bad(e.what());
    throw;
  }
  throw bad("unknown field kind (expected constant|sin:k|cos:k|bump:center,width)");
}

double TangentField::value(double s) const {
  double v = 0.0;
  for (const auto& t : terms_) v += term_value(t, s, period_);
  return v;
}

double TangentField::derivative(double s) const {
  double v = 0.0;
  for (const auto& t : terms_) v += term_derivative(t, s, period_);
  return v;
}

bool TangentField::is_zero() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.amplitude == 0.0; });
}

std::string TangentField::name() const {
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += "+";
    if (t.amplitude != 1.0) out += format_number(t.amplitude) + "*";
    switch (t.kind) {
      case Kind::constant: out += "constant"; break;
      case Kind::sine: out += "sin:" + std::to_string(t.k); break;
      case Kind::cosine: out += "cos:" + std::to_string(t.k); break;
      case Kind::bump: out += "bump:" + format_number(t.center) + "," + format_number(t.width); break;
    }
  }
  return out.empty() ? "zero" : out;
}

TangentField operator+(const TangentField& a, const TangentField& b) {
  if (std::abs(a.period_ - b.period_) > 1e-12 * a.period_) {
    throw Error(ErrorCode::parameter_out_of_range, "cannot add fields with different periods");
  }
  std::vector<TangentField::Term> terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return TangentField(std::move(terms), a.period_);
}

BoundaryFlow::BoundaryFlow(TangentField field, double t) : field_(std::move(field)), t_(t) {
  if (!std::isfinite(t)) throw Error(ErrorCode::parameter_out_of_range, "flow time must be finite");
}

int BoundaryFlow::steps_for(double t) {
  return std::max(100, static_cast<int>(std::ceil(std::abs(t) / 1e-3)));
}

namespace {

struct FlowState {
  double s;
  double jac;
};

FlowState integrate(const TangentField& v, double s, double t) {
  FlowState x{s, 1.0};
  if (t == 0.0) return x;
  const int n = BoundaryFlow::steps_for(t);
  const double dt = t / n;
  for (int i = 0; i < n; ++i) {
    const double k1 = v.value(x.s);
    const double j1 = v.derivative(x.s) * x.jac;
    const double s2 = x.s + 0.5 * dt * k1;
    const double k2 = v.value(s2);
    const double j2 = v.derivative(s2) * (x.jac + 0.5 * dt * j1);
    const double s3 = x.s + 0.5 * dt * k2;
    const double k3 = v.value(s3);
    const double j3 = v.derivative(s3) * (x.jac + 0.5 * dt * j2);
    const double s4 = x.s + dt * k3;
    const double k4 = v.value(s4);
    const double j4 = v.derivative(s4) * (x.jac + dt * j3);
    x.s += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x.jac += dt / 6.0 * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
  }
  return x;
}

}  // namespace

double BoundaryFlow::forward(double s) const { return integrate(field_, s, t_).s; }
double BoundaryFlow::inverse(double s) const { return integrate(field_, s, -t_).s; }
double BoundaryFlow::jacobian(double s) const { return integrate(field_, s, t_).jac; }

double flow_map(const TangentField& v, double t, double s) { return BoundaryFlow(v, t).forward(s); }

double tangential_jacobian(const TangentField& v, double t, double s) {
  return BoundaryFlow(v, t).jacobian(s);
}

PiecewiseLoad transport_load(const PiecewiseLoad& f, const TangentField& v, double t) {
  if (std::abs(f.period() - v.period()) > 1e-9 * f.period()) {
    throw Error(ErrorCode::mesh_mismatch, "field period does not match the load period");
  }
  const BoundaryFlow flow(v, t);
  std::vector<double> breaks;
  breaks.reserve(f.num_pieces());
  for (double b : f.breaks()) breaks.push_back(flow.forward(b));
  // The flow is an orientation-preserving circle map; clip rounding so the
  // breakpoints stay ordered within one period.
  for (std::size_t k = 1; k < breaks.size(); ++k) breaks[k] = std::max(breaks[k], breaks[k - 1]);
  if (breaks.back() > breaks.front() + f.period()) breaks.back() = breaks.front() + f.period();
  return PiecewiseLoad(std::move(breaks), f.values(), f.period());
}

}  // namespace plap
