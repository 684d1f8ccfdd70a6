#include "dipole/waveop.hpp"

#include <algorithm>

namespace dipole {

const char* to_string(Channel c) {
  switch (c) {
    case Channel::In:
      return "in";
    case Channel::Loc:
      return "loc";
    case Channel::Out:
      return "out";
  }
  return "?";
}

const char* to_string(Sign s) {
  switch (s) {
    case Sign::Plus:
      return "+";
    case Sign::Minus:
      return "-";
    case Sign::None:
      return "none";
  }
  return "?";
}

Channel parse_channel(const std::string& s) {
  if (s == "in") return Channel::In;
  if (s == "loc") return Channel::Loc;
  if (s == "out") return Channel::Out;
  throw ParseError("unknown channel '" + s + "' (expected in, loc or out)");
}

Sign parse_sign(const std::string& s) {
  if (s == "+" || s == "plus") return Sign::Plus;
  if (s == "-" || s == "minus") return Sign::Minus;
  if (s == "none") return Sign::None;
  throw ParseError("unknown sign '" + s + "'");
}

const char* to_string(MultKind k) {
  switch (k) {
    case MultKind::ChiT:
      return "chi_t";
    case MultKind::ChiDT:
      return "chi_d_t";
    case MultKind::HaagRuelleOnly:
      return "haag_ruelle";
    case MultKind::SmoothPoly:
      return "smooth_poly";
    case MultKind::Product:
      return "product";
  }
  return "?";
}

MultKind parse_mult_kind(const std::string& s) {
  if (s == "chi_t") return MultKind::ChiT;
  if (s == "chi_d_t") return MultKind::ChiDT;
  if (s == "haag_ruelle") return MultKind::HaagRuelleOnly;
  if (s == "smooth_poly") return MultKind::SmoothPoly;
  if (s == "product") return MultKind::Product;
  throw ParseError("unknown multiplier kind '" + s + "'");
}

Cutoff::Cutoff(double eps_, double mass) : eps(eps_) {
  if (!(mass > 0)) throw InvalidArgument("mass must be positive");
  if (!(eps_ > 0 && eps_ < mass * mass)) throw InvalidArgument("cutoff needs 0 < eps < m^2");
}

namespace {
Multiplier shell_mult(MultKind k, Channel c, double t, double mass, Cutoff cut) {
  if (!(mass > 0)) throw InvalidArgument("mass must be positive");
  if (!(cut.eps > 0 && cut.eps < mass * mass)) throw InvalidArgument("cutoff needs 0 < eps < m^2");
  Multiplier m;
  m.kind = k;
  m.channel = c;
  m.t = t;
  m.mass = mass;
  m.cutoff = cut;
  return m;
}
}  // namespace

Multiplier Multiplier::chi_t(Channel c, double t, double mass, Cutoff cut) {
  return shell_mult(MultKind::ChiT, c, t, mass, cut);
}
Multiplier Multiplier::chi_d_t(Channel c, double t, double mass, Cutoff cut) {
  return shell_mult(MultKind::ChiDT, c, t, mass, cut);
}
Multiplier Multiplier::haag_ruelle(Channel c, double t, double mass, Cutoff cut) {
  return shell_mult(MultKind::HaagRuelleOnly, c, t, mass, cut);
}

Multiplier Multiplier::smooth_poly(Poly p) {
  Multiplier m;
  m.kind = MultKind::SmoothPoly;
  m.poly = std::move(p);
  return m;
}

Multiplier Multiplier::product(std::vector<Multiplier> f) {
  Multiplier m;
  m.kind = MultKind::Product;
  m.factors = std::move(f);
  return m;
}

double Multiplier::shell_support() const {
  switch (kind) {
    case MultKind::ChiT:
    case MultKind::ChiDT:
    case MultKind::HaagRuelleOnly:
      return channel == Channel::Loc ? -1.0 : cutoff.eps;
    case MultKind::SmoothPoly:
      return -1.0;
    case MultKind::Product: {
      double best = -1.0;
      for (const auto& f : factors) {
        const double s = f.shell_support();
        if (s > 0 && (best < 0 || s < best)) best = s;
      }
      return best;
    }
  }
  return -1.0;
}

double Multiplier::max_time() const {
  double t_max = 0.0;
  if (kind == MultKind::Product)
    for (const auto& f : factors) t_max = std::max(t_max, f.max_time());
  else if (kind != MultKind::SmoothPoly && channel != Channel::Loc)
    t_max = std::abs(t);
  return t_max;
}

bool Multiplier::is_identity() const {
  switch (kind) {
    case MultKind::ChiT:
    case MultKind::ChiDT:
    case MultKind::HaagRuelleOnly:
      return channel == Channel::Loc;
    case MultKind::SmoothPoly:
      return poly.terms().size() == 1 && poly.terms().begin()->first == MultiIndex{} &&
             poly.terms().begin()->second == cplx(1.0);
    case MultKind::Product:
      return std::all_of(factors.begin(), factors.end(), [](const Multiplier& f) { return f.is_identity(); });
  }
  return false;
}

cplx eval_multiplier(const Multiplier& mu, const std::vector<double>& k) {
  return eval_multiplier<cplx>(mu, cplx(k[0]), k.data() + 1, static_cast<int>(k.size()));
}

cplx WaveOpHandle::eval(const std::vector<double>& k) const {
  if (static_cast<int>(k.size()) != p_.dim()) throw DimensionMismatch("point dimension mismatch");
  return eval<cplx>(cplx(k[0]), k.data() + 1);
}

WaveOpHandle apply_waveop(const Multiplier& mu, const WavePacket& p) { return WaveOpHandle(mu, p); }

}  // namespace dipole
