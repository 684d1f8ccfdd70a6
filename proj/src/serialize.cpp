#include "dipole/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace dipole {

namespace {

// Schema violation tagged with the key that caused it, so file loaders can
// point at a line.
struct SchemaError : ParseError {
  std::string key;
  SchemaError(const std::string& k, const std::string& msg) : ParseError(msg), key(k) {}
};

const Json& need(const Json& j, const char* key) {
  if (!j.is_object()) throw SchemaError(key, "expected an object holding '" + std::string(key) + "'");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(key, "missing key '" + std::string(key) + "'");
  return *it;
}

double num(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_number()) throw SchemaError(key, "key '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

std::vector<double> num_list(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_array()) throw SchemaError(key, "key '" + std::string(key) + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw SchemaError(key, "key '" + std::string(key) + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::string str(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_string()) throw SchemaError(key, "key '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

Json real(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

Json real_list(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

std::pair<int, int> line_col(const std::string& text, size_t offset) {
  int line = 1, col = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T, class F>
T load_located(const std::string& path, F convert) {
  const std::string text = read_file(path);
  const Json j = parse_json_text(text, path);
  try {
    return convert(j);
  } catch (const SchemaError& e) {
    const size_t at = text.find("\"" + e.key + "\"");
    const auto [line, col] = line_col(text, at == std::string::npos ? 0 : at);
    throw ParseError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  } catch (const Json::exception& e) {
    throw ParseError(path + ":1:1: " + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(path + ":1:1: " + e.what());
  }
}

}  // namespace

WavePacket random_packet(Lcg& rng, int dim, Sign energy, double mass) {
  if (dim < 2 || dim > kMaxDim) throw InvalidArgument("packet dimension must be 2..4");
  if (energy == Sign::None) energy = rng.uniform() < 0.5 ? Sign::Plus : Sign::Minus;
  std::vector<double> center(dim), sig(dim), phase(dim), widths(dim * dim, 0.0);
  double kk = 0.0;
  for (int a = 1; a < dim; ++a) {
    center[a] = rng.uniform(-0.8, 0.8);
    kk += center[a] * center[a];
  }
  center[0] = sign_value(energy) * std::sqrt(kk + mass * mass) + rng.uniform(-0.2, 0.2);
  for (int a = 0; a < dim; ++a) {
    sig[a] = rng.uniform(0.3, 0.6);
    phase[a] = rng.uniform(-1.0, 1.0);
    widths[a * dim + a] = 1.0 / (sig[a] * sig[a]);
  }
  const double rho = rng.uniform(-0.3, 0.3);
  widths[1] = widths[dim] = rho / (sig[0] * sig[1]);
  Poly poly = Poly::constant(dim, 1.0);
  for (int a = 0; a < dim; ++a) {
    MultiIndex e{};
    e[a] = 1;
    const cplx c(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    poly.add_term(e, c);
    poly.add_term(MultiIndex{}, -c * center[a]);
  }
  return WavePacket(poly, center, widths, phase);
}

Json to_json(cplx z) { return Json::array({real(z.real()), real(z.imag())}); }

cplx cplx_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw SchemaError("coeff", "complex numbers are [re, im] pairs");
}

Json to_json(const SmearValue& v) {
  return Json{{"value", to_json(v.value)},
              {"err_est", real(v.err_est)},
              {"n_evals", v.n_evals},
              {"tolerance_met", v.tolerance_met}};
}

Json to_json(const QuadSpec& q) {
  return Json{{"abs_tol", q.abs_tol},
              {"rel_tol", q.rel_tol},
              {"max_depth", q.max_depth},
              {"truncation_radius", q.truncation_radius},
              {"max_intervals", q.max_intervals},
              {"strict", q.strict}};
}

QuadSpec quad_spec_from_json(const Json& j, QuadSpec q) {
  if (j.contains("abs_tol")) q.abs_tol = num(j, "abs_tol");
  if (j.contains("rel_tol")) q.rel_tol = num(j, "rel_tol");
  if (j.contains("max_depth")) q.max_depth = static_cast<int>(num(j, "max_depth"));
  if (j.contains("truncation_radius")) q.truncation_radius = num(j, "truncation_radius");
  if (j.contains("max_intervals")) q.max_intervals = static_cast<int>(num(j, "max_intervals"));
  if (j.contains("strict")) q.strict = need(j, "strict").get<bool>();
  q.validate();
  return q;
}

Json to_json(const WavePacket& p) {
  Json poly = Json::array();
  for (const auto& [e, c] : p.poly().terms()) {
    Json idx = Json::array();
    for (int a = 0; a < p.dim(); ++a) idx.push_back(e[a]);
    poly.push_back(Json::array({idx, real(c.real()), real(c.imag())}));
  }
  return Json{{"dim", p.dim()},
              {"poly", poly},
              {"center", real_list(p.center())},
              {"widths", real_list(p.widths())},
              {"phase_shift", real_list(p.phase_shift())}};
}

WavePacket packet_from_json(const Json& j) {
  const int dim = static_cast<int>(num(j, "dim"));
  if (dim < 2 || dim > kMaxDim) throw SchemaError("dim", "packet dimension must be 2..4");
  Poly poly(dim);
  const Json& terms = need(j, "poly");
  if (!terms.is_array()) throw SchemaError("poly", "'poly' must be an array of [multi-index, re, im]");
  for (const auto& t : terms) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_array() || static_cast<int>(t[0].size()) != dim)
      throw SchemaError("poly", "'poly' entries must be [multi-index of length dim, re, im]");
    MultiIndex e{};
    for (int a = 0; a < dim; ++a) e[a] = t[0][a].get<int>();
    poly.add_term(e, cplx(t[1].get<double>(), t[2].get<double>()));
  }
  std::vector<double> phase(dim, 0.0);
  if (j.contains("phase_shift")) phase = num_list(j, "phase_shift");
  const auto center = num_list(j, "center");
  const auto widths = num_list(j, "widths");
  if (static_cast<int>(center.size()) != dim) throw SchemaError("center", "'center' must have dim entries");
  if (static_cast<int>(widths.size()) != dim * dim) throw SchemaError("widths", "'widths' must have dim*dim entries");
  if (static_cast<int>(phase.size()) != dim) throw SchemaError("phase_shift", "'phase_shift' must have dim entries");
  try {
    return WavePacket(poly, center, widths, phase);
  } catch (const Error& e) {
    throw SchemaError("widths", e.what());
  }
}

Json to_json(const Multiplier& m) {
  Json j{{"kind", to_string(m.kind)}};
  switch (m.kind) {
    case MultKind::SmoothPoly: {
      const int dim = m.poly.dim();
      Json poly = Json::array();
      for (const auto& [e, c] : m.poly.terms()) {
        Json idx = Json::array();
        for (int a = 0; a < dim; ++a) idx.push_back(e[a]);
        poly.push_back(Json::array({idx, real(c.real()), real(c.imag())}));
      }
      j["dim"] = dim;
      j["poly"] = poly;
      break;
    }
    case MultKind::Product: {
      Json f = Json::array();
      for (const auto& x : m.factors) f.push_back(to_json(x));
      j["factors"] = f;
      break;
    }
    default:
      j["channel"] = to_string(m.channel);
      j["t"] = m.t;
      j["eps"] = m.cutoff.eps;
      j["mass"] = m.mass;
  }
  return j;
}

Multiplier multiplier_from_json(const Json& j) {
  MultKind kind;
  const std::string name = str(j, "kind");
  try {
    kind = parse_mult_kind(name);
  } catch (const ParseError& e) {
    throw SchemaError("kind", e.what());
  }
  switch (kind) {
    case MultKind::SmoothPoly: {
      const int dim = static_cast<int>(num(j, "dim"));
      Poly p(dim);
      for (const auto& t : need(j, "poly")) {
        MultiIndex e{};
        for (int a = 0; a < dim; ++a) e[a] = t.at(0).at(a).get<int>();
        p.add_term(e, cplx(t.at(1).get<double>(), t.at(2).get<double>()));
      }
      return Multiplier::smooth_poly(p);
    }
    case MultKind::Product: {
      std::vector<Multiplier> f;
      for (const auto& x : need(j, "factors")) f.push_back(multiplier_from_json(x));
      return Multiplier::product(std::move(f));
    }
    default: {
      const double mass = j.contains("mass") ? num(j, "mass") : 1.0;
      const Cutoff cut = j.contains("eps") ? Cutoff(num(j, "eps"), mass) : Cutoff::standard(mass);
      const std::string chname = str(j, "channel");
      Channel ch;
      try {
        ch = parse_channel(chname);
      } catch (const ParseError& e) {
        throw SchemaError("channel", e.what());
      }
      const double t = num(j, "t");
      if (kind == MultKind::ChiT) return Multiplier::chi_t(ch, t, mass, cut);
      if (kind == MultKind::ChiDT) return Multiplier::chi_d_t(ch, t, mass, cut);
      return Multiplier::haag_ruelle(ch, t, mass, cut);
    }
  }
}

Json to_json(const DistExpr& e) {
  Json terms = Json::array();
  for (const auto& t : e.terms) {
    Json factors = Json::array();
    for (const auto& f : t.factors) {
      Json jf{{"kind", to_string(f.kind)}, {"sign", to_string(f.sign)}, {"mass", f.mass}};
      if (f.multiplier) jf["multiplier"] = to_json(*f.multiplier);
      factors.push_back(jf);
    }
    terms.push_back(Json{{"coeff", to_json(t.coeff)}, {"factors", factors}, {"conservation", t.conservation}});
  }
  return Json{{"n_args", e.n_args}, {"terms", terms}};
}

DistExpr dist_expr_from_json(const Json& j) {
  DistExpr e;
  e.n_args = static_cast<int>(num(j, "n_args"));
  for (const auto& t : need(j, "terms")) {
    DistTerm term;
    term.coeff = t.contains("coeff") ? cplx_from_json(t["coeff"]) : cplx(1.0);
    for (const auto& f : need(t, "factors")) {
      ShellFactor sf;
      const std::string kname = str(f, "kind");
      const std::string sname = f.contains("sign") ? str(f, "sign") : "none";
      try {
        sf.kind = parse_factor_kind(kname);
        sf.sign = parse_sign(sname);
      } catch (const ParseError& ex) {
        throw SchemaError("kind", ex.what());
      }
      sf.mass = f.contains("mass") ? num(f, "mass") : 1.0;
      if (f.contains("multiplier")) sf.multiplier = multiplier_from_json(f["multiplier"]);
      term.factors.push_back(sf);
    }
    if (t.contains("conservation"))
      for (const auto& s : t["conservation"]) term.conservation.push_back(s.get<int>());
    e.terms.push_back(std::move(term));
  }
  try {
    e.validate();
  } catch (const InvalidArgument& ex) {
    throw SchemaError("terms", ex.what());
  }
  return e;
}

Json to_json(const MomentModel& m) {
  Json cum = Json::object();
  for (const auto& [n, v] : m.cumulants) cum[std::to_string(n)] = v;
  Json j{{"mass", m.mass}, {"dim", m.dim}, {"c", m.c}, {"cumulants", cum}};
  if (m.generator) j["generator"] = Json{{"type", "poisson"}, {"lambda", m.generator->lambda}, {"a", m.generator->a}};
  j["one_point"] = m.one_point;
  j["w2_normalization"] = m.w2_normalization;
  return j;
}

MomentModel model_from_json(const Json& j) {
  MomentModel m;
  if (j.contains("mass")) m.mass = num(j, "mass");
  if (j.contains("dim")) m.dim = static_cast<int>(num(j, "dim"));
  if (j.contains("generator")) {
    const Json& g = j["generator"];
    if (str(g, "type") != "poisson") throw SchemaError("type", "only the 'poisson' generator is known");
    m.generator = PoissonGenerator{num(g, "lambda"), num(g, "a")};
    m.c = m.generator->lambda * m.generator->a * m.generator->a;
  }
  if (j.contains("c")) m.c = num(j, "c");
  if (j.contains("cumulants")) {
    const Json& c = j["cumulants"];
    if (c.is_array()) {
      // listed from n = 2 upwards
      int n = 2;
      for (const auto& v : c) {
        if (!v.is_number()) throw SchemaError("cumulants", "cumulants must be numbers");
        m.cumulants[n++] = v.get<double>();
      }
    } else if (c.is_object()) {
      for (const auto& [k, v] : c.items()) {
        if (!v.is_number()) throw SchemaError("cumulants", "cumulants must be numbers");
        m.cumulants[std::stoi(k)] = v.get<double>();
      }
    } else {
      throw SchemaError("cumulants", "'cumulants' must be an array (from n = 2) or an object keyed by n");
    }
  }
  if (j.contains("one_point")) m.one_point = num(j, "one_point");
  if (j.contains("w2_normalization")) m.w2_normalization = num(j, "w2_normalization");
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError("mass", e.what());
  }
  return m;
}

Json to_json(const CouplingMeasure& r) {
  Json atoms = Json::array();
  for (const auto& [a, w] : r.atoms) atoms.push_back(Json::array({a, w}));
  return Json{{"atoms", atoms}, {"trigonometric", r.trigonometric}};
}

CouplingMeasure coupling_from_json(const Json& j) {
  CouplingMeasure r;
  for (const auto& a : need(j, "atoms")) {
    if (!a.is_array() || a.size() != 2) throw SchemaError("atoms", "atoms are [alpha, weight] pairs");
    r.atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
  }
  if (j.contains("trigonometric")) r.trigonometric = need(j, "trigonometric").get<bool>();
  try {
    r.validate();
  } catch (const InvalidArgument& e) {
    throw SchemaError("atoms", e.what());
  }
  return r;
}

Json to_json(const LemmaReport& r) {
  Json cases = Json::array();
  for (const auto& c : r.cases)
    cases.push_back(Json{{"packet", c.packet_index},
                         {"t", c.t},
                         {"plain", to_json(c.plain)},
                         {"multiplied", to_json(c.multiplied)},
                         {"rel_dev", real(c.rel_dev)},
                         {"err_est", real(c.err_est)}});
  return Json{{"lemma", r.lemma == ShellLemma::A3 ? "A3" : "A4"},
              {"channel", to_string(r.channel)},
              {"sign", to_string(r.sign)},
              {"max_rel_dev", real(r.max_rel_dev)},
              {"tolerance", r.tolerance},
              {"pass", r.pass},
              {"cases", cases}};
}

Json to_json(const LimitReport& r) {
  Json values = Json::array();
  for (size_t i = 0; i < r.values.size(); ++i)
    values.push_back(Json{{"t", r.t[i]},
                          {"value", to_json(r.values[i])},
                          {"err_est", real(r.err_est[i])},
                          {"deviation", real(r.deviations[i])},
                          {"rel_deviation", real(r.rel_deviations[i])}});
  Json ok = Json::array();
  for (bool b : r.ratio_ok) ok.push_back(b);
  Json j{{"power", r.power},
         {"channel", to_string(r.channel)},
         {"target", to_json(r.target)},
         {"target_err", real(r.target_err)},
         {"values", values},
         {"decay_ratios", real_list(r.decay_ratios)},
         {"ratio_ok", ok},
         {"noise_floor", real(r.noise_floor)},
         {"monotone_tail", r.monotone_tail},
         {"non_decaying", r.non_decaying},
         {"analogy_constant", to_json(r.analogy_constant)},
         {"tol_final", r.tol_final},
         {"min_ratio", r.min_ratio}};
  if (r.has_extrapolation) j["aitken_extrapolation"] = to_json(r.extrapolated);
  j["pass"] = r.pass;
  return j;
}

Json to_json(const RegReport& r) {
  Json levels = Json::array();
  for (size_t k = 0; k < r.levels.size(); ++k)
    levels.push_back(Json{{"sigma", r.sigmas[k]},
                          {"value", to_json(r.levels[k].value)},
                          {"err_est", real(r.levels[k].err_est)},
                          {"richardson", to_json(r.extrapolants[k])}});
  Json ok = Json::array();
  for (bool b : r.contraction_ok) ok.push_back(b);
  return Json{{"levels", levels}, {"contraction_ok", ok}, {"converged", r.converged}, {"result", to_json(r.value)}};
}

Json to_json(const LimitPathReport& r) {
  Json values = Json::array();
  for (size_t i = 0; i < r.values.size(); ++i) values.push_back(Json{{"t", r.t[i]}, {"value", to_json(r.values[i])}});
  return Json{{"values", values}, {"increments", real_list(r.increments)}, {"limit", to_json(r.limit)}};
}

Json to_json(const DivergenceReport& r) {
  Json values = Json::array();
  for (size_t i = 0; i < r.values.size(); ++i) values.push_back(Json{{"t", r.t[i]}, {"value", to_json(r.values[i])}});
  Json ch = Json::array();
  for (Channel c : r.channels) ch.push_back(to_string(c));
  return Json{{"multiplier", to_string(r.kind)},
              {"channels", ch},
              {"values", values},
              {"loglog_slope", real(r.slope)},
              {"loglog_intercept", real(r.intercept)},
              {"max_over_min", real(r.max_over_min)},
              {"growing", r.growing},
              {"bounded", r.bounded},
              {"min_slope", r.min_slope},
              {"max_ratio", r.max_ratio}};
}

Json to_json(const FirstOrderReport& r) {
  Json terms = Json::array();
  for (const auto& t : r.terms)
    terms.push_back(Json{{"subset", t.subset},
                         {"moment", to_json(t.moment)},
                         {"integral", real(t.integral)},
                         {"integral_err", real(t.integral_err)},
                         {"pairing_factor", real(t.pairing_factor)},
                         {"value", to_json(t.value)}});
  return Json{{"free_part", real(r.free_part)},
              {"correction", to_json(r.correction)},
              {"value", to_json(r.value)},
              {"err_est", real(r.err_est)},
              {"volume_term_consumed", r.volume_term_consumed},
              {"terms", terms}};
}

Json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

Json load_json_file(const std::string& path) { return parse_json_text(read_file(path), path); }

std::vector<WavePacket> load_packets_file(const std::string& path) {
  return load_located<std::vector<WavePacket>>(path, [](const Json& j) {
    std::vector<WavePacket> out;
    const Json* list = &j;
    if (j.is_object() && j.contains("packets")) list = &j["packets"];
    if (list->is_array()) {
      for (const auto& p : *list) out.push_back(packet_from_json(p));
    } else {
      out.push_back(packet_from_json(*list));
    }
    return out;
  });
}

MomentModel load_model_file(const std::string& path) {
  return load_located<MomentModel>(path, [](const Json& j) { return model_from_json(j); });
}

CouplingMeasure load_coupling_file(const std::string& path) {
  return load_located<CouplingMeasure>(path, [](const Json& j) { return coupling_from_json(j); });
}

DistExpr load_dist_file(const std::string& path) {
  return load_located<DistExpr>(path, [](const Json& j) { return dist_expr_from_json(j); });
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace dipole
