#include "berger/io.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace berger {

using nlohmann::json;

nlohmann::json scalar_to_json(const Scalar& s, bool allow_sqrt_form) {
  if (s.is_rational()) return json{{"rat", s.rational_value().str()}};
  if (allow_sqrt_form && s.is_exact())
    return json{{"coef", s.exact_coef().str()}, {"sqrt", s.exact_rad().str()}};
  json out;
  out["dec"] = s.to_real().str();
  out["prec"] = s.precision_bits();
  return out;
}

Scalar scalar_from_json(const json& j) {
  if (j.is_number_integer()) return Scalar(static_cast<long>(j.get<long long>()));
  if (j.is_string()) return Scalar::parse_rational(j.get<std::string>());
  if (!j.is_object()) throw IoError("scalar must be an object, integer, or \"p/q\" string");
  if (j.contains("rat")) return Scalar::parse_rational(j.at("rat").get<std::string>());
  if (j.contains("sqrt")) {
    Scalar rad = Scalar::parse_rational(j.at("sqrt").get<std::string>());
    Scalar coef =
        j.contains("coef") ? Scalar::parse_rational(j.at("coef").get<std::string>()) : Scalar(1);
    return Scalar::exact(coef.rational_value(), rad.rational_value());
  }
  if (j.contains("dec")) {
    unsigned bits = j.contains("prec") ? j.at("prec").get<unsigned>() : 0;
    return Scalar::parse_decimal(j.at("dec").get<std::string>(), bits);
  }
  throw IoError("scalar object needs \"rat\", \"dec\", or \"sqrt\"");
}

nlohmann::json measure_to_json(const Measure& mu) {
  json out;
  out["zero_mass"] = scalar_to_json(mu.zero_mass());
  out["atoms"] = json::array();
  for (const auto& a : mu.atoms())
    out["atoms"].push_back(
        json{{"log_pos", scalar_to_json(a.log_pos)}, {"mass", scalar_to_json(a.mass)}});
  out["terms"] = json::array();
  for (const auto& t : mu.terms())
    out["terms"].push_back(json{{"coeff", scalar_to_json(t.coeff)},
                                {"alpha", scalar_to_json(t.alpha)},
                                {"k", scalar_to_json(t.k)},
                                {"log_support", scalar_to_json(t.log_support)}});
  if (mu.special()) {
    out["special"] = json{{"kind", "levy"},
                          {"c", scalar_to_json(mu.special()->c)},
                          {"scale", scalar_to_json(mu.special()->scale)}};
  }
  return out;
}

Measure measure_from_json(const json& j) {
  if (!j.is_object()) throw IoError("measure must be a JSON object");
  Scalar zero(0);
  if (j.contains("zero_mass")) zero = scalar_from_json(j.at("zero_mass"));
  std::vector<Atom> atoms;
  if (j.contains("atoms"))
    for (const auto& a : j.at("atoms"))
      atoms.push_back(Atom{scalar_from_json(a.at("log_pos")), scalar_from_json(a.at("mass"))});
  std::vector<DensityTerm> terms;
  if (j.contains("terms"))
    for (const auto& t : j.at("terms"))
      terms.push_back(DensityTerm(
          scalar_from_json(t.at("coeff")), scalar_from_json(t.at("alpha")),
          scalar_from_json(t.at("k")),
          t.contains("log_support") ? scalar_from_json(t.at("log_support")) : Scalar(0)));
  std::optional<SpecialDensity> special;
  if (j.contains("special")) {
    const auto& s = j.at("special");
    if (s.at("kind").get<std::string>() != "levy") throw IoError("unknown special density kind");
    special = SpecialDensity{SpecialDensity::Kind::levy, scalar_from_json(s.at("c")),
                             scalar_from_json(s.at("scale"))};
  }
  return Measure(std::move(zero), std::move(atoms), std::move(terms), std::move(special));
}

nlohmann::json shift_to_json(const WeightSequence& w) {
  json out;
  out["prefix"] = json::array();
  for (const auto& a : w.prefix()) out["prefix"].push_back(scalar_to_json(a, true));
  if (w.has_tail()) {
    const TailRule& rule = *w.tail();
    if (const auto* c = std::get_if<ConstantTail>(&rule))
      out["tail"] = json{{"kind", "constant"}, {"value", scalar_to_json(c->value, true)}};
    else if (const auto* a = std::get_if<AglerTail>(&rule))
      out["tail"] = json{{"kind", "agler"}, {"j", a->j}};
    else {
      const auto& p = std::get<PowerRatioTail>(rule);
      out["tail"] = json{{"kind", "power_ratio"},
                         {"r", scalar_to_json(p.r, true)},
                         {"s", scalar_to_json(p.s, true)}};
    }
  } else {
    out["tail"] = nullptr;
  }
  if (w.tail_offset() != 0) out["offset"] = w.tail_offset();
  return out;
}

WeightSequence shift_from_json(const json& j) {
  if (!j.is_object()) throw IoError("shift must be a JSON object");
  std::vector<Scalar> prefix;
  if (j.contains("prefix"))
    for (const auto& a : j.at("prefix")) prefix.push_back(scalar_from_json(a));
  std::optional<TailRule> tail;
  if (j.contains("tail") && !j.at("tail").is_null()) {
    const auto& t = j.at("tail");
    std::string kind = t.at("kind").get<std::string>();
    if (kind == "constant")
      tail = ConstantTail{scalar_from_json(t.at("value"))};
    else if (kind == "agler")
      tail = AglerTail{t.at("j").get<long>()};
    else if (kind == "power_ratio")
      tail = PowerRatioTail{scalar_from_json(t.at("r")), scalar_from_json(t.at("s"))};
    else
      throw IoError("unknown tail rule: " + kind);
  }
  long offset = j.contains("offset") ? j.at("offset").get<long>() : 0;
  return WeightSequence(std::move(prefix), std::move(tail), offset);
}

nlohmann::json report_to_json(const VerificationReport& report) {
  json out;
  out["n_checked"] = report.n_checked;
  out["residuals"] = json::array();
  for (const auto& r : report.residuals) out["residuals"].push_back(r.str(12));
  out["max_residual"] = report.max_residual.str(12);
  out["tol"] = report.tol.str(6);
  out["pass"] = report.pass;
  out["notes"] = report.notes;
  return out;
}

namespace {

json parse_stream(std::istream& in, const std::string& what) {
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    throw IoError("cannot parse " + what + ": " + e.what());
  }
}

json load_json(const std::string& path) {
  if (path == "-") return parse_stream(std::cin, "stdin");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  return parse_stream(in, path);
}

void save_json(const json& j, const std::string& path) {
  if (path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

Measure load_measure(const std::string& path) { return measure_from_json(load_json(path)); }

void save_measure(const Measure& mu, const std::string& path) {
  save_json(measure_to_json(mu), path);
}

WeightSequence load_shift(const std::string& path) { return shift_from_json(load_json(path)); }

void save_shift(const WeightSequence& w, const std::string& path) {
  save_json(shift_to_json(w), path);
}

}  // namespace berger
