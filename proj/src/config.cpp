#include "ambit/config.hpp"

#include <cmath>

namespace ambit::io {

namespace {

using measure::JumpDensity;
using measure::JumpMeasureSpec;
using measure::SpaceCell;
using measure::SpaceControl;
using measure::TimeControl;
using measure::TimeSpaceFn;

TimeSpaceFn named_field(const std::string& name, const TomlValue& node) {
  if (name == "constant") {
    const double v = node.number("value");
    return measure::constant_field(v);
  }
  if (name == "zero") return measure::constant_field(0.0);
  if (name == "one") return measure::constant_field(1.0);
  if (name == "inv_one_plus_t") {
    return measure::time_field([](double t) { return 1.0 / (1.0 + t); });
  }
  if (name == "power_one_plus_t") {
    const double p = node.number("exponent");
    return measure::time_field([p](double t) { return std::pow(1.0 + t, p); });
  }
  if (name == "exp_decay") {
    const double rate = node.number_or("rate", 1.0);
    return measure::time_field([rate](double t) { return std::exp(-rate * t); });
  }
  if (name == "t_times_sin2x") {
    return [](double t, std::span<const double> x) {
      const double xx = x.empty() ? 0.0 : x[0];
      return (xx >= 0.0 && xx <= 2.0 * M_PI) ? t * std::sin(2.0 * xx) : 0.0;
    };
  }
  if (name == "sin2x") {
    return [](double, std::span<const double> x) {
      const double xx = x.empty() ? 0.0 : x[0];
      return (xx >= 0.0 && xx <= 2.0 * M_PI) ? std::sin(2.0 * xx) : 0.0;
    };
  }
  if (name == "abs_sin2x") {
    return [](double, std::span<const double> x) {
      const double xx = x.empty() ? 0.0 : x[0];
      return (xx >= 0.0 && xx <= 2.0 * M_PI) ? std::abs(std::sin(2.0 * xx)) : 0.0;
    };
  }
  if (name == "indicator") {
    const double t0 = node.number_or("t0", 0.0);
    const double t1 = node.number_or("t1",
                                     std::numeric_limits<double>::infinity());
    const double x0 = node.number_or("x0",
                                     -std::numeric_limits<double>::infinity());
    const double x1 = node.number_or("x1",
                                     std::numeric_limits<double>::infinity());
    return [t0, t1, x0, x1](double t, std::span<const double> x) {
      const double xx = x.empty() ? 0.0 : x[0];
      return (t >= t0 && t <= t1 && xx >= x0 && xx <= x1) ? 1.0 : 0.0;
    };
  }
  throw ConfigError("unknown field function '" + name + "'");
}

}  // namespace

TimeSpaceFn field_from(const TomlValue& node, const std::string& key) {
  if (node.has(key) && node.at(key).kind == TomlValue::Kind::Number) {
    return measure::constant_field(node.number(key));
  }
  if (node.has("function")) {
    return named_field(node.string("function"), node);
  }
  throw ConfigError("expected '" + key + " = <number>' or 'function = \"...\"'");
}

std::function<double(double)> covariance_from(const TomlValue& node) {
  const std::string name = node.string_or("f", "one_plus_cos_half");
  if (name == "one_plus_cos_half") {
    return [](double z) { return 0.5 * (1.0 + std::cos(z)); };
  }
  if (name == "constant") {
    const double v = node.number_or("value", 1.0);
    return [v](double) { return v; };
  }
  if (name == "gaussian") {
    const double s = node.number_or("scale", 1.0);
    return [s](double z) { return std::exp(-z * z / (2.0 * s * s)); };
  }
  if (name == "fractional") {
    const double h = node.number("hurst");
    if (!(h > 0.5 && h < 1.0)) {
      throw ConfigError("fractional covariance needs hurst in (1/2, 1)");
    }
    return [h](double z) {
      return std::pow(std::abs(z), 2.0 * h - 2.0);
    };
  }
  throw ConfigError("unknown covariance kernel '" + name + "'");
}

namespace {

JumpMeasureSpec jumps_from(const TomlValue& doc) {
  JumpMeasureSpec spec;
  if (!doc.has("jumps")) return spec;
  const auto& jumps = doc.at("jumps");
  if (jumps.has("atom")) {
    const auto& atoms = jumps.at("atom");
    if (atoms.kind != TomlValue::Kind::TableArray) {
      throw ConfigError("[[jumps.atom]] must be an array of tables");
    }
    for (const auto& a : atoms.array) {
      spec.atoms.push_back({a.number("size"), a.number("mass")});
    }
  }
  if (jumps.has("density")) {
    const std::string name = jumps.string("density");
    JumpDensity den;
    if (name == "stable_alpha") {
      const double alpha = jumps.number("alpha");
      const double scale = jumps.number_or("scale", 1.0);
      const double cut = jumps.number_or("cutoff", 1.0);
      den.rho = [alpha, scale](double y) {
        return scale * std::pow(std::abs(y), -1.0 - alpha);
      };
      den.support_lo = -cut;
      den.support_hi = cut;
      den.alpha0 = alpha;
      den.alpha_inf = std::numeric_limits<double>::infinity();  // hard cutoff
    } else if (name == "exponential_tilt") {
      const double alpha = jumps.number("alpha");
      const double lambda = jumps.number_or("lambda", 1.0);
      const double scale = jumps.number_or("scale", 1.0);
      den.rho = [alpha, lambda, scale](double y) {
        return scale * std::exp(-lambda * std::abs(y)) *
               std::pow(std::abs(y), -1.0 - alpha);
      };
      den.support_lo = -std::numeric_limits<double>::infinity();
      den.support_hi = std::numeric_limits<double>::infinity();
      den.alpha0 = alpha;
      den.alpha_inf = lambda;
    } else {
      throw ConfigError("unknown jump density '" + name + "'");
    }
    spec.density = std::move(den);
  }
  return spec;
}

TimeControl time_from(const TomlValue& control) {
  if (!control.has("time")) return TimeControl::lebesgue(0.0, 1.0);
  const auto& t = control.at("time");
  const std::string kind = t.string_or("kind", "lebesgue");
  const double t0 = t.number_or("t0", 0.0);
  const double t1 = t.number_or("t1", std::numeric_limits<double>::infinity());
  if (kind == "lebesgue") return TimeControl::lebesgue(t0, t1);
  if (kind == "density") {
    const auto f = field_from(t, "value");
    return TimeControl::with_density(
        t0, t1, [f](double tt) { return f(tt, {}); });
  }
  throw ConfigError("unknown time control kind '" + kind + "'");
}

SpaceControl space_from(const TomlValue& control) {
  if (!control.has("space")) return SpaceControl::single_point();
  const auto& s = control.at("space");
  const std::string kind = s.string_or("kind", "point");
  if (kind == "point") return SpaceControl::single_point();
  if (kind == "grid" || kind == "probability") {
    const auto weights = s.numbers("weights");
    std::vector<double> centers;
    if (s.has("centers")) centers = s.numbers("centers");
    std::vector<SpaceCell> cells;
    for (size_t i = 0; i < weights.size(); ++i) {
      const double c = i < centers.size() ? centers[i] : static_cast<double>(i);
      cells.push_back({static_cast<int>(i), {c}, weights[i]});
    }
    if (kind == "probability") {
      double total = 0.0;
      for (double w : weights) total += w;
      if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("probability space weights must sum to 1");
      }
      SpaceControl sc = SpaceControl::finite_grid(std::move(cells));
      sc.kind = SpaceControl::Kind::Probability;
      return sc;
    }
    return SpaceControl::finite_grid(std::move(cells));
  }
  if (kind == "box") {
    const double lo = s.number_or("lo", 0.0);
    const double hi = s.number_or("hi", 1.0);
    return SpaceControl::lebesgue_box({{lo, hi}});
  }
  throw ConfigError("unknown space control kind '" + kind + "'");
}

}  // namespace

measure::TruncationFunction parse_tau(const std::string& text) {
  if (text == "zero") return measure::TruncationFunction::zero();
  const std::string prefix = "standard";
  if (text.rfind(prefix, 0) == 0) {
    double bound = 1.0;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
      bound = std::strtod(text.c_str() + colon + 1, nullptr);
    }
    if (!(bound > 0.0)) throw ConfigError("truncation bound must be positive");
    return measure::TruncationFunction::standard(bound);
  }
  throw ConfigError("unknown truncation '" + text + "' (use zero or standard:B)");
}

measure::CharacteristicTriplet triplet_from_toml(const TomlValue& doc) {
  measure::CharacteristicTriplet t;
  t.drift = doc.has("drift") ? field_from(doc.at("drift"), "b")
                             : measure::constant_field(0.0);

  if (doc.has("gaussian")) {
    const auto& g = doc.at("gaussian");
    const std::string kind = g.string_or("kind", "orthogonal");
    if (kind == "orthogonal") {
      t.gaussian = measure::GaussianPart::orthogonal(field_from(g, "c"));
    } else if (kind == "colored") {
      t.gaussian = measure::GaussianPart::colored(covariance_from(g));
      t.flags.orthogonal = false;
    } else {
      throw ConfigError("unknown gaussian kind '" + kind + "'");
    }
  } else {
    t.gaussian = measure::GaussianPart::none();
  }

  const JumpMeasureSpec jumps = jumps_from(doc);
  t.jumps = [jumps](double, std::span<const double>) { return jumps; };

  if (doc.has("control")) {
    t.control.time = time_from(doc.at("control"));
    t.control.space = space_from(doc.at("control"));
  }

  if (doc.has("truncation")) {
    const auto& tr = doc.at("truncation");
    const std::string kind = tr.string_or("kind", "standard");
    if (kind == "zero") {
      t.tau = measure::TruncationFunction::zero();
    } else if (kind == "standard") {
      t.tau = measure::TruncationFunction::standard(tr.number_or("bound", 1.0));
    } else {
      throw ConfigError("unknown truncation kind '" + kind + "'");
    }
  }

  if (doc.has("flags")) {
    const auto& f = doc.at("flags");
    t.flags.orthogonal = f.boolean_or("orthogonal", t.flags.orthogonal);
    t.flags.different_discontinuity_times =
        f.boolean_or("different_discontinuity_times", true);
    t.flags.no_fixed_discontinuities =
        f.boolean_or("no_fixed_discontinuities", true);
    const std::string sign = f.string_or("sign", "none");
    if (sign == "positive") {
      t.flags.sign = 1;
    } else if (sign == "negative") {
      t.flags.sign = -1;
    } else if (sign != "none") {
      throw ConfigError("flags.sign must be none, positive or negative");
    }
  }
  return t;
}

measure::CharacteristicTriplet load_triplet(const std::string& path) {
  return triplet_from_toml(parse_toml_file(path));
}

integrability::IntegrandSpec integrand_from_toml(const TomlValue& doc) {
  if (!doc.has("integrand")) {
    throw ConfigError("integrand file needs an [integrand] section");
  }
  const auto& node = doc.at("integrand");
  integrability::IntegrandSpec spec;
  spec.H = field_from(node, "value");
  if (node.has("singularities")) {
    spec.time_singularities = node.numbers("singularities");
  }
  return spec;
}

integrability::IntegrandSpec load_integrand(const std::string& path) {
  return integrand_from_toml(parse_toml_file(path));
}

}  // namespace ambit::io
