#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heisqi/heisqi.hpp"

namespace heisqi::cli {

inline constexpr const char* kToolVersion = "0.1.0";

namespace detail {

inline json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, "expected a comma-separated list of numbers", field);
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorKind::InvalidArgument, "empty list", field);
  return out;
}

inline LieElement parse_point(const std::string& text, int n, const std::string& field) {
  const std::vector<double> v = parse_list(text, field);
  if (static_cast<int>(v.size()) != 2 * n + 1) {
    throw Error(ErrorKind::DimensionError,
                "expected " + std::to_string(2 * n + 1) + " coordinates, found " + std::to_string(v.size()), field);
  }
  return LieElement(n, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

inline SpecFile load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read spec file " + path, path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_spec(buf.str());
  } catch (const Error& e) {
    // Keep the field path but say which file it came from.
    throw Error(e.kind(), path + ": " + e.message(), e.field());
  }
}

inline json structure_json(const GradedStructure& gs) {
  json s;
  s["n"] = gs.n();
  s["k"] = gs.k();
  s["eigenvalues"] = gs.eigenvalues();
  s["dims"] = gs.dims();
  s["adapted_matrix"] = mat_json(gs.adapted_matrix());
  return s;
}

inline json error_json(const Error& e) {
  json j;
  j["kind"] = std::string(to_string(e.kind()));
  j["message"] = e.message();
  if (!e.field().empty()) j["field"] = e.field();
  return json{{"error", j}};
}

inline int exit_code(ErrorKind k) {
  return (k == ErrorKind::NonDiagonalizable || k == ErrorKind::DegeneratePairing) ? 2 : 1;
}

}  // namespace detail

struct Options {
  std::uint64_t seed = 0;
  std::optional<std::int64_t> pairs;
  std::optional<std::int64_t> samples;
  std::optional<std::string> radii;
  double tol = 1e-9;
  double scale = 1.0;
  std::optional<double> flow_time;
  bool timing = false;
  std::vector<std::string> args;
};

namespace detail {

inline void need_args(const Options& o, std::size_t count, const std::string& usage) {
  if (o.args.size() != count) {
    throw Error(ErrorKind::InvalidArgument, "expected arguments: " + usage, "arguments");
  }
}

inline std::vector<double> radii_or(const Options& o, std::vector<double> fallback) {
  return o.radii ? parse_list(*o.radii, "--radii") : fallback;
}

inline std::int64_t positive(std::optional<std::int64_t> v, std::int64_t fallback, const std::string& field) {
  const std::int64_t x = v.value_or(fallback);
  if (x < 1) throw Error(ErrorKind::InvalidArgument, "must be positive", field);
  return x;
}

inline json cmd_validate(const Options& o, json& inputs) {
  need_args(o, 1, "SPEC");
  const SpecFile f = load_spec(o.args[0]);
  inputs["spec"] = spec_to_json(f);
  json r;
  const LeibnizCheck lc = validate_derivation(f.spec, o.tol);
  r["leibniz"] = {{"is_derivation", lc.is_derivation}, {"max_defect", lc.max_defect}};
  const GradedStructure gs = decompose(f.spec, o.tol);
  r["structure"] = structure_json(gs);
  const StructureReport rep = verify_structure(gs, o.tol);
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"defect", c.defect}, {"value", c.value}});
  r["checks"] = checks;
  r["all_passed"] = rep.all_passed();
  return r;
}

inline json cmd_classify(const Options& o, json& inputs) {
  need_args(o, 2, "SPEC_A SPEC_B");
  const SpecFile a = load_spec(o.args[0]), b = load_spec(o.args[1]);
  inputs["spec_a"] = spec_to_json(a);
  inputs["spec_b"] = spec_to_json(b);
  const GradedStructure ga = decompose(a.spec, o.tol), gb = decompose(b.spec, o.tol);
  const Classification c = classify(ga, gb, o.tol);
  json r;
  r["equivalent"] = c.equivalent;
  r["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
  r["reason"] = c.reason;
  const QIInvariants ia = qi_invariants(ga), ib = qi_invariants(gb);
  r["invariants_a"] = {{"k", ia.k}, {"dims", ia.dims}, {"ratios", ia.ratios}};
  r["invariants_b"] = {{"k", ib.k}, {"dims", ib.dims}, {"ratios", ib.ratios}};
  return r;
}

inline json cmd_isometry(const Options& o, json& inputs) {
  need_args(o, 2, "SPEC_A SPEC_B");
  const SpecFile a = load_spec(o.args[0]), b = load_spec(o.args[1]);
  inputs["spec_a"] = spec_to_json(a);
  inputs["spec_b"] = spec_to_json(b);
  const std::int64_t pairs = positive(o.pairs, 10000, "--pairs");
  inputs["pairs"] = pairs;
  const BoundaryMap f = build_isometry(decompose(a.spec, o.tol), decompose(b.spec, o.tol), o.tol);
  const IsometryCheck chk = verify_isometry(f, pairs, o.seed);
  json r;
  r["matrix"] = mat_json(f.matrix);
  r["lambda"] = f.lambda;
  r["source_scale"] = f.source_scale();
  r["max_relative_error"] = chk.max_relative_error;
  r["pairs"] = chk.pairs;
  r["bracket_defect"] = bracket_defect(f);
  r["first_layer_defect"] = first_layer_defect(f);
  r["bilipschitz"] = {{"min", chk.bilipschitz_min}, {"max", chk.bilipschitz_max}, {"bound", chk.bilipschitz_bound}};
  return r;
}

inline json cmd_dist(const Options& o, json& inputs) {
  need_args(o, 3, "SPEC P Q");
  const SpecFile f = load_spec(o.args[0]);
  inputs["spec"] = spec_to_json(f);
  const GradedStructure gs = decompose(f.spec, o.tol);
  const LieElement p = parse_point(o.args[1], gs.n(), "P"), q = parse_point(o.args[2], gs.n(), "Q");
  inputs["p"] = vec_json(p.coords());
  inputs["q"] = vec_json(q.coords());
  const QuasimetricParams qp(gs, o.scale);
  json r;
  r["dist"] = dist_A(qp, p, q);
  r["norm_p"] = norm_A(qp, p);
  r["norm_q"] = norm_A(qp, q);
  r["norm_0"] = norm_0(gs, bch_mul(bch_inv(p), q));
  r["difference"] = vec_json(bch_mul(bch_inv(p), q).coords());
  return r;
}

inline json cmd_chain(const Options& o, json& inputs) {
  need_args(o, 3, "SPEC P Q");
  const SpecFile f = load_spec(o.args[0]);
  inputs["spec"] = spec_to_json(f);
  const GradedStructure gs = decompose(f.spec, o.tol);
  const LieElement p = parse_point(o.args[1], gs.n(), "P"), q = parse_point(o.args[2], gs.n(), "Q");
  inputs["p"] = vec_json(p.coords());
  inputs["q"] = vec_json(q.coords());
  NetConfig net;
  net.sample_count = static_cast<int>(positive(o.samples, 1000, "--samples"));
  net.seed = o.seed;
  inputs["samples"] = net.sample_count;
  const QuasimetricParams qp(gs, o.scale);
  const double chain = chain_dist(qp, p, q, net);
  const double direct = dist_A(qp, p, q);
  json r;
  r["chain_dist"] = chain;
  r["dist"] = direct;
  r["ratio"] = direct > 0.0 ? json(chain / direct) : json(nullptr);
  r["neighbors"] = net.effective_neighbors();
  return r;
}

inline json cmd_regularity(const Options& o, json& inputs) {
  need_args(o, 1, "SPEC");
  const SpecFile f = load_spec(o.args[0]);
  inputs["spec"] = spec_to_json(f);
  const GradedStructure gs = decompose(f.spec, o.tol);
  const std::vector<double> radii = radii_or(o, {0.25, 0.5, 1.0, 2.0, 4.0});
  const std::int64_t samples = positive(o.samples, 1000000, "--samples");
  inputs["radii"] = radii;
  inputs["samples"] = samples;
  const RegularityReport rep = regularity_estimate(QuasimetricParams(gs, o.scale), radii, samples, o.seed);
  json r;
  r["radii"] = rep.radii;
  r["volume_estimates"] = rep.volume_estimates;
  r["normalized_volumes"] = rep.normalized_volumes;
  r["fitted_exponent"] = rep.fitted_exponent;
  r["target_exponent"] = rep.target_exponent;
  r["relative_error"] = rep.relative_error;
  return r;
}

inline json cmd_cosets(const Options& o, json& inputs) {
  need_args(o, 3, "SPEC G1 G2");
  const SpecFile f = load_spec(o.args[0]);
  inputs["spec"] = spec_to_json(f);
  const GradedStructure gs = decompose(f.spec, o.tol);
  require_two_step(gs);
  const LieElement g1 = parse_point(o.args[1], gs.n(), "G1"), g2 = parse_point(o.args[2], gs.n(), "G2");
  const std::vector<double> radii = radii_or(o, {1.0, 2.0, 4.0, 8.0, 16.0});
  inputs["g1"] = vec_json(g1.coords());
  inputs["g2"] = vec_json(g2.coords());
  inputs["radii"] = radii;
  const QuasimetricParams qp(gs, o.scale);
  const CosetSpec l1{Subgroup::U1, g1}, l2{Subgroup::U1, g2};
  json r;
  r["basepoint_dist"] = dist_A(qp, g1, g2);
  r["point_to_coset_dist"] = point_to_coset_dist(qp, g1, l2);
  const bool in_k = in_subgroup(gs, Subgroup::K, g1) && in_subgroup(gs, Subgroup::K, g2);
  r["u1_coset_dist"] = in_k ? json(coset_dist_U1(qp, g1, g2)) : json(nullptr);
  const int top = gs.k() - 1;
  r["h_coset_dist"] = coset_dist_H(qp, gs.block_component(g1, top), gs.block_component(g2, top)).distance;
  const HausdorffProfile prof = hausdorff_profile(qp, l1, l2, radii);
  r["hausdorff"] = {{"radii", prof.radii},
                    {"sup_inf_distances", prof.sup_inf_distances},
                    {"tail_slope", prof.tail_slope},
                    {"algebraic_finite", prof.algebraic_finite},
                    {"numeric_finite", prof.numeric_finite},
                    {"verdicts_agree", prof.verdicts_agree()}};
  return r;
}

inline json distortion_json(const DistortionReport& rep) {
  json probes = json::array();
  for (const auto& p : rep.probes)
    probes.push_back({{"radius", p.radius},
                      {"upper", p.upper},
                      {"lower", p.lower},
                      {"upper_count", p.upper_count},
                      {"lower_count", p.lower_count}});
  json r;
  r["probes"] = probes;
  r["upper_limit"] = rep.upper_limit;
  r["lower_limit"] = rep.lower_limit;
  r["quasisimilarity"] = {{"K", rep.quasisimilarity_K}, {"C", rep.quasisimilarity_C}};
  r["reciprocal_product"] = rep.reciprocal_product ? json(*rep.reciprocal_product) : json(nullptr);
  r["samples_per_radius"] = rep.samples_per_radius;
  return r;
}

// With one spec the map is the flow e^{tA} (t from --flow, default ln 2);
// with two it is the boundary isometry from A to B.
inline json cmd_distort(const Options& o, json& inputs) {
  if (o.args.size() != 1 && o.args.size() != 2) {
    throw Error(ErrorKind::InvalidArgument, "expected arguments: SPEC_A [SPEC_B]", "arguments");
  }
  const std::vector<double> radii =
      radii_or(o, {1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0});
  const std::int64_t samples = positive(o.samples, 1000, "--samples");
  const std::int64_t pairs = positive(o.pairs, 10000, "--pairs");
  inputs["radii"] = radii;
  inputs["samples"] = samples;
  inputs["pairs"] = pairs;
  const SpecFile a = load_spec(o.args[0]);
  inputs["spec_a"] = spec_to_json(a);
  const GradedStructure ga = decompose(a.spec, o.tol);
  const LieElement origin(ga.n());
  json r;
  if (o.args.size() == 1) {
    const double t = o.flow_time.value_or(std::log(2.0));
    inputs["flow_time"] = t;
    const QuasimetricParams qp(ga, o.scale);
    const PointMap fwd = [&](const LieElement& x) { return flow(ga, t, x); };
    const PointMap back = [&](const LieElement& x) { return flow(ga, -t, x); };
    r["map"] = "flow";
    r["distortion"] = distortion_json(distortion_probe(fwd, qp, qp, origin, radii, samples, o.seed, &back));
    const AlmostSimilarityFit fit = almost_similarity_fit(fwd, qp, qp, pairs, o.seed);
    r["almost_similarity"] = {{"L", fit.L}, {"C", fit.C}, {"residual", fit.residual}, {"pairs", fit.pairs}};
    return r;
  }
  const SpecFile b = load_spec(o.args[1]);
  inputs["spec_b"] = spec_to_json(b);
  const BoundaryMap f = build_isometry(ga, decompose(b.spec, o.tol), o.tol);
  const BoundaryMap finv = invert(f);
  const QuasimetricParams src(f.source, f.source_scale()), dst(f.target, 1.0);
  const PointMap fwd = [&](const LieElement& x) { return apply_map(f, x); };
  const PointMap back = [&](const LieElement& x) { return apply_map(finv, x); };
  r["map"] = "boundary_isometry";
  r["lambda"] = f.lambda;
  r["distortion"] = distortion_json(distortion_probe(fwd, src, dst, origin, radii, samples, o.seed, &back));
  const AlmostSimilarityFit fit = almost_similarity_fit(fwd, src, dst, pairs, o.seed);
  r["almost_similarity"] = {{"L", fit.L}, {"C", fit.C}, {"residual", fit.residual}, {"pairs", fit.pairs}};
  return r;
}

}  // namespace detail

/// Runs one CLI invocation. args excludes the program name. Writes the JSON
/// report to out and JSON errors (or usage text) to err; returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Diagonalizable derivations on Heisenberg algebras: structure, visual quasimetrics, "
               "quasiisometry classification",
               "heisqi"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "random seed")->capture_default_str();
  app.add_option("--pairs", o.pairs, "sampled pairs");
  app.add_option("--samples", o.samples, "Monte-Carlo or net samples");
  app.add_option("--radii", o.radii, "comma-separated radii");
  app.add_option("--tol", o.tol, "numerical tolerance")->capture_default_str();
  app.add_option("--scale", o.scale, "exponent scale s of the quasimetric")->capture_default_str();
  app.add_option("--flow", o.flow_time, "flow time for distort with one spec");
  app.add_flag("--timing", o.timing, "add wall_time_ms to the report (breaks byte-identity)");

  struct Cmd {
    const char* name;
    const char* help;
    json (*fn)(const Options&, json&);
  };
  const std::vector<Cmd> cmds = {
      {"validate", "check a derivation and report its graded structure", detail::cmd_validate},
      {"classify", "decide quasiisometric equivalence of two structures", detail::cmd_classify},
      {"isometry", "build and verify the boundary isometry", detail::cmd_isometry},
      {"dist", "visual quasimetric between two points", detail::cmd_dist},
      {"chain", "chain metric on a sampled net", detail::cmd_chain},
      {"regularity", "Monte-Carlo Ahlfors regularity estimate", detail::cmd_regularity},
      {"cosets", "coset distances and Hausdorff profile of two U_1-cosets", detail::cmd_cosets},
      {"distort", "distortion of the flow or of the boundary isometry", detail::cmd_distort},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : cmds) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    s->add_option("args", o.args, "spec files and comma-separated points");
    s->fallthrough();
    subs.push_back(s);
  }

  // First bare word must name a subcommand; values of global options are skipped.
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (!a.empty() && a[0] == '-') {
      if (a != "--timing" && a != "--help" && a != "-h" && a.find('=') == std::string::npos) ++i;
      continue;
    }
    const bool known = std::any_of(cmds.begin(), cmds.end(), [&](const Cmd& c) { return a == c.name; });
    if (!known) {
      err << "unknown subcommand: " << a << "\n" << app.help();
      return 1;
    }
    break;
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 1;
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  json inputs;
  inputs["seed"] = o.seed;
  inputs["tol"] = o.tol;
  inputs["scale"] = o.scale;
  inputs["args"] = o.args;
  try {
    const auto start = std::chrono::steady_clock::now();
    json report;
    report["results"] = cmds[which].fn(o, inputs);
    report["command"] = cmds[which].name;
    report["inputs"] = inputs;
    report["seed"] = o.seed;
    report["tool_version"] = kToolVersion;
    if (o.timing) {
      report["wall_time_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    out << report.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    err << detail::error_json(e).dump(2) << "\n";
    return detail::exit_code(e.kind());
  } catch (const std::exception& e) {
    err << json{{"error", {{"kind", "Internal"}, {"message", e.what()}}}}.dump(2) << "\n";
    return 2;
  }
}

}  // namespace heisqi::cli
