// pencurv: classify symmetric pencils and run the curvature experiments.

#include "pencurv/classify.hpp"
#include "pencurv/errors.hpp"
#include "pencurv/factorize.hpp"
#include "pencurv/io.hpp"
#include "pencurv/oplab.hpp"
#include "pencurv/ranges.hpp"
#include "pencurv/sublevel.hpp"
#include "pencurv/witness.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pencurv;

namespace {

constexpr int kSchemaVersion = 1;

struct Section {
  json data = json::object();
  std::ostringstream text;
};

struct Options {
  std::string mode = "exact";
  std::string ladder;
  std::string multiplicities;
  std::int64_t samples = 1'000'000;
  std::int64_t budget = 1'000'000;
  std::uint64_t seed = kDefaultSeed;
  std::string family = "auto";
  std::string p = "3/2", q = "3", r;
  std::string delta = "1/16";
  std::string kakeya_r;
  std::string pq;
  bool full = false;
  bool as_json = false;
  std::string out;
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x + 0.0;
  return os.str();
}

json matrix_json(const MatQ& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json matrix_json(const MatD& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

std::string scalar_text(const Rational& x) { return to_string(x); }
std::string scalar_text(double x) { return num(x); }
json scalar_json(const Rational& x) { return to_string(x); }
json scalar_json(double x) { return x; }

template <class T> json form_json(const BinaryForm<T>& f) {
  json c = json::array();
  for (const auto& x : f.coeffs) c.push_back(scalar_json(x));
  return c;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json roots_json(const RootMultiset& rs) {
  json out = json::array();
  for (const auto& r : rs.roots)
    out.push_back({{"a", complex_json(r.a)}, {"b", complex_json(r.b)}, {"multiplicity", r.multiplicity},
                   {"real", r.is_real}});
  return out;
}

std::string complex_text(Complex z) {
  z += Complex(0.0, 0.0);  // drop negative zeros
  if (z.imag() == 0) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? "-" : "+") + num(std::abs(z.imag())) + "i";
}

template <class T> json verdict_json(const Verdict<T>& v) {
  json j;
  j["kind"] = to_string(kind_of(v));
  std::visit(
      [&](const auto& x) {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, WellCurved>) {
          j["m_star"] = x.m_star;
          j["critical"] = x.critical;
        } else if constexpr (std::is_same_v<X, FlatNonvanishing<T>>) {
          j["m_star"] = x.m_star;
          j["base_point"] = {scalar_json(x.base_point[0]), scalar_json(x.base_point[1])};
          j["lambda_star"] = scalar_json(x.lambda_star);
          j["blocks_resolved"] = x.blocks_resolved;
          if (x.blocks_resolved) {
            j["n0"] = x.n0;
            j["block_sizes"] = x.block_sizes;
          }
          j["root"] = {{"a", complex_json(x.root.a)}, {"b", complex_json(x.root.b)}};
        } else if constexpr (std::is_same_v<X, DegenerateKernelSplit<T>>) {
          j["k"] = x.k;
          j["l_h"] = x.l_h;
          j["epsilon"] = to_string(x.epsilon);
          j["V"] = matrix_json(x.V);
          j["H"] = matrix_json(x.H);
        } else {
          j["kernel"] = matrix_json(x.kernel);
          j["W"] = matrix_json(x.W);
        }
      },
      v);
  return j;
}

std::vector<double> parse_ladder(const std::string& text, std::vector<double> fallback) {
  if (text.empty()) return fallback;
  auto power = [](std::string tok) {
    tok.erase(std::remove(tok.begin(), tok.end(), ' '), tok.end());
    if (tok.rfind("2^", 0) == 0) return std::ldexp(1.0, std::stoi(tok.substr(2)));
    return to_double(parse_rational(tok));
  };
  std::vector<double> out;
  if (auto dots = text.find(".."); dots != std::string::npos && text.rfind("2^", 0) == 0) {
    int a = std::stoi(text.substr(2, dots - 2));
    std::string rest = text.substr(dots + 2);
    if (rest.rfind("2^", 0) == 0) rest = rest.substr(2);
    int b = std::stoi(rest);
    for (int k = a; a >= b ? k >= b : k <= b; k += a >= b ? -1 : 1) out.push_back(std::ldexp(1.0, k));
  } else {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(power(tok));
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw ParseError("not an integer: '" + tok + "'");
    }
  }
  return out;
}

double exponent_value(const std::string& p) {
  if (p == "inf" || p == "infinity") return std::numeric_limits<double>::infinity();
  return to_double(parse_rational(p));
}

std::vector<int> multiplicities_of(const RootMultiset& rs) {
  std::vector<int> m;
  for (const auto& r : rs.roots) m.push_back(r.multiplicity);
  return m;
}

// ---- sections --------------------------------------------------------------

template <class T> Verdict<T> classify_and_report(const SymmetricPencil<T>& p, Section& s, const char* mode) {
  BinaryForm<T> f = det_pencil(p);
  s.data["mode"] = mode;
  s.data["det_coefficients"] = form_json(f);
  s.text << "mode: " << mode << "\n";
  s.text << "det(sA + tB) coefficients (s^k t^(d-k), k = 0..d):";
  for (const auto& c : f.coeffs) s.text << " " << scalar_text(c);
  s.text << "\n";
  if (!f.is_zero()) {
    RootMultiset rs = roots_of(f, ClassifyOptions{});
    s.data["roots"] = roots_json(rs);
    s.text << "roots [a:b] with multiplicity:\n";
    for (const auto& r : rs.roots)
      s.text << "  [" << complex_text(r.a) << " : " << complex_text(r.b) << "]  x" << r.multiplicity
             << (r.is_real ? "  real" : "") << "\n";
  }
  Verdict<T> v = classify(p);
  s.data["verdict"] = verdict_json(v);
  s.text << "verdict: " << describe(v) << "\n";
  return v;
}

json classify_section(const PencilFile& file, const Options& o, std::ostream& text) {
  Section s;
  if (o.mode == "float") classify_and_report(file.float_pencil(), s, "float");
  else if (o.mode == "exact") classify_and_report(file.exact_pencil(), s, "exact");
  else throw ParseError("--mode must be exact or float");
  text << s.text.str();
  return s.data;
}

json witness_section(const PencilFile& file, const Options& o, std::ostream& text) {
  json j;
  PencilQ p = file.exact_pencil();
  Verdict<Rational> v = classify(p);
  if (std::holds_alternative<WellCurved>(v)) {
    j["exists"] = false;
    j["reason"] = "well-curved pencils are semistable";
    text << "witness: none (well-curved pencils are semistable)\n";
    return j;
  }
  DestabilizingCurve c = destabilizing_curve(p, v);
  DecayReport rep = verify_decay(c, p, parse_ladder(o.ladder, default_decay_ladder()));
  j["exists"] = true;
  j["kind"] = to_string(c.kind);
  j["m_exponents"] = c.m_exponents;
  j["n_exponents"] = c.n_exponents;
  j["lambdas"] = rep.lambdas;
  j["norms"] = rep.norms;
  j["slope"] = rep.slope;
  j["max_residual"] = rep.max_residual;
  j["structural_residual"] = rep.structural_residual;
  j["predicted_rate"] = rep.predicted_rate;
  text << "witness: " << to_string(c.kind) << " curve, M exponents [";
  for (size_t i = 0; i < c.m_exponents.size(); ++i) text << (i ? "," : "") << c.m_exponents[i];
  text << "], N exponents [" << c.n_exponents[0] << "," << c.n_exponents[1] << "]\n";
  text << "  lambda      |g(lambda).(A,B)|\n";
  for (size_t i = 0; i < rep.lambdas.size(); ++i) text << "  " << num(rep.lambdas[i]) << "  " << num(rep.norms[i]) << "\n";
  text << "  fitted slope " << num(rep.slope) << ", residual " << num(rep.max_residual) << ", smallest exponent "
       << rep.predicted_rate << "\n";
  return j;
}

json factorization_json(const std::vector<int>& m, std::ostream& text) {
  json j;
  int d = 0;
  for (int x : m) d += x;
  j["multiplicities"] = m;
  PairResult r = pair_factorization(m, d);
  if (const auto* f = std::get_if<PairFactorization>(&r)) {
    json pairs = json::array();
    text << "pair factorization:";
    for (const auto& [jk, mu] : f->mu) {
      pairs.push_back({{"j", jk.first + 1}, {"k", jk.second + 1}, {"mu", to_string(mu)}});
      text << " mu(" << jk.first + 1 << "," << jk.second + 1 << ")=" << to_string(mu);
    }
    text << "\n";
    j["feasible"] = true;
    j["pairs"] = pairs;
  } else {
    const auto& cert = std::get<FarkasCertificate>(r);
    json y = json::array();
    text << "infeasible; certificate y = (";
    for (size_t i = 0; i < cert.y.size(); ++i) {
      y.push_back(to_string(cert.y[i]));
      text << (i ? ", " : "") << to_string(cert.y[i]);
    }
    text << ")\n";
    j["feasible"] = false;
    j["certificate"] = y;
    const auto top = std::max_element(m.begin(), m.end());
    std::vector<int> others(m.begin(), top);
    others.insert(others.end(), top + 1, m.end());
    if (!others.empty()) {
      std::vector<Rational> mu = flat_factorization(*top, others);
      json e = json::array();
      text << "exponents against the dominant root:";
      for (const auto& x : mu) {
        e.push_back(to_string(x));
        text << " " << to_string(x);
      }
      text << "\n";
      j["flat_exponents"] = e;
    }
  }
  return j;
}

json sublevel_section(const PencilFile& file, const Options& o, std::int64_t samples, std::ostream& text) {
  BinaryForm<double> f = to_double(det_pencil(file.exact_pencil()));
  json j;
  if (f.is_zero()) {
    j["skipped"] = "determinant vanishes identically";
    text << "sublevel: skipped (determinant vanishes identically)\n";
    return j;
  }
  std::vector<double> ladder = parse_ladder(o.ladder, default_sublevel_ladder());
  ExponentFit fit = fit_exponent(f, ladder, MonteCarloMethod{samples, o.seed}, true);
  j["ladder"] = fit.ladder;
  j["measures"] = fit.measures;
  j["std_errors"] = fit.std_errors;
  j["exponent"] = fit.exponent;
  j["log_corrected_exponent"] = fit.log_corrected_exponent;
  j["samples"] = samples;
  j["seed"] = o.seed;
  text << "sublevel measures |{|det| < delta}| (" << samples << " samples, seed " << o.seed << "):\n";
  for (size_t i = 0; i < ladder.size(); ++i)
    text << "  " << num(ladder[i]) << "  " << num(fit.measures[i]) << " +- " << num(fit.std_errors[i]) << "\n";
  text << "  exponent " << num(fit.exponent) << ", log-corrected " << num(fit.log_corrected_exponent) << "\n";
  return j;
}

FamilyBuilder family_builder(const PencilQ& p, const std::string& name) {
  Verdict<Rational> v = classify(p);
  const PencilD pd = to_double(p);
  if (name == "auto") return [p, v](double delta) { return family_for(p, v, delta); };
  if (name == "ball") return [pd](double delta) { return family_ball(pd, delta); };
  if (name == "slab") return [pd](double delta) { return family_intro_slab(pd, delta); };
  if (name == "flat") {
    const auto* fe = std::get_if<FlatNonvanishing<Rational>>(&v);
    if (!fe) throw FamilyMismatch("flat-box family needs a flat pencil with nonvanishing determinant");
    return [p, fe = *fe](double delta) { return family_flat_boxes(p, fe, delta); };
  }
  if (name == "degenerate") {
    const auto* ks = std::get_if<DegenerateKernelSplit<Rational>>(&v);
    if (!ks) throw FamilyMismatch("degenerate family needs a kernel-split pencil");
    return [p, ks = *ks](double delta) { return family_degenerate(p, ks, delta); };
  }
  if (name == "common-kernel") {
    const auto* ck = std::get_if<DegenerateCommonKernel<Rational>>(&v);
    if (!ck) throw FamilyMismatch("common-kernel family needs a pencil with a common kernel");
    return [p, ck = *ck](double delta) { return family_common_kernel(p, ck, delta); };
  }
  throw ParseError("unknown family '" + name + "'");
}

json scaling_section(const PencilFile& file, const Options& o, std::int64_t budget, std::ostream& text) {
  PencilQ p = file.exact_pencil();
  const double pe = exponent_value(o.p), qe = exponent_value(o.q);
  std::optional<double> re;
  if (!o.r.empty()) re = exponent_value(o.r);
  std::vector<double> ladder = parse_ladder(o.ladder, default_scaling_ladder());
  ScalingResult res = scaling_experiment(family_builder(p, o.family), pe, qe, ladder, {budget, o.seed}, re);
  json pts = json::array();
  text << "scaling experiment, family " << res.family << ", p = " << o.p << ", q = " << o.q
       << (o.r.empty() ? "" : ", r = " + o.r) << " (budget " << budget << ", seed " << o.seed << "):\n";
  text << "  delta  pairing  |test|  |dual_x|  |dual_xi|  ratio\n";
  for (const auto& pt : res.points) {
    pts.push_back({{"delta", pt.delta}, {"pairing", pt.pairing.value}, {"pairing_se", pt.pairing.std_error},
                   {"test", pt.test_measure}, {"dual_x", pt.dual_x_measure}, {"dual_xi", pt.dual_xi_measure},
                   {"ratio", pt.ratio}});
    text << "  " << num(pt.delta) << "  " << num(pt.pairing.value) << "  " << num(pt.test_measure) << "  "
         << num(pt.dual_x_measure) << "  " << num(pt.dual_xi_measure) << "  " << num(pt.ratio) << "\n";
  }
  const double boundary = failure_boundary(res, qe, re);
  text << "  slope " << num(res.slope) << (res.slope < -0.05 ? " (estimate fails along this family)" : "")
       << "; slope vanishes at 1/p = " << num(boundary) << "\n";
  json j = {{"family", res.family}, {"p", o.p}, {"q", o.q}, {"points", pts}, {"slope", res.slope},
            {"residual", res.residual}, {"failure_boundary_inv_p", boundary}, {"budget", budget},
            {"seed", o.seed}, {"constants", res.constants}};
  if (!o.r.empty()) j["r"] = o.r;
  return j;
}

json kakeya_section(const PencilFile& file, const Options& o, std::int64_t budget, std::ostream& text) {
  PencilD p = file.float_pencil();
  const double delta = to_double(parse_rational(o.delta));
  const double r = o.kakeya_r.empty() ? (p.dim() + 4.0) / p.dim() : exponent_value(o.kakeya_r);
  KakeyaResult k = kakeya_slab_norm(p, delta, r, random_placement(), {budget, o.seed});
  text << "kakeya: " << k.slabs << " slabs, delta " << num(delta) << ", L^" << num(r) << " norm " << num(k.norm)
       << " +- " << num(k.norm_std_error) << ", union measure " << num(k.union_measure) << " (budget " << budget
       << ", seed " << o.seed << ")\n";
  return {{"delta", delta}, {"r", r}, {"slabs", k.slabs}, {"norm", k.norm}, {"norm_se", k.norm_std_error},
          {"union_measure", k.union_measure}, {"union_se", k.union_std_error}, {"budget", budget},
          {"seed", o.seed}, {"placement", "random"}};
}

json ranges_section(const PencilFile& file, const Options& o, std::ostream& text) {
  PencilQ p = file.exact_pencil();
  ExponentRange range = range_of(classify(p), p.dim());
  std::string list = o.pq;
  if (list.empty()) {
    const int d = p.dim();
    list = std::to_string(d + 4) + "/4," + std::to_string(d + 4) + "/2;2,4;3/2,3;1,1;inf,1";
  }
  json out = json::array();
  text << "exponent ranges:\n";
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ';')) {
    std::vector<std::string> parts;
    std::stringstream is(item);
    std::string tok;
    while (std::getline(is, tok, ',')) parts.push_back(tok);
    if (parts.size() < 2 || parts.size() > 3) throw ParseError("exponent triple must be p,q or p,q,r: '" + item + "'");
    std::optional<Rational> z;
    if (parts.size() == 3) z = reciprocal_of(parts[2]);
    Truth t = predicted_true_region(range, reciprocal_of(parts[0]), reciprocal_of(parts[1]), z);
    out.push_back({{"p", parts[0]}, {"q", parts[1]}, {"r", parts.size() == 3 ? parts[2] : parts[1]},
                   {"answer", to_string(t)}});
    text << "  (p, q" << (z ? ", r" : "") << ") = (" << item << "): " << to_string(t) << "\n";
  }
  return out;
}

json input_echo(const fs::path& path, const PencilFile& f) {
  json j = json::parse(render_pencil_file(f));
  j["path"] = path.string();
  return j;
}

// ---- commands --------------------------------------------------------------

using Command = std::function<json(const PencilFile&, std::ostream&)>;

json run_file(const fs::path& path, const Command& cmd, std::ostream& text) {
  PencilFile f = read_pencil_file(path);
  text << "== " << path.string() << (f.label ? " (" + *f.label + ")" : "") << ", d = " << f.d << "\n";
  json j;
  j["input"] = input_echo(path, f);
  j["result"] = cmd(f, text);
  return j;
}

json run_path(const std::string& target, const Command& cmd, std::ostream& text) {
  fs::path path(target);
  if (!fs::is_directory(path)) return run_file(path, cmd, text);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(path))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  json runs = json::array();
  for (const auto& f : files) runs.push_back(run_file(f, cmd, text));
  return {{"runs", runs}};
}

int emit(const std::string& command, json body, const std::ostringstream& stream, const Options& o) {
  const std::string text = stream.str();
  json top = {{"schema_version", kSchemaVersion}, {"command", command}};
  for (auto& [k, v] : body.items()) top[k] = v;
  if (o.as_json) std::cout << top.dump(2) << "\n";
  else std::cout << text;
  if (!o.out.empty()) {
    std::ofstream(o.out + ".txt") << text;
    std::ofstream(o.out + ".json") << top.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature classification and experiments for pairs of quadratic forms"};
  app.require_subcommand(1);
  Options o;
  std::string target;

  auto common = [&](CLI::App* sub, bool needs_file) {
    if (needs_file) sub->add_option("file", target, "pencil file or directory of pencil files")->required();
    sub->add_flag("--json", o.as_json, "print the machine-readable object instead of text");
    sub->add_option("--out", o.out, "also write <out>.txt and <out>.json");
    sub->add_option("--seed", o.seed, "base random seed");
  };

  CLI::App* classify_cmd = app.add_subcommand("classify", "classify a pencil");
  common(classify_cmd, true);
  classify_cmd->add_option("--mode", o.mode, "exact or float")->check(CLI::IsMember({"exact", "float"}));

  CLI::App* witness_cmd = app.add_subcommand("witness", "destabilizing curve and its decay");
  common(witness_cmd, true);
  witness_cmd->add_option("--ladder", o.ladder, "lambda ladder, e.g. 2^-2..2^-12 or 0.25,0.125");

  CLI::App* factorize_cmd = app.add_subcommand("factorize", "pair factorization or infeasibility certificate");
  factorize_cmd->add_option("file", target, "pencil file");
  factorize_cmd->add_flag("--json", o.as_json, "print the machine-readable object instead of text");
  factorize_cmd->add_option("--out", o.out, "also write <out>.txt and <out>.json");
  factorize_cmd->add_option("--multiplicities", o.multiplicities, "comma-separated root multiplicities");

  CLI::App* sublevel_cmd = app.add_subcommand("sublevel", "sublevel-set measures of the determinant");
  common(sublevel_cmd, true);
  sublevel_cmd->add_option("--ladder", o.ladder, "delta ladder");
  sublevel_cmd->add_option("--samples", o.samples, "Monte Carlo samples per delta");

  CLI::App* scaling_cmd = app.add_subcommand("scaling", "counterexample scaling along a set family");
  common(scaling_cmd, true);
  scaling_cmd->add_option("--family", o.family, "auto, ball, slab, flat, degenerate or common-kernel");
  scaling_cmd->add_option("--p", o.p, "exponent p");
  scaling_cmd->add_option("--q", o.q, "exponent q");
  scaling_cmd->add_option("--r", o.r, "inner exponent r (defaults to q)");
  scaling_cmd->add_option("--ladder", o.ladder, "delta ladder");
  scaling_cmd->add_option("--budget", o.budget, "Monte Carlo samples per pairing");

  CLI::App* kakeya_cmd = app.add_subcommand("kakeya", "slab overlap norm over a direction lattice");
  common(kakeya_cmd, true);
  kakeya_cmd->add_option("--delta", o.delta, "slab thickness");
  kakeya_cmd->add_option("--r", o.kakeya_r, "norm exponent (default (d+4)/d)");
  kakeya_cmd->add_option("--budget", o.budget, "Monte Carlo samples");

  CLI::App* report_cmd = app.add_subcommand("report", "everything above in one report");
  common(report_cmd, true);
  report_cmd->add_flag("--full", o.full, "include scaling and Kakeya experiments at full budgets");
  report_cmd->add_option("--pq", o.pq, "exponent list 'p,q[,r];p,q[,r]'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    std::ostringstream text;
    if (*classify_cmd)
      return emit("classify", run_path(target, [&](const PencilFile& f, std::ostream& t) { return classify_section(f, o, t); }, text), text, o);
    if (*witness_cmd)
      return emit("witness", run_path(target, [&](const PencilFile& f, std::ostream& t) { return witness_section(f, o, t); }, text), text, o);
    if (*factorize_cmd) {
      if (!o.multiplicities.empty())
        return emit("factorize", {{"result", factorization_json(parse_int_list(o.multiplicities), text)}}, text, o);
      if (target.empty()) throw ParseError("factorize needs a pencil file or --multiplicities");
      return emit("factorize", run_path(target, [&](const PencilFile& f, std::ostream& t) {
        BinaryForm<Rational> det = det_pencil(f.exact_pencil());
        if (det.is_zero()) {
          t << "determinant vanishes identically; no factorization\n";
          return json{{"skipped", "determinant vanishes identically"}};
        }
        return factorization_json(multiplicities_of(roots_with_multiplicities(det)), t);
      }, text), text, o);
    }
    if (*sublevel_cmd)
      return emit("sublevel", run_path(target, [&](const PencilFile& f, std::ostream& t) { return sublevel_section(f, o, o.samples, t); }, text), text, o);
    if (*scaling_cmd)
      return emit("scaling", run_path(target, [&](const PencilFile& f, std::ostream& t) { return scaling_section(f, o, o.budget, t); }, text), text, o);
    if (*kakeya_cmd)
      return emit("kakeya", run_path(target, [&](const PencilFile& f, std::ostream& t) { return kakeya_section(f, o, o.budget, t); }, text), text, o);
    if (*report_cmd) {
      return emit("report", run_path(target, [&](const PencilFile& f, std::ostream& t) {
        json j;
        Options exact = o, flt = o;
        flt.mode = "float";
        j["classify_exact"] = classify_section(f, exact, t);
        try {
          j["classify_float"] = classify_section(f, flt, t);
        } catch (const ClusterAmbiguous& e) {
          j["classify_float"] = {{"ambiguous", e.what()}};
          t << "float classification ambiguous: " << e.what() << "\n";
        } catch (const NumericallyAmbiguous& e) {
          j["classify_float"] = {{"ambiguous", e.what()}};
          t << "float classification ambiguous: " << e.what() << "\n";
        }
        BinaryForm<Rational> det = det_pencil(f.exact_pencil());
        if (!det.is_zero()) j["factorization"] = factorization_json(multiplicities_of(roots_with_multiplicities(det)), t);
        Options wl = o;
        wl.ladder.clear();
        j["witness"] = witness_section(f, wl, t);
        j["sublevel"] = sublevel_section(f, wl, o.full ? 1'000'000 : 100'000, t);
        j["ranges"] = ranges_section(f, o, t);
        if (o.full) {
          Options sc = wl;
          sc.family = "auto";
          const int d = f.d;
          sc.p = std::to_string(d + 4) + "/4";
          sc.q = std::to_string(d + 4) + "/2";
          j["scaling"] = scaling_section(f, sc, 1'000'000, t);
          j["kakeya"] = kakeya_section(f, sc, 1'000'000, t);
        }
        return j;
      }, text), text, o);
    }
  } catch (const ClusterAmbiguous& e) {
    std::cerr << "ambiguous: " << e.what() << "\n";
    return 2;
  } catch (const NumericallyAmbiguous& e) {
    std::cerr << "ambiguous: " << e.what() << "\n";
    return 2;
  } catch (const NotSymmetric& e) {
    std::cerr << "error: matrix is not symmetric: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid number: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
