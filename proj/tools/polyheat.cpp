// polyheat command line front end.  One experiment per invocation: validate a
// complex, dump spectra, kernel values and traces, fit diagonal exponents,
// run Monte Carlo estimates, audit Whitney covers and Poincare constants,
// build transfer maps, compare group and complex heat kernels, and run the
// acceptance suites.  Exit codes: 0 success, 1 a check failed or a
// computation error, 2 usage error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyheat/verify.hpp"

namespace {

using nlohmann::ordered_json;
using namespace polyheat;

// ---------------------------------------------------------------------------
// Output plumbing.  CSV is the default; JSON mirrors the same rows keyed by
// the header.  Identical inputs give byte-identical output in both formats.

struct Output {
  std::string path;  // empty writes to stdout
  std::string format = "csv";
};

void add_output_flags(CLI::App* cmd, Output& out) {
  cmd->add_option("--out", out.path, "write the table to this file");
  cmd->add_option("--format", out.format, "csv (default) or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

ordered_json table_json(const csv::Table& t) {
  ordered_json arr = ordered_json::array();
  for (const auto& row : t.rows()) {
    ordered_json obj = ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < t.header().size(); ++i) {
      const auto& key = t.header()[i];
      if (std::holds_alternative<std::string>(row[i]))
        obj[key] = std::get<std::string>(row[i]);
      else if (std::holds_alternative<double>(row[i]))
        obj[key] = std::get<double>(row[i]);
      else
        obj[key] = std::get<long long>(row[i]);
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open output file: " + path);
  os << text;
}

void emit(const Output& out, const csv::Table& t) {
  if (out.format == "json")
    write_text(out.path, table_json(t).dump(2) + "\n");
  else
    write_text(out.path, t.str());
}

// ---------------------------------------------------------------------------
// Complex sources: a spec file or a builtin name, optionally unrolled to a
// truncated cover when the builtin carries a deck annotation.

struct ComplexArgs {
  std::string spec;
  std::string builtin;
  int radius = -1;
};

void add_complex_flags(CLI::App* cmd, ComplexArgs& a, bool required = true) {
  auto* src = cmd->add_option_group("source", "complex to operate on");
  src->add_option("--spec", a.spec,
                  "complex description file (specschema-1 JSON)")
      ->check(CLI::ExistingFile);
  src->add_option("--builtin", a.builtin,
                  "builtin name: interval, circle, starN, twostar_M_N, "
                  "square, lshape, zline");
  if (required)
    src->require_option(1);
  else
    src->require_option(0, 1);
  cmd->add_option("--radius", a.radius,
                  "cover truncation radius for builtins with a deck group");
}

ComplexData load_data(const ComplexArgs& a) {
  if (!a.spec.empty()) {
    std::ifstream in(a.spec, std::ios::binary);
    if (!in) throw ParseError("cannot read spec file: " + a.spec);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_complex_spec(ss.str());
  }
  return builtin_complex(a.builtin, a.radius);
}

Complex load_complex(const ComplexArgs& a) { return build_complex(load_data(a)); }

// Point syntax: "v:ID" names a vertex, "f:ID:U,V" a chart point of a face,
// and "ID:OFFSET" an arclength offset along edge ID.
PointRef parse_point(const Complex& X, const std::string& tok) {
  auto bad = [&](const char* why) {
    return ParseError("bad point '" + tok + "': " + why);
  };
  std::vector<std::string> parts;
  std::size_t from = 0;
  while (true) {
    std::size_t colon = tok.find(':', from);
    if (colon == std::string::npos) {
      parts.push_back(tok.substr(from));
      break;
    }
    parts.push_back(tok.substr(from, colon - from));
    from = colon + 1;
  }
  try {
    if (parts.size() == 2 && parts[0] == "v")
      return vertex_point(X.vertex_index(parts[1]));
    if (parts.size() == 3 && parts[0] == "f") {
      double u = 0, v = 0;
      char tail = 0;
      if (std::sscanf(parts[2].c_str(), "%lf,%lf%c", &u, &v, &tail) != 2)
        throw bad("expected f:FACE_ID:U,V");
      return face_point(X.face_index(parts[1]), {u, v});
    }
    if (parts.size() == 2)
      return edge_point(X.edge_index(parts[0]), std::stod(parts[1]));
  } catch (const std::invalid_argument&) {
    throw bad("offset is not a number");
  } catch (const std::out_of_range&) {
    throw bad("offset is out of range");
  }
  throw bad("expected v:ID, EDGE_ID:OFFSET, or f:ID:U,V");
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> ts;
  for (int i = 0; i < count; ++i) {
    double u = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    ts.push_back(lo * std::pow(hi / lo, u));
  }
  return ts;
}

const char* group_name(GroupKind k) {
  switch (k) {
    case GroupKind::zd: return "zd";
    case GroupKind::free_group: return "free";
    default: return "none";
  }
}

GroupModel parse_group(const std::string& name) {
  if (name == "z1") return zd_group(1);
  if (name == "z2") return zd_group(2);
  if (name == "f2") return free_group(2);
  throw ParseError("unknown group: " + name + " (expected z1, z2, or f2)");
}

// ---------------------------------------------------------------------------
// Subcommand bodies.  Each returns the process exit code.

int run_build(const ComplexArgs& src, const Output& out) {
  Complex X = build_complex(load_data(src));
  GeometryBounds gb = geometry_constants(X);
  csv::Table t({"dimension", "vertices", "edges", "faces", "measure", "ell",
                "alpha", "kappa", "R0", "C_X", "C_Weak", "C_vol", "K_cover",
                "P0", "group", "cover_radius"});
  t.add_row({static_cast<long long>(X.dimension),
             static_cast<long long>(X.vertices.size()),
             static_cast<long long>(X.edges.size()),
             static_cast<long long>(X.faces.size()), X.total_measure(), gb.ell,
             gb.alpha, gb.kappa, gb.R0, gb.C_X, gb.C_Weak, gb.C_vol,
             gb.K_cover, gb.P0, std::string(group_name(X.deck.kind)),
             static_cast<long long>(X.deck.radius)});
  emit(out, t);
  return 0;
}

int run_spectrum(const ComplexArgs& src, double h, int count,
                 const Output& out) {
  Complex X = load_complex(src);
  DiscreteOperator D = discretize(X, h);
  if (count <= 0 || count > D.node_count()) count = D.node_count();
  SpectralDecomposition S = eigensolve(D, count);
  csv::Table t({"index", "lambda"});
  for (std::size_t i = 0; i < S.eigenvalues.size(); ++i)
    t.add_row({static_cast<long long>(i), S.eigenvalues[i]});
  emit(out, t);
  return 0;
}

int run_kernel(const ComplexArgs& src, double h, int count, double tval,
               const std::string& p_tok, const std::string& q_tok,
               const Output& out) {
  Complex X = load_complex(src);
  PointRef p = parse_point(X, p_tok);
  PointRef q = parse_point(X, q_tok);
  DiscreteOperator D = discretize(X, h);
  if (count <= 0 || count > D.node_count()) count = D.node_count();
  SpectralDecomposition S = eigensolve(D, count);
  KernelValue k = heat_kernel_eval(S, tval, p, q);
  csv::Table t({"t", "p", "q", "value", "err"});
  t.add_row({tval, p_tok, q_tok, k.value, k.tail_bound});
  emit(out, t);
  return 0;
}

int run_trace(const ComplexArgs& src, double h, std::vector<double> ts,
              const Output& out) {
  Complex X = load_complex(src);
  DiscreteOperator D = discretize(X, h);
  SpectralDecomposition S = eigensolve(D, D.node_count());
  csv::Table t({"t", "trace", "tail_bound"});
  for (double tv : ts) {
    TraceValue tr = heat_trace(S, tv);
    t.add_row({tv, tr.value, tr.tail_bound});
  }
  emit(out, t);
  return 0;
}

int run_asymptotic(const ComplexArgs& src, double h, const std::string& p_tok,
                   double t_lo, double t_hi, int samples, const Output& out) {
  Complex X = load_complex(src);
  PointRef p = parse_point(X, p_tok);
  DiscreteOperator D = discretize(X, h);
  SpectralDecomposition S = eigensolve(D, D.node_count());
  ExponentFit fit = diagonal_exponent_fit(S, p, t_lo, t_hi, samples);
  csv::Table t({"p", "t_lo", "t_hi", "samples", "slope", "intercept"});
  t.add_row({p_tok, t_lo, t_hi, static_cast<long long>(fit.samples), fit.slope,
             fit.intercept});
  emit(out, t);
  return 0;
}

int run_mc(const ComplexArgs& src, const std::string& p_tok,
           const std::string& q_tok, double tval, long long n,
           double bandwidth, long long seed, const Output& out) {
  Complex X = load_complex(src);
  PointRef p = parse_point(X, p_tok);
  PointRef q = parse_point(X, q_tok);
  McEstimate est = mc_kernel_estimate(X, p, q, tval,
                                      static_cast<std::uint64_t>(n), bandwidth,
                                      static_cast<std::uint64_t>(seed));
  csv::Table t({"t", "p", "q", "value", "std_error", "hits", "samples",
                "bandwidth", "dt"});
  t.add_row({tval, p_tok, q_tok, est.value, est.std_error,
             static_cast<long long>(est.hits),
             static_cast<long long>(est.samples), est.bandwidth, est.dt});
  emit(out, t);
  return 0;
}

int run_group_walk(const std::string& group, int steps, std::string word,
                   const Output& out) {
  GroupModel G = parse_group(group);
  if (word.empty()) word = group_identity(G);
  csv::Table t({"n", "probability"});
  for (int n = 0; n <= steps; ++n) {
    WalkDistribution W(G, n);
    t.add_row({static_cast<long long>(n), W.mass_at(word)});
  }
  emit(out, t);
  return 0;
}

int run_whitney(const ComplexArgs& src, const std::string& center_tok,
                double r, int chains, long long seed, const Output& out) {
  Complex X = load_complex(src);
  PointRef z = parse_point(X, center_tok);
  WhitneyCover C = whitney_cover(X, z, r);
  WhitneyAudit A =
      audit_whitney_cover(C, chains, static_cast<unsigned long long>(seed));
  csv::Table t({"quantity", "value", "bound", "status"});
  auto row = [&](const std::string& what, double v, const std::string& bound,
                 bool ok) {
    t.add_row({what, v, bound, std::string(ok ? "PASS" : "FAIL")});
  };
  row("balls", static_cast<double>(C.balls.size()), "", true);
  row("shrunk_disjoint_min_gap", A.min_gap, ">=0", A.disjoint);
  row("cover_ratio", A.cover_ratio, "<=1", A.cover_ratio <= 1 + 1e-9);
  row("radius_rule_deviation", A.radius_dev, "<=1e-9", A.radius_dev <= 1e-9);
  row("K_measured", A.K_measured, "<=" + csv::format_double(A.K_bound),
      A.K_measured <= A.K_bound);
  row("chains_checked", A.chains_checked, "", true);
  row("worst_chain_ratio", A.worst_chain_ratio,
      "<=" + csv::format_double(A.chain_ratio_bound),
      A.worst_chain_ratio <= A.chain_ratio_bound * (1 + 1e-9));
  row("chain_inclusions", A.chain_inclusions ? 1 : 0, "=1", A.chain_inclusions);
  row("min_enlargement_margin", A.min_enlargement_margin, ">=0",
      A.min_enlargement_margin >= -1e-9);
  row("worst_depth_ratio", A.worst_depth_ratio, ">=1",
      A.worst_depth_ratio >= 1 - 1e-9);
  row("member_radius_ok", A.member_radius_ok ? 1 : 0, "=1",
      A.member_radius_ok);
  row("worst_distance_err", A.worst_distance_err, "<=1e-9",
      A.worst_distance_err <= 1e-9);
  row("audit", A.pass ? 1 : 0, "=1", A.pass);
  emit(out, t);
  return A.pass ? 0 : 1;
}

int run_poincare(const ComplexArgs& src, const std::string& group, double h,
                 int r, int samples, double p, long long seed,
                 const Output& out) {
  if (!group.empty()) {
    GroupModel G = parse_group(group);
    GroupPoincareReport rep =
        group_poincare_check(G, r, samples, static_cast<unsigned long long>(seed));
    csv::Table t({"r", "ball_r", "ball_2r", "constant", "worst_ratio",
                  "samples", "status"});
    t.add_row({static_cast<long long>(rep.r), rep.ball_r, rep.ball_2r,
               rep.constant, rep.worst_ratio,
               static_cast<long long>(rep.samples),
               std::string(rep.pass ? "PASS" : "FAIL")});
    emit(out, t);
    return rep.pass ? 0 : 1;
  }
  if (src.spec.empty() && src.builtin.empty())
    throw ParseError("poincare needs --spec, --builtin, or --group");
  Complex X = load_complex(src);
  PoincareReport rep =
      poincare_check(X, h, samples, p, static_cast<unsigned long long>(seed));
  csv::Table t({"p", "radius", "constant_p1", "constant_p", "worst_ratio_p1",
                "worst_ratio_p", "neumann_constant", "neumann_bound",
                "samples", "status"});
  t.add_row({rep.p, rep.radius, rep.constant_p1, rep.constant_p,
             rep.worst_ratio_p1, rep.worst_ratio_p, rep.neumann_constant,
             rep.neumann_bound, static_cast<long long>(rep.samples),
             std::string(rep.pass ? "PASS" : "FAIL")});
  emit(out, t);
  return rep.pass ? 0 : 1;
}

int run_transfer(const ComplexArgs& src, int radius, double h, double delta,
                 long long seed, const Output& out) {
  ComplexData base = load_data(src);
  TransferMaps M = build_transfer_maps(base, radius, h, delta,
                                       static_cast<std::uint64_t>(seed));
  csv::Table t({"constant", "value"});
  t.add_row({std::string("C_0"), M.dc.C0});
  t.add_row({std::string("C_XG"), M.dc.C_XG});
  t.add_row({std::string("C_1"), M.C1});
  t.add_row({std::string("C_2"), M.C2});
  t.add_row({std::string("C_delta"), M.C_ftg});
  t.add_row({std::string("C_sup"), M.C_sup});
  t.add_row({std::string("C_g"), M.C_g});
  t.add_row({std::string("C_Over"), static_cast<long long>(M.C_over)});
  t.add_row({std::string("C_NS"), static_cast<long long>(M.net.overlap)});
  emit(out, t);
  return 0;
}

int run_compare(const std::string& group, int radius, double h,
                std::vector<double> ts, const Output& out) {
  ComplexData base;
  if (group == "z1") {
    base = make_zline();
    if (radius <= 0) radius = 40;
    if (h <= 0) h = 0.1;
    if (ts.empty()) ts = log_spaced(10, 100, 8);
  } else if (group == "z2") {
    base = make_square();
    if (radius <= 0) radius = 10;
    if (h <= 0) h = 0.5;
    if (ts.empty()) ts = log_spaced(5, 22, 5);
  } else if (group == "f2") {
    base = make_lshape();
    if (radius <= 0) radius = 2;
    if (h <= 0) h = 1.0 / 3;
    if (ts.empty()) ts = {0.5, 1.0, 1.5, 2.0};
  } else {
    throw ParseError("unknown group: " + group + " (expected z1, z2, or f2)");
  }
  LargeTimeReport rep = large_time_compare(base, radius, h, ts);
  csv::Table t({"t", "walk", "sup_h", "ratio"});
  for (const auto& row : rep.rows)
    t.add_row({row.t, row.walk, row.sup_h, row.ratio});
  emit(out, t);
  return 0;
}

int run_verify(const std::string& suite, bool quick, const std::string& group,
               double star_h, const Output& out) {
  SuiteResult R = verify_suite(suite, quick, group, star_h);
  std::ostringstream report;
  csv::Table t({"criterion", "check", "quantity", "measured", "lo", "hi",
                "status"});
  for (const auto& c : R.checks) {
    std::string cid = "C" + std::to_string(c.criterion);
    for (const auto& row : c.rows) {
      report << (row.pass ? "PASS" : "FAIL") << " " << cid << " " << c.name
             << ": " << row.quantity
             << " measured=" << csv::format_double(row.measured) << " bound=["
             << csv::format_double(row.lo) << ","
             << csv::format_double(row.hi) << "]\n";
      t.add_row({cid, c.name, row.quantity, row.measured, row.lo, row.hi,
                 std::string(row.pass ? "PASS" : "FAIL")});
    }
  }
  report << "suite " << R.suite << (R.quick ? " quick" : "") << ": "
         << (R.pass ? "PASS" : "FAIL") << "\n";
  std::cout << report.str();
  if (!out.path.empty()) emit(out, t);
  return R.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heat kernels on Euclidean polyhedral complexes"};
  app.require_subcommand(1);
  int code = 0;

  auto* build = app.add_subcommand("build", "validate a complex and report "
                                            "its geometry constants");
  ComplexArgs build_src;
  Output build_out;
  add_complex_flags(build, build_src);
  add_output_flags(build, build_out);
  build->callback([&] { code = run_build(build_src, build_out); });

  auto* spectrum =
      app.add_subcommand("spectrum", "lowest Laplace eigenvalues of a mesh");
  ComplexArgs spec_src;
  Output spec_out;
  double spec_h = 0.01;
  int spec_count = 16;
  add_complex_flags(spectrum, spec_src);
  spectrum->add_option("--h", spec_h, "mesh spacing")
      ->check(CLI::PositiveNumber);
  spectrum->add_option("--count", spec_count,
                       "eigenvalue count (0 for all)");
  add_output_flags(spectrum, spec_out);
  spectrum->callback(
      [&] { code = run_spectrum(spec_src, spec_h, spec_count, spec_out); });

  auto* kernel =
      app.add_subcommand("kernel", "heat kernel value at one point pair");
  ComplexArgs ker_src;
  Output ker_out;
  double ker_h = 0.005, ker_t = 0;
  int ker_count = 0;
  std::string ker_p, ker_q;
  add_complex_flags(kernel, ker_src);
  kernel->add_option("--t", ker_t, "time")->required()
      ->check(CLI::PositiveNumber);
  kernel->add_option("--p", ker_p, "first point (v:ID, EDGE:OFFSET, f:ID:U,V)")
      ->required();
  kernel->add_option("--q", ker_q, "second point")->required();
  kernel->add_option("--h", ker_h, "mesh spacing")->check(CLI::PositiveNumber);
  kernel->add_option("--count", ker_count, "eigenpair count (0 for all)");
  add_output_flags(kernel, ker_out);
  kernel->callback([&] {
    code = run_kernel(ker_src, ker_h, ker_count, ker_t, ker_p, ker_q, ker_out);
  });

  auto* trace = app.add_subcommand("trace", "heat trace at given times");
  ComplexArgs tr_src;
  Output tr_out;
  double tr_h = 0.01;
  std::vector<double> tr_ts;
  add_complex_flags(trace, tr_src);
  trace->add_option("--t", tr_ts, "times (repeat or comma separated)")
      ->required()
      ->delimiter(',');
  trace->add_option("--h", tr_h, "mesh spacing")->check(CLI::PositiveNumber);
  add_output_flags(trace, tr_out);
  trace->callback([&] { code = run_trace(tr_src, tr_h, tr_ts, tr_out); });

  auto* asym = app.add_subcommand(
      "asymptotic", "fit the small-time diagonal exponent at a point");
  ComplexArgs as_src;
  Output as_out;
  double as_h = 0.01, as_lo = 1e-3, as_hi = 1e-2;
  int as_samples = 13;
  std::string as_p;
  add_complex_flags(asym, as_src);
  asym->add_option("--p", as_p, "diagonal point")->required();
  asym->add_option("--h", as_h, "mesh spacing")->check(CLI::PositiveNumber);
  asym->add_option("--t-lo", as_lo, "window start")->check(CLI::PositiveNumber);
  asym->add_option("--t-hi", as_hi, "window end")->check(CLI::PositiveNumber);
  asym->add_option("--samples", as_samples, "points in the window");
  add_output_flags(asym, as_out);
  asym->callback([&] {
    code = run_asymptotic(as_src, as_h, as_p, as_lo, as_hi, as_samples, as_out);
  });

  auto* mc = app.add_subcommand(
      "mc", "Monte Carlo heat kernel estimate on a 1-complex");
  ComplexArgs mc_src;
  Output mc_out;
  double mc_t = 0, mc_bw = 0.05;
  long long mc_n = 200000, mc_seed = 1;
  std::string mc_p, mc_q;
  add_complex_flags(mc, mc_src);
  mc->add_option("--t", mc_t, "time")->required()->check(CLI::PositiveNumber);
  mc->add_option("--p", mc_p, "start point")->required();
  mc->add_option("--q", mc_q, "target point")->required();
  mc->add_option("--n", mc_n, "path count")->check(CLI::PositiveNumber);
  mc->add_option("--bandwidth", mc_bw, "kernel bandwidth")
      ->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_seed, "random seed");
  add_output_flags(mc, mc_out);
  mc->callback([&] {
    code = run_mc(mc_src, mc_p, mc_q, mc_t, mc_n, mc_bw, mc_seed, mc_out);
  });

  auto* walk = app.add_subcommand(
      "group-walk", "simple random walk return probabilities");
  Output walk_out;
  std::string walk_group, walk_word;
  int walk_steps = 20;
  walk->add_option("--group", walk_group, "z1, z2, or f2")->required();
  walk->add_option("--steps", walk_steps, "step count")
      ->check(CLI::PositiveNumber);
  walk->add_option("--word", walk_word, "target word (default identity)");
  add_output_flags(walk, walk_out);
  walk->callback(
      [&] { code = run_group_walk(walk_group, walk_steps, walk_word, walk_out); });

  auto* whitney =
      app.add_subcommand("whitney", "build and audit a Whitney cover");
  ComplexArgs wh_src;
  Output wh_out;
  std::string wh_center;
  double wh_r = 0;
  int wh_chains = 40;
  long long wh_seed = 7;
  add_complex_flags(whitney, wh_src);
  whitney->add_option("--center", wh_center, "cover center point")->required();
  whitney->add_option("--r", wh_r, "cover radius")->required()
      ->check(CLI::PositiveNumber);
  whitney->add_option("--chains", wh_chains, "chain samples in the audit");
  whitney->add_option("--seed", wh_seed, "audit seed");
  add_output_flags(whitney, wh_out);
  whitney->callback([&] {
    code = run_whitney(wh_src, wh_center, wh_r, wh_chains, wh_seed, wh_out);
  });

  auto* poincare = app.add_subcommand(
      "poincare", "Poincare constants on a complex or a group ball");
  ComplexArgs po_src;
  Output po_out;
  std::string po_group;
  double po_h = 0.01, po_p = 2;
  int po_r = 5, po_samples = 100;
  long long po_seed = 7;
  add_complex_flags(poincare, po_src, false);
  poincare->add_option("--group", po_group, "z1 or z2 (group-ball mode)");
  poincare->add_option("--h", po_h, "mesh spacing")
      ->check(CLI::PositiveNumber);
  poincare->add_option("--r", po_r, "group ball radius");
  poincare->add_option("--samples", po_samples, "test function count");
  poincare->add_option("--p", po_p, "norm index");
  poincare->add_option("--seed", po_seed, "sampling seed");
  add_output_flags(poincare, po_out);
  poincare->callback([&] {
    code = run_poincare(po_src, po_group, po_h, po_r, po_samples, po_p,
                        po_seed, po_out);
  });

  auto* transfer = app.add_subcommand(
      "transfer", "build transfer maps and dump their constants");
  ComplexArgs tf_src;
  Output tf_out;
  double tf_h = 0.1, tf_delta = -1;
  int tf_radius = 8;
  long long tf_seed = 23;
  add_complex_flags(transfer, tf_src);
  transfer->add_option("--cover-radius", tf_radius, "orbit truncation radius")
      ->check(CLI::PositiveNumber);
  transfer->add_option("--h", tf_h, "mesh spacing")
      ->check(CLI::PositiveNumber);
  transfer->add_option("--delta", tf_delta,
                       "net spacing (default: cover diameter)");
  transfer->add_option("--seed", tf_seed, "audit seed");
  add_output_flags(transfer, tf_out);
  transfer->callback([&] {
    code = run_transfer(tf_src, tf_radius, tf_h, tf_delta, tf_seed, tf_out);
  });

  auto* compare = app.add_subcommand(
      "compare", "group walk vs cover heat kernel over a time range");
  Output cmp_out;
  std::string cmp_group;
  double cmp_h = -1;
  int cmp_radius = -1;
  std::vector<double> cmp_ts;
  compare->add_option("--group", cmp_group, "z1, z2, or f2")->required();
  compare->add_option("--radius", cmp_radius, "orbit truncation radius");
  compare->add_option("--h", cmp_h, "mesh spacing");
  compare->add_option("--t", cmp_ts, "times (repeat or comma separated)")
      ->delimiter(',');
  add_output_flags(compare, cmp_out);
  compare->callback([&] {
    code = run_compare(cmp_group, cmp_radius, cmp_h, cmp_ts, cmp_out);
  });

  auto* verify = app.add_subcommand("verify", "run an acceptance suite");
  Output ver_out;
  std::string ver_suite, ver_group;
  bool ver_quick = false;
  double ver_h = -1;
  verify->add_option("--suite", ver_suite,
                     "star, twostar, circle, whitney, poincare, group, "
                     "compare, or all")
      ->required();
  verify->add_flag("--quick", ver_quick,
                   "smaller sample counts and meshes, same tolerances");
  verify->add_option("--group", ver_group,
                     "restrict the compare suite to z1 or z2");
  verify->add_option("--h", ver_h, "star-oracle mesh override");
  add_output_flags(verify, ver_out);
  verify->callback([&] {
    code = run_verify(ver_suite, ver_quick, ver_group, ver_h, ver_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int c = app.exit(e);
    return c == 0 ? 0 : 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return code;
}
