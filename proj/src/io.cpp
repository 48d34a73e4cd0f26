#include "decaygraph/io.hpp"

#include "decaygraph/errors.hpp"
#include "decaygraph/reproduce.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace decaygraph {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& path, const std::string& what, long detail = -1) {
  throw Error(ErrorCode::ValidationError, path + ": " + what, detail);
}

template <typename F>
auto rethrow_as_validation(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError || e.code() == ErrorCode::ParseError) throw;
    invalid(path, e.what(), e.detail());
  }
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) invalid(path, "expected an object");
  for (const auto& item : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; })) {
      invalid(path + "." + item.key(), "unknown field");
    }
  }
  for (const char* k : keys) {
    if (!obj.contains(k)) invalid(path + "." + k, "missing");
  }
}

double get_number(const json& obj, const char* key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number()) invalid(path + "." + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) invalid(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    invalid(path, "integer out of range");
  }
  return static_cast<int>(x);
}

HoppingRatio parse_t(const json& obj, const std::string& path) {
  const double t = get_number(obj, "t", path);
  return rethrow_as_validation(path + ".t", [&] { return HoppingRatio(t); });
}

std::string kind_of(const json& obj, const std::string& path) {
  if (!obj.is_object()) invalid(path, "expected an object");
  if (!obj.contains("kind")) invalid(path + ".kind", "missing");
  if (!obj["kind"].is_string()) invalid(path + ".kind", "expected a string");
  return obj["kind"].get<std::string>();
}

Lattice1D parse_1d(const json& obj, const std::string& path) {
  const std::string kind = kind_of(obj, path);
  if (kind == "ring") {
    check_keys(obj, path, {"kind", "t", "segments"});
    const json& segs = obj["segments"];
    if (!segs.is_array()) invalid(path + ".segments", "expected an array");
    std::vector<Segment> segments;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string sp = path + ".segments[" + std::to_string(i) + "]";
      check_keys(segs[i], sp, {"type", "len"});
      const json& type = segs[i]["type"];
      if (!type.is_string() || (type != "A" && type != "B")) invalid(sp + ".type", "expected \"A\" or \"B\"");
      const int len = get_int(segs[i]["len"], sp + ".len");
      segments.push_back({type == "A" ? ChainType::A : ChainType::B, len});
    }
    SegmentedRing ring =
        rethrow_as_validation(path + ".segments", [&] { return validate_ring(segments); });
    return {std::move(ring), parse_t(obj, path)};
  }
  if (kind == "circulant") {
    check_keys(obj, path, {"kind", "t", "n", "a"});
    const int n = get_int(obj["n"], path + ".n");
    const json& a = obj["a"];
    if (!a.is_array()) invalid(path + ".a", "expected an array");
    std::vector<int> offsets;
    for (std::size_t i = 0; i < a.size(); ++i) {
      offsets.push_back(get_int(a[i], path + ".a[" + std::to_string(i) + "]"));
    }
    CirculantGraph graph =
        rethrow_as_validation(path + ".a", [&] { return validate_circulant(n, offsets); });
    return {std::move(graph), parse_t(obj, path)};
  }
  if (kind == "obc_chain") {
    check_keys(obj, path, {"kind", "t", "n"});
    const int n = get_int(obj["n"], path + ".n");
    ObcChain chain = rethrow_as_validation(path + ".n", [&] { return validate_obc_chain(n); });
    return {chain, parse_t(obj, path)};
  }
  invalid(path + ".kind", "unknown 1D kind \"" + kind + "\"");
}

RawMatrix parse_raw(const json& obj, const std::string& path) {
  check_keys(obj, path, {"kind", "n", "entries"});
  const int n = get_int(obj["n"], path + ".n");
  if (n < 1) invalid(path + ".n", "must be positive");
  if (static_cast<std::size_t>(n) > size_cap_from_env()) {
    invalid(path + ".n", "exceeds the node cap", n);
  }
  const json& entries = obj["entries"];
  if (!entries.is_array()) invalid(path + ".entries", "expected an array");
  RawMatrix raw{Eigen::MatrixXcd::Zero(n, n)};
  Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(n, n);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string ep = path + ".entries[" + std::to_string(i) + "]";
    const json& e = entries[i];
    if (!e.is_array() || e.size() != 4) invalid(ep, "expected [row, col, re, im]");
    const int row = get_int(e[0], ep + "[0]");
    const int col = get_int(e[1], ep + "[1]");
    if (row < 1 || row > n || col < 1 || col > n) invalid(ep, "index outside 1..n");
    if (!e[2].is_number() || !e[3].is_number()) invalid(ep, "expected numeric re, im");
    if (seen(row - 1, col - 1)++) invalid(ep, "duplicate entry");
    raw.matrix(row - 1, col - 1) = cplx(e[2].get<double>(), e[3].get<double>());
  }
  return raw;
}

json to_json(const Lattice1D& lattice) {
  json out;
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, SegmentedRing>) {
          out["kind"] = "ring";
          out["t"] = lattice.t.value();
          json segs = json::array();
          for (const auto& s : g.segments) {
            segs.push_back({{"type", s.type == ChainType::A ? "A" : "B"}, {"len", s.length}});
          }
          out["segments"] = segs;
        } else if constexpr (std::is_same_v<G, CirculantGraph>) {
          out["kind"] = "circulant";
          out["t"] = lattice.t.value();
          out["n"] = g.n_nodes;
          out["a"] = g.offsets;
        } else {
          out["kind"] = "obc_chain";
          out["t"] = lattice.t.value();
          out["n"] = g.n_sites;
        }
      },
      lattice.geometry);
  return out;
}

LatticeSpec with_t(LatticeSpec spec, double t) {
  const HoppingRatio ratio = rethrow_as_validation("--t", [&] { return HoppingRatio(t); });
  if (auto* l = std::get_if<Lattice1D>(&spec)) {
    l->t = ratio;
  } else if (auto* p = std::get_if<ProductLattice>(&spec)) {
    for (auto& axis : p->axes) axis.t = ratio;
  } else {
    invalid("--t", "does not apply to raw matrices");
  }
  return spec;
}

ValidatedLattice validated(const LatticeSpec& spec) {
  if (const auto* l = std::get_if<Lattice1D>(&spec)) return *l;
  if (const auto* p = std::get_if<ProductLattice>(&spec)) return *p;
  throw Error(ErrorCode::IneligibleSpec, "raw matrices are not eligible for decay or charge claims");
}

EigenSystem analytic_system(const Lattice1D& lattice) {
  if (const auto* ring = std::get_if<SegmentedRing>(&lattice.geometry)) {
    if (!ring->is_two_segment()) {
      throw Error(ErrorCode::IneligibleSpec, "closed-form ring spectrum needs exactly two segments");
    }
    const auto modes = ring_analytic_spectrum(*ring, lattice.t);
    EigenSystem sys;
    const int n = static_cast<int>(modes.size());
    sys.values.resize(n);
    sys.right.resize(n, n);
    sys.residuals.resize(n);
    for (int k = 0; k < n; ++k) {
      sys.values(k) = modes[k].energy;
      sys.right.col(k) = modes[k].profile;
      sys.residuals(k) = modes[k].residual;
    }
    normalize_columns(sys.right);
    return sys;
  }
  if (const auto* graph = std::get_if<CirculantGraph>(&lattice.geometry)) {
    return circulant_analytic_spectrum(*graph, lattice.t);
  }
  return obc_analytic_spectrum(std::get<ObcChain>(lattice.geometry), lattice.t).system;
}

EigenSystem analytic_system(const LatticeSpec& spec) {
  if (const auto* l = std::get_if<Lattice1D>(&spec)) return analytic_system(*l);
  if (const auto* p = std::get_if<ProductLattice>(&spec)) {
    std::vector<EigenSystem> axes;
    for (const auto& axis : p->axes) axes.push_back(analytic_system(axis));
    return kron_sum_spectrum(axes).system;
  }
  throw Error(ErrorCode::IneligibleSpec, "raw matrices have no closed-form spectrum");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ValidationError, "cannot read spec file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

LatticeSpec parse_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    long line = 1, column = 1;
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                    e.what(),
                line);
  }
  check_keys(doc, "$", {"lattice"});
  const json& obj = doc["lattice"];
  const std::string kind = kind_of(obj, "lattice");
  if (kind == "product") {
    check_keys(obj, "lattice", {"kind", "axes"});
    const json& axes = obj["axes"];
    if (!axes.is_array()) invalid("lattice.axes", "expected an array");
    std::vector<Lattice1D> parsed;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      parsed.push_back(parse_1d(axes[i], "lattice.axes[" + std::to_string(i) + "]"));
    }
    return rethrow_as_validation("lattice.axes", [&] { return validate_product(parsed); });
  }
  if (kind == "raw") return parse_raw(obj, "lattice");
  return parse_1d(obj, "lattice");
}

std::string serialize_spec(const LatticeSpec& spec) {
  json lattice;
  if (const auto* l = std::get_if<Lattice1D>(&spec)) {
    lattice = to_json(*l);
  } else if (const auto* p = std::get_if<ProductLattice>(&spec)) {
    lattice["kind"] = "product";
    json axes = json::array();
    for (const auto& axis : p->axes) axes.push_back(to_json(axis));
    lattice["axes"] = axes;
  } else {
    const auto& m = std::get<RawMatrix>(spec).matrix;
    lattice["kind"] = "raw";
    lattice["n"] = m.rows();
    json entries = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (m(r, c) != cplx(0.0)) {
          entries.push_back({r + 1, c + 1, m(r, c).real(), m(r, c).imag()});
        }
      }
    }
    lattice["entries"] = entries;
  }
  json doc;
  doc["lattice"] = lattice;
  return doc.dump(2) + "\n";
}

std::size_t size_cap_from_env() {
  const char* env = std::getenv("DECAYGRAPH_SIZE_CAP");
  if (env == nullptr || *env == '\0') return kDefaultSizeCap;
  std::size_t cap = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto [ptr, ec] = std::from_chars(env, end, cap);
  if (ec != std::errc() || ptr != end || cap == 0) {
    throw Error(ErrorCode::ValidationError,
                "DECAYGRAPH_SIZE_CAP must be a positive integer, got \"" + std::string(env) + "\"");
  }
  return cap;
}

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string hamiltonian_csv(const Eigen::MatrixXcd& h) {
  std::string out = "row,col,real,imag\n";
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      if (h(r, c) == cplx(0.0)) continue;
      out += std::to_string(r + 1) + "," + std::to_string(c + 1) + "," +
             format_number(h(r, c).real()) + "," + format_number(h(r, c).imag()) + "\n";
    }
  }
  return out;
}

std::string edges_csv(const Hamiltonian& h) {
  std::string out = "tail,head,axis\n";
  for (const auto& e : h.edges) {
    out += std::to_string(e.tail + 1) + "," + std::to_string(e.head + 1) + "," +
           std::to_string(e.axis + 1) + "\n";
  }
  return out;
}

std::string spectrum_csv(const Eigen::VectorXcd& values) {
  std::string out = "n,re_E,im_E\n";
  for (Eigen::Index n = 0; n < values.size(); ++n) {
    out += std::to_string(n + 1) + "," + format_number(values(n).real()) + "," +
           format_number(values(n).imag()) + "\n";
  }
  return out;
}

std::string profiles_csv(const Eigen::MatrixXcd& modes) {
  std::string out = "n,site,re_psi,im_psi,abs_psi\n";
  for (Eigen::Index n = 0; n < modes.cols(); ++n) {
    for (Eigen::Index j = 0; j < modes.rows(); ++j) {
      const cplx v = modes(j, n);
      out += std::to_string(n + 1) + "," + std::to_string(j + 1) + "," + format_number(v.real()) +
             "," + format_number(v.imag()) + "," + format_number(std::abs(v)) + "\n";
    }
  }
  return out;
}

std::string charges_csv(const ChargeMap& charges) {
  std::string out = "node,Q_amplitude,Q_combinatorial\n";
  for (std::size_t j = 0; j < charges.amplitude.size(); ++j) {
    out += std::to_string(j + 1) + "," + format_number(charges.amplitude[j]) + "," +
           format_number(charges.combinatorial[j]) + "\n";
  }
  return out;
}

std::string sweep_csv(const std::vector<ResponseProfile>& sweep) {
  std::string out = "omega,node,abs_x,re_x,im_x\n";
  for (const auto& p : sweep) {
    const std::string omega = format_number(p.omega);
    for (Eigen::Index j = 0; j < p.x.size(); ++j) {
      out += omega + "," + std::to_string(j + 1) + "," + format_number(std::abs(p.x(j))) + "," +
             format_number(p.x(j).real()) + "," + format_number(p.x(j).imag()) + "\n";
    }
  }
  return out;
}

std::string decay_json(const PureDecayResult& check, const std::vector<DecayReport>& reports) {
  json doc;
  doc["pass"] = check.pass;
  doc["purity"] = number_or_null(check.purity);
  doc["cross_mode_deviation"] = number_or_null(check.cross_mode_deviation);
  doc["substituted_modes"] = check.substituted_modes;
  json list = json::array();
  for (const auto& report : reports) {
    json r;
    r["localization_node"] = report.localization_node + 1;
    r["purity"] = number_or_null(report.purity);
    r["partition_sum"] = report.partition_sum ? json(*report.partition_sum) : json(nullptr);
    r["same_type_spread"] = number_or_null(report.same_type_spread);
    json chains = json::array();
    for (const auto& fit : report.per_chain) {
      json c;
      c["chain"] = fit.chain_id + 1;
      c["type"] = fit.type == ChainType::A ? "A" : "B";
      std::vector<int> nodes;
      for (int v : fit.nodes) nodes.push_back(v + 1);
      c["nodes"] = nodes;
      c["ratio"] = number_or_null(fit.ratio);
      c["slope"] = number_or_null(fit.slope);
      c["residual"] = number_or_null(fit.residual);
      chains.push_back(c);
    }
    r["chains"] = chains;
    list.push_back(r);
  }
  doc["reports"] = list;
  return doc.dump(2) + "\n";
}

std::string selection_json(const ModeSelection& selection, double omega_at_peak) {
  json doc;
  doc["selected_mode"] = selection.selected_mode + 1;
  doc["least_damped_mode"] = selection.least_damped_mode + 1;
  doc["matches_least_damped"] = selection.matches_least_damped;
  doc["overlap"] = selection.overlap;
  doc["omega_at_peak"] = omega_at_peak;
  return doc.dump(2) + "\n";
}

std::string manifest_json(const RunManifest& m) {
  json doc;
  doc["spec_path"] = m.spec_path;
  doc["command"] = m.command;
  json overrides = json::object();
  for (const auto& [k, v] : m.overrides) overrides[k] = v;
  doc["overrides"] = overrides;
  doc["tool_version"] = m.tool_version;
  doc["outputs"] = m.outputs;
  doc["duration_seconds"] = m.duration_seconds;
  doc["exit_status"] = m.exit_status;
  doc["summary"] = m.summary;
  return doc.dump(2) + "\n";
}

RunManifest run_command(const std::string& command, const std::string& spec_path,
                        const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest m;
  m.spec_path = spec_path;
  m.command = command;
  if (options.t) m.overrides["t"] = format_number(*options.t);
  if (options.gamma) m.overrides["gamma"] = format_number(*options.gamma);
  if (options.source) m.overrides["source"] = std::to_string(*options.source);
  if (options.omega_min) m.overrides["omega_min"] = format_number(*options.omega_min);
  if (options.omega_max) m.overrides["omega_max"] = format_number(*options.omega_max);
  if (options.omega_steps) m.overrides["omega_steps"] = std::to_string(*options.omega_steps);
  if (options.tolerance) m.overrides["tolerance"] = format_number(*options.tolerance);
  if (options.analytic) m.overrides["analytic"] = "true";
  if (options.numeric) m.overrides["numeric"] = "true";
  if (command == "reproduce") m.overrides["figure"] = options.figure;

  static const std::vector<std::string> commands{"build",   "spectrum", "decay",
                                                 "charges", "drive",    "reproduce"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) {
    throw Error(ErrorCode::ValidationError, "unknown command \"" + command + "\"");
  }

  const std::filesystem::path dir(options.out_dir);
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::ValidationError, "cannot write " + path.string());
    out << content;
    m.outputs.push_back(path.string());
  };

  if (command == "reproduce") {
    std::vector<std::string> ids;
    if (options.figure == "all") {
      ids = figure_ids();
    } else {
      ids.push_back(options.figure);
    }
    std::vector<FigureReport> reports;
    for (const auto& id : ids) {
      reports.push_back(reproduce_figure(id));
      const auto& r = reports.back();
      for (const auto& c : r.checks) {
        m.summary.push_back(r.id + " " + c.name + (c.passed ? " PASS" : " FAIL") + " value " +
                            format_number(c.value) + " tolerance " + format_number(c.tolerance) +
                            (c.detail.empty() ? "" : " (" + c.detail + ")"));
      }
      m.summary.push_back(r.id + (r.control ? " [expected-fail control]" : "") +
                          (r.passed() ? " PASS" : " FAIL"));
      if (!r.passed()) m.exit_status = 1;
    }
    write("checks.csv", checks_csv(reports));
  } else {
    LatticeSpec spec = parse_spec(read_file(spec_path));
    if (options.t) spec = with_t(std::move(spec), *options.t);
    const Hamiltonian h = build(spec, size_cap_from_env());

    if (command == "build") {
      write("hamiltonian.csv", hamiltonian_csv(h.matrix));
      if (!std::holds_alternative<RawMatrix>(spec)) write("edges.csv", edges_csv(h));
      m.summary.push_back("nodes " + std::to_string(h.dim()) + " edges " +
                          std::to_string(h.edges.size()));
    } else if (command == "spectrum") {
      const bool numeric = options.numeric || !options.analytic;
      std::optional<EigenSystem> num, ana;
      if (numeric) {
        num = eigendecompose(h.matrix);
        write("spectrum.csv", spectrum_csv(num->values));
        write("profiles.csv", profiles_csv(num->right));
        m.summary.push_back("numeric max_residual " + format_number(num->max_residual()));
      }
      if (options.analytic) {
        ana = analytic_system(spec);
        write("spectrum_analytic.csv", spectrum_csv(ana->values));
        write("profiles_analytic.csv", profiles_csv(ana->right));
        m.summary.push_back("analytic max_residual " + format_number(ana->max_residual()));
      }
      if (num && ana) {
        const double mismatch = matched_max_deviation(ana->values, num->values);
        const double tol = options.tolerance.value_or(1e-8);
        m.summary.push_back("max_mismatch " + format_number(mismatch));
        if (!(mismatch <= tol)) m.exit_status = 1;
      }
    } else if (command == "decay") {
      const ValidatedLattice lattice = validated(spec);
      const EigenSystem sys = eigendecompose(h.matrix);
      PureDecayOptions pd;
      if (options.tolerance) pd.purity_tolerance = pd.deviation_tolerance = *options.tolerance;
      const PureDecayResult check = pure_decay_check(sys, lattice, pd);
      const Eigen::VectorXcd profile = representative_profile(lattice, sys);
      std::vector<DecayReport> reports;
      try {
        if (const auto* l = std::get_if<Lattice1D>(&lattice)) {
          reports.push_back(extract_decay_constants(profile, *l));
        } else {
          reports = extract_product_decay(profile, std::get<ProductLattice>(lattice)).axes;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::UnderflowSites && e.code() != ErrorCode::ZeroAmplitude) throw;
        m.summary.push_back(std::string("decay constants unavailable: ") + e.what());
      }
      write("decay.json", decay_json(check, reports));
      write("profiles.csv", profiles_csv(sys.right));
      m.summary.push_back(std::string("pure_decay ") + (check.pass ? "pass" : "fail") +
                          " purity " + format_number(check.purity) + " cross_mode_deviation " +
                          format_number(check.cross_mode_deviation));
      if (!check.pass) m.exit_status = 3;
    } else if (command == "charges") {
      const ValidatedLattice lattice = validated(spec);
      const EigenSystem sys = eigendecompose(h.matrix);
      const ChargeMap map = compute_charges(lattice, sys, h);
      const ChargeEquality eq = fit_charge_sign(map.amplitude, map.combinatorial);
      if (eq.sign != 1) {
        throw Error(ErrorCode::ConventionMismatch,
                    "amplitude charges match the combinatorial charges only after a sign flip");
      }
      write("charges.csv", charges_csv(map));
      m.summary.push_back("sigma +1 deviation " + format_number(eq.deviation) + " total " +
                          format_number(map.total) + " quantized " +
                          (map.quantized ? "true" : "false"));
      if (!(eq.deviation <= options.tolerance.value_or(kChargeTolerance))) m.exit_status = 1;
    } else {
      const EigenSystem sys = eigendecompose(h.matrix);
      DriveConfig cfg = default_drive(sys, options.source.value_or(1) - 1);
      if (options.gamma) cfg.gamma = *options.gamma;
      if (options.omega_min || options.omega_max || options.omega_steps) {
        cfg.omega_grid = linear_grid(options.omega_min.value_or(cfg.omega_grid.front()),
                                     options.omega_max.value_or(cfg.omega_grid.back()),
                                     options.omega_steps.value_or(401));
      }
      validate_drive(cfg, sys);
      const auto sweep = frequency_sweep(h.matrix, cfg);
      const double peak = omega_at_peak(sweep);
      const auto at_peak = std::find_if(sweep.begin(), sweep.end(),
                                        [&](const ResponseProfile& p) { return p.omega == peak; });
      const ModeSelection sel = mode_selection_check(*at_peak, sys);
      write("sweep.csv", sweep_csv(sweep));
      write("selection.json", selection_json(sel, peak));
      m.summary.push_back("omega_at_peak " + format_number(peak) + " selected_mode " +
                          std::to_string(sel.selected_mode + 1) + " overlap " +
                          format_number(sel.overlap));
    }
  }

  m.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto path = dir / "manifest.json";
  std::ofstream(path, std::ios::binary) << manifest_json(m);
  return m;
}

}  // namespace decaygraph
