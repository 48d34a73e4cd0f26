#include "decaygraph/errors.hpp"
#include "decaygraph/io.hpp"
#include "decaygraph/reproduce.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace decaygraph;
namespace fs = std::filesystem;

namespace {

constexpr ChainType A = ChainType::A;
constexpr ChainType B = ChainType::B;

Error error_of(std::string_view text) {
  try {
    parse_spec(text);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << text;
  return Error(ErrorCode::ValidationError, "none");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class RunCommand : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("decaygraph_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string spec(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  RunOptions options(const std::string& sub) {
    RunOptions o;
    o.out_dir = (dir_ / sub).string();
    return o;
  }

  fs::path dir_;
};

const char* kRing = R"({"lattice":{"kind":"ring","t":1.5,"segments":[{"type":"A","len":29},{"type":"B","len":1}]}})";
const char* kFig3a =
    R"({"lattice":{"kind":"ring","t":1.5,"segments":[{"type":"A","len":6},{"type":"B","len":8},{"type":"A","len":7},{"type":"B","len":4}]}})";

}  // namespace

TEST(ParseSpec, RingDocument) {
  const LatticeSpec spec = parse_spec(kRing);
  const auto& l = std::get<Lattice1D>(spec);
  EXPECT_EQ(std::get<SegmentedRing>(l.geometry).segments, (std::vector<Segment>{{A, 29}, {B, 1}}));
  EXPECT_EQ(l.t.value(), 1.5);
  EXPECT_EQ(parse_spec(serialize_spec(spec)), spec);
}

TEST(ParseSpec, CirculantSymmetryViolation) {
  const Error e = error_of(R"({"lattice":{"kind":"circulant","n":4,"a":[1,0,0],"t":2}})");
  EXPECT_EQ(e.code(), ErrorCode::ValidationError);
  EXPECT_NE(std::string(e.what()).find("SymmetryViolation"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("lattice.a"), std::string::npos);
  EXPECT_EQ(e.detail(), 1);
}

TEST(ParseSpec, ProductDocument) {
  const LatticeSpec spec = parse_spec(R"({"lattice":{"kind":"product","axes":[
      {"kind":"ring","t":1.5,"segments":[{"type":"A","len":30}]},
      {"kind":"ring","t":2,"segments":[{"type":"A","len":5},{"type":"B","len":3}]}]}})");
  const auto& p = std::get<ProductLattice>(spec);
  EXPECT_EQ(p.size(), 240u);
  EXPECT_EQ(p.axes[1].t.value(), 2.0);
  EXPECT_EQ(parse_spec(serialize_spec(spec)), spec);
}

TEST(ParseSpec, ParseErrorCarriesLine) {
  const Error e = error_of("{\n  \"lattice\": {\n    \"kind\": ring\n  }\n}");
  EXPECT_EQ(e.code(), ErrorCode::ParseError);
  EXPECT_EQ(e.detail(), 3);
  EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
}

TEST(ParseSpec, ValidationNamesField) {
  struct Case {
    const char* text;
    const char* field;
  };
  for (const Case& c : std::initializer_list<Case>{
           {R"({"lattice":{"kind":"obc_chain","n":12}})", "lattice.t"},
           {R"({"lattice":{"kind":"obc_chain","n":12,"t":1}})", "lattice.t"},
           {R"({"lattice":{"kind":"obc_chain","n":1,"t":2}})", "lattice.n"},
           {R"({"lattice":{"kind":"obc_chain","n":2.5,"t":2}})", "lattice.n"},
           {R"({"lattice":{"kind":"obc_chain","n":4,"t":2,"x":1}})", "lattice.x"},
           {R"({"lattice":{"kind":"hexagon","t":2}})", "lattice.kind"},
           {R"({"lattice":{"kind":"ring","t":2,"segments":[{"type":"C","len":3}]}})",
            "lattice.segments[0].type"},
           {R"({"lattice":{"kind":"ring","t":2,"segments":[{"type":"A","len":3},{"type":"A","len":3}]}})",
            "lattice.segments"},
           {R"({"lattice":{"kind":"product","axes":[{"kind":"obc_chain","n":3,"t":2}]}})", "lattice.axes"},
           {R"({"lattice":{"kind":"product","axes":[{"kind":"obc_chain","n":3,"t":2},{"kind":"raw"}]}})",
            "lattice.axes[1].kind"},
           {R"({"lattice":{"kind":"raw","n":2,"entries":[[3,1,1,0]]}})", "lattice.entries[0]"},
           {R"({"lattice":{"kind":"raw","n":2,"entries":[[1,2,1,0],[1,2,1,0]]}})", "lattice.entries[1]"},
           {R"({"grid":{}})", "$.grid"},
       }) {
    const Error e = error_of(c.text);
    EXPECT_EQ(e.code(), ErrorCode::ValidationError) << c.text;
    EXPECT_NE(std::string(e.what()).find(c.field), std::string::npos) << e.what();
  }
}

TEST(ParseSpec, RawRoundTrip) {
  const LatticeSpec spec =
      parse_spec(R"({"lattice":{"kind":"raw","n":3,"entries":[[1,2,0.5,-1.25],[3,1,2,0]]}})");
  const auto& m = std::get<RawMatrix>(spec).matrix;
  EXPECT_EQ(m(0, 1), cplx(0.5, -1.25));
  EXPECT_EQ(m(2, 0), cplx(2.0, 0.0));
  EXPECT_EQ(parse_spec(serialize_spec(spec)), spec);
}

TEST(ParseSpec, RandomRoundTrips) {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> len(1, 9), kind(0, 2);
  std::uniform_real_distribution<double> t(1.01, 60.0);
  auto random_1d = [&]() -> Lattice1D {
    switch (kind(rng)) {
      case 0: {
        std::vector<Segment> segs;
        const int pairs = 1 + len(rng) % 3;
        for (int p = 0; p < pairs; ++p) {
          segs.push_back({A, len(rng)});
          segs.push_back({B, len(rng)});
        }
        return {validate_ring(segs), HoppingRatio(1.0 / t(rng))};
      }
      case 1: {
        const int n = 2 + len(rng);
        std::vector<int> a(n - 1, 0);
        for (int q = 1; q <= n / 2; ++q) a[q - 1] = a[n - q - 1] = (q == 1) || (len(rng) % 2);
        return {validate_circulant(n, a), HoppingRatio(t(rng))};
      }
      default:
        return {validate_obc_chain(1 + len(rng)), HoppingRatio(t(rng))};
    }
  };
  for (int trial = 0; trial < 100; ++trial) {
    const LatticeSpec spec =
        trial % 3 == 0 ? LatticeSpec(validate_product({random_1d(), random_1d()})) : LatticeSpec(random_1d());
    EXPECT_EQ(parse_spec(serialize_spec(spec)), spec);
    EXPECT_EQ(serialize_spec(parse_spec(serialize_spec(spec))), serialize_spec(spec));
  }
}

TEST(Exports, CsvFormats) {
  const Hamiltonian h = build_lattice({validate_circulant(2, {1}), HoppingRatio(2.0)});
  EXPECT_EQ(hamiltonian_csv(h.matrix), "row,col,real,imag\n1,2,2,0\n2,1,1,0\n");
  EXPECT_EQ(edges_csv(h), "tail,head,axis\n1,2,1\n");
  Eigen::VectorXcd v(2);
  v << cplx(0.1, -2.0), cplx(3.0, 0.0);
  EXPECT_EQ(spectrum_csv(v), "n,re_E,im_E\n1,0.1,-2\n2,3,0\n");
  Eigen::MatrixXcd modes(2, 1);
  modes << cplx(3.0, 4.0), 1.0;
  EXPECT_EQ(profiles_csv(modes), "n,site,re_psi,im_psi,abs_psi\n1,1,3,4,5\n1,2,1,0,1\n");
  ChargeMap map;
  map.amplitude = {0.5, -0.5};
  map.combinatorial = {0.5, -0.5};
  EXPECT_EQ(charges_csv(map), "node,Q_amplitude,Q_combinatorial\n1,0.5,0.5\n2,-0.5,-0.5\n");
  ResponseProfile p{1.5, Eigen::VectorXcd::Constant(1, cplx(0.0, -2.0)), 0.0};
  EXPECT_EQ(sweep_csv({p}), "omega,node,abs_x,re_x,im_x\n1.5,1,2,0,-2\n");
}

TEST(Exports, NumbersRoundTrip) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = d(rng) * std::pow(10.0, i % 40 - 20);
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(Exports, SizeCapFromEnvironment) {
  ::unsetenv("DECAYGRAPH_SIZE_CAP");
  EXPECT_EQ(size_cap_from_env(), kDefaultSizeCap);
  ::setenv("DECAYGRAPH_SIZE_CAP", "10", 1);
  EXPECT_EQ(size_cap_from_env(), 10u);
  ::setenv("DECAYGRAPH_SIZE_CAP", "ten", 1);
  EXPECT_THROW(size_cap_from_env(), Error);
  ::setenv("DECAYGRAPH_SIZE_CAP", "0", 1);
  EXPECT_THROW(size_cap_from_env(), Error);
  ::unsetenv("DECAYGRAPH_SIZE_CAP");
}

TEST_F(RunCommand, ChargesOnFigureRing) {
  const RunManifest m = run_command("charges", spec("fig3a.json", kFig3a), options("out"));
  EXPECT_EQ(m.exit_status, 0);
  ASSERT_EQ(m.outputs.size(), 1u);
  std::istringstream csv(slurp(m.outputs[0]));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "node,Q_amplitude,Q_combinatorial");
  while (std::getline(csv, line)) {
    const int node = std::stoi(line.substr(0, line.find(',')));
    const double q = std::stod(line.substr(line.find(',') + 1));
    const double want = (node == 7 || node == 22) ? 1.0 : (node == 1 || node == 15) ? -1.0 : 0.0;
    EXPECT_NEAR(q, want, 1e-9) << line;
  }
  EXPECT_TRUE(fs::exists(dir_ / "out" / "manifest.json"));
}

TEST_F(RunCommand, DecayOnOpenChainFails) {
  const RunManifest m = run_command(
      "decay", spec("obc.json", R"({"lattice":{"kind":"obc_chain","t":1.5,"n":12}})"), options("out"));
  EXPECT_EQ(m.exit_status, 3);
  EXPECT_NE(slurp(dir_ / "out" / "decay.json").find("\"pass\": false"), std::string::npos);
}

TEST_F(RunCommand, SpectrumAnalyticAndNumeric) {
  RunOptions o = options("out");
  o.analytic = o.numeric = true;
  const RunManifest m = run_command("spectrum", spec("ring.json", kRing), o);
  EXPECT_EQ(m.exit_status, 0);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "spectrum.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "spectrum_analytic.csv"));
  const auto line = std::find_if(m.summary.begin(), m.summary.end(),
                                 [](const std::string& s) { return s.rfind("max_mismatch", 0) == 0; });
  ASSERT_NE(line, m.summary.end());
  EXPECT_LE(std::stod(line->substr(13)), 1e-8);
}

TEST_F(RunCommand, OutputsAreDeterministic) {
  const std::string path = spec("ring.json", kFig3a);
  for (const char* cmd : {"build", "spectrum", "decay", "charges", "drive"}) {
    const RunManifest a = run_command(cmd, path, options("a"));
    const RunManifest b = run_command(cmd, path, options("b"));
    ASSERT_EQ(a.outputs.size(), b.outputs.size());
    for (std::size_t k = 0; k < a.outputs.size(); ++k) {
      EXPECT_EQ(slurp(a.outputs[k]), slurp(b.outputs[k])) << cmd << " " << a.outputs[k];
    }
  }
}

TEST_F(RunCommand, OverridesAndDrive) {
  RunOptions o = options("out");
  o.t = 2.0;
  o.source = 3;
  o.gamma = 5.0;
  o.omega_min = -1.0;
  o.omega_max = 1.0;
  o.omega_steps = 5;
  const RunManifest m = run_command("drive", spec("ring.json", kRing), o);
  EXPECT_EQ(m.overrides.at("t"), "2");
  EXPECT_EQ(m.overrides.at("source"), "3");
  const std::string sweep = slurp(dir_ / "out" / "sweep.csv");
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 1 + 5 * 30);
  EXPECT_NE(slurp(dir_ / "out" / "selection.json").find("omega_at_peak"), std::string::npos);
}

TEST_F(RunCommand, RawMatrixScope) {
  const std::string path =
      spec("raw.json", R"({"lattice":{"kind":"raw","n":2,"entries":[[1,2,0.5,0],[2,1,2,0]]}})");
  EXPECT_EQ(run_command("build", path, options("b")).exit_status, 0);
  EXPECT_EQ(run_command("drive", path, options("d")).exit_status, 0);
  try {
    run_command("decay", path, options("x"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IneligibleSpec);
  }
  RunOptions o = options("y");
  o.t = 2.0;
  EXPECT_THROW(run_command("build", path, o), Error);
}

TEST_F(RunCommand, UnknownCommandAndMissingFile) {
  EXPECT_THROW(run_command("plot", spec("ring.json", kRing), options("o")), Error);
  EXPECT_THROW(run_command("build", (dir_ / "missing.json").string(), options("o")), Error);
}

TEST_F(RunCommand, SizeCapRespected) {
  ::setenv("DECAYGRAPH_SIZE_CAP", "10", 1);
  try {
    run_command("build", spec("ring.json", kRing), options("o"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionOverflow);
  }
  ::unsetenv("DECAYGRAPH_SIZE_CAP");
}

TEST_F(RunCommand, ReproduceSingleFigure) {
  RunOptions o = options("out");
  o.figure = "fig3a";
  const RunManifest m = run_command("reproduce", "", o);
  EXPECT_EQ(m.exit_status, 0);
  EXPECT_NE(slurp(dir_ / "out" / "checks.csv").find("fig3a,false,charges"), std::string::npos);
  o.figure = "fig9z";
  EXPECT_THROW(run_command("reproduce", "", o), Error);
}

TEST(Reproduce, ControlsPassWhenPureDecayFails) {
  for (const char* id : {"fig1d", "fig4d"}) {
    const FigureReport r = reproduce_figure(id);
    EXPECT_TRUE(r.control);
    EXPECT_TRUE(r.passed()) << id;
  }
}

TEST(Reproduce, FigureIdsComplete) {
  EXPECT_EQ(figure_ids().size(), 14u);
}
