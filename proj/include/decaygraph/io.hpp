#pragma once

#include "decaygraph/decay.hpp"
#include "decaygraph/driven.hpp"
#include "decaygraph/lattice.hpp"
#include "decaygraph/spectra.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace decaygraph {

inline constexpr std::string_view kToolVersion = "decaygraph 0.1.0";

// Spec documents are JSON with a top-level "lattice" object:
//
//   {"kind":"ring","t":1.5,"segments":[{"type":"A","len":29},{"type":"B","len":1}]}
//   {"kind":"circulant","t":1.5,"n":6,"a":[1,0,1,0,1]}
//   {"kind":"obc_chain","t":1.5,"n":12}
//   {"kind":"product","axes":[<1D lattice objects>]}
//   {"kind":"raw","n":2,"entries":[[1,2,2.0,0.0],[2,1,1.0,0.0]]}
//
// Raw entries are [row, col, re, im] with 1-based indices.
//
// Throws ParseError (detail = line) for malformed text and ValidationError
// naming the offending field otherwise.
LatticeSpec parse_spec(std::string_view text);

// Inverse of parse_spec; parse_spec(serialize_spec(s)) == s.
std::string serialize_spec(const LatticeSpec& spec);

// Node cap from DECAYGRAPH_SIZE_CAP, or the default when unset.
std::size_t size_cap_from_env();

// Shortest text that reads back to the same double.
std::string format_number(double x);

// CSV exports. All indices are 1-based and rows are in a fixed order.
std::string hamiltonian_csv(const Eigen::MatrixXcd& h);      // row,col,real,imag
std::string edges_csv(const Hamiltonian& h);                 // tail,head,axis
std::string spectrum_csv(const Eigen::VectorXcd& values);    // n,re_E,im_E
std::string profiles_csv(const Eigen::MatrixXcd& modes);     // n,site,re_psi,im_psi,abs_psi
std::string charges_csv(const ChargeMap& charges);           // node,Q_amplitude,Q_combinatorial
std::string sweep_csv(const std::vector<ResponseProfile>& sweep);  // omega,node,abs_x,re_x,im_x

// One report per 1D lattice, or one per axis for products.
std::string decay_json(const PureDecayResult& check, const std::vector<DecayReport>& reports);
std::string selection_json(const ModeSelection& selection, double omega_at_peak);

struct RunOptions {
  std::string out_dir = "out";
  std::optional<double> t;
  std::optional<double> gamma;
  std::optional<int> source;  // 1-based
  std::optional<double> omega_min;
  std::optional<double> omega_max;
  std::optional<int> omega_steps;
  std::optional<double> tolerance;
  bool analytic = false;
  bool numeric = false;
  std::string figure = "all";
};

struct RunManifest {
  std::string spec_path;
  std::string command;
  std::map<std::string, std::string> overrides;
  std::string tool_version{kToolVersion};
  std::vector<std::string> outputs;
  double duration_seconds = 0.0;
  int exit_status = 0;
  std::vector<std::string> summary;  // human-readable result lines
};

std::string manifest_json(const RunManifest& manifest);

// Runs build, spectrum, decay, charges, drive or reproduce and writes the
// exports plus manifest.json into options.out_dir. Exit status: 0 success,
// 1 failed check, 3 pure-decay check failed.
RunManifest run_command(const std::string& command, const std::string& spec_path,
                        const RunOptions& options);

}  // namespace decaygraph
