#include "bloch/cli_runner.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bloch/bloch_map.hpp"
#include "bloch/generators.hpp"
#include "bloch/interference.hpp"
#include "bloch/matrix.hpp"
#include "bloch/measurement.hpp"
#include "bloch/multipartite.hpp"
#include "bloch/rng.hpp"

namespace bloch {

namespace {

constexpr std::array<const char*, 8> kCommands = {
    "basis", "encode", "decode", "measure", "interfere", "decompose", "rod", "chsh"};

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                const std::string& ctx) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(ctx + ": unknown key '" + it.key() + "'");
  }
}

double need_number(const Json& p, const char* key, const std::string& ctx) {
  if (!p.contains(key) || !p[key].is_number()) {
    fail(ctx + ": missing numeric parameter '" + std::string(key) + "'");
  }
  return p[key].get<double>();
}

double number_or(const Json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number()) fail(std::string("parameter '") + key + "' must be a number");
  return p[key].get<double>();
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const std::exception& e) {
    fail("cannot parse JSON in '" + path + "': " + e.what());
  }
  return j;
}

// An inline matrix or a path to a JSON file holding one.
CMatrix matrix_param(const Json& p, const char* inline_key, const char* file_key,
                     const std::string& ctx) {
  const bool has_inline = p.contains(inline_key);
  const bool has_file = p.contains(file_key);
  if (has_inline == has_file) {
    fail(ctx + ": provide exactly one of '" + inline_key + "' and '" + file_key + "'");
  }
  return cmatrix_from_json(has_inline ? p[inline_key] : load_json_file(p[file_key]));
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::string out = join(header_);
    for (const auto& row : rows_) out += join(row);
    return out;
  }

 private:
  static std::string join(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) line += ',';
      line += csv_escape(fields[i]);
    }
    return line + "\n";
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

BasisPtr basis_from_json(const Json& spec, const std::string& ctx) {
  if (!spec.is_object()) fail(ctx + ": basis spec must be an object");
  check_keys(spec, {"kind", "n", "factors", "arrangement"}, ctx);
  const std::string arrangement =
      spec.contains("arrangement") ? spec["arrangement"].get<std::string>() : "canonical";

  if (spec.contains("factors")) {
    if (spec.contains("kind") && spec["kind"].get<std::string>() != "tensorial") {
      fail(ctx + ": 'factors' requires kind 'tensorial'");
    }
    std::vector<BasisPtr> factors;
    for (const auto& f : spec["factors"]) {
      if (!f.is_number_integer() || f.get<int>() < 2) {
        fail(ctx + ": factors must be integers >= 2");
      }
      factors.push_back(standard_basis(f.get<int>()));
    }
    if (factors.size() < 2) fail(ctx + ": need at least two factors");
    BasisPtr basis = tensorial_basis(factors);
    if (arrangement == "canonical") return basis;
    if (arrangement == "ab_diagonal_first") {
      return reorder(basis, diagonal_first_ab_permutation(layout_of(*basis)));
    }
    fail(ctx + ": unknown tensorial arrangement '" + arrangement + "'");
  }

  if (!spec.contains("n")) fail(ctx + ": need 'n' or 'factors'");
  if (spec.contains("kind") && spec["kind"].get<std::string>() != "standard") {
    fail(ctx + ": 'n' requires kind 'standard'");
  }
  if (!spec["n"].is_number_integer() || spec["n"].get<int>() < 2) {
    fail(ctx + ": 'n' must be an integer >= 2");
  }
  const int n = spec["n"].get<int>();
  if (arrangement == "canonical") return standard_basis(n);
  if (arrangement == "two_level") return two_level_basis(n);
  if (arrangement == "offdiagonal_first") return offdiagonal_first_basis(n);
  fail(ctx + ": unknown arrangement '" + arrangement + "'");
}

struct HandlerOutput {
  Json results = Json::object();
  std::string csv;
};

// ---- basis ---------------------------------------------------------------

HandlerOutput handle_basis(const ExperimentConfig& cfg) {
  const BasisPtr basis = basis_from_json(cfg.parameters, "basis");
  const BasisReport report = verify_basis(*basis);

  HandlerOutput out;
  out.results["kind"] = basis->kind == BasisKind::Standard ? "standard" : "tensorial";
  out.results["n_dim"] = basis->n_dim;
  out.results["factor_dims"] = basis->factor_dims;
  out.results["c"] = basis->c();
  out.results["e"] = basis->e();
  out.results["labels"] = basis->labels;
  out.results["report"] = {{"worst_hermiticity", report.worst_hermiticity},
                           {"worst_trace", report.worst_trace},
                           {"worst_pair", report.worst_pair},
                           {"ok", report.ok()}};
  Json matrices = Json::array();
  for (const auto& m : basis->matrices) matrices.push_back(cmatrix_to_json(m));
  out.results["matrices"] = std::move(matrices);

  CsvTable table({"matrix", "label", "row", "col", "re", "im"});
  for (int i = 0; i < basis->count(); ++i) {
    const CMatrix& m = basis->matrices[i];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        table.add_row({std::to_string(i), basis->labels[i], std::to_string(r),
                       std::to_string(c), csv_number(m(r, c).real()),
                       csv_number(m(r, c).imag())});
      }
    }
  }
  out.csv = table.str();
  return out;
}

// ---- encode / decode -----------------------------------------------------

HandlerOutput handle_encode(const ExperimentConfig& cfg) {
  const Json& p = cfg.parameters;
  check_keys(p, {"state", "state_file", "basis"}, "encode");
  const CMatrix m = matrix_param(p, "state", "state_file", "encode");
  const OperatorState state = make_state(m);
  const BasisPtr basis = p.contains("basis")
                             ? basis_from_json(p["basis"], "encode.basis")
                             : standard_basis(static_cast<int>(m.rows()));
  const BlochVector r = encode(state, basis);

  HandlerOutput out;
  out.results["components"] = rvector_to_json(r.components);
  out.results["norm"] = r.components.norm();
  out.results["purity"] = purity(r);
  out.results["is_state"] = is_state(r);

  CsvTable table({"index", "component"});
  for (Eigen::Index i = 0; i < r.components.size(); ++i) {
    table.add_row({std::to_string(i), csv_number(r.components(i))});
  }
  out.csv = table.str();
  return out;
}

HandlerOutput handle_decode(const ExperimentConfig& cfg) {
  const Json& p = cfg.parameters;
  check_keys(p, {"components", "vector_file", "basis"}, "decode");
  const bool inline_vec = p.contains("components");
  if (inline_vec == p.contains("vector_file")) {
    fail("decode: provide exactly one of 'components' and 'vector_file'");
  }
  const RVector components =
      rvector_from_json(inline_vec ? p["components"] : load_json_file(p["vector_file"]));

  BasisPtr basis;
  if (p.contains("basis")) {
    basis = basis_from_json(p["basis"], "decode.basis");
  } else {
    const auto n = static_cast<int>(std::llround(std::sqrt(components.size() + 1.0)));
    if (n < 2 || n * n != components.size() + 1) {
      fail("decode: component count " + std::to_string(components.size()) +
           " is not N^2 - 1 for any N >= 2");
    }
    basis = standard_basis(n);
  }
  const BlochVector r = make_bloch_vector(components, basis);
  const CMatrix m = decode(r);

  HandlerOutput out;
  out.results["matrix"] = cmatrix_to_json(m);
  out.results["purity"] = purity(r);
  out.results["min_eigenvalue"] = min_eigenvalue(m);
  out.results["is_state"] = is_state(r);

  CsvTable table({"row", "col", "re", "im"});
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      table.add_row({std::to_string(i), std::to_string(j), csv_number(m(i, j).real()),
                     csv_number(m(i, j).imag())});
    }
  }
  out.csv = table.str();
  return out;
}

// ---- measure ---------------------------------------------------------------

HandlerOutput handle_measure(const ExperimentConfig& cfg) {
  const Json& p = cfg.parameters;
  check_keys(p, {"state", "state_file", "observable", "observable_file"}, "measure");
  const CMatrix state_m = matrix_param(p, "state", "state_file", "measure");
  const CMatrix obs = matrix_param(p, "observable", "observable_file", "measure");
  if (state_m.rows() != obs.rows()) fail("measure: state and observable dimensions differ");

  const OperatorState state = make_state(state_m);
  const BasisPtr basis = standard_basis(static_cast<int>(state_m.rows()));
  const MeasurementSimplex simplex = simplex_from_observable(obs, basis);
  const MeasurementRun run = run_measurement(state, simplex, cfg.shots, cfg.seed, cfg.workers);

  RVector three_sigma = RVector::Zero(simplex.n_dim);
  if (cfg.shots > 0) {
    for (int i = 0; i < simplex.n_dim; ++i) {
      three_sigma(i) =
          3.0 * std::sqrt(run.analytic(i) * (1.0 - run.analytic(i)) /
                          static_cast<double>(cfg.shots));
    }
  }

  HandlerOutput out;
  out.results["eigenvalues"] = rvector_to_json(simplex.eigenvalues);
  out.results["analytic"] = rvector_to_json(run.analytic);
  out.results["counts"] = run.counts;
  out.results["empirical"] = rvector_to_json(run.empirical);
  out.results["three_sigma"] = rvector_to_json(three_sigma);

  CsvTable table({"outcome", "eigenvalue", "analytic", "count", "empirical", "three_sigma"});
  for (int i = 0; i < simplex.n_dim; ++i) {
    table.add_row({std::to_string(i), csv_number(simplex.eigenvalues(i)),
                   csv_number(run.analytic(i)), std::to_string(run.counts[i]),
                   csv_number(run.empirical(i)), csv_number(three_sigma(i))});
  }
  out.csv = table.str();
  return out;
}

// ---- interfere -------------------------------------------------------------

HandlerOutput handle_interfere(const ExperimentConfig& cfg) {
  const Json& p = cfg.parameters;
  check_keys(p, {"paths", "n", "a1", "a2", "a3", "alpha", "delta", "scan_points"},
             "interfere");
  const int paths = p.contains("paths") ? p["paths"].get<int>() : 2;
  std::optional<int> scan;
  if (p.contains("scan_points")) {
    if (!p["scan_points"].is_number_integer() || p["scan_points"].get<int>() < 2) {
      fail("interfere: 'scan_points' must be an integer >= 2");
    }
    scan = p["scan_points"].get<int>();
  }

  HandlerOutput out;
  if (paths == 2) {
    const int n = p.contains("n") ? p["n"].get<int>() : 2;
    const double a1 = need_number(p, "a1", "interfere");
    const double a2 = need_number(p, "a2", "interfere");
    const double alpha0 = number_or(p, "alpha", 0.0);

    const std::vector<std::string> columns = {"a1", "a2", "alpha", "I_plus", "I_minus",
                                              "P_plus", "P_minus"};
    CsvTable table(columns);
    Json rows = Json::array();
    const int points = scan.value_or(1);
    for (int k = 0; k < points; ++k) {
      const double alpha =
          scan ? 2.0 * std::numbers::pi * k / points : alpha0;
      const Superposition2 s = make_superposition2(n, a1, a2, alpha);
      const InterferenceReport rep = interference2(s);
      rows.push_back(Json::array({a1, a2, alpha, rep.interference_terms(0),
                                  rep.interference_terms(1), rep.probabilities(0),
                                  rep.probabilities(1)}));
      table.add_row({csv_number(a1), csv_number(a2), csv_number(alpha),
                     csv_number(rep.interference_terms(0)),
                     csv_number(rep.interference_terms(1)),
                     csv_number(rep.probabilities(0)),
                     csv_number(rep.probabilities(1))});
    }
    out.results["columns"] = columns;
    out.results["rows"] = std::move(rows);
    if (!scan) {
      const Superposition2 s = make_superposition2(n, a1, a2, alpha0);
      const EffectiveProjection eff = effective_projection(s);
      out.results["latitude"] = s.latitude();
      out.results["effective"] = {
          {"state", Json::array({eff.state(0), eff.state(1), eff.state(2)})},
          {"vertex_plus", Json::array({eff.vertex_plus(0), eff.vertex_plus(1),
                                       eff.vertex_plus(2)})},
          {"vertex_minus", Json::array({eff.vertex_minus(0), eff.vertex_minus(1),
                                        eff.vertex_minus(2)})},
          {"radius", eff.radius},
          {"weight_plus", eff.weight_plus},
          {"weight_minus", eff.weight_minus}};
      out.results["vector"] =
          rvector_to_json(superposition2_vector(s, two_level_basis(n)).components);
    }
    out.csv = table.str();
    return out;
  }

  if (paths != 3) fail("interfere: 'paths' must be 2 or 3");
  const double a1 = need_number(p, "a1", "interfere");
  const double a2 = need_number(p, "a2", "interfere");
  const double a3 = need_number(p, "a3", "interfere");
  const double alpha0 = number_or(p, "alpha", 0.0);
  const double delta0 = number_or(p, "delta", 0.0);

  const std::vector<std::string> columns = {"a1", "a2", "a3", "alpha", "delta",
                                            "I1", "I2", "I3", "P1", "P2", "P3"};
  CsvTable table(columns);
  Json rows = Json::array();
  const int points = scan.value_or(1);
  for (int ka = 0; ka < points; ++ka) {
    for (int kd = 0; kd < points; ++kd) {
      const double alpha = scan ? 2.0 * std::numbers::pi * ka / points : alpha0;
      const double delta = scan ? 2.0 * std::numbers::pi * kd / points : delta0;
      const Superposition3 s = make_superposition3(a1, a2, a3, alpha, delta);
      const InterferenceReport rep = interference3(s);
      rows.push_back(Json::array({a1, a2, a3, alpha, delta, rep.interference_terms(0),
                                  rep.interference_terms(1), rep.interference_terms(2),
                                  rep.probabilities(0), rep.probabilities(1),
                                  rep.probabilities(2)}));
      table.add_row({csv_number(a1), csv_number(a2), csv_number(a3), csv_number(alpha),
                     csv_number(delta), csv_number(rep.interference_terms(0)),
                     csv_number(rep.interference_terms(1)),
                     csv_number(rep.interference_terms(2)),
                     csv_number(rep.probabilities(0)), csv_number(rep.probabilities(1)),
                     csv_number(rep.probabilities(2))});
      if (!scan) break;
    }
    if (!scan) break;
  }
  out.results["columns"] = columns;
  out.results["rows"] = std::move(rows);
  if (!scan) {
    const Superposition3 s = make_superposition3(a1, a2, a3, alpha0, delta0);
    out.results["vector"] =
        rvector_to_json(superposition3_vector(s, offdiagonal_first_basis(3)).components);
  }
  out.csv = table.str();
  return out;
}

// ---- decompose -------------------------------------------------------------

Json sectors_to_json(const SectorDecomposition& split) {
  return Json{{"r_a", rvector_to_json(split.r_a)},
              {"r_b", rvector_to_json(split.r_b)},
              {"r_ab", rvector_to_json(split.r_ab)},
              {"r_int", rvector_to_json(split.r_int)}};
}

void sector_rows(CsvTable& table, const char* block, const RVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    table.add_row({block, std::to_string(i), csv_number(v(i))});
  }
}

std::pair<int, int> dims_param(const Json& p, const std::string& ctx) {
  if (!p.contains("dims") || !p["dims"].is_array() || p["dims"].size() != 2) {
    fail(ctx + ": need 'dims' as [dim_a, dim_b]");
  }
  const int na = p["dims"][0].get<int>();
  const int nb = p["dims"][1].get<int>();
  if (na < 2 || nb < 2) fail(ctx + ": factor dimensions must be >= 2");
  return {na, nb};
}

HandlerOutput handle_decompose(const ExperimentConfig& cfg) {
  const Json& p = cfg.parameters;
  if (!p.contains("type")) fail("decompose: missing 'type'");
  const std::string type = p["type"].get<std::string>();
  HandlerOutput out;

  if (type == "product") {
    check_keys(p, {"type", "dims", "r_a", "r_b"}, "decompose(product)");
    const auto [na, nb] = dims_param(p, "decompose(product)");
    const BasisPtr basis_a = standard_basis(na);
    const BasisPtr basis_b = standard_basis(nb);
    const BasisPtr composite = bipartite_basis(na, nb);
    const BlochVector ra = make_bloch_vector(rvector_from_json(p.at("r_a")), basis_a);
    const BlochVector rb = make_bloch_vector(rvector_from_json(p.at("r_b")), basis_b);
    const BlochVector full = product_compose(ra, rb, composite);
    const SectorDecomposition split = sector_split(full, layout_of(*composite));

    const CMatrix direct = kron(decode(ra), decode(rb));
    const double deviation = (decode(full) - direct).cwiseAbs().maxCoeff();

    out.results["vector"] = rvector_to_json(full.components);
    out.results["sectors"] = sectors_to_json(split);
    out.results["purity"] = purity(full);
    out.results["is_state"] = is_state(full);
    out.results["product_deviation"] = deviation;

    CsvTable table({"block", "index", "value"});
    sector_rows(table, "full", full.components);
    sector_rows(table, "r_a", split.r_a);
    sector_rows(table, "r_b", split.r_b);
    sector_rows(table, "r_ab", split.r_ab);
    out.csv = table.str();
    return out;
  }

  if (type == "separable") {
    check_keys(p, {"type", "dims", "terms"}, "decompose(separable)");
    const auto [na, nb] = dims_param(p, "decompose(separable)");
    if (!p.contains("terms") || !p["terms"].is_array() || p["terms"].empty()) {
      fail("decompose(separable): need a nonempty 'terms' array");
    }
    const BasisPtr basis_a = standard_basis(na);
    const BasisPtr basis_b = standard_basis(nb);
    const BasisPtr composite = bipartite_basis(na, nb);
    std::vector<std::tuple<double, BlochVector, BlochVector>> terms;
    for (const auto& term : p["terms"]) {
      check_keys(term, {"weight", "r_a", "r_b"}, "decompose(separable).terms");
      terms.emplace_back(need_number(term, "weight", "decompose(separable)"),
                         make_bloch_vector(rvector_from_json(term.at("r_a")), basis_a),
                         make_bloch_vector(rvector_from_json(term.at("r_b")), basis_b));
    }
    const BlochVector full = separable_compose(terms, composite);
    const SectorLayout layout = layout_of(*composite);
    const SectorDecomposition split = sector_split(full, layout);

    // Correlation witness: AB sector of a mixture vs the outer product of the
    // averaged one-party sectors.
    double gap = 0.0;
    for (int k = 1; k <= layout.a_count(); ++k) {
      for (int l = 1; l <= layout.b_count(); ++l) {
        const double outer = split.r_a(k - 1) * split.r_b(l - 1);
        gap = std::max(gap, std::abs(split.r_ab((k - 1) * layout.b_count() + l - 1) - outer));
      }
    }

    out.results["vector"] = rvector_to_json(full.components);
    out.results["sectors"] = sectors_to_json(split);
    out.results["purity"] = purity(full);
    out.results["is_state"] = is_state(full);
    out.results["ab_outer_gap"] = gap;

    CsvTable table({"block", "index", "value"});
    sector_rows(table, "full", full.components);
    sector_rows(table, "r_a", split.r_a);
    sector_rows(table, "r_b", split.r_b);
    sector_rows(table, "r_ab", split.r_ab);
    out.csv = table.str();
    return out;
  }

  if (type == "entangled") {
    check_keys(p, {"type", "preset", "a1", "a2", "alpha", "psi_a", "phi_a", "psi_b", "phi_b"},
               "decompose(entangled)");
    EntangledPairSpec spec;
    if (p.contains("preset")) {
      const std::string preset = p["preset"].get<std::string>();
      if (preset != "singlet") fail("decompose(entangled): unknown preset '" + preset + "'");
      spec = singlet_spec();
    } else {
      spec = make_entangled_pair(
          need_number(p, "a1", "decompose(entangled)"),
          need_number(p, "a2", "decompose(entangled)"), number_or(p, "alpha", 0.0),
          cvector_from_json(p.at("psi_a")), cvector_from_json(p.at("phi_a")),
          cvector_from_json(p.at("psi_b")), cvector_from_json(p.at("phi_b")));
    }
    const EntangledDecomposition dec = entangled_decompose(spec);
    const SectorLayout& layout = dec.layout;

    RVector assembled = dec.r_int;
    assembled.segment(layout.a_offset(), layout.a_count()) += layout.d_a() * dec.bar_a;
    assembled.segment(layout.b_offset(), layout.b_count()) += layout.d_b() * dec.bar_b;
    assembled.segment(layout.ab_offset(), layout.ab_count()) += layout.d_ab() * dec.bar_ab;
    const double reassembly = (dec.full.components - assembled).cwiseAbs().maxCoeff();
    const double orthogonality =
        std::abs((dec.full.components - dec.r_int).dot(dec.r_int));

    out.results["dims"] = Json::array({layout.dim_a, layout.dim_b});
    out.results["d_constants"] = {
        {"d_a", layout.d_a()}, {"d_b", layout.d_b()}, {"d_ab", layout.d_ab()}};
    out.results["bar_a"] = rvector_to_json(dec.bar_a);
    out.results["bar_b"] = rvector_to_json(dec.bar_b);
    out.results["bar_ab"] = rvector_to_json(dec.bar_ab);
    out.results["r_int"] = rvector_to_json(dec.r_int);
    out.results["full"] = rvector_to_json(dec.full.components);
    out.results["reassembly_deviation"] = reassembly;
    out.results["interference_orthogonality"] = orthogonality;

    CsvTable table({"block", "index", "value"});
    sector_rows(table, "full", dec.full.components);
    sector_rows(table, "bar_a", dec.bar_a);
    sector_rows(table, "bar_b", dec.bar_b);
    sector_rows(table, "bar_ab", dec.bar_ab);
    sector_rows(table, "r_int", dec.r_int);
    out.csv = table.str();
    return out;
  }

  fail("decompose: unknown type '" + type + "'");
}

// ---- rod / chsh ------------------------------------------------------------

Eigen::Vector3d axis_param(const Json& p, const char* angle_key, const char* axis_key,
                           const std::string& ctx) {
  const bool has_angle = p.contains(angle_key);
  const bool has_axis = p.contains(axis_key);
  if (has_angle == has_axis) {
    fail(ctx + ": provide exactly one of '" + angle_key + "' and '" + axis_key + "'");
  }
  if (has_angle) return planar_axis(p[angle_key].get<double>());
  if (!p[axis_key].is_array() || p[axis_key].size() != 3) {
    fail(ctx + ": '" + axis_key + "' must be [x, y, z]");
  }
  return Eigen::Vector3d(p[axis_key][0].get<double>(), p[axis_key][1].get<double>(),
                         p[axis_key][2].get<double>());
}

Json axis_to_json(const Eigen::Vector3d& v) { return Json::array({v(0), v(1), v(2)}); }

HandlerOutput handle_rod(const ExperimentConfig& cfg) {
  const Json& p = cfg.parameters;
  check_keys(p, {"angle_a", "angle_b", "axis_a", "axis_b", "order"}, "rod");
  RodExperimentConfig rod;
  rod.axis_a = axis_param(p, "angle_a", "axis_a", "rod");
  rod.axis_b = axis_param(p, "angle_b", "axis_b", "rod");
  rod.shots = cfg.shots;
  rod.seed = cfg.seed;
  rod.workers = cfg.workers;
  if (p.contains("order")) {
    const std::string order = p["order"].get<std::string>();
    if (order == "ba") {
      rod.measure_b_first = true;
    } else if (order != "ab") {
      fail("rod: 'order' must be 'ab' or 'ba'");
    }
  }
  const RodResult result = rod_experiment(rod);

  const double sigma3 =
      cfg.shots > 0
          ? 3.0 * std::sqrt((1.0 - result.analytic_correlation * result.analytic_correlation) /
                            static_cast<double>(cfg.shots))
          : 0.0;

  HandlerOutput out;
  out.results["axis_a"] = axis_to_json(rod.axis_a);
  out.results["axis_b"] = axis_to_json(rod.axis_b);
  out.results["order"] = rod.measure_b_first ? "ba" : "ab";
  out.results["counts"] = result.counts;
  Json empirical = Json::array(), analytic = Json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    empirical.push_back(cfg.shots > 0
                            ? static_cast<double>(result.counts[i]) /
                                  static_cast<double>(cfg.shots)
                            : 0.0);
    analytic.push_back(result.analytic[i]);
  }
  out.results["empirical"] = std::move(empirical);
  out.results["analytic"] = std::move(analytic);
  out.results["correlation"] = result.correlation;
  out.results["analytic_correlation"] = result.analytic_correlation;
  out.results["three_sigma_correlation"] = sigma3;

  static constexpr std::array<const char*, 4> cells = {"++", "+-", "-+", "--"};
  CsvTable table({"cell", "count", "empirical", "analytic"});
  for (std::size_t i = 0; i < 4; ++i) {
    const double emp = cfg.shots > 0 ? static_cast<double>(result.counts[i]) /
                                           static_cast<double>(cfg.shots)
                                     : 0.0;
    table.add_row({cells[i], std::to_string(result.counts[i]), csv_number(emp),
                   csv_number(result.analytic[i])});
  }
  table.add_row({"E", "", csv_number(result.correlation),
                 csv_number(result.analytic_correlation)});
  out.csv = table.str();
  return out;
}

HandlerOutput handle_chsh(const ExperimentConfig& cfg) {
  const Json& p = cfg.parameters;
  check_keys(p, {"mode", "angles", "axes", "optimal"}, "chsh");
  const std::string mode = p.contains("mode") ? p["mode"].get<std::string>() : "analytic";
  if (mode != "analytic" && mode != "monte_carlo") {
    fail("chsh: 'mode' must be 'analytic' or 'monte_carlo'");
  }

  int sources = 0;
  for (const char* key : {"angles", "axes", "optimal"}) sources += p.contains(key) ? 1 : 0;
  if (sources > 1) fail("chsh: give at most one of 'angles', 'axes', 'optimal'");

  ChshAngles angles = optimal_chsh_angles();
  Json angles_deg = Json::array({0.0, 90.0, 45.0, 135.0});
  if (p.contains("optimal") && !p["optimal"].get<bool>()) {
    fail("chsh: 'optimal' may only be true; give 'angles' or 'axes' instead");
  }
  if (p.contains("angles")) {
    if (!p["angles"].is_array() || p["angles"].size() != 4) {
      fail("chsh: 'angles' must be [a, a_prime, b, b_prime] in degrees");
    }
    angles.a = planar_axis(p["angles"][0].get<double>());
    angles.a_prime = planar_axis(p["angles"][1].get<double>());
    angles.b = planar_axis(p["angles"][2].get<double>());
    angles.b_prime = planar_axis(p["angles"][3].get<double>());
    angles_deg = p["angles"];
  } else if (p.contains("axes")) {
    if (!p["axes"].is_array() || p["axes"].size() != 4) {
      fail("chsh: 'axes' must hold four [x, y, z] entries for a, a', b, b'");
    }
    auto get = [&](int i) {
      const Json& ax = p["axes"][i];
      if (!ax.is_array() || ax.size() != 3) fail("chsh: each axis must be [x, y, z]");
      return Eigen::Vector3d(ax[0].get<double>(), ax[1].get<double>(), ax[2].get<double>());
    };
    angles = ChshAngles{get(0), get(1), get(2), get(3)};
    angles_deg = Json();
  }

  const std::array<double, 4> analytic = {
      singlet_expectation(angles.a, angles.b),
      singlet_expectation(angles.a, angles.b_prime),
      singlet_expectation(angles.a_prime, angles.b),
      singlet_expectation(angles.a_prime, angles.b_prime)};
  const double s_analytic = chsh_analytic(angles);

  HandlerOutput out;
  out.results["mode"] = mode;
  if (!angles_deg.is_null()) out.results["angles_deg"] = angles_deg;
  out.results["axes"] = Json::array({axis_to_json(angles.a), axis_to_json(angles.a_prime),
                                     axis_to_json(angles.b), axis_to_json(angles.b_prime)});

  static constexpr std::array<const char*, 4> pair_names = {"ab", "ab'", "a'b", "a'b'"};
  CsvTable table({"pair", "correlation", "analytic"});
  if (mode == "analytic") {
    out.results["correlations"] = analytic;
    out.results["analytic_correlations"] = analytic;
    out.results["s"] = s_analytic;
    out.results["s_analytic"] = s_analytic;
    for (std::size_t i = 0; i < 4; ++i) {
      table.add_row({pair_names[i], csv_number(analytic[i]), csv_number(analytic[i])});
    }
    table.add_row({"S", csv_number(s_analytic), csv_number(s_analytic)});
  } else {
    const ChshRun run = chsh_monte_carlo(angles, cfg.shots, cfg.seed, cfg.workers);
    out.results["correlations"] = run.correlations;
    out.results["analytic_correlations"] = analytic;
    out.results["s"] = run.s;
    out.results["s_analytic"] = s_analytic;
    out.results["shots_per_pair"] = run.shots_per_pair;
    for (std::size_t i = 0; i < 4; ++i) {
      table.add_row({pair_names[i], csv_number(run.correlations[i]),
                     csv_number(analytic[i])});
    }
    table.add_row({"S", csv_number(run.s), csv_number(s_analytic)});
  }
  out.csv = table.str();
  return out;
}

HandlerOutput dispatch(const ExperimentConfig& cfg) {
  if (cfg.command == "basis") return handle_basis(cfg);
  if (cfg.command == "encode") return handle_encode(cfg);
  if (cfg.command == "decode") return handle_decode(cfg);
  if (cfg.command == "measure") return handle_measure(cfg);
  if (cfg.command == "interfere") return handle_interfere(cfg);
  if (cfg.command == "decompose") return handle_decompose(cfg);
  if (cfg.command == "rod") return handle_rod(cfg);
  if (cfg.command == "chsh") return handle_chsh(cfg);
  fail("unknown command '" + cfg.command + "'");
}

std::uint64_t env_seed_or_zero() {
  const char* env = std::getenv("BLOCH_SEED");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(env, &end, 10);
  if (end == nullptr || *end != '\0') {
    fail(std::string("BLOCH_SEED is not an unsigned integer: '") + env + "'");
  }
  return parsed;
}

}  // namespace

ExperimentConfig parse_config(const Json& merged) {
  if (!merged.is_object()) fail("config must be a JSON object");
  check_keys(merged,
             {"command", "parameters", "seed", "shots", "workers", "output_format",
              "output_path"},
             "config");

  ExperimentConfig cfg;
  if (!merged.contains("command") || !merged["command"].is_string()) {
    fail("config: missing 'command'");
  }
  cfg.command = merged["command"].get<std::string>();
  bool known = false;
  for (const char* c : kCommands) known = known || cfg.command == c;
  if (!known) fail("config: unknown command '" + cfg.command + "'");

  if (merged.contains("parameters")) {
    if (!merged["parameters"].is_object()) fail("config: 'parameters' must be an object");
    cfg.parameters = merged["parameters"];
  }
  if (merged.contains("seed")) {
    const Json& s = merged["seed"];
    if (!s.is_number_integer() && !s.is_number_unsigned()) {
      fail("config: 'seed' must be an unsigned integer");
    }
    if (s.is_number_integer() && s.get<std::int64_t>() < 0) {
      fail("config: 'seed' must be nonnegative");
    }
    cfg.seed = s.get<std::uint64_t>();
  } else {
    cfg.seed = env_seed_or_zero();
  }
  if (merged.contains("shots")) {
    if (!merged["shots"].is_number_integer() && !merged["shots"].is_number_unsigned()) {
      fail("config: 'shots' must be an integer");
    }
    cfg.shots = merged["shots"].get<std::int64_t>();
    if (cfg.shots < 0) fail("config: 'shots' must be nonnegative");
  }
  if (merged.contains("workers")) {
    if (!merged["workers"].is_number_integer() || merged["workers"].get<int>() < 1) {
      fail("config: 'workers' must be a positive integer");
    }
    cfg.workers = merged["workers"].get<int>();
  }
  if (merged.contains("output_format")) {
    cfg.output_format = merged["output_format"].get<std::string>();
    if (cfg.output_format != "json" && cfg.output_format != "csv") {
      fail("config: 'output_format' must be 'json' or 'csv'");
    }
  }
  if (merged.contains("output_path")) {
    cfg.output_path = merged["output_path"].get<std::string>();
  }
  return cfg;
}

RunRecord execute(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  HandlerOutput handled = dispatch(cfg);

  RunRecord record;
  record.config_echo = Json::object();
  record.config_echo["command"] = cfg.command;
  record.config_echo["parameters"] = cfg.parameters;
  record.config_echo["seed"] = cfg.seed;
  record.config_echo["shots"] = cfg.shots;
  record.config_echo["workers"] = cfg.workers;
  record.config_echo["output_format"] = cfg.output_format;
  if (!cfg.output_path.empty()) record.config_echo["output_path"] = cfg.output_path;
  record.results = std::move(handled.results);
  record.csv = std::move(handled.csv);
  record.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

std::string render_payload(const RunRecord& record, const std::string& format) {
  if (format == "csv") return record.csv;
  Json payload = Json::object();
  payload["config"] = record.config_echo;
  payload["results"] = record.results;
  payload["library_version"] = record.library_version;
  return payload.dump(2) + "\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"coefficient-space quantum state and measurement toolbox"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::int64_t> shots_flag;
  std::optional<int> workers_flag;
  std::optional<std::string> format_flag;
  std::optional<std::string> output_flag;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed_flag, "RNG master seed (overrides config and BLOCH_SEED)");
  app.add_option("--shots", shots_flag, "Monte Carlo shot count");
  app.add_option("--workers", workers_flag, "worker thread count");
  app.add_option("--format", format_flag, "output format: json or csv");
  app.add_option("--output", output_flag, "write the payload to this file instead of stdout");

  // Subcommand flags mirror the per-command parameter keys; values collected
  // here override the config file's "parameters" object.
  std::optional<int> n_flag, paths_flag, scan_flag, basis_n_flag;
  std::optional<std::string> factors_flag, arrangement_flag, basis_arrangement_flag;
  std::optional<std::string> state_file_flag, observable_file_flag, vector_file_flag;
  std::optional<std::string> components_flag, type_flag, preset_flag, spec_file_flag;
  std::optional<std::string> order_flag, mode_flag, angles_flag;
  std::optional<double> a1_flag, a2_flag, a3_flag, alpha_flag, delta_flag;
  std::optional<double> angle_a_flag, angle_b_flag;
  bool optimal_flag = false;

  CLI::App* basis_cmd = app.add_subcommand("basis", "emit a generator family");
  basis_cmd->add_option("--n", n_flag, "dimension of a standard family");
  basis_cmd->add_option("--factors", factors_flag, "comma list of factor dimensions");
  basis_cmd->add_option("--arrangement", arrangement_flag, "slot arrangement");

  CLI::App* encode_cmd = app.add_subcommand("encode", "density matrix -> coefficients");
  encode_cmd->add_option("--state-file", state_file_flag, "JSON matrix file");
  encode_cmd->add_option("--basis-n", basis_n_flag, "standard basis dimension");
  encode_cmd->add_option("--basis-arrangement", basis_arrangement_flag, "slot arrangement");

  CLI::App* decode_cmd = app.add_subcommand("decode", "coefficients -> density matrix");
  decode_cmd->add_option("--vector-file", vector_file_flag, "JSON vector file");
  decode_cmd->add_option("--components", components_flag, "comma list of components");
  decode_cmd->add_option("--basis-n", basis_n_flag, "standard basis dimension");
  decode_cmd->add_option("--basis-arrangement", basis_arrangement_flag, "slot arrangement");

  CLI::App* measure_cmd = app.add_subcommand("measure", "membrane Monte Carlo measurement");
  measure_cmd->add_option("--state-file", state_file_flag, "JSON matrix file");
  measure_cmd->add_option("--observable-file", observable_file_flag, "JSON matrix file");

  CLI::App* interfere_cmd = app.add_subcommand("interfere", "2- or 3-path interference");
  interfere_cmd->add_option("--paths", paths_flag, "2 or 3");
  interfere_cmd->add_option("--n", n_flag, "ambient dimension for 2-path states");
  interfere_cmd->add_option("--a1", a1_flag, "amplitude 1");
  interfere_cmd->add_option("--a2", a2_flag, "amplitude 2");
  interfere_cmd->add_option("--a3", a3_flag, "amplitude 3");
  interfere_cmd->add_option("--alpha", alpha_flag, "phase of path 2");
  interfere_cmd->add_option("--delta", delta_flag, "phase of path 3");
  interfere_cmd->add_option("--scan-points", scan_flag, "phase grid resolution");

  CLI::App* decompose_cmd = app.add_subcommand("decompose", "bipartite sector split");
  decompose_cmd->add_option("--type", type_flag, "product, separable or entangled");
  decompose_cmd->add_option("--preset", preset_flag, "named state (singlet)");
  decompose_cmd->add_option("--spec-file", spec_file_flag,
                            "JSON file merged into the parameters");

  CLI::App* rod_cmd = app.add_subcommand("rod", "sequential singlet correlation run");
  rod_cmd->add_option("--angle-a", angle_a_flag, "planar A axis, degrees");
  rod_cmd->add_option("--angle-b", angle_b_flag, "planar B axis, degrees");
  rod_cmd->add_option("--order", order_flag, "'ab' or 'ba'");

  CLI::App* chsh_cmd = app.add_subcommand("chsh", "four-pair correlation combination");
  chsh_cmd->add_option("--mode", mode_flag, "analytic or monte_carlo");
  chsh_cmd->add_option("--angles", angles_flag, "four planar angles, degrees, comma list");
  chsh_cmd->add_flag("--optimal", optimal_flag, "use the planar optimum (0, 90, 45, 135)");

  for (CLI::App* sub : {basis_cmd, encode_cmd, decode_cmd, measure_cmd, interfere_cmd,
                        decompose_cmd, rod_cmd, chsh_cmd}) {
    sub->fallthrough();
  }

  std::string command;
  try {
    app.parse(argc, argv);

    Json merged = Json::object();
    if (!config_path.empty()) merged = load_json_file(config_path);
    if (!merged.is_object()) fail("config file must hold a JSON object");

    const auto chosen = app.get_subcommands();
    if (!chosen.empty()) merged["command"] = chosen.front()->get_name();
    if (merged.contains("command") && merged["command"].is_string()) {
      command = merged["command"].get<std::string>();
    }

    if (seed_flag) merged["seed"] = *seed_flag;
    if (shots_flag) merged["shots"] = *shots_flag;
    if (workers_flag) merged["workers"] = *workers_flag;
    if (format_flag) merged["output_format"] = *format_flag;
    if (output_flag) merged["output_path"] = *output_flag;

    if (!merged.contains("parameters")) merged["parameters"] = Json::object();
    Json& params = merged["parameters"];
    if (spec_file_flag) {
      const Json extra = load_json_file(*spec_file_flag);
      if (!extra.is_object()) fail("--spec-file must hold a JSON object");
      for (auto it = extra.begin(); it != extra.end(); ++it) params[it.key()] = it.value();
    }
    auto list_to_json = [](const std::string& text, auto convert) {
      Json arr = Json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) arr.push_back(convert(item));
      return arr;
    };
    if (n_flag) params["n"] = *n_flag;
    if (factors_flag) {
      params["factors"] =
          list_to_json(*factors_flag, [](const std::string& s) { return std::stoi(s); });
    }
    if (arrangement_flag) params["arrangement"] = *arrangement_flag;
    if (basis_n_flag || basis_arrangement_flag) {
      if (!params.contains("basis")) params["basis"] = Json::object();
      if (basis_n_flag) params["basis"]["n"] = *basis_n_flag;
      if (basis_arrangement_flag) params["basis"]["arrangement"] = *basis_arrangement_flag;
    }
    if (state_file_flag) params["state_file"] = *state_file_flag;
    if (observable_file_flag) params["observable_file"] = *observable_file_flag;
    if (vector_file_flag) params["vector_file"] = *vector_file_flag;
    if (components_flag) {
      params["components"] =
          list_to_json(*components_flag, [](const std::string& s) { return std::stod(s); });
    }
    if (paths_flag) params["paths"] = *paths_flag;
    if (a1_flag) params["a1"] = *a1_flag;
    if (a2_flag) params["a2"] = *a2_flag;
    if (a3_flag) params["a3"] = *a3_flag;
    if (alpha_flag) params["alpha"] = *alpha_flag;
    if (delta_flag) params["delta"] = *delta_flag;
    if (scan_flag) params["scan_points"] = *scan_flag;
    if (type_flag) params["type"] = *type_flag;
    if (preset_flag) params["preset"] = *preset_flag;
    if (angle_a_flag) params["angle_a"] = *angle_a_flag;
    if (angle_b_flag) params["angle_b"] = *angle_b_flag;
    if (order_flag) params["order"] = *order_flag;
    if (mode_flag) params["mode"] = *mode_flag;
    if (angles_flag) {
      params["angles"] =
          list_to_json(*angles_flag, [](const std::string& s) { return std::stod(s); });
    }
    if (optimal_flag) params["optimal"] = true;

    const ExperimentConfig cfg = parse_config(merged);
    command = cfg.command;
    const RunRecord record = execute(cfg);
    const std::string payload = render_payload(record, cfg.output_format);

    if (!cfg.output_path.empty()) {
      std::ofstream file(cfg.output_path, std::ios::binary);
      if (!file) fail("cannot write output file '" + cfg.output_path + "'");
      file << payload;
      err << "[bloch] payload written to " << cfg.output_path << "\n";
    } else {
      out << payload;
    }
    err << "[bloch] " << cfg.command << " finished in " << record.wall_time_s << " s\n";
    return 0;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    Json error = {{"error", {{"command", command}, {"message", e.what()}}}};
    out << error.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    Json error = {{"error", {{"command", command}, {"message", e.what()}}}};
    out << error.dump(2) << "\n";
    return 1;
  }
}

}  // namespace bloch
