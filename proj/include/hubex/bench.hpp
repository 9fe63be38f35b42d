// SN vs AS sweeps over generated graphs: add-op counts, wall times and
// per-phase times per grid cell, written as CSV and C x SV markdown tables.
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "hubex/engine.hpp"
#include "hubex/generator.hpp"

namespace hubex {

inline constexpr const char* kBenchQuery =
    "SELECT TopMaxDegreeVertices(k) FROM G GROUP BY betweeness() "
    "SUMMARIZE BY SumVMrByVGrpEGrp(), SumEMrByVGrpEGrp()";

struct ExperimentGrid {
  std::vector<std::size_t> n{5000};
  std::vector<double> degree{8, 40};
  std::vector<std::uint64_t> cardinality{10, 10000};
  std::vector<std::size_t> sv{5, 20, 40};
  double cycles = 0;
  std::size_t repetitions = 3;
  std::uint64_t seed = 1;
  std::string query = kBenchQuery;

  void validate() const {
    if (n.empty() || degree.empty() || cardinality.empty() || sv.empty())
      throw std::invalid_argument("grid lists must be non-empty");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  }
};

class GridError : public std::runtime_error {
 public:
  GridError(std::size_t line, const std::string& what)
      : std::runtime_error("grid line " + std::to_string(line) + ": " + what) {}
};

/// Reads `key = value` lines; values are numbers, strings or [lists] in JSON
/// syntax and `#` starts a comment.
inline ExperimentGrid parse_grid(std::string_view text) {
  ExperimentGrid grid;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  auto as_list = [](const nlohmann::json& v) { return v.is_array() ? v : nlohmann::json::array({v}); };
  while (std::getline(in, raw)) {
    ++line_no;
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') quoted = !quoted;
      if (raw[i] == '#' && !quoted) {
        raw.resize(i);
        break;
      }
    }
    auto eq = raw.find('=');
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (eq == std::string::npos) throw GridError(line_no, "expected key = value");
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    auto key = trim(raw.substr(0, eq));
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(trim(raw.substr(eq + 1)));
      if (key == "n")
        grid.n = as_list(value).get<std::vector<std::size_t>>();
      else if (key == "degree")
        grid.degree = as_list(value).get<std::vector<double>>();
      else if (key == "cardinality" || key == "C")
        grid.cardinality = as_list(value).get<std::vector<std::uint64_t>>();
      else if (key == "sv" || key == "SV")
        grid.sv = as_list(value).get<std::vector<std::size_t>>();
      else if (key == "cycles")
        grid.cycles = value.get<double>();
      else if (key == "repetitions")
        grid.repetitions = value.get<std::size_t>();
      else if (key == "seed")
        grid.seed = value.get<std::uint64_t>();
      else if (key == "query")
        grid.query = value.get<std::string>();
      else
        throw GridError(line_no, "unknown key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw GridError(line_no, "bad value for '" + key + "': " + e.what());
    }
  }
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw GridError(line_no, e.what());
  }
  return grid;
}

struct CellConfig {
  std::size_t n = 5000;
  double degree = 8;
  std::uint64_t cardinality = 10;
  std::size_t sv = 5;
  double cycles = 0;
};

struct CellResult {
  CellConfig config;
  double sn_seconds = 0, as_seconds = 0;  // mean total per run
  AddOps sn_ops, as_ops;
  PhaseTimes as_phases;                   // mean over repetitions
  std::uint64_t closed_form = 0;          // sum of element tag cardinalities
  bool closed_form_ok = false;
  bool deterministic = true;              // add-ops identical across runs
  std::size_t clusters = 0;
  std::string error;

  double saving() const {
    auto sn = sn_ops.total();
    return sn == 0 ? 0.0 : 1.0 - static_cast<double>(as_ops.total()) / static_cast<double>(sn);
  }
  double plan_fraction() const { return as_phases.total > 0 ? as_phases.plan / as_phases.total : 0.0; }
  double phase_coverage() const { return as_phases.total > 0 ? as_phases.phases() / as_phases.total : 0.0; }
};

/// Aggregate functions a query carries through extraction.
inline std::vector<AggFunction> query_functions(const GEQuery& q, const Params& params) {
  std::vector<AggFunction> out;
  for (const auto& c : q.summarize) {
    auto spec = bind_summary(c, params);
    if (spec.kind != SummarySpec::Kind::RelationshipType) out.push_back(spec.fn);
  }
  return out;
}

/// What SN adds, summed over `fns`: every element times its tag cardinality.
/// Members of a cycle are one element per distinct group key, as are the
/// edges inside it; edges between components count one each.
inline std::uint64_t element_tag_cardinalities(const HAGraph& ha, std::span<const AggFunction> fns) {
  const auto& st = *ha.state;
  const auto& g = *st.local;
  std::uint64_t sum = 0;
  for (const auto& fn : fns) {
    const bool vertex = fn.kind == ElementKind::Vertex;
    if (st.bounded) {
      if (vertex)
        for (const auto& m : st.masks) sum += m.cardinality();
      else
        for (const auto& e : g.edges()) sum += (st.masks[e.src].bits & st.masks[e.tgt].bits).count();
      continue;
    }
    std::set<std::pair<Index, std::uint64_t>> inside;
    if (vertex) {
      for (Index v = 0; v < g.num_vertices(); ++v) inside.emplace(st.super_of[v], fn.vertex_key(g.vertex(v)).packed);
    } else {
      for (const auto& e : g.edges()) {
        auto s = st.super_of[e.src], t = st.super_of[e.tgt];
        if (s == t)
          inside.emplace(s, fn.edge_key(g, e).packed);
        else
          sum += edge_tag(st.super_tags, s, t).cardinality();
      }
    }
    for (const auto& [s, key] : inside) sum += st.super_tags[s].cardinality();
  }
  return sum;
}

/// Runs one cell: one untimed warm-up per strategy, then `repetitions`
/// timed runs each. Errors are recorded on the result.
inline CellResult run_cell(const CellConfig& cfg, std::size_t repetitions, std::uint64_t seed,
                           const std::string& query = kBenchQuery) {
  CellResult r;
  r.config = cfg;
  try {
    auto g = generate({cfg.n, cfg.degree, cfg.cardinality, cfg.cycles, seed});
    auto ds = Dataset::make("bench", std::move(g));
    auto q = parse_query(query);
    ExecOptions as_opt, sn_opt;
    as_opt.params = sn_opt.params = {{"k", static_cast<std::int64_t>(cfg.sv)}};
    sn_opt.strategy = Strategy::SharedNothing;

    auto warm = execute(ds, q, as_opt);
    r.as_ops = warm.stats.ops;
    r.clusters = warm.stats.clusters;
    r.closed_form = element_tag_cardinalities(warm, query_functions(q, as_opt.params));
    warm = execute(ds, q, sn_opt);
    r.sn_ops = warm.stats.ops;
    warm = HAGraph{};

    for (std::size_t i = 0; i < repetitions; ++i) {
      auto as = execute(ds, q, as_opt);
      r.as_seconds += as.times.total;
      auto& p = r.as_phases;
      p.select += as.times.select;
      p.tag += as.times.tag;
      p.extract += as.times.extract;
      p.plan += as.times.plan;
      p.aggregate += as.times.aggregate;
      p.summarize += as.times.summarize;
      p.total += as.times.total;
      r.deterministic &= as.stats.ops.total() == r.as_ops.total();
      auto sn = execute(ds, q, sn_opt);
      r.sn_seconds += sn.times.total;
      r.deterministic &= sn.stats.ops.total() == r.sn_ops.total();
    }
    const double reps = static_cast<double>(repetitions);
    r.as_seconds /= reps;
    r.sn_seconds /= reps;
    for (double* v : {&r.as_phases.select, &r.as_phases.tag, &r.as_phases.extract, &r.as_phases.plan,
                      &r.as_phases.aggregate, &r.as_phases.summarize, &r.as_phases.total})
      *v /= reps;
    r.closed_form_ok = r.sn_ops.total() == r.closed_form;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

/// Every cell of the grid in order n, degree, C, SV.
inline std::vector<CellResult> run_grid(const ExperimentGrid& grid,
                                        const std::function<void(const CellResult&)>& progress = {}) {
  grid.validate();
  std::vector<CellResult> out;
  for (auto n : grid.n)
    for (auto d : grid.degree)
      for (auto c : grid.cardinality)
        for (auto sv : grid.sv) {
          out.push_back(run_cell({n, d, c, sv, grid.cycles}, grid.repetitions, grid.seed, grid.query));
          if (progress) progress(out.back());
        }
  return out;
}

namespace detail {

inline std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

inline std::string ms(double seconds) { return fixed(seconds * 1000.0, 3); }

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// One C x SV table per n for a single degree.
inline std::string degree_table(const std::vector<CellResult>& cells, double degree) {
  std::ostringstream md;
  std::map<std::size_t, std::map<std::uint64_t, std::map<std::size_t, const CellResult*>>> by;
  std::vector<std::size_t> svs;
  for (const auto& c : cells) {
    if (c.config.degree != degree) continue;
    by[c.config.n][c.config.cardinality][c.config.sv] = &c;
    if (std::find(svs.begin(), svs.end(), c.config.sv) == svs.end()) svs.push_back(c.config.sv);
  }
  std::sort(svs.begin(), svs.end());
  for (const auto& [n, rows] : by) {
    md << "## degree " << fixed(degree, degree == static_cast<long long>(degree) ? 0 : 2) << ", n = " << n
       << "\n\nEach cell: SN ms / AS ms, SN adds / AS adds (AS saving).\n\n| C \\ SV |";
    for (auto sv : svs) md << " " << sv << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < svs.size(); ++i) md << "---|";
    md << "\n";
    for (const auto& [c, row] : rows) {
      md << "| " << c << " |";
      for (auto sv : svs) {
        auto it = row.find(sv);
        if (it == row.end()) {
          md << "  |";
        } else if (!it->second->error.empty()) {
          md << " error |";
        } else {
          const auto& r = *it->second;
          md << " " << fixed(r.sn_seconds * 1000, 1) << " / " << fixed(r.as_seconds * 1000, 1) << ", "
             << r.sn_ops.total() << " / " << r.as_ops.total() << " (" << fixed(100 * r.saving(), 1) << "%) |";
        }
      }
      md << "\n";
    }
    md << "\n";
  }
  return md.str();
}

}  // namespace detail

inline std::string results_csv(const std::vector<CellResult>& cells) {
  std::ostringstream out;
  out << "n,degree,cardinality,sv,cycles,sn_ms,as_ms,sn_adds,as_adds,as_merges,as_deliveries,saving,clusters,"
         "closed_form,closed_form_ok,deterministic,error\n";
  for (const auto& c : cells) {
    const auto& k = c.config;
    out << k.n << ',' << k.degree << ',' << k.cardinality << ',' << k.sv << ',' << k.cycles << ','
        << detail::ms(c.sn_seconds) << ',' << detail::ms(c.as_seconds) << ',' << c.sn_ops.total() << ','
        << c.as_ops.total() << ',' << c.as_ops.merges << ',' << c.as_ops.deliveries << ','
        << detail::fixed(c.saving(), 4) << ',' << c.clusters << ',' << c.closed_form << ','
        << (c.closed_form_ok ? "true" : "false") << ',' << (c.deterministic ? "true" : "false") << ','
        << detail::csv_quote(c.error) << '\n';
  }
  return out.str();
}

inline std::string phases_csv(const std::vector<CellResult>& cells) {
  std::ostringstream out;
  out << "n,degree,cardinality,sv,select_ms,tag_ms,sgext_ms,plan_ms,agg_ms,summarize_ms,total_ms,plan_fraction,"
         "phase_coverage\n";
  for (const auto& c : cells) {
    const auto& k = c.config;
    const auto& p = c.as_phases;
    out << k.n << ',' << k.degree << ',' << k.cardinality << ',' << k.sv << ',' << detail::ms(p.select) << ','
        << detail::ms(p.tag) << ',' << detail::ms(p.extract) << ',' << detail::ms(p.plan) << ','
        << detail::ms(p.aggregate) << ',' << detail::ms(p.summarize) << ',' << detail::ms(p.total) << ','
        << detail::fixed(c.plan_fraction(), 4) << ',' << detail::fixed(c.phase_coverage(), 4) << '\n';
  }
  return out.str();
}

/// Writes results.csv, phases.csv, table_dense.md (largest degree) and
/// table_sparse.md (smallest degree).
inline void write_report(const std::vector<CellResult>& cells, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& body) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    f << body;
  };
  put("results.csv", results_csv(cells));
  put("phases.csv", phases_csv(cells));
  std::vector<double> degrees;
  for (const auto& c : cells) degrees.push_back(c.config.degree);
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  auto table = [&](const char* title, std::optional<double> degree) {
    std::string body = std::string("# ") + title + "\n\n";
    body += degree ? detail::degree_table(cells, *degree) : "No cells.\n";
    return body;
  };
  std::optional<double> dense, sparse;
  if (!degrees.empty()) {
    dense = degrees.back();
    sparse = degrees.front();
  }
  put("table_dense.md", table("Dense graphs", dense));
  put("table_sparse.md", table("Sparse graphs", sparse));
}

}  // namespace hubex
