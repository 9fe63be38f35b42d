#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hubex/bench.hpp"
#include "hubex/generator.hpp"
#include "hubex/sample.hpp"
#include "hubex/service.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

hubex::Params parse_params(const std::vector<std::string>& items) {
  hubex::Params out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::runtime_error("parameter '" + item + "' is not NAME=INT");
    out[item.substr(0, eq)] = std::stoll(item.substr(eq + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hub-based exploration of attributed graphs"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic attributed graph");
  hubex::GenConfig gcfg;
  std::string gen_out, gen_name = "graph";
  gen->add_option("--n", gcfg.n, "Vertex count")->default_val(gcfg.n);
  gen->add_option("--degree", gcfg.degree, "Average out-degree")->default_val(gcfg.degree);
  gen->add_option("--cardinality", gcfg.cardinality, "Distinct (v_grp, e_grp) keys")->default_val(gcfg.cardinality);
  gen->add_option("--cycles", gcfg.cycle_fraction, "Share of back edges")->default_val(gcfg.cycle_fraction);
  gen->add_option("--seed", gcfg.seed, "Random seed")->default_val(gcfg.seed);
  gen->add_option("--name", gen_name, "File name prefix")->default_val(gen_name);
  gen->add_option("--out", gen_out, "Output directory")->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Run an SN vs AS experiment grid");
  std::string grid_path, bench_out;
  bench->add_option("--grid", grid_path, "Grid file (key = value lines)")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "Report directory")->required();

  // query
  auto* query = app.add_subcommand("query", "Run a GE-query and print the HA-graph as JSON");
  std::string vpath, epath, manifest = std::string(HUBEX_DATA_DIR) + "/manifest.json", dataset, text, text_file,
                                 strategy = "as";
  char delimiter = '\t';
  std::vector<std::string> params;
  std::vector<hubex::VertexId> zoom;
  query->add_option("--vertices", vpath, "Vertex file");
  query->add_option("--edges", epath, "Edge file");
  query->add_option("--delimiter", delimiter, "Field delimiter of the graph files");
  query->add_option("--manifest", manifest, "Dataset manifest")->default_val(manifest);
  query->add_option("--dataset", dataset, "Dataset name in the manifest");
  query->add_option("--text", text, "Query text");
  query->add_option("--file", text_file, "File holding the query text");
  query->add_option("--param", params, "Query parameter NAME=INT");
  query->add_option("--strategy", strategy, "Aggregation strategy")->check(CLI::IsMember({"as", "sn"}));
  query->add_option("--zoom", zoom, "Zoom into the edge X Y of the result")->expected(2);

  // sample
  auto* sample = app.add_subcommand("sample", "Write the bundled social-network samples");
  std::string sample_out = "data";
  sample->add_option("--out", sample_out, "Output directory")->default_val(sample_out);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  std::string serve_manifest = std::string(HUBEX_DATA_DIR) + "/manifest.json", host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--manifest", serve_manifest, "Dataset manifest")->default_val(serve_manifest);
  serve->add_option("--host", host, "Bind address")->default_val(host);
  serve->add_option("--port", port, "Port")->default_val(port);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      std::filesystem::create_directories(gen_out);
      auto g = hubex::generate(gcfg);
      auto base = std::filesystem::path(gen_out) / gen_name;
      hubex::save_graph(g, base.string() + ".vertices.tsv", base.string() + ".edges.tsv");
      std::cerr << "wrote " << g.num_vertices() << " vertices, " << g.num_edges() << " edges to " << base.string()
                << ".{vertices,edges}.tsv\n";
    } else if (bench->parsed()) {
      auto grid = hubex::parse_grid(read_file(grid_path));
      auto cells = hubex::run_grid(grid, [](const hubex::CellResult& r) {
        const auto& c = r.config;
        std::cerr << "n=" << c.n << " degree=" << c.degree << " C=" << c.cardinality << " SV=" << c.sv;
        if (!r.error.empty())
          std::cerr << " error: " << r.error << "\n";
        else
          std::cerr << " SN " << r.sn_ops.total() << " AS " << r.as_ops.total() << " saving "
                    << hubex::detail::fixed(100 * r.saving(), 1) << "%\n";
      });
      hubex::write_report(cells, bench_out);
      int failed = 0;
      for (const auto& r : cells) failed += !r.error.empty() || !r.closed_form_ok || !r.deterministic;
      if (failed) {
        std::cerr << failed << " cell(s) failed\n";
        return 1;
      }
    } else if (query->parsed()) {
      hubex::SessionStore store;
      if (!vpath.empty() || !epath.empty()) {
        if (vpath.empty() || epath.empty()) throw std::runtime_error("--vertices and --edges go together");
        dataset = "G";
        store.add_dataset(dataset, hubex::load_graph(vpath, epath, delimiter));
      } else {
        auto names = hubex::load_manifest(store, manifest);
        if (dataset.empty()) dataset = names.at(0);
      }
      if (!text_file.empty()) text = read_file(text_file);
      if (text.empty()) throw std::runtime_error("give the query with --text or --file");
      hubex::ExecOptions opt;
      opt.params = parse_params(params);
      if (strategy == "sn") opt.strategy = hubex::Strategy::SharedNothing;
      auto ha = store.put(hubex::execute(store.dataset(dataset), text, opt));
      if (zoom.size() == 2) ha = store.put(hubex::zoom_edge(*ha, zoom[0], zoom[1], {}, opt));
      std::cout << hubex::to_json(*ha).dump(2) << "\n";
    } else if (sample->parsed()) {
      hubex::write_samples(sample_out);
      std::cerr << "wrote samples and manifest.json to " << sample_out << "\n";
    } else if (serve->parsed()) {
      hubex::SessionStore store;
      for (const auto& name : hubex::load_manifest(store, serve_manifest)) {
        auto ds = store.dataset(name);
        std::cerr << "loaded " << name << ": " << ds->graph().num_vertices() << " vertices, "
                  << ds->graph().num_edges() << " edges\n";
      }
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!hubex::serve(store, host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
      }
    }
  } catch (const hubex::QueryError& e) {
    std::cerr << "query error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
