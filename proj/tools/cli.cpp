#include "cli.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "gsim/error.hpp"
#include "gsim/graphio.hpp"
#include "gsim/ingest.hpp"
#include "gsim/netops.hpp"
#include "gsim/semnet.hpp"
#include "gsim/simcore.hpp"
#include "gsim/synthetic.hpp"
#include "json.hpp"

namespace gsim::cli {
namespace {

using json = nlohmann::ordered_json;

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

// Runs `write` against the named file, or against `fallback` when path is empty.
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  auto f = open_out(path);
  write(f);
  close_out(f, path);
}

SemanticNetwork load_network(const std::string& path) {
  auto in = open_in(path);
  return read_network(in, network_format_for_path(path));
}

void save_network(const std::string& path, const SemanticNetwork& net, const PipelineConfig& cfg) {
  auto f = open_out(path);
  write_network(f, net, parse_network_format(cfg.format));
  close_out(f, path);
}

char delimiter_of(const std::string& d) {
  if (d == "tab" || d == "\\t" || d == "\t") return '\t';
  if (d.size() == 1) return d[0];
  throw std::invalid_argument("delimiter must be a single character or 'tab'");
}

struct Manifest {
  std::string command;
  std::vector<std::string> outputs;
};

void write_manifest(const PipelineConfig& cfg, const Manifest& m) {
  std::string path = cfg.manifest;
  if (path.empty()) {
    if (cfg.output.empty() || cfg.output == "-") return;
    path = cfg.output + ".manifest.json";
  }
  json j;
  j["tool"] = "gsim";
  j["version"] = kToolVersion;
  j["command"] = m.command;
  json c;
  c["top_k"] = cfg.top_k;
  c["tau"] = cfg.tau;
  c["tolerance"] = cfg.tolerance;
  c["max_iterations"] = cfg.max_iterations;
  c["workers"] = cfg.workers;
  c["format"] = cfg.format;
  c["phi_precision"] = cfg.phi_precision;
  c["delimiter"] = cfg.delimiter;
  c["skip_header"] = cfg.skip_header;
  c["seed"] = cfg.seed;
  j["config"] = c;
  json inputs = json::array();
  for (const auto& p : cfg.inputs) inputs.push_back({{"path", p}, {"sha256", file_sha256(p)}});
  j["inputs"] = inputs;
  json outputs = json::array();
  for (const auto& p : m.outputs) {
    json o = {{"path", p}};
    if (!p.empty() && p != "-") o["sha256"] = file_sha256(p);
    outputs.push_back(o);
  }
  j["outputs"] = outputs;
  auto f = open_out(path);
  f << j.dump(2) << '\n';
  close_out(f, path);
}

int cmd_ingest(const PipelineConfig& cfg, const std::string& report_path, std::ostream& out) {
  DelimiterConfig fmt{delimiter_of(cfg.delimiter), cfg.skip_header};
  auto in = open_in(cfg.inputs.at(0));
  auto pairs = parse_pairs(in, fmt, cfg.inputs[0]);
  auto kept = top_k_attributes(pairs, cfg.top_k);
  auto built = build_incidence(kept);
  auto f = open_out(cfg.output);
  write_pairs(f, built.matrix.to_pairs(cfg.inputs[0]));
  close_out(f, cfg.output);
  const std::string report = report_path.empty() ? cfg.output + ".drops.txt" : report_path;
  emit(report, out, [&](std::ostream& o) { o << format_drop_report(built.dropped); });
  out << "incidence " << built.matrix.actors() << " actors x " << built.matrix.attributes()
      << " attributes, " << built.dropped.size() << " rows/columns dropped\n";
  write_manifest(cfg, {"ingest", {cfg.output, report}});
  return kOk;
}

int cmd_similarity(const PipelineConfig& cfg, const std::string& phi_path,
                   const std::string& report_path, std::ostream& out) {
  auto in = open_in(cfg.inputs.at(0));
  auto built = build_incidence(parse_pairs(in, {}, cfg.inputs[0]));
  if (!built.dropped.empty())
    throw ValidationError("incidence artifact has constant rows/columns; rerun ingest");
  const auto views = center(built.matrix);

  FixedPointOptions opt;
  opt.tolerance = cfg.tolerance;
  opt.max_iterations = cfg.max_iterations;
  opt.workers = cfg.workers;
  if (cfg.phi_precision == "f32")
    opt.phi_precision = Precision::f32;
  else if (cfg.phi_precision != "f64")
    throw std::invalid_argument("--phi-precision must be f64 or f32");
  auto res = run_fixed_point(views, opt);

  {
    auto f = open_out(cfg.output, true);
    write_gsim(f, res.theta);
    close_out(f, cfg.output);
  }
  std::vector<std::string> outputs{cfg.output};
  if (!phi_path.empty()) {
    auto f = open_out(phi_path, true);
    write_gsim(f, res.phi);
    close_out(f, phi_path);
    outputs.push_back(phi_path);
  }
  json r;
  r["iterations"] = res.report.iterations;
  r["terminated_by"] = std::string(to_string(res.report.terminated_by));
  r["tolerance"] = res.report.tolerance;
  r["theta_deltas"] = res.report.theta_deltas;
  r["phi_deltas"] = res.report.phi_deltas;
  const std::string rp = report_path.empty() ? cfg.output + ".convergence.json" : report_path;
  emit(rp, out, [&](std::ostream& o) { o << r.dump(2) << '\n'; });
  outputs.push_back(rp);
  out << "similarity: " << res.report.iterations << " iterations, terminated by "
      << to_string(res.report.terminated_by) << '\n';
  write_manifest(cfg, {"similarity", outputs});
  return kOk;
}

SimilarityMatrix load_matrix(const std::string& path) {
  auto in = open_in(path, true);
  return read_gsim(in);
}

int cmd_threshold(const PipelineConfig& cfg) {
  auto net = threshold_network(load_matrix(cfg.inputs.at(0)), cfg.tau);
  save_network(cfg.output, net, cfg);
  write_manifest(cfg, {"threshold", {cfg.output}});
  return kOk;
}

int cmd_combine(const PipelineConfig& cfg, bool intersection) {
  auto a = load_network(cfg.inputs.at(0));
  auto b = load_network(cfg.inputs.at(1));
  auto net = intersection ? intersect(a, b) : subtract(a, b);
  save_network(cfg.output, net, cfg);
  write_manifest(cfg, {intersection ? "intersect" : "subtract", {cfg.output}});
  return kOk;
}

int cmd_stats(const PipelineConfig& cfg, std::ostream& out) {
  const auto s = stats(load_network(cfg.inputs.at(0)));
  emit(cfg.output, out, [&](std::ostream& o) { o << stats_json(s); });
  write_manifest(cfg, {"stats", {cfg.output}});
  return kOk;
}

int cmd_export(const PipelineConfig& cfg, std::ostream& out) {
  const auto& in = cfg.inputs.at(0);
  if (in.size() >= 5 && in.substr(in.size() - 5) == ".gsim") {
    const auto m = load_matrix(in);
    emit(cfg.output, out, [&](std::ostream& o) { write_matrix_csv(o, m); });
  } else {
    const auto net = load_network(in);
    emit(cfg.output, out,
         [&](std::ostream& o) { write_network(o, net, parse_network_format(cfg.format)); });
  }
  write_manifest(cfg, {"export", {cfg.output}});
  return kOk;
}

int cmd_degrees(const PipelineConfig& cfg, std::ostream& out) {
  const auto d = degree_report(load_network(cfg.inputs.at(0)));
  emit(cfg.output, out, [&](std::ostream& o) { write_degree_csv(o, d); });
  write_manifest(cfg, {"degrees", {cfg.output}});
  return kOk;
}

int cmd_bridges(const PipelineConfig& cfg, std::ostream& out) {
  const auto net = load_network(cfg.inputs.at(0));
  auto pin = open_in(cfg.inputs.at(1));
  const auto b = bridge_report(net, read_partition(pin));
  emit(cfg.output, out, [&](std::ostream& o) { write_bridge_csv(o, b); });
  write_manifest(cfg, {"bridges", {cfg.output}});
  return kOk;
}

int cmd_generate(const PipelineConfig& cfg, const PlantedBlocks& base, const std::string& truth) {
  PlantedBlocks spec = base;
  spec.seed = cfg.seed;
  const auto data = generate_planted(spec);
  {
    auto f = open_out(cfg.output);
    write_pairs(f, data.pairs);
    close_out(f, cfg.output);
  }
  std::vector<std::string> outputs{cfg.output};
  if (!truth.empty()) {
    std::vector<std::pair<std::string, std::size_t>> rows(data.attribute_block.begin(),
                                                         data.attribute_block.end());
    std::sort(rows.begin(), rows.end());
    auto f = open_out(truth);
    f << "label,cluster\n";
    for (const auto& [label, block] : rows) f << label << ",block" << block << '\n';
    close_out(f, truth);
    outputs.push_back(truth);
  }
  write_manifest(cfg, {"generate", outputs});
  return kOk;
}

}  // namespace

std::string file_sha256(const std::string& path) {
  auto in = open_in(path, true);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 unavailable");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{md[i]};
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  CLI::App app{"gsim: generalized similarity semantic networks from two-mode data", "gsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  auto add_manifest = [&](CLI::App* sub) {
    sub->add_option("--manifest", cfg.manifest, "Run manifest path (default <output>.manifest.json)");
  };
  std::vector<CLI::Option*> format_options;
  auto add_format = [&](CLI::App* sub) {
    format_options.push_back(
        sub->add_option("--format", cfg.format, "Network output format (default: by output extension)")
            ->check(CLI::IsMember({"gexf", "edgelist"})));
  };
  std::string input_a, input_b, report_path, phi_path, truth_path;

  auto* ingest = app.add_subcommand("ingest", "Build the incidence artifact from actor,attribute pairs");
  ingest->add_option("pairs", input_a, "Pair file")->required();
  ingest->add_option("-o,--output", cfg.output, "Incidence artifact (CSV pair list)")->required();
  ingest->add_option("--report", report_path, "Drop report (default <output>.drops.txt)");
  ingest->add_option("--top-k", cfg.top_k, "Most frequent attributes kept")
      ->check(CLI::PositiveNumber)->capture_default_str();
  ingest->add_option("--delimiter", cfg.delimiter, "Field delimiter (character or 'tab')")
      ->capture_default_str();
  ingest->add_flag("--skip-header", cfg.skip_header, "Ignore the first line");
  add_manifest(ingest);

  auto* similarity = app.add_subcommand("similarity", "Generalized similarity fixed point");
  similarity->add_option("incidence", input_a, "Incidence artifact from ingest")->required();
  similarity->add_option("-o,--theta", cfg.output, "Attribute similarity output (GSIM)")->required();
  similarity->add_option("--phi", phi_path, "Actor similarity output (GSIM)");
  similarity->add_option("--report", report_path, "Convergence report (default <theta>.convergence.json)");
  similarity->add_option("--tolerance", cfg.tolerance, "Max-abs change to stop at")
      ->check(CLI::PositiveNumber)->capture_default_str();
  similarity->add_option("--max-iterations", cfg.max_iterations, "Iteration cap")
      ->check(CLI::PositiveNumber)->capture_default_str();
  similarity->add_option("--workers", cfg.workers, "Worker threads (0: all cores)")->capture_default_str();
  similarity->add_option("--phi-precision", cfg.phi_precision, "Actor matrix storage")
      ->check(CLI::IsMember({"f64", "f32"}))->capture_default_str();
  add_manifest(similarity);

  auto* threshold = app.add_subcommand("threshold", "Semantic network of similarities >= tau");
  threshold->add_option("theta", input_a, "Attribute similarity (GSIM)")->required();
  threshold->add_option("-o,--output", cfg.output, "Network file")->required();
  threshold->add_option("--tau", cfg.tau, "Similarity threshold in (0,1)")->capture_default_str();
  add_format(threshold);
  add_manifest(threshold);

  CLI::App* combine[2];
  const char* combine_names[2] = {"intersect", "subtract"};
  const char* combine_help[2] = {"Fuzzy intersection min(a, b) of two networks",
                                 "Fuzzy difference min(a, 1 - b) of two networks"};
  for (int i = 0; i < 2; ++i) {
    combine[i] = app.add_subcommand(combine_names[i], combine_help[i]);
    combine[i]->add_option("a", input_a, "First network")->required();
    combine[i]->add_option("b", input_b, "Second network")->required();
    combine[i]->add_option("-o,--output", cfg.output, "Network file")->required();
    add_format(combine[i]);
    add_manifest(combine[i]);
  }

  auto* stats_cmd = app.add_subcommand("stats", "Network statistics as JSON");
  stats_cmd->add_option("network", input_a, "Network file")->required();
  stats_cmd->add_option("-o,--output", cfg.output, "JSON output (default stdout)");
  add_manifest(stats_cmd);

  auto* export_cmd = app.add_subcommand("export", "Convert a network, or a GSIM matrix to CSV");
  export_cmd->add_option("input", input_a, "Network or .gsim file")->required();
  export_cmd->add_option("-o,--output", cfg.output, "Output (default stdout)");
  add_format(export_cmd);
  add_manifest(export_cmd);

  auto* degrees = app.add_subcommand("degrees", "Per-node degree and strength");
  degrees->add_option("network", input_a, "Network file")->required();
  degrees->add_option("-o,--output", cfg.output, "CSV output (default stdout)");
  add_manifest(degrees);

  auto* bridges = app.add_subcommand("bridges", "Nodes adjacent to two or more clusters");
  bridges->add_option("network", input_a, "Network file")->required();
  bridges->add_option("--partition", input_b, "CSV label,cluster")->required();
  bridges->add_option("-o,--output", cfg.output, "CSV output (default stdout)");
  add_manifest(bridges);

  PlantedBlocks planted;
  auto* generate = app.add_subcommand("generate", "Synthetic pairs with planted blocks");
  generate->add_option("-o,--output", cfg.output, "Pair file")->required();
  generate->add_option("--seed", cfg.seed, "Generator seed")->capture_default_str();
  generate->add_option("--actors", planted.actors)->capture_default_str();
  generate->add_option("--attributes", planted.attributes)->capture_default_str();
  generate->add_option("--blocks", planted.blocks)->capture_default_str();
  generate->add_option("--p-in", planted.p_in)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  generate->add_option("--p-out", planted.p_out)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  generate->add_option("--truth", truth_path, "Planted attribute blocks as a partition file");
  add_manifest(generate);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion& e) {
    out << kToolVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "gsim: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (!input_a.empty()) cfg.inputs.push_back(input_a);
    if (!input_b.empty()) cfg.inputs.push_back(input_b);
    const bool format_given = std::any_of(format_options.begin(), format_options.end(),
                                          [](const CLI::Option* o) { return o->count() > 0; });
    if (!format_given && network_format_for_path(cfg.output) == NetworkFormat::gexf) cfg.format = "gexf";
    if (*ingest) return cmd_ingest(cfg, report_path, out);
    if (*similarity) return cmd_similarity(cfg, phi_path, report_path, out);
    if (*threshold) return cmd_threshold(cfg);
    if (*combine[0]) return cmd_combine(cfg, true);
    if (*combine[1]) return cmd_combine(cfg, false);
    if (*stats_cmd) return cmd_stats(cfg, out);
    if (*export_cmd) return cmd_export(cfg, out);
    if (*degrees) return cmd_degrees(cfg, out);
    if (*bridges) return cmd_bridges(cfg, out);
    if (*generate) return cmd_generate(cfg, planted, truth_path);
  } catch (const NumericError& e) {
    err << "gsim: numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    err << "gsim: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "gsim: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace gsim::cli
