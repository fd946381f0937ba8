#include "cli/cli.hpp"

#include "cli/run_config.hpp"

#include <tdacloud/tdacloud.hpp>
#include <tdacloud/parallel.hpp>
#include <tdacloud/text_format.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <ostream>
#include <sstream>

namespace tdacloud::cli {
namespace fs = std::filesystem;

namespace {

struct SharedFlags {
  std::optional<std::string> backend;
  std::optional<std::size_t> budget;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> downsample;
  bool no_normalize = false;
  std::optional<std::string> threads;
  std::string config;
  std::string out;
};

void add_shared(CLI::App* app, SharedFlags& f) {
  app->add_option("--backend", f.backend, "Filtration backend: alpha or rips");
  app->add_option("--budget,-b", f.budget, "ATOL vector length b");
  app->add_option("--seed", f.seed, "Random seed");
  app->add_option("--downsample", f.downsample, "Uniform downsampling target");
  app->add_flag("--no-normalize", f.no_normalize, "Skip zero-mean [-1,1] normalization");
  app->add_option("--threads", f.threads, "Worker threads (default: TDACLOUD_THREADS or all cores)");
  app->add_option("--config", f.config, "key=value configuration file");
  app->add_option("--out,-o", f.out, "Write output here instead of standard output");
}

ConfigOverrides flag_overrides(const SharedFlags& f) {
  ConfigOverrides o;
  if (f.backend) o.backend = parse_backend(*f.backend);
  o.budget = f.budget;
  o.seed = f.seed;
  o.downsample = f.downsample;
  if (f.no_normalize) o.normalize = false;
  if (f.threads) o.threads = parse_thread_count(*f.threads, "--threads");
  return o;
}

struct Resolved {
  RunConfig rc;
  ConfigOverrides flags;
  ConfigOverrides file;
};

Resolved resolve(const SharedFlags& f, const std::map<std::string, std::string>& env) {
  Resolved r;
  r.flags = flag_overrides(f);
  if (!f.config.empty()) r.file = load_config_file(f.config);
  r.rc = resolve_config(r.flags, r.file, env);
  return r;
}

// Query-side commands always run the index's own pipeline; explicitly
// requested values that disagree only produce a warning.
void warn_against_index(const DescriptorIndex& index, const Resolved& r, std::ostream& err) {
  PipelineConfig requested = index.config;
  auto take = [](auto& field, const auto& a, const auto& b) {
    if (a) field = *a;
    else if (b) field = *b;
  };
  take(requested.backend, r.flags.backend, r.file.backend);
  take(requested.budget, r.flags.budget, r.file.budget);
  take(requested.seed, r.flags.seed, r.file.seed);
  take(requested.downsample, r.flags.downsample, r.file.downsample);
  take(requested.normalize, r.flags.normalize, r.file.normalize);
  if (auto msg = fingerprint_mismatch(index, requested)) err << "warning: " << *msg << '\n';
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path), stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw DataError("cannot open output file '" + path + "'");
      stream_ = file_.get();
    }
  }
  std::ostream& stream() { return *stream_; }
  void finish() {
    stream_->flush();
    if (file_) {
      file_->close();
      if (!*file_) throw DataError("failed writing '" + path_ + "'");
    }
  }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::vector<fs::path> cloud_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ArgumentError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && format_from_extension(entry.path())) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<PointCloud> load_all(const std::vector<fs::path>& files) {
  std::vector<PointCloud> clouds;
  clouds.reserve(files.size());
  for (const auto& f : files) clouds.push_back(load_cloud(f));
  return clouds;
}

CloudFormat output_format(const fs::path& path, const std::optional<std::string>& forced) {
  if (forced) return parse_cloud_format(*forced);
  if (auto f = format_from_extension(path)) return *f;
  throw ArgumentError("cannot infer a cloud format from '" + path.string() + "'; pass --format");
}

void reject_same_file(const fs::path& in, const fs::path& out) {
  std::error_code ec;
  if (fs::exists(out, ec) && fs::equivalent(in, out, ec)) {
    throw ArgumentError("output '" + out.string() + "' would overwrite the input file");
  }
}

Point3 parse_vector3(std::string_view text, const std::string& key) {
  Point3 p;
  double* slots[3] = {&p.x, &p.y, &p.z};
  std::size_t i = 0;
  std::size_t start = 0;
  while (i < 3) {
    const auto comma = text.find(',', start);
    const auto token = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    if (!parse_double(token, *slots[i])) break;
    ++i;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (i != 3 || text.find(',', start) != std::string_view::npos) {
    throw ArgumentError(key + " expects three comma-separated numbers, got '" + std::string(text) + "'");
  }
  return p;
}

double parse_number(std::string_view text, const std::string& key) {
  double v = 0.0;
  if (!parse_double(text, v)) throw ArgumentError(key + " expects a number, got '" + std::string(text) + "'");
  return v;
}

// ---------------------------------------------------------------------------

int cmd_index(const std::string& db_dir, const std::string& index_file, const SharedFlags& f,
              const std::map<std::string, std::string>& env, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(f, env);
  const auto clouds = load_all(cloud_files(db_dir));
  const BuildResult built = build_index(clouds, r.rc.pipeline, r.rc.threads);
  save_index(built.index, index_file);

  Output o(f.out, out);
  auto& os = o.stream();
  os << "id,status,selected_dim,pairs,points,seconds,reason\n";
  std::size_t skipped = 0;
  for (const auto& rep : built.report) {
    skipped += rep.skipped ? 1 : 0;
    os << csv_field(rep.id) << ',' << (rep.skipped ? "skipped" : "ok") << ',' << rep.selected_dim << ','
       << rep.pair_count << ',' << rep.points_used << ',' << format_double(rep.seconds) << ','
       << csv_field(rep.reason) << '\n';
  }
  o.finish();
  err << "indexed " << built.index.entries.size() << " of " << clouds.size() << " clouds (" << skipped
      << " skipped) into " << index_file << '\n';
  return kExitOk;
}

int cmd_query(const std::string& index_file, const std::string& cloud_file, std::size_t top, const SharedFlags& f,
              const std::map<std::string, std::string>& env, std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(f, env);
  const DescriptorIndex index = load_index(index_file);
  warn_against_index(index, r, err);
  const PointCloud cloud = load_cloud(cloud_file);

  QueryTiming timing;
  const RetrievalResult result = query(index, cloud, top, &timing);

  Output o(f.out, out);
  auto& os = o.stream();
  os << "rank,id,distance\n";
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    os << (i + 1) << ',' << csv_field(result.ranked[i].id) << ',' << format_double(result.ranked[i].distance)
       << '\n';
  }
  o.finish();

  const double total = timing.persistence_seconds + timing.other_seconds;
  const double share = total > 0.0 ? 100.0 * timing.persistence_seconds / total : 0.0;
  std::ostringstream line;
  line.imbue(std::locale::classic());
  line.setf(std::ios::fixed);
  line.precision(6);
  line << "timing: persistence " << timing.persistence_seconds << " s, other " << timing.other_seconds
       << " s, total " << total;
  line.precision(1);
  line << " s, persistence share " << share << "%";
  err << line.str() << '\n';
  return kExitOk;
}

int cmd_perturb(const std::string& in, const std::string& outfile, const std::vector<std::string>& tokens,
                const SharedFlags& f, const std::map<std::string, std::string>& env, std::ostream& out) {
  const Resolved r = resolve(f, env);
  PerturbationSpec spec = parse_perturbation_tokens(tokens);
  const bool seed_token = std::any_of(tokens.begin(), tokens.end(), [](const std::string& t) {
    return t.rfind("seed=", 0) == 0;
  });
  if (!seed_token) {
    if (r.flags.seed) spec.seed = *r.flags.seed;
    else if (r.file.seed) spec.seed = *r.file.seed;
  }
  spec.validate();

  const auto format = format_from_extension(in);
  if (!format) throw ArgumentError("cannot infer a cloud format from '" + in + "'");
  reject_same_file(in, outfile);
  const PointCloud cloud = load_cloud(in, *format);
  save_cloud(apply_perturbation(cloud, spec), outfile, *format);

  Output o(f.out, out);
  o.stream() << spec.describe() << '\n';
  o.finish();
  return kExitOk;
}

int cmd_eval(const std::string& index_file, const std::string& query_dir, const std::string& gt_file,
             const std::string& n_text, const SharedFlags& f, const std::map<std::string, std::string>& env,
             std::ostream& out, std::ostream& err) {
  const Resolved r = resolve(f, env);
  const std::vector<std::size_t> ns = parse_n_list(n_text);
  const DescriptorIndex index = load_index(index_file);
  warn_against_index(index, r, err);

  const auto files = cloud_files(query_dir);
  if (files.empty()) throw ArgumentError("no query clouds found in '" + query_dir + "'");
  const std::size_t max_n = *std::max_element(ns.begin(), ns.end());
  if (max_n > index.entries.size()) {
    throw ArgumentError("N=" + std::to_string(max_n) + " exceeds the index size " +
                        std::to_string(index.entries.size()));
  }

  const GroundTruth gt = load_ground_truth(gt_file);
  std::vector<std::string> missing;
  std::vector<PointCloud> queries = load_all(files);
  for (const auto& q : queries) {
    if (!gt.contains(q.id)) missing.push_back(q.id);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw DataError("ground truth has no positives for queries: " + list);
  }
  validate_ground_truth(gt, index);

  const std::size_t top = std::max(max_n, top_percent_n(index.entries.size()));
  std::vector<RetrievalResult> results(queries.size());
  parallel_for(queries.size(), r.rc.threads, [&](std::size_t i) { results[i] = query(index, queries[i], top); });

  Output o(f.out, out);
  auto& os = o.stream();
  os << "N,recall\n";
  for (std::size_t n : ns) os << n << ',' << format_recall(recall_at_n(results, gt, n)) << '\n';
  os << "1%," << format_recall(recall_top_percent(results, gt)) << '\n';
  o.finish();
  return kExitOk;
}

int cmd_diagram(const std::string& cloud_file, const SharedFlags& f, const std::map<std::string, std::string>& env,
                std::ostream& out) {
  const Resolved r = resolve(f, env);
  const PointCloud cloud = load_cloud(cloud_file);
  const PointCloud prepared = prepare_cloud(cloud, r.rc.pipeline);
  const PersistenceSet pset = compute_persistence(build_filtration(prepared, r.rc.pipeline), 2);
  Output o(f.out, out);
  write_diagram_csv(o.stream(), pset);
  o.finish();
  return kExitOk;
}

int cmd_synth(const std::string& shape_name, const std::string& outfile, std::size_t n,
              const std::optional<std::string>& format, const ShapeParams& params, const SharedFlags& f,
              const std::map<std::string, std::string>& env, std::ostream& err) {
  const Resolved r = resolve(f, env);
  const ShapeKind shape = parse_shape_kind(shape_name);
  const CloudFormat fmt = output_format(outfile, format);
  const PointCloud cloud = synth_shape(shape, n, r.rc.pipeline.seed, params);
  save_cloud(cloud, outfile, fmt);
  err << "wrote " << cloud.size() << " points to " << outfile << '\n';
  return kExitOk;
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (const auto* te = dynamic_cast<const Error*>(&e)) {
    switch (te->kind()) {
      case ErrorKind::argument: return kExitArgument;
      case ErrorKind::data: return kExitData;
      case ErrorKind::resource: return kExitData;
      case ErrorKind::contract: return kExitContract;
    }
  }
  if (dynamic_cast<const CLI::ParseError*>(&e)) return kExitArgument;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kExitData;
  if (dynamic_cast<const std::bad_alloc*>(&e)) return kExitData;
  return kExitContract;
}

std::vector<std::size_t> parse_n_list(std::string_view text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start));
    unsigned long long lo = 0, hi = 0;
    const auto dots = item.find("..");
    bool ok = false;
    if (dots == std::string_view::npos) {
      ok = parse_uint(item, lo);
      hi = lo;
    } else {
      ok = parse_uint(trim(item.substr(0, dots)), lo) && parse_uint(trim(item.substr(dots + 2)), hi) && lo <= hi;
    }
    if (!ok || lo == 0) throw ArgumentError("invalid N list entry '" + std::string(item) + "'");
    if (hi - lo > 1000000) throw ArgumentError("N range '" + std::string(item) + "' is too long");
    for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<std::size_t>(v));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ArgumentError("empty N list");
  return out;
}

PerturbationSpec parse_perturbation_tokens(const std::vector<std::string>& tokens) {
  PerturbationSpec spec;
  bool have_kind = false;
  for (const auto& token : tokens) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ArgumentError("perturbation token '" + token + "' is not key=value");
    const std::string key = token.substr(0, eq);
    const std::string_view value = std::string_view(token).substr(eq + 1);
    if (key == "kind") {
      spec.kind = parse_perturbation_kind(value);
      have_kind = true;
    } else if (key == "fraction") {
      spec.fraction = parse_number(value, key);
    } else if (key == "sigma") {
      spec.sigma = parse_number(value, key);
    } else if (key == "factor") {
      spec.factor = parse_number(value, key);
    } else if (key == "degrees") {
      spec.degrees = parse_number(value, key);
    } else if (key == "offset") {
      spec.offset = parse_vector3(value, key);
    } else if (key == "axis") {
      spec.axis = parse_vector3(value, key);
    } else if (key == "seed") {
      unsigned long long s = 0;
      if (!parse_uint(value, s)) throw ArgumentError("seed expects a non-negative integer");
      spec.seed = s;
    } else {
      throw ArgumentError("unknown perturbation key '" + key + "'");
    }
  }
  if (!have_kind) throw ArgumentError("perturbation spec needs kind=jitter|scale|translate|rotate");
  return spec;
}

std::string format_recall(double value) {
  std::string s = format_double(value);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::map<std::string, std::string>& env) {
  CLI::App app{"Topological descriptors for point cloud recognition", "tdacloud"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tdacloud 0.1.0");

  SharedFlags f;

  std::string db_dir, index_file, cloud_file, in_file, out_file, query_dir, gt_file, shape;
  std::size_t top = 10;
  std::size_t n_points = 1000;
  std::string n_list = "1..25";
  std::vector<std::string> spec_tokens;
  std::optional<std::string> format;
  ShapeParams params;

  auto* index_cmd = app.add_subcommand("index", "Build a descriptor index from a directory of clouds");
  index_cmd->add_option("db_dir", db_dir, "Directory of .xyz/.ply/.bin clouds")->required();
  index_cmd->add_option("index_file", index_file, "Index file to write")->required();
  add_shared(index_cmd, f);

  auto* query_cmd = app.add_subcommand("query", "Rank the index against one query cloud");
  query_cmd->add_option("index_file", index_file, "Index file")->required();
  query_cmd->add_option("cloud", cloud_file, "Query cloud")->required();
  query_cmd->add_option("--top,-n", top, "Number of ranked rows")->check(CLI::PositiveNumber);
  add_shared(query_cmd, f);

  auto* perturb_cmd = app.add_subcommand("perturb", "Write a perturbed copy of a cloud");
  perturb_cmd->add_option("in", in_file, "Input cloud")->required();
  perturb_cmd->add_option("out_file", out_file, "Output cloud (same format as input)")->required();
  perturb_cmd->add_option("spec", spec_tokens, "kind=... plus fraction/sigma/factor/offset/axis/degrees/seed")
      ->required();
  add_shared(perturb_cmd, f);

  auto* eval_cmd = app.add_subcommand("eval", "Recall@N over a directory of queries");
  eval_cmd->add_option("index_file", index_file, "Index file")->required();
  eval_cmd->add_option("query_dir", query_dir, "Directory of query clouds")->required();
  eval_cmd->add_option("ground_truth", gt_file, "CSV query_id,positive_id")->required();
  eval_cmd->add_option("--n", n_list, "N values, e.g. 1,5,10 or 1..25");
  add_shared(eval_cmd, f);

  auto* diagram_cmd = app.add_subcommand("diagram", "Persistence diagram (dims 0-2) of one cloud");
  diagram_cmd->add_option("cloud", cloud_file, "Input cloud")->required();
  add_shared(diagram_cmd, f);

  auto* synth_cmd = app.add_subcommand("synth", "Sample a synthetic shape");
  synth_cmd->add_option("shape", shape, "sphere, torus, cube_corners or circle")->required();
  synth_cmd->add_option("out_file", out_file, "Cloud file to write")->required();
  synth_cmd->add_option("--points,-n", n_points, "Number of points")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--format", format, "xyz, ply or bin (default: from extension)");
  synth_cmd->add_option("--radius", params.radius, "Sphere or circle radius");
  synth_cmd->add_option("--major", params.major, "Torus major radius");
  synth_cmd->add_option("--minor", params.minor, "Torus minor radius");
  synth_cmd->add_option("--side", params.side, "Cube side length");
  add_shared(synth_cmd, f);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitArgument;
  }

  try {
    if (*index_cmd) return cmd_index(db_dir, index_file, f, env, out, err);
    if (*query_cmd) return cmd_query(index_file, cloud_file, top, f, env, out, err);
    if (*perturb_cmd) return cmd_perturb(in_file, out_file, spec_tokens, f, env, out);
    if (*eval_cmd) return cmd_eval(index_file, query_dir, gt_file, n_list, f, env, out, err);
    if (*diagram_cmd) return cmd_diagram(cloud_file, f, env, out);
    if (*synth_cmd) return cmd_synth(shape, out_file, n_points, format, params, f, env, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitArgument;
}

}  // namespace tdacloud::cli
