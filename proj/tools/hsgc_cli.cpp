// Command-line front end: one subcommand per pipeline stage plus the
// end-to-end `pipeline` run.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "hsgc/config.hpp"
#include "hsgc/convert.hpp"
#include "hsgc/error.hpp"
#include "hsgc/parallel.hpp"
#include "hsgc/pipeline.hpp"
#include "hsgc/synth.hpp"

namespace {

using namespace hsgc;

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperspectral superpixel graph classification"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap on OpenMP worker threads (0 = runtime default)");

  PipelineConfig cfg;
  std::string superpixels = "auto";
  std::string h_value = "auto";
  std::string sigma_s = "auto";
  std::string sigma_l = "auto";

  // convert
  auto* convert = app.add_subcommand("convert", "Convert a headerless raw raster to HSC cube or CSV labels");
  std::string raw_in, convert_out, kind = "cube", dtype = "f32", interleave = "bsq", byte_order = "little";
  RawLayout layout;
  convert->add_option("--input", raw_in, "Raw raster")->required()->check(CLI::ExistingFile);
  convert->add_option("--output", convert_out, "HSC cube or label CSV")->required();
  convert->add_option("--kind", kind, "cube or labels")->check(CLI::IsMember({"cube", "labels"}));
  convert->add_option("--width", layout.width)->required();
  convert->add_option("--height", layout.height)->required();
  convert->add_option("--bands", layout.bands);
  convert->add_option("--dtype", dtype, "u8, i16, u16, i32, u32, f32, f64");
  convert->add_option("--interleave", interleave, "bsq, bil or bip");
  convert->add_option("--byte-order", byte_order, "little or big");
  convert->add_option("--offset", layout.header_offset, "Bytes to skip before the raster");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic cube and its ground truth");
  SynthSpec spec;
  std::string synth_cube, synth_truth, synth_render;
  synth->add_option("--width", spec.width);
  synth->add_option("--height", spec.height);
  synth->add_option("--bands", spec.bands);
  synth->add_option("--classes", spec.classes);
  synth->add_option("--sites", spec.region_seeds, "Voronoi sites");
  synth->add_option("--noise", spec.noise_sigma, "Gaussian noise standard deviation");
  synth->add_option("--seed", spec.rng_seed);
  synth->add_option("--cube", synth_cube)->required();
  synth->add_option("--truth", synth_truth)->required();
  synth->add_option("--render", synth_render, "Optional PPM of the ground truth");

  // pca
  auto* pca = app.add_subcommand("pca", "Reduce the spectral dimension with PCA");
  std::string pca_in, pca_out;
  pca->add_option("--cube", pca_in)->required()->check(CLI::ExistingFile);
  pca->add_option("--out", pca_out, "Reduced HSC cube")->required();
  pca->add_option("--variance-target", cfg.variance_target);
  pca->add_option("--max-bands", cfg.max_bands);

  // segment
  auto* seg_cmd = app.add_subcommand("segment", "Covariance superpixels on a reduced cube");
  std::string seg_in, seg_out, seg_overlay;
  seg_cmd->add_option("--cube", seg_in, "Reduced HSC cube")->required()->check(CLI::ExistingFile);
  seg_cmd->add_option("--out", seg_out, "Segmentation CSV")->required();
  seg_cmd->add_option("--overlay", seg_overlay, "Optional boundary PPM");
  seg_cmd->add_option("--cov-window", cfg.cov_window);
  seg_cmd->add_option("--cov-epsilon-scale", cfg.cov_epsilon_scale);
  seg_cmd->add_option("--superpixels", superpixels);
  seg_cmd->add_option("--compactness", cfg.compactness);
  seg_cmd->add_option("--max-iters", cfg.max_iters);
  seg_cmd->add_option("--seg-tol", cfg.seg_tol);
  seg_cmd->add_option("--density-lambda", cfg.density_lambda);
  seg_cmd->add_option("--density-gmin", cfg.density_gmin);
  seg_cmd->add_option("--density-smoothing", cfg.density_smoothing);

  // features
  auto* feat_cmd = app.add_subcommand("features", "Per-superpixel mean, weighted and position features");
  feat_cmd->set_help_flag("--help", "Print this help message and exit");
  std::string feat_cube, feat_seg, feat_out;
  feat_cmd->add_option("--cube", feat_cube, "Reduced HSC cube")->required()->check(CLI::ExistingFile);
  feat_cmd->add_option("--seg", feat_seg)->required()->check(CLI::ExistingFile);
  feat_cmd->add_option("--out", feat_out, "Features CSV")->required();
  feat_cmd->add_option("--h", h_value, "Neighbor weight bandwidth or 'auto'");

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "kNN similarity graph over superpixels");
  std::string graph_feat, graph_out;
  graph_cmd->add_option("--features", graph_feat)->required()->check(CLI::ExistingFile);
  graph_cmd->add_option("--out", graph_out, "Graph CSV (i,j,w)")->required();
  graph_cmd->add_option("--beta", cfg.beta);
  graph_cmd->add_option("--sigma-s", sigma_s);
  graph_cmd->add_option("--sigma-l", sigma_l);
  graph_cmd->add_option("--knn", cfg.knn);

  // classify
  auto* cls_cmd = app.add_subcommand("classify", "Propagate seed labels over the graph");
  std::string cls_seg, cls_graph, cls_seeds, cls_truth, cls_out, cls_f, cls_render;
  int classes = 0;
  cls_cmd->add_option("--seg", cls_seg)->required()->check(CLI::ExistingFile);
  cls_cmd->add_option("--graph", cls_graph)->required()->check(CLI::ExistingFile);
  auto* seeds_opt = cls_cmd->add_option("--seeds", cls_seeds, "Seed label CSV")->check(CLI::ExistingFile);
  auto* truth_opt = cls_cmd->add_option("--truth", cls_truth, "Draw seeds from this ground truth")->check(CLI::ExistingFile);
  seeds_opt->excludes(truth_opt);
  cls_cmd->add_option("--classes", classes, "Class count (default: largest seed/truth class)");
  cls_cmd->add_option("--labels-per-class", cfg.labels_per_class);
  cls_cmd->add_option("--rng-seed", cfg.rng_seed);
  cls_cmd->add_option("--alpha", cfg.alpha);
  cls_cmd->add_option("--tol", cfg.lgc_tol);
  cls_cmd->add_option("--max-iters", cfg.lgc_max_iters);
  cls_cmd->add_option("--out", cls_out, "Predicted label CSV")->required();
  cls_cmd->add_option("--f", cls_f, "Optional F matrix CSV");
  cls_cmd->add_option("--render", cls_render, "Optional classification PPM");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "OA, AA and kappa of a prediction");
  std::string ev_pred, ev_truth, ev_seeds, ev_out;
  eval_cmd->add_option("--pred", ev_pred)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--truth", ev_truth)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--seeds", ev_seeds, "Seed map excluded from evaluation")->check(CLI::ExistingFile);
  eval_cmd->add_flag("--include-seeds", cfg.include_seeds);
  eval_cmd->add_option("--out", ev_out, "Also write the report here");

  // render
  auto* render_cmd = app.add_subcommand("render", "Render a label CSV as a PPM image");
  std::string rd_labels, rd_seg, rd_out;
  render_cmd->add_option("--labels", rd_labels)->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--seg", rd_seg, "Overlay superpixel borders")->check(CLI::ExistingFile);
  render_cmd->add_option("--out", rd_out)->required();

  // pipeline
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage and evaluate over repeated trials");
  std::string pipe_config, pipe_cube, pipe_truth, pipe_out, sweep;
  std::vector<std::string> overrides;
  pipe_cmd->add_option("--config", pipe_config, "key = value configuration file")->check(CLI::ExistingFile);
  pipe_cmd->add_option("--cube", pipe_cube)->required()->check(CLI::ExistingFile);
  pipe_cmd->add_option("--truth", pipe_truth)->required()->check(CLI::ExistingFile);
  pipe_cmd->add_option("--out", pipe_out)->required();
  pipe_cmd->add_option("--set", overrides, "Override a configuration key: --set knn=10");
  pipe_cmd->add_option("--labels-sweep", sweep, "Comma list of labels per class, e.g. 3,7,10,20");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto resolve = [](const std::string& v) -> std::optional<double> {
      if (v == "auto") return std::nullopt;
      return std::stod(v);
    };
    if (superpixels != "auto") cfg.superpixels = std::stoi(superpixels);
    cfg.h = resolve(h_value);
    cfg.sigma_s = resolve(sigma_s);
    cfg.sigma_l = resolve(sigma_l);
    cfg.threads = threads;
    set_thread_count(threads);

    if (*convert) {
      layout.type = parse_sample_type(dtype);
      layout.interleave = parse_interleave(interleave);
      layout.order = parse_byte_order(byte_order);
      if (kind == "cube") {
        const HsiCube cube = convert_raw_cube(raw_in, layout);
        write_cube(cube, convert_out);
        std::cout << "wrote " << cube.width << "x" << cube.height << "x" << cube.bands << " cube\n";
      } else {
        write_label_map(convert_raw_labels(raw_in, layout), convert_out);
      }
    } else if (*synth) {
      const SynthData data = generate(spec);
      write_cube(data.cube, synth_cube);
      write_label_map(data.truth, synth_truth);
      if (!synth_render.empty()) render_class_map(data.truth, default_palette(), synth_render);
    } else if (*pca) {
      cfg.validate();
      const HsiCube cube = read_cube(pca_in);
      const PcaModel model = fit_pca(cube, cfg.variance_target, cfg.max_bands);
      write_cube(project(cube, model), pca_out);
      std::cout << "reduced_bands: " << model.reduced_bands() << "\nexplained_ratio: " << model.explained_ratio
                << '\n';
    } else if (*seg_cmd) {
      cfg.validate();
      const HsiCube reduced = read_cube(seg_in);
      const LogCovField field =
          build_log_cov_field(reduced, cfg.cov_window, default_epsilon(reduced, cfg.cov_epsilon_scale));
      const DensityField density =
          content_density(field, {cfg.density_lambda, cfg.density_gmin, cfg.density_smoothing});
      const SegResult result = segment(field, resolve_superpixels(cfg, reduced.pixel_count()), density,
                                       {cfg.compactness, cfg.max_iters, cfg.seg_tol});
      write_seg_map(result.seg, seg_out);
      if (!seg_overlay.empty()) {
        render_boundary_overlay(LabelMap(reduced.width, reduced.height), result.seg, default_palette(), seg_overlay);
      }
      std::cout << "superpixels: " << result.seg.count << "\niterations: " << result.iterations << '\n';
    } else if (*feat_cmd) {
      cfg.validate();
      const HsiCube reduced = read_cube(feat_cube);
      const SegMap seg = read_seg_map(feat_seg);
      const SuperpixelFeatures f = extract_features(reduced, seg, cfg.h);
      write_features_csv(f, feat_out);
      std::cout << "h: " << f.h << '\n';
    } else if (*graph_cmd) {
      cfg.validate();
      const SuperpixelFeatures f = read_features_csv(graph_feat);
      const SimilarityGraph g = build_graph(f, {cfg.beta, cfg.sigma_s, cfg.sigma_l, cfg.knn});
      if (g.degenerate) std::cerr << "warning: fewer than two superpixels, graph has no edges\n";
      write_graph_csv(g, graph_out);
      std::cout << "edges: " << g.edges.size() << "\nsigma_s: " << g.sigma_s << "\nsigma_l: " << g.sigma_l << '\n';
    } else if (*cls_cmd) {
      cfg.validate();
      const SegMap seg = read_seg_map(cls_seg);
      const SimilarityGraph g = read_graph_csv(cls_graph, seg.count);
      LabelMap seeds;
      if (!cls_seeds.empty()) {
        seeds = read_label_map(cls_seeds, seg.width, seg.height);
      } else if (!cls_truth.empty()) {
        const LabelMap truth = read_label_map(cls_truth, seg.width, seg.height);
        const SeedSample sample = sample_seeds(truth, cfg.labels_per_class, cfg.rng_seed);
        for (int c : sample.short_classes) std::cerr << "warning: class " << c << " fully seeded\n";
        seeds = sample.seeds;
        if (classes == 0) classes = truth.class_count();
      } else {
        throw ParameterError("cli", "classify needs --seeds or --truth");
      }
      if (classes == 0) classes = seeds.class_count();
      PropagationResult prop;
      const LabelMap pred = classify(cfg, seg, normalized_affinity(g), seeds, classes, nullptr, &prop);
      write_label_map(pred, cls_out);
      if (!cls_f.empty()) write_label_matrix_csv(prop.f, cls_f);
      if (!cls_render.empty()) render_class_map(pred, default_palette(), cls_render);
      if (!cls_truth.empty()) write_label_map(seeds, std::filesystem::path(cls_out).replace_extension(".seeds.csv"));
      std::cout << "iterations: " << prop.iterations << "\nconverged: " << (prop.converged ? "true" : "false")
                << '\n';
    } else if (*eval_cmd) {
      const LabelMap truth = read_label_map(ev_truth);
      const LabelMap pred = read_label_map(ev_pred, truth.width, truth.height);
      const LabelMap seeds =
          ev_seeds.empty() ? LabelMap(truth.width, truth.height) : read_label_map(ev_seeds, truth.width, truth.height);
      const EvalReport report = evaluate(pred, truth, seeds, cfg.include_seeds);
      write_report(report, std::cout);
      if (!ev_out.empty()) {
        std::ofstream out(ev_out);
        write_report(report, out);
      }
    } else if (*render_cmd) {
      const LabelMap labels = read_label_map(rd_labels);
      if (rd_seg.empty()) {
        render_class_map(labels, default_palette(), rd_out);
      } else {
        render_boundary_overlay(labels, read_seg_map(rd_seg), default_palette(), rd_out);
      }
    } else if (*pipe_cmd) {
      PipelineConfig config = pipe_config.empty() ? PipelineConfig{} : parse_config(pipe_config);
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("config", "--set expects key=value, got '" + kv + "'");
        apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (threads > 0) config.threads = threads;
      config.validate();

      if (sweep.empty()) {
        const PipelineRun run = run_pipeline(config, pipe_cube, pipe_truth, pipe_out);
        write_run_report(config, run, std::cout);
      } else {
        // Protocol sweep: one prepared scene, every label count, all trials.
        const HsiCube cube = read_cube(pipe_cube);
        const LabelMap truth = read_label_map(pipe_truth, cube.width, cube.height);
        set_thread_count(config.threads);
        const PreparedScene scene = prepare_scene(config, cube);
        std::filesystem::create_directories(pipe_out);
        std::ofstream csv(std::filesystem::path(pipe_out) / "sweep.csv");
        csv << "labels_per_class,trials,oa_mean,oa_std,aa_mean,aa_std,kappa_mean,kappa_std\n";
        for (int n : parse_int_list(sweep)) {
          PipelineConfig c = config;
          c.labels_per_class = n;
          std::vector<EvalReport> reports;
          for (int t = 0; t < c.trials; ++t) reports.push_back(run_trial(c, scene, truth, t).report);
          const TrialSummary s = summarize(reports);
          csv << n << ',' << s.trials << ',' << s.oa.mean << ',' << s.oa.std << ',' << s.aa.mean << ','
              << s.aa.std << ',' << s.kappa.mean << ',' << s.kappa.std << '\n';
          std::cout << "labels_per_class: " << n << '\n';
          write_summary(s, std::cout);
        }
      }
    }
  } catch (const hsgc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
