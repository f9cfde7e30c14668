// Copyright 2026 The shcell Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shcell/diagnostics.hpp"
#include "shcell/encoding_io.hpp"
#include "shcell/error.hpp"
#include "shcell/instance_pipeline.hpp"
#include "shcell/labels.hpp"
#include "shcell/metrics.hpp"
#include "shcell/run_config.hpp"
#include "shcell/sh_basis.hpp"
#include "shcell/shape_codec.hpp"
#include "shcell/sphere_sampling.hpp"
#include "shcell/synth_data.hpp"
#include "shcell/training_objectives.hpp"
#include "shcell/volume_io.hpp"

namespace shcell::cli {
namespace {

using nlohmann::json;

// Options shared by every subcommand. Values given on the command line beat
// the --config file, which beats the built-in defaults.
struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration overriding defaults")
        ->check(CLI::ExistingFile);
    seed_opt = sub->add_option("--seed", seed, "random seed (default 0)");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path, cfg);
    if (seed_opt && seed_opt->count()) cfg.seed = seed;
    return cfg;
  }
};

template <typename T>
void override_if_set(const CLI::Option* opt, T& field, const T& value) {
  if (opt && opt->count()) field = value;
}

Dims to_dims(const std::vector<std::size_t>& v) {
  if (v.size() != 3) throw InvalidArgument("extents need exactly three values");
  return {v[0], v[1], v[2]};
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  out << text;
  if (!out) throw InvalidArgument("failed writing " + path);
}

OrientationSet load_orientations(const std::string& path, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return read_orientations_csv(in, seed);
}

OrientationSet orientations_for(const std::string& csv, const RunConfig& cfg) {
  if (!csv.empty()) return load_orientations(csv, cfg.seed);
  return sample_orientations(cfg.n_orientations, cfg.seed);
}

// --- sample ---------------------------------------------------------------

struct SampleCmd {
  Common common;
  std::size_t n = 0;
  int iters = 200;
  std::string out;
  CLI::Option* n_opt = nullptr;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("sample", "Generate a repulsion-optimized orientation set");
    common.attach(sub);
    n_opt = sub->add_option("--n", n, "number of orientations (default 5000)");
    sub->add_option("--iters", iters, "maximum repulsion iterations")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out, "output CSV (theta,phi)")->required();
    sub->final_callback([this] { run(); });
  }

  void run() {
    RunConfig cfg = common.resolve();
    override_if_set(n_opt, cfg.n_orientations, n);
    RepulsionOptions opts;
    opts.max_iters = iters;
    const OrientationSet set = sample_orientations(cfg.n_orientations, cfg.seed, opts);
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot open " + out + " for writing");
    write_orientations_csv(set, f);
  }
};

// --- encode ---------------------------------------------------------------

struct EncodeCmd {
  Common common;
  std::string in, orient, out;
  int lmax = 5;
  CLI::Option* lmax_opt = nullptr;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("encode", "Encode every instance of a label volume");
    common.attach(sub);
    sub->add_option("--in", in, "label volume (.shv)")->required();
    sub->add_option("--orient", orient, "orientation CSV; sampled from --seed when omitted");
    lmax_opt = sub->add_option("--lmax", lmax, "maximum order (default 5)");
    sub->add_option("--out", out, "output encoding JSON")->required();
    sub->final_callback([this] { run(); });
  }

  void run() {
    RunConfig cfg = common.resolve();
    override_if_set(lmax_opt, cfg.l_max, lmax);
    cfg.validate();
    const LabelVolume labels = read_labels(in);
    const OrientationSet orientations = orientations_for(orient, cfg);
    const CoefficientSolver solver(build_basis_matrix(orientations, cfg.l_max));
    EncodingDocument doc;
    doc.l_max = cfg.l_max;
    doc.orientation_seed = cfg.seed;
    for (const auto& [id, box] : instance_boxes(labels)) {
      ShapeEncoding e;
      try {
        e = encode_instance(labels, id, orientations, solver);
      } catch (const DegenerateCentroid&) {
        const Voxel v = deepest_voxel(labels, id);
        warn("instance " + std::to_string(id) +
             ": centroid outside the shape, casting rays from its deepest voxel");
        e = encode_instance_about(labels, id,
                                  Eigen::Vector3d(static_cast<double>(v.x),
                                                  static_cast<double>(v.y),
                                                  static_cast<double>(v.z)),
                                  orientations, solver);
      }
      doc.instances.push_back({id, std::move(e)});
    }
    save_encodings(doc, out);
  }
};

// --- decode ---------------------------------------------------------------

struct DecodeCmd {
  Common common;
  std::string enc, out, mesh, orient;
  std::vector<std::size_t> dims;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("decode", "Voxelize (and optionally mesh) an encoding JSON");
    common.attach(sub);
    sub->add_option("--enc", enc, "encoding JSON")->required();
    sub->add_option("--dims", dims, "output extents X,Y,Z")->required()->delimiter(',')->expected(3);
    sub->add_option("--out", out, "output label volume (.shv)")->required();
    sub->add_option("--mesh", mesh, "also write a mesh (.stl or .off)");
    sub->add_option("--orient", orient, "orientation CSV for the mesh vertices");
    sub->final_callback([this] { run(); });
  }

  void run() {
    RunConfig cfg = common.resolve();
    const EncodingDocument doc = load_encodings(enc);
    std::vector<std::pair<Label, ShapeEncoding>> shapes;
    for (const auto& inst : doc.instances) shapes.emplace_back(inst.id, inst.encoding);
    write_labels(assemble_labels(shapes, to_dims(dims)), out);
    if (mesh.empty()) return;

    if (orient.empty()) cfg.seed = doc.orientation_seed;
    const OrientationSet orientations = orientations_for(orient, cfg);
    std::ofstream f(mesh, std::ios::binary | std::ios::trunc);
    if (!f) throw InvalidArgument("cannot open " + mesh + " for writing");
    const bool off = std::filesystem::path(mesh).extension() == ".off";
    TriangleMesh combined;
    for (const auto& [id, e] : shapes) {
      const TriangleMesh m = decode_to_mesh(e, orientations);
      if (!off) {
        write_stl(m, f, "instance_" + std::to_string(id));
        continue;
      }
      const int base = static_cast<int>(combined.vertices.size());
      combined.vertices.insert(combined.vertices.end(), m.vertices.begin(), m.vertices.end());
      for (const auto& t : m.faces) combined.faces.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
    if (off) write_off(combined, f);
  }
};

// --- distmap --------------------------------------------------------------

struct DistmapCmd {
  Common common;
  std::string in, out;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("distmap", "Relative boundary-distance target map");
    common.attach(sub);
    sub->add_option("--in", in, "label volume (.shv)")->required();
    sub->add_option("--out", out, "output float32 volume (.shv)")->required();
    sub->final_callback([this] { run(); });
  }

  void run() {
    common.resolve();
    write_scalar(compute_distance_map(read_labels(in)), out);
  }
};

// --- losses ---------------------------------------------------------------

struct LossesCmd {
  Common common;
  std::string dist_true, dist_pred, enc_true, enc_pred, out;
  double lambda_dist = 0.5, lambda_harm = 0.5;
  CLI::Option* ld_opt = nullptr;
  CLI::Option* lh_opt = nullptr;
  std::ostream* sink = nullptr;

  void attach(CLI::App& app, std::ostream& os) {
    sink = &os;
    auto* sub = app.add_subcommand("losses", "Evaluate the training losses on map files");
    common.attach(sub);
    sub->add_option("--dist-true", dist_true, "target distance map")->required();
    sub->add_option("--dist-pred", dist_pred, "predicted distance map")->required();
    sub->add_option("--enc-true", enc_true, "target encoding map")->required();
    sub->add_option("--enc-pred", enc_pred, "predicted encoding map")->required();
    ld_opt = sub->add_option("--lambda-dist", lambda_dist, "distance loss weight (default 0.5)");
    lh_opt = sub->add_option("--lambda-harm", lambda_harm, "encoding loss weight (default 0.5)");
    sub->add_option("--out", out, "also write the JSON record here");
    sub->final_callback([this] { run(); });
  }

  void run() {
    RunConfig cfg = common.resolve();
    override_if_set(ld_opt, cfg.lambda_dist, lambda_dist);
    override_if_set(lh_opt, cfg.lambda_harm, lambda_harm);
    cfg.validate();
    const LossReport r = loss_combined(read_scalar(dist_true), read_scalar(dist_pred),
                                       load_encoding_map(enc_true), load_encoding_map(enc_pred),
                                       {cfg.lambda_dist, cfg.lambda_harm});
    const json j = {{"loss_dist", round_significant9(r.loss_dist)},
                    {"loss_harm", round_significant9(r.loss_harm)},
                    {"loss_combined", round_significant9(r.loss_combined)}};
    const std::string text = j.dump() + "\n";
    *sink << text;
    if (!out.empty()) write_text(out, text);
  }
};

// --- simulate -------------------------------------------------------------

struct SimulateCmd {
  Common common;
  std::vector<std::size_t> dims{256, 128, 128};
  std::size_t cells = 30;
  std::vector<double> radius{8.0, 14.0};
  double perturbation = 0.15;
  double sep = 30.0;
  int lmax = 5;
  std::vector<double> psf{1.0, 1.0, 3.0};
  double noise = 0.1;
  std::string image, labels, enc;
  CLI::Option* lmax_opt = nullptr;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("simulate", "Generate a synthetic nuclei scene");
    common.attach(sub);
    sub->add_option("--dims", dims, "extents X,Y,Z")->delimiter(',')->expected(3)->capture_default_str();
    sub->add_option("--cells", cells, "target cell count")->capture_default_str();
    sub->add_option("--radius", radius, "mean radius range MIN,MAX")->delimiter(',')->expected(2)->capture_default_str();
    sub->add_option("--perturbation", perturbation, "relative higher-order amplitude")->capture_default_str();
    sub->add_option("--sep", sep, "minimum centroid separation")->capture_default_str();
    lmax_opt = sub->add_option("--lmax", lmax, "generation order (default from config, 5)");
    sub->add_option("--psf-sigma", psf, "Gaussian PSF sigma X,Y,Z (0,0,0 disables)")->delimiter(',')->expected(3)->capture_default_str();
    sub->add_option("--noise", noise, "additive Gaussian noise std")->capture_default_str();
    sub->add_option("--image", image, "output intensity volume (float32 .shv)")->required();
    sub->add_option("--labels", labels, "output label volume (.shv)")->required();
    sub->add_option("--enc", enc, "output ground-truth encoding JSON")->required();
    sub->final_callback([this] { run(); });
  }

  void run() {
    RunConfig cfg = common.resolve();
    override_if_set(lmax_opt, cfg.l_max, lmax);
    cfg.validate();
    PhantomSpec spec;
    spec.dims = to_dims(dims);
    spec.n_cells = cells;
    spec.r_min = radius.at(0);
    spec.r_max = radius.at(1);
    spec.perturbation = perturbation;
    spec.min_separation = sep;
    spec.l_max = cfg.l_max;
    spec.seed = cfg.seed;
    const ScenePair scene = generate_phantom(spec);
    ScalarVolume img = apply_psf(scene.intensity, Psf{{psf.at(0), psf.at(1), psf.at(2)}});
    // Independent stream for the noise so the scene does not depend on it.
    img = add_gaussian_noise(img, noise, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    write_scalar(img, image);
    write_labels(scene.labels, labels);
    EncodingDocument doc;
    doc.l_max = cfg.l_max;
    doc.orientation_seed = cfg.seed;
    for (const auto& [id, e] : scene.encodings) doc.instances.push_back({id, e});
    save_encodings(doc, enc);
  }
};

// --- oracle ---------------------------------------------------------------

struct OracleCmd {
  Common common;
  std::string labels, enc, out_dist, out_enc;
  int scale = 1;
  double noise = 0.0;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("oracle", "Ground-truth-derived prediction maps");
    common.attach(sub);
    sub->add_option("--labels", labels, "label volume (.shv)")->required();
    sub->add_option("--enc", enc, "per-instance encoding JSON")->required();
    sub->add_option("--scale", scale, "downsampling factor (1, 2, 4, 8)")->capture_default_str();
    sub->add_option("--noise", noise, "relative noise sigma")->capture_default_str();
    sub->add_option("--out-dist", out_dist, "output distance map (.shv)")->required();
    sub->add_option("--out-enc", out_enc, "output encoding map (multi-channel .shv)")->required();
    sub->final_callback([this] { run(); });
  }

  void run() {
    const RunConfig cfg = common.resolve();
    const PredictionMaps maps = make_oracle_predictions(
        read_labels(labels), load_encodings(enc).by_id(), scale, noise, cfg.seed);
    write_scalar(maps.distance, out_dist);
    save_encoding_map(maps.encodings, out_enc);
  }
};

// --- extract --------------------------------------------------------------

struct ExtractCmd {
  Common common;
  std::string dist, enc_map, out, out_enc;
  int scale = 1;
  double t_det = 0.5;
  int d_min = 10;
  std::vector<std::size_t> dims;
  CLI::Option* t_opt = nullptr;
  CLI::Option* d_opt = nullptr;

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("extract", "Instance segmentation from prediction maps");
    common.attach(sub);
    sub->add_option("--dist", dist, "distance map (.shv)")->required();
    sub->add_option("--enc-map", enc_map, "encoding map (multi-channel .shv)")->required();
    sub->add_option("--scale", scale, "map downsampling factor")->capture_default_str();
    sub->add_option("--dims", dims, "input extents X,Y,Z (default map extents x scale)")
        ->delimiter(',')->expected(3);
    t_opt = sub->add_option("--t-det", t_det, "peak threshold (default 0.5)");
    d_opt = sub->add_option("--d-min", d_min, "peak window half-width (default 10; 20 for meristem-like data)");
    sub->add_option("--out", out, "output label volume (.shv)")->required();
    sub->add_option("--out-enc", out_enc, "output encoding JSON");
    sub->final_callback([this] { run(); });
  }

  void run() {
    RunConfig cfg = common.resolve();
    override_if_set(t_opt, cfg.t_det, t_det);
    override_if_set(d_opt, cfg.d_min, d_min);
    cfg.validate();
    PredictionMaps maps;
    maps.distance = read_scalar(dist);
    maps.encodings = load_encoding_map(enc_map);
    maps.scale_factor = scale;
    maps.validate();
    const auto s = static_cast<std::size_t>(scale);
    const Dims d = maps.distance.dims();
    const Dims input = dims.empty() ? Dims{d.x * s, d.y * s, d.z * s} : to_dims(dims);
    const InstanceSegmentation seg =
        extract_instances(maps, input, DetectionParams{cfg.t_det, cfg.d_min});
    write_labels(seg.labels, out);
    if (out_enc.empty()) return;
    EncodingDocument doc;
    doc.l_max = order_for_count(maps.encodings.channels());
    doc.orientation_seed = cfg.seed;
    for (const auto& [id, e] : seg.encodings) doc.instances.push_back({id, e});
    save_encodings(doc, out_enc);
  }
};

// --- evaluate -------------------------------------------------------------

struct EvaluateCmd {
  Common common;
  std::string gt, pred, out;
  std::ostream* sink = nullptr;

  void attach(CLI::App& app, std::ostream& os) {
    sink = &os;
    auto* sub = app.add_subcommand("evaluate", "Averaged instance-level Dice");
    common.attach(sub);
    sub->add_option("--gt", gt, "ground-truth label volume")->required();
    sub->add_option("--pred", pred, "predicted label volume")->required();
    sub->add_option("--out", out, "also write the JSON record here");
    sub->final_callback([this] { run(); });
  }

  void run() {
    common.resolve();
    const EvaluationSummary s = evaluate_segmentation(read_labels(gt), read_labels(pred));
    const json j = {{"mean_dice", round_significant9(s.mean_dice)},
                    {"matched", s.matched},
                    {"missed", s.missed},
                    {"spurious", s.spurious}};
    const std::string text = j.dump() + "\n";
    *sink << text;
    if (!out.empty()) write_text(out, text);
  }
};

// --- tradeoff -------------------------------------------------------------

struct TradeoffCmd {
  Common common;
  std::string in, orient, out;
  std::vector<int> orders{0, 1, 2, 3, 4, 5, 6, 7};

  void attach(CLI::App& app) {
    auto* sub = app.add_subcommand("tradeoff", "Round-trip Dice versus coefficient count");
    common.attach(sub);
    sub->add_option("--in", in, "label volume (.shv)")->required();
    sub->add_option("--orders", orders, "orders to evaluate")->delimiter(',')->capture_default_str();
    sub->add_option("--orient", orient, "orientation CSV; sampled from --seed when omitted");
    sub->add_option("--out", out, "output CSV (R,mean_dice)")->required();
    sub->final_callback([this] { run(); });
  }

  void run() {
    const RunConfig cfg = common.resolve();
    const TradeoffCurve curve = tradeoff_curve(read_labels(in), orders, orientations_for(orient, cfg));
    if (curve.skipped_instances) {
      warn(std::to_string(curve.skipped_instances) + " instance(s) skipped: degenerate centroid");
    }
    std::string text = "R,mean_dice\n";
    for (const auto& p : curve.points) {
      text += std::to_string(p.coefficient_count) + "," + number(p.mean_dice) + "\n";
    }
    write_text(out, text);
  }
};

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spherical-harmonics shape encoding for 3D instance segmentation", "shcell"};
  app.require_subcommand(1);

  SampleCmd sample;
  EncodeCmd encode;
  DecodeCmd decode;
  DistmapCmd distmap;
  LossesCmd losses;
  SimulateCmd simulate;
  OracleCmd oracle;
  ExtractCmd extract;
  EvaluateCmd evaluate;
  TradeoffCmd tradeoff;
  sample.attach(app);
  encode.attach(app);
  decode.attach(app);
  distmap.attach(app);
  losses.attach(app, out);
  simulate.attach(app);
  oracle.attach(app);
  extract.attach(app);
  evaluate.attach(app, out);
  tradeoff.attach(app);

  auto old_sink = set_warning_sink([&err](std::string_view msg) { err << "warning: " << msg << '\n'; });
  struct Restore {
    WarningSink sink;
    ~Restore() { set_warning_sink(std::move(sink)); }
  } restore{std::move(old_sink)};

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const shcell::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

int cli_dispatch(int argc, const char* const* argv) {
  return cli_dispatch(argc, argv, std::cout, std::cerr);
}

}  // namespace shcell::cli
