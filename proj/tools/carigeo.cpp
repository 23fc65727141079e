// carigeo: command-line front end for the caricature geometry pipeline.
//
// Exit codes: 0 success, 1 usage or invalid parameter, 2 missing or malformed
// input, 3 numerical failure or degenerate geometry.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "carigeo/carigeo.hpp"
#include "carigeo/png_io.hpp"

namespace fs = std::filesystem;
using namespace carigeo;

namespace {

enum Exit { kOk = 0, kUsage = 1, kBadInput = 2, kNumerical = 3 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return kUsage;
    case ErrorKind::EmptyInput:
    case ErrorKind::Parse:
    case ErrorKind::Io: return kBadInput;
    case ErrorKind::DegenerateGeometry:
    case ErrorKind::NumericalFailure: return kNumerical;
  }
  return kNumerical;
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw Error(ErrorKind::Io, std::string(what) + " not found: " + p.string());
}

void require_dir(const fs::path& p, const char* what) {
  if (!fs::is_directory(p)) throw Error(ErrorKind::Io, std::string(what) + " not found: " + p.string());
}

void require_output(const fs::path& p) {
  const fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
  if (!fs::is_directory(parent)) throw Error(ErrorKind::Io, "output directory does not exist: " + parent.string());
}

std::vector<int> parse_widths(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const int w = std::stoi(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(w);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidParameter, "bad layer width list '" + text + "'");
    }
  }
  return out;
}

struct Dataset {
  std::vector<LandmarkSet> photos;
  std::vector<LandmarkSet> caris;
};

Dataset load_dataset(const fs::path& dir) {
  require_dir(dir / "photos", "photo directory");
  require_dir(dir / "caris", "caricature directory");
  Dataset d{load_landmark_dir(dir / "photos"), load_landmark_dir(dir / "caris")};
  if (d.photos.empty() || d.caris.empty()) throw Error(ErrorKind::EmptyInput, "dataset has no landmark files: " + dir.string());
  return d;
}

void save_lmk(const LandmarkSet& l, const fs::path& p) { save_landmarks(l, p, LmkPrecision::Canonical9); }

// ---------------------------------------------------------------------------
// Subcommands

struct SynthArgs {
  fs::path out;
  SynthConfig cfg;
};

int run_synth(const SynthArgs& a) {
  a.cfg.validate();
  write_dataset(a.out, a.cfg, LmkPrecision::Canonical9,
                [](const ImageBuffer& img, const fs::path& p) { write_png(img, p); });
  std::cerr << "wrote " << a.cfg.n_photos << " photos and " << a.cfg.n_caris << " caricatures to " << a.out << "\n";
  return kOk;
}

struct FitPcaArgs {
  fs::path data, out;
  int k = 32;
  std::optional<double> variance;
};

int run_fit_pca(const FitPcaArgs& a) {
  require_output(a.out);
  const Dataset d = load_dataset(a.data);
  const AlignedDomains aligned = align_domains(d.photos, d.caris);
  const PcaModel pca = fit_joint_pca(aligned, a.k, a.variance);
  save_pca(pca, a.out);
  std::cerr << "k = " << pca.k() << ", explained variance " << explained_variance_fraction(pca) << "\n";
  return kOk;
}

struct TrainArgs {
  fs::path data, pca, out, report;
  TrainConfig cfg;
  std::string generator_hidden = "256,256,256";
  std::string discriminator_hidden = "256,256";
  int log_every = 10;
};

int run_train(TrainArgs a) {
  require_file(a.pca, "PCA model");
  require_output(a.out);
  if (!a.report.empty()) require_output(a.report);
  a.cfg.generator_hidden = parse_widths(a.generator_hidden);
  a.cfg.discriminator_hidden = parse_widths(a.discriminator_hidden);
  a.cfg.validate();
  const PcaModel pca = load_pca(a.pca);
  const Dataset d = load_dataset(a.data);
  const AnchorTriple target = anchor_points(mean_landmarks(pca));
  const auto photos = project_all(pca, align_all(d.photos, target));
  const auto caris = project_all(pca, align_all(d.caris, target));

  const TrainResult r = train(photos, caris, a.cfg, [&](int epoch, const EpochLosses& l) {
    if (a.log_every > 0 && ((epoch + 1) % a.log_every == 0 || epoch + 1 == a.cfg.epochs)) {
      std::cerr << "epoch " << epoch + 1 << "/" << a.cfg.epochs << "  adv_x " << l.adv_x << "  adv_y " << l.adv_y
                << "  cyc " << l.cyc << "  cha " << l.cha_x + l.cha_y << "  total " << l.total << "\n";
    }
  });
  save_model({r.model, a.cfg, a.cfg.epochs}, a.out);
  if (!a.report.empty()) write_file_atomic(a.report, loss_report_csv(r.report));
  return kOk;
}

struct ModelArgs {
  fs::path model, pca;
};

struct Loaded {
  ModelCheckpoint ckpt;
  PcaModel pca;
};

Loaded load_models(const ModelArgs& a) {
  require_file(a.model, "model checkpoint");
  require_file(a.pca, "PCA model");
  Loaded l{load_model(a.model), load_pca(a.pca)};
  if (l.ckpt.model.k() != l.pca.k()) {
    throw Error(ErrorKind::Parse, "model expects " + std::to_string(l.ckpt.model.k()) + " coefficients, PCA has " +
                                      std::to_string(l.pca.k()));
  }
  return l;
}

struct ExaggerateArgs {
  ModelArgs m;
  fs::path in, out;
  double alpha = 1.0;
};

int run_exaggerate(const ExaggerateArgs& a) {
  if (!(a.alpha >= 0.0 && a.alpha <= 2.0)) throw Error(ErrorKind::InvalidParameter, "alpha must be in [0, 2]");
  require_file(a.in, "input landmarks");
  require_output(a.out);
  const Loaded l = load_models(a.m);
  const LandmarkSet lx = load_landmarks(a.in);
  save_lmk(exaggerate_unaligned(l.ckpt.model, l.pca, lx, a.alpha), a.out);
  return kOk;
}

struct ReverseArgs {
  ModelArgs m;
  fs::path in, out;
};

int run_reverse(const ReverseArgs& a) {
  require_file(a.in, "input landmarks");
  require_output(a.out);
  const Loaded l = load_models(a.m);
  save_lmk(reverse_unaligned(l.ckpt.model, l.pca, load_landmarks(a.in)), a.out);
  return kOk;
}

struct WarpArgs {
  fs::path image, src, dst, out;
  WarpOptions opt;
};

int run_warp(const WarpArgs& a) {
  require_file(a.image, "image");
  require_file(a.src, "source landmarks");
  require_file(a.dst, "destination landmarks");
  require_output(a.out);
  const ImageBuffer img = read_png(a.image);
  write_png(warp_image(img, load_landmarks(a.src), load_landmarks(a.dst), a.opt), a.out);
  return kOk;
}

struct IntermediateArgs {
  ModelArgs m;
  fs::path image, lmk, out, out_lmk;
  WarpOptions opt;
};

int run_build_intermediate(const IntermediateArgs& a) {
  require_file(a.image, "caricature image");
  require_file(a.lmk, "caricature landmarks");
  require_output(a.out);
  if (!a.out_lmk.empty()) require_output(a.out_lmk);
  const Loaded l = load_models(a.m);
  const ImageBuffer img = read_png(a.image);
  const LandmarkSet ly = load_landmarks(a.lmk);
  const LandmarkSet target = reverse_unaligned(l.ckpt.model, l.pca, ly);
  write_png(warp_image(img, ly, target, a.opt), a.out);
  if (!a.out_lmk.empty()) save_lmk(target, a.out_lmk);
  return kOk;
}

struct EvalArgs {
  ModelArgs m;
  fs::path data;
};

int run_eval(const EvalArgs& a) {
  const Loaded l = load_models(a.m);
  const Dataset d = load_dataset(a.data);
  const AnchorTriple target = anchor_points(mean_landmarks(l.pca));
  const EvalReport r = eval_model(l.ckpt.model, l.pca, align_all(d.photos, target), align_all(d.caris, target));
  nlohmann::ordered_json j;
  j["photos"] = r.photos;
  j["caris"] = r.caris;
  j["cycle_l1_x"] = r.cycle_l1_x;
  j["cycle_l1_y"] = r.cycle_l1_y;
  j["deviation_l1_x"] = r.deviation_l1_x;
  j["deviation_l1_y"] = r.deviation_l1_y;
  j["cycle_ratio_x"] = r.cycle_ratio_x;
  j["characteristic_cos_xy"] = r.characteristic_cos_xy;
  j["characteristic_cos_yx"] = r.characteristic_cos_yx;
  j["collapse_ratio"] = r.collapse_ratio;
  j["collapse_ratio_reverse"] = r.collapse_ratio_reverse;
  j["d_x_real"] = r.d_x_real;
  j["d_x_fake"] = r.d_x_fake;
  j["d_y_real"] = r.d_y_real;
  j["d_y_fake"] = r.d_y_fake;
  j["mean_deviation_in_px"] = r.mean_deviation_in_px;
  j["mean_deviation_out_px"] = r.mean_deviation_out_px;
  j["exaggerated_fraction"] = r.exaggerated_fraction;
  j["alpha_monotone_fraction"] = r.alpha_monotone_fraction;
  std::cout << j.dump(2) << "\n";
  return kOk;
}

struct BaselineArgs {
  fs::path pca, in, out;
  double factor = 2.0;
};

int run_baseline(const BaselineArgs& a) {
  require_file(a.pca, "PCA model");
  require_file(a.in, "input landmarks");
  require_output(a.out);
  const PcaModel pca = load_pca(a.pca);
  const LandmarkSet l = load_landmarks(a.in);
  const LandmarkSet mean = mean_landmarks(pca);
  save_lmk(in_mean_frame(pca, l, [&](const LandmarkSet& x) { return baseline_amplify(x, mean, a.factor); }), a.out);
  return kOk;
}

struct GradcheckArgs {
  std::uint64_t seed = 0;
  int cases = 20;
  double step = 1e-5;
  double tolerance = 1e-4;
};

int run_gradcheck_cmd(const GradcheckArgs& a) {
  if (a.cases < 1) throw Error(ErrorKind::InvalidParameter, "cases must be >= 1");
  if (!(a.step > 0.0)) throw Error(ErrorKind::InvalidParameter, "step must be > 0");
  const GradCheckReport r = run_gradcheck(a.seed, a.cases, a.step);
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["step"] = r.step;
  j["tolerance"] = a.tolerance;
  j["max_rel_error"] = r.max_rel_error;
  j["pass"] = r.max_rel_error < a.tolerance;
  j["seconds"] = r.seconds;
  auto& cases = j["cases"] = nlohmann::ordered_json::array();
  for (const auto& c : r.cases) {
    cases.push_back({{"loss", to_string(c.loss)},
                     {"k", c.k},
                     {"generator_depth", c.generator_depth},
                     {"discriminator_depth", c.discriminator_depth},
                     {"batch", c.batch},
                     {"checked", c.checked},
                     {"skipped", c.skipped},
                     {"max_rel_error", c.max_rel_error}});
  }
  std::cout << j.dump(2) << "\n";
  return r.max_rel_error < a.tolerance ? kOk : kNumerical;
}

// ---------------------------------------------------------------------------
// Config file: `key = value` lines, `#` comments. Entries become `--key=value`
// arguments placed ahead of the command line, so explicit flags win.

std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
  require_file(path, "config file");
  std::ifstream in(path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError(path.string(), n, "expected 'key = value'");
    std::string key(detail::trim(t.substr(0, eq)));
    const std::string value(detail::trim(t.substr(eq + 1)));
    if (key.empty()) throw ParseError(path.string(), n, "empty key");
    std::replace(key.begin(), key.end(), '_', '-');
    out.emplace_back(std::move(key), value);
  }
  return out;
}

std::optional<std::string> find_config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Caricature geometry toolkit: synthetic data, shape PCA, geometry translation, warping"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "carigeo 1.0");

  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Read defaults from a key = value file; flags override it");
  };
  auto add_models = [](CLI::App* sub, ModelArgs& m) {
    sub->add_option("--model", m.model, "Geometry model checkpoint (JSON)")->required();
    sub->add_option("--pca", m.pca, "PCA model (JSON)")->required();
  };
  auto add_warp = [](CLI::App* sub, WarpOptions& o) {
    sub->add_option("--lambda", o.lambda, "Spline regularization (0 interpolates)")->capture_default_str();
    sub->add_flag("--pin-corners", o.pin_corners, "Hold the image corners fixed");
    sub->add_option("--threads", o.threads, "Worker threads for resampling")->capture_default_str();
  };

  SynthArgs synth;
  auto* s_synth = app.add_subcommand("synth", "Generate a synthetic photo/caricature landmark dataset");
  add_config(s_synth);
  s_synth->add_option("--out", synth.out, "Output dataset directory")->required();
  s_synth->add_option("--n-photos", synth.cfg.n_photos, "Number of photo-domain shapes")->capture_default_str();
  s_synth->add_option("--n-caris", synth.cfg.n_caris, "Number of caricature-domain shapes")->capture_default_str();
  s_synth->add_option("--seed", synth.cfg.seed, "Random seed (falls back to CARIGEO_SEED)")->capture_default_str();
  s_synth->add_option("--variation-scale", synth.cfg.variation_scale, "Shape variation as a fraction of face size")
      ->capture_default_str();
  s_synth->add_option("--gamma-min", synth.cfg.gamma_min, "Lower bound of the exaggeration factor")->capture_default_str();
  s_synth->add_option("--gamma-max", synth.cfg.gamma_max, "Upper bound of the exaggeration factor")->capture_default_str();
  s_synth->add_option("--jitter", synth.cfg.jitter, "Caricature point jitter as a fraction of the variation")
      ->capture_default_str();
  s_synth->add_flag("--render", synth.cfg.render, "Also write a rendered PNG per shape");

  FitPcaArgs fit;
  auto* s_fit = app.add_subcommand("fit-pca", "Align a dataset and fit the joint shape PCA");
  add_config(s_fit);
  s_fit->add_option("--data", fit.data, "Dataset directory with photos/ and caris/")->required();
  s_fit->add_option("--out", fit.out, "Output PCA model (JSON)")->required();
  s_fit->add_option("--k", fit.k, "Number of components (upper bound with --variance)")->capture_default_str();
  s_fit->add_option("--variance", fit.variance, "Pick the smallest k explaining this variance fraction");

  TrainArgs tr;
  auto* s_train = app.add_subcommand("train", "Train the geometry translator on PCA shape vectors");
  add_config(s_train);
  s_train->add_option("--data", tr.data, "Dataset directory with photos/ and caris/")->required();
  s_train->add_option("--pca", tr.pca, "PCA model (JSON)")->required();
  s_train->add_option("--out", tr.out, "Output model checkpoint (JSON)")->required();
  s_train->add_option("--report", tr.report, "Write per-epoch losses as CSV");
  s_train->add_option("--epochs", tr.cfg.epochs, "Training epochs")->capture_default_str();
  s_train->add_option("--seed", tr.cfg.seed, "Random seed (falls back to CARIGEO_SEED)")->capture_default_str();
  s_train->add_option("--lambda-cyc", tr.cfg.lambda_cyc, "Cycle loss weight")->capture_default_str();
  s_train->add_option("--lambda-cha", tr.cfg.lambda_cha, "Characteristic loss weight")->capture_default_str();
  s_train->add_option("--lr", tr.cfg.learning_rate, "Adam learning rate")->capture_default_str();
  s_train->add_option("--batch-size", tr.cfg.batch_size, "Samples per update")->capture_default_str();
  s_train->add_option("--beta1", tr.cfg.adam_beta1, "Adam first-moment decay")->capture_default_str();
  s_train->add_option("--beta2", tr.cfg.adam_beta2, "Adam second-moment decay")->capture_default_str();
  s_train->add_option("--adam-eps", tr.cfg.adam_eps, "Adam denominator epsilon")->capture_default_str();
  s_train->add_option("--replay-buffer", tr.cfg.replay_buffer_size, "Fake pool size for critic updates (0 disables)")
      ->capture_default_str();
  s_train->add_flag("--linear-decay", tr.cfg.linear_decay, "Decay the learning rate to 0 over the second half");
  s_train->add_option("--generator-hidden", tr.generator_hidden, "Generator hidden widths, comma separated")
      ->capture_default_str();
  s_train->add_option("--discriminator-hidden", tr.discriminator_hidden,
                      "Discriminator hidden widths, comma separated")
      ->capture_default_str();
  s_train->add_option("--log-every", tr.log_every, "Print losses every N epochs (0 is quiet)")->capture_default_str();

  ExaggerateArgs ex;
  auto* s_ex = app.add_subcommand("exaggerate", "Exaggerate photo landmarks into caricature landmarks");
  add_config(s_ex);
  add_models(s_ex, ex.m);
  s_ex->add_option("--in", ex.in, "Photo landmarks (.lmk)")->required();
  s_ex->add_option("--out", ex.out, "Output caricature landmarks (.lmk)")->required();
  s_ex->add_option("--alpha", ex.alpha, "Exaggeration extent in [0, 2]; 1 is the model output")->capture_default_str();

  WarpArgs wp;
  auto* s_warp = app.add_subcommand("warp", "Warp an image so that src landmarks move to dst landmarks");
  add_config(s_warp);
  s_warp->add_option("--image", wp.image, "Input PNG")->required();
  s_warp->add_option("--src", wp.src, "Landmarks on the input image (.lmk)")->required();
  s_warp->add_option("--dst", wp.dst, "Target landmark positions (.lmk)")->required();
  s_warp->add_option("--out", wp.out, "Output PNG")->required();
  add_warp(s_warp, wp.opt);

  IntermediateArgs im;
  auto* s_im = app.add_subcommand("build-intermediate", "Warp a caricature image onto its photo-like geometry");
  add_config(s_im);
  add_models(s_im, im.m);
  s_im->add_option("--image", im.image, "Caricature PNG")->required();
  s_im->add_option("--lmk", im.lmk, "Caricature landmarks (.lmk)")->required();
  s_im->add_option("--out", im.out, "Output PNG")->required();
  s_im->add_option("--out-lmk", im.out_lmk, "Also write the target landmarks (.lmk)");
  add_warp(s_im, im.opt);

  ReverseArgs rv;
  auto* s_rev = app.add_subcommand("reverse", "Map caricature landmarks back to photo-like landmarks");
  add_config(s_rev);
  add_models(s_rev, rv.m);
  s_rev->add_option("--in", rv.in, "Caricature landmarks (.lmk)")->required();
  s_rev->add_option("--out", rv.out, "Output photo landmarks (.lmk)")->required();

  EvalArgs ev;
  auto* s_eval = app.add_subcommand("eval", "Evaluate a model on a held-out dataset; JSON report on stdout");
  add_config(s_eval);
  add_models(s_eval, ev.m);
  s_eval->add_option("--data", ev.data, "Dataset directory with photos/ and caris/")->required();

  BaselineArgs bl;
  auto* s_bl = app.add_subcommand("baseline", "Amplify differences from the mean face");
  add_config(s_bl);
  s_bl->add_option("--pca", bl.pca, "PCA model providing the mean face")->required();
  s_bl->add_option("--in", bl.in, "Input landmarks (.lmk)")->required();
  s_bl->add_option("--out", bl.out, "Output landmarks (.lmk)")->required();
  s_bl->add_option("--factor", bl.factor, "Amplification factor")->capture_default_str();

  GradcheckArgs gc;
  auto* s_gc = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients; JSON on stdout");
  add_config(s_gc);
  s_gc->add_option("--seed", gc.seed, "Random seed (falls back to CARIGEO_SEED)")->capture_default_str();
  s_gc->add_option("--cases", gc.cases, "Number of random cases")->capture_default_str();
  s_gc->add_option("--step", gc.step, "Central difference step")->capture_default_str();
  s_gc->add_option("--tolerance", gc.tolerance, "Largest accepted relative error")->capture_default_str();

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // Subcommand name is the first bare word; defaults are spliced in after it.
    const auto sub_it = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
    CLI::App* sub = nullptr;
    if (sub_it != args.end()) {
      for (CLI::App* s : app.get_subcommands({})) {
        if (s->get_name() == *sub_it) sub = s;
      }
    }
    if (sub != nullptr) {
      std::vector<std::string> defaults;
      if (const char* env = std::getenv("CARIGEO_SEED"); env != nullptr && sub->get_option_no_throw("--seed") != nullptr) {
        defaults.push_back(std::string("--seed=") + env);
      }
      if (const auto cfg = find_config_arg(args)) {
        for (const auto& [key, value] : read_config(*cfg)) {
          if (key == "config") throw Error(ErrorKind::InvalidParameter, "config files cannot include other config files");
          if (sub->get_option_no_throw("--" + key) != nullptr) {
            defaults.push_back("--" + key + "=" + value);
            continue;
          }
          const auto subs = app.get_subcommands({});
          const bool known = std::any_of(subs.begin(), subs.end(),
                                         [&](CLI::App* s) { return s->get_option_no_throw("--" + key) != nullptr; });
          if (!known) throw Error(ErrorKind::InvalidParameter, "unknown config key '" + key + "' in " + *cfg);
        }
      }
      args.insert(sub_it + 1, defaults.begin(), defaults.end());
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "carigeo: " << e.what() << "\n";
    return exit_code(e.kind());
  }

  try {
    if (*s_synth) return run_synth(synth);
    if (*s_fit) return run_fit_pca(fit);
    if (*s_train) return run_train(tr);
    if (*s_ex) return run_exaggerate(ex);
    if (*s_warp) return run_warp(wp);
    if (*s_im) return run_build_intermediate(im);
    if (*s_rev) return run_reverse(rv);
    if (*s_eval) return run_eval(ev);
    if (*s_bl) return run_baseline(bl);
    if (*s_gc) return run_gradcheck_cmd(gc);
  } catch (const Error& e) {
    std::cerr << "carigeo: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "carigeo: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::exception& e) {
    std::cerr << "carigeo: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
