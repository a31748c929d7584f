// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "t2i/errors.hpp"

int main(int argc, char** argv) {
  using namespace t2i::cli;
  CLI::App app{"t2i-forge: data-constrained text-to-image training toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(T2I_FORGE_VERSION));

  GlobalOptions g;
  app.add_option("--config", g.config, "key = value run configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "run seed (u64)");
  app.add_option("--threads", g.threads, "OpenMP thread count");
  app.add_option("--set", g.set, "override a config key: --set key=value");

  ToyDatasetArgs toy;
  auto* toy_cmd = app.add_subcommand("toy-dataset", "write the built-in two-class 8x8 dataset");
  toy_cmd->add_option("--out", toy.out, "output directory")->required();
  toy_cmd->add_option("--n-per-class", toy.n_per_class, "images per class (>= 2)");

  CurateArgs cur;
  auto* cur_cmd = app.add_subcommand("curate", "curate CutMix images and caption them");
  cur_cmd->add_option("--manifest", cur.manifest, "input manifest");
  cur_cmd->add_option("--images-root", cur.images_root, "image root directory");
  cur_cmd->add_option("--setting", cur.setting, "half | quarter | ninth | sixteenth | all");
  cur_cmd->add_option("--count", cur.count, "number of curated images");
  cur_cmd->add_option("--out", cur.out, "output manifest (default: <images-root>/manifest.cutmix.jsonl)");
  cur_cmd->add_option("--captioner", cur.captioner, "stub | remote");

  CaptionArgs cap;
  auto* cap_cmd = app.add_subcommand("caption", "add generated captions to records that lack them");
  cap_cmd->add_option("--manifest", cap.manifest, "input manifest");
  cap_cmd->add_option("--images-root", cap.images_root, "image root directory");
  cap_cmd->add_option("--out", cap.out, "output manifest (default: overwrite input)");
  cap_cmd->add_option("--captioner", cap.captioner, "stub | remote");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "train the toy denoiser");
  tr_cmd->add_option("--manifest", tr.manifest, "training manifest");
  tr_cmd->add_option("--images-root", tr.images_root, "image root directory");
  tr_cmd->add_option("--out", tr.out, "checkpoint path");
  tr_cmd->add_option("--loss-csv", tr.loss_csv, "loss log (step,loss,n_aug)");
  tr_cmd->add_option("--augment", tr.augment, "none | cutmix | crop");
  tr_cmd->add_option("--steps", tr.steps, "SGD steps");
  tr_cmd->add_option("--batch", tr.batch, "batch size");
  tr_cmd->add_option("--learning-rate", tr.learning_rate, "SGD learning rate");
  tr_cmd->add_option("--tau", tr.tau, "gate threshold: no augmentation for t <= tau");
  tr_cmd->add_option("--aug-prob", tr.aug_prob, "augmentation probability above tau");
  tr_cmd->add_option("--crop-prob", tr.crop_prob, "crop probability (crop branch, ungated)");
  tr_cmd->add_option("--uncond-drop", tr.uncond_drop, "null-caption probability");
  tr_cmd->add_option("--hidden", tr.hidden, "denoiser hidden width");

  SampleArgs sa;
  auto* sa_cmd = app.add_subcommand("sample", "ancestral sampling with classifier-free guidance");
  sa_cmd->add_option("--checkpoint", sa.checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  sa_cmd->add_option("--caption", sa.caption, "text condition")->required();
  sa_cmd->add_option("--count", sa.count, "number of images");
  sa_cmd->add_option("--guidance", sa.guidance, "guidance scale w >= 0");
  sa_cmd->add_option("--out", sa.out, "output directory");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "FID / PRDC / paired cosine on feature files");
  ev_cmd->add_option("--real", ev.real, "real features (FEAT)")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--fake", ev.fake, "generated features (FEAT)")->required()->check(CLI::ExistingFile);
  ev_cmd->add_option("--image-feats", ev.image_feats, "paired image features")->check(CLI::ExistingFile);
  ev_cmd->add_option("--text-feats", ev.text_feats, "paired text features")->check(CLI::ExistingFile);
  ev_cmd->add_option("--k", ev.k, "PRDC neighbour count");
  ev_cmd->add_option("--out", ev.out, "write metrics JSON here instead of stdout");

  AblateArgs ab;
  auto* ab_cmd = app.add_subcommand("ablate", "sweep tau, aug_prob or the CutMix setting on the toy dataset");
  ab_cmd->add_option("--axis", ab.axis, "tau | aug_prob | pattern")->required();
  ab_cmd->add_option("--grid", ab.grid, "comma-separated grid (default: the standard sweep)");
  ab_cmd->add_option("--steps", ab.steps, "SGD steps per grid point");
  ab_cmd->add_option("--batch", ab.batch, "batch size");
  ab_cmd->add_option("--toy-per-class", ab.toy_per_class, "toy training images per class");
  ab_cmd->add_option("--cutmix-count", ab.cutmix_count, "curated CutMix images per grid point");
  ab_cmd->add_option("--out", ab.out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (toy_cmd->parsed()) return cmd_toy_dataset(g, toy);
    if (cur_cmd->parsed()) return cmd_curate(g, cur);
    if (cap_cmd->parsed()) return cmd_caption(g, cap);
    if (tr_cmd->parsed()) return cmd_train(g, tr);
    if (sa_cmd->parsed()) return cmd_sample(g, sa);
    if (ev_cmd->parsed()) return cmd_eval(g, ev);
    if (ab_cmd->parsed()) return cmd_ablate(g, ab);
  } catch (const t2i::Error& e) {
    std::cerr << "t2i-forge: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "t2i-forge: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
