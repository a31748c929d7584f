// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

// Drives the built t2i-forge binary end to end.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "t2i/checkpoint.hpp"
#include "t2i/feature_io.hpp"
#include "t2i/manifest.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "t2i_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const auto out_file = workdir() / "stdout.txt";
  const std::string cmd = "cd '" + workdir().string() + "' && '" T2I_FORGE_BIN "' " + args + " > '" +
                          out_file.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream f(out_file);
  std::stringstream ss;
  ss << f.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(workdir() / p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("toy, curate, caption") {
  auto r = run("--seed 3 toy-dataset --out toy --n-per-class 50");
  REQUIRE(r.code == 0);
  const auto m = t2i::read_manifest(workdir() / "toy/manifest.jsonl");
  CHECK(m.records.size() == 100);

  r = run("--seed 5 curate --manifest toy/manifest.jsonl --setting all --count 400 --out cm.jsonl");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("half 100\nquarter 100\nninth 100\nsixteenth 100\n") != std::string::npos);

  r = run("--seed 5 curate --manifest toy/manifest.jsonl --setting half --count 10 --out half_a.jsonl");
  REQUIRE(r.code == 0);
  r = run("--seed 5 curate --manifest toy/manifest.jsonl --setting half --count 10 --out half_b.jsonl");
  REQUIRE(r.code == 0);
  CHECK(slurp("half_a.jsonl") == slurp("half_b.jsonl"));
  const auto half = t2i::read_manifest(workdir() / "half_a.jsonl");
  std::size_t n = 0;
  for (const auto& rec : half.records) {
    if (rec.source != t2i::ImageSource::CutMix) continue;
    ++n;
    CHECK(*half.find(rec.provenance->base_id)->class_label != *half.find(*rec.provenance->donor_id)->class_label);
  }
  CHECK(n == 10);
  std::size_t cm_captions = 0;
  for (const auto& c : half.captions) cm_captions += c.kind == t2i::CaptionKind::CutMixTA;
  CHECK(cm_captions == 10);

  r = run("caption --manifest half_a.jsonl --images-root toy --out recaptioned.jsonl");
  CHECK(r.code == 0);
  CHECK(slurp("recaptioned.jsonl") == slurp("half_a.jsonl"));
}

TEST_CASE("train, sample") {
  REQUIRE(fs::exists(workdir() / "toy/manifest.jsonl"));
  auto r = run("--seed 8 train --manifest toy/manifest.jsonl --steps 0 --hidden 16 --out zero.ckpt");
  REQUIRE(r.code == 0);
  const auto zero = t2i::read_checkpoint(workdir() / "zero.ckpt");
  t2i::DenoiserShape shape;
  shape.hidden = 16;
  const auto init = t2i::Denoiser::initialize(shape, 8);
  REQUIRE(zero.denoiser.params().size() == init.params().size());
  for (std::size_t i = 0; i < init.params().size(); ++i)
    CHECK(zero.denoiser.params()[i] == double(float(init.params()[i])));
  CHECK(slurp("zero.loss.csv") == "step,loss,n_aug\n");

  r = run("--seed 8 train --manifest cm.jsonl --images-root toy --augment cutmix --steps 20 --batch 8 --hidden 16 "
          "--learning-rate 0.05 --out cm.ckpt --loss-csv cm_loss.csv");
  REQUIRE(r.code == 0);
  const auto csv = slurp("cm_loss.csv");
  CHECK(csv.rfind("step,loss,n_aug\n0,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);

  r = run("--seed 2 sample --checkpoint cm.ckpt --caption 'An image of disk' --count 2 --out s1");
  REQUIRE(r.code == 0);
  r = run("--seed 2 sample --checkpoint cm.ckpt --caption 'An image of disk' --count 2 --out s2");
  REQUIRE(r.code == 0);
  CHECK(slurp("s1/sample-0000.png") == slurp("s2/sample-0000.png"));
  CHECK(slurp("s1/sample-0001.png") == slurp("s2/sample-0001.png"));
  CHECK(slurp("s1/sample-0000.png") != slurp("s1/sample-0001.png"));

  std::ofstream(workdir() / "run.cfg") << "steps = 3\nbatch = 4\nhidden = 8\naugment = crop\n";
  r = run("--config run.cfg train --manifest toy/manifest.jsonl --out crop.ckpt");
  CHECK(r.code == 0);
}

TEST_CASE("eval") {
  t2i::FeatureSet f(40, 3);
  for (std::size_t i = 0; i < f.data.size(); ++i) f.data[i] = std::sin(double(i) * 1.7) + double(i % 7);
  t2i::write_features(workdir() / "a.feat", f);
  auto r = run("eval --real a.feat --fake a.feat --out m.json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp("m.json"));
  CHECK(j.size() == 6);
  CHECK(j["fid"].get<double>() <= 1e-6);
  CHECK(j["precision"].get<double>() == 1.0);
  CHECK(j["recall"].get<double>() == 1.0);
  CHECK(j["coverage"].get<double>() == 1.0);
  CHECK(j["paired_cosine"].is_null());

  r = run("eval --real a.feat --fake a.feat --image-feats a.feat --text-feats a.feat --k 2");
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["paired_cosine"].get<double>() == doctest::Approx(100.0));
}

TEST_CASE("exit codes") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("eval --real missing.feat --fake missing.feat").code == 1);
  CHECK(run("-s 3 toy-dataset --out x").code == 1);  // long-form flags only
  std::ofstream(workdir() / "bad.cfg") << "warp_speed = 9\n";
  CHECK(run("--config bad.cfg toy-dataset --out x").code == 1);
  CHECK(run("curate --manifest toy/manifest.jsonl --setting third --count 4").code == 1);

  t2i::FeatureSet nan_set(3, 1, {0.0, NAN, 1.0});
  t2i::write_features(workdir() / "nan.feat", nan_set);
  CHECK(run("eval --real nan.feat --fake nan.feat --k 1").code == 2);
  CHECK(run("train --manifest toy/manifest.jsonl --steps 20 --batch 4 --hidden 8 --learning-rate 1e30 --out boom.ckpt").code == 2);

  std::ofstream(workdir() / "garbage.ckpt") << "nope";
  CHECK(run("sample --checkpoint garbage.ckpt --caption x").code == 1);
}

TEST_CASE("ablate") {
  auto r = run("--seed 1 ablate --axis tau --grid 300,600 --steps 20 --batch 16 --toy-per-class 4 --cutmix-count 8 "
               "--out tau.csv");
  REQUIRE(r.code == 0);
  const auto csv = slurp("tau.csv");
  CHECK(csv.rfind("axis,value,status,final_loss,holdout_loss,slots,n_aug,aug_fraction,expected_aug_fraction,"
                  "n_half,n_quarter,n_ninth,n_sixteenth,error\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);

  r = run("ablate --axis aug_prob --grid 0.5,2 --steps 5 --batch 4 --toy-per-class 4 --cutmix-count 4 --out bad.csv");
  CHECK(r.code == 2);
  CHECK(slurp("bad.csv").find(",failed,") != std::string::npos);
  CHECK(run("ablate --axis colour").code == 1);
}

TEST_CASE("remote captioner needs an endpoint") {
  ::unsetenv("T2I_FORGE_CAPTION_URL");
  CHECK(run("caption --manifest toy/manifest.jsonl --captioner remote --out r.jsonl").code == 1);
  CHECK(run("caption --manifest toy/manifest.jsonl --captioner psychic --out r.jsonl").code == 1);
}
