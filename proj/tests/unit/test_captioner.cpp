// Copyright (C) 2026 t2i-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <set>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "t2i/captioner.hpp"
#include "t2i/errors.hpp"

using namespace t2i;

namespace {

// Local HTTP endpoint. The first `fail_first` requests get `fail_status`
// (or a dropped connection when fail_status == 0).
class MockCaptioner {
 public:
  MockCaptioner(int fail_first, int fail_status) : fail_first_(fail_first), fail_status_(fail_status) {
    server_.Post("/v1/caption", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = ++calls_;
      last_body_ = req.body;
      if (n <= fail_first_) {
        res.status = fail_status_ == 0 ? 503 : fail_status_;
        res.set_content("busy", "text/plain");
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      const std::string prompt = body.at("prompt");
      res.set_content(nlohmann::json{{"caption", prompt == kPlainPrompt ? "a dog" : "a dog next to a car"}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockCaptioner() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int calls() const { return calls_; }
  std::string last_body() const { return last_body_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  int fail_first_;
  int fail_status_;
  std::string last_body_;
};

const std::vector<std::uint8_t> kBytes = {0x89, 'P', 'N', 'G', 0, 1, 2};

CaptionerEndpoint endpoint(const std::string& url, int retries) {
  CaptionerEndpoint e;
  e.base_url = url;
  e.max_retries = retries;
  e.timeout_s = 5.0;
  e.backoff_s = 0.005;
  return e;
}

ImageRecord labelled(std::string id, std::string label) {
  ImageRecord r;
  r.id = std::move(id);
  r.path = r.id + ".png";
  r.width = r.height = 16;
  r.class_label = std::move(label);
  return r;
}

}  // namespace

TEST_CASE("aio template") {
  CHECK(aio_caption("golden retriever") == "An image of golden retriever");
  CHECK(aio_caption("hourglass") == "An image of hourglass");
  CHECK_THROWS_AS(aio_caption(""), ArgumentError);
  CHECK(aio_caption("ab") != aio_caption("a"));
}

TEST_CASE("prompts are byte exact") {
  CHECK(prompt_for(ImageSource::Original).text == "Describe this image");
  CHECK(prompt_for(ImageSource::Crop).text == "Describe this image");
  CHECK(prompt_for(ImageSource::Original).target == PromptTarget::Plain);
  const auto cm = prompt_for(ImageSource::CutMix);
  CHECK(cm.target == PromptTarget::CutMix);
  CHECK(cm.text ==
        "Describe this image. Consider all the objects in the picture. Describe them, describe their position and "
        "their relation. Do not consider the image as a composite of images. The image is a single scene image");
}

TEST_CASE("stub captions") {
  CHECK(stub_colors().size() == 16);
  CHECK(stub_relations().size() == 16);

  const auto dog = labelled("d1", "dog");
  CHECK(stub_caption(dog, 3) == stub_caption(dog, 3));
  CHECK(stub_caption(dog, 3).find("dog") != std::string::npos);

  ImageRecord cm = labelled("cm1", "dog");
  cm.source = ImageSource::CutMix;
  cm.provenance = AugmentationProvenance{"d1", std::string("c1"), CutMixPattern::Quarter, Placement{0, 0, 8, 8}, 1};
  const LabelIndex labels{{"d1", "dog"}, {"c1", "car"}};
  const auto text = stub_caption(cm, 11, labels);
  CHECK(text.find("dog") != std::string::npos);
  CHECK(text.find("car") != std::string::npos);

  ImageRecord bare;
  bare.id = "x";
  CHECK_THROWS_AS(stub_caption(bare, 0), ArgumentError);
}

TEST_CASE("adjacent seeds change the words") {
  // Three independent draws from 16-word lists: a repeat of all three has
  // probability 16^-3, so differing captions should be close to 1 - 1/4096.
  const double expected = 1.0 - 1.0 / 4096.0;
  int differ = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const auto r = labelled("rec" + std::to_string(i), "dog");
    differ += stub_caption(r, 100) != stub_caption(r, 101);
  }
  CHECK(double(differ) / n >= 0.9);
  CHECK(double(differ) / n == doctest::Approx(expected).epsilon(0.005));
}

TEST_CASE("remote pass-through and request body") {
  MockCaptioner mock(0, 0);
  CHECK(remote_caption(endpoint(mock.url(), 0), kBytes, prompt_for(ImageSource::Original)) == "a dog");
  const auto body = nlohmann::json::parse(mock.last_body());
  CHECK(body["prompt"] == "Describe this image");
  CHECK(body["image_b64"] == "iVBORwABAg==");
  CHECK(remote_caption(endpoint(mock.url(), 0), kBytes, prompt_for(ImageSource::CutMix)) == "a dog next to a car");
}

TEST_CASE("remote retries then succeeds") {
  MockCaptioner mock(2, 500);
  CHECK(remote_caption(endpoint(mock.url(), 3), kBytes, prompt_for(ImageSource::Original)) == "a dog");
  CHECK(mock.calls() == 3);
}

TEST_CASE("remote gives up with the endpoint status") {
  MockCaptioner mock(1000, 500);
  try {
    remote_caption(endpoint(mock.url(), 2), kBytes, prompt_for(ImageSource::Original));
    FAIL("expected EndpointError");
  } catch (const EndpointError& e) {
    CHECK(e.status() == 500);
    CHECK(e.message() == "busy");
  }
  CHECK(mock.calls() == 3);
}

TEST_CASE("client errors are not retried") {
  MockCaptioner mock(1000, 400);
  CHECK_THROWS_AS(remote_caption(endpoint(mock.url(), 5), kBytes, prompt_for(ImageSource::Original)),
                  EndpointError);
  CHECK(mock.calls() == 1);
}

TEST_CASE("unreachable endpoint is a transport error") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }  // closed again: nothing listens there now
  auto e = endpoint("http://127.0.0.1:" + std::to_string(port), 1);
  e.timeout_s = 1.0;
  CHECK_THROWS_AS(remote_caption(e, kBytes, prompt_for(ImageSource::Original)), TransportError);
  e.max_retries = 11;
  CHECK_THROWS_AS(remote_caption(e, kBytes, prompt_for(ImageSource::Original)), ArgumentError);
}

TEST_CASE("caption_missing with stub and remote") {
  DatasetManifest m;
  m.records = {labelled("a", "dog"), labelled("b", "car")};
  ImageRecord crop = labelled("a-crop", "dog");
  crop.source = ImageSource::Crop;
  crop.provenance = AugmentationProvenance{"a", std::nullopt, std::nullopt, std::nullopt, 0};
  m.records.push_back(crop);

  CaptionOptions stub;
  stub.seed = 4;
  const auto out = caption_missing(m, stub);
  std::set<std::string> captioned;
  std::string a_text, crop_text;
  for (const auto& c : out.captions) {
    captioned.insert(c.image_id);
    if (c.image_id == "a") a_text = c.text;
    if (c.image_id == "a-crop") crop_text = c.text;
  }
  CHECK(captioned == std::set<std::string>{"a", "a-crop", "b"});
  CHECK(crop_text == a_text);
  CHECK(caption_missing(out, stub) == out);  // nothing left to caption
  CHECK(remote_caption_all(endpoint("http://127.0.0.1:1", 0), {}, 2).empty());
}

TEST_CASE("remote_caption_all keys by id") {
  MockCaptioner mock(0, 0);
  std::vector<CaptionJob> jobs;
  for (int i = 0; i < 9; ++i)
    jobs.push_back({"id" + std::to_string(i), kBytes, prompt_for(i % 2 ? ImageSource::CutMix : ImageSource::Original)});
  const auto out = remote_caption_all(endpoint(mock.url(), 0), jobs, 3);
  REQUIRE(out.size() == 9);
  CHECK(out.at("id1") == "a dog next to a car");
  CHECK(out.at("id2") == "a dog");
}
