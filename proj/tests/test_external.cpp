#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include <nlohmann/json.hpp>

#include "patchcert/classifier.hpp"
#include "support.hpp"

using namespace patchcert;
using Kind = ClassifierError::Kind;

namespace {

std::string peer(const std::string& args) { return std::string(PEER_PATH) + " " + args; }

Kind failure_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ClassifierError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected a ClassifierError";
  return Kind::spawn;
}

}  // namespace

TEST(External, MatchesInProcessModel) {
  const auto ext = make_external_classifier(peer("modsum"), 3);
  const auto local = make_synthetic_classifier("modsum", 3);
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Sample x = support::random_sample(rng, 4, 4, 2, 0);
    EXPECT_EQ(classify(ext, x), classify(local, x));
  }
  EXPECT_EQ(ext->kind().rfind("extern:", 0), 0u);
}

TEST(External, WireFormat) {
  const auto log = support::scratch_dir("wire") / "requests.log";
  {
    const auto ext = make_external_classifier(peer("log " + log.string()), 3);
    const std::vector<Pixel> px{1, 2, 0, 1, 2, 2};
    classify(ext, Sample(3, 2, 2, px));
    classify(ext, Sample(3, 2, 2, px));
  }
  std::istringstream lines(support::slurp(log));
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  const auto req = nlohmann::json::parse(first);
  EXPECT_EQ(req.at("id"), 1);
  EXPECT_EQ(req.at("w"), 3);
  EXPECT_EQ(req.at("h"), 2);
  EXPECT_EQ(req.at("labels"), 3);
  EXPECT_EQ(req.at("pixels"), nlohmann::json({1, 2, 0, 1, 2, 2}));
  EXPECT_EQ(nlohmann::json::parse(second).at("id"), 2);
}

TEST(External, ProtocolFaults) {
  const Sample x = Sample::filled(2, 2, 2, 1);
  EXPECT_EQ(failure_kind([&] { classify(make_external_classifier(peer("wrong-id"), 3), x); }), Kind::id_mismatch);
  EXPECT_EQ(failure_kind([&] { classify(make_external_classifier(peer("garbage"), 3), x); }),
            Kind::malformed_response);
  EXPECT_EQ(failure_kind([&] { classify(make_external_classifier(peer("extra-field"), 3), x); }),
            Kind::malformed_response);
  EXPECT_EQ(failure_kind([&] { classify(make_external_classifier(peer("const 7"), 3), x); }), Kind::label_range);
  EXPECT_EQ(failure_kind([&] { make_external_classifier(peer("bad-handshake"), 3); }), Kind::handshake);
  EXPECT_EQ(failure_kind([&] { make_external_classifier("exit 3", 3); }), Kind::spawn);
}

TEST(External, Timeout) {
  ExternalOptions opts;
  opts.timeout = std::chrono::milliseconds(200);
  const auto ext = make_external_classifier(peer("hang"), 3, opts);
  const auto start = std::chrono::steady_clock::now();
  EXPECT_EQ(failure_kind([&] { classify(ext, Sample::filled(2, 2, 2, 1)); }), Kind::timeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(5));
}

TEST(External, PeerExitBreaksHandle) {
  const auto ext = make_external_classifier(peer("exit-after 1"), 3);
  const Sample x = Sample::filled(2, 2, 2, 1);
  EXPECT_EQ(classify(ext, x), 1u);
  EXPECT_EQ(failure_kind([&] { classify(ext, x); }), Kind::peer_exited);
  EXPECT_EQ(failure_kind([&] { classify(ext, x); }), Kind::peer_exited);
}

TEST(External, FrameCheckedBeforeSending) {
  ExternalOptions opts;
  opts.expected_frame = std::pair{2, 2};
  const auto ext = make_external_classifier(peer("modsum"), 3, opts);
  EXPECT_EQ(failure_kind([&] { classify(ext, Sample::filled(3, 2, 2, 1)); }), Kind::dimension);
  EXPECT_EQ(classify(ext, Sample::filled(2, 2, 2, 1)), 1u);
}

TEST(External, SpecGrammar) {
  const auto ext = make_classifier_from_spec("extern:" + peer("const 2"), 3);
  EXPECT_EQ(classify(ext, Sample::filled(2, 2, 2, 1)), 2u);
}
