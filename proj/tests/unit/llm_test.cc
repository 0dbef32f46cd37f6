#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "ragulator/llm/client.h"
#include "ragulator/llm/openai_client.h"
#include "ragulator/llm/prompts.h"
#include "ragulator/llm/responses.h"
#include "ragulator/llm/tasks.h"

namespace ragulator::llm {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using ::testing::IsEmpty;
using ::testing::Not;

const std::string kCandidate = "The bridge opened to traffic in 1932.";
const std::vector<std::string> kSentences = {"The bridge was built over four years.",
                                             "It opened to traffic in 1932, two months early."};

std::string Golden(std::string_view name) {
  std::ifstream in(std::string(RAGULATOR_TEST_DATA_DIR) + "/golden/" + std::string(name) + ".txt",
                   std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t Count(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

TEST(Prompts, LabelTemplatesMatchGoldenFiles) {
  for (TemplateName name : kLabelTemplates) {
    const std::string golden = Golden(ToString(name));
    ASSERT_FALSE(golden.empty()) << ToString(name);
    EXPECT_EQ(*RenderLabelPrompt(name, kCandidate, kSentences), golden) << ToString(name);
  }
}

TEST(Prompts, JudgeTemplateMatchesGoldenFile) {
  EXPECT_EQ(RenderJudgePrompt(kCandidate, kSentences[0] + " " + kSentences[1]),
            Golden("judge_direct"));
}

TEST(Prompts, Layout) {
  const std::string zero = *RenderLabelPrompt(TemplateName::kLabel0Shot, kCandidate, kSentences);
  EXPECT_THAT(zero, HasSubstr("\n0. \"\"\"The bridge was built over four years.\"\"\"\n"));
  EXPECT_THAT(zero,
              HasSubstr("\n1. \"\"\"It opened to traffic in 1932, two months early.\"\"\"\n"));
  EXPECT_EQ(Count(zero, "# Example"), 0u);
  EXPECT_EQ(
      Count(*RenderLabelPrompt(TemplateName::kLabel0ShotCot, kCandidate, kSentences), "# Example"),
      0u);
  for (TemplateName name : {TemplateName::kLabel5Shot, TemplateName::kLabel5ShotCot}) {
    const std::string five = *RenderLabelPrompt(name, kCandidate, kSentences);
    const std::size_t actual = five.find("# Actual task #");
    ASSERT_NE(actual, std::string::npos);
    EXPECT_EQ(Count(five.substr(0, actual), "\n# Example "), 5u);
    EXPECT_EQ(Count(five.substr(actual), "# Example"), 0u);
  }
  for (TemplateName name : {TemplateName::kLabel0ShotCot, TemplateName::kLabel5ShotCot}) {
    EXPECT_THAT(std::string(TemplateBody(name)), HasSubstr("\"The answer is:\""));
  }
  for (const std::string& p : {zero, RenderJudgePrompt("a", "b")}) {
    EXPECT_THAT(p, Not(HasSubstr("{candidate}")));
    EXPECT_THAT(p, Not(HasSubstr("{context_sentences}")));
    EXPECT_THAT(p, Not(HasSubstr("{reference}")));
  }
}

TEST(Prompts, PlaceholdersInInputsAreNotExpanded) {
  const std::vector<std::string> sentences = {"{candidate}", "{context_sentences}"};
  const std::string p =
      *RenderLabelPrompt(TemplateName::kLabel0Shot, "{context_sentences}", sentences);
  EXPECT_EQ(Count(p, "{context_sentences}"), 2u);
  EXPECT_EQ(Count(p, "{candidate}"), 1u);
  EXPECT_EQ(Count(RenderJudgePrompt("{reference}", "{candidate}"), "{reference}"), 1u);
}

TEST(Prompts, Errors) {
  EXPECT_EQ(RenderLabelPrompt(TemplateName::kLabel0Shot, "x", {}).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(RenderLabelPrompt(TemplateName::kJudgeDirect, "x", kSentences).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(ParseTemplateName("label_7shot").ok());
  for (TemplateName name : kLabelTemplates) EXPECT_EQ(*ParseTemplateName(ToString(name)), name);
  EXPECT_FALSE(DecodeLabelPrompt("hello").ok());
  EXPECT_FALSE(DecodeJudgePrompt(Golden("label_0shot")).ok());
}

std::string RandomField(std::mt19937_64& rng) {
  static constexpr std::string_view kAlphabet[] = {"a",      "B", " ", "\\",  "\n",  "\r", "\"",
                                                   "\"\"\"", "{", "}", "\\n", "0. ", "#"};
  std::string out;
  const std::size_t n = rng() % 12;
  for (std::size_t i = 0; i < n; ++i) out += kAlphabet[rng() % std::size(kAlphabet)];
  return out;
}

TEST(Prompts, RenderingIsInjective) {
  std::mt19937_64 rng(51);
  for (int iter = 0; iter < 2000; ++iter) {
    const TemplateName name = kLabelTemplates[rng() % 4];
    const std::string candidate = RandomField(rng);
    std::vector<std::string> sentences(1 + rng() % 4);
    for (std::string& s : sentences) s = RandomField(rng);
    const auto decoded = DecodeLabelPrompt(*RenderLabelPrompt(name, candidate, sentences));
    ASSERT_TRUE(decoded.ok()) << decoded.status();
    ASSERT_EQ(*decoded, (DecodedLabelPrompt{name, candidate, sentences}));
    const std::string reference = RandomField(rng);
    ASSERT_EQ(*DecodeJudgePrompt(RenderJudgePrompt(candidate, reference)),
              (DecodedJudgePrompt{candidate, reference}));
    ASSERT_EQ(UnescapePromptText(EscapePromptText(reference)), reference);
    ASSERT_EQ(EscapePromptText(reference).find('\n'), std::string::npos);
  }
}

TEST(ParseLabelResponse, Examples) {
  EXPECT_THAT(ParseLabelResponse("[0]", 3, false)->indices, ElementsAre(0));
  EXPECT_THAT(ParseLabelResponse("0, 2", 3, false)->indices, ElementsAre(0, 2));
  EXPECT_THAT(ParseLabelResponse("Sentence 0 is unrelated. The answer is: [1]", 2, true)->indices,
              ElementsAre(1));
  EXPECT_THAT(ParseLabelResponse("The answer is: [0]. Wait. The answer is: [1]", 2, true)->indices,
              ElementsAre(1));
  EXPECT_THAT(ParseLabelResponse("the answer is: 1, 0.", 2, true)->indices, ElementsAre(0, 1));
  EXPECT_THAT(ParseLabelResponse("[2, 0, 2]", 3, false)->indices, ElementsAre(0, 2));
  EXPECT_THAT(ParseLabelResponse("\n  1\nbecause 2 is off-topic", 3, false)->indices,
              ElementsAre(1));
  EXPECT_THAT(ParseLabelResponse("[1,\n2]", 3, false)->indices, ElementsAre(1, 2));
}

TEST(ParseLabelResponse, WarningsAndFailures) {
  const auto partial = *ParseLabelResponse("[0, 5, x]", 3, false);
  EXPECT_THAT(partial.indices, ElementsAre(0));
  EXPECT_THAT(partial.warnings, ElementsAre(HasSubstr("dropped index 5"), HasSubstr("'x'")));
  const auto out_of_range = ParseLabelResponse("[99]", 3, false);
  EXPECT_EQ(out_of_range.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(out_of_range.status().message(), HasSubstr("parse failure"));
  EXPECT_FALSE(ParseLabelResponse("", 3, false).ok());
  EXPECT_FALSE(ParseLabelResponse("none", 3, false).ok());
  EXPECT_FALSE(ParseLabelResponse("[-1]", 3, false).ok());
  EXPECT_FALSE(ParseLabelResponse("[1]", 3, true).ok());
  EXPECT_FALSE(ParseLabelResponse("[0]", 0, false).ok());
}

double Ooc(double l0, double l1) {
  const std::vector<TokenLogprob> top = {{"0", l0}, {"1", l1}};
  return ScoreJudgeLogprobs(top)->probability;
}

TEST(Judge, SoftmaxExamples) {
  EXPECT_DOUBLE_EQ(Ooc(-0.7, -0.7), 0.5);
  EXPECT_NEAR(Ooc(std::log(0.6), std::log(0.2)), 0.25, 1e-12);
  const std::vector<TokenLogprob> neither = {{"yes", -0.1}, {"no", -2.0}};
  EXPECT_EQ(ScoreJudgeLogprobs(neither)->probability, 1.0);
  EXPECT_EQ(ScoreJudgeLogprobs(std::vector<TokenLogprob>{})->probability, 1.0);
}

TEST(Judge, MissingTokenUsesSumOfRemainingLogprobs) {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> u(-8.0, 0.0);
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<TokenLogprob> top;
    for (int i = 0; i < 10; ++i) top.push_back({"t" + std::to_string(i), u(rng)});
    const std::size_t present = rng() % 10;
    const bool one_present = rng() % 2 == 0;
    top[present].token = one_present ? " 1" : "0\n";
    double rest = 0.0;
    for (std::size_t i = 0; i < top.size(); ++i) {
      if (i != present) rest += top[i].logprob;
    }
    const JudgeScore s = *ScoreJudgeLogprobs(top);
    const double l1 = one_present ? top[present].logprob : rest;
    const double l0 = one_present ? rest : top[present].logprob;
    ASSERT_EQ(s.logprob_1, l1);
    ASSERT_EQ(s.logprob_0, l0);
    ASSERT_EQ(s.estimated_0, one_present);
    ASSERT_EQ(s.estimated_1, !one_present);
    ASSERT_NEAR(s.probability, std::exp(l1) / (std::exp(l0) + std::exp(l1)), 1e-12);
  }
}

TEST(Judge, ShiftInvarianceAndComplement) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-20.0, 0.0);
  for (int iter = 0; iter < 10000; ++iter) {
    const double l0 = u(rng);
    const double l1 = u(rng);
    const double c = u(rng);
    const double p = Ooc(l0, l1);
    ASSERT_GE(p, 0.0);
    ASSERT_LE(p, 1.0);
    ASSERT_NEAR(Ooc(l0 + c, l1 + c), p, 1e-12);
    ASSERT_NEAR(p + Ooc(l1, l0), 1.0, 1e-12);
  }
}

TEST(Judge, FirstMatchWinsAndInputValidated) {
  const std::vector<TokenLogprob> dup = {{" 1", -0.2}, {"0", -1.0}, {"1", -3.0}};
  EXPECT_EQ(ScoreJudgeLogprobs(dup)->logprob_1, -0.2);
  EXPECT_FALSE(ScoreJudgeLogprobs(std::vector<TokenLogprob>{{"0", 0.1}}).ok());
  EXPECT_FALSE(ScoreJudgeLogprobs(std::vector<TokenLogprob>{{"0", std::nan("")}}).ok());
  EXPECT_FALSE(ScoreJudgeLogprobs(std::vector<TokenLogprob>(11, {"x", -1.0})).ok());
}

Completion Text(std::string text) { return Completion{std::move(text), {}}; }

TEST(Judge, ThroughScriptedClient) {
  ScriptedCompletionClient client({Completion{"1", {{"1", std::log(0.2)}, {"0", std::log(0.6)}}}});
  const auto score = JudgeOoc(client, kCandidate, kSentences[0] + " " + kSentences[1]);
  ASSERT_TRUE(score.ok()) << score.status();
  EXPECT_NEAR(score->probability, 0.25, 1e-12);
  const auto requests = client.requests();
  ASSERT_EQ(requests.size(), 1u);
  EXPECT_EQ(requests[0].prompt, Golden("judge_direct"));
  EXPECT_EQ(requests[0].max_tokens, 1);
  EXPECT_TRUE(requests[0].logprobs);
}

RetryPolicy Recording(std::vector<std::chrono::milliseconds>& sleeps) {
  RetryPolicy p;
  p.sleep = [&sleeps](std::chrono::milliseconds d) { sleeps.push_back(d); };
  return p;
}

TEST(Retry, TransientErrorsBackOffExponentially) {
  std::vector<std::chrono::milliseconds> sleeps;
  ScriptedCompletionClient flaky(
      {absl::UnavailableError("down"), absl::DeadlineExceededError("slow"), Text("[0]")});
  int attempts = 0;
  const auto ok = CompleteWithRetry(flaky, {}, Recording(sleeps), &attempts);
  ASSERT_TRUE(ok.ok());
  EXPECT_EQ(attempts, 3);
  using std::chrono::milliseconds;
  EXPECT_THAT(sleeps, ElementsAre(milliseconds(500), milliseconds(1000)));

  sleeps.clear();
  ScriptedCompletionClient down({absl::UnavailableError("a"), absl::UnavailableError("b"),
                                 absl::UnavailableError("c"), Text("never")});
  const auto failed = CompleteWithRetry(down, {}, Recording(sleeps), &attempts);
  EXPECT_EQ(failed.status().code(), absl::StatusCode::kUnavailable);
  EXPECT_THAT(failed.status().message(), HasSubstr("after 3 attempts: c"));
  EXPECT_EQ(attempts, 3);

  ScriptedCompletionClient bad({absl::InvalidArgumentError("bad prompt"), Text("[0]")});
  EXPECT_EQ(CompleteWithRetry(bad, {}, Recording(sleeps), &attempts).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(attempts, 1);
}

datagen::SentenceContextPair Pair(std::string id,
                                  datagen::Label label = datagen::Label::kInContext) {
  datagen::SentenceContextPair p;
  p.pair_id = std::move(id);
  p.sentence = kCandidate;
  p.context = "The bridge was built over four years. It opened in 1932. Tolls ended in 1960.";
  p.label = label;
  return p;
}

TEST(LabelPair, Examples) {
  LabelOptions zero;
  ScriptedCompletionClient echo({Text("[0]")});
  const auto ok = *LabelPair(echo, Pair("p1"), zero);
  ASSERT_FALSE(ok.unlabellable());
  EXPECT_EQ(*ok.annotation, (window::RelevanceAnnotation{"p1", {0}}));
  EXPECT_EQ(ok.completions, 1);
  EXPECT_EQ(
      echo.requests()[0].prompt,
      *RenderLabelPrompt(TemplateName::kLabel0Shot, kCandidate,
                         std::vector<std::string>{"The bridge was built over four years.",
                                                  "It opened in 1932.", "Tolls ended in 1960."}));

  ScriptedCompletionClient wild({Text("[99]"), Text("[1]")});
  const auto flagged = *LabelPair(wild, Pair("p2"), zero);
  EXPECT_TRUE(flagged.unlabellable());
  EXPECT_EQ(flagged.completions, 1);
  EXPECT_THAT(flagged.warnings, Not(IsEmpty()));

  LabelOptions cot;
  cot.method = TemplateName::kLabel0ShotCot;
  ScriptedCompletionClient reasoning(
      {Text("Sentence 2 mentions tolls, sentence 1 the opening. The answer is: [2]")});
  EXPECT_THAT(LabelPair(reasoning, Pair("p3"), cot)->annotation->relevant_sentence_indices,
              ElementsAre(2));

  EXPECT_EQ(LabelPair(echo, Pair("p4", datagen::Label::kOutOfContext), zero).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(LabelPair, FewShotRetriesParseFailures) {
  LabelOptions five;
  five.method = TemplateName::kLabel5Shot;
  EXPECT_EQ(EffectiveParseRetries(five), 2);
  ScriptedCompletionClient eventually({Text("[99]"), Text("no idea"), Text("[1]")});
  const auto ok = *LabelPair(eventually, Pair("p"), five);
  EXPECT_THAT(ok.annotation->relevant_sentence_indices, ElementsAre(1));
  EXPECT_EQ(ok.completions, 3);

  ScriptedCompletionClient never({Text("x"), Text("y"), Text("z"), Text("[0]")});
  const auto flagged = *LabelPair(never, Pair("p"), five);
  EXPECT_TRUE(flagged.unlabellable());
  EXPECT_EQ(flagged.completions, 3);
  EXPECT_EQ(flagged.warnings.size(), 3u);
}

TEST(LabelPair, TransportFailurePropagates) {
  LabelOptions options;
  std::vector<std::chrono::milliseconds> sleeps;
  options.retry = Recording(sleeps);
  ScriptedCompletionClient down(
      {absl::UnavailableError("x"), absl::UnavailableError("x"), absl::UnavailableError("x")});
  EXPECT_EQ(LabelPair(down, Pair("p"), options).status().code(), absl::StatusCode::kUnavailable);
  EXPECT_EQ(sleeps.size(), 2u);
}

TEST(LabelPairs, BoundedConcurrencyAndOrder) {
  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  FunctionCompletionClient client([&](const CompletionRequest&) -> absl::StatusOr<Completion> {
    const int now = ++in_flight;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    --in_flight;
    return Text("[1]");
  });
  std::vector<datagen::SentenceContextPair> pairs;
  for (int i = 0; i < 24; ++i) {
    pairs.push_back(Pair("p" + std::to_string(i),
                         i % 3 == 0 ? datagen::Label::kOutOfContext : datagen::Label::kInContext));
  }
  const auto out = *LabelPairs(client, pairs, LabelOptions{}, 3);
  ASSERT_EQ(out.size(), 16u);
  EXPECT_EQ(out[0].pair_id, "p1");
  EXPECT_EQ(out[1].pair_id, "p2");
  EXPECT_EQ(out[2].pair_id, "p4");
  EXPECT_LE(peak.load(), 3);

  FunctionCompletionClient broken([](const CompletionRequest&) -> absl::StatusOr<Completion> {
    return absl::PermissionDeniedError("no");
  });
  const auto failed = LabelPairs(broken, pairs, LabelOptions{}, 2);
  EXPECT_THAT(failed.status().message(), HasSubstr("pair p1: no"));
}

TEST(LabelOutcome, JsonlRoundTrip) {
  LabelOutcome a;
  a.pair_id = "p1";
  a.method = TemplateName::kLabel5ShotCot;
  a.annotation = window::RelevanceAnnotation{"p1", {0, 3}};
  a.warnings = {"dropped index 9 outside [0, 4)"};
  a.completions = 2;
  LabelOutcome b;
  b.pair_id = "p2";
  b.completions = 1;
  const std::vector<LabelOutcome> rows = {a, b};
  EXPECT_THAT(LabelOutcomeToJson(b),
              HasSubstr(R"("relevant_sentence_indices":null,"unlabellable":true)"));
  const std::string path = ::testing::TempDir() + "/ragulator_labels.jsonl";
  ASSERT_TRUE(WriteLabelOutcomesJsonl(path, rows).ok());
  EXPECT_EQ(*ReadLabelOutcomesJsonl(path), rows);
  EXPECT_FALSE(ParseLabelOutcome(R"({"pair_id":"p","method":"judge_direct"})").ok());
}

TEST(OverlapCompletionClient, AnswersRenderedPrompts) {
  const OverlapCompletionClient stub;
  CompletionRequest label;
  label.prompt = *RenderLabelPrompt(TemplateName::kLabel5ShotCot, kCandidate, kSentences);
  const auto labelled = stub.Complete(label);
  ASSERT_TRUE(labelled.ok());
  EXPECT_THAT(ParseLabelResponse(labelled->text, 2, true)->indices, ElementsAre(1));

  const auto copied = JudgeOoc(stub, kSentences[1], kSentences[0] + " " + kSentences[1]);
  const auto unrelated = JudgeOoc(stub, "Penguins cannot fly.", kSentences[0]);
  EXPECT_LT(copied->probability, 0.5);
  EXPECT_GT(unrelated->probability, 0.5);
  EXPECT_FALSE(stub.Complete(CompletionRequest{"free text", 5, false}).ok());
}

class CompletionServer {
 public:
  explicit CompletionServer(httplib::Server::Handler handler) {
    server_.Post("/v1/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~CompletionServer() {
    server_.stop();
    thread_.join();
  }
  std::string Url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(OpenAiCompletionClient, SpeaksWireProtocol) {
  nlohmann::json seen;
  std::string auth;
  CompletionServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    nlohmann::json reply = {
        {"choices",
         {{{"text", "1"},
           {"logprobs", {{"top_logprobs", {{{"0", -1.2}, {" 1", -0.4}, {"x", -3.0}}}}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  OpenAiClientOptions options;
  options.base_url = server.Url();
  options.api_token = "secret";
  options.model = "test-model";
  const auto client = MakeCompletionClient(options);
  const auto out = client->Complete(CompletionRequest{"prompt text", 1, true});
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(out->text, "1");
  EXPECT_THAT(out->top_logprobs, ElementsAre(TokenLogprob{" 1", -0.4}, TokenLogprob{"0", -1.2},
                                             TokenLogprob{"x", -3.0}));
  EXPECT_EQ(seen["model"], "test-model");
  EXPECT_EQ(seen["prompt"], "prompt text");
  EXPECT_EQ(seen["max_tokens"], 1);
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["logprobs"], 10);
  EXPECT_EQ(auth, "Bearer secret");

  const auto plain = client->Complete(CompletionRequest{"p", 8, false});
  ASSERT_TRUE(plain.ok());
  EXPECT_FALSE(seen.contains("logprobs"));
}

TEST(OpenAiCompletionClient, ErrorMapping) {
  int status = 500;
  std::string body = "{}";
  CompletionServer server([&](const httplib::Request&, httplib::Response& res) {
    res.status = status;
    res.set_content(body, "application/json");
  });
  const OpenAiCompletionClient client(OpenAiClientOptions{server.Url()});
  EXPECT_EQ(client.Complete({}).status().code(), absl::StatusCode::kUnavailable);
  status = 429;
  EXPECT_EQ(client.Complete({}).status().code(), absl::StatusCode::kResourceExhausted);
  status = 400;
  EXPECT_EQ(client.Complete({}).status().code(), absl::StatusCode::kFailedPrecondition);
  status = 200;
  EXPECT_EQ(client.Complete({}).status().code(), absl::StatusCode::kInternal);
  body = R"({"choices":[{"text":"0"}]})";
  EXPECT_EQ(client.Complete(CompletionRequest{"p", 1, true}).status().code(),
            absl::StatusCode::kInternal);

  OpenAiClientOptions nowhere;
  nowhere.base_url = "http://127.0.0.1:1";
  nowhere.timeout = std::chrono::seconds(2);
  EXPECT_EQ(OpenAiCompletionClient(nowhere).Complete({}).status().code(),
            absl::StatusCode::kUnavailable);
}

}  // namespace
}  // namespace ragulator::llm
