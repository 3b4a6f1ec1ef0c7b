// End-to-end command layer: each command against a tiny CSV pair whose
// fitted model is derivable by hand, plus the artifact contracts (config
// hash + seed in every file, byte-identical reruns, cleanup on failure).
//
// The toy is built from dyadic values (0.25/0.5/0.75) so the whole solve
// runs in exact floating-point arithmetic: feature 0 separates the classes
// perfectly, feature 1 is symmetric noise, and with k = 1 both one-vs-all
// fits land on exactly (1, 0) in flipped feature space.

#include <gtest/gtest.h>

#include <capsel/config.hpp>
#include <capsel/learn.hpp>
#include <capsel/run.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using capsel::config::RunConfig;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  EXPECT_TRUE(in) << "missing file: " << p;
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class RunCommand : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() /
           (std::string("capsel_run_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write("train.csv",
          "f0,f1,label\n"
          "1,0.25,a\n"
          "1,0.75,a\n"
          "0,0.75,b\n"
          "0,0.25,b\n");
    write("test.csv",
          "f0,f1,label\n"
          "1,0.5,a\n"
          "0,0.5,b\n"
          "1,0.25,a\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p.string();
  }

  // Supervised k=1 toy configuration; overrides merge on top.
  RunConfig make_cfg(const json& overrides = json::object(),
                     const std::string& out_name = "out") {
    json j{{"format", "csv"},
           {"train_csv", (dir_ / "train.csv").string()},
           {"test_csv", (dir_ / "test.csv").string()},
           {"label_column", "label"},
           {"mode", "supervised"},
           {"scaling", "unit_interval"},
           {"flip_rule", "one_minus"},
           {"k", 1},
           {"seed", 11},
           {"out_dir", (dir_ / out_name).string()}};
    for (const auto& [key, val] : overrides.items()) {
      if (val.is_null())
        j.erase(key);
      else
        j[key] = val;
    }
    return capsel::config::parse_config(j.dump());
  }

  fs::path out(const std::string& name, const std::string& out_name = "out") {
    return dir_ / out_name / name;
  }

  fs::path dir_;
};

TEST_F(RunCommand, TrainWritesTheHandDerivedModel) {
  const RunConfig cfg = make_cfg();
  EXPECT_EQ(capsel::run::run_command("train", cfg), 0);

  const auto text = slurp(out("model.json"));
  const auto model = capsel::learn::multiclass_model_from_json(text);
  ASSERT_EQ(model.models.size(), 2u);
  EXPECT_EQ(model.class_names, (std::vector<std::string>{"a", "b"}));

  capsel::core::Vector e0(2);
  e0 << 1.0, 0.0;
  for (const auto& m : model.models) EXPECT_EQ(m.weights.w, e0);

  // Signs: feature 0 splits the classes (+1 for a, -1 for b); feature 1 has
  // equal class means, and ties resolve to +1.
  EXPECT_EQ(model.models[0].sign_vec.signs[0], 1);
  EXPECT_EQ(model.models[0].sign_vec.signs[1], 1);
  EXPECT_EQ(model.models[1].sign_vec.signs[0], -1);
  EXPECT_EQ(model.models[1].sign_vec.signs[1], 1);
  EXPECT_EQ(model.models[0].threshold, 0.5);

  // Artifacts carry provenance.
  const auto doc = json::parse(text);
  EXPECT_EQ(doc.at("config_hash"), capsel::config::config_hash(cfg));
  EXPECT_EQ(doc.at("seed"), 11);

  const auto diag = json::parse(slurp(out("diagnostics.json")));
  ASSERT_EQ(diag.at("classes").size(), 2u);
  for (const auto& entry : diag.at("classes")) {
    EXPECT_TRUE(entry.at("solve").at("converged").get<bool>());
    EXPECT_LE(entry.at("solve").at("iterations").get<int>(), 3);
  }
}

TEST_F(RunCommand, TrainThenEvalReproducesHandDerivedMetrics) {
  RunConfig cfg = make_cfg();
  ASSERT_EQ(capsel::run::run_command("train", cfg), 0);

  const RunConfig eval_cfg =
      make_cfg(json{{"model_path", out("model.json").string()}}, "eval_out");
  ASSERT_EQ(capsel::run::run_command("eval", eval_cfg), 0);

  const auto m = json::parse(slurp(out("metrics.json", "eval_out")));
  EXPECT_EQ(m.at("overall_accuracy"), 1.0);
  EXPECT_EQ(m.at("n_test"), 3);
  EXPECT_EQ(m.at("seed"), 11);
  EXPECT_EQ(m.at("config_hash"), capsel::config::config_hash(eval_cfg));
  EXPECT_EQ(m.at("per_class_accuracy").at("a"), 1.0);
  EXPECT_EQ(m.at("per_class_accuracy").at("b"), 1.0);
  EXPECT_EQ(m.at("confusion").at("rows"), json::parse("[[2,0],[0,1]]"));

  const auto csv = slurp(out("metrics.csv", "eval_out"));
  EXPECT_NE(csv.find("# seed=11"), std::string::npos);
  EXPECT_NE(csv.find("overall,3,3,1\n"), std::string::npos) << csv;
}

TEST_F(RunCommand, PredictEmitsExactScoresPerSample) {
  ASSERT_EQ(capsel::run::run_command("train", make_cfg()), 0);
  const RunConfig cfg =
      make_cfg(json{{"model_path", out("model.json").string()}}, "pred_out");
  ASSERT_EQ(capsel::run::run_command("predict", cfg), 0);

  const auto csv = slurp(out("predictions.csv", "pred_out"));
  // Scores are exact: class a reads feature 0, class b reads 1 - feature 0.
  EXPECT_NE(csv.find("sample,predicted,score_a,score_b\n"), std::string::npos)
      << csv;
  EXPECT_NE(csv.find("0,a,1,0\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("1,b,0,1\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("2,a,1,0\n"), std::string::npos) << csv;
}

TEST_F(RunCommand, RerunsAreByteIdentical) {
  ASSERT_EQ(capsel::run::run_command("train", make_cfg({}, "a")), 0);
  ASSERT_EQ(capsel::run::run_command("train", make_cfg({}, "b")), 0);
  EXPECT_EQ(slurp(out("model.json", "a")), slurp(out("model.json", "b")));
  EXPECT_EQ(slurp(out("diagnostics.json", "a")),
            slurp(out("diagnostics.json", "b")));

  const json with_model{{"model_path", out("model.json", "a").string()}};
  ASSERT_EQ(capsel::run::run_command("eval", make_cfg(with_model, "ea")), 0);
  ASSERT_EQ(capsel::run::run_command("eval", make_cfg(with_model, "eb")), 0);
  EXPECT_EQ(slurp(out("metrics.json", "ea")), slurp(out("metrics.json", "eb")));
  EXPECT_EQ(slurp(out("metrics.csv", "ea")), slurp(out("metrics.csv", "eb")));
  // Timestamps live only in the sidecar log.
  EXPECT_TRUE(fs::exists(out("run.log", "ea")));
}

TEST_F(RunCommand, FailedCommandLeavesLogButNoArtifacts) {
  // eval without model_path fails after validation, before any artifact.
  const RunConfig cfg = make_cfg({}, "fail_out");
  EXPECT_THROW(capsel::run::run_command("eval", cfg),
               capsel::core::ConfigError);
  EXPECT_FALSE(fs::exists(out("metrics.json", "fail_out")));
  EXPECT_FALSE(fs::exists(out("metrics.csv", "fail_out")));
  const auto log = slurp(out("run.log", "fail_out"));
  EXPECT_NE(log.find("fail command=eval"), std::string::npos) << log;
}

TEST_F(RunCommand, UnknownCommandRejectedBeforeTouchingDisk) {
  const RunConfig cfg = make_cfg({}, "never_created");
  try {
    capsel::run::run_command("explode", cfg);
    FAIL() << "expected ConfigError";
  } catch (const capsel::core::ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("unknown command 'explode'"), std::string::npos);
    EXPECT_NE(msg.find("train"), std::string::npos);
  }
  EXPECT_FALSE(fs::exists(dir_ / "never_created"));
}

TEST_F(RunCommand, ValidationErrorsFireBeforeAnyWork) {
  // k larger than the feature count.
  const RunConfig big_k = make_cfg(json{{"k", 5}}, "bigk");
  try {
    capsel::run::run_command("train", big_k);
    FAIL() << "expected ConfigError";
  } catch (const capsel::core::ConfigError& e) {
    EXPECT_NE(std::string(e.what())
                  .find("k = 5 exceeds the 2 available features"),
              std::string::npos);
  }
  EXPECT_FALSE(fs::exists(out("model.json", "bigk")));

  // eval without a test set.
  const RunConfig no_test =
      make_cfg(json{{"test_csv", nullptr},
                    {"model_path", "irrelevant.json"}},
               "notest");
  try {
    capsel::run::run_command("eval", no_test);
    FAIL() << "expected ConfigError";
  } catch (const capsel::core::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("needs a test set"),
              std::string::npos);
  }

  // sweep-k without k_values.
  EXPECT_THROW(capsel::run::run_command("sweep-k", make_cfg({}, "nok")),
               capsel::core::ConfigError);

  // predict pointing at a missing model file.
  const RunConfig gone =
      make_cfg(json{{"model_path", (dir_ / "gone.json").string()}}, "gone");
  EXPECT_THROW(capsel::run::run_command("predict", gone),
               capsel::core::InputError);
}

TEST_F(RunCommand, TestSetWithUnknownClassRejected) {
  write("test.csv",
        "f0,f1,label\n"
        "1,0.5,a\n"
        "0,0.5,c\n");
  try {
    capsel::run::run_command("train", make_cfg());
    FAIL() << "expected InputError";
  } catch (const capsel::core::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("class 'c'"), std::string::npos);
  }
}

TEST_F(RunCommand, SignsCommandWritesPerClassVectors) {
  ASSERT_EQ(capsel::run::run_command("signs", make_cfg()), 0);
  const auto doc = json::parse(slurp(out("signs.json")));
  EXPECT_EQ(doc.at("config_hash"), capsel::config::config_hash(make_cfg()));
  EXPECT_EQ(doc.at("seed"), 11);
  ASSERT_EQ(doc.at("classes").size(), 2u);
  const auto& a = doc.at("classes")[0];
  EXPECT_EQ(a.at("class_id"), 0);
  EXPECT_EQ(a.at("class_name"), "a");
  EXPECT_EQ(a.at("flip_rule"), "one_minus");
  EXPECT_EQ(a.at("signs"), json::parse("[1,1]"));
  EXPECT_EQ(a.at("source_class"), 0);
  const auto& b = doc.at("classes")[1];
  EXPECT_EQ(b.at("class_name"), "b");
  EXPECT_EQ(b.at("signs"), json::parse("[-1,1]"));
}

TEST_F(RunCommand, SimilarityMatrixHasUnitDiagonal) {
  ASSERT_EQ(capsel::run::run_command("similarity", make_cfg()), 0);
  const auto csv = slurp(out("similarity.csv"));
  // The two sign vectors agree on feature 1 only: off-diagonal 1/2.
  EXPECT_NE(csv.find("class,a,b\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("a,1,0.5\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("b,0.5,1\n"), std::string::npos) << csv;
}

TEST_F(RunCommand, SweepKEmitsSortedPointsWithBaseline) {
  const RunConfig cfg = make_cfg(
      json{{"k_values", json::array({2, 1})}, {"repeats", 2}}, "sweep");
  ASSERT_EQ(capsel::run::run_command("sweep-k", cfg), 0);

  const auto csv = slurp(out("sweep.csv", "sweep"));
  EXPECT_EQ(csv.rfind("# config_hash=" + capsel::config::config_hash(cfg), 0),
            0u)
      << csv;
  EXPECT_NE(csv.find("axis,value,repeat,seed,accuracy,baseline_accuracy\n"),
            std::string::npos);

  const auto doc = json::parse(slurp(out("sweep.json", "sweep")));
  EXPECT_EQ(doc.at("axis"), "k");
  EXPECT_EQ(doc.at("repeats"), 2);
  ASSERT_EQ(doc.at("points").size(), 2u);
  // Points come back sorted by k even though the config listed {2, 1}.
  EXPECT_EQ(doc.at("points")[0].at("value"), 1.0);
  EXPECT_EQ(doc.at("points")[1].at("value"), 2.0);
  // k = n admits only the uniform point, so the fit equals the equal-weight
  // baseline exactly.
  EXPECT_EQ(doc.at("points")[1].at("accuracies"),
            doc.at("points")[1].at("baseline_accuracies"));
}

TEST_F(RunCommand, SweepUnlabeledRerunsAreByteIdentical) {
  const json overrides{{"mode", "unsupervised"},
                       {"scaling", "standardized"},
                       {"flip_rule", "negate"},
                       {"pool_policy", "labeled_plus_unlabeled"},
                       {"fractions", json::array({0.0, 1.0})},
                       {"repeats", 2}};
  ASSERT_EQ(capsel::run::run_command("sweep-unlabeled",
                                     make_cfg(overrides, "su_a")),
            0);
  ASSERT_EQ(capsel::run::run_command("sweep-unlabeled",
                                     make_cfg(overrides, "su_b")),
            0);
  EXPECT_EQ(slurp(out("sweep.csv", "su_a")), slurp(out("sweep.csv", "su_b")));
  EXPECT_EQ(slurp(out("sweep.json", "su_a")),
            slurp(out("sweep.json", "su_b")));

  const auto doc = json::parse(slurp(out("sweep.json", "su_a")));
  EXPECT_EQ(doc.at("axis"), "unlabeled_fraction");
  ASSERT_EQ(doc.at("points").size(), 2u);
  EXPECT_EQ(doc.at("points")[0].at("value"), 0.0);
  EXPECT_EQ(doc.at("points")[1].at("value"), 1.0);
  EXPECT_EQ(doc.at("points")[0].at("accuracies").size(), 2u);
}

TEST_F(RunCommand, TransferRunsAllThreeSettings) {
  // Maps are given by class name; both borrow across the pair.
  const json overrides{
      {"repeats", 2},
      {"transfer_partial", json{{"a", "b"}}},
      {"transfer_mostly", json{{"a", "b"}, {"b", "a"}}}};
  ASSERT_EQ(capsel::run::run_command("transfer", make_cfg(overrides, "tr")),
            0);
  const auto csv = slurp(out("transfer.csv", "tr"));
  EXPECT_NE(csv.find("setting,repeat,seed,accuracy\n"), std::string::npos);
  for (const char* name : {"all_own", "partial_borrowed", "mostly_borrowed"})
    EXPECT_NE(csv.find(name), std::string::npos) << csv;

  // Missing maps and unknown class names are config errors.
  EXPECT_THROW(capsel::run::run_command("transfer", make_cfg({}, "tr2")),
               capsel::core::ConfigError);
  const json bad{{"transfer_partial", json{{"z", "a"}}},
                 {"transfer_mostly", json{{"a", "b"}}}};
  try {
    capsel::run::run_command("transfer", make_cfg(bad, "tr3"));
    FAIL() << "expected ConfigError";
  } catch (const capsel::core::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown class 'z'"),
              std::string::npos);
  }
}

TEST_F(RunCommand, OneShotConfigRunsEndToEnd) {
  // One labeled sample per class for signs; feature 0 still separates the
  // classes perfectly whichever rows the seed draws, so accuracy stays 1.
  RunConfig cfg = make_cfg(json{{"labeled_per_class", 1}}, "oneshot");
  ASSERT_EQ(capsel::run::run_command("train", cfg), 0);
  const RunConfig eval_cfg = make_cfg(
      json{{"labeled_per_class", 1},
           {"model_path", out("model.json", "oneshot").string()}},
      "oneshot_eval");
  ASSERT_EQ(capsel::run::run_command("eval", eval_cfg), 0);
  const auto m = json::parse(slurp(out("metrics.json", "oneshot_eval")));
  EXPECT_EQ(m.at("overall_accuracy"), 1.0);
}

}  // namespace
