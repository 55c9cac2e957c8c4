#include "doctest.h"
#include "fglr/config.hpp"
#include "fglr/error.hpp"
#include "support/temp_dir.hpp"

using namespace fglr;

TEST_CASE("empty config text yields the defaults") {
  RunSettings settings = parse_run_settings("");
  CHECK(settings.train.learning_rate == doctest::Approx(1e-3));
  CHECK(settings.train.epochs == 50);
  CHECK(settings.train.batch_size == 1);
  CHECK(settings.train.seed == 0);
  CHECK(settings.train.lambda_obs == 1.0);
  CHECK(settings.train.lambda_fact == 1.0);
  CHECK(settings.train.optimizer == OptimizerKind::Adam);
  CHECK(settings.train.shuffle);
  CHECK(settings.encoder_dim == 64);
  CHECK(settings.hidden_dim == 32);
}

TEST_CASE("all documented keys parse") {
  RunSettings settings = parse_run_settings(
      "# training setup\n"
      "learning_rate = 0.01\n"
      "epochs = 7\n"
      "batch_size = 4\n"
      "seed = 1234\n"
      "lambda_obs = 0.5\n"
      "lambda_fact = 2.0\n"
      "optimizer = sgd\n"
      "shuffle = false\n"
      "threshold = 0.6\n"
      "encoder_dim = 16   # small for tests\n"
      "hidden_dim = 8\n");
  CHECK(settings.train.learning_rate == doctest::Approx(0.01));
  CHECK(settings.train.epochs == 7);
  CHECK(settings.train.batch_size == 4);
  CHECK(settings.train.seed == 1234);
  CHECK(settings.train.lambda_obs == doctest::Approx(0.5));
  CHECK(settings.train.lambda_fact == doctest::Approx(2.0));
  CHECK(settings.train.optimizer == OptimizerKind::Sgd);
  CHECK_FALSE(settings.train.shuffle);
  CHECK(settings.train.threshold == doctest::Approx(0.6));
  CHECK(settings.encoder_dim == 16);
  CHECK(settings.hidden_dim == 8);
}

TEST_CASE("the last occurrence of a key wins") {
  RunSettings settings = parse_run_settings("seed = 1\nseed = 2\nseed = 3\n");
  CHECK(settings.train.seed == 3);
}

TEST_CASE("the rejected rule variant stays behind an off-by-default flag") {
  CHECK_FALSE(parse_run_settings("").train.contradiction_suppresses_entailment);
  RunSettings settings =
      parse_run_settings("contradiction_suppresses_entailment = true\n");
  CHECK(settings.train.contradiction_suppresses_entailment);
}

TEST_CASE("unknown keys and malformed lines are rejected") {
  CHECK_THROWS_AS(parse_run_settings("learning_rte = 0.1\n"), Error);
  CHECK_THROWS_AS(parse_run_settings("just some text\n"), Error);
  CHECK_THROWS_AS(parse_run_settings("epochs = many\n"), Error);
  CHECK_THROWS_AS(parse_run_settings("optimizer = sga\n"), Error);
  CHECK_THROWS_AS(parse_run_settings("shuffle = maybe\n"), Error);
}

TEST_CASE("validation enforces the documented ranges") {
  CHECK_THROWS_AS(parse_run_settings("learning_rate = 0\n"), Error);
  CHECK_THROWS_AS(parse_run_settings("learning_rate = -1\n"), Error);
  CHECK_THROWS_AS(parse_run_settings("epochs = 0\n"), Error);
  CHECK_THROWS_AS(parse_run_settings("batch_size = 0\n"), Error);
  CHECK_THROWS_AS(parse_run_settings("lambda_obs = -0.5\n"), Error);
  CHECK_THROWS_AS(parse_run_settings("threshold = 1.5\n"), Error);
}

TEST_CASE("config files load from disk") {
  fglr::testing::TempDir dir;
  std::string path = dir.file("train.cfg");
  fglr::testing::write_file(path, "epochs = 3\n");
  CHECK(load_run_settings(path).train.epochs == 3);
  CHECK_THROWS_AS(load_run_settings(dir.file("missing.cfg")), Error);
}
