#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "knotnet/commands.hpp"

using namespace knotnet;

int main(int argc, char** argv) {
  CLI::App app{
      "knotnet: braid-word neural networks for quasipositivity, slice genus, "
      "and tau, with verifiable band certificates"};
  app.require_subcommand(1);
  app.fallthrough();
  bool deterministic = true;
  app.add_flag("--deterministic", deterministic,
               "single-threaded seeded execution (always on; accepted for "
               "script compatibility)");
  int exit_code = cli::kExitSuccess;

  // train ------------------------------------------------------------
  cli::TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train a network on a knot table");
  train->add_option("--data", train_args.data_path, "knot table CSV")->required();
  train->add_option("--target", train_args.target, "qp, g4, or tau")
      ->check(CLI::IsMember({"qp", "g4", "tau"}));
  train->add_option("--out", train_args.model_out, "write the trained model here");
  train->add_option("--hidden", train_args.hidden,
                    "comma-separated hidden layer sizes (default depends on "
                    "target)")
      ->delimiter(',');
  train->add_option("--epochs", train_args.epochs,
                    "training epochs (default depends on target; 0 evaluates "
                    "the untrained initialization)");
  train->add_option("--batch-size", train_args.batch_size, "minibatch size");
  train->add_option("--lr,--learning-rate", train_args.learning_rate,
                    "Adam step size");
  train->add_option("--dropout", train_args.dropout, "hidden-layer dropout rate");
  train->add_option("--reps", train_args.reps, "representatives per knot");
  train->add_option("--test-knots", train_args.test_knots,
                    "knots held out per repeat");
  train->add_option("--repeats", train_args.repeats,
                    "independent split/train runs");
  train->add_option("--seed", train_args.seed, "master seed");
  train->add_flag("--final-full-data", train_args.final_full_data,
                  "retrain the saved model on every labeled row");
  train->add_flag("--normalize-all", train_args.normalize_all,
                  "fit feature normalization on all rows instead of train rows");
  train->callback(
      [&] { exit_code = cli::cmd_train(train_args, std::cout, std::cerr); });

  // predict ----------------------------------------------------------
  cli::PredictArgs predict_args;
  CLI::App* predict =
      app.add_subcommand("predict", "per-knot mean predictions");
  predict->add_option("--model", predict_args.model_path, "trained model")
      ->required();
  predict->add_option("--data", predict_args.data_path, "knot table CSV")
      ->required();
  predict->add_option("--knot", predict_args.knots,
                      "restrict to these knots (repeatable)");
  predict->add_option("--seed", predict_args.seed,
                      "augmentation seed (default: the model's)");
  predict->callback(
      [&] { exit_code = cli::cmd_predict(predict_args, std::cout, std::cerr); });

  // rank-nonslice ------------------------------------------------------
  cli::RankArgs rank_args;
  CLI::App* rank = app.add_subcommand(
      "rank-nonslice", "rank knots by predicted slice genus nearest 1");
  rank->add_option("--model", rank_args.model_path, "slice-genus model")
      ->required();
  rank->add_option("--data", rank_args.data_path, "knot table CSV")->required();
  rank->add_option("--top", rank_args.top, "print only the first N knots");
  rank->add_option("--seed", rank_args.seed,
                   "augmentation seed (default: the model's)");
  rank->callback(
      [&] { exit_code = cli::cmd_rank_nonslice(rank_args, std::cout, std::cerr); });

  // verify-certs -------------------------------------------------------
  cli::VerifyArgs verify_args;
  CLI::App* verify =
      app.add_subcommand("verify-certs", "check a band-certificate fixture");
  verify->add_option("--fixture", verify_args.fixture_path,
                     "tab-separated certificate table")
      ->required();
  verify->add_flag("--quasinegative", verify_args.quasinegative,
                   "certificates are for mirrored words; expected column is tau");
  verify->add_option("--budget", verify_args.budget,
                     "word-problem rewrite budget");
  verify->callback(
      [&] { exit_code = cli::cmd_verify_certs(verify_args, std::cout, std::cerr); });

  // search-qp ----------------------------------------------------------
  cli::SearchArgs search_args;
  CLI::App* search =
      app.add_subcommand("search-qp", "search for band certificates");
  search->add_option("--data", search_args.data_path, "knot table CSV")
      ->required();
  search->add_option("--model", search_args.model_path,
                     "optional quasipositivity model used as a screen");
  search->add_option("--cutoff", search_args.cutoff,
                     "minimum mean predicted probability to search a knot");
  search->add_option("--budget,--rewrite-budget", search_args.rewrite_budget,
                     "random rewrites tried per knot");
  search->add_option("--seed", search_args.seed, "search seed");
  search->add_option("--knot", search_args.knots,
                     "restrict to these knots (repeatable)");
  search->callback(
      [&] { exit_code = cli::cmd_search_qp(search_args, std::cout, std::cerr); });

  // check-relations ------------------------------------------------------
  cli::RelationArgs relation_args;
  CLI::App* relations = app.add_subcommand(
      "check-relations", "audit predicted g4 against predicted tau and s");
  relations->add_option("--genus-model", relation_args.genus_model_path,
                        "slice-genus model")
      ->required();
  relations->add_option("--tau-model", relation_args.tau_model_path,
                        "tau model")
      ->required();
  relations->add_option("--data", relation_args.data_path, "knot table CSV")
      ->required();
  relations->add_option("--max-listed", relation_args.max_listed,
                        "violations to print in full");
  relations->callback([&] {
    exit_code = cli::cmd_check_relations(relation_args, std::cout, std::cerr);
  });

  // augment --------------------------------------------------------------
  cli::AugmentArgs augment_args;
  CLI::App* augment = app.add_subcommand(
      "augment", "expand each knot into equivalent braid representatives");
  augment->add_option("--data", augment_args.data_path, "knot table CSV")
      ->required();
  augment->add_option("--out", augment_args.out_path,
                      "output path (default: stdout)");
  augment->add_option("--reps", augment_args.reps, "representatives per knot");
  augment->add_option("--seed", augment_args.seed, "augmentation seed");
  augment->callback(
      [&] { exit_code = cli::cmd_augment(augment_args, std::cout, std::cerr); });

  // encode -----------------------------------------------------------------
  cli::EncodeArgs encode_args;
  CLI::App* encode =
      app.add_subcommand("encode", "print network input encodings");
  encode->add_option("--word", encode_args.word, "one braid word");
  encode->add_option("--data", encode_args.data_path, "knot table CSV");
  encode->add_option("--model", encode_args.model_path,
                     "take feature normalization from this model");
  encode->callback(
      [&] { exit_code = cli::cmd_encode(encode_args, std::cout, std::cerr); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int cli_code = app.exit(e);
    return cli_code == 0 ? cli::kExitSuccess : cli::kExitUsage;
  }
  return exit_code;
}
