#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "knotnet/braid.hpp"

namespace knotnet::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitVerification = 3;

struct TrainArgs {
  std::string data_path;
  std::string target = "qp";
  std::string model_out;            // empty: do not save
  std::vector<int> hidden;          // empty: per-target default
  int epochs = -1;                  // negative: per-target default; 0 is
                                    // honored (evaluate the initialization)
  int batch_size = 32;
  double learning_rate = 1e-3;
  double dropout = 0.5;
  int reps = 32;
  int test_knots = 50;
  int repeats = 1;
  std::uint64_t seed = 1;
  bool final_full_data = false;     // retrain on every labeled row at the end
  bool normalize_all = false;       // fit normalization on all rows, not train
};

struct PredictArgs {
  std::string model_path;
  std::string data_path;
  std::vector<std::string> knots;   // empty: every knot in the table
  std::optional<std::uint64_t> seed;  // default: the model's augment seed
};

struct RankArgs {
  std::string model_path;
  std::string data_path;
  int top = 0;                      // 0: all
  std::optional<std::uint64_t> seed;
};

struct VerifyArgs {
  std::string fixture_path;
  bool quasinegative = false;
  std::uint64_t budget = braid::kDefaultEqualityBudget;
};

struct SearchArgs {
  std::string data_path;
  std::string model_path;           // optional screen; empty: search all
  double cutoff = 0.5;
  int rewrite_budget = 64;
  std::uint64_t seed = 1;
  std::vector<std::string> knots;   // optional filter
};

struct RelationArgs {
  std::string genus_model_path;
  std::string tau_model_path;
  std::string data_path;
  int max_listed = 20;              // violations to print in full
};

struct AugmentArgs {
  std::string data_path;
  std::string out_path;             // empty: stdout
  int reps = 32;
  std::uint64_t seed = 1;
};

struct EncodeArgs {
  std::string word;                 // exactly one of word/data_path
  std::string data_path;
  std::string model_path;           // optional normalization source
};

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_predict(const PredictArgs& args, std::ostream& out, std::ostream& err);
int cmd_rank_nonslice(const RankArgs& args, std::ostream& out,
                      std::ostream& err);
int cmd_verify_certs(const VerifyArgs& args, std::ostream& out,
                     std::ostream& err);
int cmd_search_qp(const SearchArgs& args, std::ostream& out,
                  std::ostream& err);
int cmd_check_relations(const RelationArgs& args, std::ostream& out,
                        std::ostream& err);
int cmd_augment(const AugmentArgs& args, std::ostream& out, std::ostream& err);
int cmd_encode(const EncodeArgs& args, std::ostream& out, std::ostream& err);

}  // namespace knotnet::cli
