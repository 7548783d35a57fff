#include "knotnet/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "knotnet/dataset.hpp"
#include "knotnet/encoding.hpp"
#include "knotnet/model_io.hpp"
#include "knotnet/neuralnet.hpp"
#include "knotnet/quasipos.hpp"
#include "knotnet/rng.hpp"

namespace knotnet::cli {

namespace {

struct TargetDefaults {
  std::vector<int> hidden;
  int epochs;
  nn::Activation output;
  nn::Loss loss;
};

TargetDefaults defaults_for(dataset::Target target) {
  switch (target) {
    case dataset::Target::Quasipositivity:
      return {{500, 500}, 26, nn::Activation::Sigmoid, nn::Loss::CrossEntropy};
    case dataset::Target::SliceGenus:
      return {{500, 500}, 27, nn::Activation::Identity, nn::Loss::MeanSquared};
    case dataset::Target::Tau:
      return {{750, 750}, 37, nn::Activation::Identity, nn::Loss::MeanSquared};
  }
  return {{500, 500}, 26, nn::Activation::Sigmoid, nn::Loss::CrossEntropy};
}

// Maps thrown errors onto the exit-code contract: bad invocations are usage
// errors, everything else that throws is a data error.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

dataset::LoadResult load_table(const std::string& path, std::ostream& err) {
  dataset::LoadResult loaded = dataset::load_csv(path);
  for (const dataset::RowError& row : loaded.row_errors) {
    err << "warning: " << path << ":" << row.line << ": " << row.message
        << " (row skipped)\n";
  }
  return loaded;
}

std::vector<std::string> distinct_names(
    const std::vector<dataset::KnotRecord>& records) {
  std::vector<std::string> names;
  std::set<std::string> seen;
  for (const auto& record : records) {
    if (seen.insert(record.name).second) names.push_back(record.name);
  }
  return names;
}

std::function<double(const dataset::AugmentedRow&)> predictor(
    const model::ModelFile& m) {
  return [&m](const dataset::AugmentedRow& row) {
    return nn::infer(m.spec, m.params, row.encoded)[0];
  };
}

std::string format_centers(const std::vector<int>& centers) {
  std::string out;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(centers[i]);
  }
  return out;
}

}  // namespace

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    const dataset::Target target = dataset::target_from_string(args.target);
    const TargetDefaults defaults = defaults_for(target);
    if (args.repeats < 1) {
      throw std::invalid_argument("repeats must be at least 1");
    }

    dataset::LoadResult loaded = load_table(args.data_path, err);
    std::vector<dataset::KnotRecord> labeled;
    for (auto& record : loaded.records) {
      if (dataset::has_label(record.labels, target)) {
        labeled.push_back(std::move(record));
      }
    }
    if (labeled.empty()) {
      err << "error: no rows carry a " << dataset::to_string(target)
          << " label\n";
      return kExitData;
    }
    out << "loaded " << labeled.size() << " labeled knots from "
        << args.data_path;
    if (!loaded.row_errors.empty()) {
      out << " (" << loaded.row_errors.size() << " rows skipped)";
    }
    out << "\n";

    std::vector<std::string> warnings;
    dataset::AugmentOptions augment_options;
    augment_options.reps = args.reps;
    dataset::AugmentedDataset data =
        dataset::augment(labeled, augment_options, args.seed, &warnings);
    for (const std::string& w : warnings) err << "warning: " << w << '\n';
    out << "augmented to " << data.rows.size() << " rows (" << labeled.size()
        << " knots x " << args.reps << " representatives)\n";

    nn::NetworkSpec spec = nn::make_spec(
        encoding::kInputDim, args.hidden.empty() ? defaults.hidden : args.hidden,
        1, nn::Activation::ReLU, defaults.output, args.dropout);
    nn::TrainConfig config;
    config.epochs = args.epochs >= 0 ? args.epochs : defaults.epochs;
    config.batch_size = args.batch_size;
    config.learning_rate = args.learning_rate;
    config.loss = defaults.loss;

    const bool classification = target == dataset::Target::Quasipositivity;
    double accuracy_sum = 0.0;
    int accuracy_runs = 0;
    nn::NetworkParams first_params;
    encoding::NormalizationStats first_stats = data.stats;
    nn::TrainConfig first_config = config;

    for (int repeat = 1; repeat <= args.repeats; ++repeat) {
      dataset::Split split = dataset::split_by_knot(
          data, target, args.test_knots,
          rng::derive_seed(args.seed, 0xA000u + static_cast<unsigned>(repeat)));
      encoding::NormalizationStats stats = data.stats;
      if (!args.normalize_all) {
        std::vector<encoding::FeatureVector> train_features;
        train_features.reserve(split.train.size());
        for (std::size_t idx : split.train) {
          train_features.push_back(data.rows[idx].features);
        }
        stats = encoding::fit_normalization(train_features);
      }
      data.reencode(stats);

      std::vector<std::vector<double>> inputs;
      std::vector<std::vector<double>> targets;
      inputs.reserve(split.train.size());
      targets.reserve(split.train.size());
      for (std::size_t idx : split.train) {
        inputs.push_back(data.rows[idx].encoded);
        targets.push_back(
            {dataset::label_value(data.rows[idx].labels, target)});
      }

      config.seed = rng::derive_seed(args.seed,
                                     0xB000u + static_cast<unsigned>(repeat));
      nn::NetworkParams params = nn::init_network(
          spec,
          rng::derive_seed(args.seed, 0xC000u + static_cast<unsigned>(repeat)));
      const nn::TrainHistory history =
          nn::train(spec, params, inputs, targets, config);

      out << "repeat " << repeat << "/" << args.repeats << ": trained on "
          << inputs.size() << " rows";
      if (!history.empty()) {
        out << ", final train loss " << std::fixed << std::setprecision(4)
            << history.back().mean_loss << std::defaultfloat;
      }
      out << "\n";

      if (!split.test.empty()) {
        std::size_t hits = 0;
        double abs_error = 0.0;
        for (std::size_t idx : split.test) {
          const double pred =
              nn::infer(spec, params, data.rows[idx].encoded)[0];
          const double want =
              dataset::label_value(data.rows[idx].labels, target);
          if (classification) {
            if (nn::classify(pred) == (want >= 0.5)) ++hits;
          } else {
            if (nn::round_half_up(pred) ==
                static_cast<long long>(std::llround(want))) {
              ++hits;
            }
            abs_error += std::abs(pred - want);
          }
        }
        const double accuracy =
            static_cast<double>(hits) / static_cast<double>(split.test.size());
        accuracy_sum += accuracy;
        ++accuracy_runs;
        out << "repeat " << repeat << "/" << args.repeats << ": test accuracy "
            << std::fixed << std::setprecision(4) << accuracy << " on "
            << split.test.size() << " rows";
        if (!classification) {
          out << " (mean absolute error "
              << abs_error / static_cast<double>(split.test.size()) << ")";
        }
        out << std::defaultfloat << "\n";
      }

      if (repeat == 1) {
        first_params = params;
        first_stats = stats;
        first_config = config;
      }
    }

    if (accuracy_runs > 0) {
      out << "mean test accuracy " << std::fixed << std::setprecision(4)
          << accuracy_sum / accuracy_runs << std::defaultfloat << " over "
          << accuracy_runs << " repeat(s)\n";
    }

    nn::NetworkParams final_params = std::move(first_params);
    encoding::NormalizationStats final_stats = first_stats;
    nn::TrainConfig final_config = first_config;
    if (args.final_full_data) {
      // retrain on every labeled row with whole-table statistics
      data.reencode(data.stats);
      std::vector<std::vector<double>> inputs;
      std::vector<std::vector<double>> targets;
      for (const dataset::AugmentedRow& row : data.rows) {
        inputs.push_back(row.encoded);
        targets.push_back({dataset::label_value(row.labels, target)});
      }
      final_config.seed = rng::derive_seed(args.seed, 0xF1);
      final_params =
          nn::init_network(spec, rng::derive_seed(args.seed, 0xF2));
      nn::train(spec, final_params, inputs, targets, final_config);
      final_stats = data.stats;
      out << "final model retrained on all " << inputs.size() << " rows\n";
    }

    if (!args.model_out.empty()) {
      model::ModelFile m;
      m.target = target;
      m.spec = spec;
      m.params = std::move(final_params);
      m.stats = final_stats;
      m.train_config = final_config;
      m.augment_reps = args.reps;
      m.augment_seed = args.seed;
      m.dataset_fingerprint = model::fingerprint_file(args.data_path);
      model::save_model(m, args.model_out);
      out << "saved model to " << args.model_out << " (data fingerprint "
          << m.dataset_fingerprint << ")\n";
    }
    return kExitSuccess;
  });
}

namespace {

struct KnotPrediction {
  std::string name;
  dataset::MeanPrediction stats;
};

// Shared predict pipeline: load, keep requested knots, augment with the
// model's settings, encode with the model's statistics, aggregate per knot.
std::vector<KnotPrediction> knot_predictions(
    const model::ModelFile& m, const std::string& data_path,
    const std::vector<std::string>& only,
    std::optional<std::uint64_t> seed_override, std::ostream& err) {
  dataset::LoadResult loaded = load_table(data_path, err);
  std::vector<dataset::KnotRecord> records;
  if (only.empty()) {
    records = std::move(loaded.records);
  } else {
    const std::set<std::string> wanted(only.begin(), only.end());
    std::set<std::string> found;
    for (auto& record : loaded.records) {
      if (wanted.count(record.name) != 0) {
        found.insert(record.name);
        records.push_back(std::move(record));
      }
    }
    for (const std::string& name : wanted) {
      if (found.count(name) == 0) {
        throw dataset::UnknownKnot("knot '" + name +
                                   "' does not appear in the table");
      }
    }
  }
  if (records.empty()) {
    throw dataset::UnknownKnot("no usable rows in " + data_path);
  }

  dataset::AugmentOptions options;
  options.reps = m.augment_reps;
  dataset::AugmentedDataset data = dataset::augment(
      records, options, seed_override.value_or(m.augment_seed), nullptr);
  data.reencode(m.stats);

  const auto predict = predictor(m);
  std::vector<KnotPrediction> predictions;
  for (const std::string& name : distinct_names(records)) {
    predictions.push_back({name, dataset::mean_prediction(predict, data, name)});
  }
  return predictions;
}

}  // namespace

int cmd_predict(const PredictArgs& args, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&]() -> int {
    const model::ModelFile m = model::load_model(args.model_path);
    const auto predictions =
        knot_predictions(m, args.data_path, args.knots, args.seed, err);
    out << "knot\tmean\tstddev\treps\tcall\n";
    for (const KnotPrediction& p : predictions) {
      out << p.name << '\t' << std::fixed << std::setprecision(4)
          << p.stats.mean << '\t' << p.stats.stddev << std::defaultfloat
          << '\t' << p.stats.representatives << '\t';
      if (m.target == dataset::Target::Quasipositivity) {
        out << (nn::classify(p.stats.mean) ? "quasipositive"
                                           : "not_quasipositive");
      } else {
        out << nn::round_half_up(p.stats.mean);
      }
      out << '\n';
    }
    return kExitSuccess;
  });
}

int cmd_rank_nonslice(const RankArgs& args, std::ostream& out,
                      std::ostream& err) {
  return guarded(err, [&]() -> int {
    const model::ModelFile m = model::load_model(args.model_path);
    if (m.target != dataset::Target::SliceGenus) {
      err << "error: ranking needs a slice-genus model, this one predicts "
          << dataset::to_string(m.target) << '\n';
      return kExitData;
    }
    auto predictions =
        knot_predictions(m, args.data_path, {}, args.seed, err);
    std::stable_sort(predictions.begin(), predictions.end(),
                     [](const KnotPrediction& a, const KnotPrediction& b) {
                       return std::abs(a.stats.mean - 1.0) <
                              std::abs(b.stats.mean - 1.0);
                     });
    out << "rank\tknot\tmean_g4\tdistance_to_1\n";
    std::size_t limit = predictions.size();
    if (args.top > 0) {
      limit = std::min(limit, static_cast<std::size_t>(args.top));
    }
    for (std::size_t i = 0; i < limit; ++i) {
      out << (i + 1) << '\t' << predictions[i].name << '\t' << std::fixed
          << std::setprecision(4) << predictions[i].stats.mean << '\t'
          << std::abs(predictions[i].stats.mean - 1.0) << std::defaultfloat
          << '\n';
    }
    return kExitSuccess;
  });
}

int cmd_verify_certs(const VerifyArgs& args, std::ostream& out,
                     std::ostream& err) {
  return guarded(err, [&]() -> int {
    const auto rows = quasipos::load_certificate_fixture(args.fixture_path);
    std::size_t passed = 0;
    for (const auto& row : rows) {
      std::string line = row.name;
      bool ok = false;
      if (!row.error.empty()) {
        out << line << "\tFAIL\t" << row.error << '\n';
        continue;
      }
      try {
        const quasipos::VerifyResult result =
            args.quasinegative
                ? quasipos::verify_quasinegative(row.cert, args.budget)
                : quasipos::verify_certificate(row.cert, args.budget);
        if (!result.valid) {
          line += "\tFAIL\t" + result.note;
        } else {
          const int genus = *result.genus;
          const int reported = args.quasinegative ? -genus : genus;
          const char* label = args.quasinegative ? "tau=" : "genus=";
          if (reported == row.expected) {
            ok = true;
            line += "\tPASS\t" + std::string(label) + std::to_string(reported);
            line += result.equality_method ==
                            quasipos::EqualityMethod::FreeReduction
                        ? "\tmethod=free"
                        : "\tmethod=handle";
          } else {
            line += "\tFAIL\t" + std::string(label) + std::to_string(reported) +
                    " (expected " + std::to_string(row.expected) + ")";
          }
        }
      } catch (const std::exception& e) {
        line += std::string("\tFAIL\t") + e.what();
      }
      if (ok) ++passed;
      out << line << '\n';
    }
    out << passed << "/" << rows.size() << " certificates verified\n";
    return passed == rows.size() ? kExitSuccess : kExitVerification;
  });
}

int cmd_search_qp(const SearchArgs& args, std::ostream& out,
                  std::ostream& err) {
  return guarded(err, [&]() -> int {
    dataset::LoadResult loaded = load_table(args.data_path, err);
    std::vector<dataset::KnotRecord> records;
    if (args.knots.empty()) {
      records = std::move(loaded.records);
    } else {
      const std::set<std::string> wanted(args.knots.begin(), args.knots.end());
      for (auto& record : loaded.records) {
        if (wanted.count(record.name) != 0) {
          records.push_back(std::move(record));
        }
      }
    }
    if (records.empty()) {
      err << "error: nothing to search\n";
      return kExitData;
    }

    // Optional model screen: only knots whose mean predicted probability
    // clears the cutoff are searched, most promising first.
    std::vector<std::pair<dataset::KnotRecord, double>> queue;
    if (!args.model_path.empty()) {
      const model::ModelFile m = model::load_model(args.model_path);
      if (m.target != dataset::Target::Quasipositivity) {
        err << "error: screening needs a quasipositivity model\n";
        return kExitData;
      }
      dataset::AugmentOptions options;
      options.reps = m.augment_reps;
      dataset::AugmentedDataset data =
          dataset::augment(records, options, m.augment_seed, nullptr);
      data.reencode(m.stats);
      const auto predict = predictor(m);
      for (auto& record : records) {
        const double mean =
            dataset::mean_prediction(predict, data, record.name).mean;
        if (mean >= args.cutoff) {
          queue.emplace_back(std::move(record), mean);
        }
      }
      std::stable_sort(queue.begin(), queue.end(),
                       [](const auto& a, const auto& b) {
                         return a.second > b.second;
                       });
      out << queue.size() << " of " << records.size()
          << " knots clear the screen at cutoff " << args.cutoff << "\n";
    } else {
      for (auto& record : records) {
        queue.emplace_back(std::move(record), -1.0);
      }
    }

    out << "knot\tresult\n";
    for (const auto& [record, prob] : queue) {
      out << record.name << '\t';
      try {
        const auto cert = quasipos::search_certificate(
            record.word, args.rewrite_budget,
            rng::derive_seed(args.seed, rng::hash64(record.name)));
        if (cert) {
          const auto result = quasipos::verify_certificate(*cert);
          out << "word=" << braid::format_braid(cert->word)
              << "\tcenters=" << format_centers(cert->centers)
              << "\tgenus=" << *result.genus;
        } else {
          out << "no certificate found";
        }
      } catch (const std::invalid_argument& e) {
        out << "skipped: " << e.what();
      } catch (const braid::BudgetExceeded&) {
        out << "no certificate found (budget exhausted)";
      }
      if (prob >= 0.0) {
        out << "\tprob=" << std::fixed << std::setprecision(4) << prob
            << std::defaultfloat;
      }
      out << '\n';
    }
    return kExitSuccess;
  });
}

int cmd_check_relations(const RelationArgs& args, std::ostream& out,
                        std::ostream& err) {
  return guarded(err, [&]() -> int {
    const model::ModelFile genus_model =
        model::load_model(args.genus_model_path);
    const model::ModelFile tau_model = model::load_model(args.tau_model_path);
    if (genus_model.target != dataset::Target::SliceGenus) {
      err << "error: first model must predict g4\n";
      return kExitData;
    }
    if (tau_model.target != dataset::Target::Tau) {
      err << "error: second model must predict tau\n";
      return kExitData;
    }

    dataset::LoadResult loaded = load_table(args.data_path, err);
    if (loaded.records.empty()) {
      err << "error: no usable rows in " << args.data_path << '\n';
      return kExitData;
    }
    // one shared augmentation; each model encodes with its own statistics
    dataset::AugmentOptions options;
    options.reps = genus_model.augment_reps;
    dataset::AugmentedDataset data = dataset::augment(
        loaded.records, options, genus_model.augment_seed, nullptr);

    const auto genus_predict = [&](const dataset::AugmentedRow& row) {
      return nn::infer(genus_model.spec, genus_model.params,
                       encoding::encode_record(row.word, row.features,
                                               genus_model.stats))[0];
    };
    const auto tau_predict = [&](const dataset::AugmentedRow& row) {
      return nn::infer(tau_model.spec, tau_model.params,
                       encoding::encode_record(row.word, row.features,
                                               tau_model.stats))[0];
    };
    const dataset::RelationReport report =
        dataset::relation_check(genus_predict, tau_predict, data);

    const auto percent = [&](std::size_t count) {
      return 100.0 * static_cast<double>(count) /
             static_cast<double>(std::max<std::size_t>(report.rows_checked, 1));
    };
    out << "checked " << report.rows_checked << " rows\n";
    out << "genus-vs-tau violations: " << report.tau_violations.size() << " ("
        << std::fixed << std::setprecision(2)
        << percent(report.tau_violations.size()) << "%)\n";
    out << "genus-vs-s violations: " << report.s_violations.size() << " ("
        << percent(report.s_violations.size()) << "%)\n"
        << std::defaultfloat;

    int listed = 0;
    for (const auto& v : report.tau_violations) {
      if (listed >= args.max_listed) break;
      const auto& row = data.rows[v.row];
      out << "  " << row.name << "#" << row.representative << ": g4 pred "
          << std::fixed << std::setprecision(3) << v.genus_prediction
          << " rounds below |tau pred " << v.tau_prediction << "|\n"
          << std::defaultfloat;
      ++listed;
    }
    listed = 0;
    for (const auto& v : report.s_violations) {
      if (listed >= args.max_listed) break;
      const auto& row = data.rows[v.row];
      out << "  " << row.name << "#" << row.representative << ": g4 pred "
          << std::fixed << std::setprecision(3) << v.genus_prediction
          << " rounds below |s|/2 = "
          << std::abs(row.features.rasmussen_s) / 2.0 << "\n"
          << std::defaultfloat;
      ++listed;
    }
    return kExitSuccess;
  });
}

int cmd_augment(const AugmentArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    dataset::LoadResult loaded = load_table(args.data_path, err);
    if (loaded.records.empty()) {
      err << "error: no usable rows in " << args.data_path << '\n';
      return kExitData;
    }
    std::vector<std::string> warnings;
    dataset::AugmentOptions options;
    options.reps = args.reps;
    const dataset::AugmentedDataset data =
        dataset::augment(loaded.records, options, args.seed, &warnings);
    for (const std::string& w : warnings) err << "warning: " << w << '\n';

    std::ofstream file;
    if (!args.out_path.empty()) {
      file.open(args.out_path);
      if (!file) {
        err << "error: cannot write " << args.out_path << '\n';
        return kExitData;
      }
    }
    std::ostream& sink = args.out_path.empty() ? out : file;
    sink << "# augmented knot table\n";
    sink << "# seed " << args.seed << "\n";
    sink << "# reps " << args.reps << "\n";
    sink << "name\trep\tbraid";
    for (const char* column : encoding::kFeatureNames) sink << '\t' << column;
    sink << "\tqp\tg4\ttau\n";
    for (const dataset::AugmentedRow& row : data.rows) {
      sink << row.name << '\t' << row.representative << '\t'
           << braid::format_braid(row.word);
      for (double v : row.features.as_array()) {
        sink << '\t' << static_cast<long long>(v);
      }
      const auto opt = [](const std::optional<int>& v) {
        return v ? std::to_string(*v) : std::string();
      };
      sink << '\t' << opt(row.labels.quasipositive) << '\t'
           << opt(row.labels.slice_genus) << '\t' << opt(row.labels.tau)
           << '\n';
    }
    if (!args.out_path.empty()) {
      out << "wrote " << data.rows.size() << " rows to " << args.out_path
          << '\n';
    }
    return kExitSuccess;
  });
}

int cmd_encode(const EncodeArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (args.word.empty() == args.data_path.empty()) {
      err << "error: pass exactly one of a braid word or a knot table\n";
      return kExitUsage;
    }
    if (!args.word.empty()) {
      const braid::BraidWord word = braid::parse_braid(args.word);
      const std::vector<double> encoded = encoding::encode_word(word);
      for (std::size_t i = 0; i < encoded.size(); ++i) {
        out << (i ? " " : "") << static_cast<int>(encoded[i]);
      }
      out << '\n';
      return kExitSuccess;
    }

    dataset::LoadResult loaded = load_table(args.data_path, err);
    if (loaded.records.empty()) {
      err << "error: no usable rows in " << args.data_path << '\n';
      return kExitData;
    }
    encoding::NormalizationStats stats;
    if (!args.model_path.empty()) {
      stats = model::load_model(args.model_path).stats;
    } else {
      std::vector<encoding::FeatureVector> features;
      for (const auto& record : loaded.records) {
        features.push_back(record.features);
      }
      stats = encoding::fit_normalization(features);
    }
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& record : loaded.records) {
      out << record.name;
      for (double v :
           encoding::encode_record(record.word, record.features, stats)) {
        out << '\t' << v;
      }
      out << '\n';
    }
    return kExitSuccess;
  });
}

}  // namespace knotnet::cli
