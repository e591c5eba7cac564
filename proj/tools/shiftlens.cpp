// Copyright 2026 The ShiftLens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// shiftlens command-line front end.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "shiftlens/shiftlens.hpp"

namespace sl = shiftlens;
using nlohmann::json;

namespace {

void write_output(const sl::fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) sl::fs::create_directories(path.parent_path());
  sl::write_file_atomic(path, bytes);
}

void write_json(const sl::fs::path& path, const json& j) { write_output(path, j.dump(2) + "\n"); }

json read_json(const sl::fs::path& path) {
  json j = json::parse(sl::read_file(path), nullptr, false);
  if (j.is_discarded()) throw sl::FormatError(path.string() + ": invalid JSON");
  return j;
}

sl::PeriodSlice whole_or_range(const sl::Corpus& corpus, const std::string& from,
                               const std::string& to, const std::string& label) {
  if (corpus.empty()) throw sl::ArgumentError("corpus is empty");
  const sl::Date lo = from.empty() ? sl::date_of(corpus.documents().front().created_at)
                                   : sl::require_date(from);
  const sl::Date hi = to.empty() ? sl::date_of(corpus.documents().back().created_at)
                                 : sl::require_date(to);
  return sl::slice_by_period(corpus, lo, hi, label.empty() ? sl::month_label(lo) : label);
}

std::vector<sl::ProbePhraseSet> load_probes(const sl::fs::path& path,
                                            const std::string& activity,
                                            const std::string& modality) {
  std::vector<sl::ProbePhraseSet> out;
  for (const auto& d : sl::probe_definitions_from_json(read_json(path))) {
    if (!activity.empty() && d.activity != activity) continue;
    for (auto m : {sl::Modality::kOffline, sl::Modality::kOnline}) {
      if (!modality.empty() && sl::parse_modality(modality) != m) continue;
      out.push_back(d.build(m));
    }
  }
  if (out.empty()) throw sl::ArgumentError("no probe phrases selected from " + path.string());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus temporal-shift analytics", "shiftlens"};
  app.set_version_flag("--version", SHIFTLENS_VERSION);
  app.require_subcommand(1);

  // ingest
  std::string in_path, source = "other", out_path;
  auto* ingest = app.add_subcommand("ingest", "Normalize a JSONL(.gz) archive into a corpus directory");
  ingest->add_option("--input", in_path, "JSONL records (id, text, created_at)")
      ->required()->check(CLI::ExistingPath);
  ingest->add_option("--source", source, "twitter-archive|reddit-archive|synthetic|other");
  ingest->add_option("--out", out_path, "Corpus directory")->required();

  // synth
  std::string spec_path, labels_path;
  uint64_t seed = 13;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus from a spec");
  synth->add_option("--spec", spec_path)->required()->check(CLI::ExistingPath);
  synth->add_option("--seed", seed);
  synth->add_option("--out", out_path, "JSONL records")->required();
  synth->add_option("--labels", labels_path, "Sidecar id<TAB>topic file");

  // embed
  std::string corpus_dir;
  size_t dim = 256;
  auto* embed = app.add_subcommand("embed", "Embed a corpus with the reference embedder");
  embed->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingPath);
  embed->add_option("--dim", dim);
  embed->add_option("--seed", seed);
  embed->add_option("--out", out_path, "SLVX vector file")->required();

  // retrieve
  std::string corpus_vectors, seed_vectors, activity, expand = "centroid", anchors_tsv;
  std::optional<double> threshold;
  size_t k_anchors = sl::kDefaultAnchors;
  auto* retrieve = app.add_subcommand("retrieve", "Seed-query retrieval with a cosine threshold");
  retrieve->add_option("--vectors", corpus_vectors, "Corpus SLVX file")
      ->required()->check(CLI::ExistingPath);
  retrieve->add_option("--seed-vectors", seed_vectors, "Seed-corpus SLVX file")
      ->required()->check(CLI::ExistingPath);
  retrieve->add_option("--activity", activity)->required();
  retrieve->add_option("--threshold", threshold);
  retrieve->add_option("--k-anchors", k_anchors);
  retrieve->add_option("--expand", expand, "centroid|max");
  retrieve->add_option("--out", out_path)->required();
  retrieve->add_option("--corpus", corpus_dir, "Corpus directory, for --anchors-tsv")
      ->check(CLI::ExistingPath);
  retrieve->add_option("--anchors-tsv", anchors_tsv, "Anchor review sheet");

  // counts
  std::string retrieval_path, from, to, label;
  auto* counts = app.add_subcommand("counts", "Zero-filled daily counts of retrieved documents");
  counts->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingPath);
  counts->add_option("--retrieval", retrieval_path)->required()->check(CLI::ExistingPath);
  counts->add_option("--from", from)->required();
  counts->add_option("--to", to)->required();
  counts->add_option("--label", label);
  counts->add_option("--out", out_path)->required();

  // lm-train
  int order = 3;
  double k = 0.1;
  uint64_t min_count = 2;
  std::vector<double> lambdas;
  auto* lm_train = app.add_subcommand("lm-train", "Train an n-gram model on a period slice");
  lm_train->add_option("--slice", corpus_dir, "Corpus directory")
      ->required()->check(CLI::ExistingPath);
  lm_train->add_option("--from", from, "First day (default: first document)");
  lm_train->add_option("--to", to, "Last day (default: last document)");
  lm_train->add_option("--label", label, "Period label (default: month of --from)");
  lm_train->add_option("--order", order);
  lm_train->add_option("--k", k);
  lm_train->add_option("--min-count", min_count);
  lm_train->add_option("--lambdas", lambdas, "Interpolation weights, highest order first");
  lm_train->add_option("--out", out_path, "Model directory")->required();

  // lm-score
  std::string lm_dir, phrases, modality, export_path;
  auto* lm_score = app.add_subcommand("lm-score", "Perplexity of probe phrases under a model");
  lm_score->add_option("--lm", lm_dir)->required()->check(CLI::ExistingPath);
  lm_score->add_option("--phrases", phrases, "Probe phrase definitions (JSON)")
      ->required()->check(CLI::ExistingPath);
  lm_score->add_option("--activity", activity);
  lm_score->add_option("--modality", modality);
  lm_score->add_option("--out", out_path, "Report JSON")->required();
  lm_score->add_option("--export", export_path, "Token log-prob JSONL");

  // lm-shift
  std::string pre, during, scores, pre_period, during_period;
  bool unpaired = false;
  auto* lm_shift = app.add_subcommand("lm-shift", "Perplexity-difference t test between two periods");
  lm_shift->add_option("--pre", pre, "Pre-period model directory")->check(CLI::ExistingPath);
  lm_shift->add_option("--during", during, "During-period model directory")
      ->check(CLI::ExistingPath);
  lm_shift->add_option("--scores", scores, "Token log-prob JSONL instead of models")
      ->check(CLI::ExistingPath);
  lm_shift->add_option("--pre-period", pre_period, "Period label in --scores");
  lm_shift->add_option("--during-period", during_period, "Period label in --scores");
  lm_shift->add_option("--phrases", phrases, "Probe phrase definitions (JSON)")
      ->check(CLI::ExistingPath);
  lm_shift->add_option("--activity", activity)->required();
  lm_shift->add_option("--modality", modality)->required();
  lm_shift->add_flag("--unpaired", unpaired, "Two-sample test instead of paired");
  lm_shift->add_option("--out", out_path)->required();

  // freqshift
  bool weekday_align = false, paired_d = false;
  std::string plot_path;
  auto* freqshift = app.add_subcommand("freqshift", "Paired t test and Cohen's d on daily counts");
  freqshift->add_option("--pre", pre, "Pre-period counts CSV")
      ->required()->check(CLI::ExistingPath);
  freqshift->add_option("--during", during, "During-period counts CSV")
      ->required()->check(CLI::ExistingPath);
  freqshift->add_flag("--weekday-align", weekday_align);
  freqshift->add_flag("--paired-d", paired_d, "Standardize d by the sd of differences");
  freqshift->add_option("--out", out_path)->required();
  freqshift->add_option("--plot", plot_path, "Plot-data CSV");

  // lexshift
  std::string pre_from, pre_to, during_from, during_to, wordcloud;
  double alpha0 = sl::kDefaultAlpha0;
  uint64_t lex_min = sl::kDefaultLexicalMinCount;
  size_t top_n = 100;
  auto* lexshift = app.add_subcommand("lexshift", "Log-odds with an informed Dirichlet prior");
  lexshift->add_option("--corpus", corpus_dir)->required()->check(CLI::ExistingPath);
  lexshift->add_option("--retrieval", retrieval_path, "Restrict to retrieved documents")
      ->check(CLI::ExistingPath);
  lexshift->add_option("--pre-from", pre_from)->required();
  lexshift->add_option("--pre-to", pre_to)->required();
  lexshift->add_option("--during-from", during_from)->required();
  lexshift->add_option("--during-to", during_to)->required();
  lexshift->add_option("--alpha0", alpha0);
  lexshift->add_option("--min-count", lex_min);
  lexshift->add_option("--out", out_path, "Lexical CSV")->required();
  lexshift->add_option("--wordcloud", wordcloud, "Word-cloud weights for the pre side");
  lexshift->add_option("--top-n", top_n);

  // survey
  std::string tables, respondents, denominator = "all_respondents";
  auto* survey = app.add_subcommand("survey", "Net engagement change from questionnaire tables");
  survey->add_option("--tables", tables)->check(CLI::ExistingPath);
  survey->add_option("--respondents", respondents)->check(CLI::ExistingPath);
  survey->add_option("--denominator", denominator, "all_respondents|regular_doers");
  survey->add_option("--out", out_path)->required();

  // run
  std::string config, output_dir, from_stage;
  bool no_timings = false;
  auto* run = app.add_subcommand("run", "Run the configured pipeline");
  run->add_option("--config", config)->required();
  run->add_option("--output-dir", output_dir, "Override the configured output directory");
  run->add_option("--from-stage", from_stage, "Reuse artifacts of earlier stages");
  run->add_flag("--no-timings", no_timings, "Leave timings out of the manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sl::kExitValidation;
  }

  try {
    if (*ingest) {
      auto r = sl::ingest_documents(sl::fs::path(in_path), sl::parse_source(source));
      sl::fs::create_directories(out_path);
      sl::write_corpus_dir(out_path, r.corpus, r.report);
      std::cout << sl::ingest_manifest(r.corpus, r.report).dump(2) << "\n";
    } else if (*synth) {
      auto s = sl::generate_synthetic_corpus(sl::synth_spec_from_json(read_json(spec_path)), seed);
      write_output(out_path, sl::synthetic_records(s));
      if (!labels_path.empty()) write_output(labels_path, sl::synthetic_labels_tsv(s));
      std::cout << s.corpus.size() << " documents\n";
    } else if (*embed) {
      const auto corpus = sl::read_corpus_dir(corpus_dir);
      std::vector<std::pair<std::string, sl::Vector>> entries;
      for (const auto& d : corpus.documents()) {
        entries.emplace_back(d.id, sl::embed_reference(d.text_norm, dim, seed));
      }
      sl::EmbeddingIndex index(dim, std::move(entries));
      if (sl::fs::path(out_path).has_parent_path()) {
        sl::fs::create_directories(sl::fs::path(out_path).parent_path());
      }
      sl::write_vectors(index, out_path);
    } else if (*retrieve) {
      const auto index = sl::read_vectors(corpus_vectors);
      const auto seeds_index = sl::read_vectors(seed_vectors);
      std::vector<sl::Vector> seeds;
      for (size_t i = 0; i < seeds_index.size(); ++i) {
        auto v = seeds_index.vector(i);
        seeds.emplace_back(v.begin(), v.end());
      }
      sl::ActivityQuerySpec q{activity, k_anchors, threshold, sl::parse_expand_mode(expand)};
      const auto r = sl::retrieve(q, seeds, index);
      write_json(out_path, sl::retrieval_result_json(r));
      if (!anchors_tsv.empty()) {
        if (corpus_dir.empty()) throw sl::ArgumentError("--anchors-tsv needs --corpus");
        write_output(anchors_tsv, sl::anchor_review_tsv(r, sl::read_corpus_dir(corpus_dir)));
      }
      std::cout << r.matched.size() << " matched at threshold " << r.threshold_used << "\n";
    } else if (*counts) {
      const auto corpus = sl::read_corpus_dir(corpus_dir);
      const auto r = sl::retrieval_result_from_json(read_json(retrieval_path));
      const auto slice = whole_or_range(corpus, from, to, label);
      write_output(out_path, sl::series_csv(sl::daily_counts(
                                 corpus, slice, sl::restrict_to_slice(slice, r.matched_ids()),
                                 r.activity)));
    } else if (*lm_train) {
      const auto corpus = sl::read_corpus_dir(corpus_dir);
      const auto slice = whole_or_range(corpus, from, to, label);
      sl::LmOptions o;
      o.order = order;
      o.k = k;
      o.min_count = min_count;
      o.lambdas = lambdas;
      const auto lm = sl::NgramLanguageModel::train(sl::slice_tokens(corpus, slice), o, slice.label);
      sl::fs::create_directories(out_path);
      lm.save(out_path);
      std::cout << lm.metadata().dump(2) << "\n";
    } else if (*lm_score) {
      const auto lm = sl::NgramLanguageModel::load(lm_dir);
      json sets = json::array();
      std::vector<sl::ImportedScore> exported;
      for (const auto& set : load_probes(phrases, activity, modality)) {
        auto scored = sl::score_for_export(lm, set);
        std::vector<sl::PerplexityReport> reports;
        for (const auto& s : scored) reports.push_back(s.report);
        auto j = sl::perplexity_summary_json(sl::summarize(std::move(reports)));
        j["activity"] = set.activity;
        j["modality"] = std::string(sl::modality_name(set.modality));
        sets.push_back(j);
        exported.insert(exported.end(), scored.begin(), scored.end());
      }
      write_json(out_path, {{"period", lm.period_label()}, {"sets", sets}});
      if (!export_path.empty()) write_output(export_path, sl::export_token_logprobs(exported));
    } else if (*lm_shift) {
      const auto m = sl::parse_modality(modality);
      sl::ShiftTestResult r;
      if (!scores.empty()) {
        if (pre_period.empty() || during_period.empty()) {
          throw sl::ArgumentError("--scores needs --pre-period and --during-period");
        }
        auto [a, b] = sl::imported_pair(sl::import_token_logprobs(scores), pre_period,
                                        during_period, activity, m);
        r = sl::perplexity_shift(a, b, {unpaired});
        r.activity = activity;
        r.modality = m;
        r.months = {pre_period, during_period};
        r.variant_flags["source"] = "imported";
      } else {
        if (pre.empty() || during.empty() || phrases.empty()) {
          throw sl::ArgumentError("give --pre, --during and --phrases, or --scores");
        }
        const auto sets = load_probes(phrases, activity, modality);
        r = sl::perplexity_shift(sl::NgramLanguageModel::load(pre),
                                 sl::NgramLanguageModel::load(during), sets.front(), {unpaired});
        r.variant_flags["source"] = "ngram";
      }
      write_json(out_path, sl::shift_result_json(r));
      std::cout << "t=" << r.t_value << " p=" << r.p_value << " direction "
                << sl::direction_name(r.direction) << "\n";
    } else if (*freqshift) {
      const auto a = sl::read_series_csv(pre), b = sl::read_series_csv(during);
      const auto f = sl::frequency_shift(a, b, {weekday_align, paired_d});
      write_json(out_path, sl::frequency_shift_json(f));
      if (!plot_path.empty()) write_output(plot_path, sl::emit_plot_data(a, b));
      std::cout << "t=" << f.test.t_value << " p=" << f.test.p_value << " d=" << f.effect.d
                << "\n";
    } else if (*lexshift) {
      const auto corpus = sl::read_corpus_dir(corpus_dir);
      std::optional<std::vector<std::string>> matched;
      if (!retrieval_path.empty()) {
        matched = sl::retrieval_result_from_json(read_json(retrieval_path)).matched_ids();
      }
      auto counts_for = [&](const std::string& f, const std::string& t, const std::string& l) {
        auto slice = whole_or_range(corpus, f, t, l);
        if (matched) slice.doc_ids = sl::restrict_to_slice(slice, *matched);
        return sl::count_tokens(sl::slice_tokens(corpus, slice));
      };
      auto report = sl::log_odds_dirichlet(counts_for(pre_from, pre_to, "pre"),
                                           counts_for(during_from, during_to, "during"), alpha0,
                                           lex_min);
      report.corpus_i = pre_from + ".." + pre_to;
      report.corpus_j = during_from + ".." + during_to;
      write_output(out_path, sl::lexical_csv(report));
      if (!wordcloud.empty()) write_output(wordcloud, sl::emit_wordcloud_weights(report, top_n));
    } else if (*survey) {
      if (tables.empty() && respondents.empty()) {
        throw sl::ArgumentError("give --tables and/or --respondents");
      }
      json out = json::object();
      if (!tables.empty()) {
        sl::SurveyDenominator d = sl::SurveyDenominator::kAllRespondents;
        if (denominator == "regular_doers") {
          d = sl::SurveyDenominator::kRegularDoers;
        } else if (denominator != "all_respondents") {
          throw sl::ArgumentError("unknown denominator '" + denominator + "'");
        }
        const auto loaded = sl::load_survey(sl::fs::path(tables));
        json rows = json::array();
        for (const auto& t : loaded.tables) {
          rows.push_back(sl::net_change_json(sl::net_engagement_change(t, d)));
        }
        out["tables"] = rows;
        out["load_report"] = sl::survey_load_report_json(loaded.report);
      }
      if (!respondents.empty()) {
        out["demographics"] =
            sl::demographics_json(sl::summarize_demographics(sl::fs::path(respondents)));
      }
      write_json(out_path, out);
    } else if (*run) {
      sl::RunOptions opts;
      if (!from_stage.empty()) opts.from_stage = from_stage;
      opts.record_timings = !no_timings;
      std::optional<sl::fs::path> override_dir;
      if (!output_dir.empty()) override_dir = sl::fs::absolute(output_dir);
      const auto outcome = sl::run_pipeline(config, opts, override_dir);
      if (outcome.exit_code != sl::kExitOk) {
        std::cerr << "shiftlens: " << outcome.message << "\n";
      } else {
        std::cout << "run complete, config " << outcome.manifest.value("config_hash", "") << "\n";
      }
      return outcome.exit_code;
    }
  } catch (const sl::ValidationError& e) {
    std::cerr << "shiftlens: " << e.what() << "\n";
    return sl::kExitValidation;
  } catch (const sl::ArgumentError& e) {
    std::cerr << "shiftlens: " << e.what() << "\n";
    return sl::kExitValidation;
  } catch (const sl::FormatError& e) {
    std::cerr << "shiftlens: " << e.what() << "\n";
    return sl::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "shiftlens: " << e.what() << "\n";
    return sl::kExitStageFailure;
  }
  return sl::kExitOk;
}
