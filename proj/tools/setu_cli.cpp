// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors
//
// setu: duplicate crowdtesting report detection from the command line.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "setu/commands.hpp"
#include "setu/error.hpp"

namespace cmd = setu::commands;

int main(int argc, char** argv) {
    CLI::App app{"SETU duplicate crowdtesting report detection"};
    app.require_subcommand(1);

    cmd::FeaturizeOptions feat;
    std::string segmentation;
    auto* featurize = app.add_subcommand("featurize", "extract features for every report of a corpus");
    featurize->add_option("--corpus", feat.corpus, "corpus manifest (JSON)")->required();
    featurize->add_option("--stopwords", feat.resources.stopwords, "stopword list, one per line")->required();
    featurize->add_option("--synonyms", feat.resources.synonyms, "synonym table: canonical<TAB>variant...")->required();
    featurize->add_option("--embeddings", feat.resources.embeddings, "word vectors, text format")->required();
    featurize->add_option("--segmentation", segmentation, "CJK segmentation lexicon, one word per line");
    featurize->add_option("--out", feat.out, "feature store to write")->required();

    cmd::QueryOptions query;
    std::optional<std::size_t> query_dim;
    auto* query_cmd = app.add_subcommand("query", "rank duplicate candidates for one report (JSON on stdout)");
    query_cmd->add_option("--store", query.store)->required();
    query_cmd->add_option("--report", query.report, "query report_id")->required();
    query_cmd->add_option("--combiner", query.combiner, "setu|addcmb|multiplycmb|textfirst|onlytext|onlyimage")
        ->capture_default_str();
    query_cmd->add_option("--thres", query.thres, "screenshot threshold of setu / textual threshold of textfirst")
        ->capture_default_str();
    query_cmd->add_option("--mask", query.mask, "full|notf|noemb|noclr|nostrc")->capture_default_str();
    query_cmd->add_option("--top-k", query.top_k)->capture_default_str();
    query_cmd->add_option("--embedding-dim", query_dim, "refuse stores built with another embedding dimension");

    cmd::EvaluateOptions eval;
    auto* evaluate = app.add_subcommand("evaluate", "recall@k, MAP and MRR per method and project");
    evaluate->add_option("--store", eval.store)->required();
    evaluate->add_option("--corpus", eval.corpus, "corpus manifest supplying labels")->required();
    evaluate->add_option("--methods", eval.methods, "comma list of <combiner>[:<mask>][@<thres>]")
        ->capture_default_str();
    evaluate->add_option("--reference", eval.reference, "baseline for improvement columns (default: first method)");
    evaluate->add_option("--unique-label", eval.unique_label, "label marking reports without duplicates")
        ->capture_default_str();
    evaluate->add_option("--out", eval.out, "output directory")->required();

    cmd::CompareOptions cmp;
    auto* compare = app.add_subcommand("compare", "Mann-Whitney U and Cliff's delta between two per-query dumps");
    compare->add_option("--a", cmp.a, "per-query dump of the method expected to be better")->required();
    compare->add_option("--b", cmp.b, "per-query dump of the baseline")->required();
    compare->add_option("--out", cmp.out, "output file (.json for JSON, otherwise CSV)")->required();

    cmd::TuneOptions tune;
    auto* tune_cmd = app.add_subcommand("tune", "leave-one-out threshold tuning (JSON on stdout)");
    tune_cmd->add_option("--stores", tune.stores, "store file or directory of *.store files")->required();
    tune_cmd->add_option("--corpus", tune.corpus, "corpus manifest supplying labels")->required();
    tune_cmd->add_option("--holdout", tune.holdout, "held-out project id")->required();
    tune_cmd->add_option("--grid-step", tune.grid_step)->capture_default_str();
    tune_cmd->add_option("--mask", tune.mask)->capture_default_str();
    tune_cmd->add_option("--unique-label", tune.unique_label)->capture_default_str();

    cmd::SynthOptions syn;
    std::optional<std::uint64_t> seed;
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--spec", syn.spec, "generator spec (JSON)")->required();
    synth->add_option("--out", syn.out, "output directory")->required();
    synth->add_option("--seed", seed, "overrides the spec's seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*featurize) {
            if (!segmentation.empty()) {
                feat.resources.segmentation = segmentation;
            }
            (void)cmd::cmd_featurize(feat, std::cerr);
        } else if (*query_cmd) {
            query.embedding_dim = query_dim;
            (void)cmd::cmd_query(query, std::cout);
        } else if (*evaluate) {
            (void)cmd::cmd_evaluate(eval, std::cerr);
        } else if (*compare) {
            (void)cmd::cmd_compare(cmp, std::cerr);
        } else if (*tune_cmd) {
            (void)cmd::cmd_tune(tune, std::cout);
        } else if (*synth) {
            syn.seed = seed;
            (void)cmd::cmd_synth(syn, std::cerr);
        }
    } catch (const setu::Error& e) {
        std::cerr << "setu: error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "setu: unexpected error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
