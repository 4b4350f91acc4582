#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tweetner/cli.hpp"

using tweetner::cli::RunConfig;

int main(int argc, char** argv) {
    CLI::App app{"Trigram-HMM named entity tagger for short social-media texts"};
    app.require_subcommand(1);

    RunConfig cfg;
    bool machine = false;
    std::string gold_path, pred_path;
    std::vector<std::string> query;

    auto add_pos_opts = [&](CLI::App* cmd) {
        cmd->add_option("--pos-cmd", cfg.pos_cmd,
                        "External POS tagger command (tokens in, one tag per line out)");
        cmd->add_option("--pos-file", cfg.pos_file,
                        "Parallel file with a POS column (interchange layout)");
        cmd->add_option("--default-pos", cfg.default_pos,
                        "POS tag used when no POS source is given");
    };
    auto add_model_opts = [&](CLI::App* cmd) {
        cmd->add_option("--suffix-max-len", cfg.model.suffix_max_len,
                        "Longest suffix kept by the unknown-word model");
        cmd->add_option("--rare-threshold", cfg.model.rare_threshold,
                        "Max frequency of pseudo-words feeding the suffix model");
        cmd->add_flag("--eq7-literal", cfg.model.eq7_literal,
                      "Use the observed-symbol emission denominator C(o) instead of C(t)");
    };

    CLI::App* convert = app.add_subcommand("convert", "Two-file training format -> IOB file");
    convert->add_option("raw", cfg.raw_path, "Raw tweet file")->required();
    convert->add_option("annotations", cfg.annotation_path, "6-column annotation file")->required();
    convert->add_option("-o,--output", cfg.output_path, "IOB interchange output")->required();
    add_pos_opts(convert);

    CLI::App* train = app.add_subcommand("train", "IOB file with POS column -> model file");
    train->add_option("iob", cfg.iob_path, "IOB interchange file")->required();
    train->add_option("-g,--gazetteers", cfg.gazetteer_dir, "Gazetteer directory");
    train->add_option("-o,--output", cfg.output_path, "Model file output")->required();
    add_model_opts(train);

    CLI::App* tag = app.add_subcommand("tag", "Raw tweet file + model -> annotation file");
    tag->add_option("raw", cfg.raw_path, "Raw tweet file")->required();
    tag->add_option("-m,--model", cfg.model_path, "Model file")->required();
    tag->add_option("-g,--gazetteers", cfg.gazetteer_dir, "Gazetteer directory");
    tag->add_option("-o,--output", cfg.output_path, "Annotation file output")->required();
    add_pos_opts(tag);

    CLI::App* eval = app.add_subcommand("eval", "Entity-level P/R/F of predicted vs gold");
    eval->add_option("gold", gold_path, "Gold annotation file")->required();
    eval->add_option("predicted", pred_path, "Predicted annotation file")->required();
    eval->add_flag("--machine", machine, "Tab-separated TYPE/P/R/F lines");

    CLI::App* inspect = app.add_subcommand("inspect", "Probe a model file");
    inspect->add_option("-m,--model", cfg.model_path, "Model file")->required();
    inspect->add_option("query", query, "trans <t2> <t1> | emit <w> <x> <m> | suffix <w> <x> <m>")
        ->required();

    app.add_option("-v,--verbosity", cfg.verbosity, "0 = quiet");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (convert->parsed()) return tweetner::cli::cmd_convert(cfg);
        if (train->parsed()) return tweetner::cli::cmd_train(cfg);
        if (tag->parsed()) return tweetner::cli::cmd_tag(cfg);
        if (eval->parsed()) return tweetner::cli::cmd_eval(gold_path, pred_path, machine);
        if (inspect->parsed()) return tweetner::cli::cmd_inspect(cfg.model_path, query);
    } catch (const tweetner::cli::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const tweetner::cli::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
