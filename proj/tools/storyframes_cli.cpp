// Thin shell over the C API: maps flags onto the run option schema,
// executes the pipeline, and reports failures as one JSON object on
// stderr. Exit codes: 2 arguments, 3 ingestion, 4 translation,
// 5 backend, 6 I/O.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "storyframes.h"

namespace {

using nlohmann::json;

int report_error(int exit_code, const std::string& name, const std::string& message) {
    json err = {{"error", {{"exit", exit_code}, {"name", name}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
    return exit_code;
}

int report_status(sf_status status) {
    return report_error(static_cast<int>(status), sf_last_error_name(), sf_last_error());
}

struct RunFlags {
    std::string config_path;
    std::string text, file, url;
    std::string lang, target_lang;
    std::string backend, backend_endpoint, model;
    int max_in_flight = 0;
    std::string translator, translator_endpoint;
    std::string detector, detector_endpoint;
    std::string out;
    bool keep_intermediate = false;
    uint64_t seed = 0;
    std::string mode, title, context_suffix, setting_image;
    std::string chunking;
    int window = 0, stride = 0;
    int dot_spacing_x = 0, edge_width_y = 0, object_dot_spacing = 0;
    double mutation_fraction = 0.0;
    std::string dot_polarity;
    std::vector<std::string> protected_regions;
    int white_threshold = 0;
    double object_scale = 0.0, anchor_row = 0.0, anchor_col = 0.0;
    int width = 0, height = 0;
};

bool parse_protected_flag(const std::string& value, json& out) {
    std::istringstream ss(value);
    std::vector<double> parts;
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        try {
            size_t used = 0;
            parts.push_back(std::stod(piece, &used));
            if (used != piece.size()) return false;
        } catch (...) {
            return false;
        }
    }
    if (parts.size() != 4) return false;
    out = json::array({parts[0], parts[1], parts[2], parts[3]});
    return true;
}

int cmd_run(const CLI::App& cmd, const RunFlags& flags) {
    json doc = json::object();
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path, std::ios::binary);
        if (!in) {
            return report_error(2, "InvalidArgs",
                                "config file is unreadable: " + flags.config_path);
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        doc = json::parse(ss.str(), nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            return report_error(2, "InvalidArgs",
                                "config file is not a JSON object: " + flags.config_path);
        }
    }

    auto given = [&cmd](const std::string& name) { return cmd.count(name) > 0; };

    // flags win over the config file; any input selector flag replaces
    // the file's selector entirely
    if (given("--text") || given("--file") || given("--url")) {
        doc.erase("text");
        doc.erase("file");
        doc.erase("url");
        if (given("--text")) doc["text"] = flags.text;
        if (given("--file")) doc["file"] = flags.file;
        if (given("--url")) doc["url"] = flags.url;
    }
    if (given("--lang")) doc["lang"] = flags.lang;
    if (given("--target-lang")) doc["target-lang"] = flags.target_lang;
    if (given("--backend")) doc["backend"] = flags.backend;
    if (given("--backend-endpoint")) doc["backend-endpoint"] = flags.backend_endpoint;
    if (given("--model")) doc["model"] = flags.model;
    if (given("--max-in-flight")) doc["max-in-flight"] = flags.max_in_flight;
    if (given("--translator")) doc["translator"] = flags.translator;
    if (given("--translator-endpoint")) doc["translator-endpoint"] = flags.translator_endpoint;
    if (given("--detector")) doc["detector"] = flags.detector;
    if (given("--detector-endpoint")) doc["detector-endpoint"] = flags.detector_endpoint;
    if (given("--out")) doc["out"] = flags.out;
    if (given("--keep-intermediate")) doc["keep-intermediate"] = flags.keep_intermediate;
    if (given("--seed")) doc["seed"] = flags.seed;
    if (given("--mode")) doc["mode"] = flags.mode;
    if (given("--title")) doc["title"] = flags.title;
    if (given("--context-suffix")) doc["context-suffix"] = flags.context_suffix;
    if (given("--setting-image")) doc["setting-image"] = flags.setting_image;
    if (given("--chunking")) doc["chunking"] = flags.chunking;
    if (given("--window")) doc["window"] = flags.window;
    if (given("--stride")) doc["stride"] = flags.stride;
    if (given("--dot-spacing-x")) doc["dot-spacing-x"] = flags.dot_spacing_x;
    if (given("--edge-width-y")) doc["edge-width-y"] = flags.edge_width_y;
    if (given("--object-dot-spacing")) doc["object-dot-spacing"] = flags.object_dot_spacing;
    if (given("--mutation-fraction")) doc["mutation-fraction"] = flags.mutation_fraction;
    if (given("--dot-polarity")) doc["dot-polarity"] = flags.dot_polarity;
    if (given("--protected")) {
        json arr = json::array();
        for (const std::string& value : flags.protected_regions) {
            json region;
            if (!parse_protected_flag(value, region)) {
                return report_error(2, "InvalidArgs",
                                    "--protected expects top,left,bottom,right fractions: " +
                                        value);
            }
            arr.push_back(region);
        }
        doc["protected"] = arr;
    }
    if (given("--white-threshold")) doc["white-threshold"] = flags.white_threshold;
    if (given("--object-scale")) doc["object-scale"] = flags.object_scale;
    if (given("--anchor-row")) doc["anchor-row"] = flags.anchor_row;
    if (given("--anchor-col")) doc["anchor-col"] = flags.anchor_col;
    if (given("--width")) doc["width"] = flags.width;
    if (given("--height")) doc["height"] = flags.height;

    char* manifest = nullptr;
    sf_status status = sf_story_run_json(doc.dump().c_str(), &manifest);
    if (status != SF_OK) return report_status(status);

    json parsed = json::parse(manifest, nullptr, false);
    sf_string_free(manifest);
    std::string out_dir = doc.value("out", std::string("."));
    size_t frames = 0;
    if (!parsed.is_discarded() && parsed.contains("frames")) frames = parsed["frames"].size();
    std::cout << "wrote " << frames << " frame(s) and manifest.json to " << out_dir << "\n";
    return 0;
}

struct PreviewFlags {
    std::string recipe;
    int width = 256, height = 256;
    int spacing = 4, edge_width = 16;
    std::string polarity = "dots-editable";
    double extent = 0.5;
    uint64_t seed = 0;
    std::string out;
};

int cmd_mask_preview(const PreviewFlags& flags) {
    sf_mask* mask = nullptr;
    sf_status status;
    if (flags.recipe == "edge") {
        status = sf_mask_edge(flags.width, flags.height, flags.edge_width, &mask);
    } else if (flags.recipe == "dotted") {
        if (flags.polarity != "dots-editable" && flags.polarity != "dots-fixed") {
            return report_error(2, "InvalidArgs",
                                "--dot-polarity must be dots-editable or dots-fixed");
        }
        status = sf_mask_dotted(flags.width, flags.height, flags.spacing, flags.edge_width,
                                flags.polarity == "dots-fixed" ? 1 : 0, &mask);
    } else if (flags.recipe == "center-rect") {
        status = sf_mask_center(flags.width, flags.height, "rect", flags.extent, &mask);
    } else if (flags.recipe == "center-ellipse") {
        status = sf_mask_center(flags.width, flags.height, "ellipse", flags.extent, &mask);
    } else if (flags.recipe == "random-ellipse") {
        status = sf_mask_random_ellipse(flags.width, flags.height, flags.seed, &mask);
    } else {
        return report_error(2, "InvalidArgs", "unknown recipe \"" + flags.recipe + "\"");
    }
    if (status != SF_OK) return report_status(status);

    status = sf_mask_save_png(mask, flags.out.c_str());
    size_t editable = sf_mask_editable_count(mask);
    sf_mask_free(mask);
    if (status != SF_OK) return report_status(status);
    std::cout << "wrote " << flags.out << " (" << editable << " editable pixels)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"turns narrative text into a coherent image sequence"};
    app.require_subcommand(1);

    RunFlags run;
    CLI::App* run_cmd = app.add_subcommand("run", "run a story end to end");
    run_cmd->add_option("--config", run.config_path, "JSON config file; flags override it");
    run_cmd->add_option("--text", run.text, "story text inline");
    run_cmd->add_option("--file", run.file, "read the story from a UTF-8 text file");
    run_cmd->add_option("--url", run.url, "fetch the story from a web page");
    run_cmd->add_option("--lang", run.lang, "source language hint (ISO-639 or auto)");
    run_cmd->add_option("--target-lang", run.target_lang, "prompt language (default en)");
    run_cmd->add_option("--backend", run.backend, "mock | remote");
    run_cmd->add_option("--backend-endpoint", run.backend_endpoint, "image API base URL");
    run_cmd->add_option("--model", run.model, "image model name");
    run_cmd->add_option("--max-in-flight", run.max_in_flight, "remote call concurrency cap");
    run_cmd->add_option("--translator", run.translator, "mock | mock:table.json | remote");
    run_cmd->add_option("--translator-endpoint", run.translator_endpoint,
                        "translation API endpoint");
    run_cmd->add_option("--detector", run.detector, "null | fixture:boxes.json | remote");
    run_cmd->add_option("--detector-endpoint", run.detector_endpoint, "OCR API endpoint");
    run_cmd->add_option("--out", run.out, "output directory");
    run_cmd->add_flag("--keep-intermediate", run.keep_intermediate,
                      "keep object canvas and background images");
    run_cmd->add_option("--seed", run.seed, "run seed");
    run_cmd->add_option("--mode", run.mode,
                        "plain | free-object | defined-setting | defined-setting-and-object");
    run_cmd->add_option("--title", run.title, "story title (drives object creation)");
    run_cmd->add_option("--context-suffix", run.context_suffix,
                        "style phrase appended to every prompt");
    run_cmd->add_option("--setting-image", run.setting_image, "setting photo (PNG)");
    run_cmd->add_option("--chunking", run.chunking,
                        "by-line | by-sentence | sentence-window | line-pair-stack");
    run_cmd->add_option("--window", run.window, "sentence-window size");
    run_cmd->add_option("--stride", run.stride, "sentence-window stride");
    run_cmd->add_option("--dot-spacing-x", run.dot_spacing_x, "background dot lattice pitch");
    run_cmd->add_option("--edge-width-y", run.edge_width_y, "fixed border width");
    run_cmd->add_option("--object-dot-spacing", run.object_dot_spacing,
                        "in-object dot pitch (0 disables)");
    run_cmd->add_option("--mutation-fraction", run.mutation_fraction,
                        "object area fraction mutated per frame");
    run_cmd->add_option("--dot-polarity", run.dot_polarity, "dots-editable | dots-fixed");
    run_cmd->add_option("--protected", run.protected_regions,
                        "protected object region top,left,bottom,right (repeatable)");
    run_cmd->add_option("--white-threshold", run.white_threshold,
                        "white background threshold (0-255)");
    run_cmd->add_option("--object-scale", run.object_scale, "object scale in (0,1]");
    run_cmd->add_option("--anchor-row", run.anchor_row, "object anchor row fraction");
    run_cmd->add_option("--anchor-col", run.anchor_col, "object anchor column fraction");
    run_cmd->add_option("--width", run.width, "frame width");
    run_cmd->add_option("--height", run.height, "frame height");

    PreviewFlags preview;
    CLI::App* preview_cmd = app.add_subcommand("mask-preview", "render a mask recipe to a PNG");
    preview_cmd
        ->add_option("--recipe", preview.recipe,
                     "edge | dotted | center-rect | center-ellipse | random-ellipse")
        ->required();
    preview_cmd->add_option("--width", preview.width, "mask width");
    preview_cmd->add_option("--height", preview.height, "mask height");
    preview_cmd->add_option("--spacing", preview.spacing, "dot lattice pitch");
    preview_cmd->add_option("--edge-width", preview.edge_width, "fixed border width");
    preview_cmd->add_option("--dot-polarity", preview.polarity, "dots-editable | dots-fixed");
    preview_cmd->add_option("--extent", preview.extent, "center shape extent (0,1]");
    preview_cmd->add_option("--seed", preview.seed, "random ellipse seed");
    preview_cmd->add_option("--out", preview.out, "output PNG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error(2, "InvalidArgs", e.what());
    }

    if (run_cmd->parsed()) return cmd_run(*run_cmd, run);
    return cmd_mask_preview(preview);
}
