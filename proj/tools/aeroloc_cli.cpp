// Command-line surface for the localization toolkit: vocabulary building,
// database encoding, retrieval evaluation, offline alignment, closed-loop
// simulation, and trajectory comparison.

#include "aeroloc/scenario.hpp"
#include "aeroloc/metrics.hpp"
#include "aeroloc/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using namespace aeroloc;

Scenario scenario_from(const std::string& path, std::uint64_t seed, bool reseed) {
    Scenario s = path.empty() ? Scenario{} : load_scenario(path);
    if (reseed) apply_seed(s, seed);
    return s;
}

int cmd_build_vocab(const std::vector<std::string>& feature_files,
                    const std::string& scenario_path, std::size_t n_c,
                    bool n_c_given, std::uint64_t seed, const std::string& out) {
    std::vector<LocalFeatureSet> sets;
    for (const auto& f : feature_files) sets.push_back(load_features(f));
    Vocabulary vocab;
    if (sets.empty()) {
        Scenario s = scenario_from(scenario_path, seed, true);
        if (n_c_given) s.vocab_n_c = n_c;
        vocab = s.make_vocabulary();
    } else {
        vocab = build_vocabulary(sets, n_c, seed);
    }
    save_vocabulary(vocab, out);
    std::cout << "vocabulary: n_c=" << vocab.n_c() << " d=" << vocab.dim()
              << " inertia=" << vocab.final_inertia << "\ncluster sizes:";
    for (auto s : vocab.cluster_sizes) std::cout << ' ' << s;
    std::cout << "\nwrote " << out << "\n";
    return 0;
}

int cmd_encode_db(const std::string& scenario_path, const std::string& manifest,
                  const std::string& vocab_path, std::uint64_t seed,
                  const std::string& out, const std::string& manifest_out) {
    Scenario s = scenario_from(scenario_path, seed, true);
    const TileGrid grid = manifest.empty() ? s.make_grid() : load_tile_manifest(manifest);
    const Vocabulary vocab = load_vocabulary(vocab_path);
    const DescriptorDb db = s.make_db(grid, vocab);
    save_db(db, out);
    if (!manifest_out.empty()) save_tile_manifest(grid, manifest_out);
    std::cout << "database: " << db.size() << " tiles, fingerprint "
              << db.vocab_fingerprint << "\nwrote " << out << "\n";
    return 0;
}

int cmd_eval(const std::string& db_path, const std::string& queries_path,
             const std::string& scenario_path, std::size_t k, std::size_t n,
             std::uint64_t seed, const std::string& out_dir) {
    Scenario s = scenario_from(scenario_path, seed, true);
    const DescriptorDb db = load_db(db_path);
    const Vocabulary vocab = s.make_vocabulary();
    ensure_vocab(db, vocab);
    const TileGrid grid = s.make_grid();

    GeoTrajectory queries;
    if (!queries_path.empty()) {
        queries = load_geo_csv(queries_path);
    } else {
        queries = generate_truth(s.trajectory,
                                 {grid.origin.easting + grid.extent_x / 2.0,
                                  grid.origin.northing + grid.extent_y / 2.0},
                                 1.0 / s.pipeline.keyframe_hz);
    }

    fs::create_directories(out_dir);
    std::ofstream detail(fs::path(out_dir) / "queries.jsonl");
    std::vector<EvalRecord> records;
    for (std::size_t q = 0; q < queries.samples.size(); ++q) {
        const auto& pos = queries.samples[q].point;
        const LocalFeatureSet feats =
            synth_features(s.world, pos, grid.tiles.front().fov, ImageStyle::Camera,
                           s.pipeline.feature_noise_sigma,
                           hash_combine(s.pipeline.seed, 0xE7A1ULL + q));
        const RetrievalResult res =
            query_topk(db, encode(feats, vocab), std::max(n, k), std::to_string(q));
        EvalRecord rec;
        rec.query_id = q;
        for (const auto& m : res.matches) rec.retrieved_ids.push_back(m.tile_id);
        rec.gt_ids = ground_truth_neighbors(grid, pos, std::min(n, grid.tiles.size()));
        json j{{"query", q},
               {"retrieved", rec.retrieved_ids},
               {"gt", rec.gt_ids}};
        detail << j.dump() << "\n";
        records.push_back(std::move(rec));
    }

    const double r1 = recall_at_n(records, 1);
    const double rn = recall_at_n(records, n);
    const double tkn = top_k_at_n(records, k, n);

    std::ofstream report(fs::path(out_dir) / "report.csv");
    report << "metric,k,n,value\n";
    report << "recall,1,1," << 100.0 * r1 << "\n";
    report << "recall," << n << ',' << n << ',' << 100.0 * rn << "\n";
    report << "top_k_at_n," << k << ',' << n << ',' << 100.0 * tkn << "\n";

    std::cout << "Method   R@1    R@" << n << "    Top-" << k << "@" << n << "\n";
    char line[128];
    std::snprintf(line, sizeof(line), "synth    %.2f  %.2f  %.2f\n", 100.0 * r1,
                  100.0 * rn, 100.0 * tkn);
    std::cout << line << "wrote " << out_dir << "/report.csv\n";
    return 0;
}

int cmd_align(const std::string& pairs_path, const std::string& mode, double weight,
              const std::string& out) {
    // correspondence CSV: local_x,local_y,local_z,easting,northing
    std::ifstream in(pairs_path);
    if (!in) throw std::runtime_error("cannot open " + pairs_path);
    std::string line;
    std::getline(in, line);  // header
    CorrespondenceWindow window(std::numeric_limits<std::size_t>::max());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != 5) throw std::runtime_error("bad correspondence row");
        window.push({row[0], row[1], row[2]}, {row[3], row[4]});
    }

    const GravityVector gl({0, 0, -1}, GravityFrame::Local);
    const GravityVector gw({0, 0, -1}, GravityFrame::World);
    AlignmentReport rep;
    if (mode == "rigid") rep = align_rigid(window);
    else if (mode == "gravity") rep = align_gravity(window, gl, gw);
    else if (mode == "gravity-soft") rep = align_gravity_soft(window, gl, gw, weight);
    else throw std::runtime_error("unknown alignment mode " + mode);

    json j{{"rotation", {rep.transform.rotation(0, 0), rep.transform.rotation(0, 1),
                         rep.transform.rotation(0, 2), rep.transform.rotation(1, 0),
                         rep.transform.rotation(1, 1), rep.transform.rotation(1, 2),
                         rep.transform.rotation(2, 0), rep.transform.rotation(2, 1),
                         rep.transform.rotation(2, 2)}},
           {"translation", {rep.transform.translation.x(), rep.transform.translation.y(),
                            rep.transform.translation.z()}},
           {"rms_residual", rep.rms_residual},
           {"spread", rep.spread},
           {"condition", rep.condition},
           {"degenerate", rep.degenerate}};
    if (!out.empty()) {
        std::ofstream o(out);
        o << j.dump(2) << "\n";
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

void write_run_outputs(const PipelineResult& result, const fs::path& dir) {
    fs::create_directories(dir);
    {
        std::ofstream est(dir / "estimates.csv");
        est << "timestamp,easting,northing,var_e,var_n\n";
        est.precision(17);
        for (const auto& sm : result.estimates.samples)
            est << sm.timestamp << ',' << sm.point.easting << ',' << sm.point.northing
                << ",0,0\n";
    }
    save_geo_csv(result.truth, (dir / "truth.csv").string());
    {
        std::ofstream err(dir / "error_over_time.csv");
        err << "timestamp,error_m\n";
        err.precision(17);
        for (std::size_t i = 0; i < result.ate_report.per_point.size() &&
                                i < result.estimates.samples.size(); ++i)
            err << result.estimates.samples[i].timestamp << ','
                << result.ate_report.per_point[i] << "\n";
    }
    {
        std::ofstream rep(dir / "ate_report.csv");
        rep << "metric,value\n";
        rep.precision(17);
        rep << "ate_mean," << result.ate_report.mean << "\n";
        rep << "ate_sd," << result.ate_report.sd << "\n";
    }
    const auto& d = result.diagnostics;
    json j{{"keyframes", d.keyframes},
           {"anchor_count", d.anchor_count},
           {"rejected_updates", d.rejected_updates},
           {"dropped_queries", d.dropped_queries},
           {"injected_false_positives", d.injected_false_positives},
           {"achieved_recall_at_1", d.achieved_recall_at_1},
           {"first_anchor_time", d.first_anchor_time},
           {"ate_mean", result.ate_report.mean},
           {"ate_sd", result.ate_report.sd}};
    std::ofstream diag(dir / "diagnostics.json");
    diag << j.dump(2) << "\n";
}

int cmd_simulate(const std::string& scenario_path, std::uint64_t seed,
                 const std::string& out_dir, bool ab_filtering) {
    Scenario s = scenario_from(scenario_path, seed, true);
    const TileGrid grid = s.make_grid();
    const Vocabulary vocab = s.make_vocabulary();
    const DescriptorDb db = s.make_db(grid, vocab);

    const PipelineResult result = run_pipeline(s.trajectory, s.world, grid, vocab, db,
                                               s.drift, s.fusion, s.pipeline);
    write_run_outputs(result, out_dir);
    std::cout << "ATE mean " << result.ate_report.mean << " m, sd "
              << result.ate_report.sd << " m over "
              << result.ate_report.per_point.size() << " points; R@1 "
              << 100.0 * result.diagnostics.achieved_recall_at_1 << "%\n";

    if (ab_filtering) {
        Scenario nf = s;
        nf.pipeline.filtering_enabled = false;
        const PipelineResult off = run_pipeline(nf.trajectory, nf.world, grid, vocab, db,
                                                nf.drift, nf.fusion, nf.pipeline);
        write_run_outputs(off, fs::path(out_dir) / "no_filtering");
        std::cout << "\nMethod         AVE.    SD.\n";
        char row[96];
        std::snprintf(row, sizeof(row), "filtering-on   %.2f  %.2f\n",
                      result.ate_report.mean, result.ate_report.sd);
        std::cout << row;
        std::snprintf(row, sizeof(row), "filtering-off  %.2f  %.2f\n",
                      off.ate_report.mean, off.ate_report.sd);
        std::cout << row;
    }
    return 0;
}

int cmd_ate(const std::string& est_path, const std::string& truth_path,
            double window, const std::string& out) {
    const GeoTrajectory est = load_geo_csv(est_path);
    const GeoTrajectory truth = load_geo_csv(truth_path);
    const AteReport rep = ate(est, truth, window);
    if (!out.empty()) {
        std::ofstream o(out);
        o << "index,error_m\n";
        o.precision(17);
        for (std::size_t i = 0; i < rep.per_point.size(); ++i)
            o << i << ',' << rep.per_point[i] << "\n";
    }
    std::cout << "pairs " << rep.per_point.size() << " ate_mean " << rep.mean
              << " ate_sd " << rep.sd << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GNSS-denied aerial localization toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    std::string scenario_path, out, manifest, manifest_out, vocab_path, db_path;
    std::string queries_path, pairs_path, est_path, truth_path;
    std::vector<std::string> feature_files;
    std::size_t n_c = 32, k = 3, n = 5;
    double weight = 1e9, window = 0.5;
    bool ab = false;
    std::string mode = "gravity";

    auto* bv = app.add_subcommand("build-vocab", "build a k-means vocabulary");
    bv->add_option("--features", feature_files, "feature files (FLF1)");
    bv->add_option("--config", scenario_path, "scenario file for synthetic features");
    bv->add_option("--n-c", n_c, "number of clusters");
    bv->add_option("--seed", seed, "master seed");
    bv->add_option("--out", out, "output vocabulary path")->required();

    auto* ed = app.add_subcommand("encode-db", "encode the tile descriptor database");
    ed->add_option("--config", scenario_path, "scenario file");
    ed->add_option("--manifest", manifest, "tile manifest CSV (else grid from scenario)");
    ed->add_option("--vocab", vocab_path, "vocabulary file")->required();
    ed->add_option("--seed", seed, "master seed");
    ed->add_option("--out", out, "output database path")->required();
    ed->add_option("--manifest-out", manifest_out, "also write the tile manifest");

    auto* ev = app.add_subcommand("eval", "retrieval metrics over a query set");
    ev->add_option("--db", db_path, "database file")->required();
    ev->add_option("--queries", queries_path, "query positions CSV");
    ev->add_option("--config", scenario_path, "scenario file");
    ev->add_option("--k", k, "required ground-truth hits");
    ev->add_option("--n", n, "retrieval depth");
    ev->add_option("--seed", seed, "master seed");
    ev->add_option("--out", out, "output directory")->required();

    auto* al = app.add_subcommand("align", "align a correspondence CSV");
    al->add_option("--pairs", pairs_path, "correspondence CSV")->required();
    al->add_option("--mode", mode, "rigid | gravity | gravity-soft");
    al->add_option("--weight", weight, "gravity weight for gravity-soft");
    al->add_option("--out", out, "output JSON path");

    auto* sim = app.add_subcommand("simulate", "run the closed-loop pipeline");
    sim->add_option("--config", scenario_path, "scenario file");
    sim->add_option("--seed", seed, "master seed");
    sim->add_option("--out", out, "output directory")->required();
    sim->add_flag("--ab-filtering", ab, "paired run with filtering disabled");

    auto* at = app.add_subcommand("ate", "compare two trajectory CSVs");
    at->add_option("--estimates", est_path, "estimate CSV")->required();
    at->add_option("--truth", truth_path, "ground-truth CSV")->required();
    at->add_option("--window", window, "association window, seconds");
    at->add_option("--out", out, "per-point error CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bv->parsed())
            return cmd_build_vocab(feature_files, scenario_path, n_c,
                                   bv->count("--n-c") > 0, seed, out);
        if (ed->parsed())
            return cmd_encode_db(scenario_path, manifest, vocab_path, seed, out,
                                 manifest_out);
        if (ev->parsed())
            return cmd_eval(db_path, queries_path, scenario_path, k, n, seed, out);
        if (al->parsed()) return cmd_align(pairs_path, mode, weight, out);
        if (sim->parsed()) return cmd_simulate(scenario_path, seed, out, ab);
        if (at->parsed()) return cmd_ate(est_path, truth_path, window, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
