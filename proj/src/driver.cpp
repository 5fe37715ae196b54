#include "driver.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "oracle.hpp"
#include "util.hpp"

namespace dtfl::driver {

namespace {

using nlohmann::json;

std::string csv_num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt9(v);
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    if (!out.good()) throw std::runtime_error("short write to " + p.string());
}

json qjson(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return quantize9(v);
}

json vec_json(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(qjson(x));
    return a;
}

}  // namespace

void run_solve(const ScenarioConfig& cfg, const std::string& out_dir) {
    const opt::SolveResult res = opt::solve_p(cfg.glds, cfg.blds, cfg.sys, cfg.solver);

    std::ostringstream sweep;
    sweep << "Q,t_hat_B,T_GLD,T_BLD,T\n";
    for (const auto& row : res.sweep) {
        sweep << csv_num(row.q_agg_w) << ',' << csv_num(row.t_hat_b) << ','
              << csv_num(row.t_gld) << ',' << csv_num(row.t_bld) << ','
              << csv_num(row.t_total) << '\n';
    }

    // multiplier trace of the inner solve at the winning grid point
    std::ostringstream trace;
    trace << "iteration";
    for (std::size_t i = 0; i < cfg.glds.size(); ++i) trace << ",lambda_" << cfg.glds[i].index;
    trace << '\n';
    opt::solve_pgld(cfg.glds, cfg.blds, res.best.q_agg_w, cfg.sys, cfg.solver,
                    [&trace](const opt::DualTracePoint& p) {
                        trace << p.iteration;
                        for (double l : p.lambdas) trace << ',' << fmt9(l);
                        trace << '\n';
                    });

    json summary;
    summary["T_star"] = qjson(res.best.t_total);
    summary["Q_star"] = qjson(res.best.q_agg_w);
    summary["y"] = qjson(res.best.y);
    summary["t_up_G"] = qjson(res.best.t_up_g);
    summary["t_up_B"] = qjson(res.best.t_up_b);
    summary["T_GLD"] = qjson(res.best.t_gld);
    summary["T_BLD"] = qjson(res.best.t_bld);
    summary["q"] = vec_json(res.best.jam_w);
    summary["cpu_rates"] = vec_json(res.best.cpu_hz);
    summary["tx_powers"] = vec_json(res.best.tx_power_w);
    summary["q_step"] = qjson(res.q_step_w);
    summary["grid_points"] = res.sweep.size();
    summary["best_index"] = res.best_index;

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_file(dir / "q_sweep.csv", sweep.str());
    write_file(dir / "lambda_trace.csv", trace.str());
    write_file(dir / "summary.json", summary.dump(2) + "\n");
}

void run_sim(const ScenarioConfig& cfg, const std::string& out_dir) {
    fedsim::Simulation sim(cfg.sys, cfg.glds, cfg.blds, cfg.solver, cfg.scoring,
                           cfg.sim_params());
    const std::vector<fedsim::RoundReport> reports = sim.run();

    std::ostringstream rounds;
    for (const auto& r : reports) {
        for (const auto& c : r.clusters) {
            json rec;
            rec["round"] = r.round;
            rec["cluster_id"] = c.cluster_id;
            rec["T_total"] = qjson(c.t_total);
            rec["accuracy"] = qjson(c.accuracy);
            rec["blocks"] = r.blocks_appended;
            rec["verified_count"] = r.verified_count;
            rec["verified"] = c.verified;
            rounds << rec.dump() << '\n';
        }
        json fin;
        fin["round"] = r.round;
        fin["cluster_id"] = -1;
        fin["T_total"] = qjson(r.clusters.empty() ? 0.0 : r.clusters.front().t_total);
        fin["accuracy"] = qjson(r.global_accuracy);
        fin["blocks"] = r.blocks_appended;
        fin["verified_count"] = r.verified_count;
        fin["verified"] = r.prior_global_verified;
        rounds << fin.dump() << '\n';
    }

    std::ostringstream ledger;
    for (const auto& b : sim.ledger().blocks()) {
        json rec;
        rec["round"] = b.round;
        rec["cluster_id"] = b.cluster_id;
        rec["payload_digest"] = b.payload_digest;
        rec["validator_id"] = b.validator_id;
        rec["verified"] = b.verified;
        rec["size_bytes"] = b.size_bytes;
        ledger << rec.dump() << '\n';
    }

    const fedsim::ComparisonReport acct =
        fedsim::block_accounting(sim.ledger(), sim.baseline());
    std::ostringstream blocks;
    blocks << "round,proposed_blocks,baseline_blocks,proposed_bytes,baseline_bytes\n";
    for (const auto& row : acct.rows) {
        blocks << row.round << ',' << row.proposed_blocks << ',' << row.baseline_blocks << ','
               << row.proposed_bytes << ',' << row.baseline_bytes << '\n';
    }

    std::ostringstream acc;
    acc << "round,global_accuracy,mean_cluster_accuracy\n";
    for (const auto& r : reports) {
        double mean = 0;
        for (const auto& c : r.clusters) mean += c.accuracy;
        if (!r.clusters.empty()) mean /= static_cast<double>(r.clusters.size());
        acc << r.round << ',' << fmt9(r.global_accuracy) << ',' << fmt9(mean) << '\n';
    }

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_file(dir / "rounds.ndjson", rounds.str());
    write_file(dir / "ledger.ndjson", ledger.str());
    write_file(dir / "blocks.csv", blocks.str());
    write_file(dir / "accuracy.csv", acc.str());
}

std::string VerifyReport::to_json() const {
    json j;
    j["all_passed"] = all_passed;
    json arr = json::array();
    for (const auto& p : probes) {
        json e;
        e["name"] = p.name;
        e["passed"] = p.passed;
        e["details"] = json::parse(p.details_json);
        arr.push_back(e);
    }
    j["probes"] = arr;
    return j.dump(2);
}

VerifyReport run_verify(const ScenarioConfig& cfg) {
    VerifyReport rep;

    // 1. optimizer vs brute-force grid at seeded feasible jamming levels
    {
        const double q_lb = std::max(model::q_lower_bound(cfg.blds, cfg.sys), 0.0);
        const double q_ub = model::q_upper_bound(cfg.glds);
        Rng rng(mix_seed(cfg.seed, 0x0AC1E));
        json samples = json::array();
        bool passed = true;
        int done = 0, attempts = 0;
        while (done < 5 && attempts < 200) {
            ++attempts;
            const double q = rng.uniform(q_lb + (q_ub - q_lb) * 1e-3, q_ub * 0.98);
            opt::PgldResult r;
            try {
                r = opt::solve_pgld(cfg.glds, cfg.blds, q, cfg.sys, cfg.solver);
            } catch (const InfeasibleError&) {
                continue;
            } catch (const ConvergenceError&) {
                continue;
            }
            oracle::GridSpec grid;
            grid.range_factor = 4.0;
            const oracle::OracleResult o =
                oracle::grid_oracle_pgld(cfg.glds, cfg.blds, q, cfg.sys, grid);
            if (!o.feasible) continue;
            const double rel = std::abs(o.objective - r.objective) / o.objective;
            json s;
            s["Q"] = qjson(q);
            s["optimizer"] = qjson(r.objective);
            s["oracle"] = qjson(o.objective);
            s["rel_diff"] = qjson(rel);
            samples.push_back(s);
            if (rel > 0.02) passed = false;
            ++done;
        }
        if (done < 5) passed = false;
        json d;
        d["samples"] = samples;
        d["tolerance"] = 0.02;
        rep.probes.push_back({"oracle_match", passed, d.dump()});
    }

    // 2. numeric convexity of the upload-energy curve per GLD
    {
        const double t_lb = model::t_up_g_lower_bound(cfg.glds, cfg.sys);
        bool passed = true;
        json per = json::array();
        for (const auto& g : cfg.glds) {
            const auto r = oracle::convexity_probe(g, cfg.sys, t_lb * 1e-2, t_lb * 1e2, 200);
            json e;
            e["index"] = g.index;
            e["min_second_difference"] = qjson(r.min_second_difference);
            e["all_positive"] = r.all_positive;
            per.push_back(e);
            passed = passed && r.all_positive;
        }
        json d;
        d["glds"] = per;
        rep.probes.push_back({"convexity", passed, d.dump()});
    }

    // 3. pivot uniqueness over random jamming subproblems
    {
        const auto r = oracle::pivot_uniqueness_probe(cfg.seed, cfg.verify_trials);
        json d;
        d["trials"] = r.trials;
        d["skipped_duplicate_ratios"] = r.skipped_duplicate_ratios;
        json ce = json::array();
        for (const auto& c : r.counterexamples) ce.push_back(json::parse(c.instance_json));
        d["counterexamples"] = ce;
        rep.probes.push_back({"pivot_uniqueness", r.passed(), d.dump()});
    }

    rep.all_passed = true;
    for (const auto& p : rep.probes) rep.all_passed = rep.all_passed && p.passed;
    return rep;
}

}  // namespace dtfl::driver
