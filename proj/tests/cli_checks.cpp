// End-to-end checks of the command-line tool: exit codes, file outputs, and
// run-to-run determinism. Invoked by ctest with the binary path as argv[1].
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

std::string cli;
int failures = 0;

void expect(bool ok, const std::string& what) {
    std::cout << (ok ? "ok: " : "FAIL: ") << what << '\n';
    if (!ok) ++failures;
}

int run(const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args;
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -2;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

int line_count(const std::string& text) {
    int n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_checks <path-to-cli>\n";
        return 2;
    }
    cli = argv[1];

    // --- argument handling ------------------------------------------------
    expect(run("--help > cli_help.txt 2>&1") == 0, "--help exits 0");
    expect(contains(slurp("cli_help.txt"), "arbitrage"), "--help prints a description");
    expect(run("> /dev/null 2>&1") == 2, "missing subcommand exits 2");
    expect(run("frobnicate > /dev/null 2>&1") == 2, "unknown subcommand exits 2");
    expect(run("synth --days 2 > /dev/null 2>&1") == 2, "missing required flags exit 2");
    expect(run("synth --bogus 1 --out-rtp a --out-dap b > /dev/null 2>&1") == 2,
           "unknown flag exits 2");

    // --- synth --------------------------------------------------------------
    expect(run("synth --seed 5 --days 2 --out-rtp cli_rtp_a.csv --out-dap cli_dap_a.csv"
               " > /dev/null 2>&1") == 0,
           "synth exits 0");
    const std::string rtp_a = slurp("cli_rtp_a.csv");
    expect(line_count(rtp_a) == 2 * 288 + 1, "synth writes one row per 5-minute period");
    expect(line_count(slurp("cli_dap_a.csv")) == 2 * 24 + 1, "synth writes hourly day-ahead rows");
    expect(contains(rtp_a, "2021-01-01 00:00:00,"), "synth starts at the calendar origin");

    run("synth --seed 5 --days 2 --out-rtp cli_rtp_b.csv --out-dap cli_dap_b.csv"
        " > /dev/null 2>&1");
    expect(slurp("cli_rtp_b.csv") == rtp_a, "synth is deterministic in the seed");
    run("synth --seed 6 --days 2 --out-rtp cli_rtp_c.csv --out-dap cli_dap_c.csv"
        " > /dev/null 2>&1");
    expect(slurp("cli_rtp_c.csv") != rtp_a, "different seeds give different series");
    expect(run("synth --days 0 --out-rtp x.csv --out-dap y.csv > /dev/null 2>&1") == 4,
           "synth rejects zero days with exit 4");

    // --- gen-values ---------------------------------------------------------
    expect(run("gen-values --rtp cli_rtp_a.csv --out cli_vals.bin --segments 201"
               " --downsample 64 > cli_gen_out.txt 2>&1") == 0,
           "gen-values exits 0");
    expect(contains(slurp("cli_gen_out.txt"), "computed 577 curves (K=64)"),
           "gen-values reports curve count and resolution");
    expect(run("gen-values --rtp cli_rtp_a.csv --out cli_vals.txt --segments 101"
               " > /dev/null 2>&1") == 0,
           "gen-values text output exits 0");
    expect(slurp("cli_vals.txt").rfind("ARBVF1 text", 0) == 0,
           ".txt output uses the text value format");
    expect(run("gen-values --rtp cli_absent.csv --out x.bin > /dev/null 2>&1") == 2,
           "missing price file exits 2");
    expect(run("gen-values --rtp cli_rtp_a.csv --out x.bin --eta 1.5 > /dev/null 2>&1") == 4,
           "invalid efficiency exits 4");

    // --- train ----------------------------------------------------------------
    const std::string train_flags =
        "--setting 0 --lags 12 --dap-inputs 0 --hidden 8 --epochs 2 --seeds 2"
        " --batch 128 --label-segments 8";
    expect(run("train --rtp cli_rtp_a.csv --values cli_vals.bin --out cli_model.mlp " +
               train_flags + " > cli_train_out.txt 2>&1") == 0,
           "train exits 0");
    const std::string model_text = slurp("cli_model.mlp");
    expect(model_text.rfind("ARBMLP1", 0) == 0, "model file has the model magic");
    expect(contains(model_text, "dims 4 12 8 8 8"), "model file records the layer sizes");
    expect(contains(slurp("cli_train_out.txt"), "selected seed"),
           "train announces the selected seed");
    expect(slurp("cli_model.mlp.seeds.csv").rfind("seed,epoch,loss,training_profit", 0) == 0,
           "train writes the per-seed log next to the model");
    expect(run("train --rtp cli_rtp_a.csv --values cli_vals.bin --out x.mlp --power 0.4 " +
               train_flags + " > /dev/null 2>&1") == 4,
           "asset flags disagreeing with the value file exit 4");
    expect(run("train --rtp cli_rtp_a.csv --values cli_vals.bin --out x.mlp --setting 3"
               " > /dev/null 2>&1") == 4,
           "day-ahead settings without --dap exit 4");

    // A model with day-ahead inputs, for the backtest guard below.
    expect(run("train --rtp cli_rtp_a.csv --dap cli_dap_a.csv --values cli_vals.bin"
               " --out cli_model_dap.mlp --setting 0 --lags 6 --dap-inputs 24 --hidden 8"
               " --epochs 1 --seeds 1 --batch 256 --label-segments 8 > /dev/null 2>&1") == 0,
           "train with day-ahead inputs exits 0");

    // --- backtest ---------------------------------------------------------------
    expect(run("backtest --rtp cli_rtp_a.csv --values cli_vals.bin --report cli_rep_h.txt"
               " --log cli_log_h.csv --label hind > cli_bt_h.txt 2>&1") == 0,
           "hindsight backtest exits 0");
    const std::string rep_h = slurp("cli_rep_h.txt");
    expect(rep_h.rfind("ARBMET1", 0) == 0, "backtest writes a metrics report");
    expect(contains(rep_h, "has_hindsight 1"), "hindsight mode is its own benchmark");
    expect(contains(slurp("cli_bt_h.txt"), "100.00"), "self-benchmark ratio prints as 100%");
    const std::string log_h = slurp("cli_log_h.csv");
    expect(log_h.rfind("timestamp,price,charge_mwh,discharge_mwh,soc_mwh,profit", 0) == 0,
           "dispatch log has the expected header");
    expect(line_count(log_h) == 2 * 288 + 1, "dispatch log has one row per period");

    expect(run("backtest --rtp cli_rtp_a.csv --model cli_model.mlp --hindsight cli_vals.bin"
               " --report cli_rep_m.txt --label model > /dev/null 2>&1") == 0,
           "model backtest with a hindsight denominator exits 0");
    expect(contains(slurp("cli_rep_m.txt"), "has_hindsight 1"),
           "model report carries the hindsight baseline");

    expect(run("backtest --rtp cli_rtp_a.csv --model cli_model.mlp --values cli_vals.bin"
               " --report x.txt > /dev/null 2>&1") == 2,
           "--model and --values together exit 2");
    expect(run("backtest --rtp cli_rtp_a.csv --report x.txt > /dev/null 2>&1") == 4,
           "neither --model nor --values exits 4");
    expect(run("backtest --rtp cli_rtp_a.csv --values cli_vals.bin --report x.txt --e0 5"
               " > /dev/null 2>&1") == 4,
           "initial SoC beyond capacity exits 4");
    expect(run("backtest --rtp cli_rtp_a.csv --model cli_model_dap.mlp --report x.txt"
               " > /dev/null 2>&1") == 4,
           "day-ahead model without --dap exits 4");

    // --- compare ------------------------------------------------------------------
    expect(run("compare --reports cli_rep_m.txt cli_rep_h.txt --out cli_table.txt"
               " > cli_cmp.txt 2>&1") == 0,
           "compare exits 0");
    const std::string table = slurp("cli_table.txt");
    expect(contains(table, "model") && contains(table, "hind"), "table lists both labels");
    expect(table.rfind("label", 0) == 0, "table starts with the header row");
    expect(slurp("cli_cmp.txt") == table, "stdout matches the written table");

    expect(run("compare --reports cli_rep_h.txt cli_rep_h.txt > cli_dup.txt 2> /dev/null") == 0,
           "duplicate labels are accepted");
    expect(line_count(slurp("cli_dup.txt")) == 2, "duplicate labels collapse to one row");
    expect(run("compare --reports cli_absent_report.txt > /dev/null 2>&1") == 2,
           "missing report file exits 2");

    // --- determinism of the whole pipeline -----------------------------------------
    expect(run("gen-values --rtp cli_rtp_a.csv --out cli_vals2.bin --segments 201"
               " --downsample 64 > /dev/null 2>&1") == 0,
           "second gen-values run exits 0");
    expect(slurp("cli_vals2.bin") == slurp("cli_vals.bin"), "value files are bit-reproducible");
    expect(run("train --rtp cli_rtp_a.csv --values cli_vals.bin --out cli_model2.mlp " +
               train_flags + " > /dev/null 2>&1") == 0,
           "second train run exits 0");
    expect(slurp("cli_model2.mlp") == model_text, "model files are bit-reproducible");

    if (failures == 0) {
        std::cout << "all cli checks passed\n";
        return 0;
    }
    std::cout << failures << " cli check(s) failed\n";
    return 1;
}
