"""Smoke test of the ppress command line: usage: test_cli.py <ppress> <samples dir>."""

import json
import os
import shutil
import subprocess
import sys
import tempfile

BIN = sys.argv[1]
SAMPLES = sys.argv[2]
failures = []


def run(*args, expect=0, cwd=None):
    p = subprocess.run([BIN, *args], capture_output=True, text=True, cwd=cwd, timeout=600)
    if p.returncode != expect:
        failures.append(f"{' '.join(args)}: exit {p.returncode}, wanted {expect}\n{p.stdout}\n{p.stderr}")
    return p


def check(cond, what):
    if not cond:
        failures.append(what)


def main():
    work = tempfile.mkdtemp(prefix="ppress-cli-")
    try:
        for name in ("latent.csv", "campaign.json"):
            shutil.copy(os.path.join(SAMPLES, name), work)
        campaign = os.path.join(work, "campaign.json")
        store = os.path.join(work, "r.jsonl")
        common = ["--store", store, "--cache-dir", os.path.join(work, "cache"), "-j", "1"]

        run("--version")
        run(expect=2)
        run("frobnicate", expect=2)
        run("eval", os.path.join(work, "missing.json"), *common, expect=3)

        p = run("stats", os.path.join(work, "latent.csv"), "-o", os.path.join(work, "stats"))
        check("800 rows x 6 columns" in p.stdout, "stats summary line")
        with open(os.path.join(work, "stats", "stats.csv")) as f:
            lines = f.read().splitlines()
        check(lines[0] == "column,min,max,range,mean,variance,zero_range", "stats.csv header")
        check(len(lines) == 7, "stats.csv has one row per column")

        p = run("eval", campaign, *common)
        check("phi = " in p.stdout and "0 failed" in p.stdout, "eval output")
        p = run("eval", campaign, *common)
        check("cache hits" in p.stdout and " 0 cache hits" not in p.stdout, "second eval hits the cache")

        p = run("search", campaign, *common)
        check("EBLC_PRED/REL" in p.stdout and "l=" in p.stdout and "u=" in p.stdout, "search summary")
        with open(store) as f:
            recs = [json.loads(line) for line in f if line.strip()]
        roles = {r["role"] for r in recs}
        check({"baseline", "candidate", "control"} <= roles, f"store roles {sorted(roles)}")
        check(all(len(r["record_id"]) == 64 for r in recs), "record ids are SHA-256 hex")

        run("search", campaign, *common, "--tau", "1.5", expect=4)

        p = run("pareto", "--store", store, "-o", os.path.join(work, "pareto"))
        check("global front" in p.stdout, "pareto summary")
        check(os.path.exists(os.path.join(work, "pareto", "front_ridge.svg")), "pareto svg")
        with open(os.path.join(work, "pareto", "front_ridge.csv")) as f:
            check(f.readline().strip() != "", "pareto csv")

        p = run("speedup", "--store", store, "-b", "3.75,1,0.125")
        check("b_c (GB/s)" in p.stdout and "label,bound,psnr_db,C,b_c_GBps" in p.stdout, "speedup tables")
        cores_csv = os.path.join(work, "cores.csv")
        with open(cores_csv, "w") as f:
            f.write("C,b_c\n10.67,0.21\n")
        p = run("speedup", "--csv", cores_csv, "-b", "1")
        check("10.67" in p.stdout, "speedup from csv")
        run("speedup", "--csv", cores_csv, "-b", "0", expect=2)

        p = run("report", "--store", store, "-o", os.path.join(work, "report"))
        with open(os.path.join(work, "report", "report.md")) as f:
            md = f.read()
        for section in ("## Baseline quality", "## Search boundaries", "## Pareto fronts",
                        "## Parallel decompression core thresholds"):
            check(section in md, f"report section {section}")

        run("pareto", "--store", os.path.join(work, "nothing.jsonl"), expect=3)
    finally:
        shutil.rmtree(work, ignore_errors=True)

    for f in failures:
        print("FAIL:", f)
    print(f"cli smoke: {len(failures)} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
