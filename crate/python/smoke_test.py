#!/usr/bin/env python3
"""Smoke test for the ckgraph_py extension module.

Builds nothing itself: run `cargo build -p ckgraph-py` first (or pass
--release and build in release mode), then:

    python3 python/smoke_test.py
"""

import argparse
import importlib.util
import json
import pathlib
import shutil
import sys
import tempfile


def load_module(profile: str):
    root = pathlib.Path(__file__).resolve().parent.parent
    built = root / "target" / profile / "libckgraph_py.so"
    if not built.exists():
        sys.exit(f"{built} not found; run `cargo build -p ckgraph-py` first")
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="ckgraph_py."))
    target = tmp / "ckgraph_py.so"
    shutil.copyfile(built, target)
    spec = importlib.util.spec_from_file_location("ckgraph_py", target)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def check(name, ok):
    status = "ok" if ok else "FAIL"
    print(f"  [{status}] {name}")
    return ok


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--release", action="store_true")
    args = parser.parse_args()
    ck = load_module("release" if args.release else "debug")
    passed = True

    print("structural queries:")
    g = ck.Digraph("loop_plus_edge")
    passed &= check("sources of loop_plus_edge", g.sources() == ["v"])
    passed &= check("single cycle [g]", g.cycles() == [["g"]])
    passed &= check("entry f", g.cycle_entries(["g"]) == ["f"])

    print("classification:")
    report = ck.classify("loop_plus_edge")
    verdicts = {k: v["verdict"] for k, v in report["properties"].items()}
    passed &= check("liminal no", verdicts["liminal"] == "no")
    passed &= check("postliminal yes", verdicts["postliminal"] == "yes")
    staged = ck.classify("thesis:2times")
    sv = {k: v["verdict"] for k, v in staged["properties"].items()}
    passed &= check("2times bounded trace yes", sv["bounded_trace"] == "yes")
    passed &= check("2times fell no", sv["fell"] == "no")
    kg = ck.classify("omega:2:3,2")
    passed &= check(
        "omega(3,2) liminal yes",
        kg["properties"]["liminal"]["verdict"] == "yes",
    )

    print("k-graph validation:")
    val = ck.validate_kgraph("omega:2:3,2")
    passed &= check("omega(3,2) valid + locally convex", val["valid"] and val["locally_convex"])

    print("multiplicity profiles:")
    p = ck.profile("thesis:ml2mu3", cylinders=6, window=16)
    passed &= check("ml2mu3 M_L=2 M_U=3 certified",
                    (p["m_l"], p["m_u"], p["certified"]) == (2, 3, True))

    print("witness checks:")
    w = ck.witness_check("thesis:2times")
    passed &= check("canonical witnesses pass", w["passes"])
    d = ck.witness_check("thesis:2times", witnesses="duplicated")
    passed &= check("duplicated witnesses fail escape", not d["passes"])

    print("paths:")
    lags = ck.lag_set("thesis:two_row", "; @v", "; @v")
    passed &= check("self lag 0", lags == {"Finite": [0]})
    fd = ck.frequently_divertable("thesis:two_row", "; @u", "; @v")
    passed &= check("bottom row not divertable to top", fd["verdict"] == "no")

    print("desourcification:")
    frag = ck.desourcify("corner", [2, 2])
    bases = {v["key"]["base"] for v in frag["vertices"]}
    passed &= check("corner truncation covers all vertices", bases == {"v", "u", "w"})

    print(json.dumps({"passed": passed}))
    sys.exit(0 if passed else 1)


if __name__ == "__main__":
    main()
