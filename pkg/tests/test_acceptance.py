"""End-to-end acceptance suite at laptop-friendly sizes.

Eleven end-to-end checks, one test per claim, each printing a single
``[C..] PASS/FAIL`` line (visible with ``pytest -s``; under ``-v`` the
test name plays the same role).  Experiment-driven checks load the
configs shipped in ``experiments/`` verbatim, so the suite also pins
those files.  The master seed is frozen at 20260825 throughout; every
number asserted below is deterministic.
"""
import math
import time
from functools import lru_cache
from pathlib import Path

import numpy as np

from rumorwalks import (AgentConfig, SimRng, derive_seed, empirical_min,
                        fit_growth, max_congestion_dp, parse_config_file,
                        result_to_csv, run_coupled_even, run_trials,
                        shared_walk_domination, sweep_ratio, verify_tau_leq_c,
                        verify_transcript)

from helpers import brute_max_congestion, coupling_corpus, small_instance_graphs

EXPERIMENTS = Path(__file__).resolve().parent.parent / "experiments"
MASTER_SEED = 20260825


def _load(name):
    cfg = parse_config_file(EXPERIMENTS / name)
    assert cfg.seed == MASTER_SEED, f"{name} drifted off the frozen seed"
    return cfg


@lru_cache(maxsize=None)
def _result(name):
    return run_trials(_load(name))


class Criterion:
    """Collects sub-checks, then emits one pass/fail line and asserts."""

    def __init__(self, tag):
        self.tag = tag
        self.started = time.monotonic()
        self.notes = []
        self.failures = []

    def check(self, ok, text):
        (self.notes if ok else self.failures).append(text)
        return ok

    def done(self, budget=None):
        elapsed = time.monotonic() - self.started
        if budget is not None:
            self.check(elapsed < budget, f"runtime {elapsed:.0f}s < {budget}s")
        verdict = "PASS" if not self.failures else "FAIL"
        detail = "; ".join(self.failures if self.failures else self.notes)
        print(f"[{self.tag}] {verdict} ({elapsed:.0f}s) {detail}", flush=True)
        assert not self.failures, f"[{self.tag}] {detail}"


def test_c01_star_spreading():
    c = Criterion("C1")

    row = _result("star_push.cfg").row(1000, "push")
    target = 1000 * sum(1.0 / k for k in range(1, 1001))
    c.check(row.incomplete == 0, "push trials all complete")
    c.check(abs(row.mean - target) <= 0.05 * target,
            f"push mean {row.mean:.0f} within 5% of {target:.0f}")

    row = _result("star_ppull.cfg").row(1000, "push-pull")
    c.check(row.incomplete == 0 and row.max <= 2,
            f"push-pull max {row.max:.0f} <= 2 over 200 trials")

    for name, proto in [("star_visitx_sweep.cfg", "visit-exchange"),
                        ("star_meetx_sweep.cfg", "meet-exchange")]:
        fit = fit_growth(_result(name), proto)
        r2 = fit.fits["log n"].r2
        c.check(fit.best_model == "log n" and r2 > 0.95,
                f"{proto} medians: best={fit.best_model}, log-fit R2={r2:.3f}")

    c.done(budget=120)


def test_c02_double_star_separation():
    c = Criterion("C2")
    bound = 20 * math.log2(512)

    res = _result("double_star.cfg")
    ppull = res.row(512, "push-pull")
    visitx = res.row(512, "visit-exchange")
    meetx = _result("double_star_meetx.cfg").row(512, "meet-exchange")

    c.check(ppull.incomplete == 0 and ppull.mean >= 512 / 10,
            f"push-pull mean {ppull.mean:.0f} >= {512 / 10:.0f}")
    c.check(visitx.incomplete == 0 and visitx.median <= bound,
            f"visit-exchange median {visitx.median:.0f} <= {bound:.0f}")
    c.check(meetx.incomplete == 0 and meetx.median <= bound,
            f"lazy meet-exchange median {meetx.median:.0f} <= {bound:.0f}")
    c.done(budget=120)


def test_c03_heavy_tree_separation():
    c = Criterion("C3")
    n = 1023

    res = _result("heavy_tree.cfg")
    push = res.row(n, "push")
    visitx = res.row(n, "visit-exchange")
    meetx = _result("heavy_tree_meetx.cfg").row(n, "meet-exchange")

    c.check(push.n == n and push.incomplete == 0, f"n={push.n}, all complete")
    c.check(push.median <= 10 * math.log2(n),
            f"push median {push.median:.0f} <= {10 * math.log2(n):.0f}")
    c.check(visitx.mean >= n / 64,
            f"visit-exchange mean {visitx.mean:.0f} >= {n / 64:.0f}")
    c.check(meetx.incomplete == 0 and meetx.median <= 20 * math.log2(n),
            f"leaf-source lazy meet-exchange median {meetx.median:.0f} "
            f"<= {20 * math.log2(n):.0f}")
    c.done(budget=300)


def test_c04_siamese_trees_separation():
    c = Criterion("C4")
    per_tree = 511  # thresholds scale with one tree; the graph has 2n-1 vertices

    res = _result("siamese.cfg")
    push = res.row(per_tree, "push")
    visitx = res.row(per_tree, "visit-exchange")
    meetx = res.row(per_tree, "meet-exchange")

    c.check(push.n == 2 * per_tree - 1 and push.incomplete == 0,
            f"n={push.n}, all complete")
    c.check(push.median <= 10 * math.log2(per_tree),
            f"push median {push.median:.0f} <= {10 * math.log2(per_tree):.0f}")
    c.check(visitx.mean >= per_tree / 64,
            f"visit-exchange mean {visitx.mean:.0f} >= {per_tree / 64:.0f}")
    c.check(meetx.incomplete == 0 and meetx.mean >= per_tree / 64,
            f"meet-exchange mean {meetx.mean:.0f} >= {per_tree / 64:.0f}")
    c.done(budget=300)


def test_c05_cycle_stars_cliques_growth():
    c = Criterion("C5")
    res = _result("cycle_stars_cliques.cfg")

    fit = fit_growth(res, "visit-exchange")
    c.check(fit.best_model == "n^(2/3)",
            f"visit-exchange best model {fit.best_model} "
            f"(R2={fit.fits['n^(2/3)'].r2:.3f})")

    worst = min((res.row(m, "meet-exchange").median
                 - res.row(m, "visit-exchange").median)
                for m in _load("cycle_stars_cliques.cfg").sweep)
    c.check(worst > 0, f"meet-exchange median above visit-exchange at every "
                       f"size (min gap {worst:.1f})")
    c.done(budget=600)


def test_c06_regular_push_visitx_ratio():
    c = Criterion("C6")
    res = _result("regular_push_visitx.cfg")
    pts = sweep_ratio(res, "push", "visit-exchange")

    ratios = [p.ratio for p in pts]
    c.check(all(1 / 8 <= r <= 8 for r in ratios),
            "median ratios " + str([round(r, 2) for r in ratios]) +
            " all within [1/8, 8]")
    spread = max(ratios) / min(ratios)
    c.check(spread <= 2, f"ratio spread {spread:.2f} <= 2 across the sweep")
    c.done()


def test_c07_coupling_invariants_hold():
    c = Criterion("C7")
    runs = bound_ok = chain_ok = 0
    for trial in range(100):
        for gi, g in enumerate(coupling_corpus(trial)):
            rng = SimRng(derive_seed(MASTER_SEED, "acceptance-couple", trial, gi))
            tr = run_coupled_even(g, 0, AgentConfig(count=g.n), rng)
            runs += 1
            ok, _ = verify_tau_leq_c(tr)
            bound_ok += bool(ok)
            rep = verify_transcript(tr)
            chain_ok += bool(rep.ok and rep.checks["chain-walks"])
    c.check(runs == 500, f"{runs} coupled runs")
    c.check(bound_ok == runs, f"counter bound held in {bound_ok}/{runs}")
    c.check(chain_ok == runs,
            f"chain congestion matched every C_u(t) in {chain_ok}/{runs}")
    c.done(budget=60)


def test_c08_congestion_dp_matches_brute_force():
    c = Criterion("C8")
    k = 5
    instances = mismatches = 0
    for gi, g in enumerate(small_instance_graphs()):
        for s in range(5):
            rng = SimRng(derive_seed(MASTER_SEED, "acceptance-dp", gi, s))
            count = 1 + (gi + s) % 3
            tr = run_coupled_even(g, 0, AgentConfig(count=count), rng,
                                  min_rounds=k)
            instances += 1
            # row t of the k=5 table is the full answer for every k' = t <= 5
            if not np.array_equal(max_congestion_dp(tr, k),
                                  brute_max_congestion(tr, k)):
                mismatches += 1
    c.check(instances >= 100, f"{instances} random instances")
    c.check(mismatches == 0, f"DP equals brute-force enumeration on all "
                             f"{instances} instances (k <= {k})")
    c.done()


def test_c09_shared_walks_visit_dominates_meet():
    c = Criterion("C9")
    total = held = 0
    for name in ("shared_star.cfg", "shared_regular.cfg"):
        row = shared_walk_domination(_load(name))[0]
        c.check(row.completed == row.trials,
                f"{name}: {row.completed}/{row.trials} complete")
        total += row.trials
        held += row.holds
    c.check(held == total == 200,
            f"all-agents-informed round <= meet-exchange finish in "
            f"{held}/{total} trials")
    c.done()


def test_c10_regular_lower_bounds():
    c = Criterion("C10")
    for name, proto in [("regular_lower_visitx.cfg", "visit-exchange"),
                        ("regular_lower_meetx.cfg", "meet-exchange")]:
        res = _result(name)
        c.check(all(r.incomplete == 0 for r in res.rows_for(proto)),
                f"{proto} trials all complete")
        mins = empirical_min(res)
        worst = [(n, v, 0.25 * math.log2(n))
                 for (n, p), v in sorted(mins.items())]
        c.check(all(v is not None and v >= floor for n, v, floor in worst),
                f"{proto} minima " + str([(n, v) for n, v, _ in worst]) +
                " >= 0.25*log2(n)")
    c.done()


def test_c11_sweeps_are_deterministic():
    c = Criterion("C11")
    for name in ("double_star.cfg", "shared_regular.cfg"):
        first = result_to_csv(run_trials(_load(name))).encode()
        again = result_to_csv(run_trials(_load(name))).encode()
        c.check(first == again, f"{name} rerun byte-identical "
                                f"({len(first)} bytes)")
    c.done()
