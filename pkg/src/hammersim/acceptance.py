"""Self-check harness: the quantitative and property targets the simulator
is expected to reproduce, with tolerances.

Each criterion is a method on :class:`AcceptanceRunner`; suite runs are
memoized so overlapping criteria share work.  Seed counts are tiered by
how noisy each check is and can be forced globally with ``seeds=`` or the
``HAMMERSIM_ACCEPT_SEEDS`` environment variable (100 reproduces the
full-fidelity numbers, at a proportional cost in wall time).

Known red criteria (left failing on purpose, not weakened): the baseline
simulation is fully deterministic -- fixed lowest-index tie-breaks, exact
mitigation slot spacing every ``floor(165/k)`` activations, and row
addressing that keeps every pattern row outside every other row's blast
radius.  When the slot spacing shares a factor with a pattern's cycle
length, mitigation slots sample the tracker at a fixed set of cycle
phases; for some patterns the most-frequently-used entry at those phases
is never a particular target row, so that row evades mitigation for the
whole refresh window and accumulates its full activation share.  At k=8
(spacing 20) the 60-activation cycles lock this way and push the baseline
suite maximum to ~112K, above criterion 1's 90K bound; at k=4 (spacing 41,
prime) nothing locks and the maximum lands ~4% below the 50K lower bound.
Rounding the spacing the other way only moves the lock from k=8 to k=4.
The reference band evidently assumes a scheduling or addressing detail
outside this model's stated conventions.  Criterion 4's k=8
ordering check (request-sampling tracker <= 1.05x the trackerless sampler)
and criterion 8's LFU reference value fail for the same underlying reason.
"""

from __future__ import annotations

import dataclasses
import os
import random
from dataclasses import dataclass

from .dram import DramTimings, MitigationSchedule, derive_budgets, rfm_threshold, storage_bytes
from .engine import SimConfig, row_activation_totals, simulate
from .experiments import (
    DEFAULT_P_GRID,
    PARA_P_PER_K,
    analytic_sampling_rate,
    run_suite,
    suite_avg,
    suite_max,
)
from .patterns import nonuniform_pattern, standard_suite, uniform_pattern
from .policies import Baseline, Dsac, Graphene, Para, Pmss, Prohit, Proteas
from .rng import RngStream, stream_seed
from .tracker import BIP, LFU, LRU, RANDOM

# Seed counts per noise tier.  "det" covers runs with no random draws,
# "order" covers strict mean-ordering checks.
_TIERS = {"det": 1, "light": 2, "grid": 3, "value": 5, "order": 12}

# Sub-grid used for locating empirical sweep minima at k > 1; the minima
# sit at 1-10% and the curve rises past 0.2, so the expensive high-p
# points are skipped there.
_MINIMA_GRID = tuple(p for p in DEFAULT_P_GRID if p <= 0.2)


@dataclass(frozen=True)
class CriterionResult:
    cid: int
    name: str
    passed: bool
    detail: str


def _within(value: float, target: float, tol: float = 0.25) -> bool:
    return abs(value - target) <= tol * target


class AcceptanceRunner:
    def __init__(self, seeds: int | None = None, workers: int = 1, master_seed: int = 0,
                 patterns=None, verbose: bool = False):
        env = os.environ.get("HAMMERSIM_ACCEPT_SEEDS")
        if seeds is None and env:
            seeds = int(env)
        self.seeds_override = seeds
        self.workers = workers
        self.master_seed = master_seed
        self.patterns = tuple(patterns) if patterns is not None else tuple(standard_suite())
        self.verbose = verbose
        self._cache = {}
        self.data = {}  # intermediate numbers, consumed by figure_tables

    def _n(self, tier: str) -> int:
        return self.seeds_override or _TIERS[tier]

    def suite(self, policy, k: int = 1, capacity: int = 16, tier: str = "value"):
        seeds = self._n(tier)
        key = (repr(policy), k, capacity, seeds)
        if key not in self._cache:
            if self.verbose:
                print(f"  suite: {policy.name} k={k} cap={capacity} seeds={seeds}", flush=True)
            self._cache[key] = run_suite(
                policy,
                self.patterns,
                seeds,
                schedule=MitigationSchedule(mitigations_per_trefi=k),
                tracker_capacity=capacity,
                master_seed=self.master_seed,
                workers=self.workers,
            )
        return self._cache[key]

    def smax(self, policy, k: int = 1, capacity: int = 16, tier: str = "value"):
        return suite_max(self.suite(policy, k, capacity, tier))

    # ---- quantitative criteria -------------------------------------

    def criterion_1(self):
        vals = {k: self.smax(Baseline(), k=k, tier="det")[0] for k in (1, 2, 4, 8)}
        self.data["baseline_per_k"] = vals
        ok = _within(vals[1], 74000) and all(50000 <= vals[k] <= 90000 for k in (2, 4, 8))
        return CriterionResult(1, "baseline high disturbance", ok,
                               "suite_max per k: " + str({k: round(v) for k, v in vals.items()}))

    def criterion_2(self):
        prss = self.smax(Proteas(sampling_p=0.01), tier="value")[0]
        base = self.data.get("baseline_per_k") or {1: self.smax(Baseline(), tier="det")[0]}
        self.data["prss_001"] = prss
        ok = _within(prss, 2100) and base[1] >= 10 * prss
        return CriterionResult(2, "sampling at p=0.01", ok,
                               f"suite_max={prss:.0f} (target 2100±25%), baseline/prss={base[1] / prss:.1f}x")

    def criterion_3(self):
        targets = {(0.03, 2): 1128, (0.05, 4): 585, (0.10, 8): 305}
        got = {}
        for (p, k), want in targets.items():
            got[(p, k)] = self.smax(Proteas(sampling_p=p), k=k, tier="value")[0]
        self.data["proteas_per_k"] = got
        ok = all(_within(got[key], want) for key, want in targets.items())
        return CriterionResult(3, "sampling scaled with mitigation rate", ok,
                               "; ".join(f"p={p} k={k}: {v:.0f}" for (p, k), v in got.items()))

    def criterion_4(self):
        targets = {1: 2461, 2: 1253, 4: 682, 8: 348}
        para = {k: self.smax(Para(mitigate_p=PARA_P_PER_K[k]), k=k, tier="value")[0]
                for k in targets}
        self.data["para_per_k"] = para
        proteas = dict(self.data.get("proteas_per_k", {}))
        proteas[(0.01, 1)] = self.data.get("prss_001") or self.smax(Proteas(sampling_p=0.01), tier="value")[0]
        by_k = {k: v for (p, k), v in proteas.items()}
        ok = all(_within(para[k], targets[k]) for k in targets)
        ok = ok and all(by_k[k] <= 1.05 * para[k] for k in targets if k in by_k)
        return CriterionResult(4, "para anchors and ordering", ok,
                               "para: " + str({k: round(v) for k, v in para.items()}))

    def grid(self, make_policy, k: int = 1, p_values=DEFAULT_P_GRID, tier: str = "grid"):
        return {p: self.smax(make_policy(p), k=k, tier=tier)[0] for p in p_values}

    def criterion_5(self):
        prss = self.data.get("prss_grid_k1") or self.grid(lambda p: Proteas(sampling_p=p))
        self.data["prss_grid_k1"] = prss
        pmss = self.grid(lambda p: Pmss(sampling_p=p), tier="light")
        self.data["pmss_grid_k1"] = pmss
        prss_min, pmss_min = min(prss.values()), min(pmss.values())
        ok = 4000 <= pmss_min <= 10000 and pmss_min > prss_min
        return CriterionResult(5, "miss-stream sampling worse than request-stream", ok,
                               f"pmss min={pmss_min:.0f}, prss min={prss_min:.0f}")

    def criterion_6(self):
        rnd = self.smax(Proteas(sampling_p=0.01, eviction=RANDOM), tier="order")[0]
        lfu = self.smax(Proteas(sampling_p=0.01, eviction=LFU), tier="order")[0]
        self.data["prss_rand_vs_lfu"] = (rnd, lfu)
        return CriterionResult(6, "random eviction no worse than LFU", rnd <= lfu,
                               f"random={rnd:.0f}, lfu={lfu:.0f}")

    def criterion_7(self):
        sizes = (2, 4, 16, 32, 64, 128)
        vals = {c: self.smax(Proteas(sampling_p=0.01), capacity=c, tier="value")[0] for c in sizes}
        self.data["tracker_sizes"] = vals
        seq = [vals[c] for c in sizes]
        ok = all(a >= b for a, b in zip(seq, seq[1:]))
        ok = ok and vals[2] <= 2500 * 1.25 and vals[4] <= 2500 * 1.25
        for c, want in ((16, 2000), (32, 1834), (64, 1538), (128, 1431)):
            ok = ok and _within(vals[c], want)
        return CriterionResult(7, "bigger tracker helps monotonically", ok,
                               str({c: round(v) for c, v in vals.items()}))

    def criterion_8(self):
        targets = (("lru", LRU, 226000, "det"), ("lfu", LFU, 70000, "det"),
                   ("bip", BIP, 15000, "light"), ("random", RANDOM, 2000, "light"))
        vals = {}
        for name, rule, _, tier in targets:
            vals[name] = self.smax(Baseline(eviction=rule), k=8, tier=tier)[0]
        self.data["eviction_sens"] = vals
        ok = vals["lru"] > vals["lfu"] > vals["bip"] > vals["random"]
        for name, _, want, _ in targets:
            ok = ok and _within(vals[name], want, tol=0.35)
        return CriterionResult(8, "eviction rule sensitivity under thrash", ok,
                               str({n: round(v) for n, v in vals.items()}))

    def criterion_9(self):
        budgets = derive_budgets(DramTimings())
        slots_per_act = 1.0 / (budgets.acts_per_trefi + 1)  # 1/166
        analytic = {m: analytic_sampling_rate(m * slots_per_act, 0.5) for m in (1, 2, 4, 8)}
        ok = [round(analytic[m] * 100, 1) for m in (1, 2, 4, 8)] == [1.2, 2.4, 4.8, 9.6]

        expect = {1: 0.01, 2: 0.03, 4: 0.05, 8: 0.10}
        empirical = {}
        for k, want in expect.items():
            if k == 1:
                g = self.data.get("prss_grid_k1") or self.grid(lambda p: Proteas(sampling_p=p))
                self.data["prss_grid_k1"] = g
            else:
                g = self.grid(lambda p: Proteas(sampling_p=p), k=k, p_values=_MINIMA_GRID)
            ps = sorted(g)
            argmin = min(ps, key=lambda p: g[p])
            empirical[k] = argmin
            i, j = ps.index(argmin), ps.index(want)
            ok = ok and abs(i - j) <= 1
        self.data["sampling_rates"] = (analytic, empirical)
        return CriterionResult(9, "analytic vs empirical sampling rates", bool(ok),
                               f"analytic={analytic}, empirical minima={empirical}")

    def criterion_10(self):
        pat = uniform_pattern(20, aligned=True)
        results = {}
        ok = True
        for k, want in ((4, 0.098), (8, 0.194)):
            cfg = SimConfig(policy=Baseline(), pattern=pat,
                            schedule=MitigationSchedule(mitigations_per_trefi=k),
                            master_seed=self.master_seed)
            r = simulate(cfg)
            frac = r.extra_activation_fraction
            results[k] = frac
            exact = r.mitigations_issued * 2 * cfg.schedule.blast_radius / r.total_activations
            ok = ok and r.empty_mitigation_slots == 0 and frac == exact and _within(frac, want)
        self.data["extra_acts"] = results
        return CriterionResult(10, "extra activation overhead", ok,
                               ", ".join(f"k={k}: {v:.3f}" for k, v in results.items()))

    def criterion_11(self):
        prss = self.data.get("prss_001") or self.smax(Proteas(sampling_p=0.01), tier="value")[0]
        self.data["prss_001"] = prss
        dsac = self.smax(Dsac(), tier="light")[0]
        prohit = self.smax(Prohit(), tier="light")[0]
        self.data["dsac_prohit"] = (dsac, prohit)
        ok = dsac >= 5 * prss and prohit >= 5 * prss
        return CriterionResult(11, "decay/two-table models stay weaker", ok,
                               f"dsac={dsac:.0f}, prohit={prohit:.0f}, 5x prss={5 * prss:.0f}")

    def criterion_12(self):
        budgets = derive_budgets(DramTimings())
        suite = self.patterns
        foot = [p.footprint for p in suite]
        ok = (budgets.acts_per_trefi == 165
              and storage_bytes(16, 40, 16) == 1280
              and storage_bytes(16, 40, 32) == 2560
              and len(suite) == 500
              and min(foot) == 2 and max(foot) == 220)
        return CriterionResult(12, "static arithmetic", ok,
                               f"acts/trefi={budgets.acts_per_trefi}, suite={len(suite)}, "
                               f"footprint=[{min(foot)},{max(foot)}]")

    # ---- property criteria ------------------------------------------

    def criterion_13(self):
        cfg = SimConfig(policy=Proteas(sampling_p=0.02),
                        pattern=nonuniform_pattern(8, 3, 20, aligned=True),
                        master_seed=7, seed_index=3)
        ok = simulate(cfg) == simulate(cfg)
        stats = run_suite(Proteas(sampling_p=0.02), self.patterns[:4], 2, master_seed=7)
        stats2 = run_suite(Proteas(sampling_p=0.02), self.patterns[:4], 2, master_seed=7)
        ok = ok and stats == stats2
        return CriterionResult(13, "determinism", ok, "rerun equality on run and suite")

    def criterion_14(self):
        ok = True
        details = []
        for pol in (Baseline(), Proteas(sampling_p=0.05), Para(mitigate_p=0.01)):
            cfg = SimConfig(policy=pol, pattern=nonuniform_pattern(4, 2, 10, aligned=False),
                            master_seed=1)
            total = sum(row_activation_totals(cfg))
            budgets = derive_budgets(cfg.timings)
            ok = ok and total == budgets.acts_per_trefw
            details.append(f"{pol.name}={total}")
        return CriterionResult(14, "ledger conservation", ok,
                               f"row totals vs {budgets.acts_per_trefw}: " + ", ".join(details))

    def criterion_15(self):
        rng = random.Random(1234)
        timings = DramTimings(refs_per_trefw=12)  # 1980 activations
        mismatches = 0
        for _ in range(200):
            cfg = _random_small_config(rng, timings)
            if simulate(cfg) != reference_simulate(cfg):
                mismatches += 1
        g_bad = 0
        for _ in range(50):
            g_bad += 0 if _check_graphene_bounds(rng, timings) else 1
        ok = mismatches == 0 and g_bad == 0
        return CriterionResult(15, "oracle equivalence", ok,
                               f"{mismatches}/200 mismatches, {g_bad}/50 graphene bound violations")

    def criterion_16(self):
        s = RngStream(stream_seed(99, "sampling", 0, 0))
        hits = sum(s.bernoulli(0.01) for _ in range(1_000_000))
        rate = hits / 1_000_000
        ok = 0.0094 <= rate <= 0.0106

        s = RngStream(stream_seed(99, "eviction", 0, 0))
        counts = [0] * 16
        n = 160_000
        for _ in range(n):
            counts[s.uniform_index(16)] += 1
        expected = n / 16
        chi2 = sum((c - expected) ** 2 / expected for c in counts)
        ok = ok and chi2 < 37.70  # chi-square 0.999 critical value, df=15

        s = RngStream(stream_seed(99, "para", 0, 0))
        half = sum(s.uniform_index(2) for _ in range(1_000_000)) / 1_000_000
        ok = ok and abs(half - 0.5) <= 0.002
        return CriterionResult(16, "statistical hygiene", ok,
                               f"bernoulli={rate:.4f}, chi2={chi2:.1f}, half={half:.4f}")

    def criterion_17(self):
        g = self.data.get("prss_grid_k1") or self.grid(lambda p: Proteas(sampling_p=p))
        self.data["prss_grid_k1"] = g
        mid = g[0.01]
        ok = g[0.001] >= 3 * mid and g[1.0] >= 3 * mid
        return CriterionResult(17, "bathtub shape", ok,
                               f"p=0.001: {g[0.001]:.0f}, p=0.01: {mid:.0f}, p=1.0: {g[1.0]:.0f}")

    def run(self, only=None):
        results = []
        for cid in range(1, 18):
            if only and cid not in only:
                continue
            res = getattr(self, f"criterion_{cid}")()
            if self.verbose:
                print(f"[{'PASS' if res.passed else 'FAIL'}] {res.cid:2d} {res.name}: {res.detail}",
                      flush=True)
            results.append(res)
        return results


# Criteria whose cached suite data feeds each report table.
FIGURE_CRITERIA = {
    "bathtub": (17,),
    "prss_lfu_rand": (6,),
    "tracker_size": (7,),
    "num_mitig": (3, 4),
    "max_dist": (1, 2, 11),
    "avg_dist": (1, 2, 11),
    "repl_sens": (8,),
    "sampling_rates": (9,),
}


def figure_tables(runner: AcceptanceRunner):
    """Build the report tables from a runner's cached criterion data.
    Returns {name: (columns, rows)}; only tables whose criteria ran are
    included."""
    d = runner.data
    out = {}
    if "prss_grid_k1" in d:
        out["bathtub"] = (("sampling_p", "suite_max"),
                          [(p, v) for p, v in sorted(d["prss_grid_k1"].items())])
    if "prss_rand_vs_lfu" in d:
        rnd, lfu = d["prss_rand_vs_lfu"]
        out["prss_lfu_rand"] = (("eviction", "suite_max"), [("random", rnd), ("lfu", lfu)])
    if "tracker_sizes" in d:
        out["tracker_size"] = (("tracker_size", "suite_max"),
                               sorted(d["tracker_sizes"].items()))
    if "proteas_per_k" in d and "para_per_k" in d:
        rows = [(1, 0.01, d.get("prss_001"), PARA_P_PER_K[1], d["para_per_k"][1])]
        for (p, k), v in sorted(d["proteas_per_k"].items(), key=lambda kv: kv[0][1]):
            rows.append((k, p, v, PARA_P_PER_K[k], d["para_per_k"][k]))
        out["num_mitig"] = (("k", "proteas_p", "proteas_max", "para_p", "para_max"), rows)
    if "baseline_per_k" in d and "dsac_prohit" in d:
        dsac, prohit = d["dsac_prohit"]
        rows = [("baseline", d["baseline_per_k"][1]), ("proteas", d.get("prss_001")),
                ("dsac", dsac), ("prohit", prohit)]
        if "para_per_k" in d:
            rows.append(("para", d["para_per_k"][1]))
        out["max_dist"] = (("scheme", "suite_max"), rows)
        out["avg_dist"] = (("scheme", "suite_max"), rows)
    if "eviction_sens" in d:
        out["repl_sens"] = (("eviction", "suite_max"), sorted(d["eviction_sens"].items()))
    if "sampling_rates" in d:
        analytic, empirical = d["sampling_rates"]
        out["sampling_rates"] = (("mitigs_per_trefi", "analytic_rate", "empirical_min_p"),
                                 [(m, analytic[m], empirical[m]) for m in sorted(analytic)])
    return out


# ---- reference interpreter ------------------------------------------
#
# A deliberately naive re-implementation of the whole simulation used only
# to cross-check the optimized kernels.  Tracker entries are (row, count,
# last_touch) tuples in a plain list; None marks an empty slot.

def reference_simulate(cfg: SimConfig):
    budgets = derive_budgets(cfg.timings)
    rfm = rfm_threshold(budgets, cfg.schedule.mitigations_per_trefi)
    pattern = cfg.pattern
    local = {r: i for i, r in enumerate(pattern.target_rows + pattern.decoy_rows)}
    cycle = [local[r] for r in pattern.cycle]
    import hashlib
    tag = int.from_bytes(hashlib.blake2b(pattern.pattern_id.encode(), digest_size=8).digest(), "little")
    samp = RngStream(stream_seed(cfg.master_seed, "sampling", tag, cfg.seed_index))
    evic = RngStream(stream_seed(cfg.master_seed, "eviction", tag, cfg.seed_index))
    para = RngStream(stream_seed(cfg.master_seed, "para", tag, cfg.seed_index))
    spec = cfg.policy
    name = spec.name
    cap = spec.hot_capacity if name == "prohit" else cfg.tracker_capacity
    table = [None] * cap  # entries: [row, count, last]
    cold = [None] * (spec.cold_capacity if name == "prohit" else 0)

    def find(tb, row):
        return next((i for i, e in enumerate(tb) if e and e[0] == row), None)

    def insert(tb, row, now):
        free = next((i for i, e in enumerate(tb) if e is None), None)
        if free is not None:
            tb[free] = [row, 0, now]
            return
        kind = getattr(spec, "eviction", LFU).kind
        if kind == "random":
            tb[evic.uniform_index(len(tb))] = [row, 0, now]
        elif kind == "bip":
            if evic.bernoulli(getattr(spec, "eviction", LFU).epsilon):
                tb[min(range(len(tb)), key=lambda i: tb[i][2])] = [row, 0, now]
        elif kind == "lru":
            tb[min(range(len(tb)), key=lambda i: tb[i][2])] = [row, 0, now]
        else:
            tb[min(range(len(tb)), key=lambda i: tb[i][1])] = [row, 0, now]

    cur, mx, tot = [0] * pattern.footprint, [0] * pattern.footprint, [0] * pattern.footprint
    raa = mitig = empty = slots = occ_sum = phase = 0
    for g in range(budgets.acts_per_trefw):
        tp = g % budgets.acts_per_trefi
        li = cycle[tp % len(cycle)] if pattern.aligned else cycle[phase]
        phase = (phase + 1) % len(cycle)
        cur[li] += 1
        tot[li] += 1
        mx[li] = max(mx[li], cur[li])
        if name == "para":
            if para.bernoulli(spec.mitigate_p):
                cur[li], mitig = 0, mitig + 1
        elif name == "proteas" and not samp.bernoulli(spec.sampling_p):
            pass
        elif name in ("baseline", "proteas", "pmss", "dsac"):
            i = find(table, li)
            if i is not None:
                table[i][1] += 1
                table[i][2] = g
            elif name == "pmss" and all(e for e in table):
                if samp.bernoulli(spec.sampling_p):
                    insert(table, li, g)
            elif name == "dsac" and all(e for e in table):
                mc = min(e[1] for e in table)
                if samp.bernoulli(max(spec.p_floor, 1.0 / (1.0 + mc))):
                    table[min(range(cap), key=lambda i: table[i][1])] = [li, 0, g]
            else:
                insert(table, li, g)
        elif name == "prohit":
            i = find(table, li)
            if i is not None:
                table[i][1] += 1
                table[i][2] = g
            else:
                i = find(cold, li)
                if i is not None:
                    cold[i][1] += 1
                    if samp.bernoulli(spec.promote_p):
                        entry, cold[i] = cold[i], None
                        free = next((j for j, e in enumerate(table) if e is None), None)
                        if free is not None:
                            table[free] = [entry[0], entry[1], g]
                        else:
                            d = min(range(cap), key=lambda j: table[j][1])
                            cold[i] = [table[d][0], table[d][1], g]
                            table[d] = [entry[0], entry[1], g]
                else:
                    free = next((j for j, e in enumerate(cold) if e is None), None)
                    if free is None:
                        free = min((j for j in range(len(cold))), key=lambda j: cold[j][2])
                    cold[free] = [li, 0, g]
        raa += 1
        if raa == rfm:
            raa, slots = 0, slots + 1
            occ_sum += sum(e is not None for e in table) + sum(e is not None for e in cold)
            pick = None
            for tb in (table, cold):
                live = [i for i, e in enumerate(tb) if e]
                if live:
                    pick = max(live, key=lambda i: tb[i][1])
                    cur[tb[pick][0]] = 0  # local index stored in entry
                    tb[pick] = None
                    mitig += 1
                    break
            if pick is None:
                empty += 1
    from .engine import SimResult
    return SimResult(max(mx), sum(mx) / pattern.footprint, mitig, empty, slots,
                     occ_sum / slots if slots else 0.0,
                     mitig * 2 * cfg.schedule.blast_radius / budgets.acts_per_trefw,
                     budgets.acts_per_trefw)


def _random_small_config(rng: random.Random, timings: DramTimings) -> SimConfig:
    rules = (LFU, LRU, RANDOM, BIP)
    policies = (
        Baseline(eviction=rng.choice(rules)),
        Proteas(sampling_p=rng.choice((0.05, 0.3, 0.9)), eviction=rng.choice(rules)),
        Pmss(sampling_p=rng.choice((0.1, 0.5))),
        Dsac(),
        Prohit(),
        Para(mitigate_p=rng.choice((0.01, 0.1))),
    )
    if rng.random() < 0.5:
        pattern = uniform_pattern(rng.choice((2, 4, 8, 20)), aligned=rng.random() < 0.5)
    else:
        pattern = nonuniform_pattern(rng.choice((2, 4, 8)), rng.choice((2, 3)),
                                     rng.choice((5, 10)), aligned=rng.random() < 0.5)
    return SimConfig(policy=rng.choice(policies), pattern=pattern, timings=timings,
                     schedule=MitigationSchedule(mitigations_per_trefi=rng.choice((1, 2, 4))),
                     tracker_capacity=rng.randint(1, 4),
                     master_seed=rng.randrange(2 ** 32), seed_index=rng.randrange(8))


def _check_graphene_bounds(rng: random.Random, timings: DramTimings) -> bool:
    """Graphene's tracker is a Misra-Gries summary: counts undercount the
    truth by at most N/(capacity+1), so an exact-count mitigator triggers
    no later (and no more often, per threshold crossing) than ours."""
    trh = rng.choice((4, 8, 16, 50))
    cap = rng.randint(1, 4)
    if rng.random() < 0.5:
        pattern = uniform_pattern(rng.choice((2, 4, 8)), aligned=rng.random() < 0.5)
    else:
        pattern = nonuniform_pattern(2, rng.choice((2, 3)), 5, aligned=rng.random() < 0.5)
    cfg = SimConfig(policy=Graphene(trh=trh), pattern=pattern, timings=timings,
                    tracker_capacity=cap, master_seed=rng.randrange(2 ** 32))
    r = simulate(cfg)
    budgets = derive_budgets(cfg.timings)
    th = cfg.policy.mitigation_threshold
    bound = th + budgets.acts_per_trefw // (cap + 1) + 1

    # exact-frequency mitigator: reset a row the moment its true count
    # since last reset reaches the threshold
    counts = {}
    exact_mitigs = 0
    exact_max = 0
    phase = 0
    cycle = pattern.cycle
    for g in range(budgets.acts_per_trefw):
        tp = g % budgets.acts_per_trefi
        row = cycle[tp % len(cycle)] if pattern.aligned else cycle[phase]
        phase = (phase + 1) % len(cycle)
        c = counts.get(row, 0) + 1
        exact_max = max(exact_max, c)
        if c >= th:
            counts[row] = 0
            exact_mitigs += 1
        else:
            counts[row] = c
    return (r.max_disturbance <= bound
            and r.max_disturbance >= exact_max
            and r.mitigations_issued <= exact_mitigs)
