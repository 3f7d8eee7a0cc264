"""Experiment orchestration: instance sweeps, seeded trials, CSV rows and JSON verdicts.

Row seeds are ``base_seed + trial``; instance ``i`` of a generator sweep uses
``seed + i``.  CSV rows carry no wall-clock data so identical configs give
byte-identical reports.
"""
import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

from ._common import TAU, DomainError, LatmaxError, fmt
from .constraints import Cardinality, MatroidIntersection, PosetMatroid
from .dl import (
    DLDoubleGreedyTrace,
    MatroidGreedyTrace,
    attach_greedy_opt,
    check_dl_trace,
    check_greedy_trace,
    dl_double_greedy,
    dl_double_greedy_deterministic,
    greedy_cardinality,
    greedy_poset_matroid,
    greedy_s_matroids,
)
from .exact import exact_max, ratio
from .instances import Instance, instance_from_dict, load_instance
from .lattice import LinearExtension, linear_extension, random_poset
from .oracles import (
    LATTICE_FAMILIES,
    make_random_dr_monotone_dl,
    make_random_submodular_lattice,
    on_chains,
)
from .reduction import dksh_brute_force, random_hypergraph, reduce_dksh
from .smbil import (
    SmbilTrace,
    attach_opt,
    check_smbil_trace,
    double_greedy_smbil,
    first_step_changes,
    randomized_all_choices,
    randomized_best_options,
)

SMBIL_ALGOS = ("dg13", "rand-all", "rand-best")
DL_ALGOS = ("matroid-greedy", "card-greedy", "dl-dg", "dl-dg-det")
ALGOS = SMBIL_ALGOS + DL_ALGOS + ("reduction",)
RANDOMIZED = ("rand-all", "rand-best", "dl-dg")


def default_bound(algo, s=1):
    """Approximation guarantee checked by the verdicts, or None when the algorithm has none."""
    return {
        "dg13": 1 / 3,
        "dl-dg-det": 1 / 3,
        "matroid-greedy": 1 / (s + 1),
        "card-greedy": 1 - 1 / math.e,
        "dl-dg": 0.5,
    }.get(algo)


@dataclass
class ExperimentConfig:
    """``instances`` is one of

    * ``{"file": path}``, ``{"instance": {...instance JSON...}}`` or ``{"list": [...instance JSON...]}``;
    * ``{"family": "fig3" | "fig4" | "lemma4", "params": {...}, "sweep": {"C": [5, 10]}}``;
    * ``{"generator": "random_submodular", "count": N, "seed": s, "n": [...], "C": [...]}``;
    * ``{"generator": "random_dr_dl", "count": N, "seed": s, "m": [...], "density": d, "monotone": b}``;
    * ``{"generator": "random_hypergraph", "count": N, "seed": s, "n": [...], "m": [...], "k": [...]}``
      (only with ``algo = "reduction"``).
    """

    algo: str
    instances: dict
    name: str = "experiment"
    trials: int = 1
    base_seed: int = 0
    order: str = "fixed"
    extension: object = "id"  # "id", "seeded" or an explicit element order
    k: int = None
    matroids: list = field(default_factory=list)
    bound: float = None
    check_traces: bool = False
    first_step: bool = False

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise DomainError(f"unknown algorithm {self.algo!r}")
        if self.trials < 1:
            raise DomainError("trials must be positive")
        if self.algo == "card-greedy" and self.k is None:
            raise DomainError("card-greedy needs k")
        if self.algo == "matroid-greedy" and not self.matroids:
            raise DomainError("matroid-greedy needs at least one matroid")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class Report:
    config: ExperimentConfig
    columns: list
    rows: list
    aggregates: dict
    verdicts: list

    @property
    def passed(self):
        return all(v["pass"] for v in self.verdicts)

    def csv_text(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(r[c]) if isinstance(r[c], (int, float)) else r[c] for c in self.columns])
        return buf.getvalue()

    def json_text(self):
        d = {"config": self.config.to_dict(), "aggregates": self.aggregates, "verdicts": self.verdicts}
        return json.dumps(_rounded(d), indent=1, sort_keys=True) + "\n"

    def write(self, csv_path=None, json_path=None):
        if csv_path:
            with open(csv_path, "w", newline="") as fh:
                fh.write(self.csv_text())
        if json_path:
            with open(json_path, "w") as fh:
                fh.write(self.json_text())


def _rounded(x):
    if isinstance(x, float):
        return float(fmt(x)) if math.isfinite(x) else str(x)
    if isinstance(x, dict):
        return {k: _rounded(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_rounded(v) for v in x]
    return x


def mean_std(xs):
    """Mean and sample standard deviation (0 for fewer than two values)."""
    n = len(xs)
    mu = math.fsum(xs) / n
    if n < 2:
        return mu, 0.0
    return mu, math.sqrt(math.fsum((x - mu) ** 2 for x in xs) / (n - 1))


def lower_confidence(xs):
    """``mean - 3 * sigma / sqrt(T)``."""
    mu, sd = mean_std(xs)
    return mu - 3 * sd / math.sqrt(len(xs))


# --- instance sources ------------------------------------------------------------


def _pick(v, i):
    if isinstance(v, (list, tuple)):
        return v[i % len(v)]
    return v


def iter_instances(source):
    """Yield ``(instance_id, Instance)`` for an instance source (see :class:`ExperimentConfig`)."""
    if "file" in source:
        yield str(source["file"]), load_instance(source["file"])
        return
    if "instance" in source:
        yield source.get("id", "instance"), instance_from_dict(source["instance"])
        return
    if "list" in source:
        for i, d in enumerate(source["list"]):
            yield f"instance:{i}", instance_from_dict(d)
        return
    if "family" in source:
        fam = source["family"]
        if fam not in LATTICE_FAMILIES:
            raise DomainError(f"unknown family {fam!r}")
        base = dict(source.get("params", {}))
        sweep = source.get("sweep", {})
        if not sweep:
            yield fam, Instance(LATTICE_FAMILIES[fam](base), None, fam)
            return
        (key, values), = sweep.items()
        dl = source.get("domain") == "dl"
        for v in values:
            p = {**base, key: v}
            oracle = LATTICE_FAMILIES[fam](p)
            if dl:
                oracle = on_chains(oracle)
            yield f"{fam}:{key}={v}", Instance(oracle, None, fam)
        return
    gen = source.get("generator")
    count = int(source.get("count", 1))
    seed0 = int(source.get("seed", 0))
    for i in range(count):
        seed = seed0 + i
        if gen == "random_submodular":
            ns, Cs = source.get("n", [3]), source.get("C", [2])
            n = _pick(ns, i)
            C = _pick(Cs, i // len(ns) if isinstance(ns, list) else i)
            yield f"rs:{seed}:n={n}:C={C}", Instance(
                make_random_submodular_lattice(n, C, seed, source.get("integer", True)))
        elif gen == "random_dr_dl":
            m = _pick(source.get("m", [6]), i)
            poset = random_poset(m, seed, source.get("density", 0.3))
            oracle = make_random_dr_monotone_dl(poset, seed, source.get("coverage", True),
                                                source.get("universe", 8), source.get("monotone", True))
            yield f"dr:{seed}:m={m}", Instance(oracle)
        elif gen == "random_hypergraph":
            n = _pick(source.get("n", [5]), i)
            m = _pick(source.get("m", [4]), i // 2)
            k = min(n, _pick(source.get("k", [2]), i // 3))
            h = random_hypergraph(n, m, seed, balanced=source.get("balanced", False))
            yield f"hg:{seed}:n={n}:m={h.m}:k={k}", (h, k)
        else:
            raise DomainError(f"unknown instance source {source!r}")


# --- single runs -----------------------------------------------------------------


def _constraint(cfg, inst):
    poset = inst.oracle.domain.poset
    if cfg.algo == "card-greedy":
        return Cardinality(cfg.k)
    if cfg.algo == "matroid-greedy":
        mts = [PosetMatroid.from_dict(poset, m) for m in cfg.matroids]
        return mts[0] if len(mts) == 1 else mts
    return None


def _exact_for(cfg, inst, constraint):
    if isinstance(constraint, list):
        constraint = MatroidIntersection(constraint)
    return exact_max(inst.oracle, constraint)


def solve_once(algo, inst, seed=0, order="fixed", extension="id", k=None, constraint=None):
    """Run one solver; returns ``(solution, trace)``."""
    oracle = inst.oracle
    if algo in SMBIL_ALGOS and not oracle.is_lattice:
        raise DomainError(f"{algo} needs an integer-lattice instance")
    if algo in DL_ALGOS and oracle.is_lattice:
        raise DomainError(f"{algo} needs a distributive-lattice instance")
    if algo == "dg13":
        return double_greedy_smbil(oracle, order)
    if algo == "rand-all":
        return randomized_all_choices(oracle, seed, order)
    if algo == "rand-best":
        return randomized_best_options(oracle, seed, order)
    poset = oracle.domain.poset
    if algo == "card-greedy":
        return greedy_cardinality(oracle, k)
    if algo == "matroid-greedy":
        if isinstance(constraint, (list, tuple)):
            return greedy_s_matroids(oracle, constraint)
        return greedy_poset_matroid(oracle, constraint)
    if isinstance(extension, (list, tuple)):
        ext = LinearExtension(poset, tuple(int(e) for e in extension))
    else:
        ext = linear_extension(poset, "seeded" if extension == "seeded" else "id", seed)
    if algo == "dl-dg":
        return dl_double_greedy(oracle, seed, ext)
    if algo == "dl-dg-det":
        return dl_double_greedy_deterministic(oracle, ext)
    raise DomainError(f"unknown algorithm {algo!r}")


def check_trace(algo, trace, inst=None, opt=None, dr=True):
    """Invariant violations for a solver trace; attaches ``opt`` where the check needs it."""
    if algo in SMBIL_ALGOS:
        if opt is not None and algo == "dg13":
            attach_opt(trace, inst.oracle, opt)
        return check_smbil_trace(trace)
    if algo in ("matroid-greedy", "card-greedy"):
        if opt is not None:
            attach_greedy_opt(trace, inst.oracle, opt)
        return check_greedy_trace(trace)
    return check_dl_trace(trace, dr=dr, oracle=inst.oracle if inst else None, opt=opt)


# --- experiments -----------------------------------------------------------------


def _run_reduction(cfg):
    columns = ["instance", "vertices", "edges", "k", "elements", "exact", "dksh", "identity_ok"]
    rows = []
    for iid, (h, k) in iter_instances(cfg.instances):
        red = reduce_dksh(h, k)
        ex = exact_max(red.oracle, red.knapsack)
        _, R = dksh_brute_force(h, k)
        rows.append({"instance": iid, "vertices": h.n, "edges": h.m, "k": k,
                     "elements": red.poset.m, "exact": ex.value, "dksh": R,
                     "identity_ok": int(abs(ex.value - k * (1 + R)) <= TAU
                                        and red.poset.m == h.n + k * h.m)})
    ok = all(r["identity_ok"] for r in rows)
    verdicts = [{"name": "reduced optimum equals k(1+R) and element count n+km", "pass": ok}]
    return Report(cfg, columns, rows, {"instances": len(rows)}, verdicts)


def run_experiment(cfg):
    """Execute every (instance, trial) row and derive aggregates and verdicts from the rows."""
    if isinstance(cfg, dict):
        cfg = ExperimentConfig.from_dict(cfg)
    if cfg.algo == "reduction":
        return _run_reduction(cfg)
    columns = ["instance", "trial", "seed", "achieved", "exact", "ratio", "queries"]
    if cfg.first_step:
        columns += ["first_decrease", "first_increase"]
    if cfg.check_traces:
        columns += ["violations"]
    rows = []
    trials = cfg.trials if cfg.algo in RANDOMIZED else 1
    for iid, inst in iter_instances(cfg.instances):
        constraint = _constraint(cfg, inst) if cfg.algo in DL_ALGOS else None
        ex = _exact_for(cfg, inst, constraint)
        opt = ex.argmax
        for t in range(trials):
            seed = cfg.base_seed + t
            _, trace = solve_once(cfg.algo, inst, seed, cfg.order, cfg.extension, cfg.k, constraint)
            row = {"instance": iid, "trial": t, "seed": seed, "achieved": trace.value,
                   "exact": ex.value, "ratio": ratio(trace.value, ex.value), "queries": trace.queries}
            if cfg.first_step:
                tr = trace
                s0 = tr.steps[0]
                opt_pt = tuple(opt)
                tr.opt0_value = inst.oracle.raw(tuple(map(min, map(max, opt_pt, tr.a0), tr.b0)))
                s0.opt_value = inst.oracle.raw(tuple(map(min, map(max, opt_pt, s0.a), s0.b)))
                dec, inc = first_step_changes(tr)
                row["first_decrease"], row["first_increase"] = dec, inc
            if cfg.check_traces:
                row["violations"] = len(check_trace(cfg.algo, trace, inst, opt))
            rows.append(row)
    s = len(cfg.matroids) if cfg.algo == "matroid-greedy" else 1
    return _summarize(cfg, columns, rows, s)


def _summarize(cfg, columns, rows, s=1):
    ratios = [r["ratio"] for r in rows]
    mu, sd = mean_std(ratios)
    agg = {"rows": len(rows), "min_ratio": min(ratios), "mean_ratio": mu, "std_ratio": sd,
           "mean_value": mean_std([r["achieved"] for r in rows])[0]}
    groups = {}
    for r in rows:
        groups.setdefault(r["instance"], []).append(r)
    per = {}
    for iid, rs in groups.items():
        vals = [r["achieved"] for r in rs]
        rts = [r["ratio"] for r in rs]
        m_v, s_v = mean_std(vals)
        m_r, s_r = mean_std(rts)
        per[iid] = {"trials": len(rs), "mean_value": m_v, "std_value": s_v, "mean_ratio": m_r,
                    "std_ratio": s_r, "ratio_lower": lower_confidence(rts), "exact": rs[0]["exact"]}
    agg["instances"] = per
    if cfg.first_step:
        for key in ("first_decrease", "first_increase"):
            m, sdev = mean_std([r[key] for r in rows])
            agg[key] = {"mean": m, "std": sdev, "half_width": 3 * sdev / math.sqrt(len(rows))}
    verdicts = []
    bound = cfg.bound if cfg.bound is not None else default_bound(cfg.algo, s)
    if bound is not None:
        if cfg.algo in RANDOMIZED:
            worst = min(p["ratio_lower"] for p in per.values())
            verdicts.append({"name": f"mean ratio - 3 sd/sqrt(T) >= {bound:.6g} on every instance",
                             "pass": worst >= bound - TAU, "observed": worst})
        else:
            verdicts.append({"name": f"ratio >= {bound:.6g} on every row",
                             "pass": agg["min_ratio"] >= bound - TAU, "observed": agg["min_ratio"]})
    if cfg.check_traces:
        bad = sum(r["violations"] for r in rows)
        verdicts.append({"name": "trace invariants hold on every run", "pass": bad == 0,
                         "observed": bad})
    return Report(cfg, columns, rows, agg, verdicts)


# --- trace replay ----------------------------------------------------------------


def trace_from_dict(d):
    algo = d.get("algo")
    if algo in SMBIL_ALGOS:
        return SmbilTrace.from_dict(d)
    if algo in ("matroid-greedy", "card-greedy"):
        return MatroidGreedyTrace.from_dict(d)
    if algo in ("dl-dg", "dl-dg-det"):
        return DLDoubleGreedyTrace.from_dict(d)
    raise LatmaxError(f"trace has unknown algorithm {algo!r}")


def replay(path_or_dict, dr=True):
    """Re-check every invariant of a saved trace from its recorded values."""
    if isinstance(path_or_dict, dict):
        d = path_or_dict
    else:
        with open(path_or_dict) as fh:
            d = json.load(fh)
    try:
        trace = trace_from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise LatmaxError(f"malformed trace: {exc}") from exc
    if isinstance(trace, SmbilTrace):
        viol = check_smbil_trace(trace)
    elif isinstance(trace, MatroidGreedyTrace):
        viol = check_greedy_trace(trace)
    else:
        viol = check_dl_trace(trace, dr=dr)
    return {"algo": d["algo"], "steps": len(trace.steps), "valid": not viol, "violations": viol}


def load_config(path):
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))
