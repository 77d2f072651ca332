"""Config-driven experiment scenarios with JSON/CSV reports.

A config document names an Orlicz function, a scenario, and parameters:

    {"scenario": "curve", "orlicz": {"kind": "power", "params": {"p": 4}},
     "f": "f.json", "g": "g.json",
     "alphas": {"start": 0.25, "ratio": 0.5, "count": 13}, "fd": true}

Scenarios: condition-check | construct | curve | detect | isometry.
``run_experiment`` returns a result whose ``exit_code`` is nonzero exactly
when an enforced invariant failed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .constructions import (build_delta2plus_equivalent,
                            build_delta2plus_violator, verify_equivalence)
from .core import (GridSpec, OrliczFunction, check_axioms, check_delta2,
                   check_delta2plus, classify_second_derivative_at_zero,
                   orlicz_from_json)
from .detector import (test_disjointness_zero_case,
                       test_support_deficiency_infinite_case,
                       test_support_equality)
from .differential import sweep_norm_curve, write_curve_csv
from .errors import ConfigError, OrliczError
from .function_space import luxemburg_norm
from .harness import (check_disjointness_preservation, check_isometry,
                      operator_from_json, random_unimodular_composition,
                      spanning_testset)
from .stepfun import StepFunction, support_relation
from .suites import disjoint_pairs, rng_from_seed, unit_pair

SCENARIOS = ("condition-check", "construct", "curve", "detect", "isometry")


@dataclass
class ExperimentResult:
    scenario: str
    summary: dict
    failures: list = field(default_factory=list)
    files: list = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0

    def to_json(self) -> dict:
        return {"scenario": self.scenario, "summary": self.summary,
                "failures": list(self.failures), "files": list(self.files),
                "passed": not self.failures}


def _load_config(config) -> dict:
    if isinstance(config, dict):
        return config
    try:
        with open(config, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {config!r}: {exc}") from exc


def _need(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing the {key!r} entry")
    return cfg[key]


def _resolve_orlicz(spec) -> OrliczFunction:
    if isinstance(spec, str):
        with open(spec, "r", encoding="utf-8") as fh:
            spec = json.load(fh)
    return orlicz_from_json(spec)


def _resolve_step(spec) -> StepFunction:
    if isinstance(spec, str):
        return StepFunction.load(spec)
    return StepFunction.from_json(spec)


def _grid_from(cfg: dict) -> GridSpec:
    g = cfg.get("grid", {})
    return GridSpec(u_min=float(g.get("u_min", 1e-8)),
                    u_max=float(g.get("u_max", 2.0 ** 20)),
                    points_per_octave=int(g.get("points_per_octave", 64)),
                    extra=tuple(g.get("extra", ())))


def _write(out_dir, name: str, doc: dict, files: list) -> None:
    if out_dir is None:
        return
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, default=_json_default)
    files.append(path)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def run_experiment(config, out_dir=None) -> ExperimentResult:
    """Execute one scenario; write report files when out_dir is given."""
    cfg = _load_config(config)
    scenario = _need(cfg, "scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; "
                          f"pick one of {', '.join(SCENARIOS)}")
    out_dir = out_dir or cfg.get("out_dir")
    handler = {
        "condition-check": _run_condition_check,
        "construct": _run_construct,
        "curve": _run_curve,
        "detect": _run_detect,
        "isometry": _run_isometry,
    }[scenario]
    result = handler(cfg, out_dir)
    _write(out_dir, "report.json", result.to_json(), result.files)
    return result


def _run_condition_check(cfg: dict, out_dir) -> ExperimentResult:
    phi = _resolve_orlicz(_need(cfg, "orlicz"))
    grid = _grid_from(cfg)
    failures = []
    summary = {}
    summary["axioms"] = check_axioms(phi, grid).to_json()
    summary["delta2"] = check_delta2(phi, grid=grid).to_json()
    try:
        summary["delta2plus"] = check_delta2plus(phi, grid=grid).to_json()
    except OrliczError as exc:
        summary["delta2plus"] = {"error": str(exc)}
    try:
        summary["zero_class"] = classify_second_derivative_at_zero(phi)
    except OrliczError as exc:
        failures.append(f"zero-class classification: {exc}")
    return ExperimentResult("condition-check", summary, failures)


def _run_construct(cfg: dict, out_dir) -> ExperimentResult:
    phi = _resolve_orlicz(_need(cfg, "orlicz"))
    which = _need(cfg, "which")
    failures = []
    files: list = []
    if which == "equivalent":
        built = build_delta2plus_equivalent(phi)
        alpha_hat = check_delta2(phi).witness_sup
        env = verify_equivalence(built, phi, k=0.5, l=4.0 * alpha_hat)
        plus = check_delta2plus(built)
        bound = 2.0 * alpha_hat * 2.0 ** alpha_hat
        if not env.passed:
            failures.append("equivalence envelope violated")
        if not plus.passed or plus.witness_sup > bound:
            failures.append("curvature ratio exceeds the construction bound")
        summary = {"which": which, "envelope": env.to_json(),
                   "delta2plus": plus.to_json(), "bound": bound,
                   "segments": int(len(built.seg_kinds))}
    elif which == "violator":
        eps = float(cfg.get("eps", 0.1))
        built = build_delta2plus_violator(phi, eps)
        probes = np.asarray(built.probe_points)
        u = np.linspace(1e-3, min(phi.u_max, 2.0 ** 10), 200001)
        dev = float(np.max(np.abs(built.m0(u) / phi.m0(u) - 1.0)))
        ratios = probes * built.m2(probes) / built.m1(probes)
        if dev > eps:
            failures.append(f"envelope deviation {dev:g} exceeds eps {eps:g}")
        if not np.all(ratios >= 2.0 ** (np.floor(probes))):
            failures.append("probe curvature ratios below 2**n")
        grid = GridSpec(u_max=float(probes[-1]) + 1.0, extra=tuple(probes))
        plus = check_delta2plus(built, grid=grid)
        if plus.passed:
            failures.append("curvature check unexpectedly passed on probes")
        summary = {"which": which, "eps": eps, "envelope_deviation": dev,
                   "probe_ratios": ratios.tolist(),
                   "delta2plus": plus.to_json(),
                   "segments": int(len(built.seg_kinds))}
    else:
        raise ConfigError(f"construct 'which' must be equivalent or violator, "
                          f"got {which!r}")
    result = ExperimentResult("construct", summary, failures, files)
    _write(out_dir, "constructed.json", built.to_json(), result.files)
    return result


def _run_curve(cfg: dict, out_dir) -> ExperimentResult:
    phi = _resolve_orlicz(_need(cfg, "orlicz"))
    f = _resolve_step(_need(cfg, "f"))
    g = _resolve_step(_need(cfg, "g"))
    spec = cfg.get("alphas", {})
    start = float(spec.get("start", 0.25))
    ratio = float(spec.get("ratio", 0.5))
    count = int(spec.get("count", 13))
    alphas = [start * ratio ** k for k in range(count)]
    fd = bool(cfg.get("fd", False))
    f = f * (1.0 / luxemburg_norm(f, phi))
    g = g * (1.0 / luxemburg_norm(g, phi))
    samples, skipped = sweep_norm_curve(f, g, alphas, phi, fd=fd)
    failures = []
    for s in samples:
        if abs(s.F_alpha + s.F_eta * s.Nprime) > 1e-8:
            failures.append(f"implicit identity violated at alpha={s.alpha:g}")
        if fd and s.fd.max_residual > 1e-5:
            failures.append(f"fd residual {s.fd.max_residual:g} "
                            f"at alpha={s.alpha:g}")
    summary = {"samples": [s.to_json() for s in samples],
               "skipped_alphas": skipped}
    result = ExperimentResult("curve", summary, failures)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "curve.csv")
        write_curve_csv(samples, path)
        result.files.append(path)
    return result


def _detect_one(phi, f, g) -> dict:
    if phi.zero_class == "zero":
        return {"disjointness": test_disjointness_zero_case(f, g, phi).to_json()}
    return {"deficiency": test_support_deficiency_infinite_case(f, g, phi).to_json(),
            "support_equality": test_support_equality(f, g, phi).to_json()}


def _run_detect(cfg: dict, out_dir) -> ExperimentResult:
    phi = _resolve_orlicz(_need(cfg, "orlicz"))
    failures = []
    if "f" in cfg and "g" in cfg:
        f = _resolve_step(cfg["f"])
        g = _resolve_step(cfg["g"])
        f = f * (1.0 / luxemburg_norm(f, phi))
        g = g * (1.0 / luxemburg_norm(g, phi))
        summary = {"mode": "single-pair", **_detect_one(phi, f, g),
                   "ground_truth": support_relation(f, g).to_json()}
        return ExperimentResult("detect", summary, failures)

    count = int(cfg.get("pairs", 50))
    rng = rng_from_seed(cfg.get("seed", 0))
    agree = 0
    inconclusive = 0
    wrong = []
    records = []
    if phi.zero_class == "zero":
        kinds = ["disjoint", "overlap"]
        for i in range(count):
            f, g = unit_pair(rng, phi, kinds[i % 2])
            truth = support_relation(f, g)
            v = test_disjointness_zero_case(f, g, phi)
            expected = ("disjoint" if truth.mu_intersection == 0.0
                        else "not_disjoint")
            if v.claim == "inconclusive":
                inconclusive += 1
            elif v.claim == expected:
                agree += 1
            else:
                wrong.append(i)
            records.append({"pair": i, "expected": expected, "claim": v.claim})
    else:
        kinds = ["disjoint", "g_subset_f", "equal"]
        for i in range(count):
            f, g = unit_pair(rng, phi, kinds[i % 3])
            truth = support_relation(f, g)
            v = test_support_deficiency_infinite_case(f, g, phi)
            expected = ("g_support_within_f" if truth.mu_g_minus_f == 0.0
                        else "g_support_exceeds_f")
            if v.claim == "inconclusive":
                inconclusive += 1
            elif v.claim == expected:
                agree += 1
            else:
                wrong.append(i)
            records.append({"pair": i, "expected": expected, "claim": v.claim})
    decided = count - inconclusive
    if wrong:
        failures.append(f"{len(wrong)} verdicts contradict ground truth: "
                        f"pairs {wrong}")
    if inconclusive > 0.05 * count:
        failures.append(f"inconclusive rate {inconclusive}/{count} above 5%")
    summary = {"mode": "generated-suite", "pairs": count,
               "agreement": agree, "decided": decided,
               "inconclusive": inconclusive, "records": records}
    return ExperimentResult("detect", summary, failures)


def _run_isometry(cfg: dict, out_dir) -> ExperimentResult:
    phi = _resolve_orlicz(_need(cfg, "orlicz"))
    rng = rng_from_seed(cfg.get("seed", 0))
    n_pairs = int(cfg.get("pairs", 20))
    failures = []
    op_spec = cfg.get("operator", "random")
    if op_spec == "random":
        ops = [random_unimodular_composition(rng)
               for _ in range(int(cfg.get("operators", 1)))]
    else:
        if isinstance(op_spec, str):
            with open(op_spec, "r", encoding="utf-8") as fh:
                op_spec = json.load(fh)
        ops = [operator_from_json(op_spec)]
    ts = spanning_testset(rng, phi, size=int(cfg.get("testset", 20)))
    reports = []
    for i, op in enumerate(ops):
        iso = check_isometry(op, phi, ts, rng=rng)
        entry = {"operator": i, "isometry": iso.to_json()}
        if iso.is_isometry:
            pairs = disjoint_pairs(rng, phi, n_pairs)
            pres = check_disjointness_preservation(op, phi, pairs, iso)
            entry["preservation"] = pres.to_json()
            if pres.preservation_failures:
                failures.append(f"operator {i}: disjointness failures")
        else:
            failures.append(f"operator {i}: not an isometry "
                            f"(deviation {iso.max_norm_deviation:g})")
        reports.append(entry)
    summary = {"operators": len(ops), "reports": reports}
    return ExperimentResult("isometry", summary, failures)
