"""Experiment configuration, execution, and report emission.

An experiment plans query trajectories with the configured planners, then
scores every trajectory prefix on fresh evaluation samples (indices disjoint
from the planning samples). Results land in ``results.csv`` together with
``run.json`` metadata sufficient to reproduce the run bit for bit, and a
rendered figure of the divergence curves.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .core import FunctionClass, GroundSet, SetFunction, minimal_information
from .divergence import divergence_matrix
from .distributions import DistributionSpec, sample_matrix
from .planners import (
    MAX_OPTIMAL_CANDIDATES,
    PlanConfig,
    offline_greedy,
    offline_optimal,
    oracle_greedy,
    oracle_optimal,
    random_plan,
)

PLANNER_NAMES = (
    "random",
    "offline_greedy",
    "offline_optimal",
    "oracle_greedy",
    "oracle_optimal",
)

CSV_COLUMNS = (
    "step",
    "algorithm",
    "mean_divergence",
    "stderr",
    "mean_divergence_insample",
    "n",
    "distribution",
    "class",
    "norm",
)


@dataclass
class ExperimentConfig:
    distribution: DistributionSpec
    function_class: FunctionClass
    norm: str = "l1"
    planners: tuple = ("offline_greedy", "random")
    t_max: int = 5
    kappa: int = 90
    eval_samples: int = 90
    seed: int = 0
    # "auto" rescales inputs only for the plain subadditive class, where the
    # affine map provably preserves membership; "on"/"off" force the choice.
    normalize_inputs: str = "auto"

    def __post_init__(self):
        self.function_class = FunctionClass.of(self.function_class)
        self.planners = tuple(self.planners)
        for name in self.planners:
            if name not in PLANNER_NAMES:
                raise ValueError(f"unknown planner {name!r}")
        if self.eval_samples < 2:
            raise ValueError("eval_samples must be at least 2 to report a stderr")
        if self.normalize_inputs not in ("auto", "on", "off"):
            raise ValueError("normalize_inputs must be auto, on, or off")

    def resolved_distribution(self) -> DistributionSpec:
        if self.normalize_inputs == "on":
            on = True
        elif self.normalize_inputs == "off":
            on = False
        else:
            on = self.function_class.tag == "S"
        return replace(self.distribution, normalize=on)

    def to_json_dict(self) -> dict:
        cls = self.function_class
        return {
            "distribution": self.distribution.to_json_dict(),
            "class": {"tag": cls.tag, "weights": list(cls.weights)},
            "norm": self.norm,
            "planners": list(self.planners),
            "t_max": self.t_max,
            "kappa": self.kappa,
            "eval_samples": self.eval_samples,
            "seed": self.seed,
            "normalize_inputs": self.normalize_inputs,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        raw_cls = data["class"]
        if isinstance(raw_cls, str):
            fclass = FunctionClass.of(raw_cls)
        else:
            fclass = FunctionClass.of(raw_cls["tag"], raw_cls.get("weights"))
        return cls(
            distribution=DistributionSpec.from_json_dict(data["distribution"]),
            function_class=fclass,
            norm=data.get("norm", "l1"),
            planners=tuple(data.get("planners", ("offline_greedy", "random"))),
            t_max=int(data.get("t_max", 5)),
            kappa=int(data.get("kappa", 90)),
            eval_samples=int(data.get("eval_samples", 90)),
            seed=int(data.get("seed", 0)),
            normalize_inputs=data.get("normalize_inputs", "auto"),
        )


@dataclass
class RunRecord:
    config: dict
    rows: list
    wall_clock: float
    version: str
    rng: dict
    outputs: dict = field(default_factory=dict)


def _mean_stderr(vec: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(vec))
    if vec.size < 2:
        return mean, 0.0
    return mean, float(np.std(vec, ddof=1) / np.sqrt(vec.size))


def run_experiment(
    config: ExperimentConfig,
    out_dir,
    render_figure: bool = True,
    max_candidates: int = MAX_OPTIMAL_CANDIDATES,
) -> RunRecord:
    """Run every configured planner and write results.csv / run.json / figure."""
    start = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    dist = config.resolved_distribution()
    cls = config.function_class
    ground = GroundSet(dist.n)
    base_ids = minimal_information(ground).ids()
    cfg = PlanConfig(
        t=config.t_max,
        kappa=config.kappa,
        function_class=cls,
        norm=config.norm,
        seed=config.seed,
    )
    eval_matrix = sample_matrix(dist, config.kappa, config.eval_samples)

    def eval_prefix(query_ids) -> tuple[float, float]:
        vec = divergence_matrix(
            dist.n, base_ids + list(query_ids), eval_matrix, cls, config.norm
        )
        return _mean_stderr(vec)

    rows = []

    def add_row(step, algorithm, mean, stderr, insample):
        rows.append(
            {
                "step": step,
                "algorithm": algorithm,
                "mean_divergence": mean,
                "stderr": stderr,
                "mean_divergence_insample": insample,
                "n": dist.n,
                "distribution": dist.kind,
                "class": cls.tag,
                "norm": config.norm,
            }
        )

    for name in config.planners:
        if name in ("offline_greedy", "random"):
            planner = offline_greedy if name == "offline_greedy" else random_plan
            res = planner(dist, cfg)
            for step in range(config.t_max + 1):
                mean, stderr = eval_prefix(res.queries[:step])
                add_row(step, name, mean, stderr, res.step_divergence[step])
        elif name == "offline_optimal":
            # Independent exact solve per budget; the reported trajectory of
            # budget t is the chosen size-t set, not a prefix of budget t+1.
            for step in range(config.t_max + 1):
                res = offline_optimal(dist, replace(cfg, t=step), max_candidates)
                mean, stderr = eval_prefix(res.queries)
                add_row(step, name, mean, stderr, res.step_divergence[-1])
        else:
            per_step = np.zeros((config.t_max + 1, config.eval_samples))
            for j in range(config.eval_samples):
                fn = SetFunction(ground, eval_matrix[:, j])
                if name == "oracle_greedy":
                    res = oracle_greedy(fn, cfg)
                    per_step[:, j] = res.step_divergence
                else:
                    for step in range(config.t_max + 1):
                        res = oracle_optimal(fn, replace(cfg, t=step), max_candidates)
                        per_step[step, j] = res.step_divergence[-1]
            for step in range(config.t_max + 1):
                mean, stderr = _mean_stderr(per_step[step])
                add_row(step, name, mean, stderr, mean)

    csv_path = out / "results.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)

    outputs = {"results_csv": str(csv_path)}
    if render_figure:
        from .plotting import render_divergence_curves

        fig_path = out / "divergence.png"
        render_divergence_curves(
            rows, fig_path, title=f"{dist.kind} n={dist.n} ({cls.tag}, {config.norm})"
        )
        outputs["figure"] = str(fig_path)

    record = RunRecord(
        config=config.to_json_dict(),
        rows=rows,
        wall_clock=time.perf_counter() - start,
        version=__version__,
        rng={
            "planning_sample_indices": [0, config.kappa],
            "eval_sample_indices": [config.kappa, config.kappa + config.eval_samples],
            "normalized_inputs": dist.normalize,
            "common_random_numbers": (
                "planning samples are shared across all candidates and steps"
            ),
        },
        outputs=outputs,
    )
    run_path = out / "run.json"
    with open(run_path, "w", encoding="utf-8") as fh:
        json.dump(
            {
                "config": record.config,
                "wall_clock_seconds": record.wall_clock,
                "version": record.version,
                "rng": record.rng,
                "outputs": record.outputs,
                "row_count": len(rows),
            },
            fh,
            indent=2,
        )
    record.outputs["run_json"] = str(run_path)
    return record
