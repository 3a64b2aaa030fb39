"""Experiment orchestrator - fans experiments out and merges them in config order"""

import asyncio
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

from meandim.algebraic.experiments import rdim_prodim_experiment, torus_covering_lower_bound
from meandim.algebraic.haar import haar_measure
from meandim.config import config
from meandim.ergodic.pipeline import nice_measure_pipeline
from meandim.estimation.profiles import covering_profile, metric_mean_dimension_estimate
from meandim.execution.models import ExperimentConfig, ExperimentModel, MeasureModel
from meandim.execution.suite import suite_experiments
from meandim.hausdorff.frostman import frostman_measure, lemma_inequality_check, quantitative_frostman
from meandim.hausdorff.mean import mean_hausdorff_estimate
from meandim.ratedist.dynamical import rd_curve, rdim_estimate
from meandim.systems.measures import MeasureOnSystem, product_measure, uniform_measure
from meandim.systems.orbit import orbit_metric
from meandim.systems.shift import SystemSpec
from meandim.tiling.markers import boundary_density, lemma_trace, periodic_trace
from meandim.tiling.voronoi import check_equivariance, tile
from meandim.utils import logger, to_jsonable


@dataclass
class ExperimentResult:
    """One experiment's payload, flat CSV rows and pass/fail checks"""

    name: str
    kind: str
    payload: Dict
    rows: List[Dict] = field(default_factory=list)
    checks: Dict[str, bool] = field(default_factory=dict)
    unconverged: int = 0
    duration: float = 0.0

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> Dict:
        # no wall-clock data here: results.json must be reproducible
        checks = {k: bool(v) for k, v in self.checks.items()}
        return {"name": self.name, "kind": self.kind, "passed": self.passed, "checks": checks,
                "unconverged": self.unconverged, "budgets": config.budgets(), "result": to_jsonable(self.payload)}


def build_measure(model: MeasureModel, system: SystemSpec) -> MeasureOnSystem:
    if model.kind == "product":
        return product_measure(system, 1, model.weights)
    if model.kind == "haar":
        return haar_measure(system)
    return uniform_measure(system, 1)


def _expectation(exp: ExperimentModel, value: float) -> Dict[str, bool]:
    if exp.expect is None:
        return {}
    return {"expected_range": exp.expect.holds(value)}


class ExperimentRunner:
    """Runs every experiment of a config, at most `jobs` at a time"""

    def __init__(self, experiment_config: ExperimentConfig, jobs: Optional[int] = None):
        self.config = experiment_config
        self.jobs = max(1, jobs or config.DEFAULT_JOBS)
        self.run_count = 0
        self._handlers: Dict[str, Callable[[ExperimentModel], ExperimentResult]] = {
            "covering-profile": self._covering_profile,
            "dim-profile": self._dim_profile,
            "rd-curve": self._rd_curve,
            "frostman": self._frostman,
            "nice-measure": self._nice_measure,
            "tiling": self._tiling,
            "algebraic": self._algebraic,
            "example-suite": self._example_suite,
        }

    async def run_all(self, experiments: Optional[List[ExperimentModel]] = None) -> List[ExperimentResult]:
        """Execute the experiments concurrently; results come back in config order"""
        experiments = self.config.experiments if experiments is None else experiments
        self.run_count += 1
        start = time.time()
        logger.info(f"Starting run #{self.run_count}: {len(experiments)} experiments, {self.jobs} jobs")

        semaphore = asyncio.Semaphore(self.jobs)

        async def guarded(exp: ExperimentModel) -> ExperimentResult:
            async with semaphore:
                return await asyncio.to_thread(self.run_experiment, exp)

        results = await asyncio.gather(*(guarded(exp) for exp in experiments))
        logger.info(f"Run #{self.run_count} completed in {time.time() - start:.2f}s; "
                    f"{sum(r.passed for r in results)}/{len(results)} experiments passed their checks")
        return list(results)

    def run_experiment(self, exp: ExperimentModel) -> ExperimentResult:
        start = time.time()
        logger.info(f"Experiment {exp.name} ({exp.kind}) started")
        result = self._handlers[exp.kind](exp)
        result.duration = time.time() - start
        logger.info(f"Experiment {exp.name} finished in {result.duration:.2f}s"
                    + ("" if result.passed else f"; failed checks: {[k for k, v in result.checks.items() if not v]}"))
        return result

    def _system(self, exp: ExperimentModel) -> SystemSpec:
        return exp.system.build(self.config.seed)

    # -- handlers -----------------------------------------------------------

    def _covering_profile(self, exp: ExperimentModel) -> ExperimentResult:
        system = self._system(exp)
        samples = covering_profile(system, exp.grids.epsilons, exp.grids.N, exp.metric, exp.mode)
        estimate = metric_mean_dimension_estimate(samples, exp.headline, system)
        payload = {"system": system.to_dict(), "estimate": estimate.to_dict()}
        return ExperimentResult(exp.name, exp.kind, payload, rows=samples,
                                checks=_expectation(exp, estimate.slope))

    def _dim_profile(self, exp: ExperimentModel) -> ExperimentResult:
        system = self._system(exp)
        estimate = mean_hausdorff_estimate(system, exp.grids.epsilons, exp.grids.N, exp.grids.tau, exp.metric,
                                           exp.mode)
        payload = {"system": system.to_dict(), "estimate": estimate.to_dict()}
        return ExperimentResult(exp.name, exp.kind, payload, rows=estimate.to_frame().to_dict(orient="records"),
                                checks=_expectation(exp, estimate.value))

    def _rd_curve(self, exp: ExperimentModel) -> ExperimentResult:
        system = self._system(exp)
        measure = build_measure(exp.measure, system)
        curve = rd_curve(system, measure, exp.grids.epsilons, exp.grids.N, exp.method)
        estimate = rdim_estimate(curve, exp.headline, system.truncation_error())
        checks = {"monotone": curve.monotone(), **_expectation(exp, estimate.slope)}
        if curve.unconverged:
            logger.warning(f"{exp.name}: {len(curve.unconverged)} RD points did not converge")
        return ExperimentResult(exp.name, exp.kind, {"rd_curve": curve.to_dict(), "rdim": estimate.to_dict()},
                                rows=curve.to_frame().to_dict(orient="records"), checks=checks,
                                unconverged=len(curve.unconverged))

    def _frostman(self, exp: ExperimentModel) -> ExperimentResult:
        system = self._system(exp)
        g = exp.grids
        stages, rows, checks = [], [], {}
        for N in sorted(set(g.N)):
            space = orbit_metric(system, N, exp.metric)
            if exp.c is not None:
                report = quantitative_frostman(space, exp.c, g.delta, g.tau, exp.family)
                stage = {"N": N, "quantitative": report.to_dict()}
                passed = report.scaling.passed
                rows.append({"N": N, "s": report.s, "dimension": report.dimension, "delta0": report.delta0,
                             "worst_margin": report.scaling.worst_margin, "passed": passed})
            else:
                # the orbit metric at depth N carries N copies of the per-iterate exponent
                certificate = frostman_measure(space, g.s * N, g.delta, g.tau, exp.family)
                stage = {"N": N, "exponent": g.s * N, "certificate": certificate.to_dict()}
                passed = certificate.valid
                if g.tau == 0 and space.size <= config.ALL_SUBSETS_BUDGET:
                    lemma = lemma_inequality_check(space, g.s * N, g.delta)
                    stage["lemma_inequality"] = lemma.to_dict()
                    checks[f"lemma_inequality_N{N}"] = lemma.holds
                rows.append({"N": N, "s": g.s * N, "mass": certificate.mass, "lp_value": certificate.lp_value,
                             "gap": certificate.gap, "worst_slack": certificate.worst_slack, "passed": passed})
            checks[f"scaling_law_N{N}"] = passed
            stages.append(stage)
        return ExperimentResult(exp.name, exp.kind, {"system": system.to_dict(), "stages": stages}, rows=rows,
                                checks=checks)

    def _nice_measure(self, exp: ExperimentModel) -> ExperimentResult:
        system = self._system(exp)
        g = exp.grids
        report = nice_measure_pipeline(system, g.s, g.delta, g.tau, g.N, g.epsilons, exp.family, exp.headline,
                                       exp.cylinder_length)
        checks = {"sound": report.sound, "scaling_law": report.scaling_passed}
        if report.estimate is not None:
            checks.update(_expectation(exp, report.estimate.slope))
        return ExperimentResult(exp.name, exp.kind, report.to_dict(),
                                rows=report.to_frame().to_dict(orient="records"), checks=checks,
                                unconverged=len(report.curve.unconverged))

    def _tiling(self, exp: ExperimentModel) -> ExperimentResult:
        t = exp.tiling
        if t.recipe == "lemma":
            traces = [lemma_trace(t.N, t.M, t.length, self.config.seed + i, t.start) for i in range(t.count)]
        else:
            start = -(t.length // 2) if t.start is None else t.start
            traces = [periodic_trace(t.period, start, t.length, t.height)]
        density = boundary_density(traces, t.R)
        tilings = [tile(trace) for trace in traces]
        equivariance = [check_equivariance(tiling, tile(trace.shifted(n)), n)
                        for trace, tiling in zip(traces, tilings) for n in t.shifts]
        checks = {"equivariance": all(r.passed for r in equivariance)}
        if t.recipe == "lemma":
            checks["boundary_density"] = density.density < 1.0 / t.N
        payload = {"recipe": t.recipe, "density": density.to_dict(),
                   "equivariance": [r.to_dict() for r in equivariance], "tiling": tilings[0].to_dict()}
        return ExperimentResult(exp.name, exp.kind, payload,
                                rows=tilings[0].to_frame().to_dict(orient="records"), checks=checks)

    def _algebraic(self, exp: ExperimentModel) -> ExperimentResult:
        spec = exp.system.action_spec()
        g = exp.grids
        report = rdim_prodim_experiment(spec, g.epsilons, g.N, exp.headline, exp.mode, g.proxy_epsilons)
        payload = report.to_dict()
        checks = {"chain": report.chain_holds, "subadditive": report.subadditive,
                  "ranks_agree": report.prodim.ranks_agree}
        if exp.expect is not None:
            checks["prodim_range"] = exp.expect.holds(report.prodim.value)
            checks["rdim_range"] = exp.expect.holds(report.rdim.slope)
            if report.proxy is not None:
                checks["proxy_range"] = exp.expect.holds(report.proxy.slope)
        small = [eps for eps in g.epsilons if 1.0 / spec.q <= eps < 0.25]
        if small:
            N = min(g.N)
            if spec.to_system().exhaustive_count(N) <= config.ENUMERATION_BUDGET:
                bounds = [torus_covering_lower_bound(spec, N, eps) for eps in small]
                payload["torus_covering"] = [b.to_dict() for b in bounds]
                checks["torus_covering"] = all(b.passed for b in bounds)
        return ExperimentResult(exp.name, exp.kind, payload,
                                rows=report.curve.to_frame().to_dict(orient="records"), checks=checks,
                                unconverged=len(report.curve.unconverged))

    def _example_suite(self, exp: ExperimentModel) -> ExperimentResult:
        logger.info(f"Example suite {exp.suite}")
        parts = [self.run_experiment(inner) for inner in suite_experiments(exp.suite)]
        payload = {"suite": exp.suite, "experiments": [p.to_dict() for p in parts]}
        rows = [{"part": p.name, **row} for p in parts for row in p.rows]
        checks = {f"{p.name}.{k}": v for p in parts for k, v in p.checks.items()}
        return ExperimentResult(exp.name, exp.kind, payload, rows=rows, checks=checks,
                                unconverged=sum(p.unconverged for p in parts))
