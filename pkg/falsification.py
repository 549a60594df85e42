"""Seeded, replayable campaigns of certified random function pairs.

Trial i draws everything it needs from derive_stream(root_seed, i), so a
campaign gives the same report whatever the worker count, and any single
trial can be replayed from its descriptor alone.
"""
import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import repeat
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from certification import Resolution, check_convex, check_nonnegative, check_s_convex
from errors import GeneratorExhaustedError, ReplayVersionError
from function_model import Interval, derive_stream, parse, random_convex, random_s_convex, render
from inequality_engine import DEFAULT_SLACK_TOL, InequalityId, InequalityReport, eval_inequality

logger = logging.getLogger(__name__)

DESCRIPTOR_VERSION = 1
MAX_REDRAWS = 16
SEED_BOUND = 2 ** 63
# Trials handed to a worker process per task
CHUNKS_PER_WORKER = 8

# Which function families each inequality draws from
S_CONVEX_F = {"t3"}
S_CONVEX_G = {"t2", "t3"}
NEEDS_G = {"t1", "t2", "t3", "c29"}


class CampaignConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    inequality_id: InequalityId
    n_samples: int = Field(gt=0)
    root_seed: int
    interval: Interval
    s_range: tuple[float, float] = (0.1, 1.0)
    complexity: int = Field(2, ge=1, le=8)
    tol: float = Field(DEFAULT_SLACK_TOL, gt=0)
    resolution: Resolution = Resolution()

    @model_validator(mode="after")
    def _consistent(self):
        lo, hi = self.s_range
        if not 0 < lo <= hi <= 1:
            raise ValueError(f"s_range must satisfy 0 < lo <= hi <= 1, got {self.s_range}")
        if self.inequality_id in S_CONVEX_G and self.interval.a < 0:
            raise ValueError(f"{self.inequality_id} needs an interval inside [0, inf), got {self.interval}")
        return self


class TrialDescriptor(BaseModel):
    """Everything needed to rebuild and re-evaluate one trial."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    format_version: int = DESCRIPTOR_VERSION
    inequality_id: InequalityId
    root_seed: int
    index: int
    interval: Interval
    s_range: tuple[float, float]
    complexity: int
    tol: float
    resolution: Resolution
    s1: float
    s2: float
    redraws: int
    f_spec: str
    g_spec: Optional[str] = None


class ViolationRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    trial: TrialDescriptor
    report: InequalityReport


class CampaignReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    format_version: int = DESCRIPTOR_VERSION
    config: CampaignConfig
    samples_run: int
    min_slack: float
    min_slack_sample: TrialDescriptor
    violations: list[ViolationRecord]
    inconclusive_count: int
    redraws: int


class _Trial:
    def __init__(self, descriptor, f, g):
        self.descriptor = descriptor
        self.f = f
        self.g = g


def _certified(spec, s, interval, resolution, seed):
    if s is None:
        return check_convex(spec, interval, resolution, seed).passed
    if not check_s_convex(spec, s, interval, resolution, seed).passed:
        return False
    return s == 1.0 or check_nonnegative(spec, interval).passed


def _draw_trial(params, index):
    """Draw and certify the function pair for one trial.

    params is a CampaignConfig or a TrialDescriptor; both carry the fields
    the draw depends on.
    """
    ineq = params.inequality_id
    interval = params.interval
    rng = derive_stream(params.root_seed, index)
    complexity = int(rng.integers(1, params.complexity + 1))
    lo, hi = params.s_range
    s1 = float(rng.uniform(lo, hi)) if ineq in S_CONVEX_F else 1.0
    s2 = float(rng.uniform(lo, hi)) if ineq in S_CONVEX_G else 1.0
    f_s = s1 if ineq in S_CONVEX_F else None
    g_s = s2 if ineq in S_CONVEX_G else None

    def generate(seed, s):
        if s is None:
            return random_convex(seed, complexity, interval)
        return random_s_convex(seed, s, complexity)

    for attempt in range(MAX_REDRAWS):
        f_seed, g_seed, cert_seed = (int(v) for v in rng.integers(0, SEED_BOUND, size=3))
        f = generate(f_seed, f_s)
        g = generate(g_seed, g_s) if ineq in NEEDS_G else None
        if not _certified(f, f_s, interval, params.resolution, cert_seed):
            logger.warning("trial %d: f failed certification, redrawing: %s", index, render(f))
            continue
        if g is not None and not _certified(g, g_s, interval, params.resolution, cert_seed):
            logger.warning("trial %d: g failed certification, redrawing: %s", index, render(g))
            continue

        descriptor = TrialDescriptor(
            inequality_id=ineq,
            root_seed=params.root_seed,
            index=index,
            interval=interval,
            s_range=params.s_range,
            complexity=params.complexity,
            tol=params.tol,
            resolution=params.resolution,
            s1=s1,
            s2=s2,
            redraws=attempt,
            f_spec=render(f),
            g_spec=render(g) if g is not None else None,
        )
        return _Trial(descriptor, f, g)
    raise GeneratorExhaustedError(
        f"trial {index} of {ineq}: no certified pair after {MAX_REDRAWS} draws")


def _evaluate(trial):
    d = trial.descriptor
    return eval_inequality(d.inequality_id, trial.f, trial.g, d.interval, s1=d.s1, s2=d.s2, tol=d.tol)


def _run_trial(config, index):
    trial = _draw_trial(config, index)
    report = _evaluate(trial)
    logger.debug("trial %d: slack=%r verdict=%s", index, report.slack, report.verdict)
    return trial.descriptor, report


def run_campaign(config, workers=1, csv_path=None):
    """Run config.n_samples trials and aggregate slack statistics."""
    logger.info("campaign %s: %d trials, seed %d, interval %s",
                config.inequality_id, config.n_samples, config.root_seed, config.interval)
    indices = range(config.n_samples)
    if workers > 1:
        # pool.map yields in index order, so the report does not depend on scheduling
        chunksize = max(1, config.n_samples // (workers * CHUNKS_PER_WORKER))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trial, repeat(config), indices, chunksize=chunksize))
    else:
        results = [_run_trial(config, i) for i in indices]

    # Ties on the minimum go to the lowest index
    min_descriptor, min_report = min(results, key=lambda item: (item[1].slack, item[0].index))
    violations = [ViolationRecord(trial=d, report=r) for d, r in results if r.verdict == "violated"]
    inconclusive = sum(1 for _, r in results if r.verdict == "inconclusive")
    redraws = sum(d.redraws for d, _ in results)
    if redraws:
        logger.warning("campaign %s needed %d redraws; the generators should not need any",
                       config.inequality_id, redraws)

    if csv_path is not None:
        write_csv(results, csv_path)

    report = CampaignReport(
        config=config,
        samples_run=len(results),
        min_slack=min_report.slack,
        min_slack_sample=min_descriptor,
        violations=violations,
        inconclusive_count=inconclusive,
        redraws=redraws,
    )
    logger.info("campaign %s done: min slack %.3e, %d violations, %d inconclusive",
                config.inequality_id, report.min_slack, len(violations), inconclusive)
    return report


def write_csv(results, path):
    with Path(path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "s1", "s2", "slack", "verdict"])
        for descriptor, report in results:
            writer.writerow([descriptor.index, repr(descriptor.s1), repr(descriptor.s2),
                             repr(report.slack), report.verdict])


def regenerate_trial(descriptor):
    """Rebuild the function pair a descriptor points at."""
    if descriptor.format_version != DESCRIPTOR_VERSION:
        raise ReplayVersionError(
            f"descriptor format {descriptor.format_version} does not match {DESCRIPTOR_VERSION}")
    trial = _draw_trial(descriptor, descriptor.index)
    if trial.descriptor.f_spec != descriptor.f_spec or trial.descriptor.g_spec != descriptor.g_spec:
        logger.warning("trial %d regenerated different functions than recorded; "
                       "the descriptor was edited or comes from another build", descriptor.index)
    return trial


def replay(descriptor):
    """Re-evaluate a recorded trial; reproduces the recorded report exactly."""
    return _evaluate(regenerate_trial(descriptor))


def recorded_functions(descriptor):
    """The function pair exactly as recorded in the descriptor."""
    g = parse(descriptor.g_spec) if descriptor.g_spec is not None else None
    return parse(descriptor.f_spec), g
