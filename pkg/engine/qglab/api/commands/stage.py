"""run-stage (one stage from the zero triple) and run (a chain of stages)."""
import argparse
import json
import sys
from pathlib import Path

import structlog

from ...jobs import JobLedger, run_job
from ...repositories import ArtifactRepository, SnapshotRepository
from ...schemas import InvariantVerdict, RunConfig, RunReport, StageSummary
from ...services.exact_modes import LATTICE_SCALE
from ...services.scheme import (
    EnergyProfile,
    IterationState,
    ManualSchedule,
    Schedule,
    StageResult,
    StageTolerances,
    euler2d_stage,
    make_schedule,
    run_stage,
)
from ...services.spectral import GridSpec
from .common import add_common_options, check_out, output_dir, resolve_config

logger = structlog.get_logger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("run-stage", help="one stage q=0 → 1 from the zero triple")
    add_common_options(parser)
    parser.set_defaults(handler=lambda args: handle_run(args, "run-stage"))

    parser = subparsers.add_parser("run", help="config.stages consecutive stages")
    add_common_options(parser)
    parser.set_defaults(handler=lambda args: handle_run(args, "run"))


def build_grid(config: RunConfig) -> GridSpec:
    return GridSpec(config.grid.nx, config.grid.ny, config.grid.nz, config.grid.dealias)


def build_schedule(config: RunConfig) -> Schedule:
    if config.schedule is not None:
        s = config.schedule
        lattice = s.lattice or LATTICE_SCALE[config.planar]
        return make_schedule(s.a, s.b, s.c, s.beta, s.alpha, s.eta, lattice=lattice)
    m = config.manual
    return ManualSchedule(m.lam0, m.lam1, m.delta1, m.delta2, m.mu1, eta=m.eta, ell0=m.ell0)


def build_profile(config: RunConfig) -> EnergyProfile:
    p = config.energy_profile
    return EnergyProfile(kind=p.type, center=p.center, width=p.width, height=p.height)


def build_tolerances(config: RunConfig) -> StageTolerances:
    return StageTolerances(**config.tolerances.model_dump())


def summarize(result: StageResult, mode: str) -> StageSummary:
    params = result.params
    samples = result.samples
    norms: dict[str, float] = {}
    for sample in samples:
        for key, value in sample.error_norms.items():
            norms[key] = max(norms.get(key, 0.0), value)
    stress_c0 = max(s.stress_c0 for s in samples)
    return StageSummary(
        q=result.q,
        mode=mode,
        lam=params.lam,
        lam_next=params.lam_next,
        delta_next=params.delta_next,
        delta_after=params.delta_after,
        mu=params.mu,
        ell=params.ell,
        energy_scale=result.context.energy_scale,
        zero_perturbation=all(s.perturbation_energy == 0.0 for s in samples),
        check_times=[s.t for s in samples],
        stress_c0=stress_c0,
        stress_c1=max(s.stress_c1 for s in samples),
        stress_ratio=stress_c0 / (params.eta * params.delta_after),
        error_norms=norms,
        estimates=result.estimates,
    )


def verdicts(result: StageResult) -> list[InvariantVerdict]:
    return [InvariantVerdict(stage=result.q, **check_out(c).model_dump()) for c in result.checks]


def _series(result: StageResult) -> list[tuple[float, ...]]:
    return [(s.t, s.energy, s.gap, s.stress_c0, s.stress_c1, s.rho) for s in result.samples]


def _save_snapshots(repository: SnapshotRepository, result: StageResult) -> None:
    t = float(result.context.profile.center)
    s = result.state.at(t)
    q = result.q + 1
    repository.save(f"grad_psi_q{q}", s.grad_psi)
    repository.save(f"pressure_q{q}", s.pressure)
    repository.save(f"stress_q{q}", s.stress)


def execute(config: RunConfig, command: str, out: Path) -> RunReport:
    """Run the configured stages, persisting the ledger as it grows."""
    grid = build_grid(config)
    schedule = build_schedule(config)
    profile = build_profile(config)
    tolerances = build_tolerances(config)
    stage_fn = euler2d_stage if config.planar else run_stage
    artifacts = ArtifactRepository(out)
    snapshots = SnapshotRepository(out)
    ledger = JobLedger()

    report = RunReport(command=command, seed=config.seed, mode=config.mode, passed=True, config=config.model_dump())
    state = IterationState.zero(grid, planar=config.planar)
    stages = 1 if command == "run-stage" else config.stages
    for q in range(stages):
        job = ledger.create(f"stage-{q}", {"q": q, "mode": config.mode})
        run_job(
            ledger,
            job,
            lambda state=state, q=q: stage_fn(
                state,
                schedule,
                profile,
                tolerances=tolerances,
                check_times=config.check_times,
                strict=False,
                seed=config.seed + q,
            ),
        )
        if job.status == "failed":
            report.passed = False
            report.failure = job.error
            report.failed_assumption = job.assumption
            report.ledger.append(
                InvariantVerdict(
                    name=f"stage{q}.error",
                    assumption=job.assumption or "qglab",
                    passed=False,
                    value=1.0,
                    bound=0.0,
                    detail=job.error or "",
                    stage=q,
                )
            )
            break

        result: StageResult = job.result
        report.stages.append(summarize(result, config.mode))
        report.ledger.extend(verdicts(result))
        artifacts.write_series(f"stage{q}.csv", _series(result))
        if config.snapshots:
            _save_snapshots(snapshots, result)
        if not result.passed:
            failed = result.failures()[0]
            report.passed = False
            report.failure = f"stage {q} failed {failed.name}: {failed.value:.4e} vs bound {failed.bound:.4e}"
            report.failed_assumption = failed.assumption
            break
        state = result.state

    report.timings = ledger.timings()
    artifacts.write_report(report)
    logger.info("run.finished", command=command, passed=report.passed, stages=len(report.stages), output=str(out))
    return report


def handle_run(args: argparse.Namespace, command: str) -> int:
    config = resolve_config(args)
    report = execute(config, command, output_dir(config, args))
    print(json.dumps(report.model_dump(), sort_keys=True, indent=2, ensure_ascii=False))
    if not report.passed:
        print(f"{report.failed_assumption}: {report.failure}", file=sys.stderr)
        return 1
    return 0
