"""verify-modes, verify-operators, verify-blocks."""
import argparse
import json
import sys
from functools import partial

import structlog

from ...jobs import JobLedger, run_job
from ...repositories import ArtifactRepository
from ...schemas import Certificate, CheckOut
from ...services import certify_blocks, certify_modes, certify_operators
from .common import add_common_options, check_out, output_dir, resolve_config

logger = structlog.get_logger(__name__)

SUITES = {
    "verify-modes": (certify_modes, "exact mode families, coefficient solves and the ε-ball"),
    "verify-operators": (certify_operators, "spectral operator identities, Bernstein gains and flow maps"),
    "verify-blocks": (certify_blocks, "stationary blocks and the cutoff factorization"),
}


def register(subparsers) -> None:
    for name, (_, description) in SUITES.items():
        parser = subparsers.add_parser(name, help=description)
        add_common_options(parser)
        parser.set_defaults(handler=partial(handle_verify, suite=name))


def handle_verify(args: argparse.Namespace, suite: str) -> int:
    config = resolve_config(args)
    certify, _ = SUITES[suite]
    ledger = JobLedger()
    job = run_job(ledger, ledger.create(suite, {"seed": config.seed}), lambda: certify(seed=config.seed))

    if job.status == "failed":
        print(f"{job.assumption}: {job.error}", file=sys.stderr)
        checks = [CheckOut(name=f"{suite}.error", assumption=job.assumption or "qglab", passed=False, value=1.0, bound=0.0, detail=job.error or "")]
        certificate = Certificate(suite=suite, seed=config.seed, passed=False, checks=checks)
    else:
        result = job.result
        certificate = Certificate(
            suite=suite,
            seed=config.seed,
            passed=result.passed,
            checks=[check_out(c) for c in result.checks],
            details=result.details,
            elapsed=result.elapsed,
        )

    ArtifactRepository(output_dir(config, args)).write_json(f"{suite}.json", certificate)
    print(json.dumps(certificate.model_dump(), sort_keys=True, indent=2, ensure_ascii=False))
    for failure in certificate.failures():
        logger.warning("verify.failed_check", suite=suite, check=failure.name, value=failure.value, bound=failure.bound)
    return 0 if certificate.passed else 1
