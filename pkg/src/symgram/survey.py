"""Monte-Carlo rank distributions over the invariant Gram spectrahedron."""

from __future__ import annotations

import csv
import hashlib
import io
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .certify import adapted_basis_for, gram_rank, solve_spectrahedron
from .gramspec import BlockSpectrahedron, build_spectrahedron, candidate_zeros
from .polycore import SparsePoly, render
from .repsn import resolve_group
from .sdpcore import SdpOptions, Status

RANK_CUTOFF = 1e-7


class NotSosError(ValueError):
    """Raised when a survey is requested for a form with no PSD Gram matrix."""


@dataclass
class SampleRecord:
    index: int
    seed: int
    status: str
    params: list[float]
    rank: int | None
    block_ranks: list[int] | None


@dataclass
class SurveyReport:
    instance_id: str
    polynomial: str
    group: str
    samples: int
    master_seed: int
    records: list[SampleRecord] = field(default_factory=list)

    @property
    def histogram(self) -> dict[int, int]:
        counts = Counter(r.rank for r in self.records if r.rank is not None)
        return dict(sorted(counts.items()))

    @property
    def failures(self) -> int:
        return sum(1 for r in self.records if r.rank is None)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["rank", "count"])
        for rank, count in self.histogram.items():
            writer.writerow([rank, count])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "format": "symgram-survey",
            "version": 1,
            "instance_id": self.instance_id,
            "polynomial": self.polynomial,
            "group": self.group,
            "samples": self.samples,
            "seed": self.master_seed,
            "histogram": {str(k): v for k, v in self.histogram.items()},
            "records": [
                {"index": r.index, "seed": r.seed, "status": r.status, "params": r.params,
                 "rank": r.rank, "block_ranks": r.block_ranks}
                for r in self.records
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SurveyReport":
        if data.get("format") != "symgram-survey":
            raise ValueError("not a survey report")
        report = cls(data["instance_id"], data["polynomial"], data["group"], data["samples"], data["seed"])
        report.records = [SampleRecord(r["index"], r["seed"], r["status"], list(r["params"]),
                                       r["rank"], r["block_ranks"]) for r in data["records"]]
        return report


def instance_id(f: SparsePoly) -> str:
    return hashlib.sha256(render(f).encode()).hexdigest()[:12]


def random_block_objective(spec: BlockSpectrahedron, rng: np.random.Generator) -> np.ndarray:
    """Objective vector for sum_i n_i <R_i, Q_i(p)> with R_i standard normal symmetric."""
    dims = spec.layout.dims
    objective = np.zeros(spec.num_params)
    for n_i, dirs in zip(dims, spec.block_directions):
        m = dirs.shape[-1]
        if m == 0:
            continue
        raw = rng.standard_normal((m, m))
        sym = (raw + raw.T) / np.sqrt(2.0)
        objective += n_i * np.tensordot(dirs, sym, axes=([1, 2], [0, 1]))
    return objective


def sample_seeds(seed: int, samples: int) -> list[int]:
    children = np.random.SeedSequence(seed).spawn(samples)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def _run_sample(spec: BlockSpectrahedron, zeros, index: int, seed: int, opts: SdpOptions) -> SampleRecord:
    rng = np.random.default_rng(seed)
    objective = random_block_objective(spec, rng)
    status, params, blocks, _, _ = solve_spectrahedron(spec, objective, opts, zeros)
    if params is None:
        return SampleRecord(index, seed, status.value, [], None, None)
    total, per_block = gram_rank(blocks, spec.layout.dims, RANK_CUTOFF)
    return SampleRecord(index, seed, status.value, [float(p) for p in params], total, list(per_block))


def _run_chunk(args) -> list[SampleRecord]:
    spec, zeros, items, opts = args
    return [_run_sample(spec, zeros, i, s, opts) for i, s in items]


def rank_survey(f: SparsePoly, group="sn", samples: int = 100, seed: int = 0,
                opts: SdpOptions | None = None, jobs: int = 1, use_zeros: bool = True) -> SurveyReport:
    """Minimize random invariant linear objectives over K_f^G and record ranks."""
    opts = opts or SdpOptions()
    if f.is_zero() or not f.is_homogeneous() or f.degree() % 2:
        raise NotSosError("survey needs a nonzero form of even degree")
    rep = resolve_group(group, f.n, f.degree() // 2)
    spec = build_spectrahedron(f, rep, adapted_basis_for(rep))
    zeros = candidate_zeros(f) if use_zeros else []
    report = SurveyReport(instance_id(f), render(f), rep.name, samples, seed)
    status, params, _, _, message = solve_spectrahedron(spec, None, opts, zeros)
    if params is None:
        raise NotSosError(f"form is not SOS ({status.value}: {message})")
    seeds = list(enumerate(sample_seeds(seed, samples)))
    if jobs <= 1 or samples < 2:
        report.records = _run_chunk((spec, zeros, seeds, opts))
    else:
        chunks = [seeds[k::jobs] for k in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = pool.map(_run_chunk, [(spec, zeros, chunk, opts) for chunk in chunks if chunk])
            records = [r for part in parts for r in part]
        report.records = sorted(records, key=lambda r: r.index)
    return report


def survey_status(report: SurveyReport) -> Status:
    return Status.INDETERMINATE if report.failures else Status.OPTIMAL
