"""Low-lying sector spectra of the super-Hamiltonian and SUSY pairing.

The Hamiltonian of a spinor field decouples by Fermi sector: a scalar block
for the empty sector, a coupled two-component block for the singly occupied
pair, and a scalar block for the full sector. Each restriction is solved as
a symmetric eigenproblem under the measure-weighted inner product: with the
node weight matrix M = diag(sqrtg h1 h2), the similarity M^(1/2) H M^(-1/2)
makes the restriction symmetric up to the boundary-row defect that
algebra_report measures; the defect is discarded by explicit
symmetrization before solving, so reported eigen-residuals are residuals
of the symmetrized operator. Zero-mode counts use a threshold tied to the
measured adjointness defect rather than a fixed constant, so the spectral
claim degrades together with the discretization, never silently.

Nonzero eigenvalues of the scalar sectors reappear in the fermionic sector
(the supercharges map eigenstates across sectors without changing the
eigenvalue), which pairing_report checks by multiset matching, and
intertwine_check verifies state by state through the action of Q+.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
import scipy.sparse.linalg as spla

from . import operators as ops
from .operators import BlockOperator, ComposedOperator, Grid, SpinorField

MAX_EIGENVALUES = 40
DENSE_DIMENSION_LIMIT = 4096

# flat index ranges of the three Fermi sectors in a (4 N,) spinor vector,
# as multiples of the per-sector block size N
SECTOR_SLOTS = {0: (0,), 1: (1, 2), 2: (3,)}


class LeakageError(RuntimeError):
    """Sector-block leakage of H exceeds the allowed tolerance."""


class ConvergenceError(RuntimeError):
    """Eigensolver failed to produce any converged eigenpair."""


@dataclass(frozen=True)
class EigPair:
    """One converged eigenpair of a sector-restricted Hamiltonian.

    vector holds the components on the grid in the original field
    convention (measure weighting undone), shape (components, n1, n2).
    residual is ||H psi - lambda psi|| / ||psi|| for the symmetrized
    sector operator.
    """

    sector: int
    eigenvalue: float
    residual: float
    vector: np.ndarray
    converged: bool = True


@dataclass(eq=False)
class SectorOperator:
    """Weight-symmetrized Hamiltonian with measured algebra quality."""

    grid: Grid
    matrix: sparse.csr_matrix          # symmetrized, full 4N x 4N
    report: ops.AlgebraReport
    _sector_cache: Dict[int, sparse.csr_matrix] = field(default_factory=dict,
                                                        repr=False)

    @property
    def zero_mode_threshold(self) -> float:
        """Eigenvalues below this count as numerically zero.

        Ten times the measured adjointness defect: the symmetrization
        discarded exactly that much, so nothing smaller is resolvable.
        """
        return 10.0 * self.report.adjointness

    def sector_matrix(self, sector: int) -> sparse.csr_matrix:
        if sector not in SECTOR_SLOTS:
            raise ValueError(f"sector must be 0, 1 or 2, got {sector}")
        if sector not in self._sector_cache:
            N = self.grid.size
            idx = np.concatenate(
                [np.arange(s * N, (s + 1) * N) for s in SECTOR_SLOTS[sector]])
            self._sector_cache[sector] = self.matrix[np.ix_(idx, idx)].tocsr()
        return self._sector_cache[sector]


def build_sector_operator(Q: BlockOperator, Qdag: BlockOperator, grid: Grid,
                          trials: int = 6, seed: int = 0,
                          leakage_tol: float = 1e-10) -> SectorOperator:
    """Assemble H = (QQ+ + Q+Q)/2, weight-symmetrize, and gate on leakage.

    The leakage gate is a refusal, not a warning: a Hamiltonian that mixes
    Fermi sectors has no meaningful per-sector spectrum.
    """
    report = ops.algebra_report(Q, Qdag, grid, trials=trials, seed=seed)
    if report.block_leakage > leakage_tol:
        raise LeakageError(
            f"sector-block leakage {report.block_leakage:.3e} exceeds "
            f"{leakage_tol:.1e}; the composed H does not respect the sector "
            f"split on this grid")
    H4 = ops.hamiltonian_composed(Q, Qdag).assemble()
    sq = np.sqrt(grid.weight().ravel())
    w_half = sparse.diags(np.tile(sq, 4))
    w_back = sparse.diags(np.tile(1.0 / sq, 4))
    B = (w_half @ H4 @ w_back).tocsr()
    sym = (B + B.T) * 0.5
    sym4 = sym.real if np.iscomplexobj(sym) else sym
    return SectorOperator(grid=grid, matrix=sym4.tocsr(), report=report)


def _solve_symmetric(A: sparse.csr_matrix, k: int, seed: int):
    """k smallest eigenpairs of a sparse symmetric matrix.

    Dense solve below DENSE_DIMENSION_LIMIT, otherwise shift-invert
    Lanczos anchored below the spectrum. Returns (values, vectors,
    converged_count).
    """
    dim = A.shape[0]
    if dim <= DENSE_DIMENSION_LIMIT:
        vals, vecs = scipy.linalg.eigh(A.toarray(), subset_by_index=(0, k - 1))
        return vals, vecs, k
    rng = np.random.default_rng(seed)
    v0 = rng.standard_normal(dim)
    try:
        vals, vecs = spla.eigsh(A, k=k, sigma=-0.5, which="LM", v0=v0)
    except spla.ArpackNoConvergence as err:
        vals, vecs = err.eigenvalues, err.eigenvectors
        if vals is None or len(vals) == 0:
            raise ConvergenceError(
                "eigensolver returned no converged pairs") from err
    order = np.argsort(vals)
    return vals[order], vecs[:, order], len(vals)


def sector_spectrum(op: SectorOperator, sector: int, k: int,
                    tol: float = 1e-8, seed: int = 0) -> List[EigPair]:
    """k smallest eigenpairs of one Fermi sector, ascending.

    Eigenvectors are returned in the original field convention; residuals
    are measured against the symmetrized sector operator and must sit at
    solver精 level, far below tol, unless convergence was partial (then
    the pair is flagged).
    """
    if not 1 <= k <= MAX_EIGENVALUES:
        raise ValueError(f"k must lie in [1, {MAX_EIGENVALUES}], got {k}")
    A = op.sector_matrix(sector)
    if k >= A.shape[0]:
        raise ValueError(f"k={k} too large for sector dimension {A.shape[0]}")
    vals, vecs, n_ok = _solve_symmetric(A, k, seed)

    grid = op.grid
    N = grid.size
    ncomp = len(SECTOR_SLOTS[sector])
    sq = np.sqrt(grid.weight().ravel())
    weights = np.tile(sq, ncomp)
    pairs = []
    for i, lam in enumerate(vals):
        phi = vecs[:, i]
        res = float(np.linalg.norm(A @ phi - lam * phi) / np.linalg.norm(phi))
        psi = (phi / weights).reshape(ncomp, *grid.shape)
        pairs.append(EigPair(sector=sector, eigenvalue=float(lam),
                             residual=res, vector=psi,
                             converged=(i < n_ok and res <= tol)))
    return pairs


# ------------------------------------------------------------------ pairing

@dataclass(frozen=True)
class PairEntry:
    """A scalar-sector eigenvalue matched (or not) to a fermionic one."""

    eigenvalue: float
    sector_a: int
    sector_b: int
    delta: float                  # |lambda_a - lambda_b|, inf when unmatched
    matched: bool


@dataclass(frozen=True)
class PairingSummary:
    entries: Tuple[PairEntry, ...]
    unmatched: Tuple[PairEntry, ...]
    tol: float

    @property
    def complete(self) -> bool:
        return not self.unmatched


def match_pairs(scalar_vals: Sequence[float], fermi_vals: Sequence[float],
                sector_a: int, threshold: float, tol: float) -> List[PairEntry]:
    """Greedily match each above-threshold scalar eigenvalue to the nearest
    still-unused fermionic eigenvalue. Zero modes are annihilated rather
    than mapped, so values below threshold are skipped entirely."""
    available = list(fermi_vals)
    entries = []
    for lam in sorted(scalar_vals):
        if lam <= threshold:
            continue
        if available:
            j = int(np.argmin([abs(lam - mu) for mu in available]))
            delta = abs(lam - available[j])
            if delta <= tol:
                available.pop(j)
                entries.append(PairEntry(lam, sector_a, 1, delta, True))
                continue
            entries.append(PairEntry(lam, sector_a, 1, delta, False))
        else:
            entries.append(PairEntry(lam, sector_a, 1, float("inf"), False))
    return entries


def pairing_report(sector0: Sequence[EigPair], sector1: Sequence[EigPair],
                   sector2: Sequence[EigPair], threshold: float,
                   tol: float) -> PairingSummary:
    """Match nonzero scalar-sector eigenvalues into the fermionic spectrum.

    The fermionic multiset is consumed as matches are made, once per match,
    because each supercharge image is one state: a double eigenvalue needs
    two fermionic partners, not one counted twice.
    """
    fermi = [p.eigenvalue for p in sector1]
    entries = match_pairs([p.eigenvalue for p in sector0], fermi, 0,
                          threshold, tol)
    used = [e.delta for e in entries if e.matched]
    remaining = list(fermi)
    for e in entries:
        if e.matched:
            j = int(np.argmin([abs(e.eigenvalue - mu) for mu in remaining]))
            remaining.pop(j)
    entries += match_pairs([p.eigenvalue for p in sector2], remaining, 2,
                           threshold, tol)
    unmatched = tuple(e for e in entries if not e.matched)
    return PairingSummary(entries=tuple(entries), unmatched=unmatched, tol=tol)


# ------------------------------------------------------------- intertwining

@dataclass(frozen=True)
class IntertwineResult:
    residual: float
    annihilated: bool


def intertwine_check(Qdag: BlockOperator, pair: EigPair,
                     H: ComposedOperator,
                     annihilation_floor: float = 1e-10) -> IntertwineResult:
    """How well Q+ maps a sector-0 eigenstate to a fermionic eigenstate.

    Returns the relative eigen-residual of Q+ psi at the same eigenvalue.
    A zero mode is annihilated, not mapped: when ||Q+ psi|| falls below
    annihilation_floor times ||psi|| the check reports that instead.
    """
    if pair.sector != 0:
        raise ValueError("intertwine_check expects a sector-0 eigenpair")
    grid = Qdag.grid
    psi = SpinorField.from_sector(grid, 0, pair.vector[0])
    image = Qdag.apply(psi)
    norm_psi = ops.weighted_norm(psi)
    norm_image = ops.weighted_norm(image)
    if norm_image <= annihilation_floor * norm_psi:
        return IntertwineResult(residual=0.0, annihilated=True)
    mismatch = H.apply(image).values - pair.eigenvalue * image.values
    res = ops.weighted_norm(SpinorField(grid, mismatch)) / norm_image
    return IntertwineResult(residual=float(res), annihilated=False)


# -------------------------------------------------------------- full report

@dataclass(frozen=True)
class SpectrumReport:
    """Per-sector spectra with pairing, zero-mode counts and metadata."""

    sector0: Tuple[EigPair, ...]
    sector1: Tuple[EigPair, ...]
    sector2: Tuple[EigPair, ...]
    pairing: PairingSummary
    zero_modes: Tuple[int, int, int]
    zero_mode_threshold: float
    leakage: float
    adjointness: float
    grid_meta: dict
    params_meta: dict

    def sectors(self) -> Tuple[Tuple[EigPair, ...], ...]:
        return (self.sector0, self.sector1, self.sector2)

    def to_dict(self) -> dict:
        return {
            "sectors": [[p.eigenvalue for p in sec] for sec in self.sectors()],
            "pairs": [[e.eigenvalue, e.sector_a, e.sector_b, e.delta]
                      for e in self.pairing.entries],
            "zero_modes": list(self.zero_modes),
            "zero_mode_threshold": self.zero_mode_threshold,
            "residuals": [p.residual for sec in self.sectors() for p in sec],
            "grid": self.grid_meta,
            "params": self.params_meta,
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)


def grid_metadata(grid: Grid) -> dict:
    return {
        "chart": grid.chart.kind,
        "d": grid.chart.d,
        "beta": grid.chart.beta,
        "n1": grid.n1,
        "n2": grid.n2,
        "bounds": [grid.q1min, grid.q1max, grid.q2min, grid.q2max],
        "stencil_order": grid.stencil_order,
        "periodic2": grid.periodic2,
    }


def spectrum_report(Q: BlockOperator, Qdag: BlockOperator, grid: Grid,
                    k: int = 6, tol: float = 1e-8,
                    pair_tol: float = 5e-3, seed: int = 0,
                    params_meta: Optional[dict] = None) -> SpectrumReport:
    """Solve all three sectors and assemble the full report."""
    op = build_sector_operator(Q, Qdag, grid, seed=seed)
    secs = [tuple(sector_spectrum(op, s, k, tol=tol, seed=seed))
            for s in (0, 1, 2)]
    threshold = op.zero_mode_threshold
    zero_modes = tuple(sum(p.eigenvalue < threshold for p in sec)
                       for sec in secs)
    pairing = pairing_report(secs[0], secs[1], secs[2], threshold, pair_tol)
    return SpectrumReport(
        sector0=secs[0], sector1=secs[1], sector2=secs[2],
        pairing=pairing, zero_modes=zero_modes,
        zero_mode_threshold=threshold,
        leakage=op.report.block_leakage,
        adjointness=op.report.adjointness,
        grid_meta=grid_metadata(grid),
        params_meta=dict(params_meta or {}),
    )
